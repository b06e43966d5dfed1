"""Event networks: detect document events in a timestamped corpus, extract
entity mentions and typed relations per event, merge them into frame-based
networks, and analyze them (filtering, person-location-time tracks, action
co-occurrence, social-network queries)."""

__version__ = "0.1.0"
