"""Analysis queries over an artifact directory: the one code path behind both
the CLI flags and the HTTP query parameters, so the two surfaces always return
identical networks for identical parameters."""

from __future__ import annotations

from . import analyze
from .artifacts import Artifacts
from .netmodel import EventNetwork


def query_filter(artifacts: Artifacts, event_id: str, vtypes=None, etypes=None,
                 names=None, min_weight: float | None = None) -> EventNetwork:
    net = artifacts.network(event_id)
    vp = analyze.Predicate.build(types=vtypes, names=names, min_weight=min_weight)
    ep = analyze.Predicate.build(types=etypes)
    return analyze.filter_network(net, vp, ep)


def query_plt(artifacts: Artifacts, person: str,
              event_id: str | None = None) -> EventNetwork:
    if event_id is not None:
        nets = [artifacts.network(event_id)]
    else:
        nets = artifacts.all_networks()
    return analyze.plt_analysis(nets, person)


def query_action(artifacts: Artifacts, event_id: str,
                 threshold: float | None = None,
                 min_cooccur: int | None = None) -> EventNetwork:
    config = artifacts.config
    if threshold is None:
        threshold = config.get("action_threshold", analyze.ACTION_THRESHOLD)
    if min_cooccur is None:
        min_cooccur = config.get("min_cooccur", analyze.MIN_COOCCURRENCE)
    event = artifacts.event(event_id)
    return analyze.action_analysis(
        event, artifacts.store, artifacts.recognizer,
        artifacts.action_classifier, artifacts.lexicon,
        threshold=threshold, min_cooccur=min_cooccur,
        min_len=config.get("min_surface_len", 2),
        max_len=config.get("max_surface_len", 6))


def query_path(artifacts: Artifacts, event_id: str, a: str, b: str) -> EventNetwork:
    net = artifacts.network(event_id)
    return analyze.path_network(net, analyze.shortest_path(net, a, b))


def query_ego(artifacts: Artifacts, event_id: str, center: str,
              radius: int = 1) -> EventNetwork:
    return analyze.ego_network(artifacts.network(event_id), center, radius=radius)
