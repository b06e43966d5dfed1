"""Analyses over event networks: predicate filtering, person-location-time
(PLT) tracks, action co-occurrence graphs, and social-network queries
(shortest path, ego neighborhoods). All functions are pure over immutable
networks."""

from __future__ import annotations

import logging
from collections import Counter, deque
from dataclasses import dataclass, field

from .corpus import DocumentStore, Lexicon, parse_timestamp, tokenize_omni_word
from .extract import EntityRecognizer, recognize_entities, split_sentences
from .learn import Classifier, Instance, decide
from .netmodel import EdgeFrame, EventNetwork, VertexFrame, copy_edge, copy_vertex

logger = logging.getLogger(__name__)

ACTION_THRESHOLD = 0.995
MIN_COOCCURRENCE = 12


@dataclass(frozen=True)
class Predicate:
    """Conjunction of clauses over a vertex or edge frame.

    Unset clauses always hold; an info clause requires the key to exist (and
    to equal the given value unless the value is None), so unknown info keys
    evaluate to false. A name clause never holds on an edge (edges carry no
    name slot).
    """

    types: frozenset[str] | None = None  # vtype for vertices, etype for edges
    names: frozenset[str] | None = None
    min_weight: float | None = None
    info: tuple[tuple[str, object], ...] = ()

    @classmethod
    def build(cls, types=None, names=None, min_weight=None, info=None) -> "Predicate":
        return cls(
            types=frozenset(types) if types else None,
            names=frozenset(names) if names else None,
            min_weight=min_weight,
            info=tuple(sorted((info or {}).items())),
        )

    def _info_holds(self, frame_info: dict) -> bool:
        for key, value in self.info:
            if key not in frame_info:
                return False
            if value is not None and frame_info[key] != value:
                return False
        return True

    def matches_vertex(self, v: VertexFrame) -> bool:
        if self.types is not None and v.vtype not in self.types:
            return False
        if self.names is not None and v.name not in self.names:
            return False
        if self.min_weight is not None and v.weight < self.min_weight:
            return False
        return self._info_holds(v.info)

    def matches_edge(self, e: EdgeFrame) -> bool:
        if self.types is not None and e.etype not in self.types:
            return False
        if self.names is not None:
            return False
        if self.min_weight is not None and e.weight < self.min_weight:
            return False
        return self._info_holds(e.info)


ALWAYS = Predicate()


def filter_network(net: EventNetwork, vp: Predicate = ALWAYS,
                   ep: Predicate = ALWAYS) -> EventNetwork:
    """Induced-subgraph filtering: keep vertices satisfying vp, then edges
    satisfying ep whose endpoints both survived. Keys are preserved."""
    vertices = [copy_vertex(v) for v in net.vertices if vp.matches_vertex(v)]
    kept = {v.key for v in vertices}
    edges = [copy_edge(e) for e in net.edges
             if ep.matches_edge(e) and e.v1 in kept and e.v2 in kept]
    return EventNetwork(event_id=net.event_id, vertices=vertices, edges=edges,
                        provenance=dict(net.provenance))


def _dated_occurrences(edge: EdgeFrame) -> list[tuple[str, str | None]]:
    """(day-precision date, doc id) per datable occurrence on the edge; the
    timestamps and doc_ids info lists are parallel, undated entries drop."""
    timestamps = edge.info.get("timestamps") or []
    doc_ids = edge.info.get("doc_ids") or []
    occurrences = []
    for i, ts in enumerate(timestamps):
        if ts is None:
            continue
        doc_id = doc_ids[i] if i < len(doc_ids) else None
        occurrences.append((parse_timestamp(ts).date().isoformat(), doc_id))
    return occurrences


def plt_analysis(nets, person: str) -> EventNetwork:
    """Person-location-time track: select PHYS edges with a PER endpoint named
    person and a LOC endpoint, then substitute the person endpoint with a TIME
    vertex named by the source document's date (one edge per relation mention,
    taken from the edge's per-occurrence timestamps).

    Identical dates and identical locations merge into single vertices; the
    result is bipartite TIME-LOC.
    """
    if not person:
        raise ValueError("person name must be non-empty")
    if isinstance(nets, EventNetwork):
        nets = [nets]
    out = EventNetwork(event_id=f"plt:{person}",
                       provenance={"analysis": "plt", "person": person})
    keys: dict[tuple[str, str], int] = {}

    def vertex(name, vtype):
        identity = (name, vtype)
        if identity not in keys:
            keys[identity] = len(out.vertices)
            out.vertices.append(VertexFrame(
                key=keys[identity], name=name, vtype=vtype, weight=1.0,
                info={"doc_ids": []},
            ))
        return keys[identity]

    for net in nets:
        by_key = {v.key: v for v in net.vertices}
        for edge in net.edges:
            if edge.etype != "PHYS":
                continue
            a, b = by_key[edge.v1], by_key[edge.v2]
            if a.vtype == "PER" and a.name == person and b.vtype == "LOC":
                loc = b
            elif b.vtype == "PER" and b.name == person and a.vtype == "LOC":
                loc = a
            else:
                continue
            for date, doc_id in _dated_occurrences(edge):
                tk = vertex(date, "TIME")
                lk = vertex(loc.name, "LOC")
                if doc_id is not None:
                    out.vertices[tk].info["doc_ids"].append(doc_id)
                    out.vertices[lk].info["doc_ids"].append(doc_id)
                out.edges.append(EdgeFrame(
                    etype="PHYS", v1=tk, v2=lk, weight=1.0,
                    info={"event_id": net.event_id, "doc_id": doc_id, "date": date},
                ))
    return out


def action_analysis(
    event,
    store: DocumentStore,
    recognizer: EntityRecognizer,
    action_clf: Classifier,
    lexicon: Lexicon,
    threshold: float = ACTION_THRESHOLD,
    min_cooccur: int = MIN_COOCCURRENCE,
    min_len: int = 2,
    max_len: int = 6,
) -> EventNetwork:
    """Entity co-occurrence graph over the event's action sentences.

    Sentences with at least two entity mentions are classified; accepted ones
    (P(action) >= threshold) contribute one co-occurrence per unordered entity
    pair, regardless of repeated mentions. Pairs below min_cooccur are pruned,
    then isolated entities dropped.
    """
    pair_counts: Counter = Counter()
    entity_weight: dict[tuple[str, str], float] = {}
    candidate_sentences = 0
    accepted_sentences = 0
    for doc_id in event.members:
        doc = store.get(doc_id)
        for sentence in split_sentences(doc):
            mentions = recognize_entities(sentence, recognizer,
                                          min_len=min_len, max_len=max_len)
            entities = {}
            for m in mentions:
                identity = (m.surface, m.etype)
                entities[identity] = max(entities.get(identity, 0.0), m.weight)
            if len(entities) < 2:
                continue
            candidate_sentences += 1
            feats = tokenize_omni_word(sentence.text, lexicon)
            if not decide(action_clf, feats, threshold=threshold):
                continue
            accepted_sentences += 1
            for identity, weight in entities.items():
                entity_weight[identity] = max(entity_weight.get(identity, 0.0), weight)
            ordered = sorted(entities)
            for i in range(len(ordered)):
                for j in range(i + 1, len(ordered)):
                    pair_counts[(ordered[i], ordered[j])] += 1
    logger.info("action analysis on %s: %d candidate sentences, %d accepted",
                event.id, candidate_sentences, accepted_sentences)
    return cooccurrence_network(
        pair_counts, entity_weight, min_cooccur=min_cooccur,
        event_id=f"action:{event.id}",
        provenance={"analysis": "action", "event_id": event.id,
                    "threshold": threshold, "min_cooccur": min_cooccur,
                    "candidate_sentences": candidate_sentences,
                    "accepted_sentences": accepted_sentences},
    )


def cooccurrence_network(pair_counts, entity_weight=None, min_cooccur: int = 1,
                         event_id: str = "cooccur", provenance=None) -> EventNetwork:
    """CO-OCCUR network from unordered (name, vtype) pair frequencies; edges
    below min_cooccur are erased and entities left isolated are dropped."""
    entity_weight = entity_weight or {}
    surviving = {pair: count for pair, count in pair_counts.items()
                 if count >= min_cooccur}
    out = EventNetwork(event_id=event_id, provenance=provenance or {})
    keys: dict[tuple[str, str], int] = {}

    def vertex(identity):
        if identity not in keys:
            name, vtype = identity
            keys[identity] = len(out.vertices)
            out.vertices.append(VertexFrame(
                key=keys[identity], name=name, vtype=vtype,
                weight=entity_weight.get(identity, 1.0), info={},
            ))
        return keys[identity]

    for (a, b), count in sorted(surviving.items()):
        out.edges.append(EdgeFrame(
            etype="CO-OCCUR", v1=vertex(a), v2=vertex(b),
            weight=float(count), info={"count": count},
        ))
    return out


def count_cooccurrences(accepted_sentences) -> Counter:
    """Unordered pair frequencies over iterables of entity identities, one
    increment per sentence per pair."""
    counts: Counter = Counter()
    for entities in accepted_sentences:
        ordered = sorted(set(entities))
        for i in range(len(ordered)):
            for j in range(i + 1, len(ordered)):
                counts[(ordered[i], ordered[j])] += 1
    return counts


def generate_action_negatives(sentences, annotated, trigger_lexicon,
                              lexicon: Lexicon, label: str = "NONE") -> list[Instance]:
    """Hard negatives for action training: sentences that are not annotated
    event mentions but contain at least one trigger term."""
    triggers = set(trigger_lexicon)
    if not triggers:
        raise ValueError("empty trigger lexicon")
    annotated = set(annotated)
    negatives = []
    for sentence in sentences:
        if (sentence.doc_id, sentence.index) in annotated:
            continue
        if not any(t in sentence.text for t in triggers):
            continue
        negatives.append(Instance(tokenize_omni_word(sentence.text, lexicon), label))
    logger.info("collected %d negative action instances", len(negatives))
    return negatives


@dataclass
class PathResult:
    status: str  # "found" | "disconnected" | "not_found"
    vertices: list[int] = field(default_factory=list)
    edges: list[EdgeFrame] = field(default_factory=list)
    message: str = ""

    @property
    def found(self) -> bool:
        return self.status == "found"

    @property
    def hops(self) -> int | None:
        return len(self.vertices) - 1 if self.found else None


def _adjacency(net: EventNetwork) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {v.key: set() for v in net.vertices}
    for e in net.edges:
        adj[e.v1].add(e.v2)
        adj[e.v2].add(e.v1)
    return adj


def shortest_path(net: EventNetwork, a: str, b: str) -> PathResult:
    """Hop-minimal path between any vertex named a and any vertex named b
    (breadth-first); among equally short paths the lexicographically smallest
    key sequence wins."""
    sources = sorted(net.keys_by_name(a))
    targets = sorted(net.keys_by_name(b))
    for name, found in ((a, sources), (b, targets)):
        if not found:
            return PathResult(status="not_found",
                              message=f"vertex not found: {name}")
    adj = _adjacency(net)

    # distance-to-target from a multi-source BFS
    dist = {t: 0 for t in targets}
    queue = deque(targets)
    while queue:
        cur = queue.popleft()
        for nxt in adj[cur]:
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                queue.append(nxt)
    reachable = [s for s in sources if s in dist]
    if not reachable:
        return PathResult(status="disconnected",
                          message=f"no path between {a} and {b}")
    best = min(dist[s] for s in reachable)
    start = min(s for s in reachable if dist[s] == best)
    path = [start]
    cur = start
    while dist[cur] > 0:
        cur = min(n for n in adj[cur] if dist.get(n) == dist[cur] - 1)
        path.append(cur)

    edge_lookup: dict[tuple[int, int], EdgeFrame] = {}
    for e in net.edges:
        pair = (min(e.v1, e.v2), max(e.v1, e.v2))
        edge_lookup.setdefault(pair, e)
    edges = [edge_lookup[(min(u, v), max(u, v))]
             for u, v in zip(path, path[1:])]
    return PathResult(status="found", vertices=path, edges=edges)


def path_network(net: EventNetwork, result: PathResult) -> EventNetwork:
    """Shortest-path result as a network (so it reuses every exporter); the
    status, hop count and key sequence ride in the provenance."""
    provenance = {"analysis": "path", "status": result.status,
                  "source": net.event_id}
    if not result.found:
        provenance["message"] = result.message
        return EventNetwork(event_id="path", provenance=provenance)
    provenance["hops"] = result.hops
    provenance["sequence"] = list(result.vertices)
    on_path = set(result.vertices)
    vertices = [copy_vertex(v) for v in net.vertices if v.key in on_path]
    edges = [copy_edge(e) for e in result.edges]
    return EventNetwork(event_id="path", vertices=vertices, edges=edges,
                        provenance=provenance)


def ego_network(net: EventNetwork, center: str, radius: int = 1) -> EventNetwork:
    """Induced subgraph on the vertices within radius hops of any vertex named
    center; an absent center gives an empty network."""
    if radius < 1:
        raise ValueError(f"radius must be >= 1: {radius}")
    seeds = net.keys_by_name(center)
    if not seeds:
        return EventNetwork(event_id=f"ego:{center}",
                            provenance={"analysis": "ego", "center": center,
                                        "radius": radius})
    adj = _adjacency(net)
    dist = {s: 0 for s in seeds}
    queue = deque(seeds)
    while queue:
        cur = queue.popleft()
        if dist[cur] == radius:
            continue
        for nxt in adj[cur]:
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                queue.append(nxt)
    vertices = [copy_vertex(v) for v in net.vertices if v.key in dist]
    kept = set(dist)
    edges = [copy_edge(e) for e in net.edges if e.v1 in kept and e.v2 in kept]
    return EventNetwork(
        event_id=f"ego:{center}", vertices=vertices, edges=edges,
        provenance={"analysis": "ego", "center": center, "radius": radius,
                    "source": net.event_id},
    )
