"""Document event detection: collapsed Gibbs LDA per time slice, topic
centroids in term space, nearest-centroid event assignment, and recursive
sub-event detection (skipped for events with fewer than ten documents)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .corpus import Vocabulary

DEFAULT_TOPICS = 25
DEFAULT_BETA = 0.1
DEFAULT_ITERATIONS = 1000
SUBEVENT_MIN_DOCS = 10
TOP_WORDS = 100


@dataclass
class TopicModel:
    K: int
    phi: np.ndarray  # (K, V) word-topic distributions
    theta: np.ndarray  # (D, K) per-document topic distributions
    alpha: float
    beta: float
    iterations: int
    seed: int


@dataclass
class DocumentEvent:
    id: str
    members: list[str]
    topic: int
    level: str = "event"  # or "sub-event"
    top_words: list[tuple[str, float]] = field(default_factory=list)
    children: list["DocumentEvent"] = field(default_factory=list)


@njit(cache=True)
def _gibbs_sweeps(doc_ids, word_ids, n_docs, n_words, K, alpha, beta, iterations, seed):
    np.random.seed(seed)
    n_tokens = doc_ids.shape[0]
    z = np.empty(n_tokens, np.int64)
    ndk = np.zeros((n_docs, K), np.int64)
    nkw = np.zeros((K, n_words), np.int64)
    nk = np.zeros(K, np.int64)
    for t in range(n_tokens):
        k = np.random.randint(0, K)
        z[t] = k
        ndk[doc_ids[t], k] += 1
        nkw[k, word_ids[t]] += 1
        nk[k] += 1
    p = np.empty(K, np.float64)
    vbeta = n_words * beta
    for _ in range(iterations):
        for t in range(n_tokens):
            d = doc_ids[t]
            w = word_ids[t]
            k = z[t]
            ndk[d, k] -= 1
            nkw[k, w] -= 1
            nk[k] -= 1
            total = 0.0
            for j in range(K):
                pj = (nkw[j, w] + beta) / (nk[j] + vbeta) * (ndk[d, j] + alpha)
                p[j] = pj
                total += pj
            u = np.random.random() * total
            acc = 0.0
            k = K - 1
            for j in range(K):
                acc += p[j]
                if u < acc:
                    k = j
                    break
            z[t] = k
            ndk[d, k] += 1
            nkw[k, w] += 1
            nk[k] += 1
    return ndk, nkw, nk


def _token_arrays(term_docs, vocab: Vocabulary):
    doc_ids, word_ids = [], []
    for d, counts in enumerate(term_docs):
        for term, count in counts.items():
            w = vocab.index.get(term)
            if w is None:
                continue
            doc_ids.extend([d] * count)
            word_ids.extend([w] * count)
    return (
        np.asarray(doc_ids, dtype=np.int64),
        np.asarray(word_ids, dtype=np.int64),
    )


def fit_lda(
    term_docs,
    vocab: Vocabulary,
    K: int = DEFAULT_TOPICS,
    alpha: float | None = None,
    beta: float = DEFAULT_BETA,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
) -> TopicModel:
    """Collapsed Gibbs sampling over topic assignments; phi/theta are
    estimated from the final counts with Dirichlet smoothing.

    alpha defaults to 50/K. Deterministic given the seed.
    """
    term_docs = list(term_docs)
    if K < 1:
        raise ValueError(f"K must be >= 1: {K}")
    if iterations < 0:
        raise ValueError(f"iterations must be >= 0: {iterations}")
    if alpha is None:
        alpha = 50.0 / K
    doc_ids, word_ids = _token_arrays(term_docs, vocab)
    if doc_ids.size == 0:
        raise ValueError("empty term matrix: no in-vocabulary tokens")
    n_docs = len(term_docs)
    V = len(vocab)
    ndk, nkw, nk = _gibbs_sweeps(
        doc_ids, word_ids, n_docs, V, K, float(alpha), float(beta), iterations, seed
    )
    phi = (nkw + beta) / (nk[:, None] + V * beta)
    theta = (ndk + alpha) / (ndk.sum(axis=1)[:, None] + K * alpha)
    return TopicModel(K=K, phi=phi, theta=theta, alpha=float(alpha), beta=float(beta),
                      iterations=iterations, seed=seed)


def _doc_vector(counts, vocab: Vocabulary) -> np.ndarray:
    """L1-normalized term-frequency vector over the vocabulary, so documents
    and topic centroids live in the same probability simplex."""
    x = np.zeros(len(vocab))
    for term, count in counts.items():
        w = vocab.index.get(term)
        if w is not None:
            x[w] = count
    total = x.sum()
    if total > 0:
        x /= total
    return x


def assign_events(
    docs,
    model: TopicModel,
    vocab: Vocabulary,
    prefix: str = "",
    top_n: int = TOP_WORDS,
    level: str = "event",
    tag: str = "e",
) -> list[DocumentEvent]:
    """Assign each (doc_id, term multiset) to the topic centroid at minimal
    Euclidean distance; ties go to the lowest topic index. Empty events are
    dropped. Event ids are path-like: {prefix}{tag}{topic:02d}."""
    docs = list(docs)
    members: dict[int, list[str]] = {}
    for doc_id, counts in docs:
        x = _doc_vector(counts, vocab)
        dists = np.linalg.norm(model.phi - x, axis=1)
        k = int(np.argmin(dists))
        members.setdefault(k, []).append(doc_id)
    events = []
    for k in sorted(members):
        event = DocumentEvent(
            id=f"{prefix}{tag}{k:02d}",
            members=members[k],
            topic=k,
            level=level,
        )
        event.top_words = top_words(event, model, vocab, n=top_n)
        events.append(event)
    return events


def top_words(event: DocumentEvent, model: TopicModel, vocab: Vocabulary,
              n: int = TOP_WORDS) -> list[tuple[str, float]]:
    """The n most probable vocabulary terms of the event's topic, descending,
    ties by codepoint order; n is clamped to the vocabulary size."""
    if n <= 0:
        raise ValueError(f"n must be positive: {n}")
    row = model.phi[event.topic]
    order = sorted(range(len(vocab)), key=lambda w: (-row[w], vocab.terms[w]))
    return [(vocab.terms[w], float(row[w])) for w in order[:n]]


def detect_hierarchical(
    docs,
    vocab: Vocabulary,
    K: int = DEFAULT_TOPICS,
    min_docs: int = SUBEVENT_MIN_DOCS,
    alpha: float | None = None,
    beta: float = DEFAULT_BETA,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
    top_n: int = TOP_WORDS,
    prefix: str = "",
) -> list[DocumentEvent]:
    """Two-level event tree for one slice: top-level events from an LDA fit
    over the slice, then a fresh fit over each event's members for its
    sub-events. Recursion is skipped for events with fewer than min_docs
    members; a failed sub-fit leaves that event childless."""
    docs = list(docs)
    if not docs:
        raise ValueError("empty slice")
    model = fit_lda([c for _, c in docs], vocab, K=K, alpha=alpha, beta=beta,
                    iterations=iterations, seed=seed)
    events = assign_events(docs, model, vocab, prefix=prefix, top_n=top_n)
    by_id = {doc_id: counts for doc_id, counts in docs}
    for event in events:
        if len(event.members) < min_docs:
            continue
        sub_docs = [(doc_id, by_id[doc_id]) for doc_id in event.members]
        sub_seed = seed * 31 + event.topic + 1
        try:
            sub_model = fit_lda([c for _, c in sub_docs], vocab, K=K, alpha=alpha,
                                beta=beta, iterations=iterations, seed=sub_seed)
        except ValueError:
            continue
        event.children = assign_events(
            sub_docs, sub_model, vocab,
            prefix=f"{event.id}/", top_n=top_n, level="sub-event", tag="s",
        )
    return events


def event_to_dict(event: DocumentEvent) -> dict:
    return {
        "id": event.id,
        "level": event.level,
        "topic": event.topic,
        "members": list(event.members),
        "top_words": [{"word": w, "weight": p} for w, p in event.top_words],
        "children": [event_to_dict(c) for c in event.children],
    }


def event_from_dict(payload: dict) -> DocumentEvent:
    return DocumentEvent(
        id=payload["id"],
        members=list(payload["members"]),
        topic=payload["topic"],
        level=payload.get("level", "event"),
        top_words=[(tw["word"], tw["weight"]) for tw in payload.get("top_words", [])],
        children=[event_from_dict(c) for c in payload.get("children", [])],
    )


def walk_events(events) -> list[DocumentEvent]:
    """Flatten an event forest depth-first (events before their sub-events)."""
    out = []
    for event in events:
        out.append(event)
        out.extend(walk_events(event.children))
    return out
