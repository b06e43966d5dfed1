"""Document ingestion, Omni-word tokenization, vocabulary pruning and
calendar time-slicing.

Terms are "Omni-words": every lexicon entry occurring as a substring of the
text counts, with multiplicity, including overlapping occurrences.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone

logger = logging.getLogger(__name__)


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp into an aware UTC datetime.

    Accepts a trailing 'Z' as well as explicit offsets; naive values are
    taken to be UTC already.
    """
    if not isinstance(value, str) or not value:
        raise ValueError(f"unparseable timestamp: {value!r}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        raise ValueError(f"unparseable timestamp: {value!r}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    timestamp: datetime  # aware, UTC
    source: str = ""


class DocumentStore:
    """Immutable collection of documents with unique ids."""

    def __init__(self, documents=(), errors=()):
        self._docs: list[Document] = []
        self._by_id: dict[str, Document] = {}
        self.errors: tuple[str, ...] = tuple(errors)
        for doc in documents:
            if doc.id in self._by_id:
                raise ValueError(f"duplicate document id: {doc.id}")
            self._docs.append(doc)
            self._by_id[doc.id] = doc

    def __len__(self):
        return len(self._docs)

    def __iter__(self):
        return iter(self._docs)

    def __contains__(self, doc_id):
        return doc_id in self._by_id

    def get(self, doc_id: str) -> Document:
        try:
            return self._by_id[doc_id]
        except KeyError:
            raise KeyError(f"document id not found: {doc_id}") from None

    @property
    def ids(self) -> list[str]:
        return [d.id for d in self._docs]


def ingest_documents(path, format: str = "jsonl", strict: bool = False) -> DocumentStore:
    """Read a JSONL corpus; one document record per line.

    Malformed lines (bad JSON, missing fields, unparseable timestamp,
    duplicate id) are rejected with a per-line error and ingestion
    continues; with strict=True the first bad line aborts.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported corpus format: {format}")
    docs: list[Document] = []
    seen: set[str] = set()
    errors: list[str] = []

    def fail(lineno, msg):
        message = f"line {lineno}: {msg}"
        if strict:
            raise ValueError(message)
        errors.append(message)
        logger.warning("ingest skipped %s", message)

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                fail(lineno, f"invalid JSON ({exc.msg})")
                continue
            if not isinstance(record, dict):
                fail(lineno, "record is not an object")
                continue
            missing = [k for k in ("id", "text", "timestamp") if k not in record]
            if missing:
                fail(lineno, f"missing fields: {', '.join(missing)}")
                continue
            doc_id = str(record["id"])
            if doc_id in seen:
                fail(lineno, f"duplicate document id: {doc_id}")
                continue
            try:
                ts = parse_timestamp(record["timestamp"])
            except ValueError as exc:
                fail(lineno, str(exc))
                continue
            seen.add(doc_id)
            docs.append(
                Document(
                    id=doc_id,
                    text=str(record["text"]),
                    timestamp=ts,
                    source=str(record.get("source", "")),
                )
            )
    logger.info("ingested %d documents from %s (%d rejected)", len(docs), path, len(errors))
    return DocumentStore(docs, errors)


class Lexicon:
    """A set of candidate terms; the scan window for tokenization is capped
    at the longest entry."""

    def __init__(self, entries):
        entries = set(entries)
        if any(e == "" for e in entries):
            raise ValueError("lexicon contains an empty entry")
        self.entries: frozenset[str] = frozenset(entries)
        self.max_entry_len: int = max((len(e) for e in entries), default=0)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, term):
        return term in self.entries

    @classmethod
    def from_file(cls, path) -> "Lexicon":
        with open(path, encoding="utf-8") as fh:
            return cls(line.strip() for line in fh if line.strip())


def omni_word_spans(text: str, lexicon: Lexicon) -> list[tuple[str, int, int]]:
    """All lexicon entries occurring as substrings, with [start, end) character
    spans; overlapping occurrences all count."""
    spans = []
    n = len(text)
    window = lexicon.max_entry_len
    for i in range(n):
        for j in range(i + 1, min(n, i + window) + 1):
            piece = text[i:j]
            if piece in lexicon:
                spans.append((piece, i, j))
    return spans


def tokenize_omni_word(text: str, lexicon: Lexicon) -> Counter:
    """Term multiset of every lexicon entry occurring as a substring of text.

    Pure: identical (text, lexicon) inputs give identical multisets.
    """
    if len(lexicon) == 0:
        raise ValueError("empty lexicon")
    counts: Counter = Counter()
    for term, _, _ in omni_word_spans(text, lexicon):
        counts[term] += 1
    return counts


@dataclass
class Vocabulary:
    terms: list[str]
    freq: dict[str, int]
    index: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {t: i for i, t in enumerate(self.terms)}

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.index


def build_vocabulary(
    store: DocumentStore,
    lexicon: Lexicon,
    prune_ratio: float = 0.05,
    min_freq: int = 10,
) -> Vocabulary:
    """Corpus-wide Omni-word frequencies with the frequency extremes pruned.

    The top and bottom prune_ratio of distinct terms (by frequency rank) are
    removed first, then any term whose corpus frequency is below min_freq.
    Term order is descending frequency, ties by codepoint order.
    """
    if len(store) == 0:
        raise ValueError("empty corpus")
    if not 0.0 <= prune_ratio < 0.5:
        raise ValueError(f"prune_ratio out of range [0, 0.5): {prune_ratio}")
    freq: Counter = Counter()
    for doc in store:
        freq.update(tokenize_omni_word(doc.text, lexicon))
    ranked = sorted(freq, key=lambda t: (-freq[t], t))
    cut = int(len(ranked) * prune_ratio)
    if cut:
        ranked = ranked[cut:-cut]
    terms = [t for t in ranked if freq[t] >= min_freq]
    return Vocabulary(terms=terms, freq={t: freq[t] for t in terms})


@dataclass(frozen=True)
class TimeSlice:
    index: int
    start: datetime
    end: datetime
    members: tuple[str, ...]


def _month_floor(ts: datetime) -> datetime:
    return datetime(ts.year, ts.month, 1, tzinfo=timezone.utc)


def _add_months(ts: datetime, months: int) -> datetime:
    total = ts.year * 12 + (ts.month - 1) + months
    return datetime(total // 12, total % 12 + 1, 1, tzinfo=timezone.utc)


def partition_by_time(store: DocumentStore, step_months: int = 5) -> list[TimeSlice]:
    """Partition documents into consecutive calendar windows of step_months,
    anchored at the calendar month of the earliest document.

    Every document lands in exactly one slice; the slices jointly cover the
    corpus span (intermediate windows may be empty).
    """
    if step_months < 1:
        raise ValueError(f"step_months must be >= 1: {step_months}")
    if len(store) == 0:
        raise ValueError("empty corpus")
    docs = sorted(store, key=lambda d: (d.timestamp, d.id))
    anchor = _month_floor(docs[0].timestamp)
    latest = docs[-1].timestamp
    slices: list[TimeSlice] = []
    start = anchor
    i = 0
    index = 0
    while start <= latest:
        end = _add_months(start, step_months)
        members = []
        while i < len(docs) and docs[i].timestamp < end:
            members.append(docs[i].id)
            i += 1
        slices.append(TimeSlice(index=index, start=start, end=end, members=tuple(members)))
        index += 1
        start = end
    return slices
