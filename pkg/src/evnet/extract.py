"""Per-event entity-mention recognition and relation-mention classification.

Entity recognition follows a boundary-assembling contract: detect candidate
begin/end boundaries, assemble (begin, end) pairs into candidate spans, and
assess each candidate with a scorer. Three recognizers implement it: a
gazetteer lookup (default), a pass-through over pre-annotated input, and
trained boundary/assessment classifiers.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field

from .corpus import Document, DocumentStore, Lexicon, omni_word_spans
from .learn import Classifier, Instance, predict, train_maxent

logger = logging.getLogger(__name__)

ENTITY_TYPES = ("PER", "LOC", "ORG")
RELATION_TYPES = ("PER-SOC", "GEN-AFF", "ORG-AFF", "PART-WHOLE", "PHYS")
NO_RELATION = "NONE"

MIN_SURFACE_LEN = 2
MAX_SURFACE_LEN = 6
MAX_SENTENCE_ENTITIES = 10

SENTENCE_TERMINATORS = frozenset("。！？!?.\n")


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    index: int
    text: str
    start: int  # [start, end) char offsets into the document
    end: int


@dataclass(frozen=True)
class EntityMention:
    surface: str
    etype: str
    weight: float
    doc_id: str
    sentence_index: int
    start: int  # [start, end) char span within the sentence
    end: int


@dataclass(frozen=True)
class RelationMention:
    rtype: str
    arg1: EntityMention
    arg2: EntityMention
    weight: float
    doc_id: str
    sentence_index: int


def split_sentences(doc: Document) -> list[Sentence]:
    """Split on sentence terminators (。！？!?. and newline), preserving char
    offsets; whitespace-only segments are dropped."""
    sentences = []
    start = 0
    index = 0

    def flush(end):
        nonlocal start, index
        piece = doc.text[start:end]
        if piece.strip():
            sentences.append(Sentence(doc_id=doc.id, index=index, text=piece,
                                      start=start, end=end))
            index += 1
        start = end + 1

    for i, ch in enumerate(doc.text):
        if ch in SENTENCE_TERMINATORS:
            flush(i)
    if start < len(doc.text):
        flush(len(doc.text))
    return sentences


class EntityRecognizer:
    """Recognizer interface: produce candidate mentions for one sentence.

    Length filtering is applied centrally by recognize_entities.
    """

    def candidates(self, sentence: Sentence) -> list[EntityMention]:
        raise NotImplementedError


class BoundaryAssemblingRecognizer(EntityRecognizer):
    """Shared detect/assemble/assess skeleton.

    Subclasses supply boundary detection and candidate assessment; assembly
    pairs every begin boundary with every later end boundary (window capped
    at max_span chars) and keeps candidates the assessor scores.
    """

    max_span = MAX_SURFACE_LEN

    def detect_boundaries(self, sentence: Sentence):
        raise NotImplementedError

    def assess(self, sentence: Sentence, start: int, end: int):
        """Return (etype, score) for an accepted candidate, else None."""
        raise NotImplementedError

    def candidates(self, sentence: Sentence) -> list[EntityMention]:
        begins, ends = self.detect_boundaries(sentence)
        mentions = []
        for b in sorted(begins):
            for e in sorted(ends):
                if e <= b or e - b > self.max_span:
                    continue
                verdict = self.assess(sentence, b, e)
                if verdict is None:
                    continue
                etype, score = verdict
                mentions.append(EntityMention(
                    surface=sentence.text[b:e], etype=etype, weight=score,
                    doc_id=sentence.doc_id, sentence_index=sentence.index,
                    start=b, end=e,
                ))
        return mentions


class GazetteerRecognizer(BoundaryAssemblingRecognizer):
    """Dictionary-backed recognizer: boundaries are the start/end positions of
    gazetteer hits, assessment is dictionary membership with weight 1.0."""

    def __init__(self, gazetteer: dict):
        bad = {s for s, t in gazetteer.items() if t not in ENTITY_TYPES}
        if bad:
            raise ValueError(f"gazetteer entries with unknown type: {sorted(bad)[:5]}")
        self.gazetteer = dict(gazetteer)
        self.max_span = max((len(s) for s in gazetteer), default=MAX_SURFACE_LEN)
        self._lexicon = Lexicon(gazetteer) if gazetteer else None

    @classmethod
    def from_file(cls, path) -> "GazetteerRecognizer":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def detect_boundaries(self, sentence: Sentence):
        begins, ends = set(), set()
        if self._lexicon is not None:
            for _, b, e in omni_word_spans(sentence.text, self._lexicon):
                begins.add(b)
                ends.add(e)
        return begins, ends

    def assess(self, sentence: Sentence, start: int, end: int):
        etype = self.gazetteer.get(sentence.text[start:end])
        if etype is None:
            return None
        return etype, 1.0


class AnnotationRecognizer(EntityRecognizer):
    """Pass-through over pre-annotated mentions (document-level offsets)."""

    def __init__(self, annotations: dict):
        # doc_id -> list of {"surface", "etype", "start", "end"}
        self.annotations = annotations

    def candidates(self, sentence: Sentence) -> list[EntityMention]:
        mentions = []
        for record in self.annotations.get(sentence.doc_id, []):
            if record["start"] < sentence.start or record["end"] > sentence.end:
                continue
            b = record["start"] - sentence.start
            e = record["end"] - sentence.start
            if sentence.text[b:e] != record["surface"]:
                raise ValueError(
                    f"annotation mismatch in {sentence.doc_id}: "
                    f"expected {record['surface']!r} at [{record['start']},{record['end']})"
                )
            mentions.append(EntityMention(
                surface=record["surface"], etype=record["etype"],
                weight=float(record.get("weight", 1.0)),
                doc_id=sentence.doc_id, sentence_index=sentence.index,
                start=b, end=e,
            ))
        return mentions


def _char_window_features(text: str, pos: int, width: int = 2) -> Counter:
    feats = Counter()
    for off in range(-width, width + 1):
        i = pos + off
        ch = text[i] if 0 <= i < len(text) else "_"
        feats[f"c{off}:{ch}"] += 1
    for off in range(-width, width):
        i, j = pos + off, pos + off + 1
        a = text[i] if 0 <= i < len(text) else "_"
        b = text[j] if 0 <= j < len(text) else "_"
        feats[f"b{off}:{a}{b}"] += 1
    return feats


def _span_features(text: str, start: int, end: int) -> Counter:
    feats = Counter()
    piece = text[start:end]
    feats[f"len:{end - start}"] += 1
    feats[f"first:{piece[0]}"] += 1
    feats[f"last:{piece[-1]}"] += 1
    for ch in piece:
        feats[f"in:{ch}"] += 1
    for i in range(len(piece) - 1):
        feats[f"bi:{piece[i:i + 2]}"] += 1
    feats[f"before:{text[start - 1] if start > 0 else '_'}"] += 1
    feats[f"after:{text[end] if end < len(text) else '_'}"] += 1
    return feats


class TrainedBoundaryRecognizer(BoundaryAssemblingRecognizer):
    """Boundary classifiers over character windows plus a span assessment
    classifier (char n-gram features; not a published feature set).

    Boundary positions scoring >= boundary_threshold become candidates; the
    assessment classifier types each span or rejects it as NONE.
    """

    def __init__(self, begin_clf: Classifier, end_clf: Classifier,
                 span_clf: Classifier, boundary_threshold: float = 0.5,
                 max_span: int = MAX_SURFACE_LEN):
        self.begin_clf = begin_clf
        self.end_clf = end_clf
        self.span_clf = span_clf
        self.boundary_threshold = boundary_threshold
        self.max_span = max_span

    def detect_boundaries(self, sentence: Sentence):
        begins, ends = set(), set()
        text = sentence.text
        for pos in range(len(text)):
            probs = predict(self.begin_clf, _char_window_features(text, pos))
            if probs[self.begin_clf.classes.index("B")] >= self.boundary_threshold:
                begins.add(pos)
        for pos in range(1, len(text) + 1):
            probs = predict(self.end_clf, _char_window_features(text, pos - 1))
            if probs[self.end_clf.classes.index("E")] >= self.boundary_threshold:
                ends.add(pos)
        return begins, ends

    def assess(self, sentence: Sentence, start: int, end: int):
        probs = predict(self.span_clf, _span_features(sentence.text, start, end))
        best = int(probs.argmax())
        etype = self.span_clf.classes[best]
        if etype == NO_RELATION:
            return None
        return etype, float(probs[best])


def train_boundary_recognizer(sentences, annotations: dict, l2: float = 0.01,
                              epochs: int = 200, seed: int = 0) -> TrainedBoundaryRecognizer:
    """Fit begin/end boundary classifiers and the span assessor from
    pre-annotated sentences (same annotation format as AnnotationRecognizer)."""
    begin_insts, end_insts, span_insts = [], [], []
    for sentence in sentences:
        text = sentence.text
        gold = []
        for record in annotations.get(sentence.doc_id, []):
            if record["start"] < sentence.start or record["end"] > sentence.end:
                continue
            gold.append((record["start"] - sentence.start,
                         record["end"] - sentence.start, record["etype"]))
        begin_pos = {b for b, _, _ in gold}
        end_pos = {e for _, e, _ in gold}
        for pos in range(len(text)):
            begin_insts.append(Instance(_char_window_features(text, pos),
                                        "B" if pos in begin_pos else "O"))
        for pos in range(1, len(text) + 1):
            end_insts.append(Instance(_char_window_features(text, pos - 1),
                                      "E" if pos in end_pos else "O"))
        gold_spans = {(b, e): t for b, e, t in gold}
        for b, e, t in gold:
            span_insts.append(Instance(_span_features(text, b, e), t))
        # negative spans: shifted/truncated variants of gold spans
        for b, e, _ in gold:
            for nb, ne in ((b + 1, e), (b, e - 1), (b + 1, e + 1)):
                if 0 <= nb < ne <= len(text) and (nb, ne) not in gold_spans:
                    span_insts.append(Instance(_span_features(text, nb, ne), NO_RELATION))
    begin_clf = train_maxent(begin_insts, l2=l2, epochs=epochs, seed=seed)
    end_clf = train_maxent(end_insts, l2=l2, epochs=epochs, seed=seed)
    span_clf = train_maxent(span_insts, l2=l2, epochs=epochs, seed=seed)
    return TrainedBoundaryRecognizer(begin_clf, end_clf, span_clf)


def recognize_entities(sentence: Sentence, recognizer: EntityRecognizer,
                       min_len: int = MIN_SURFACE_LEN,
                       max_len: int = MAX_SURFACE_LEN) -> list[EntityMention]:
    """Candidates from the recognizer that pass the surface length filter
    (character count bounds, inclusive)."""
    mentions = []
    for m in recognizer.candidates(sentence):
        if not min_len <= len(m.surface) <= max_len:
            continue
        mentions.append(m)
    mentions.sort(key=lambda m: (m.start, m.end, m.etype))
    return mentions


def relation_features(sentence: Sentence, m1: EntityMention, m2: EntityMention,
                      lexicon: Lexicon) -> Counter:
    """Omni-word terms of the span covering both mentions, marked by position:
    inside arg1 (a1:), between (mid:), inside arg2 (a2:), straddling (x:)."""
    first, second = sorted((m1, m2), key=lambda m: (m.start, m.end))
    lo, hi = first.start, max(first.end, second.end)
    feats: Counter = Counter()
    for term, s, e in omni_word_spans(sentence.text[lo:hi], lexicon):
        s += lo
        e += lo
        if first.start <= s and e <= first.end:
            region = "a1"
        elif second.start <= s and e <= second.end:
            region = "a2"
        elif first.end <= s and e <= second.start:
            region = "mid"
        else:
            region = "x"
        feats[f"{region}:{term}"] += 1
    return feats


def extract_relations(sentence: Sentence, mentions, clf: Classifier,
                      lexicon: Lexicon,
                      max_entities: int = MAX_SENTENCE_ENTITIES) -> list[RelationMention]:
    """Classify every unordered mention pair of the sentence; sentences with
    more than max_entities mentions are skipped entirely. Non-NONE predictions
    are emitted with the predicted class probability as weight."""
    mentions = list(mentions)
    if len(mentions) > max_entities:
        return []
    relations = []
    for i in range(len(mentions)):
        for j in range(i + 1, len(mentions)):
            feats = relation_features(sentence, mentions[i], mentions[j], lexicon)
            probs = predict(clf, feats)
            best = int(probs.argmax())
            rtype = clf.classes[best]
            if rtype == NO_RELATION:
                continue
            relations.append(RelationMention(
                rtype=rtype, arg1=mentions[i], arg2=mentions[j],
                weight=float(probs[best]),
                doc_id=sentence.doc_id, sentence_index=sentence.index,
            ))
    return relations


@dataclass
class ExtractionBundle:
    event_id: str
    mentions: list[EntityMention] = field(default_factory=list)
    relations: list[RelationMention] = field(default_factory=list)
    doc_timestamps: dict = field(default_factory=dict)  # doc_id -> ISO string


def extract_document(doc: Document, recognizer: EntityRecognizer,
                     rel_clf: Classifier | None, lexicon: Lexicon | None,
                     min_len: int = MIN_SURFACE_LEN, max_len: int = MAX_SURFACE_LEN,
                     max_entities: int = MAX_SENTENCE_ENTITIES):
    """Mentions and relations for one document, sentence by sentence."""
    mentions, relations = [], []
    for sentence in split_sentences(doc):
        sent_mentions = recognize_entities(sentence, recognizer,
                                           min_len=min_len, max_len=max_len)
        mentions.extend(sent_mentions)
        if rel_clf is not None and lexicon is not None and len(sent_mentions) >= 2:
            relations.extend(extract_relations(sentence, sent_mentions, rel_clf,
                                               lexicon, max_entities=max_entities))
    return mentions, relations


def extract_event(event, store: DocumentStore, recognizer: EntityRecognizer,
                  rel_clf: Classifier | None, lexicon: Lexicon | None,
                  min_len: int = MIN_SURFACE_LEN, max_len: int = MAX_SURFACE_LEN,
                  max_entities: int = MAX_SENTENCE_ENTITIES) -> ExtractionBundle:
    """Run recognition and relation classification over every document of the
    event; the bundle carries the event id and document timestamps."""
    bundle = ExtractionBundle(event_id=event.id)
    for doc_id in event.members:
        doc = store.get(doc_id)  # raises naming the id if missing
        bundle.doc_timestamps[doc_id] = doc.timestamp.isoformat()
        mentions, relations = extract_document(
            doc, recognizer, rel_clf, lexicon,
            min_len=min_len, max_len=max_len, max_entities=max_entities)
        bundle.mentions.extend(mentions)
        bundle.relations.extend(relations)
    return bundle


def load_annotations(path) -> dict:
    """Pre-annotation JSONL: one record per document with doc-level mention
    offsets, relation links by mention index, and optional action sentences.

    Returns doc_id -> {"mentions": [...], "relations": [...], "actions": [...]}.
    """
    records = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            records[record["doc_id"]] = {
                "mentions": record.get("mentions", []),
                "relations": record.get("relations", []),
                "actions": record.get("actions", []),
            }
    return records


def mention_annotations(records: dict) -> dict:
    """doc_id -> mention list, the shape AnnotationRecognizer consumes."""
    return {doc_id: rec["mentions"] for doc_id, rec in records.items()}
