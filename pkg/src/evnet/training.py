"""Build training instances from pre-annotated documents and fit the relation
and action classifiers."""

from __future__ import annotations

import logging

from .analyze import generate_action_negatives
from .corpus import DocumentStore, Lexicon, tokenize_omni_word
from .extract import (
    EntityMention,
    MAX_SENTENCE_ENTITIES,
    NO_RELATION,
    relation_features,
    split_sentences,
)
from .learn import Classifier, Instance, train_maxent

logger = logging.getLogger(__name__)


def _sentence_mentions(sentence, records):
    mentions = []
    for idx, rec in enumerate(records):
        if rec["start"] < sentence.start or rec["end"] > sentence.end:
            continue
        mentions.append((idx, EntityMention(
            surface=rec["surface"], etype=rec["etype"], weight=1.0,
            doc_id=sentence.doc_id, sentence_index=sentence.index,
            start=rec["start"] - sentence.start, end=rec["end"] - sentence.start,
        )))
    return mentions


def build_relation_instances(store: DocumentStore, annotations: dict,
                             lexicon: Lexicon,
                             max_entities: int = MAX_SENTENCE_ENTITIES) -> list[Instance]:
    """Positive instances from annotated relations; negatives are co-sentence
    mention pairs with no annotated relation."""
    instances = []
    for doc_id, record in sorted(annotations.items()):
        if doc_id not in store:
            continue
        doc = store.get(doc_id)
        gold = {}
        for rel in record.get("relations", []):
            pair = frozenset((rel["arg1_idx"], rel["arg2_idx"]))
            gold[pair] = rel["rtype"]
        for sentence in split_sentences(doc):
            mentions = _sentence_mentions(sentence, record.get("mentions", []))
            if len(mentions) < 2 or len(mentions) > max_entities:
                continue
            for i in range(len(mentions)):
                for j in range(i + 1, len(mentions)):
                    idx_a, m_a = mentions[i]
                    idx_b, m_b = mentions[j]
                    label = gold.get(frozenset((idx_a, idx_b)), NO_RELATION)
                    feats = relation_features(sentence, m_a, m_b, lexicon)
                    if not feats:
                        continue
                    instances.append(Instance(feats, label))
    logger.info("built %d relation instances", len(instances))
    return instances


def train_relation_classifier(store: DocumentStore, annotations: dict,
                              lexicon: Lexicon, l2: float = 0.05,
                              epochs: int = 300, seed: int = 0) -> Classifier:
    instances = build_relation_instances(store, annotations, lexicon)
    return train_maxent(instances, l2=l2, epochs=epochs, seed=seed)


def build_action_instances(store: DocumentStore, annotations: dict,
                           triggers, lexicon: Lexicon,
                           action_type: str = "Conflict") -> list[Instance]:
    """Positives are annotated action sentences; negatives come from
    trigger-bearing unannotated sentences."""
    positives = []
    annotated_keys = set()
    sentences = []
    for doc in store:
        doc_sents = split_sentences(doc)
        sentences.extend(doc_sents)
        record = annotations.get(doc.id)
        if not record:
            continue
        action_sents = {a["sentence"] for a in record.get("actions", [])
                        if a.get("atype", action_type) == action_type}
        for s in doc_sents:
            if s.index in action_sents:
                annotated_keys.add((doc.id, s.index))
                feats = tokenize_omni_word(s.text, lexicon)
                if feats:
                    positives.append(Instance(feats, action_type))
    negatives = generate_action_negatives(sentences, annotated_keys, triggers,
                                          lexicon, label=NO_RELATION)
    logger.info("built %d positive / %d negative action instances",
                len(positives), len(negatives))
    return positives + negatives


def train_action_classifier(store: DocumentStore, annotations: dict, triggers,
                            lexicon: Lexicon, action_type: str = "Conflict",
                            l2: float = 0.05, epochs: int = 300,
                            seed: int = 0, threshold: float = 0.995) -> Classifier:
    instances = build_action_instances(store, annotations, triggers, lexicon,
                                       action_type=action_type)
    return train_maxent(instances, l2=l2, epochs=epochs, seed=seed,
                        positive_class=action_type, threshold=threshold)
