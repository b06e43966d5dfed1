import random
from collections import Counter

import numpy as np
import pytest

from evnet.corpus import Vocabulary
from evnet.eventdetect import (
    DocumentEvent,
    assign_events,
    detect_hierarchical,
    event_from_dict,
    event_to_dict,
    fit_lda,
    top_words,
    walk_events,
)


def planted_corpus(rng, n_docs=120, groups=2, words_per_group=8, doc_len=30,
                   purity=0.95):
    """Synthetic corpus with disjoint-dominant per-group vocabularies; returns
    (docs, labels, vocab)."""
    vocab_terms = [f"g{g}w{w}" for g in range(groups) for w in range(words_per_group)]
    vocab = Vocabulary(terms=sorted(vocab_terms),
                       freq={t: 1 for t in vocab_terms})
    docs, labels = [], []
    for i in range(n_docs):
        g = i % groups
        counts = Counter()
        for _ in range(doc_len):
            if rng.random() < purity:
                counts[f"g{g}w{rng.randrange(words_per_group)}"] += 1
            else:
                other = rng.randrange(groups)
                counts[f"g{other}w{rng.randrange(words_per_group)}"] += 1
        docs.append((f"d{i}", counts))
        labels.append(g)
    return docs, labels, vocab


def cluster_purity(assignments, labels):
    """Oracle: fraction of documents whose cluster's majority label matches."""
    by_cluster = {}
    for cluster, label in zip(assignments, labels):
        by_cluster.setdefault(cluster, []).append(label)
    correct = 0
    for members in by_cluster.values():
        correct += Counter(members).most_common(1)[0][1]
    return correct / len(labels)


def assignments_from_events(events, doc_ids):
    lookup = {}
    for event in events:
        for member in event.members:
            lookup[member] = event.topic
    return [lookup[d] for d in doc_ids]


class TestFitLda:
    def test_planted_topics_recovered(self):
        rng = random.Random(11)
        docs, labels, vocab = planted_corpus(rng)
        model = fit_lda([c for _, c in docs], vocab, K=2, iterations=150, seed=4)
        events = assign_events(docs, model, vocab)
        assignments = assignments_from_events(events, [d for d, _ in docs])
        assert cluster_purity(assignments, labels) >= 0.9
        # each topic's top word comes from one planted group
        tops = [top_words(e, model, vocab, n=1)[0][0] for e in events]
        assert {t[:2] for t in tops} == {"g0", "g1"}

    def test_k1_theta_and_unigram_phi(self):
        docs = [Counter({"a": 3, "b": 1}), Counter({"a": 1})]
        vocab = Vocabulary(terms=["a", "b"], freq={"a": 4, "b": 1})
        model = fit_lda(docs, vocab, K=1, iterations=5, seed=0)
        assert np.allclose(model.theta, [[1.0], [1.0]])
        beta = model.beta
        expected = np.array([(4 + beta), (1 + beta)]) / (5 + 2 * beta)
        assert np.allclose(model.phi[0], expected)

    def test_same_seed_bit_identical(self):
        rng = random.Random(2)
        docs, _, vocab = planted_corpus(rng, n_docs=30)
        m1 = fit_lda([c for _, c in docs], vocab, K=3, iterations=40, seed=9)
        m2 = fit_lda([c for _, c in docs], vocab, K=3, iterations=40, seed=9)
        assert np.array_equal(m1.phi, m2.phi)
        assert np.array_equal(m1.theta, m2.theta)

    def test_rows_normalize(self):
        rng = random.Random(3)
        docs, _, vocab = planted_corpus(rng, n_docs=40, groups=3)
        model = fit_lda([c for _, c in docs], vocab, K=5, iterations=30, seed=1)
        assert np.abs(model.phi.sum(axis=1) - 1.0).max() <= 1e-9
        assert np.abs(model.theta.sum(axis=1) - 1.0).max() <= 1e-9
        assert (model.phi >= 0).all() and (model.theta >= 0).all()

    def test_empty_term_matrix_rejected(self):
        vocab = Vocabulary(terms=["a"], freq={"a": 1})
        with pytest.raises(ValueError, match="empty term matrix"):
            fit_lda([Counter({"zz": 3})], vocab, K=2, iterations=5, seed=0)

    def test_alpha_default(self):
        docs = [Counter({"a": 2})]
        vocab = Vocabulary(terms=["a"], freq={"a": 2})
        model = fit_lda(docs, vocab, K=25, iterations=1, seed=0)
        assert model.alpha == pytest.approx(2.0)


class TestAssignEvents:
    def test_exact_centroid_match(self):
        from evnet.eventdetect import TopicModel

        vocab = Vocabulary(terms=["a", "b"], freq={"a": 1, "b": 1})
        phi = np.array([[0.5, 0.5], [0.9, 0.1], [0.1, 0.9], [0.75, 0.25]])
        model = TopicModel(K=4, phi=phi, theta=np.zeros((0, 4)), alpha=1.0,
                           beta=0.1, iterations=0, seed=0)
        # counts 3:1 normalize to exactly (0.75, 0.25) = phi row 3
        events = assign_events([("doc", Counter({"a": 3, "b": 1}))], model, vocab)
        assert events[0].topic == 3

    def test_tie_breaks_to_lowest_index(self):
        vocab = Vocabulary(terms=["a", "b"], freq={"a": 1, "b": 1})
        model_phi = np.array([[0.8, 0.2], [0.2, 0.8]])
        from evnet.eventdetect import TopicModel

        model = TopicModel(K=2, phi=model_phi, theta=np.zeros((0, 2)), alpha=1.0,
                           beta=0.1, iterations=0, seed=0)
        # the 50/50 document is exactly equidistant from both centroids
        events = assign_events([("doc", Counter({"a": 1, "b": 1}))], model, vocab)
        assert events[0].topic == 0

    def test_partition_property(self):
        rng = random.Random(7)
        docs, _, vocab = planted_corpus(rng, n_docs=60, groups=3)
        model = fit_lda([c for _, c in docs], vocab, K=4, iterations=30, seed=2)
        events = assign_events(docs, model, vocab)
        members = [m for e in events for m in e.members]
        assert sorted(members) == sorted(d for d, _ in docs)
        assert all(e.members for e in events)

    def test_zero_distance_identity(self):
        from evnet.eventdetect import TopicModel

        vocab = Vocabulary(terms=["a", "b"], freq={"a": 1, "b": 1})
        phi = np.array([[0.5, 0.5], [0.9, 0.1], [0.1, 0.9]])
        model = TopicModel(K=3, phi=phi, theta=np.zeros((0, 3)), alpha=1.0,
                           beta=0.1, iterations=0, seed=0)
        events = assign_events([("doc", Counter({"a": 9, "b": 1}))], model, vocab)
        assert events[0].topic == 1


class TestTopWords:
    def make_model(self):
        docs = [Counter({"aa": 5, "bb": 3, "cc": 1})]
        vocab = Vocabulary(terms=["aa", "bb", "cc"], freq={"aa": 5, "bb": 3, "cc": 1})
        model = fit_lda(docs, vocab, K=1, iterations=5, seed=0)
        return model, vocab

    def test_most_frequent_first(self):
        model, vocab = self.make_model()
        event = DocumentEvent(id="e00", members=["d0"], topic=0)
        assert top_words(event, model, vocab, n=1)[0][0] == "aa"

    def test_n_clamped_to_vocabulary(self):
        model, vocab = self.make_model()
        event = DocumentEvent(id="e00", members=["d0"], topic=0)
        words = top_words(event, model, vocab, n=50)
        assert [w for w, _ in words] == ["aa", "bb", "cc"]

    def test_nonpositive_n_rejected(self):
        model, vocab = self.make_model()
        event = DocumentEvent(id="e00", members=["d0"], topic=0)
        with pytest.raises(ValueError):
            top_words(event, model, vocab, n=0)

    def test_ties_by_codepoint(self):
        from evnet.eventdetect import TopicModel

        vocab = Vocabulary(terms=["xx", "ab", "ba"], freq={"xx": 1, "ab": 1, "ba": 1})
        phi = np.array([[0.5, 0.25, 0.25]])
        model = TopicModel(K=1, phi=phi, theta=np.zeros((0, 1)), alpha=1.0,
                           beta=0.1, iterations=0, seed=0)
        event = DocumentEvent(id="e00", members=["d0"], topic=0)
        assert [w for w, _ in top_words(event, model, vocab, n=3)] == ["xx", "ab", "ba"]


class TestHierarchy:
    def test_small_slice_has_no_children(self):
        rng = random.Random(13)
        docs, _, vocab = planted_corpus(rng, n_docs=9)
        events = detect_hierarchical(docs, vocab, K=3, iterations=20, seed=5)
        assert events
        assert all(not e.children for e in events)

    def test_skip_rule_and_budget(self):
        rng = random.Random(17)
        for trial in range(5):
            n = rng.randint(5, 60)
            docs, _, vocab = planted_corpus(rng, n_docs=n, groups=3)
            K = rng.randint(2, 5)
            events = detect_hierarchical(docs, vocab, K=K, iterations=15,
                                         seed=trial)
            assert len(events) <= K
            total = len(walk_events(events))
            assert total <= K + K * K
            for event in events:
                if len(event.members) < 10:
                    assert not event.children
                for child in event.children:
                    assert child.level == "sub-event"
                    assert not child.children
                    assert set(child.members) <= set(event.members)

    def test_single_topic_corpus_recurses_once(self):
        rng = random.Random(23)
        docs, _, vocab = planted_corpus(rng, n_docs=30, groups=1, purity=1.0)
        events = detect_hierarchical(docs, vocab, K=1, iterations=10, seed=2)
        assert len(events) == 1
        assert len(events[0].members) == 30
        assert events[0].children

    def test_deterministic_tree(self):
        rng = random.Random(29)
        docs, _, vocab = planted_corpus(rng, n_docs=40, groups=2)
        t1 = detect_hierarchical(docs, vocab, K=3, iterations=25, seed=8)
        t2 = detect_hierarchical(docs, vocab, K=3, iterations=25, seed=8)
        assert [event_to_dict(e) for e in t1] == [event_to_dict(e) for e in t2]

    def test_event_ids_are_paths(self):
        rng = random.Random(31)
        docs, _, vocab = planted_corpus(rng, n_docs=30, groups=1, purity=1.0)
        events = detect_hierarchical(docs, vocab, K=1, iterations=10, seed=2,
                                     prefix="t4/")
        assert events[0].id == "t4/e00"
        assert events[0].children[0].id.startswith("t4/e00/s")


def test_event_dict_roundtrip():
    event = DocumentEvent(id="t0/e01", members=["a", "b"], topic=1,
                          top_words=[("w", 0.5)],
                          children=[DocumentEvent(id="t0/e01/s00", members=["a"],
                                                  topic=0, level="sub-event")])
    assert event_to_dict(event_from_dict(event_to_dict(event))) == event_to_dict(event)
