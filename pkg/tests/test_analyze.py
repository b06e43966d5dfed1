import itertools
import random
from collections import Counter

import pytest

from evnet.analyze import (
    ALWAYS,
    Predicate,
    action_analysis,
    cooccurrence_network,
    count_cooccurrences,
    ego_network,
    filter_network,
    generate_action_negatives,
    plt_analysis,
    shortest_path,
)
from evnet.corpus import DocumentStore, Lexicon
from evnet.extract import GazetteerRecognizer, split_sentences
from evnet.eventdetect import DocumentEvent
from evnet.learn import Instance, train_maxent
from evnet.netmodel import EdgeFrame, EventNetwork, VertexFrame, network_to_dict

from .conftest import random_network
from .test_corpus import make_doc


def fixture_network():
    """Hand-built network mixing person/location/org vertices and typed edges."""
    vertices = [
        VertexFrame(0, "毛泽东", "PER", 1.0, {}),
        VertexFrame(1, "周恩来", "PER", 0.9, {}),
        VertexFrame(2, "井冈山", "LOC", 0.8, {}),
        VertexFrame(3, "国防部", "ORG", 0.7, {}),
        VertexFrame(4, "卡尔扎伊", "PER", 0.6, {}),
    ]
    edges = [
        EdgeFrame("PER-SOC", 0, 1, 0.9, {}),
        EdgeFrame("PHYS", 0, 2, 0.8, {"timestamps": ["2008-01-01T00:00:00+00:00"],
                                      "doc_ids": ["d0"]}),
        EdgeFrame("ORG-AFF", 1, 3, 0.7, {}),
        EdgeFrame("PER-SOC", 1, 4, 0.5, {}),
    ]
    return EventNetwork(event_id="fix", vertices=vertices, edges=edges)


def random_predicate(rng):
    kinds = ["PER", "ORG", "LOC", "TIME", "PER-SOC", "GEN-AFF", "ORG-AFF",
             "PART-WHOLE", "PHYS", "CO-OCCUR"]
    types = rng.sample(kinds, rng.randint(0, 4)) if rng.random() < 0.7 else None
    min_weight = round(rng.random(), 2) if rng.random() < 0.5 else None
    info = {"count": None} if rng.random() < 0.2 else None
    return Predicate.build(types=types, min_weight=min_weight, info=info)


class TestFilter:
    def test_per_soc_construction(self):
        net = fixture_network()
        out = filter_network(net, Predicate.build(types=["PER"]),
                             Predicate.build(types=["PER-SOC"]))
        assert {v.name for v in out.vertices} == {"毛泽东", "周恩来", "卡尔扎伊"}
        assert all(e.etype == "PER-SOC" for e in out.edges)
        assert len(out.edges) == 2

    def test_identity_with_always_true(self):
        net = fixture_network()
        out = filter_network(net, ALWAYS, ALWAYS)
        assert network_to_dict(out) == network_to_dict(net)

    def test_weight_threshold_can_empty(self):
        net = fixture_network()
        for v in net.vertices:
            v.weight = 0.5
        out = filter_network(net, Predicate.build(min_weight=0.9), ALWAYS)
        assert out.vertices == [] and out.edges == []

    def test_idempotence_and_closure_random(self, rng):
        for _ in range(200):
            net = random_network(rng)
            vp, ep = random_predicate(rng), random_predicate(rng)
            out = filter_network(net, vp, ep)
            kept = {v.key for v in out.vertices}
            assert kept <= {v.key for v in net.vertices}
            for e in out.edges:
                assert e.v1 in kept and e.v2 in kept
            again = filter_network(out, vp, ep)
            assert network_to_dict(again) == network_to_dict(out)

    def test_unknown_info_key_is_false(self):
        net = fixture_network()
        out = filter_network(net, Predicate.build(info={"missing": None}), ALWAYS)
        assert out.vertices == []

    def test_name_clause(self):
        net = fixture_network()
        out = filter_network(net, Predicate.build(names=["毛泽东"]), ALWAYS)
        assert [v.name for v in out.vertices] == ["毛泽东"]
        assert out.edges == []  # endpoints of every edge are not both kept


class TestPLT:
    def test_no_phys_edges_gives_empty(self):
        net = EventNetwork(vertices=[VertexFrame(0, "毛泽东", "PER", 1.0),
                                     VertexFrame(1, "周恩来", "PER", 1.0)],
                           edges=[EdgeFrame("PER-SOC", 0, 1, 1.0)])
        out = plt_analysis([net], "毛泽东")
        assert out.vertices == [] and out.edges == []

    def test_two_document_hand_fixture(self):
        net = EventNetwork(
            vertices=[VertexFrame(0, "毛泽东", "PER", 1.0),
                      VertexFrame(1, "地点一", "LOC", 1.0),
                      VertexFrame(2, "地点二", "LOC", 1.0)],
            edges=[
                EdgeFrame("PHYS", 0, 1, 1.0,
                          {"timestamps": ["2008-01-05T10:00:00+00:00"],
                           "doc_ids": ["d1"]}),
                EdgeFrame("PHYS", 0, 2, 1.0,
                          {"timestamps": ["2008-02-06T10:00:00+00:00"],
                           "doc_ids": ["d2"]}),
            ],
        )
        out = plt_analysis([net], "毛泽东")
        names = {(v.name, v.vtype) for v in out.vertices}
        assert names == {("2008-01-05", "TIME"), ("地点一", "LOC"),
                         ("2008-02-06", "TIME"), ("地点二", "LOC")}
        pairs = set()
        by_key = {v.key: v for v in out.vertices}
        for e in out.edges:
            a, b = by_key[e.v1], by_key[e.v2]
            assert {a.vtype, b.vtype} == {"TIME", "LOC"}
            time_v = a if a.vtype == "TIME" else b
            loc_v = b if a.vtype == "TIME" else a
            pairs.add((time_v.name, loc_v.name))
        assert pairs == {("2008-01-05", "地点一"), ("2008-02-06", "地点二")}

    def test_bipartite_and_bijection_random(self, rng):
        for _ in range(200):
            net = random_network(rng, with_timestamps=True)
            person = rng.choice([v.name for v in net.vertices if v.vtype == "PER"]
                                or ["毛泽东"])
            out = plt_analysis([net], person)
            by_key = {v.key: v for v in out.vertices}
            for v in out.vertices:
                assert v.vtype in ("TIME", "LOC")
            # oracle: enumerate the selected PHYS mention occurrences directly
            src_by_key = {v.key: v for v in net.vertices}
            expected = []
            for e in net.edges:
                if e.etype != "PHYS":
                    continue
                a, b = src_by_key[e.v1], src_by_key[e.v2]
                if a.vtype == "PER" and a.name == person and b.vtype == "LOC":
                    loc = b
                elif b.vtype == "PER" and b.name == person and a.vtype == "LOC":
                    loc = a
                else:
                    continue
                for ts in e.info.get("timestamps", []):
                    expected.append((ts[:10], loc.name))
            got = []
            for e in out.edges:
                a, b = by_key[e.v1], by_key[e.v2]
                t = a if a.vtype == "TIME" else b
                l = b if a.vtype == "TIME" else a
                got.append((t.name, l.name))
            assert Counter(got) == Counter(expected)

    def test_absent_person_empty(self):
        out = plt_analysis([fixture_network()], "无名氏")
        assert out.vertices == []

    def test_merges_identical_dates_and_locations(self):
        net = EventNetwork(
            vertices=[VertexFrame(0, "毛泽东", "PER", 1.0),
                      VertexFrame(1, "地点一", "LOC", 1.0)],
            edges=[EdgeFrame("PHYS", 0, 1, 1.0,
                             {"timestamps": ["2008-01-05T10:00:00+00:00",
                                             "2008-01-05T23:00:00+00:00"],
                              "doc_ids": ["d1", "d2"]})],
        )
        out = plt_analysis([net], "毛泽东")
        assert len(out.vertices) == 2  # one TIME, one LOC
        assert len(out.edges) == 2  # one edge per mention occurrence

    def test_empty_person_rejected(self):
        with pytest.raises(ValueError):
            plt_analysis([fixture_network()], "")

    def test_undated_occurrences_do_not_shift_attribution(self):
        net = EventNetwork(
            vertices=[VertexFrame(0, "毛泽东", "PER", 1.0),
                      VertexFrame(1, "地点一", "LOC", 1.0)],
            edges=[EdgeFrame("PHYS", 0, 1, 1.0,
                             {"timestamps": [None, "2008-02-01T00:00:00+00:00"],
                              "doc_ids": ["undated", "d2"]})],
        )
        out = plt_analysis([net], "毛泽东")
        assert len(out.edges) == 1
        assert out.edges[0].info["doc_id"] == "d2"


def brute_force_pairs(sentence_sets):
    counts = Counter()
    for entities in sentence_sets:
        for a, b in itertools.combinations(sorted(set(entities)), 2):
            counts[(a, b)] += 1
    return counts


class TestCooccurrence:
    def test_counts_match_brute_force(self, rng):
        universe = [(f"e{i:02d}", "PER") for i in range(8)]
        for _ in range(200):
            sentence_sets = [
                rng.sample(universe, rng.randint(0, 5))
                for _ in range(rng.randint(0, 12))
            ]
            assert count_cooccurrences(sentence_sets) == brute_force_pairs(sentence_sets)

    def test_threshold_pruning_fixture(self):
        a, b, c = ("甲方", "PER"), ("乙方", "PER"), ("丙方", "PER")
        sentence_sets = [[a, b, c], [a, b]]
        counts = count_cooccurrences(sentence_sets)
        net = cooccurrence_network(counts, min_cooccur=2)
        assert len(net.edges) == 1
        edge_names = {net.vertex_by_key(net.edges[0].v1).name,
                      net.vertex_by_key(net.edges[0].v2).name}
        assert edge_names == {"甲方", "乙方"}
        assert net.edges[0].weight == 2

    def test_min_cooccur_one_keeps_all(self):
        a, b, c = ("甲方", "PER"), ("乙方", "PER"), ("丙方", "LOC")
        counts = count_cooccurrences([[a, b], [b, c]])
        net = cooccurrence_network(counts, min_cooccur=1)
        assert len(net.edges) == 2

    def test_surviving_edges_meet_threshold(self, rng):
        universe = [(f"e{i}", "PER") for i in range(6)]
        for _ in range(50):
            sets = [rng.sample(universe, rng.randint(0, 4)) for _ in range(10)]
            t = rng.randint(1, 4)
            net = cooccurrence_network(count_cooccurrences(sets), min_cooccur=t)
            assert all(e.weight >= t for e in net.edges)
            # no isolated vertices survive pruning
            used = {e.v1 for e in net.edges} | {e.v2 for e in net.edges}
            assert {v.key for v in net.vertices} == used


def action_world():
    """Tiny store + gazetteer + trained conflict classifier."""
    lexicon = Lexicon({"袭击", "冲突", "会谈", "和平", "访问", "甲乙", "里人"})
    gaz = {"甲方军": "ORG", "乙方军": "ORG", "丙城镇": "LOC"}
    pos_texts = ["甲方军袭击乙方军冲突", "乙方军冲突袭击甲方军"]
    neg_texts = ["甲方军访问丙城镇和平", "乙方军和平会谈甲方军"]
    instances = []
    for t in pos_texts:
        instances += [Instance(Counter({w: t.count(w) for w in ("袭击", "冲突") if w in t}),
                               "Conflict")] * 6
    for t in neg_texts:
        instances += [Instance(Counter({w: 1 for w in ("和平", "会谈", "访问") if w in t}),
                               "NONE")] * 6
    clf = train_maxent(instances, l2=0.001, positive_class="Conflict")
    return lexicon, gaz, clf


class TestActionAnalysis:
    def test_counts_and_pruning(self):
        lexicon, gaz, clf = action_world()
        docs = [
            make_doc("d0", "甲方军袭击乙方军冲突。甲方军袭击乙方军冲突。甲方军和平会谈乙方军。"),
            make_doc("d1", "甲方军袭击丙城镇冲突。乙方军冲突袭击丙城镇。"),
        ]
        store = DocumentStore(docs)
        event = DocumentEvent(id="t0/e00", members=["d0", "d1"], topic=0)
        rec = GazetteerRecognizer(gaz)
        out = action_analysis(event, store, rec, clf, lexicon,
                              threshold=0.9, min_cooccur=2)
        # conflict sentences: d0 has 2 (甲-乙), d1 has 2 (甲-丙, 乙-丙)
        # so only (甲方军, 乙方军) reaches frequency 2
        assert len(out.edges) == 1
        names = {out.vertex_by_key(out.edges[0].v1).name,
                 out.vertex_by_key(out.edges[0].v2).name}
        assert names == {"甲方军", "乙方军"}
        assert out.edges[0].weight == 2

    def test_higher_threshold_accepts_subset(self):
        lexicon, gaz, clf = action_world()
        docs = [make_doc("d0", "甲方军袭击乙方军冲突。甲方军冲突乙方军。甲方军访问乙方军和平。")]
        store = DocumentStore(docs)
        event = DocumentEvent(id="e", members=["d0"], topic=0)
        rec = GazetteerRecognizer(gaz)
        lo = action_analysis(event, store, rec, clf, lexicon,
                             threshold=0.5, min_cooccur=1)
        hi = action_analysis(event, store, rec, clf, lexicon,
                             threshold=0.999999, min_cooccur=1)

        def pair_counts(net):
            return {
                tuple(sorted((net.vertex_by_key(e.v1).name,
                              net.vertex_by_key(e.v2).name))): e.weight
                for e in net.edges
            }

        lo_counts, hi_counts = pair_counts(lo), pair_counts(hi)
        assert set(hi_counts) <= set(lo_counts)
        for pair, count in hi_counts.items():
            assert count <= lo_counts[pair]


class TestActionNegatives:
    def test_generation_rules(self):
        lexicon = Lexicon({"袭击", "和平"})
        docs = [
            make_doc("d0", "本句袭击相关。这句无关。另一句也袭击。"),
            make_doc("d1", "和平谈判。"),
        ]
        sentences = [s for d in docs for s in split_sentences(d)]
        annotated = {("d0", 0)}  # first sentence is a gold event mention
        negs = generate_action_negatives(sentences, annotated, {"袭击"}, lexicon)
        assert len(negs) == 1  # d0#2 only: d0#0 annotated, d0#1/d1#0 no trigger
        assert all(inst.label == "NONE" for inst in negs)

    def test_empty_trigger_lexicon_rejected(self):
        with pytest.raises(ValueError, match="trigger"):
            generate_action_negatives([], set(), set(), Lexicon({"x"}))


def brute_force_min_hops(net, a, b):
    """Oracle: exhaustive BFS-free minimum over all simple paths."""
    adj = {}
    for e in net.edges:
        adj.setdefault(e.v1, set()).add(e.v2)
        adj.setdefault(e.v2, set()).add(e.v1)
    sources = [v.key for v in net.vertices if v.name == a]
    targets = {v.key for v in net.vertices if v.name == b}
    best = None

    def walk(node, visited, depth):
        nonlocal best
        if node in targets:
            best = depth if best is None else min(best, depth)
            return
        for nxt in adj.get(node, ()):
            if nxt not in visited:
                walk(nxt, visited | {nxt}, depth + 1)

    for s in sources:
        walk(s, {s}, 0)
    return best


class TestShortestPath:
    def test_same_vertex_zero_length(self):
        net = fixture_network()
        result = shortest_path(net, "毛泽东", "毛泽东")
        assert result.found and result.hops == 0

    def test_two_hop_chain(self):
        net = EventNetwork(
            vertices=[VertexFrame(0, "甲字", "PER", 1.0),
                      VertexFrame(1, "乙字", "PER", 1.0),
                      VertexFrame(2, "丙字", "PER", 1.0)],
            edges=[EdgeFrame("PER-SOC", 0, 1, 1.0),
                   EdgeFrame("PER-SOC", 1, 2, 1.0)],
        )
        result = shortest_path(net, "甲字", "丙字")
        assert result.vertices == [0, 1, 2]
        assert [e.etype for e in result.edges] == ["PER-SOC", "PER-SOC"]

    def test_not_found_vs_disconnected(self):
        net = EventNetwork(
            vertices=[VertexFrame(0, "甲字", "PER", 1.0),
                      VertexFrame(1, "乙字", "PER", 1.0)],
            edges=[],
        )
        assert shortest_path(net, "甲字", "乙字").status == "disconnected"
        missing = shortest_path(net, "甲字", "丁字")
        assert missing.status == "not_found"
        assert "丁字" in missing.message

    def test_matches_exhaustive_oracle(self, rng):
        for _ in range(150):
            net = random_network(rng, max_vertices=8)
            if len(net.vertices) < 2:
                continue
            a = rng.choice(net.vertices).name
            b = rng.choice(net.vertices).name
            result = shortest_path(net, a, b)
            oracle = brute_force_min_hops(net, a, b)
            if result.status == "found":
                assert result.hops == oracle
            else:
                assert oracle is None

    def test_lexicographically_smallest_tie_break(self):
        # two parallel length-2 routes: via key 1 and via key 2
        net = EventNetwork(
            vertices=[VertexFrame(0, "起点", "PER", 1.0),
                      VertexFrame(1, "中一", "PER", 1.0),
                      VertexFrame(2, "中二", "PER", 1.0),
                      VertexFrame(3, "终点", "PER", 1.0)],
            edges=[EdgeFrame("PER-SOC", 0, 2, 1.0),
                   EdgeFrame("PER-SOC", 2, 3, 1.0),
                   EdgeFrame("PER-SOC", 0, 1, 1.0),
                   EdgeFrame("PER-SOC", 1, 3, 1.0)],
        )
        assert shortest_path(net, "起点", "终点").vertices == [0, 1, 3]


class TestEgoNetwork:
    def star(self):
        vertices = [VertexFrame(0, "中心人", "PER", 1.0)]
        edges = []
        for i in range(1, 5):
            vertices.append(VertexFrame(i, f"外围{i}", "LOC", 1.0))
            edges.append(EdgeFrame("PHYS", 0, i, 1.0))
        return EventNetwork(vertices=vertices, edges=edges)

    def test_radius_one_star_is_whole_graph(self):
        net = self.star()
        out = ego_network(net, "中心人", radius=1)
        assert len(out.vertices) == 5 and len(out.edges) == 4

    def test_radius_one_keeps_edges_among_neighbors(self):
        net = fixture_network()
        out = ego_network(net, "周恩来", radius=1)
        names = {v.name for v in out.vertices}
        assert names == {"周恩来", "毛泽东", "国防部", "卡尔扎伊"}
        assert {e.etype for e in out.edges} == {"PER-SOC", "ORG-AFF"}

    def test_saturation_at_diameter(self):
        net = fixture_network()
        out = ego_network(net, "毛泽东", radius=10)
        assert len(out.vertices) == 5  # the whole connected component

    def test_monotone_in_radius(self, rng):
        for _ in range(40):
            net = random_network(rng)
            if not net.vertices:
                continue
            center = rng.choice(net.vertices).name
            inner = {v.key for v in ego_network(net, center, 1).vertices}
            outer = {v.key for v in ego_network(net, center, 2).vertices}
            assert inner <= outer

    def test_absent_center_empty(self):
        out = ego_network(fixture_network(), "无名氏", radius=1)
        assert out.vertices == []

    def test_bad_radius_rejected(self):
        with pytest.raises(ValueError):
            ego_network(fixture_network(), "毛泽东", radius=0)
