import random

import pytest

from evnet.corpus import Lexicon
from evnet.netmodel import EdgeFrame, EventNetwork, VertexFrame

NAMES = ["毛泽东", "周恩来", "卡尔扎伊", "国务卿", "井冈山", "北京", "加沙", "阿富汗",
         "国防部", "红星社", "哈马斯", "美军"]
VTYPES = ["PER", "ORG", "LOC", "TIME"]
ETYPES = ["PER-SOC", "GEN-AFF", "ORG-AFF", "PART-WHOLE", "PHYS", "CO-OCCUR"]


def random_network(rng: random.Random, max_vertices=10, max_edges=14,
                   with_timestamps=False) -> EventNetwork:
    """Random syntactically-valid network: unique (name, vtype) vertices,
    undirected edges between existing keys, optional per-occurrence timestamp
    lists on the edges."""
    n = rng.randint(0, max_vertices)
    identities = set()
    vertices = []
    while len(vertices) < n:
        identity = (rng.choice(NAMES), rng.choice(VTYPES))
        if identity in identities:
            continue
        identities.add(identity)
        vertices.append(VertexFrame(
            key=len(vertices), name=identity[0], vtype=identity[1],
            weight=round(rng.random(), 3),
            info={"doc_ids": [f"d{rng.randint(0, 9)}"]},
        ))
    edges = []
    if n >= 2:
        for _ in range(rng.randint(0, max_edges)):
            v1, v2 = rng.sample(range(n), 2)
            info = {"count": rng.randint(1, 3)}
            if with_timestamps:
                k = rng.randint(1, 3)
                info["timestamps"] = [
                    f"200{rng.randint(7, 9)}-{rng.randint(1, 12):02d}-"
                    f"{rng.randint(1, 28):02d}T00:00:00+00:00"
                    for _ in range(k)
                ]
                info["doc_ids"] = [f"d{rng.randint(0, 9)}" for _ in range(k)]
            edges.append(EdgeFrame(
                etype=rng.choice(ETYPES), v1=v1, v2=v2,
                weight=round(rng.random(), 3), info=info,
            ))
    return EventNetwork(event_id=f"rand{rng.randint(0, 999)}",
                        vertices=vertices, edges=edges)


def brute_force_omni_word(text, lexicon):
    """Oracle: enumerate every substring and intersect with the lexicon."""
    from collections import Counter

    counts = Counter()
    for i in range(len(text)):
        for j in range(i + 1, len(text) + 1):
            if text[i:j] in lexicon.entries:
                counts[text[i:j]] += 1
    return counts


def random_text_and_lexicon(rng: random.Random, max_text=40, max_entries=50,
                            alphabet="abcde"):
    text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, max_text)))
    entries = set()
    for _ in range(rng.randint(1, max_entries)):
        n = rng.randint(1, 4)
        entries.add("".join(rng.choice(alphabet) for _ in range(n)))
    return text, Lexicon(entries)


@pytest.fixture
def rng():
    return random.Random(20240811)


@pytest.fixture(scope="session")
def synth_artifacts(tmp_path_factory):
    """Bundled synthetic corpus with a completed pipeline run (read-only)."""
    from evnet.pipeline import load_config, run_pipeline
    from evnet.synth import write_corpus

    data_dir = tmp_path_factory.mktemp("synth")
    paths = write_corpus(data_dir)
    config = load_config(paths["config"])
    root = run_pipeline(config)
    return {"root": root, "config": config, "paths": paths}
