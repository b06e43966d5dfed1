"""Synthetic newswire corpus generator: topic-coherent documents with gold
entity mentions, typed relations and action (Conflict) sentences, plus the
lexicon, gazetteer and trigger list the pipeline consumes.

Everything is deterministic given the seed, so pipeline runs over a generated
corpus are reproducible byte for byte.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from pathlib import Path

from .learn import Instance

TOPIC_WORDS = {
    "military": ["袭击", "北约", "发言人", "冲突", "防御", "部队", "战斗",
                 "前线", "武器", "停火"],
    "economy": ["市场", "贸易", "投资", "增长", "银行", "物价", "出口",
                "工厂", "货币", "合同"],
    "sports": ["比赛", "冠军", "球队", "训练", "赛场", "教练", "纪录",
               "奖牌", "球迷", "决赛"],
}

PERSONS = ["毛泽东", "周恩来", "卡尔扎伊", "李长胜", "王建国", "张伟明",
           "刘芳华", "陈国强"]
LOCATIONS = ["井冈山", "北京城", "上海滩", "加沙", "阿富汗", "喀布尔",
             "华盛顿", "南山区"]
ORGS = ["国防部", "联合国", "红星公司", "北约", "美军", "哈马斯", "国务院",
        "中央银行"]

CONTEXT_WORDS = ["与", "朋友", "会见", "在", "出现", "到达", "加入", "担任",
                 "来自", "位于", "境内", "隶属", "而", "缺席", "引发", "回顾",
                 "历史", "讨论", "报道"]

TRIGGERS = ["袭击", "冲突", "交火", "开火"]


def full_lexicon() -> list[str]:
    entries = set(CONTEXT_WORDS) | set(TRIGGERS)
    for words in TOPIC_WORDS.values():
        entries.update(words)
    entries.update(PERSONS)
    entries.update(LOCATIONS)
    entries.update(ORGS)
    return sorted(entries)


def gazetteer() -> dict:
    gaz = {}
    gaz.update({p: "PER" for p in PERSONS})
    gaz.update({l: "LOC" for l in LOCATIONS})
    gaz.update({o: "ORG" for o in ORGS})
    return gaz


class _DocBuilder:
    """Accumulates sentence pieces while tracking mention offsets and
    sentence indexes for the gold annotations."""

    def __init__(self, doc_id):
        self.doc_id = doc_id
        self.text = ""
        self.sentence_index = 0
        self.mentions = []  # {"surface", "etype", "start", "end"}
        self.relations = []  # {"rtype", "arg1_idx", "arg2_idx", "sentence"}
        self.actions = []  # {"sentence", "atype"}

    def sentence(self, pieces, relations=(), action=None):
        """pieces: str or (surface, etype) tuples; relations: (rtype, i, j)
        into this sentence's entity pieces."""
        local = []
        for piece in pieces:
            if isinstance(piece, tuple):
                surface, etype = piece
                start = len(self.text)
                self.text += surface
                local.append(len(self.mentions))
                self.mentions.append({"surface": surface, "etype": etype,
                                      "start": start, "end": start + len(surface)})
            else:
                self.text += piece
        self.text += "。"
        for rtype, i, j in relations:
            self.relations.append({"rtype": rtype, "arg1_idx": local[i],
                                   "arg2_idx": local[j],
                                   "sentence": self.sentence_index})
        if action:
            self.actions.append({"sentence": self.sentence_index, "atype": action})
        self.sentence_index += 1

    def annotation_record(self):
        return {"doc_id": self.doc_id, "mentions": self.mentions,
                "relations": self.relations, "actions": self.actions}


def _relation_sentence(rng, builder):
    kind = rng.choice(["per-soc", "per-soc-3", "phys", "phys2", "org-aff",
                       "org-aff2", "gen-aff", "part-whole", "part-whole2"])
    p = lambda: (rng.choice(PERSONS), "PER")
    l = lambda: (rng.choice(LOCATIONS), "LOC")
    o = lambda: (rng.choice(ORGS), "ORG")
    if kind == "per-soc":
        p1, p2 = p(), p()
        while p2[0] == p1[0]:
            p2 = p()
        builder.sentence([p1, "与", p2, "是老朋友"], [("PER-SOC", 0, 1)])
    elif kind == "per-soc-3":
        names = rng.sample(PERSONS, 3)
        builder.sentence([(names[0], "PER"), "与", (names[1], "PER"),
                          "是老朋友而", (names[2], "PER"), "缺席"],
                         [("PER-SOC", 0, 1)])
    elif kind == "phys":
        builder.sentence([p(), "在", l(), "出现"], [("PHYS", 0, 1)])
    elif kind == "phys2":
        builder.sentence([p(), "到达", l()], [("PHYS", 0, 1)])
    elif kind == "org-aff":
        builder.sentence([p(), "加入", o()], [("ORG-AFF", 0, 1)])
    elif kind == "org-aff2":
        builder.sentence([p(), "担任", o(), "要职"], [("ORG-AFF", 0, 1)])
    elif kind == "gen-aff":
        builder.sentence([p(), "来自", l()], [("GEN-AFF", 0, 1)])
    elif kind == "part-whole":
        l1, l2 = l(), l()
        while l2[0] == l1[0]:
            l2 = l()
        builder.sentence([l1, "位于", l2, "境内"], [("PART-WHOLE", 0, 1)])
    else:
        o1, o2 = o(), o()
        while o2[0] == o1[0]:
            o2 = o()
        builder.sentence([o1, "隶属", o2], [("PART-WHOLE", 0, 1)])


def _topic_sentence(rng, builder, topic):
    words = rng.sample(TOPIC_WORDS[topic], 4)
    builder.sentence([words[0], words[1], "引发", words[2], words[3], "讨论"])


CONFLICT_HOT_PAIRS = [("哈马斯", "美军"), ("北约", "国防部"), ("美军", "联合国")]


def _conflict_sentence(rng, builder):
    # recurring belligerent pairs make co-occurrence counts meaningful
    if rng.random() < 0.7:
        o1, o2 = rng.choice(CONFLICT_HOT_PAIRS)
    else:
        o1, o2 = rng.sample(ORGS, 2)
    trigger = rng.choice(["袭击", "开火", "交火"])
    builder.sentence([(o1, "ORG"), trigger, (o2, "ORG"), "引发冲突"],
                     [("PHYS", 0, 1)], action="Conflict")


def _trigger_noise_sentence(rng, builder):
    # mentions a trigger without being an action event: a hard negative
    trigger = rng.choice(TRIGGERS)
    builder.sentence(["历史上的", trigger, "被回顾讨论"])


def generate_documents(n_docs: int = 200, seed: int = 7,
                       start_year: int = 2007, start_month: int = 1,
                       months: int = 22):
    """Deterministic synthetic corpus; returns (doc records, annotation
    records)."""
    rng = random.Random(seed)
    topics = sorted(TOPIC_WORDS)
    docs, annotations = [], []
    for i in range(n_docs):
        topic = topics[i % len(topics)]
        builder = _DocBuilder(f"doc{i:04d}")
        for _ in range(rng.randint(2, 3)):
            _topic_sentence(rng, builder, topic)
        for _ in range(rng.randint(2, 3)):
            _relation_sentence(rng, builder)
        if topic == "military":
            for _ in range(rng.randint(1, 2)):
                _conflict_sentence(rng, builder)
            if rng.random() < 0.5:
                _trigger_noise_sentence(rng, builder)
        month_offset = rng.randrange(months)
        total = start_year * 12 + (start_month - 1) + month_offset
        year, month = total // 12, total % 12 + 1
        day = rng.randint(1, 28)
        hour = rng.randint(0, 23)
        docs.append({
            "id": builder.doc_id,
            "text": builder.text,
            "timestamp": f"{year:04d}-{month:02d}-{day:02d}T{hour:02d}:00:00Z",
            "source": f"synth-{topic}",
        })
        annotations.append(builder.annotation_record())
    return docs, annotations


DEFAULT_CONFIG = """\
# bundled synthetic-corpus pipeline configuration
# (relative paths resolve against this file's directory)
corpus = corpus.jsonl
lexicon = lexicon.txt
gazetteer = gazetteer.json
annotations = annotations.jsonl
triggers = triggers.txt
output = artifacts
step_months = 5
topics = 4
lda_iterations = 400
lda_seed = 7
min_docs = 10
recognizer = gazetteer
maxent_l2 = 0.0001
action_threshold = 0.995
min_cooccur = 2
"""


def write_corpus(output_dir, n_docs: int = 200, seed: int = 7,
                 months: int = 22) -> dict:
    """Write corpus.jsonl, lexicon.txt, gazetteer.json, annotations.jsonl,
    triggers.txt and a ready-to-run evnet.cfg under output_dir."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    docs, annotations = generate_documents(n_docs=n_docs, seed=seed, months=months)
    paths = {
        "corpus": output_dir / "corpus.jsonl",
        "lexicon": output_dir / "lexicon.txt",
        "gazetteer": output_dir / "gazetteer.json",
        "annotations": output_dir / "annotations.jsonl",
        "triggers": output_dir / "triggers.txt",
        "config": output_dir / "evnet.cfg",
    }
    with open(paths["corpus"], "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc, ensure_ascii=False, sort_keys=True) + "\n")
    paths["lexicon"].write_text("\n".join(full_lexicon()) + "\n", encoding="utf-8")
    paths["gazetteer"].write_text(
        json.dumps(gazetteer(), ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    with open(paths["annotations"], "w", encoding="utf-8") as fh:
        for record in annotations:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    paths["triggers"].write_text("\n".join(TRIGGERS) + "\n", encoding="utf-8")
    paths["config"].write_text(DEFAULT_CONFIG, encoding="utf-8")
    return paths


# ---------------------------------------------------------------------------
# Two-class action dataset with label noise, for threshold-behavior studies:
# clean positives/negatives plus genuinely ambiguous sentences make the
# precision/recall trade-off move with the decision threshold.

ACTION_STRONG_WORDS = ["轰炸", "突袭"]  # unambiguous conflict markers
ACTION_WEAK_WORDS = ["袭击", "冲突", "开火", "交火"]
ACTION_NEGATIVE_WORDS = ["和平", "会谈", "访问", "合作", "签署", "交流"]


def make_action_noise_dataset(n: int = 600, noise: float = 0.01,
                              ambiguous: float = 0.3, seed: int = 13) -> list[Instance]:
    """Synthetic two-class (Conflict/NONE) bags with label noise.

    Clear positives mix strong and weak conflict markers; ambiguous instances
    carry only weak markers plus peace-talk words and are Conflict half the
    time, so they are accepted at a 0.5 threshold but rejected near 1, moving
    precision up and recall down as the threshold rises. A noise fraction of
    all labels is flipped.
    """
    rng = random.Random(seed)
    positive = ACTION_STRONG_WORDS + ACTION_WEAK_WORDS
    instances = []
    for _ in range(n):
        roll = rng.random()
        feats: Counter = Counter()
        if roll < ambiguous:
            for _ in range(rng.randint(3, 5)):
                feats[rng.choice(ACTION_WEAK_WORDS)] += 1
            for _ in range(rng.randint(1, 2)):
                feats[rng.choice(ACTION_NEGATIVE_WORDS)] += 1
            label = "Conflict" if rng.random() < 0.5 else "NONE"
        elif roll < ambiguous + (1 - ambiguous) / 2:
            for _ in range(rng.randint(4, 10)):
                feats[rng.choice(positive)] += 1
            label = "Conflict"
        else:
            for _ in range(rng.randint(4, 10)):
                feats[rng.choice(ACTION_NEGATIVE_WORDS)] += 1
            label = "NONE"
        if rng.random() < noise:
            label = "Conflict" if label == "NONE" else "NONE"
        instances.append(Instance(feats, label))
    return instances
