"""End-to-end pipeline: ingest -> slice -> train -> detect -> extract -> build.

Each stage persists its output under the artifact directory and is skipped on
rerun when already recorded (resumable); fixed seeds make reruns byte
identical.

Artifact layout:
    config.json            configuration echo (defaults included)
    documents.jsonl        validated documents
    lexicon.txt            the lexicon used
    slices/slices.json     time slices with member ids
    vocabulary.json        pruned Omni-word vocabulary
    events/t{i}.json       event tree per slice
    models/                classifiers, gazetteer, triggers
    extractions/t{i}.json  per-document mentions and relations
    networks/{id}.json     merged event networks (event id, / -> _)
    stages.json            completed-stage ledger
"""

from __future__ import annotations

import dataclasses
import json
import logging
import shutil
import time
from dataclasses import dataclass
from pathlib import Path

from . import corpus as corpus_mod
from . import eventdetect
from . import extract as extract_mod
from . import netmodel
from . import training
from .corpus import DocumentStore, Lexicon
from .learn import load_classifier, save_classifier

logger = logging.getLogger(__name__)

RECOGNIZERS = ("gazetteer", "annotations", "model")
STAGES = ("ingest", "slice", "train", "detect", "extract", "build")


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    corpus: str = ""
    lexicon: str = ""
    output: str = "artifacts"
    step_months: int = 5
    topics: int = 25
    lda_alpha: float | None = None
    lda_beta: float = 0.1
    lda_iterations: int = 1000
    lda_seed: int = 7
    min_docs: int = 10
    prune_ratio: float = 0.05
    min_freq: int = 10
    top_words: int = 100
    recognizer: str = "gazetteer"
    gazetteer: str | None = None
    annotations: str | None = None
    triggers: str | None = None
    action_type: str = "Conflict"
    weight_threshold: float = 0.0
    action_threshold: float = 0.995
    min_cooccur: int = 12
    max_entities: int = 10
    min_surface_len: int = 2
    max_surface_len: int = 6
    maxent_l2: float = 0.05
    maxent_epochs: int = 300
    maxent_seed: int = 0
    strict_ingest: bool = False

    def validate(self) -> None:
        checks = [
            (bool(self.corpus), "corpus path is required"),
            (bool(self.lexicon), "lexicon path is required"),
            (self.step_months >= 1, f"step_months must be >= 1: {self.step_months}"),
            (self.topics >= 1, f"topics must be >= 1: {self.topics}"),
            (self.lda_iterations >= 1,
             f"lda_iterations must be >= 1: {self.lda_iterations}"),
            (self.min_docs >= 1, f"min_docs must be >= 1: {self.min_docs}"),
            (0.0 <= self.prune_ratio < 0.5,
             f"prune_ratio must be in [0, 0.5): {self.prune_ratio}"),
            (self.min_freq >= 0, f"min_freq must be >= 0: {self.min_freq}"),
            (self.top_words >= 1, f"top_words must be >= 1: {self.top_words}"),
            (self.recognizer in RECOGNIZERS,
             f"recognizer must be one of {RECOGNIZERS}: {self.recognizer}"),
            (0.0 <= self.weight_threshold <= 1.0,
             f"weight_threshold must be in [0, 1]: {self.weight_threshold}"),
            (0.5 <= self.action_threshold <= 1.0,
             f"action_threshold must be in [0.5, 1]: {self.action_threshold}"),
            (self.min_cooccur >= 1, f"min_cooccur must be >= 1: {self.min_cooccur}"),
            (self.max_entities >= 2, f"max_entities must be >= 2: {self.max_entities}"),
            (1 <= self.min_surface_len <= self.max_surface_len,
             "surface length bounds must satisfy 1 <= min <= max"),
            (self.maxent_l2 > 0, f"maxent_l2 must be > 0: {self.maxent_l2}"),
            (self.maxent_epochs >= 1,
             f"maxent_epochs must be >= 1: {self.maxent_epochs}"),
        ]
        for ok, message in checks:
            if not ok:
                raise ValueError(message)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_BOOL_STRINGS = {"true": True, "false": False, "yes": True, "no": False,
                 "1": True, "0": False}


def _coerce(field: dataclasses.Field, raw: str):
    text = raw.strip()
    if field.type in ("float | None", "str | None") and text.lower() in ("", "none"):
        return None
    if field.type == "bool":
        try:
            return _BOOL_STRINGS[text.lower()]
        except KeyError:
            raise ValueError(f"invalid boolean for {field.name}: {raw!r}") from None
    if field.type == "int":
        return int(text)
    if field.type in ("float", "float | None"):
        return float(text)
    return text


_PATH_KEYS = ("corpus", "lexicon", "output", "gazetteer", "annotations",
              "triggers")


def load_config(path=None, overrides: dict | None = None) -> PipelineConfig:
    """Flat `key = value` file plus overrides; unknown keys are rejected.

    Relative paths in the file resolve against the file's directory;
    override paths resolve against the working directory.
    """
    fields = {f.name: f for f in dataclasses.fields(PipelineConfig)}
    values: dict = {}
    base = Path(path).parent if path is not None else Path.cwd()

    def apply(key, raw, origin, path_base):
        key = key.strip()
        if key not in fields:
            raise ValueError(f"unknown configuration key {key!r} ({origin})")
        value = _coerce(fields[key], str(raw))
        if key in _PATH_KEYS and value:
            value = str(Path(path_base, value))
        values[key] = value

    if path is not None:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                if "=" not in text:
                    raise ValueError(f"malformed config line {lineno}: {line!r}")
                key, _, raw = text.partition("=")
                apply(key, raw, f"{path}:{lineno}", base)
    for key, raw in (overrides or {}).items():
        apply(key, raw, "override", Path.cwd())
    config = PipelineConfig(**values)
    config.validate()
    return config


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def _read_json(path: Path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def event_filename(event_id: str) -> str:
    return event_id.replace("/", "_") + ".json"


def mention_to_dict(m) -> dict:
    return {"surface": m.surface, "etype": m.etype, "weight": m.weight,
            "doc_id": m.doc_id, "sentence_index": m.sentence_index,
            "start": m.start, "end": m.end}


def mention_from_dict(d) -> extract_mod.EntityMention:
    return extract_mod.EntityMention(
        surface=d["surface"], etype=d["etype"], weight=d["weight"],
        doc_id=d["doc_id"], sentence_index=d["sentence_index"],
        start=d["start"], end=d["end"])


def relation_to_dict(r) -> dict:
    return {"rtype": r.rtype, "weight": r.weight, "doc_id": r.doc_id,
            "sentence_index": r.sentence_index,
            "arg1": mention_to_dict(r.arg1), "arg2": mention_to_dict(r.arg2)}


def relation_from_dict(d) -> extract_mod.RelationMention:
    return extract_mod.RelationMention(
        rtype=d["rtype"], weight=d["weight"], doc_id=d["doc_id"],
        sentence_index=d["sentence_index"],
        arg1=mention_from_dict(d["arg1"]), arg2=mention_from_dict(d["arg2"]))


class _PipelineRun:
    """Mutable state threaded through the stages of one run."""

    def __init__(self, config: PipelineConfig, force: bool,
                 slice_filter=None):
        self.config = config
        self.force = force
        self.slice_filter = slice_filter  # None = every slice
        self.root = Path(config.output)
        self.root.mkdir(parents=True, exist_ok=True)
        self.stages_path = self.root / "stages.json"
        self.done: dict = (_read_json(self.stages_path)
                           if self.stages_path.exists() else {})
        self.store: DocumentStore | None = None
        self.lexicon: Lexicon | None = None
        self.slices = None

    def mark(self, stage):
        self.done[stage] = True
        _write_json(self.stages_path, self.done)

    # --- stage helpers -----------------------------------------------------

    def load_store(self) -> DocumentStore:
        if self.store is None:
            self.store = corpus_mod.ingest_documents(self.root / "documents.jsonl")
        return self.store

    def load_lexicon(self) -> Lexicon:
        if self.lexicon is None:
            self.lexicon = Lexicon.from_file(self.root / "lexicon.txt")
        return self.lexicon

    def load_slices(self):
        if self.slices is None:
            self.slices = _read_json(self.root / "slices" / "slices.json")
        return self.slices

    def recognizer(self) -> extract_mod.EntityRecognizer:
        config = self.config
        models = self.root / "models"
        if config.recognizer == "gazetteer":
            return extract_mod.GazetteerRecognizer.from_file(models / "gazetteer.json")
        if config.recognizer == "annotations":
            records = extract_mod.load_annotations(models / "annotations.jsonl")
            return extract_mod.AnnotationRecognizer(
                extract_mod.mention_annotations(records))
        begin = load_classifier(models / "boundary_begin.json")
        end = load_classifier(models / "boundary_end.json")
        span = load_classifier(models / "boundary_span.json")
        return extract_mod.TrainedBoundaryRecognizer(
            begin, end, span, max_span=config.max_surface_len)


def stage_ingest(run: _PipelineRun):
    config = run.config
    store = corpus_mod.ingest_documents(config.corpus, strict=config.strict_ingest)
    if len(store) == 0:
        raise ValueError(f"no valid documents in {config.corpus}")
    with open(run.root / "documents.jsonl", "w", encoding="utf-8") as fh:
        for doc in store:
            fh.write(json.dumps(
                {"id": doc.id, "text": doc.text,
                 "timestamp": doc.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
                 "source": doc.source},
                ensure_ascii=False, sort_keys=True) + "\n")
    shutil.copyfile(config.lexicon, run.root / "lexicon.txt")
    run.store = store
    logger.info("ingest: %d documents (%d rejected)", len(store), len(store.errors))


def stage_slice(run: _PipelineRun):
    store = run.load_store()
    slices = corpus_mod.partition_by_time(store, step_months=run.config.step_months)
    payload = [
        {"index": s.index, "start": s.start.strftime("%Y-%m-%dT%H:%M:%SZ"),
         "end": s.end.strftime("%Y-%m-%dT%H:%M:%SZ"), "members": list(s.members)}
        for s in slices
    ]
    _write_json(run.root / "slices" / "slices.json", payload)
    run.slices = payload
    logger.info("slice: %d slices", len(slices))


def stage_detect(run: _PipelineRun):
    config = run.config
    store = run.load_store()
    lexicon = run.load_lexicon()
    vocab = corpus_mod.build_vocabulary(store, lexicon,
                                        prune_ratio=config.prune_ratio,
                                        min_freq=config.min_freq)
    if len(vocab) == 0:
        raise ValueError("vocabulary is empty after pruning")
    _write_json(run.root / "vocabulary.json",
                {"terms": vocab.terms, "freq": vocab.freq})
    term_cache = {doc.id: corpus_mod.tokenize_omni_word(doc.text, lexicon)
                  for doc in store}
    for s in run.load_slices():
        if run.slice_filter is not None and s["index"] not in run.slice_filter:
            continue
        docs = [(doc_id, term_cache[doc_id]) for doc_id in s["members"]]
        if docs:
            events = eventdetect.detect_hierarchical(
                docs, vocab, K=config.topics, min_docs=config.min_docs,
                alpha=config.lda_alpha, beta=config.lda_beta,
                iterations=config.lda_iterations,
                seed=config.lda_seed * 1009 + s["index"],
                top_n=config.top_words, prefix=f"t{s['index']}/")
        else:
            events = []
        _write_json(run.root / "events" / f"t{s['index']}.json",
                    [eventdetect.event_to_dict(e) for e in events])
        logger.info("detect: slice %d -> %d events", s["index"], len(events))


def stage_train(run: _PipelineRun):
    config = run.config
    models = run.root / "models"
    models.mkdir(exist_ok=True)
    if config.gazetteer:
        shutil.copyfile(config.gazetteer, models / "gazetteer.json")
    if config.triggers:
        shutil.copyfile(config.triggers, models / "triggers.txt")
    if not config.annotations:
        if config.recognizer != "gazetteer":
            raise ValueError(
                f"recognizer '{config.recognizer}' needs an annotations file")
        logger.info("train: no annotations configured, skipping classifiers")
        return
    shutil.copyfile(config.annotations, models / "annotations.jsonl")
    store = run.load_store()
    lexicon = run.load_lexicon()
    records = extract_mod.load_annotations(config.annotations)

    relation_clf = training.train_relation_classifier(
        store, records, lexicon, l2=config.maxent_l2,
        epochs=config.maxent_epochs, seed=config.maxent_seed)
    save_classifier(relation_clf, models / "relation.json")

    if config.triggers:
        triggers = [t.strip() for t in
                    Path(config.triggers).read_text(encoding="utf-8").splitlines()
                    if t.strip()]
        action_clf = training.train_action_classifier(
            store, records, triggers, lexicon, action_type=config.action_type,
            l2=config.maxent_l2, epochs=config.maxent_epochs,
            seed=config.maxent_seed, threshold=config.action_threshold)
        save_classifier(action_clf, models / "action.json")

    if config.recognizer == "model":
        sentences = [s for doc in store for s in extract_mod.split_sentences(doc)]
        recognizer = extract_mod.train_boundary_recognizer(
            sentences, extract_mod.mention_annotations(records),
            epochs=config.maxent_epochs, seed=config.maxent_seed)
        save_classifier(recognizer.begin_clf, models / "boundary_begin.json")
        save_classifier(recognizer.end_clf, models / "boundary_end.json")
        save_classifier(recognizer.span_clf, models / "boundary_span.json")


def stage_extract(run: _PipelineRun):
    config = run.config
    store = run.load_store()
    lexicon = run.load_lexicon()
    recognizer = run.recognizer()
    relation_path = run.root / "models" / "relation.json"
    rel_clf = load_classifier(relation_path) if relation_path.exists() else None
    for s in run.load_slices():
        per_doc = {}
        for doc_id in s["members"]:
            doc = store.get(doc_id)
            mentions, relations = extract_mod.extract_document(
                doc, recognizer, rel_clf, lexicon,
                min_len=config.min_surface_len, max_len=config.max_surface_len,
                max_entities=config.max_entities)
            if config.weight_threshold > 0.0:
                mentions = [m for m in mentions
                            if m.weight >= config.weight_threshold]
                kept = {(m.doc_id, m.sentence_index, m.start, m.end)
                        for m in mentions}
                relations = [
                    r for r in relations
                    if (r.arg1.doc_id, r.arg1.sentence_index, r.arg1.start,
                        r.arg1.end) in kept
                    and (r.arg2.doc_id, r.arg2.sentence_index, r.arg2.start,
                         r.arg2.end) in kept
                ]
            per_doc[doc_id] = {
                "mentions": [mention_to_dict(m) for m in mentions],
                "relations": [relation_to_dict(r) for r in relations],
            }
        _write_json(run.root / "extractions" / f"t{s['index']}.json", per_doc)
        logger.info("extract: slice %d done (%d documents)",
                    s["index"], len(per_doc))


def stage_build(run: _PipelineRun):
    store = run.load_store()
    networks_dir = run.root / "networks"
    networks_dir.mkdir(exist_ok=True)
    count = 0
    for s in run.load_slices():
        events_path = run.root / "events" / f"t{s['index']}.json"
        per_doc = _read_json(run.root / "extractions" / f"t{s['index']}.json")
        events = [eventdetect.event_from_dict(e) for e in _read_json(events_path)]
        for event in eventdetect.walk_events(events):
            bundle = extract_mod.ExtractionBundle(event_id=event.id)
            for doc_id in event.members:
                data = per_doc[doc_id]
                bundle.mentions.extend(mention_from_dict(m)
                                       for m in data["mentions"])
                bundle.relations.extend(relation_from_dict(r)
                                        for r in data["relations"])
                bundle.doc_timestamps[doc_id] = (
                    store.get(doc_id).timestamp.isoformat())
            net = netmodel.build_event_network(bundle)
            net.provenance = {"event_id": event.id, "slice": s["index"],
                              "level": event.level}
            netmodel.export_network(net, "json",
                                    networks_dir / event_filename(event.id))
            count += 1
    logger.info("build: %d networks", count)


def run_pipeline(config: PipelineConfig, force: bool = False,
                 until: str | None = None, slice_filter=None) -> Path:
    """Execute the stages in order; previously completed stages are skipped
    unless force is set, and `until` stops after the named stage. A slice
    filter restricts detection to the named slice indices (the detect stage
    is then left unmarked so a later full run finishes the rest). Returns
    the artifact directory."""
    config.validate()
    if until is not None and until not in STAGES:
        raise ValueError(f"unknown stage {until!r}; stages are {STAGES}")
    run = _PipelineRun(config, force, slice_filter=slice_filter)
    _write_json(run.root / "config.json", config.to_dict())
    stage_fns = {
        "ingest": stage_ingest,
        "slice": stage_slice,
        "detect": stage_detect,
        "train": stage_train,
        "extract": stage_extract,
        "build": stage_build,
    }
    for stage in STAGES:
        if not force and run.done.get(stage):
            logger.info("%s: already complete, skipping", stage)
        else:
            started = time.time()
            try:
                stage_fns[stage](run)
            except Exception as exc:
                raise PipelineError(stage, exc) from exc
            if not (stage == "detect" and run.slice_filter is not None):
                run.mark(stage)
            logger.info("%s: finished in %.1fs", stage, time.time() - started)
        if stage == until:
            break
    return run.root
