"""evnet command line: corpus generation, pipeline stages, analyses, exports
and the read-only service."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import synth
from .artifacts import Artifacts
from .learn import cross_validate
from .netmodel import export_network, network_json
from .pipeline import PipelineConfig, load_config, run_pipeline
from . import queries

logger = logging.getLogger(__name__)


def _config_from_args(args) -> PipelineConfig:
    overrides = {}
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key] = value
    if getattr(args, "input", None):
        overrides["corpus"] = args.input
    if getattr(args, "lexicon", None):
        overrides["lexicon"] = args.lexicon
    if getattr(args, "output", None):
        overrides["output"] = args.output
    if getattr(args, "topics", None) is not None:
        overrides["topics"] = str(args.topics)
    if getattr(args, "seed", None) is not None:
        overrides["lda_seed"] = str(args.seed)
    return load_config(getattr(args, "config", None), overrides)


def _emit_network(net, output):
    text = network_json(net)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_synth(args):
    paths = synth.write_corpus(args.output, n_docs=args.docs, seed=args.seed,
                               months=args.months)
    print(f"wrote synthetic corpus under {args.output}")
    print(f"run the pipeline with: evnet pipeline --config {paths['config']}")


def _parse_slice_filter(raw):
    if raw is None or raw == "all":
        return None
    try:
        return {int(piece) for piece in raw.split(",") if piece.strip()}
    except ValueError:
        raise SystemExit(f"--slices expects 'all' or indices like 0,2: {raw!r}")


def cmd_stage(stage):
    def handler(args):
        config = _config_from_args(args)
        root = run_pipeline(config, force=args.force, until=stage,
                            slice_filter=_parse_slice_filter(
                                getattr(args, "slices", None)))
        if stage == "ingest":
            from .corpus import ingest_documents

            store = ingest_documents(root / "documents.jsonl")
            print(f"ingested {len(store)} documents into {root}")
        else:
            print(f"pipeline complete through '{stage}' in {root}")

    return handler


def cmd_pipeline(args):
    config = _config_from_args(args)
    root = run_pipeline(config, force=args.force)
    print(f"pipeline complete in {root}")


def cmd_train(args):
    from . import extract as extract_mod
    from . import training

    config = _config_from_args(args)
    root = run_pipeline(config, force=False, until="ingest")
    artifacts = Artifacts(root)
    if not config.annotations:
        raise SystemExit("train requires an annotations file in the configuration")
    records = extract_mod.load_annotations(config.annotations)
    if args.task == "relation":
        instances = training.build_relation_instances(
            artifacts.store, records, artifacts.lexicon)
        labels = sorted({inst.label for inst in instances})
        for label in labels:
            prf = cross_validate(instances, k=args.folds, positive_class=label,
                                 seed=config.maxent_seed, l2=config.maxent_l2,
                                 epochs=config.maxent_epochs)
            print(f"{label}: P={prf.precision * 100:.2f} "
                  f"R={prf.recall * 100:.2f} F={prf.f_score * 100:.2f}")
    else:
        if not config.triggers:
            raise SystemExit("action training requires a triggers file")
        from pathlib import Path

        trigger_text = Path(config.triggers).read_text(encoding="utf-8")
        triggers = [t.strip() for t in trigger_text.splitlines() if t.strip()]
        instances = training.build_action_instances(
            artifacts.store, records, triggers, artifacts.lexicon,
            action_type=config.action_type)
        for threshold in (0.5, config.action_threshold):
            prf = cross_validate(instances, k=args.folds,
                                 positive_class=config.action_type,
                                 seed=config.maxent_seed, l2=config.maxent_l2,
                                 epochs=config.maxent_epochs, threshold=threshold)
            print(f"threshold={threshold}: P={prf.precision * 100:.2f} "
                  f"R={prf.recall * 100:.2f} F={prf.f_score * 100:.2f}")
    run_pipeline(config, force=args.force, until="train")
    print(f"models written under {config.output}/models")


def cmd_analyze(args):
    artifacts = Artifacts(args.artifacts)
    if args.analysis == "filter":
        net = queries.query_filter(artifacts, args.event, vtypes=args.vtype,
                                   etypes=args.etype, names=args.name,
                                   min_weight=args.min_weight)
    elif args.analysis == "plt":
        net = queries.query_plt(artifacts, args.person, event_id=args.event)
    elif args.analysis == "action":
        net = queries.query_action(artifacts, args.event,
                                   threshold=args.threshold,
                                   min_cooccur=args.min_cooccur)
    elif args.analysis == "path":
        net = queries.query_path(artifacts, args.event, args.path_from,
                                 args.path_to)
    else:
        net = queries.query_ego(artifacts, args.event, args.center,
                                radius=args.radius)
    _emit_network(net, args.output)


def cmd_export(args):
    artifacts = Artifacts(args.artifacts)
    net = artifacts.network(args.event)
    export_network(net, args.format, args.output)
    print(f"wrote {args.format} export to {args.output}")


def cmd_serve(args):
    from .service import serve

    serve(args.artifacts, port=args.port, host=args.host,
          cors_origin=args.cors_origin)


def cmd_extract(args):
    """Stage mode without --event; with --event, write that event's
    extraction bundle as JSON."""
    if not args.event:
        cmd_stage("extract")(args)
        return
    from . import extract as extract_mod
    from .learn import load_classifier
    from .pipeline import mention_to_dict, relation_to_dict

    artifacts = Artifacts(args.artifacts)
    event = artifacts.event(args.event)
    recognizer = artifacts.recognizer
    if args.recognizer and args.recognizer != artifacts.config.get("recognizer"):
        models = artifacts.root / "models"
        if args.recognizer == "gazetteer":
            recognizer = extract_mod.GazetteerRecognizer.from_file(
                models / "gazetteer.json")
        elif args.recognizer == "annotations":
            records = extract_mod.load_annotations(models / "annotations.jsonl")
            recognizer = extract_mod.AnnotationRecognizer(
                extract_mod.mention_annotations(records))
        else:
            recognizer = extract_mod.TrainedBoundaryRecognizer(
                load_classifier(models / "boundary_begin.json"),
                load_classifier(models / "boundary_end.json"),
                load_classifier(models / "boundary_span.json"))
    rel_path = artifacts.root / "models" / "relation.json"
    rel_clf = load_classifier(rel_path) if rel_path.exists() else None
    bundle = extract_mod.extract_event(event, artifacts.store, recognizer,
                                       rel_clf, artifacts.lexicon)
    payload = {
        "event_id": bundle.event_id,
        "mentions": [mention_to_dict(m) for m in bundle.mentions],
        "relations": [relation_to_dict(r) for r in bundle.relations],
        "doc_timestamps": bundle.doc_timestamps,
    }
    text = json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _add_config_args(parser, with_io=False):
    parser.add_argument("--config", help="pipeline configuration file")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a configuration key")
    parser.add_argument("--force", action="store_true",
                        help="rerun stages even if already complete")
    if with_io:
        parser.add_argument("--input", help="corpus JSONL path")
        parser.add_argument("--lexicon", help="lexicon path")
        parser.add_argument("--output", help="artifact directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evnet",
                                     description="event-network pipeline")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the bundled synthetic corpus")
    p.add_argument("--output", required=True)
    p.add_argument("--docs", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--months", type=int, default=22)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("ingest", help="validate and ingest a corpus")
    _add_config_args(p, with_io=True)
    p.set_defaults(handler=cmd_stage("ingest"))

    p = sub.add_parser("detect", help="detect document events per slice")
    _add_config_args(p)
    p.add_argument("--slices", default="all",
                   help="'all' or comma-separated slice indices")
    p.add_argument("--topics", type=int, help="shorthand for --set topics=N")
    p.add_argument("--seed", type=int, help="shorthand for --set lda_seed=N")
    p.set_defaults(handler=cmd_stage("detect"))

    p = sub.add_parser("build", help="merge extractions into networks")
    _add_config_args(p)
    p.set_defaults(handler=cmd_stage("build"))

    p = sub.add_parser("extract",
                       help="extraction stage, or one event with --event")
    _add_config_args(p)
    p.add_argument("--event", help="extract a single event to a bundle JSON")
    p.add_argument("--recognizer", choices=("gazetteer", "annotations", "model"))
    p.add_argument("--artifacts", default="artifacts")
    p.add_argument("--output")
    p.set_defaults(handler=cmd_extract)

    p = sub.add_parser("train", help="cross-validate and train classifiers")
    _add_config_args(p)
    p.add_argument("--task", choices=("relation", "action"), required=True)
    p.add_argument("--folds", type=int, default=5)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("pipeline", help="run every stage")
    _add_config_args(p, with_io=True)
    p.set_defaults(handler=cmd_pipeline)

    p = sub.add_parser("analyze", help="run an analysis over built networks")
    analysis = p.add_subparsers(dest="analysis", required=True)

    f = analysis.add_parser("filter")
    f.add_argument("--artifacts", default="artifacts")
    f.add_argument("--event", required=True)
    f.add_argument("--vtype", action="append")
    f.add_argument("--etype", action="append")
    f.add_argument("--name", action="append")
    f.add_argument("--min-weight", type=float, dest="min_weight")
    f.add_argument("--output")
    f.set_defaults(handler=cmd_analyze)

    f = analysis.add_parser("plt")
    f.add_argument("--artifacts", default="artifacts")
    f.add_argument("--person", required=True)
    f.add_argument("--event", help="restrict to one event (default: all)")
    f.add_argument("--output")
    f.set_defaults(handler=cmd_analyze)

    f = analysis.add_parser("action")
    f.add_argument("--artifacts", default="artifacts")
    f.add_argument("--event", required=True)
    f.add_argument("--threshold", type=float)
    f.add_argument("--min-cooccur", type=int, dest="min_cooccur")
    f.add_argument("--output")
    f.set_defaults(handler=cmd_analyze)

    f = analysis.add_parser("path")
    f.add_argument("--artifacts", default="artifacts")
    f.add_argument("--event", required=True)
    f.add_argument("--from", dest="path_from", required=True)
    f.add_argument("--to", dest="path_to", required=True)
    f.add_argument("--output")
    f.set_defaults(handler=cmd_analyze)

    f = analysis.add_parser("ego")
    f.add_argument("--artifacts", default="artifacts")
    f.add_argument("--event", required=True)
    f.add_argument("--center", required=True)
    f.add_argument("--radius", type=int, default=1)
    f.add_argument("--output")
    f.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("export", help="export a network")
    p.add_argument("--artifacts", default="artifacts")
    p.add_argument("--event", required=True)
    p.add_argument("--format", choices=("pajek", "graphml", "dot", "json"),
                   required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(handler=cmd_export)

    p = sub.add_parser("serve", help="serve the read-only HTTP API")
    p.add_argument("--artifacts", default="artifacts")
    p.add_argument("--port", type=int, default=None,
                   help="defaults to EVNET_PORT or 8321")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--cors-origin", dest="cors_origin", default="*",
                   help="allowed explorer origin")
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args.handler(args)
    except Exception as exc:
        logger.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
