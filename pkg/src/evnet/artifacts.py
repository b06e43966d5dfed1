"""Read-only access to a pipeline artifact directory, shared by the CLI and
the HTTP service so both produce identical analysis results."""

from __future__ import annotations

import json
import re
from pathlib import Path

from . import extract as extract_mod
from .corpus import DocumentStore, Lexicon, ingest_documents
from .eventdetect import DocumentEvent, event_from_dict, walk_events
from .learn import Classifier, load_classifier
from .netmodel import EventNetwork, network_from_dict
from .pipeline import event_filename


def lenient_event_key(event_id: str) -> str:
    """Normalized id for lookup: separators dropped, zero padding removed, so
    t0/e03 and t0e3 name the same event."""
    text = re.sub(r"[^0-9a-zA-Z]+", "", event_id.lower())
    return re.sub(r"0*(\d)", lambda m: m.group(1), text)


class ArtifactError(KeyError):
    pass


class Artifacts:
    def __init__(self, root):
        self.root = Path(root)
        if not (self.root / "config.json").exists():
            raise FileNotFoundError(f"not an artifact directory: {self.root}")
        self._config = None
        self._store = None
        self._lexicon = None
        self._slices = None
        self._events: dict[int, list[DocumentEvent]] = {}
        self._event_ids: dict[str, str] | None = None
        self._networks: dict[str, EventNetwork] = {}
        self._recognizer = None
        self._action_clf = None

    def _read_json(self, *parts):
        with open(self.root.joinpath(*parts), encoding="utf-8") as fh:
            return json.load(fh)

    @property
    def config(self) -> dict:
        if self._config is None:
            self._config = self._read_json("config.json")
        return self._config

    @property
    def store(self) -> DocumentStore:
        if self._store is None:
            self._store = ingest_documents(self.root / "documents.jsonl")
        return self._store

    @property
    def lexicon(self) -> Lexicon:
        if self._lexicon is None:
            self._lexicon = Lexicon.from_file(self.root / "lexicon.txt")
        return self._lexicon

    @property
    def slices(self) -> list[dict]:
        if self._slices is None:
            self._slices = self._read_json("slices", "slices.json")
        return self._slices

    def slice_events(self, index: int) -> list[DocumentEvent]:
        if index not in self._events:
            path = self.root / "events" / f"t{index}.json"
            if not path.exists():
                raise ArtifactError(f"slice not found: {index}")
            self._events[index] = [event_from_dict(e)
                                   for e in self._read_json("events", f"t{index}.json")]
        return self._events[index]

    def slice_events_payload(self, index: int) -> list[dict]:
        path = self.root / "events" / f"t{index}.json"
        if not path.exists():
            raise ArtifactError(f"slice not found: {index}")
        return self._read_json("events", f"t{index}.json")

    def _id_table(self) -> dict[str, str]:
        if self._event_ids is None:
            table = {}
            for s in self.slices:
                for event in walk_events(self.slice_events(s["index"])):
                    table[lenient_event_key(event.id)] = event.id
            self._event_ids = table
        return self._event_ids

    def resolve_event_id(self, event_id: str) -> str:
        table = self._id_table()
        key = lenient_event_key(event_id)
        if key not in table:
            raise ArtifactError(f"event not found: {event_id}")
        return table[key]

    def event(self, event_id: str) -> DocumentEvent:
        canonical = self.resolve_event_id(event_id)
        for s in self.slices:
            for event in walk_events(self.slice_events(s["index"])):
                if event.id == canonical:
                    return event
        raise ArtifactError(f"event not found: {event_id}")

    def event_ids(self) -> list[str]:
        return sorted(self._id_table().values())

    def network(self, event_id: str) -> EventNetwork:
        canonical = self.resolve_event_id(event_id)
        if canonical not in self._networks:
            path = self.root / "networks" / event_filename(canonical)
            if not path.exists():
                raise ArtifactError(f"network not found for event: {event_id}")
            with open(path, encoding="utf-8") as fh:
                self._networks[canonical] = network_from_dict(json.load(fh))
        return self._networks[canonical]

    def all_networks(self) -> list[EventNetwork]:
        return [self.network(event_id) for event_id in self.event_ids()]

    @property
    def recognizer(self) -> extract_mod.EntityRecognizer:
        if self._recognizer is None:
            models = self.root / "models"
            choice = self.config.get("recognizer", "gazetteer")
            if choice == "gazetteer":
                self._recognizer = extract_mod.GazetteerRecognizer.from_file(
                    models / "gazetteer.json")
            elif choice == "annotations":
                records = extract_mod.load_annotations(models / "annotations.jsonl")
                self._recognizer = extract_mod.AnnotationRecognizer(
                    extract_mod.mention_annotations(records))
            else:
                self._recognizer = extract_mod.TrainedBoundaryRecognizer(
                    load_classifier(models / "boundary_begin.json"),
                    load_classifier(models / "boundary_end.json"),
                    load_classifier(models / "boundary_span.json"),
                    max_span=self.config.get("max_surface_len", 6))
        return self._recognizer

    @property
    def action_classifier(self) -> Classifier:
        if self._action_clf is None:
            path = self.root / "models" / "action.json"
            if not path.exists():
                raise ArtifactError("no action classifier in artifacts "
                                    "(train stage needs annotations + triggers)")
            self._action_clf = load_classifier(path)
        return self._action_clf
