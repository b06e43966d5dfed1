import json

import networkx as nx
import pytest

from evnet.cli import main


@pytest.fixture(scope="module")
def cli_workspace(tmp_path_factory):
    """A small corpus driven end to end through the CLI entry point."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data"
    assert main(["synth", "--output", str(data), "--docs", "60",
                 "--months", "8"]) == 0
    config = data / "evnet.cfg"
    assert main(["pipeline", "--config", str(config)]) == 0
    return {"data": data, "config": config, "artifacts": data / "artifacts"}


def test_analyze_filter_stdout_is_canonical_json(cli_workspace, capsys):
    rc = main(["analyze", "filter", "--artifacts",
               str(cli_workspace["artifacts"]), "--event", "t0/e00",
               "--vtype", "PER", "--etype", "PER-SOC"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"event_id", "provenance", "vertices", "edges"}
    assert all(v["vtype"] == "PER" for v in payload["vertices"])


def test_analyze_plt_whole_corpus(cli_workspace, capsys):
    rc = main(["analyze", "plt", "--artifacts", str(cli_workspace["artifacts"]),
               "--person", "毛泽东"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert {v["vtype"] for v in payload["vertices"]} <= {"TIME", "LOC"}


def test_analyze_path_flags(cli_workspace, capsys):
    rc = main(["analyze", "path", "--artifacts", str(cli_workspace["artifacts"]),
               "--event", "t0/e00", "--from", "甲", "--to", "乙"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["provenance"]["analysis"] == "path"


def test_export_graphml_parses(cli_workspace, tmp_path):
    out = tmp_path / "net.graphml"
    rc = main(["export", "--artifacts", str(cli_workspace["artifacts"]),
               "--event", "t0/e00", "--format", "graphml",
               "--output", str(out)])
    assert rc == 0
    nx.read_graphml(str(out))


def test_extract_single_event_bundle(cli_workspace, tmp_path):
    out = tmp_path / "bundle.json"
    rc = main(["extract", "--artifacts", str(cli_workspace["artifacts"]),
               "--event", "t0e0", "--output", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text("utf-8"))
    assert payload["event_id"] == "t0/e00"
    assert {"mentions", "relations", "doc_timestamps"} <= set(payload)


def test_unknown_event_exits_nonzero(cli_workspace, capsys):
    rc = main(["analyze", "ego", "--artifacts", str(cli_workspace["artifacts"]),
               "--event", "t9/e99", "--center", "毛泽东"])
    assert rc == 1


def test_config_override_flag(cli_workspace, tmp_path, capsys):
    out = tmp_path / "arts2"
    rc = main(["ingest", "--config", str(cli_workspace["config"]),
               "--output", str(out)])
    assert rc == 0
    assert (out / "documents.jsonl").exists()
    assert "ingested 60 documents" in capsys.readouterr().out
