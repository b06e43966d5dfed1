import json
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from evnet.artifacts import Artifacts
from evnet.netmodel import network_to_dict
from evnet.service import create_app
from evnet import queries


@pytest.fixture(scope="module")
def client(synth_artifacts):
    app = create_app(synth_artifacts["root"])
    with TestClient(app, raise_server_exceptions=False) as client:
        yield client


@pytest.fixture(scope="module")
def arts(synth_artifacts):
    return Artifacts(synth_artifacts["root"])


class TestEndpoints:
    def test_slices(self, client, arts):
        response = client.get("/slices")
        assert response.status_code == 200
        body = response.json()
        assert len(body) == len(arts.slices)
        assert {"index", "start", "end", "documents"} <= set(body[0])

    def test_slice_events_tree(self, client):
        response = client.get("/slices/0/events")
        assert response.status_code == 200
        events = response.json()
        assert events
        assert {"id", "members", "top_words", "children"} <= set(events[0])

    def test_network_lenient_id(self, client, arts):
        canonical = arts.event_ids()[0]
        lenient = canonical.replace("/", "").replace("e0", "e")
        r1 = client.get(f"/events/{canonical}/network")
        r2 = client.get(f"/events/{lenient}/network")
        assert r1.status_code == r2.status_code == 200
        assert r1.json() == r2.json()

    def test_unknown_event_is_not_found(self, client):
        response = client.get("/events/t9/e99/network")
        assert response.status_code == 404
        body = response.json()
        assert body["error"]["code"] == "not_found"
        assert list(body) == ["error"]

    def test_bad_parameter_is_bad_request(self, client, arts):
        event_id = arts.event_ids()[0]
        response = client.get(f"/events/{event_id}/analyze/ego",
                              params={"center": "毛泽东", "radius": 0})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "bad_request"

    def test_malformed_parameter_type_is_bad_request(self, client, arts):
        event_id = arts.event_ids()[0]
        for url, params in (
            (f"/events/{event_id}/analyze/ego",
             {"center": "毛泽东", "radius": "abc"}),
            (f"/events/{event_id}/analyze/plt", {}),  # person missing
            ("/slices/abc/events", {}),
        ):
            response = client.get(url, params=params)
            assert response.status_code == 400
            body = response.json()
            assert list(body) == ["error"]
            assert body["error"]["code"] == "bad_request"
            assert body["error"]["message"]


class TestCliEquivalence:
    """The service and the CLI call the same query functions; responses must
    be identical for identical parameters."""

    def test_ego(self, client, arts):
        event_id = arts.event_ids()[0]
        response = client.get(f"/events/{event_id}/analyze/ego",
                              params={"center": "毛泽东", "radius": 1})
        assert response.status_code == 200
        direct = network_to_dict(queries.query_ego(arts, event_id, "毛泽东", 1))
        assert response.json() == direct

    def test_filter(self, client, arts):
        event_id = arts.event_ids()[0]
        response = client.get(
            f"/events/{event_id}/analyze/filter",
            params=[("vtype", "PER"), ("etype", "PER-SOC")])
        direct = network_to_dict(queries.query_filter(
            arts, event_id, vtypes=["PER"], etypes=["PER-SOC"]))
        assert response.json() == direct
        vtypes = {v["vtype"] for v in response.json()["vertices"]}
        assert vtypes <= {"PER"}

    def test_plt(self, client, arts):
        event_id = arts.event_ids()[0]
        response = client.get(f"/events/{event_id}/analyze/plt",
                              params={"person": "毛泽东"})
        direct = network_to_dict(queries.query_plt(arts, "毛泽东",
                                                   event_id=event_id))
        assert response.json() == direct

    def test_path(self, client, arts):
        event_id = arts.event_ids()[0]
        response = client.get(f"/events/{event_id}/analyze/path",
                              params={"from": "毛泽东", "to": "周恩来"})
        direct = network_to_dict(queries.query_path(arts, event_id,
                                                    "毛泽东", "周恩来"))
        assert response.json() == direct

    def test_action(self, client, arts):
        event_ids = [e for e in arts.event_ids() if "/s" not in e]
        event_id = event_ids[2]
        response = client.get(f"/events/{event_id}/analyze/action",
                              params={"threshold": 0.9, "min_cooccur": 2})
        direct = network_to_dict(queries.query_action(
            arts, event_id, threshold=0.9, min_cooccur=2))
        assert response.json() == direct


class TestReadOnly:
    def test_concurrent_identical_requests(self, client, arts):
        event_id = arts.event_ids()[0]
        url = f"/events/{event_id}/analyze/ego?center=毛泽东&radius=2"

        def fetch(_):
            return client.get(url).text

        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(fetch, range(16)))
        assert len(set(results)) == 1

    def test_no_mutation_of_artifacts(self, client, synth_artifacts):
        root = synth_artifacts["root"]
        before = sorted(p.as_posix() for p in root.rglob("*"))
        client.get("/slices")
        client.get(f"/events/{Artifacts(root).event_ids()[0]}/network")
        after = sorted(p.as_posix() for p in root.rglob("*"))
        assert before == after
