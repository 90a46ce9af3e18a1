"""HTTP API over the job manager."""

import json

import pytest
from fastapi.testclient import TestClient

from blast.jobs import JobManager
from blast.jobs.api import create_app

from test_jobs import quick_config


@pytest.fixture
def client(tmp_path):
    manager = JobManager(tmp_path)
    with TestClient(create_app(manager)) as c:
        yield c


def test_list_models(client):
    r = client.get("/api/models")
    assert r.status_code == 200
    ids = [m["model_id"] for m in r.json()["models"]]
    assert ids == ["lennard_jones", "morse", "stillinger_weber"]


def test_show_model(client):
    r = client.get("/api/models/lennard_jones", params={"species": "A,B"})
    assert r.status_code == 200
    body = r.json()
    assert body["model"]["arity"] == "pair"
    assert len(body["parameter_space"]["parameters"]) == 9
    assert client.get("/api/models/eam").status_code == 404


def test_submit_and_lifecycle(client):
    r = client.post("/api/jobs", json=quick_config())
    assert r.status_code == 201
    job_id = r.json()["job_id"]

    r = client.get("/api/jobs")
    assert job_id in [j["job_id"] for j in r.json()["jobs"]]

    r = client.get(f"/api/jobs/{job_id}")
    assert r.json()["status"] == "created"
    assert client.get(f"/api/jobs/{job_id}/result").status_code == 404

    assert client.post(f"/api/jobs/{job_id}/start").status_code == 200
    # second start conflicts (or the job already finished -> also 409)
    assert client.post(f"/api/jobs/{job_id}/start").status_code == 409

    # poll to terminal
    import time

    for _ in range(200):
        status = client.get(f"/api/jobs/{job_id}").json()["status"]
        if status in ("completed", "cancelled", "failed"):
            break
        time.sleep(0.05)
    assert status == "completed"

    result = client.get(f"/api/jobs/{job_id}/result")
    assert result.status_code == 200
    assert "learn_result" in result.json()


def test_submit_invalid_config_reports_field_paths(client):
    doc = quick_config()
    doc["learner"]["population"] = 7
    r = client.post("/api/jobs", json=doc)
    assert r.status_code == 400
    paths = [e["path"] for e in r.json()["errors"]]
    assert "learner.population" in paths


def test_unknown_job_is_404(client):
    assert client.get("/api/jobs/nope").status_code == 404
    assert client.post("/api/jobs/nope/start").status_code == 404
    assert client.get("/api/jobs/nope/progress").status_code == 404


def test_cancel_created_job_conflicts(client):
    job_id = client.post("/api/jobs", json=quick_config()).json()["job_id"]
    assert client.post(f"/api/jobs/{job_id}/cancel").status_code == 409


def test_progress_stream(client):
    job_id = client.post("/api/jobs", json=quick_config(generations=8)).json()["job_id"]
    client.post(f"/api/jobs/{job_id}/start")
    events = []
    with client.stream("GET", f"/api/jobs/{job_id}/progress") as r:
        assert r.headers["content-type"].startswith("text/event-stream")
        for line in r.iter_lines():
            if line.startswith("data: "):
                events.append(line[len("data: "):])
            if line.startswith("event: end"):
                break
    payloads = [json.loads(e) for e in events if e and e != "{}"]
    iters = [p["iteration"] for p in payloads]
    assert iters == list(range(1, 9))
    assert all(p["job_id"] == job_id for p in payloads)
    # stream replays identically after completion
    with client.stream("GET", f"/api/jobs/{job_id}/progress") as r:
        replay = [
            json.loads(line[6:]) for line in r.iter_lines()
            if line.startswith("data: ") and line != "data: {}"
        ]
    assert [p["iteration"] for p in replay] == iters
