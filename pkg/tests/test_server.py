"""HTTP surface: REST endpoints, SSE framing and resume, background ticker."""
from __future__ import annotations

import json
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from bridgewatch import Config, ScenarioStore, load_scenario
from bridgewatch.server import create_app

import dataclasses


@pytest.fixture()
def client(cfg, store):
    with TestClient(create_app(cfg, store)) as c:
        yield c


def make_session(client, scenario_id="head_on_single"):
    response = client.post("/api/sessions", json={"scenario_id": scenario_id})
    assert response.status_code == 201
    return response.json()


def sse_frames(text):
    """Parse an SSE body into a list of {field: value} dicts (no comments)."""
    frames = []
    for block in text.split("\n\n"):
        if not block.strip() or block.startswith(":"):
            continue
        fields = {}
        for line in block.splitlines():
            name, _, value = line.partition(": ")
            fields[name] = value
        frames.append(fields)
    return frames


class TestScenarios:
    def test_listing(self, client):
        response = client.get("/api/scenarios")
        assert response.status_code == 200
        listing = response.json()
        assert [s["id"] for s in listing] == [
            "crossing_multi", "crossing_single", "head_on_double", "head_on_single"]
        for entry in listing:
            assert {"id", "title", "description", "foil_characteristic",
                    "obstacles"} <= set(entry)


class TestSessionLifecycle:
    def test_create_returns_full_snapshot(self, client):
        snap = make_session(client)
        assert snap["scenario"]["id"] == "head_on_single"
        assert snap["clock"] == 0.0
        assert snap["playback"] == "paused"
        assert snap["decision"] == "pending"
        assert snap["decision_point"]["trigger_time"] == 15.0
        assert len(snap["plan"]["candidates"]) == 39

    def test_create_unknown_scenario(self, client):
        response = client.post("/api/sessions", json={"scenario_id": "nope"})
        assert response.status_code == 404

    def test_snapshot_roundtrip_and_unknown_session(self, client):
        snap = make_session(client, "crossing_single")
        sid = snap["session_id"]
        again = client.get(f"/api/sessions/{sid}")
        assert again.status_code == 200
        assert again.json()["session_id"] == sid
        assert client.get("/api/sessions/missing").status_code == 404


class TestPlayback:
    def test_play_pause(self, client):
        sid = make_session(client)["session_id"]
        snap = client.post(f"/api/sessions/{sid}/playback",
                           json={"action": "play"}).json()
        assert snap["playback"] == "playing"
        snap = client.post(f"/api/sessions/{sid}/playback",
                           json={"action": "pause"}).json()
        assert snap["playback"] == "paused"

    def test_seek(self, client):
        sid = make_session(client)["session_id"]
        snap = client.post(f"/api/sessions/{sid}/playback",
                           json={"action": "seek", "time": 12.0}).json()
        assert snap["clock"] == 12.0
        assert snap["playback"] == "paused"
        assert snap["decision"] == "pending"

    def test_seek_needs_a_valid_time(self, client):
        sid = make_session(client)["session_id"]
        response = client.post(f"/api/sessions/{sid}/playback",
                               json={"action": "seek"})
        assert response.status_code == 400
        response = client.post(f"/api/sessions/{sid}/playback",
                               json={"action": "seek", "time": -3.0})
        assert response.status_code == 400

    def test_unknown_action_rejected(self, client):
        sid = make_session(client)["session_id"]
        response = client.post(f"/api/sessions/{sid}/playback",
                               json={"action": "rewind"})
        assert response.status_code == 422


class TestDecision:
    def test_single_shot_conflict(self, client):
        sid = make_session(client)["session_id"]
        first = client.post(f"/api/sessions/{sid}/decision",
                            json={"verdict": "accepted"})
        assert first.status_code == 200
        assert first.json()["decision"] == "accepted"
        second = client.post(f"/api/sessions/{sid}/decision",
                             json={"verdict": "declined"})
        assert second.status_code == 409

    def test_verdict_vocabulary(self, client):
        sid = make_session(client)["session_id"]
        response = client.post(f"/api/sessions/{sid}/decision",
                               json={"verdict": "maybe"})
        assert response.status_code == 422


class TestFoil:
    def test_switch_updates_snapshot(self, client):
        sid = make_session(client)["session_id"]
        snap = client.post(f"/api/sessions/{sid}/foil",
                           json={"characteristic": "reduced_speed"}).json()
        assert snap["characteristic"] == "reduced_speed"
        assert snap["decision_point"]["characteristic"] == "reduced_speed"

    def test_without_decision_point_conflicts(self, cfg):
        quiet = ScenarioStore([load_scenario({
            "id": "open", "title": "Open water",
            "ownship": {"north": 0, "east": 0, "course_deg": 0, "speed": 5},
            "route": [{"north": 0, "east": 0}, {"north": 1500, "east": 0}],
            "cruise_speed": 5.0, "obstacles": [],
            "foil_characteristic": "port_turn",
        })])
        with TestClient(create_app(cfg, quiet)) as client:
            sid = make_session(client, "open")["session_id"]
            response = client.post(f"/api/sessions/{sid}/foil",
                                   json={"characteristic": "port_turn"})
            assert response.status_code == 409

    def test_unknown_characteristic_rejected(self, client):
        sid = make_session(client)["session_id"]
        response = client.post(f"/api/sessions/{sid}/foil",
                               json={"characteristic": "zigzag"})
        assert response.status_code == 422


class TestTraceDownload:
    def test_ndjson_body(self, client):
        sid = make_session(client)["session_id"]
        response = client.get(f"/api/sessions/{sid}/trace")
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("application/x-ndjson")
        lines = response.text.splitlines()
        records = [json.loads(line) for line in lines]
        assert [r["kind"] for r in records] == ["tick", "plan", "explanation"]
        # Compact wire form: no spaces after separators.
        assert lines[0].startswith('{"seq":0,"kind":"tick"')


class TestEvents:
    def test_frames_carry_ids_and_event_names(self, client):
        sid = make_session(client)["session_id"]
        response = client.get(f"/api/sessions/{sid}/events?limit=3")
        assert response.headers["content-type"].startswith("text/event-stream")
        frames = sse_frames(response.text)
        assert [f["event"] for f in frames] == ["state", "plan", "explanation"]
        assert [f["id"] for f in frames] == ["0", "1", "2"]
        payload = json.loads(frames[0]["data"])
        assert payload["kind"] == "tick"
        assert payload["seq"] == 0

    def test_resume_from_query_and_header(self, client):
        sid = make_session(client)["session_id"]
        response = client.get(f"/api/sessions/{sid}/events?since=0&limit=2")
        assert [f["id"] for f in sse_frames(response.text)] == ["1", "2"]
        response = client.get(f"/api/sessions/{sid}/events?limit=1",
                              headers={"Last-Event-ID": "1"})
        assert [f["id"] for f in sse_frames(response.text)] == ["2"]

    def test_bad_resume_header(self, client):
        sid = make_session(client)["session_id"]
        response = client.get(f"/api/sessions/{sid}/events?limit=1",
                              headers={"Last-Event-ID": "abc"})
        assert response.status_code == 400

    def test_unknown_session(self, client):
        assert client.get("/api/sessions/missing/events?limit=1").status_code == 404


class TestTicker:
    def test_playing_sessions_advance_in_real_time(self, cfg, store):
        fast = dataclasses.replace(
            cfg, server=dataclasses.replace(cfg.server, realtime_factor=50.0))
        with TestClient(create_app(fast, store)) as client:
            sid = make_session(client, "crossing_single")["session_id"]
            client.post(f"/api/sessions/{sid}/playback", json={"action": "play"})
            deadline = time.monotonic() + 5.0
            clock = 0.0
            while time.monotonic() < deadline:
                clock = client.get(f"/api/sessions/{sid}").json()["clock"]
                if clock > 0.0:
                    break
                time.sleep(0.05)
            assert clock > 0.0
            client.post(f"/api/sessions/{sid}/playback", json={"action": "pause"})
            frozen = client.get(f"/api/sessions/{sid}").json()["clock"]
            time.sleep(0.2)
            assert client.get(f"/api/sessions/{sid}").json()["clock"] == frozen


class TestStaticUi:
    def test_root_serves_the_console_when_built(self, client):
        dist = Path(__file__).resolve().parents[1] / "frontend" / "dist"
        response = client.get("/")
        if dist.is_dir():
            assert response.status_code == 200
            assert "text/html" in response.headers["content-type"]
        else:
            assert response.status_code == 404
