"""Shared fixtures: default config, the bundled scenario store, and cached
full headless runs (they are deterministic, so every test can share them)."""
from __future__ import annotations

import time

import pytest

from bridgewatch import Config, ScenarioStore, run_headless


@pytest.fixture(scope="session")
def cfg() -> Config:
    return Config()


@pytest.fixture(scope="session")
def store() -> ScenarioStore:
    return ScenarioStore.bundled()


@pytest.fixture(scope="session")
def accepted_runs(store, cfg):
    """One accepted headless run per bundled scenario, with wall times."""
    runs = {}
    for sid in store.ids():
        start = time.perf_counter()
        session = run_headless(store.get(sid), cfg, "accepted")
        runs[sid] = (session, time.perf_counter() - start)
    return runs
