from __future__ import annotations

from pathlib import Path

import pytest
from fastapi.testclient import TestClient

import hierarchical_supervisor.api as api


@pytest.fixture
def client() -> TestClient:
    return TestClient(api.app)


@pytest.fixture
def example3_texts(examples_dir: Path) -> tuple[str, str]:
    folder = examples_dir / "example3"
    return (folder / "plant.des").read_text(encoding="utf-8"), (folder / "spec.des").read_text(encoding="utf-8")


def test_health(client: TestClient) -> None:
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_check_returns_verdict(client: TestClient, example3_texts: tuple[str, str]) -> None:
    plant, _ = example3_texts
    response = client.post("/api/check", json={"plant": plant, "property": "moc"})
    assert response.status_code == 200
    body = response.json()
    assert body["verdict"] == "violated"
    assert body["counterexample"] == [["c"], ["b", "c"]]

    response = client.post("/api/check", json={"plant": plant, "property": "oc"})
    assert response.json()["proof"] == "exhaustive_finite"


def test_check_with_specification(client: TestClient, example3_texts: tuple[str, str]) -> None:
    plant, spec = example3_texts
    response = client.post("/api/check", json={"plant": plant, "spec": spec, "property": "normal"})
    assert response.status_code == 200
    assert response.json()["counterexample"] == [["b", "a", "c"]]

    response = client.post("/api/check", json={"plant": plant, "property": "normal"})
    assert response.status_code == 400
    assert "needs a specification" in response.json()["detail"]


def test_synthesize_reports_refuted_equality(client: TestClient, example3_texts: tuple[str, str]) -> None:
    plant, spec = example3_texts
    response = client.post("/api/synthesize", json={"plant": plant, "spec": spec})
    assert response.status_code == 200
    body = response.json()
    assert body["equality_certified"] is False
    assert body["equality_witness"] == ["c"]
    assert body["moc"]["verdict"] == "violated"


def test_malformed_plant_is_a_bad_request(client: TestClient) -> None:
    response = client.post("/api/check", json={"plant": "events: a\nstates p\n"})
    assert response.status_code == 400
    assert response.json()["detail"].startswith("line 2:")


def test_request_validation(client: TestClient, example3_texts: tuple[str, str]) -> None:
    plant, _ = example3_texts
    response = client.post("/api/check", json={"plant": plant, "property": "bogus"})
    assert response.status_code == 422
    response = client.post("/api/check", json={"plant": plant, "bound": 1000})
    assert response.status_code == 422
