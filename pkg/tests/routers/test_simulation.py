import json

from fastapi.testclient import TestClient
import pytest

from app.routers import simulation as simulation_router_module
from app.utils.serialization import read_curve
from main import app


@pytest.fixture
def client() -> TestClient:
    return TestClient(app)


def test_check_reports_matched_default_setup(client: TestClient) -> None:
    response = client.post("/simulation/check", json={})

    assert response.status_code == 200
    body = response.json()
    assert body["satisfied"] is True
    assert body["best_delta_m"] == 1
    assert body["predicted_spacetime_visibility"] == pytest.approx(0.5, abs=1e-6)
    assert body["theta1_deg"] == pytest.approx(45.0)


def test_check_flags_single_pulse(client: TestClient) -> None:
    response = client.post(
        "/simulation/check", json={"overrides": ["pump.n_pulses=1"]}
    )

    assert response.status_code == 200
    assert response.json()["satisfied"] is False


def test_rate_returns_closed_form_rates(client: TestClient) -> None:
    config = "[pump]\nextra_phase_path = 200 nm\n"

    response = client.post("/simulation/rate", json={"config": config})

    assert response.status_code == 200
    body = response.json()
    assert body["coincidence_rate"] == pytest.approx(1.5, abs=1e-6)
    assert body["incoherent_rate"] == pytest.approx(1.0)
    assert body["n_terms"] == 4


def test_scan_returns_json_curve(client: TestClient) -> None:
    response = client.post(
        "/simulation/scan",
        json={"parameter": "tau", "start": "600 fs", "stop": "700 fs", "steps": 3},
    )

    assert response.status_code == 200
    assert response.headers["content-type"].startswith("application/json")
    payload = json.loads(response.text)
    assert payload["parameter"] == "tau"
    assert [x for x, _ in payload["points"]] == pytest.approx([600.0, 650.0, 700.0])


def test_scan_returns_csv_curve(client: TestClient) -> None:
    response = client.post(
        "/simulation/scan",
        json={
            "parameter": "inter_pulse_delay",
            "start": "533fs",
            "stop": "933fs",
            "steps": 5,
            "reduce": "visibility",
            "format": "csv",
        },
    )

    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/csv")
    curve = read_curve(response.text)
    assert curve.y_kind.value == "VISIBILITY"
    assert len(curve.points) == 5


def test_theta1_scan_reports_degrees(client: TestClient) -> None:
    response = client.post(
        "/simulation/scan",
        json={
            "parameter": "theta1",
            "start": "0 rad",
            "stop": "1.5707963267948966 rad",
            "steps": 3,
        },
    )

    assert response.status_code == 200
    payload = json.loads(response.text)
    assert payload["x_unit"] == "deg"
    assert [x for x, _ in payload["points"]] == pytest.approx([0.0, 45.0, 90.0])


def test_bad_config_returns_parse_location(client: TestClient) -> None:
    response = client.post(
        "/simulation/check", json={"config": "[interferometer]\ntau = 197 kg\n"}
    )

    assert response.status_code == 400
    body = response.json()
    assert body["error"] == "ParseError"
    assert (body["line"], body["column"]) == (2, 11)


def test_invariant_violations_are_listed(client: TestClient) -> None:
    response = client.post(
        "/simulation/rate", json={"overrides": ["detectors.efficiency=2"]}
    )

    assert response.status_code == 400
    assert response.json()["error"] == "SetupValidationError"
    assert response.json()["detail"][0].startswith("detectors.efficiency")


def test_overflowing_number_returns_bad_request(client: TestClient) -> None:
    response = client.post(
        "/simulation/rate", json={"overrides": ["interferometer.tau=1e999fs"]}
    )

    assert response.status_code == 400
    assert response.json()["error"] == "ParseError"


def test_scan_with_unitless_bound_is_rejected(client: TestClient) -> None:
    response = client.post(
        "/simulation/scan",
        json={"parameter": "tau", "start": "600", "stop": "700 fs", "steps": 3},
    )

    assert response.status_code == 400


def test_scan_request_schema_is_validated(client: TestClient) -> None:
    response = client.post(
        "/simulation/scan",
        json={"parameter": "wavelength", "start": "1 nm", "stop": "2 nm", "steps": 3},
    )

    assert response.status_code == 422


def test_identical_requests_are_served_from_cache(
    client: TestClient, monkeypatch: pytest.MonkeyPatch
) -> None:
    calls: list[object] = []
    original = simulation_router_module.check_report

    def counting_check_report(setup: object) -> dict[str, object]:
        calls.append(setup)
        return original(setup)

    monkeypatch.setattr(simulation_router_module, "check_report", counting_check_report)

    first = client.post("/simulation/check", json={"overrides": ["pump.n_pulses=3"]})
    second = client.post("/simulation/check", json={"overrides": ["pump.n_pulses=3"]})
    other = client.post("/simulation/check", json={"overrides": ["pump.n_pulses=4"]})

    assert first.json() == second.json()
    assert other.status_code == 200
    assert len(calls) == 2
