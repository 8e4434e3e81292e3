import json

import pytest
from fastapi.testclient import TestClient

from toricflip.germs import SparsePoly, f_germ, germ_to_dict, xy_t_germ
from toricflip.service import app

client = TestClient(app)


def test_health():
    assert client.get("/health").json() == {"status": "ok"}


def test_classify_endpoint():
    resp = client.post("/classify", json=germ_to_dict(xy_t_germ(5, 2)))
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["case"] == "2.7.2"
    assert payload["index"] == 5
    assert payload["params"] == {"a": 2}


def test_classify_round_trip():
    descriptor = germ_to_dict(xy_t_germ(7, 3))
    echoed = client.post("/classify", json=descriptor).json()["germ"]
    assert echoed == descriptor


def test_blowup_endpoint():
    resp = client.post(
        "/blowup", json={"germ": germ_to_dict(xy_t_germ(5, 2))}
    )
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["discrepancy"] == "1/5"
    assert payload["fiber_mult"] == 1
    assert len(payload["children"]) == 2


def test_blowup_with_weights():
    resp = client.post(
        "/blowup",
        json={
            "germ": germ_to_dict(xy_t_germ(5, 2)),
            "weights": ["2/5", "3/5", "1/5", "1"],
        },
    )
    assert resp.status_code == 200
    assert resp.json()["discrepancy"] == "1/5"


def test_resolve_endpoint():
    resp = client.post("/resolve", json=germ_to_dict(xy_t_germ(5, 2)))
    assert resp.status_code == 200
    assert resp.json()["blowups"] == 4


def test_resolve_dot_endpoint():
    resp = client.post("/resolve.dot", json=germ_to_dict(xy_t_germ(5, 2)))
    assert resp.status_code == 200
    assert resp.text.startswith("digraph")


def test_reduce_endpoint():
    germ = f_germ(3, 1, SparsePoly.from_dict({(2, 0): 1, (0, 3): -1}))
    resp = client.post("/reduce", json=germ_to_dict(germ))
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["d"] == 2
    assert payload["orders"] == [3, 3]
    assert all(payload["certificates"].values())


def test_hj_endpoint():
    resp = client.get("/hj", params={"r": 5, "a": 2})
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["expansion"] == [3, 2]
    assert payload["self_intersections"] == [-3, -2]
    assert abs(payload["chain_determinant"]) == 5


def test_scan_endpoint_deterministic():
    a = client.get("/scan", params={"max_r": 6}).json()
    b = client.get("/scan", params={"max_r": 6}).json()
    assert a == b
    assert all(row["disc_positive"] for row in a["rows"])


def test_domain_error_is_400():
    resp = client.get("/hj", params={"r": 4, "a": 2})
    assert resp.status_code == 400
    assert resp.json()["error"] == "ExactLatticeError"


def test_validation_error_is_422():
    resp = client.post("/classify", json={"family": "xy_t"})
    assert resp.status_code == 422


def test_germ_invariant_violation_is_400():
    bad = germ_to_dict(xy_t_germ(5, 2))
    bad["weights"] = [2, 2, 1, 0]  # gcd(a, r) violation
    resp = client.post("/classify", json=bad)
    assert resp.status_code == 400
