import math

import pytest

import allen_cahn as ac


def test_profile_constants():
    r = ac.profile()
    assert r["passed"]
    assert r["sigma_energy"] == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-9)
    assert r["gap"] == pytest.approx(1.5, rel=1e-4)


def test_config_defaults_and_rejection():
    c = ac.normalize_config({"geometry": "torus"})
    assert (c["n1"], c["n2"]) == (128, 64)
    with pytest.raises(ac.Rejected):
        ac.normalize_config({"method": "gradient"})
    with pytest.raises(ValueError):
        ac.normalize_config({"unknown": 1})


def test_torus_hypothesis_is_violated():
    g = ac.geometry({"geometry": "torus"}, True)
    assert g["hypothesis"] == "FAIL"
    assert g["nullity"] == 2


def test_circle_solve_report():
    r = ac.solve({"geometry": "circle", "n1": 256, "eps": 0.2, "method": "newton"})
    assert r["schema"] == "allen_cahn.solve_report"
    assert r["schema_version"] == ac.schema_version
    assert r["passed"]
    assert r["spectrum"]["m"] == 0 and r["spectrum"]["n"] == 2
    with pytest.raises(ac.Rejected):
        ac.solve({"geometry": "circle", "n1": 256, "eps": 0.05})


def test_empty_sweep():
    r = ac.sweep({"geometry": "circle"})
    assert r["passed"]
    assert r["csv"].count("\n") == 1


def test_acceptance_criterion_one():
    r = ac.criterion(1)
    assert r["pass"]
    assert r["line"].startswith("criterion 1: PASS")
