"""Smoke tests of the python bindings: module import, scenario validation,
the in-process subcommands, and the fitting/identity helpers."""

import json
import math
import pathlib
import tempfile

import pytest

import qsl_py

REPO = pathlib.Path(__file__).resolve().parent.parent
SCENARIO = str(REPO / "scenarios" / "reference.json")


def test_validate_scenario():
    rep = qsl_py.validate_scenario(SCENARIO)
    assert rep["problem_q"]["all_pass"]
    assert rep["problem_b"]["all_pass"]
    assert len(rep["problem_q"]["items"]) > 3


def test_parse_error_raises():
    with tempfile.NamedTemporaryFile("w", suffix=".json") as f:
        f.write("{ not json")
        f.flush()
        with pytest.raises(Exception):
            qsl_py.validate_scenario(f.name)


def test_laplace_monomial_defect():
    for k in (1, 2, 3):
        assert qsl_py.laplace_monomial_defect(3, k) < 1e-6


def test_euler_coeffs():
    # (T^{k+1} d)^2 expansion at k=1: single coefficient -(k+1) = -2
    assert qsl_py.euler_coeffs(2, 1) == ["-2"]
    assert qsl_py.euler_coeffs(1, 3) == []


def test_dirichlet_sum_value():
    direct = sum(
        0.9**j * math.exp(-j * j * math.log(2.0)) * math.exp(-0.5**j / 0.01)
        for j in range(200)
    )
    got = qsl_py.dirichlet_sum_value(0.9, 1.0, 1.0, 0.5, 2.0, 0.01)
    assert abs(got - direct) <= 1e-12 * direct


def test_fit_flatness_planted():
    q, kap, K, b0 = 2.0, 0.45, 1.2, -0.3
    eps = [0.05 * (1e-4 / 0.05) ** (i / 11.0) for i in range(12)]
    delta = [
        math.exp(b0 + K * math.log(e) - kap / (2 * math.log(q)) * math.log(e) ** 2)
        for e in eps
    ]
    rep = qsl_py.fit_flatness(eps, delta, q)
    assert rep["model"] == "q-gevrey"
    assert abs(rep["exponent"] - kap) < 1e-6 * kap


def test_cmd_validate_and_report(tmp_path):
    assert qsl_py.cmd_validate(SCENARIO, str(tmp_path)) == 0
    assert (tmp_path / "validate.json").exists()

    out_a, out_b = tmp_path / "a", tmp_path / "b"
    out_a.mkdir()
    out_b.mkdir()
    assert qsl_py.cmd_report(SCENARIO, str(out_a)) == 0
    assert qsl_py.cmd_report(SCENARIO, str(out_b)) == 0
    assert (out_a / "report.json").read_bytes() == (out_b / "report.json").read_bytes()
    rep = json.loads((out_a / "report.json").read_text())
    assert rep["all_pass"] is True
