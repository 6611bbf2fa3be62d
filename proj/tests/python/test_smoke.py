import math
import os
import subprocess

import pytest

import novas


def test_log_returns():
    r = novas.log_returns([100.0, 101.0, 99.0])
    assert r[0] == pytest.approx(0.99503308531680829, rel=1e-14)
    assert r[1] == pytest.approx(-2.0000666706669543, rel=1e-14)


def test_coefficients_on_simplex():
    c = novas.coefficients("ga", 0.2, 0.1, 3, a1=0.3, b1=0.5)
    assert c == pytest.approx([0.22068965517241379, 0.33103448275862069, 0.16551724137931034, 0.08275862068965517])
    assert 0.2 + sum(c) == pytest.approx(1.0, abs=1e-12)


def test_forward_transform_by_hand():
    w = novas.forward_transform([1.0, 2.0], "ge", 0.0, [0.5, 0.5])
    assert w == pytest.approx([2.0 / math.sqrt(2.5)])


def test_calibrate_and_forecast():
    y = novas.simulate(3, n=300, seed=4)
    t = novas.calibrate(y, "p-ga", 0.5, fast=True)
    assert t["alpha"] + sum(t["coefficients"]) == pytest.approx(1.0, abs=1e-12)
    assert t["coefficients"][0] == 0.0
    f = novas.forecast(y, "p-ga", 0.5, horizon=5, paths=200, seed=1, fast=True)
    assert len(f) == 5 and all(v > 0 for v in f)
    assert f == novas.forecast(y, "p-ga", 0.5, horizon=5, paths=200, seed=1, fast=True)


def test_calibration_failure_is_typed():
    y = novas.simulate(3, n=300, seed=4)
    with pytest.raises(novas.CalibrationError):
        novas.calibrate(y, "ga", 0.2, fast=True)


def test_garch_round_trip():
    y = novas.simulate(3, n=3000, seed=2)
    fit = novas.fit_garch(y)
    assert abs(fit["a1"] - 0.1) < 0.1
    f = novas.garch_forecast(fit["omega"], fit["a1"], fit["b1"], y[-1] ** 2, fit["sigma2"][-1], 3)
    assert f[0] == pytest.approx(fit["omega"] + fit["a1"] * y[-1] ** 2 + fit["b1"] * fit["sigma2"][-1])


def test_evaluate_normalizes_benchmark():
    y = novas.simulate(3, n=250, seed=5)[1:]
    rows = novas.evaluate(y, methods=["P-GA", "GARCH"], horizons=[1], paths=50, threads=1)
    garch = [r for r in rows if r["method"] == "GARCH"]
    assert garch[0]["relative"] == 1.0


def test_cw_degenerate():
    e = [math.sin(i) for i in range(30)]
    f = [1.0 + i for i in range(30)]
    with pytest.raises(novas.DegenerateTestError):
        novas.cw_test(e, e, f, f)


@pytest.mark.skipif("NOVAS_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_exit_codes():
    cli = os.environ["NOVAS_CLI"]
    assert subprocess.run([cli, "simulate", "--bogus"], capture_output=True).returncode == 2
    out = subprocess.run([cli, "simulate", "--model", "2", "--n", "20", "--seed", "1"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.startswith("index,return\n")
