import math

import numpy as np
import pytest

from sl2r.errors import QuadratureFailure, RadiusOutOfRange
from sl2r.volumes import (
    ADAPTIVE_SIMPSON,
    QuadratureSpec,
    RadialCurve,
    ball_volume,
    ball_volume_mc_oracle,
    integrate_1d,
    integrate_2d,
    sector_volume,
)

SIMPSON = QuadratureSpec(rule=ADAPTIVE_SIMPSON, abs_tol=1e-10, rel_tol=1e-10)


@pytest.mark.parametrize("spec", [QuadratureSpec(), SIMPSON])
def test_integrate_1d_known(spec):
    assert integrate_1d(np.sin, 0.0, math.pi, spec) == pytest.approx(2.0, abs=1e-8)
    assert integrate_1d(np.sqrt, 0.0, 1.0, spec) == pytest.approx(2 / 3, abs=1e-7)
    assert integrate_1d(np.exp, 1.0, 1.0, spec) == 0.0


def test_integrate_2d_known():
    f = lambda x, y: np.exp(x) * np.cos(y)
    want = (math.e - 1) * math.sin(1.0)
    assert integrate_2d(f, (0, 1), (0, 1)) == pytest.approx(want, rel=1e-10)
    g = lambda x, y: np.sqrt(x + y)
    want = 4 / 15 * (2 ** 2.5 - 2)
    assert integrate_2d(g, (0, 1), (0, 1)) == pytest.approx(want, rel=1e-7)
    assert integrate_2d(g, (0, 1), (0, 1), SIMPSON) == pytest.approx(want, rel=1e-7)


def test_quadrature_failure_reports_estimate():
    spec = QuadratureSpec(max_subdivisions=2, abs_tol=1e-14, rel_tol=1e-14)
    with pytest.raises(QuadratureFailure) as info:
        integrate_1d(lambda x: np.abs(x - 0.3123) ** 0.5, 0.0, 1.0, spec)
    c = 0.3123
    exact = 2 / 3 * (c ** 1.5 + (1 - c) ** 1.5)
    assert info.value.estimate == pytest.approx(exact, abs=0.02)


def test_spec_validation_and_env(monkeypatch):
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(rule="trapezoid")
    monkeypatch.setenv("SL2R_QUAD_TOL", "1e-6")
    spec = QuadratureSpec.from_env()
    assert spec.abs_tol == spec.rel_tol == 1e-6
    assert QuadratureSpec.from_env(abs_tol=1e-3).abs_tol == 1e-3
    assert spec.key() != QuadratureSpec().key()


def test_ball_volume_edges():
    assert ball_volume(0.0) == 0.0
    with pytest.raises(RadiusOutOfRange):
        ball_volume(-0.1)
    with pytest.raises(RadiusOutOfRange):
        ball_volume(math.pi / 2)


def test_small_ball_is_euclidean():
    for rho in (0.01, 0.05):
        assert ball_volume(rho) / (4 / 3 * math.pi * rho ** 3) == pytest.approx(1.0, abs=2e-3)


def test_rules_agree():
    assert ball_volume(0.3, SIMPSON) == pytest.approx(ball_volume(0.3), rel=1e-7)


def test_mc_oracle_is_deterministic_and_consistent():
    a = ball_volume_mc_oracle(0.3, n_samples=30_000, seed=5, batch=10_000)
    b = ball_volume_mc_oracle(0.3, n_samples=30_000, seed=5, batch=10_000)
    assert a == b
    mean, se = a
    assert abs(mean - ball_volume(0.3)) < 4 * se


def test_sector_volume_constant_radius():
    r = 0.6
    curve = RadialCurve(0.0, 1.0, lambda th: np.full_like(th, r))
    assert sector_volume(curve, 0.5) == pytest.approx(0.5 * 0.25 * (math.cosh(2 * r) - 1))
    with pytest.raises(ValueError):
        sector_volume(curve, 0.0)
    with pytest.raises(ValueError):
        RadialCurve(1.0, 0.0, lambda th: th)
