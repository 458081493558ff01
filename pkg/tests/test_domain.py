import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from besselrbf import fields
from besselrbf.domain import (BallDomain, QuadratureRule, SpaceTimePoint, WaveContext, ball_rule, ball_volume,
                              choose_cutoff, cone_rule, dist, gauss_legendre, heaviside, integrate, mc_stderr,
                              philox, shell_rule, spacetime_dist, spacetime_dist_array, truncated_infinite_rule,
                              unit_sphere_area)
from besselrbf.errors import EmptyDomainError, NumericalFailure, OutsideConeError


def test_sphere_area_and_volume_examples():
    assert unit_sphere_area(1) == 2.0
    assert unit_sphere_area(2) == pytest.approx(2 * math.pi, rel=1e-15)
    assert unit_sphere_area(3) == pytest.approx(4 * math.pi, rel=1e-15)
    assert unit_sphere_area(4) == pytest.approx(2 * math.pi**2, rel=1e-15)
    assert ball_volume(3, 2.0) == pytest.approx(4 / 3 * math.pi * 8, rel=1e-15)


def test_dist_examples():
    assert dist([0.0, 0.0], [3.0, 4.0]) == 5.0
    assert np.allclose(dist(np.array([[0.0, 0.0], [1.0, 1.0]]), [1.0, 1.0]), [math.sqrt(2), 0.0])
    with pytest.raises(ValueError):
        dist([0.0, 0.0], [1.0, 2.0, 3.0])


def test_heaviside_closed_convention():
    assert heaviside(0.0) == 1.0
    assert heaviside(-1e-300) == 0.0
    assert np.array_equal(heaviside(np.array([-1.0, 0.0, 2.0])), [0.0, 1.0, 1.0])


def test_spacetime_dist_examples():
    ctx = WaveContext(2.0)
    k = SpaceTimePoint([0.0, 0.0], 0.0)
    assert spacetime_dist(SpaceTimePoint([0.6, 0.8], 1.0), k, ctx) == pytest.approx(math.sqrt(3.0), rel=1e-15)
    assert spacetime_dist(SpaceTimePoint([1.2, 1.6], 1.0), k, ctx) == 0.0
    with pytest.raises(OutsideConeError):
        spacetime_dist(SpaceTimePoint([3.0, 0.0], 1.0), k, ctx)
    with pytest.raises(ValueError):
        WaveContext(0.0)


@settings(max_examples=100, deadline=None)
@given(x=st.floats(-3, 3), t=st.floats(0, 5), c=st.floats(0.2, 5))
def test_rhat_pythagorean_identity(x, t, c):
    rhat, r, inside = spacetime_dist_array([[x]], [t], [0.0], 0.0, c)
    if inside[0]:
        assert rhat[0] ** 2 + r[0] ** 2 == pytest.approx((c * t) ** 2, rel=1e-12, abs=1e-300)
    else:
        assert rhat[0] == 0.0


def test_gauss_legendre_exactness():
    rule = gauss_legendre(10)
    for d in range(20):
        exact = 0.0 if d % 2 else 2.0 / (d + 1)
        assert integrate(lambda z: z[:, 0] ** d, rule) == pytest.approx(exact, abs=1e-14)
    with pytest.raises(ValueError):
        gauss_legendre(0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_ball_rule_measure_and_moments(n):
    R = 1.7
    rule = ball_rule(n, np.full(n, 0.3), R, radial_order=12)
    assert rule.total_weight == pytest.approx(ball_volume(n, R), rel=1e-12)
    # second moment of |x - c|^2 over the ball: S_n R^{n+2} / (n+2)
    m2 = integrate(lambda z: np.sum((z - 0.3) ** 2, axis=1), rule)
    assert m2 == pytest.approx(unit_sphere_area(n) * R ** (n + 2) / (n + 2), rel=1e-12)


def test_ball_rule_mc_directions_for_high_dimension():
    rule = ball_rule(5, np.zeros(5), 1.0, radial_order=10, angular="mc", samples=2000, seed=3)
    assert rule.is_monte_carlo
    assert rule.total_weight == pytest.approx(ball_volume(5, 1.0), rel=1e-12)
    x2 = lambda z: z[:, 0] ** 2
    est, se = integrate(x2, rule), mc_stderr(x2, rule)
    exact = unit_sphere_area(5) / 7 / 5
    assert abs(est - exact) < 5 * se
    again = ball_rule(5, np.zeros(5), 1.0, radial_order=10, angular="mc", samples=2000, seed=3)
    assert np.array_equal(rule.nodes, again.nodes)
    assert mc_stderr(x2, ball_rule(2, np.zeros(2), 1.0)) is None
    with pytest.raises(ValueError):
        ball_rule(4, np.zeros(4), 1.0)


def test_shell_rule_measure():
    rule = shell_rule(3, np.zeros(3), 1.0, 2.0, radial_order=8)
    assert rule.total_weight == pytest.approx(4 / 3 * math.pi * 7, rel=1e-12)


def test_philox_is_keyed():
    assert np.array_equal(philox(7).random(5), philox(7).random(5))
    assert not np.array_equal(philox(7).random(5), philox(8).random(5))


def test_integrate_worker_count_independence():
    g = fields.gaussian(np.zeros(2))
    rule = ball_rule(2, np.zeros(2), 3.0, radial_order=40)
    vals = [integrate(g, rule, workers=w) for w in (1, 2, 3, 7)]
    assert len(set(vals)) == 1


def test_integrate_rejects_non_finite():
    rule = gauss_legendre(4)
    with pytest.raises(NumericalFailure):
        with np.errstate(divide="ignore"):
            integrate(lambda z: 1.0 / (z[:, 0] - z[0, 0]), rule)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_truncated_infinite_gaussian(n):
    g = fields.gaussian(np.zeros(n))
    rule = truncated_infinite_rule(n, np.zeros(n), f=g, radial_order=64)
    assert rule.meta["R_cut"] >= 4
    assert integrate(g, rule) == pytest.approx(math.pi ** (n / 2), rel=1e-12)


def test_choose_cutoff_capped_for_slow_decay():
    slow = lambda z: 1.0 / (1.0 + np.sum(z**2, axis=1))
    assert choose_cutoff(slow, 1, np.zeros(1), cap=16.0) == 16.0


def test_quadrature_rule_validation():
    with pytest.raises(ValueError):
        QuadratureRule(np.zeros((3, 1)), np.ones(2))
    with pytest.raises(ValueError):
        BallDomain([0.0], 0.0)


def test_cone_rule_1d_volume():
    # apex at the ball centre: area of {|x| <= min(1, c t)}, t in [0, 2], c = 1 is 1 + 2 = 3
    rule = cone_rule(BallDomain([0.0], 1.0), (0.0, 2.0), SpaceTimePoint([0.0], 0.0), WaveContext(1.0),
                     time_order=16, space_order=16)
    assert rule.total_weight == pytest.approx(3.0, rel=1e-13)
    # off-centre apex x_k = 0.5: integral over t of |[-1,1] n [0.5 - t, 0.5 + t]|
    off = cone_rule(BallDomain([0.0], 1.0), (0.0, 2.0), SpaceTimePoint([0.5], 0.0), WaveContext(1.0),
                    time_order=16, space_order=16)
    exact = 0.25 + 1.5 + 1.0  # widths 2t, 0.5 + t, 2 on the three time pieces
    assert off.total_weight == pytest.approx(exact, rel=1e-13)


def test_cone_rule_3d_volume():
    # |x| <= min(R, c t): volume 4pi/3 [c^3 T^4/4 for t < R/c] + 4pi/3 R^3 (t1 - R/c)
    c, R, t1 = 2.0, 1.0, 1.5
    rule = cone_rule(BallDomain(np.zeros(3), R), (0.0, t1), SpaceTimePoint(np.zeros(3), 0.0), WaveContext(c),
                     time_order=12, space_order=12)
    tk = R / c
    exact = 4 * math.pi / 3 * (c**3 * tk**4 / 4 + R**3 * (t1 - tk))
    assert rule.total_weight == pytest.approx(exact, rel=1e-12)
    assert np.all(c * rule.nodes[:, -1] >= np.linalg.norm(rule.nodes[:, :3], axis=1) - 1e-12)


def test_cone_rule_mc_and_empty():
    ball = BallDomain([0.0, 0.0], 1.0)
    mc = cone_rule(ball, (0.0, 3.0), SpaceTimePoint([0.5, 0.0], 0.0), WaveContext(1.0), samples=20000, seed=1)
    assert mc.is_monte_carlo and mc.meta["method"] == "mc"
    again = cone_rule(ball, (0.0, 3.0), SpaceTimePoint([0.5, 0.0], 0.0), WaveContext(1.0), samples=20000, seed=1)
    assert np.array_equal(mc.nodes, again.nodes)
    with pytest.raises(EmptyDomainError):
        cone_rule(ball, (0.0, 1.0), SpaceTimePoint([5.0, 0.0], 0.0), WaveContext(1.0))
