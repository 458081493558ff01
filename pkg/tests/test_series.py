import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from besselrbf import fields
from besselrbf.domain import ball_rule, gauss_legendre
from besselrbf.errors import MissingZerothTermError, RankDeficiencyWarning
from besselrbf.series import (BesselRBFBasis, Expansion, basis_eval, basis_matrix, coeff_alpha, coeff_alpha0,
                              default_rule, expand, gram, l2_error, mode_norm_sq, project_oracle, reconstruct,
                              reconstruct_zeroth)
from besselrbf.specfun import bessel_zeros

from conftest import series_j


def basis(n, J=8, R=1.0, mode="orthogonality_consistent", centers=None):
    return BesselRBFBasis(n, R, np.zeros((1, n)) if centers is None else centers, J, weight_mode=mode)


def test_basis_construction_errors():
    with pytest.raises(ValueError):
        BesselRBFBasis(1, 1.0, [[0.0], [0.0]], 4)
    with pytest.raises(ValueError):
        BesselRBFBasis(1, 1.0, [[0.0]], 4, weight_mode="nope")
    with pytest.raises(ValueError):
        BesselRBFBasis(1, 1.0, [[0.0]], 4, zeros=bessel_zeros(0.0, 4))
    with pytest.raises(ValueError):
        BesselRBFBasis(1, -1.0, [[0.0]], 4)
    assert basis(2, J=5).lambdas.shape == (5,)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_basis_vanishes_on_boundary(n):
    b = basis(n, J=6, R=1.3)
    for j in range(1, 7):
        assert abs(basis_eval(b, j, 1.3)) < 1e-14
    with pytest.raises(IndexError):
        basis_eval(b, 7, 0.5)


def test_basis_n1_is_cosine():
    b = basis(1, J=5, R=2.0)
    r = np.linspace(0, 2, 41)
    for j, lam in enumerate(b.lambdas, start=1):
        assert np.allclose(basis_eval(b, j, r), np.sqrt(2 * 2.0 / (np.pi * lam)) * np.cos(lam * r / 2.0),
                           rtol=0, atol=1e-14)


def test_basis_n3_is_sinc_with_series_limit():
    b = basis(3, J=3)
    lam = b.lambdas[0]
    r = np.linspace(0.01, 1, 30)
    assert np.allclose(basis_eval(b, 1, r), np.sqrt(2 / (np.pi * lam)) * np.sin(lam * r) / r, rtol=1e-12)
    # r^{-1/2} J_{1/2}(lam r) at r -> 0 from the power series
    eps = 1e-6
    assert basis_eval(b, 1, 0.0) == pytest.approx(eps**-0.5 * series_j(0.5, lam * eps), rel=1e-9)


def test_basis_n2_matches_power_series():
    b = basis(2, J=4)
    for j, lam in enumerate(b.lambdas, start=1):
        r = np.linspace(0, 1, 11)
        assert np.allclose(basis_eval(b, j, r), [series_j(0, lam * x) for x in r], rtol=0, atol=1e-12)


def test_coeff_alpha0_examples():
    b = basis(1, J=2)
    rule = default_rule(b, [0.0], radial_order=400)
    one = lambda z: np.ones(len(z))
    # the r^{1/2} endpoint singularity limits Gauss-Legendre to algebraic convergence
    assert coeff_alpha0(one, b, [0.0], rule) == pytest.approx(4 / 9, abs=1e-7)
    assert quad(lambda r: 2 * np.sqrt(r), 0, 1)[0] / 3 == pytest.approx(4 / 9, abs=1e-13)
    assert coeff_alpha0(fields.zero, b, [0.0], rule) == 0.0
    g = fields.gaussian([0.0])
    assert coeff_alpha0(lambda z: 2 * g(z), b, [0.0], rule) == pytest.approx(2 * coeff_alpha0(g, b, [0.0], rule),
                                                                          rel=1e-15)


def test_reconstruct_zeroth_examples():
    b = basis(1, J=2)
    rule = default_rule(b, [0.0], radial_order=400)
    one = lambda z: np.ones(len(z))
    assert reconstruct_zeroth(one, b, [0.0], rule) == pytest.approx(2 / 3, abs=1e-7)
    assert reconstruct_zeroth(fields.zero, b, [0.0], rule) == 0.0
    for n in (1, 2, 3):
        bn = basis(n, J=2)
        x = np.full(n, 0.2)
        r = default_rule(bn, x)
        g = fields.gaussian(np.zeros(n))
        assert reconstruct_zeroth(g, bn, x, r) == pytest.approx((n + 2) / 2 * coeff_alpha0(g, bn, x, r), rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_delta_reproduction_and_oracle(n):
    b = basis(n, J=16)
    rule = default_rule(b, np.zeros(n))
    for m in (1, 5, 16):
        f = fields.cosine_mode(b, m)
        delta = np.eye(16)[m - 1]
        assert np.max(np.abs(expand(f, b, [rule], alpha0_rule=rule).alpha[:, 0] - delta)) <= 1e-8
        assert np.max(np.abs(project_oracle(f, b, rule)[:, 0] - delta)) <= 1e-8


def test_coeff_alpha_indexing():
    b = basis(1, J=4)
    rule = default_rule(b, [0.0])
    f = fields.cosine_mode(b, 2)
    assert coeff_alpha(f, b, 2, 1, rule) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(IndexError):
        coeff_alpha(f, b, 5, 1, rule)


def test_as_printed_n1_prediction():
    b = basis(1, J=8, mode="as_printed")
    rule = default_rule(b, [0.0])
    for m in (1, 3, 8):
        e = expand(fields.cosine_mode(b, m), b, [rule], alpha0_rule=rule)
        pred = np.eye(8)[m - 1] * np.sqrt(b.lambdas / (2 * np.pi))
        assert np.max(np.abs(e.alpha[:, 0] - pred)) <= 1e-8
    with pytest.raises(MissingZerothTermError):
        reconstruct(e, 0.3)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gram_identity(n):
    b = basis(n, J=16)
    G = gram(b, default_rule(b, np.zeros(n)))
    assert np.max(np.abs(G - np.eye(16))) <= 1e-8


def test_mode_norms_against_closed_forms():
    # n = 3: phi_j = sqrt(2/(pi lam)) sin(lam r)/r on the unit ball, so |phi_j|^2 = 4 pi (2/(pi lam)) (1/2)
    b = basis(3, J=6)
    assert np.allclose(mode_norm_sq(b), 4 / b.lambdas, rtol=1e-13)
    # n = 2: 2 pi int_0^1 r J_0(lam r)^2 dr by adaptive quadrature on the power series
    b2 = basis(2, J=3)
    ref = [2 * np.pi * quad(lambda r: r * series_j(0, lam * r) ** 2, 0, 1, epsabs=1e-14)[0] for lam in b2.lambdas]
    assert np.allclose(mode_norm_sq(b2), ref, rtol=1e-10)


def test_gram_two_centers_symmetric():
    b = basis(2, J=4, centers=np.array([[0.0, 0.0], [0.5, 0.0]]))
    rule = ball_rule(2, [0.25, 0.0], 1.6, radial_order=96, angular_order=128)
    G = gram(b, rule, normalized=False)
    assert G.shape == (8, 8)
    assert np.allclose(G, G.T, rtol=0, atol=1e-14)


def test_project_oracle_zero_and_rank_report():
    b = basis(1, J=4)
    rule = default_rule(b, [0.0])
    assert np.all(project_oracle(fields.zero, b, rule) == 0.0)
    coarse = gauss_legendre(3)
    with pytest.warns(RankDeficiencyWarning):
        project_oracle(lambda z: np.ones(len(z)), b, coarse)
    with pytest.raises(ValueError):
        project_oracle(fields.zero, b, rule, svd_cutoff=0.0)


def test_expand_linearity_and_shape():
    b = basis(2, J=6)
    rule = default_rule(b, np.zeros(2))
    f, g = fields.bump(np.zeros(2)), fields.damped_parabola(np.zeros(2))
    ef, eg = expand(f, b, [rule], alpha0_rule=rule), expand(g, b, [rule], alpha0_rule=rule)
    efg = expand(lambda z: 3 * f(z) + g(z), b, [rule], alpha0_rule=rule)
    assert efg.alpha.shape == (6, 1)
    assert np.allclose(efg.alpha, 3 * ef.alpha + eg.alpha, rtol=1e-10, atol=1e-14)
    ez = expand(fields.zero, b, [rule], alpha0_rule=rule)
    assert np.all(ez.alpha == 0) and ez.alpha0 == 0


def test_reconstruct_examples():
    b = basis(1, J=4)
    e = Expansion(b, 0.0, np.zeros((4, 1)))
    assert reconstruct(e, 0.4, zeroth=0.0) == 0.0
    rule = default_rule(b, [0.0])
    f = fields.cosine_mode(b, 3)
    rec = reconstruct(expand(f, b, [rule], alpha0_rule=rule), rule.nodes)
    assert np.max(np.abs(rec - f(rule.nodes))) <= 1e-6
    with pytest.raises(ValueError):
        Expansion(b, 0.0, np.zeros((3, 1)))


def test_l2_error_examples():
    rule = ball_rule(1, [np.pi / 2], np.pi / 2, radial_order=40)
    sin = lambda z: np.sin(z[:, 0])
    cos = lambda z: np.cos(z[:, 0])
    assert l2_error(sin, cos, rule) == pytest.approx(math.sqrt(math.pi), abs=1e-8)
    assert l2_error(sin, sin, rule) == 0.0
    assert l2_error(sin, fields.zero, rule) == pytest.approx(math.sqrt(math.pi / 2), abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_convergence_in_mode_count(n):
    f = fields.damped_parabola(np.zeros(n), 1.0)
    errs = []
    for J in (4, 32):
        b = basis(n, J=J)
        rule = default_rule(b, np.zeros(n))
        errs.append(l2_error(f, reconstruct(expand(f, b, [rule], alpha0_rule=rule), rule.nodes), rule))
    assert errs[1] <= errs[0] / 10
