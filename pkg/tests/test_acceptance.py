"""
Acceptance criteria, one test each. Every test prints a single
``[PASS]``/``[FAIL]`` line with the measured value against its bound; the
lines are repeated in the terminal summary.
"""
import time

import numpy as np
import pytest
from scipy.integrate import quad

from besselrbf import fields
from besselrbf.cli import main
from besselrbf.domain import (BallDomain, SpaceTimePoint, WaveContext, ball_rule, cone_rule, integrate,
                              spacetime_dist_array, truncated_infinite_rule)
from besselrbf.series import BesselRBFBasis, default_rule, expand, gram, l2_error, project_oracle, reconstruct
from besselrbf.spacetime import SpaceTimeBasis, SpaceTimeExpansion, st_basis_matrix, st_project_oracle, st_reconstruct
from besselrbf.specfun import bessel_j, bessel_j_asymptotic, bessel_zeros
from besselrbf.transform import calibrate_constant, center_grid, roundtrip_report, spectral_grid


def test_01_zero_spacing_limit(record):
    t0 = time.perf_counter()
    worst, monotone = 0.0, True
    for v in (-0.5, 0.0, 0.5, 1.0):
        z = bessel_zeros(v, 201).zeros
        dev = np.abs(np.diff(z) - np.pi)  # dev[j-1] = |lambda_{j+1} - lambda_j - pi|
        worst = max(worst, dev[99])
        monotone &= bool(np.all(np.diff(dev[49:200]) <= 1e-12))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-4 and monotone and elapsed < 1.0
    assert record("1 zero-spacing limit", ok,
                  f"max dev at j=100 {worst:.3e} <= 1e-4, non-increasing on [50,200] {monotone}, {elapsed:.2f}s < 1s")


def test_02_asymptotic_form(record):
    x = np.linspace(50, 100, 20001)
    gap0 = float(np.max(np.abs(bessel_j(0, x) - np.sqrt(2 / (np.pi * x)) * np.cos(x - np.pi / 4))))
    xh = np.linspace(0.1, 100, 20001)
    gaph = max(float(np.max(np.abs(bessel_j(v, xh) - bessel_j_asymptotic(v, xh)))) for v in (-0.5, 0.5))
    ok = gap0 <= 5e-4 and gaph <= 1e-12
    assert record("2 asymptotic form", ok, f"J_0 gap on [50,100] {gap0:.3e} <= 5e-4, half-order gap {gaph:.1e} <= 1e-12")


def test_03_cosine_equivalence(record):
    t0 = time.perf_counter()
    R, J = 1.5, 8
    b = BesselRBFBasis(1, R, [[0.0]], J)
    f = fields.radial(lambda r: np.cos(np.pi * r / (2 * R)), [0.0])
    rule = default_rule(b, [0.0])
    alpha = expand(f, b, [rule], alpha0_rule=rule).alpha[:, 0]
    # classical cosine series on [0, R] by adaptive quadrature, rescaled to the basis amplitude
    c = np.array([2 / R * quad(lambda r: np.cos(np.pi * r / (2 * R)) * np.cos(lam * r / R), 0, R,
                               epsabs=1e-13, limit=200)[0] for lam in b.lambdas])
    ref = c / np.sqrt(2 * R / (np.pi * b.lambdas))
    coef_err = float(np.max(np.abs(alpha - ref)))
    rec_err = l2_error(f, reconstruct(expand(f, b, [rule], alpha0_rule=rule), rule.nodes), rule)
    rel = rec_err / l2_error(f, fields.zero, rule)
    elapsed = time.perf_counter() - t0
    ok = coef_err <= 1e-10 and rel <= 1e-6 and elapsed < 5
    assert record("3 n=1 cosine equivalence", ok,
                  f"coefficient gap {coef_err:.2e} <= 1e-10, relative L2 error {rel:.2e} <= 1e-6, {elapsed:.2f}s < 5s")


def test_04_delta_and_gram(record):
    t0 = time.perf_counter()
    delta_err, gram_err = 0.0, 0.0
    for n in (1, 2, 3):
        for J in (1, 4, 8, 16):
            b = BesselRBFBasis(n, 1.0, np.zeros((1, n)), J)
            rule = default_rule(b, np.zeros(n))
            gram_err = max(gram_err, float(np.max(np.abs(gram(b, rule) - np.eye(J)))))
            for m in range(1, J + 1):
                a = expand(fields.cosine_mode(b, m), b, [rule], alpha0_rule=rule).alpha[:, 0]
                delta_err = max(delta_err, float(np.max(np.abs(a - np.eye(J)[m - 1]))))
    elapsed = time.perf_counter() - t0
    ok = delta_err <= 1e-6 and gram_err <= 1e-6 and elapsed < 60
    assert record("4 delta reproduction and Gram identity", ok,
                  f"max |alpha - delta| {delta_err:.2e}, max |G - I| {gram_err:.2e} (bound 1e-6), {elapsed:.1f}s < 60s")


def test_05_oracle_agreement(record):
    worst = 0.0
    for n in (1, 2, 3):
        b = BesselRBFBasis(n, 1.0, np.zeros((1, n)), 12)
        rule = default_rule(b, np.zeros(n))
        bump = fields.bump(np.zeros(n), 1.0)
        a = expand(bump, b, [rule], alpha0_rule=rule).alpha
        worst = max(worst, float(np.max(np.abs(a - project_oracle(bump, b, rule)))))
    bp = BesselRBFBasis(1, 1.0, [[0.0]], 8, weight_mode="as_printed")
    rule = default_rule(bp, [0.0])
    printed = 0.0
    for m in range(1, 9):
        a = expand(fields.cosine_mode(bp, m), bp, [rule], alpha0_rule=rule).alpha[:, 0]
        printed = max(printed, float(np.max(np.abs(a - np.eye(8)[m - 1] * np.sqrt(bp.lambdas / (2 * np.pi))))))
    ok = worst <= 1e-6 and printed <= 1e-8
    assert record("5 oracle agreement", ok,
                  f"consistent vs SVD oracle {worst:.2e} <= 1e-6; as-printed n=1 prediction gap {printed:.2e} <= 1e-8")


def test_06_convergence(record):
    t0 = time.perf_counter()
    ratios = []
    for n in (1, 2, 3):
        f = fields.damped_parabola(np.zeros(n), 1.0)
        errs = []
        for J in (4, 32):
            b = BesselRBFBasis(n, 1.0, np.zeros((1, n)), J)
            rule = default_rule(b, np.zeros(n))
            errs.append(l2_error(f, reconstruct(expand(f, b, [rule], alpha0_rule=rule), rule.nodes), rule))
        ratios.append(errs[1] / errs[0])
    elapsed = time.perf_counter() - t0
    ok = max(ratios) <= 0.1 and elapsed < 60
    assert record("6 convergence", ok,
                  "err(J=32)/err(J=4) = " + ", ".join(f"{r:.2e}" for r in ratios) + f" <= 0.1, {elapsed:.1f}s < 60s")


@pytest.fixture(scope="module")
def gaussian_setup():
    f = fields.gaussian(np.zeros(1))
    rule = truncated_infinite_rule(1, np.zeros(1), R_cut=8.0, radial_order=128)
    eval_rule = ball_rule(1, np.zeros(1), 4.0, radial_order=64)
    return f, rule, eval_rule


def test_07_transform_roundtrip(record, gaussian_setup):
    t0 = time.perf_counter()
    f, rule, eval_rule = gaussian_setup
    coarse = calibrate_constant(f, 1, spectral_grid(12.0, 96), center_grid(1, 8.0, 160), rule, eval_rule)
    fine = calibrate_constant(f, 1, spectral_grid(12.0, 192), center_grid(1, 8.0, 320), rule, eval_rule)
    elapsed = time.perf_counter() - t0
    modes = ", ".join(f"{m} {v['residual']:.4f}" for m, v in sorted(coarse.alternatives.items()))
    stable = fine.residual <= 1.1 * coarse.residual
    ok = coarse.residual <= 1e-2 and stable and elapsed < 120
    assert record("7 continuous transform round trip", ok,
                  f"best residual {coarse.residual:.4f} ({coarse.measure_mode}, C={coarse.constant:.6g}) <= 1e-2 "
                  f"[{modes}]; refined {fine.residual:.4f} within 10% {stable}; {elapsed:.1f}s < 120s")


def test_08_biorthogonal_report(record, gaussian_setup):
    f, rule, eval_rule = gaussian_setup
    args = (spectral_grid(12.0, 96), center_grid(1, 8.0, 160), rule, eval_rule)
    a = roundtrip_report(f, 1, *args).to_dict()
    b = roundtrip_report(f, 1, *args).to_dict()
    fine = roundtrip_report(f, 1, spectral_grid(12.0, 192), center_grid(1, 8.0, 320), rule, eval_rule).to_dict()
    best, best_fine = a["best"]["biorthogonal"], fine["best"]["biorthogonal"]
    generated = best is not None and best["constant"] is not None and best["residual"] is not None
    deterministic = a == b
    monotone = generated and best_fine is not None and best_fine["residual"] <= 1.1 * best["residual"]
    ok = generated and deterministic and monotone
    detail = (f"C_g={best['constant']:.6g}, residual {best['residual']:.4f} -> {best_fine['residual']:.4f} refined"
              if generated and best_fine else "no report")
    assert record("8 bi-orthogonal inverse report", ok,
                  f"{detail}; deterministic {deterministic}; within 10% band {monotone}")


def test_09_spacetime(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    x, t = rng.uniform(-2, 2, (2000, 1)), rng.uniform(0, 3, 2000)
    rhat, r, inside = spacetime_dist_array(x, t, [0.0], 0.0, 1.0)
    pyth = float(np.max(np.abs(rhat[inside] ** 2 + r[inside] ** 2 - t[inside] ** 2) / t[inside] ** 2))

    two = SpaceTimeBasis(1, 1.0, WaveContext(1.0), [[0.0, 0.0], [0.0, 5.0]], 4)
    alpha = rng.normal(size=(4, 2))
    pts = np.column_stack([rng.uniform(-1, 1, 200), rng.uniform(0, 4.5, 200)])
    base = st_reconstruct(SpaceTimeExpansion(two, 0.0, alpha), pts)
    pert = alpha.copy()
    pert[:, 1] += rng.normal(size=4) * 1e3
    causal = bool(np.array_equal(st_reconstruct(SpaceTimeExpansion(two, 0.0, pert), pts), base))

    b = SpaceTimeBasis(1, 1.0, WaveContext(1.0), [[0.0, 0.0]], 8)
    crule = cone_rule(BallDomain([0.0], 1.0), (0.0, 1.0), SpaceTimePoint([0.0], 0.0), WaveContext(1.0),
                      time_order=48, space_order=48)
    f = lambda z: st_basis_matrix(b, 0, z)[1]
    rec = st_reconstruct(SpaceTimeExpansion(b, 0.0, st_project_oracle(f, b, crule)), crule.nodes)
    fv = f(crule.nodes)
    rel = float(np.sqrt(integrate((fv - rec) ** 2, crule) / integrate(fv**2, crule)))
    elapsed = time.perf_counter() - t0
    ok = pyth <= 1e-12 and causal and rel <= 1e-3 and elapsed < 60
    assert record("9 space-time properties", ok,
                  f"Pythagorean gap {pyth:.1e} <= 1e-12, causality exact {causal}, oracle round trip {rel:.1e} <= 1e-3, "
                  f"{elapsed:.1f}s < 60s")


def test_10_reproducibility(record, tmp_path):
    cfg = tmp_path / "v.toml"
    cfg.write_text("")
    codes = [main(["verify", "--config", str(cfg), "--out", str(tmp_path / d), "--seed", "123", "--quiet"])
             for d in ("a", "b")]
    same_csv = (tmp_path / "a" / "verify.csv").read_bytes() == (tmp_path / "b" / "verify.csv").read_bytes()
    rules = [ball_rule(4, np.zeros(4), 1.0, radial_order=16, angular="mc", samples=3000, seed=99) for _ in range(2)]
    same_nodes = np.array_equal(rules[0].nodes, rules[1].nodes) and np.array_equal(rules[0].weights, rules[1].weights)
    g = fields.gaussian(np.zeros(4))
    vals = {integrate(g, rules[0], workers=w) for w in (1, 2, 4, 8)}
    ok = codes == [0, 0] and same_csv and same_nodes and len(vals) == 1
    assert record("10 reproducibility", ok,
                  f"verify exit codes {codes}, byte-identical CSV {same_csv}, MC rule bit-stable {same_nodes}, "
                  f"{len(vals)} distinct value(s) across 1/2/4/8 workers")
