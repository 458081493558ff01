"""
Desk-scale invariant battery.

Each check returns a measured value and the bound it must respect. The
battery is deterministic for a fixed seed. ``fault="zeros"`` swaps in a
perturbed zero table to exercise the failure path.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from . import fields
from .domain import (BallDomain, SpaceTimePoint, WaveContext, ball_rule, ball_volume, cone_rule,
                     integrate, spacetime_dist_array)
from .series import BesselRBFBasis, basis_matrix, default_rule, expand, gram, project_oracle
from .spacetime import SpaceTimeBasis, SpaceTimeExpansion, st_basis_matrix, st_project_oracle, st_reconstruct
from .specfun import ZeroTable, bessel_j, bessel_j_asymptotic, bessel_zeros
from .transform import center_grid, forward_bessel, spectral_grid, forward_grid

FAULTS = ("zeros",)


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    bound: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.measured) and self.measured <= self.bound)


def _faulty_zeros(v, count):
    good = bessel_zeros(v, count)
    z = np.asarray(good.zeros) * 1.001
    return ZeroTable(v, z, good.tolerance, np.abs(bessel_j(v, z)))


def run_checks(seed: int = 0, fault: Optional[str] = None) -> List[Check]:
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    zeros: Callable[[float, int], ZeroTable] = _faulty_zeros if fault == "zeros" else bessel_zeros
    out = []

    tables = {v: zeros(v, 201) for v in (-0.5, 0.0, 0.5, 1.0)}
    out.append(Check("zero_residual", max(float(t.residuals.max()) for t in tables.values()), 1e-12))
    out.append(Check("zero_spacing_limit_j100",
                     max(abs(t.zeros[100] - t.zeros[99] - np.pi) for t in tables.values()), 1e-4))
    inter = 0.0
    for v in (-0.5, 0.0, 0.5, 1.0):
        a, b = zeros(v, 101).zeros, zeros(v + 1.0, 100).zeros
        if not (np.all(a[:-1] < b) and np.all(b < a[1:])):
            inter = 1.0
    out.append(Check("zero_interleaving", inter, 0.0))

    x = np.linspace(0.1, 100, 2001)
    half = max(
        np.max(np.abs(bessel_j(0.5, x) - np.sqrt(2 / (np.pi * x)) * np.sin(x))),
        np.max(np.abs(bessel_j(-0.5, x) - np.sqrt(2 / (np.pi * x)) * np.cos(x))),
        np.max(np.abs(bessel_j_asymptotic(0.5, x) - bessel_j(0.5, x))),
    )
    out.append(Check("half_order_exactness", half, 1e-12))
    xa = np.linspace(50, 100, 2001)
    out.append(Check("asymptotic_J0_50_100",
                     float(np.max(np.abs(bessel_j(0, xa) - bessel_j_asymptotic(0, xa)))), 5e-4))

    meas = 0.0
    for n in (1, 2, 3):
        rule = ball_rule(n, np.zeros(n), 1.3, radial_order=8)
        meas = max(meas, abs(rule.total_weight / ball_volume(n, 1.3) - 1.0))
    out.append(Check("ball_rule_measure", meas, 1e-10))
    r1 = ball_rule(4, np.zeros(4), 1.0, radial_order=8, angular="mc", samples=512, seed=seed)
    r2 = ball_rule(4, np.zeros(4), 1.0, radial_order=8, angular="mc", samples=512, seed=seed)
    out.append(Check("mc_bit_stability", 0.0 if np.array_equal(r1.nodes, r2.nodes) else 1.0, 0.0))
    g = fields.gaussian(np.zeros(3))
    rule = ball_rule(3, np.zeros(3), 1.0, radial_order=16, angular_order=8)
    w1, w4 = integrate(g, rule, workers=1), integrate(g, rule, workers=4)
    out.append(Check("integrate_worker_independence", abs(w1 - w4), 0.0))

    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, (256, 2))
    ts = rng.uniform(0, 3, 256)
    rhat, r, inside = spacetime_dist_array(pts, ts, np.zeros(2), 0.0, 1.5)
    lhs = rhat[inside] ** 2 + r[inside] ** 2
    rhs = (1.5 * ts[inside]) ** 2
    out.append(Check("rhat_pythagorean", float(np.max(np.abs(lhs - rhs) / rhs)), 1e-12))

    gram_err, delta_err, oracle_err = 0.0, 0.0, 0.0
    for n in (1, 2, 3):
        basis = BesselRBFBasis(n, 1.0, np.zeros((1, n)), 8, zeros=zeros(n / 2 - 1, 8))
        rule = default_rule(basis, np.zeros(n))
        gram_err = max(gram_err, float(np.max(np.abs(gram(basis, rule) - np.eye(8)))))
        for m in (1, 4, 8):
            e = expand(lambda z: basis_matrix(basis, 0, z)[m - 1], basis, [rule], alpha0_rule=rule)
            delta = np.zeros(8)
            delta[m - 1] = 1.0
            delta_err = max(delta_err, float(np.max(np.abs(e.alpha[:, 0] - delta))))
        bump = fields.bump(np.zeros(n), 1.0)
        oracle_err = max(oracle_err, float(np.max(np.abs(
            expand(bump, basis, [rule], alpha0_rule=rule).alpha - project_oracle(bump, basis, rule)))))
    out.append(Check("gram_identity", gram_err, 1e-6))
    out.append(Check("delta_reproduction", delta_err, 1e-6))
    out.append(Check("oracle_agreement", oracle_err, 1e-6))

    gauss = fields.gaussian(np.zeros(1))
    rule = ball_rule(1, np.zeros(1), 8.0, radial_order=96)
    lam = np.array([0.5, 2.0, 6.0])
    closed = np.sqrt(2 / (np.pi * lam)) * np.sqrt(np.pi) * np.exp(-lam**2 / 4)
    got = np.array([forward_bessel(gauss, 1, l, [0.0], rule) for l in lam])
    out.append(Check("forward_gaussian_closed_form", float(np.max(np.abs(got - closed))), 1e-6))
    sg, cg = spectral_grid(6.0, 12), center_grid(1, 4.0, 16)
    a = forward_grid(lambda z: 2 * gauss(z) + fields.bump(0.0, 2.0)(z), 1, sg, cg, rule).F
    b = 2 * forward_grid(gauss, 1, sg, cg, rule).F + forward_grid(fields.bump(0.0, 2.0), 1, sg, cg, rule).F
    out.append(Check("forward_linearity", float(np.max(np.abs(a - b)) / np.max(np.abs(b))), 1e-12))

    stb = SpaceTimeBasis(1, 1.0, WaveContext(1.0), [[0.0, 0.0]], 6, zeros=zeros(-0.5, 6))
    crule = cone_rule(BallDomain([0.0], 1.0), (0.0, 1.0), SpaceTimePoint([0.0], 0.0), WaveContext(1.0),
                      time_order=32, space_order=32)
    f = lambda z: st_basis_matrix(stb, 0, z)[1]
    coef = st_project_oracle(f, stb, crule)
    fv = f(crule.nodes)
    rec = st_reconstruct(SpaceTimeExpansion(stb, 0.0, coef), crule.nodes)
    rel = np.sqrt(np.sum(crule.weights * (fv - rec) ** 2) / np.sum(crule.weights * fv**2))
    out.append(Check("spacetime_oracle_roundtrip", float(rel), 1e-3))
    two = SpaceTimeBasis(1, 1.0, WaveContext(1.0), [[0.0, 0.0], [0.0, 5.0]], 3, zeros=zeros(-0.5, 3))
    alpha = np.arange(1.0, 7.0).reshape(3, 2)
    p = SpaceTimePoint([0.2], 1.0)
    base = st_reconstruct(SpaceTimeExpansion(two, 0.0, alpha), p)
    alpha2 = alpha.copy()
    alpha2[:, 1] = -99.0
    out.append(Check("spacetime_causality", abs(st_reconstruct(SpaceTimeExpansion(two, 0.0, alpha2), p) - base), 0.0))
    return out
