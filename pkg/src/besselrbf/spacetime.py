"""
Causal time-space Bessel RBF wavelets.

A basis function centred at the space-time point ``(x_k, t_k)`` is the spatial
mode evaluated at the time-space distance and gated by the forward cone::

    phi_j(rhat_k) * H(c (t - t_k) - |x - x_k|),   rhat_k = sqrt(c^2 (t - t_k)^2 - |x - x_k|^2)

Coefficients follow the spatial formulas with the gate applied per quadrature
node. ``distance_mode="rhat_throughout"`` uses ``rhat`` in both the weight and
the Bessel argument; ``"as_printed_mixed"`` uses the spatial distance there
(still gated by the cone). The cone measure is not the measure under which
the modes are orthogonal, so :func:`st_project_oracle` is the reference for
quantitative work.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .domain import QuadratureRule, SpaceTimePoint, WaveContext, integrate, spacetime_dist_array, unit_sphere_area
from .errors import EmptyDomainError, NumericalFailure, RankDeficiencyWarning
from .series import WEIGHT_MODES
from .specfun import ZeroTable, bessel_j, bessel_zeros, order_for_dimension, power_bessel_j

__all__ = [
    "DISTANCE_MODES",
    "SpaceTimeBasis",
    "SpaceTimeExpansion",
    "st_basis_eval",
    "st_basis_matrix",
    "st_coeff_alpha0",
    "st_coeff_alpha",
    "st_expand",
    "st_reconstruct",
    "st_gram",
    "st_project_oracle",
]

DISTANCE_MODES = ("rhat_throughout", "as_printed_mixed")


@dataclass(frozen=True)
class SpaceTimeBasis:
    n: int
    R: float
    ctx: WaveContext
    centers: np.ndarray
    J: int
    weight_mode: str = "orthogonality_consistent"
    distance_mode: str = "rhat_throughout"
    zeros: Optional[ZeroTable] = None

    def __post_init__(self):
        nu = order_for_dimension(self.n)
        if not self.R > 0:
            raise ValueError("R must be positive")
        if int(self.J) < 1:
            raise ValueError("mode count J must be >= 1")
        if self.weight_mode not in WEIGHT_MODES:
            raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}")
        if self.distance_mode not in DISTANCE_MODES:
            raise ValueError(f"distance_mode must be one of {DISTANCE_MODES}")
        if isinstance(self.ctx, (int, float)):
            object.__setattr__(self, "ctx", WaveContext(float(self.ctx)))
        cs = self.centers
        if len(cs) and isinstance(cs[0], SpaceTimePoint):
            cs = [np.append(p.x, p.t) for p in cs]
        cs = np.asarray(cs, dtype=float).reshape(-1, self.n + 1)
        if len(cs) == 0:
            raise ValueError("at least one center is required")
        if len(np.unique(cs, axis=0)) != len(cs):
            raise ValueError("centers must be distinct space-time points")
        cs.setflags(write=False)
        object.__setattr__(self, "centers", cs)
        object.__setattr__(self, "J", int(self.J))
        zeros = self.zeros if self.zeros is not None else bessel_zeros(nu, self.J)
        if zeros.order != nu or len(zeros) < self.J:
            raise ValueError("zero table does not fit the basis")
        object.__setattr__(self, "zeros", zeros)

    @property
    def order(self) -> float:
        return self.n / 2.0 - 1.0

    @property
    def K(self) -> int:
        return len(self.centers)

    @property
    def c(self) -> float:
        return self.ctx.c

    @property
    def lambdas(self) -> np.ndarray:
        return np.asarray(self.zeros.zeros[: self.J])

    def apex(self, k: int) -> SpaceTimePoint:
        return SpaceTimePoint(self.centers[k, :-1], self.centers[k, -1])


@dataclass(frozen=True)
class SpaceTimeExpansion:
    basis: SpaceTimeBasis
    alpha0: float
    alpha: np.ndarray

    def __post_init__(self):
        a = np.array(self.alpha, dtype=float)
        if a.shape != (self.basis.J, self.basis.K):
            raise ValueError(f"alpha has shape {a.shape}, basis needs {(self.basis.J, self.basis.K)}")
        if not np.all(np.isfinite(a)) or not np.isfinite(self.alpha0):
            raise NumericalFailure("expansion coefficients must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)


def _st_points(p, n):
    if isinstance(p, SpaceTimePoint):
        return np.append(p.x, p.t)[None, :], True
    p = np.asarray(p, dtype=float)
    if p.ndim == 1:
        return p[None, :], True
    if p.shape[1] != n + 1:
        raise ValueError(f"space-time points need {n + 1} columns")
    return p, False


def _cone(basis, k_point, pts):
    n = basis.n
    return spacetime_dist_array(pts[:, :n], pts[:, n], k_point[:n], k_point[n], basis.c)


def st_basis_matrix(basis: SpaceTimeBasis, k: int, pts) -> np.ndarray:
    """Gated values of all modes of center ``k`` (0-based), shape ``(J, N)``."""
    pts, _ = _st_points(pts, basis.n)
    rhat, _, inside = _cone(basis, basis.centers[k], pts)
    p = 1.0 - basis.n / 2.0
    rows = [power_bessel_j(basis.order, p, lam / basis.R, rhat) for lam in basis.lambdas]
    return np.atleast_2d(np.array(rows)) * inside


def st_basis_eval(basis: SpaceTimeBasis, j: int, k: int, p):
    """``phi_j(rhat_k) H(c dt_k - r_k)`` with 1-based ``j`` and ``k``."""
    if not 1 <= j <= basis.J or not 1 <= k <= basis.K:
        raise IndexError(f"(j, k) = ({j}, {k}) outside the basis")
    pts, single = _st_points(p, basis.n)
    rhat, _, inside = _cone(basis, basis.centers[k - 1], pts)
    vals = power_bessel_j(basis.order, 1.0 - basis.n / 2.0, basis.lambdas[j - 1] / basis.R, rhat)
    vals = np.where(inside, vals, 0.0)
    return float(vals[0]) if single else vals


def _field_values(f, rule):
    return np.asarray(f(rule.nodes), dtype=float) if callable(f) else np.asarray(f, dtype=float)


def st_coeff_alpha0(f, basis: SpaceTimeBasis, base, rule: QuadratureRule) -> float:
    """
    ``2/((n+2) S_n R^(n+1)) int rhat^(n/2) f H`` with ``rhat`` and the gate
    taken relative to ``base``.
    """
    n, R = basis.n, basis.R
    base = np.append(base.x, base.t) if isinstance(base, SpaceTimePoint) else np.asarray(base, dtype=float)
    rhat, _, inside = _cone(basis, base, rule.nodes)
    if not np.any(inside):
        raise EmptyDomainError("no quadrature node lies inside the cone of the base point")
    fv = _field_values(f, rule)
    integral = integrate(np.where(inside, rhat ** (n / 2.0) * fv, 0.0), rule)
    return 2.0 / ((n + 2) * unit_sphere_area(n) * R ** (n + 1)) * integral


def _center_coeffs(fv, basis: SpaceTimeBasis, k: int, rule: QuadratureRule) -> np.ndarray:
    n, R, nu = basis.n, basis.R, basis.order
    rhat, r, inside = _cone(basis, basis.centers[k], rule.nodes)
    if not np.any(inside):
        raise EmptyDomainError(f"no quadrature node lies inside the cone of center {k + 1}")
    d = rhat if basis.distance_mode == "rhat_throughout" else np.where(inside, r, 0.0)
    lam = basis.lambdas
    jn2 = bessel_j(n / 2.0, lam) ** 2
    S = unit_sphere_area(n)
    if basis.weight_mode == "as_printed":
        p = n / 2.0
        pref = 2.0 / (S * R ** (n + 1) * jn2) * (lam / (2.0 * np.pi)) ** (1.0 - n / 2.0)
    else:
        p = 1.0 - n / 2.0
        pref = 2.0 / (S * R**2 * jn2)
    gated = np.where(inside, fv, 0.0)
    return np.array([pref[i] * integrate(power_bessel_j(nu, p, lj / R, d) * gated, rule)
                     for i, lj in enumerate(lam)])


def st_coeff_alpha(f, basis: SpaceTimeBasis, j: int, k: int, rule: QuadratureRule) -> float:
    """Gated coefficient ``alpha_jk`` (1-based) under the basis's weight and distance modes."""
    if not 1 <= j <= basis.J or not 1 <= k <= basis.K:
        raise IndexError(f"(j, k) = ({j}, {k}) outside the basis")
    return float(_center_coeffs(_field_values(f, rule), basis, k - 1, rule)[j - 1])


def st_expand(f, basis: SpaceTimeBasis, rules: Sequence[QuadratureRule], base=None,
              alpha0_rule: Optional[QuadratureRule] = None) -> SpaceTimeExpansion:
    """
    Coefficients of every center from its own cone rule.

    ``alpha_0`` is measured from ``base`` (default: centroid of the centers) over
    ``alpha0_rule`` (default: the first rule).
    """
    if len(rules) != basis.K:
        raise ValueError(f"expected {basis.K} rules, got {len(rules)}")
    alpha = np.column_stack([_center_coeffs(_field_values(f, rule), basis, k, rule)
                             for k, rule in enumerate(rules)])
    base = basis.centers.mean(axis=0) if base is None else base
    alpha0 = st_coeff_alpha0(f, basis, base, rules[0] if alpha0_rule is None else alpha0_rule)
    return SpaceTimeExpansion(basis, alpha0, alpha)


def st_reconstruct(exp: SpaceTimeExpansion, p, zeroth=None):
    """
    ``alpha_0 + sum_jk alpha_jk phi_j(rhat_k) H_k`` at one point or an ``(N, n+1)`` array.

    The constant term defaults to ``exp.alpha0`` in ``as_printed`` mode and to 0
    in ``orthogonality_consistent`` mode.
    """
    basis = exp.basis
    pts, single = _st_points(p, basis.n)
    if zeroth is None:
        zeroth = exp.alpha0 if basis.weight_mode == "as_printed" else 0.0
    total = np.full(len(pts), float(zeroth))
    for k in range(basis.K):
        coef = exp.alpha[:, k]
        nz = coef != 0
        if np.any(nz):
            total += coef[nz] @ st_basis_matrix(basis, k, pts)[nz]
    return float(total[0]) if single else total


def _design(basis, rule):
    return np.vstack([st_basis_matrix(basis, k, rule.nodes) for k in range(basis.K)])


def st_gram(basis: SpaceTimeBasis, rule: QuadratureRule) -> np.ndarray:
    """Inner products of the gated modes over a space-time rule (center-major order)."""
    phi = _design(basis, rule)
    return (phi * rule.weights) @ phi.T


def st_project_oracle(f, basis: SpaceTimeBasis, rule: QuadratureRule, svd_cutoff=1e-10) -> np.ndarray:
    """Least-squares coefficients of ``f`` over a space-time rule; ``(J, K)`` matrix."""
    if not 0 < svd_cutoff < 1:
        raise ValueError("svd_cutoff must lie in (0, 1)")
    phi = _design(basis, rule)
    G = (phi * rule.weights) @ phi.T
    b = phi @ (rule.weights * _field_values(f, rule))
    U, s, Vt = np.linalg.svd(G)
    keep = s > svd_cutoff * s[0]
    if not np.all(keep):
        warnings.warn(f"discarded {int(np.count_nonzero(~keep))} of {len(s)} singular values",
                      RankDeficiencyWarning, stacklevel=2)
    a = Vt[keep].T @ ((U[:, keep].T @ b) / s[keep])
    return a.reshape(basis.K, basis.J).T
