"""
Orthonormal Bessel RBF series on n-balls.

Basis functions are the nonsingular Helmholtz solutions

    phi_j(r) = r**(1 - n/2) * J_{n/2-1}(lambda_j r / R),

with ``lambda_j`` the positive zeros of ``J_{n/2-1}``, centred at points
``x_k``. Two coefficient conventions are offered:

``as_printed``
    weight ``r**(n/2)``, prefactor ``2 / (S_n R**(n+1) J_{n/2}(lambda_j)**2)``
    and the extra factor ``(lambda_j / 2 pi)**(1 - n/2)``, plus an
    ``alpha_0`` term and an x-dependent zeroth term in the reconstruction.
``orthogonality_consistent``
    weight ``r**(1 - n/2)`` and prefactor ``2 / (S_n R**2 J_{n/2}(lambda_j)**2)``;
    this is exactly the L2 projection onto ``phi_j`` on ``B(x_k, R)``.

The two agree in weight at n = 1 and differ there only by
``(lambda_j / 2 pi)**(1/2)``. :func:`project_oracle` computes the true
least-squares coefficients independently of either formula.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .domain import QuadratureRule, ball_rule, dist, integrate, unit_sphere_area
from .errors import MissingZerothTermError, NumericalFailure, RankDeficiencyWarning
from .specfun import ZeroTable, bessel_j, bessel_zeros, order_for_dimension, power_bessel_j

__all__ = [
    "WEIGHT_MODES",
    "BesselRBFBasis",
    "Expansion",
    "basis_eval",
    "basis_matrix",
    "mode_norm_sq",
    "default_rule",
    "coeff_alpha0",
    "coeff_alpha",
    "expand",
    "reconstruct_zeroth",
    "reconstruct",
    "gram",
    "project_oracle",
    "l2_error",
]

WEIGHT_MODES = ("as_printed", "orthogonality_consistent")


@dataclass(frozen=True)
class BesselRBFBasis:
    """
    Bessel RBF basis on ``B(x_k, R)`` for ``k = 1..K`` with ``J`` radial modes.

    ``zeros`` is computed on construction when omitted.
    """

    n: int
    R: float
    centers: np.ndarray
    J: int
    weight_mode: str = "orthogonality_consistent"
    zeros: Optional[ZeroTable] = None

    def __post_init__(self):
        nu = order_for_dimension(self.n)
        if not self.R > 0:
            raise ValueError("R must be positive")
        if int(self.J) < 1:
            raise ValueError("mode count J must be >= 1")
        if self.weight_mode not in WEIGHT_MODES:
            raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}")
        centers = np.asarray(self.centers, dtype=float).reshape(-1, self.n)
        if len(centers) == 0:
            raise ValueError("at least one center is required")
        if len(centers) > 1:
            d = dist(centers[:, None, :], centers[None, :, :])
            if np.any(d[np.triu_indices(len(centers), 1)] == 0):
                raise ValueError("centers must be pairwise distinct")
        centers.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "J", int(self.J))
        zeros = self.zeros if self.zeros is not None else bessel_zeros(nu, self.J)
        if zeros.order != nu:
            raise ValueError(f"zero table is for order {zeros.order}, basis needs {nu}")
        if len(zeros) < self.J:
            raise ValueError("zero table shorter than the mode count")
        object.__setattr__(self, "zeros", zeros)

    @property
    def order(self) -> float:
        return self.n / 2.0 - 1.0

    @property
    def K(self) -> int:
        return len(self.centers)

    @property
    def lambdas(self) -> np.ndarray:
        return np.asarray(self.zeros.zeros[: self.J])


@dataclass(frozen=True)
class Expansion:
    basis: BesselRBFBasis
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


def basis_eval(basis: BesselRBFBasis, j: int, r):
    """``r**(1-n/2) J_nu(lambda_j r / R)`` with its finite limit at ``r = 0``; ``j`` is 1-based."""
    if not 1 <= j <= basis.J:
        raise IndexError(f"mode index {j} outside 1..{basis.J}")
    lam = basis.lambdas[j - 1]
    return power_bessel_j(basis.order, 1.0 - basis.n / 2.0, lam / basis.R, r)


def basis_matrix(basis: BesselRBFBasis, k: int, points) -> np.ndarray:
    """Values of all ``J`` modes of center ``k`` (0-based) at ``points``, shape ``(J, N)``."""
    r = np.atleast_1d(dist(np.atleast_2d(points), basis.centers[k]))
    return np.array([basis_eval(basis, j, r) for j in range(1, basis.J + 1)])


def mode_norm_sq(basis: BesselRBFBasis) -> np.ndarray:
    """Squared L2 norms ``S_n R^2 J_{n/2}(lambda_j)^2 / 2`` of the modes on ``B(x_k, R)``."""
    jn = bessel_j(basis.n / 2.0, basis.lambdas)
    return unit_sphere_area(basis.n) * basis.R**2 * jn**2 / 2.0


def default_rule(basis: BesselRBFBasis, center, radius=None, **kw) -> QuadratureRule:
    """Ball rule fine enough to resolve products of the basis's highest modes."""
    kw.setdefault("radial_order", min(512, 64 + 4 * basis.J))
    return ball_rule(basis.n, center, basis.R if radius is None else radius, **kw)


def _field_values(f, rule):
    return np.asarray(f(rule.nodes), dtype=float) if callable(f) else np.asarray(f, dtype=float)


def coeff_alpha0(f, basis: BesselRBFBasis, base_point, rule: QuadratureRule) -> float:
    """``2 / ((n+2) S_n R^(n+1)) * int |zeta - base|^(n/2) f(zeta) dzeta`` over ``rule``."""
    n, R = basis.n, basis.R
    r = np.atleast_1d(dist(rule.nodes, np.atleast_1d(base_point)))
    fv = _field_values(f, rule)
    integral = integrate(r ** (n / 2.0) * fv, rule)
    return 2.0 / ((n + 2) * unit_sphere_area(n) * R ** (n + 1)) * integral


def _center_coeffs(fv, basis: BesselRBFBasis, k: int, rule: QuadratureRule) -> np.ndarray:
    n, R, nu = basis.n, basis.R, basis.order
    lam = basis.lambdas
    r = np.atleast_1d(dist(rule.nodes, basis.centers[k]))
    jn2 = bessel_j(n / 2.0, lam) ** 2
    S = unit_sphere_area(n)
    if basis.weight_mode == "as_printed":
        p = n / 2.0
        pref = 2.0 / (S * R ** (n + 1) * jn2) * (lam / (2.0 * np.pi)) ** (1.0 - n / 2.0)
    else:
        p = 1.0 - n / 2.0
        pref = 2.0 / (S * R**2 * jn2)
    out = np.empty(basis.J)
    for i, lj in enumerate(lam):
        try:
            out[i] = pref[i] * integrate(power_bessel_j(nu, p, lj / R, r) * fv, rule)
        except NumericalFailure as exc:
            raise NumericalFailure(f"coefficient (j={i + 1}, k={k + 1}): {exc}") from exc
    return out


def coeff_alpha(f, basis: BesselRBFBasis, j: int, k: int, rule: QuadratureRule) -> float:
    """Coefficient ``alpha_jk`` (``j`` and ``k`` 1-based) under the basis's weight mode."""
    if not 1 <= j <= basis.J or not 1 <= k <= basis.K:
        raise IndexError(f"(j, k) = ({j}, {k}) outside the basis")
    return float(_center_coeffs(_field_values(f, rule), basis, k - 1, rule)[j - 1])


def expand(f, basis: BesselRBFBasis, rules: Optional[Sequence[QuadratureRule]] = None,
           base_point=None, alpha0_rule: Optional[QuadratureRule] = None) -> Expansion:
    """
    Compute ``alpha_0`` and every ``alpha_jk``, each center over its own ball.

    ``rules`` defaults to :func:`default_rule` around each center; ``alpha_0``
    is measured from ``base_point`` (default: centroid of the centers).

    Overlapping center balls are not orthogonal to each other; summing the
    per-center expansions double counts there. Use :func:`project_oracle` for
    multi-center least-squares coefficients.
    """
    if rules is None:
        rules = [default_rule(basis, xk) for xk in basis.centers]
    if len(rules) != basis.K:
        raise ValueError(f"expected {basis.K} rules, got {len(rules)}")
    alpha = np.column_stack(
        [_center_coeffs(_field_values(f, rule), basis, k, rule) for k, rule in enumerate(rules)]
    )
    if base_point is None:
        base_point = basis.centers.mean(axis=0)
    if alpha0_rule is None:
        alpha0_rule = default_rule(basis, base_point)
    alpha0 = coeff_alpha0(f, basis, base_point, alpha0_rule)
    return Expansion(basis, alpha0, alpha)


def reconstruct_zeroth(f, basis: BesselRBFBasis, x, rule: Optional[QuadratureRule] = None) -> float:
    """x-dependent zeroth term ``1/(S_n R^(n+1)) int |x - zeta|^(n/2) f(zeta) dzeta`` over ``B(x, R)``."""
    n, R = basis.n, basis.R
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if rule is None:
        rule = default_rule(basis, x)
    r = np.atleast_1d(dist(rule.nodes, x))
    return integrate(r ** (n / 2.0) * _field_values(f, rule), rule) / (unit_sphere_area(n) * R ** (n + 1))


def reconstruct(exp: Expansion, x, zeroth=None):
    """
    Evaluate ``zeroth + sum_jk alpha_jk phi_j(|x - x_k|)`` at one point or an ``(N, n)`` array.

    In ``as_printed`` mode ``zeroth`` (from :func:`reconstruct_zeroth`) is required.
    """
    basis = exp.basis
    if zeroth is None:
        if basis.weight_mode == "as_printed":
            raise MissingZerothTermError("as_printed reconstruction needs the zeroth term")
        zeroth = 0.0
    x = np.asarray(x, dtype=float)
    pts = np.atleast_2d(x) if x.ndim > 1 or basis.n > 1 else x.reshape(-1, 1)
    total = np.zeros(len(pts))
    for k in range(basis.K):
        total += exp.alpha[:, k] @ basis_matrix(basis, k, pts)
    total = total + zeroth
    single = x.ndim == 0 or (x.ndim == 1 and basis.n > 1)
    return float(total[0]) if single else total


def _design(basis: BesselRBFBasis, rule: QuadratureRule) -> np.ndarray:
    return np.vstack([basis_matrix(basis, k, rule.nodes) for k in range(basis.K)])


def gram(basis: BesselRBFBasis, rule: QuadratureRule, normalized=True) -> np.ndarray:
    """
    L2 inner products of all basis functions over ``rule``.

    Functions are ordered center-major (index ``k * J + j - 1``). With
    ``normalized`` each mode is divided by its analytic norm on its own ball.
    """
    phi = _design(basis, rule)
    G = (phi * rule.weights) @ phi.T
    if normalized:
        s = np.sqrt(np.tile(mode_norm_sq(basis), basis.K))
        G = G / np.outer(s, s)
    return G


def project_oracle(f, basis: BesselRBFBasis, rule: QuadratureRule, svd_cutoff=1e-10) -> np.ndarray:
    """
    Least-squares coefficients of ``f`` in the span of the basis over ``rule``.

    Solves ``G a = b`` by SVD, discarding singular values below
    ``svd_cutoff * s_max``; a :class:`RankDeficiencyWarning` reports how many
    were dropped. Returns a ``(J, K)`` matrix on the unnormalised modes.
    """
    if not 0 < svd_cutoff < 1:
        raise ValueError("svd_cutoff must lie in (0, 1)")
    phi = _design(basis, rule)
    fv = _field_values(f, rule)
    G = (phi * rule.weights) @ phi.T
    b = phi @ (rule.weights * fv)
    U, s, Vt = np.linalg.svd(G)
    keep = s > svd_cutoff * s[0]
    dropped = int(np.count_nonzero(~keep))
    if dropped:
        warnings.warn(f"discarded {dropped} of {len(s)} singular values", RankDeficiencyWarning,
                      stacklevel=2)
    a = Vt[keep].T @ ((U[:, keep].T @ b) / s[keep])
    return a.reshape(basis.K, basis.J).T


def l2_error(f, g, rule: QuadratureRule) -> float:
    """``sqrt(int (f - g)^2)`` over ``rule``; either argument may be a callable or node values."""
    fv = _field_values(f, rule)
    gv = _field_values(g, rule)
    return float(np.sqrt(max(integrate((fv - gv) ** 2, rule), 0.0)))
