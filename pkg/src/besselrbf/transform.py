"""
Continuous Bessel transform pair and the bi-orthogonal inverse on discrete
``(lambda, xi)`` grids.

Forward::

    F(lambda, xi) = int |xi - z|^(n/2) f(z) J_{n/2-1}(lambda |xi - z|) dz

Inverse (J kernel)::

    f(x) = 1/(C S_n) int int F(lambda, xi) |x - xi|^(1-n/2) J_{n/2-1}(lambda |x - xi|) dxi dmu(lambda)

Bi-orthogonal inverse::

    f(x) = 1/C_g int int F(lambda, xi) g_n(lambda, |x - xi|) dxi dmu(lambda)

``dmu`` is ``dlambda`` (``flat``) or ``lambda dlambda`` (``lambda_weighted``).
The normalising constants have no closed form here and are calibrated
numerically by a least-squares fit on a reference field. The ``lambda``
integral of the bi-orthogonal inverse runs over ``(0, lambda_max]``; the
factor 2 of a symmetric range is absorbed into ``C_g``.
"""
from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from .domain import QuadratureRule, ball_rule, dist, unit_sphere_area
from .errors import (DegenerateCalibrationError, DivergenceError, NodeCollisionWarning,
                     NonDecayingWarning, NumericalFailure)
from .specfun import bessel_y, order_for_dimension, power_bessel_j

__all__ = [
    "MEASURE_MODES",
    "SpectralGrid",
    "CenterGrid",
    "TransformData",
    "CalibrationResult",
    "RoundTripReport",
    "spectral_grid",
    "center_grid",
    "forward_bessel",
    "forward_grid",
    "inverse_bessel",
    "kernel_g",
    "inverse_biorthogonal",
    "calibrate_constant",
    "auto_lambda_max",
    "roundtrip_report",
]

MEASURE_MODES = ("flat", "lambda_weighted")


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SpectralGrid:
    lambdas: np.ndarray
    weights: np.ndarray
    measure_mode: str = "lambda_weighted"
    kind: str = "custom"

    def __post_init__(self):
        lam = _frozen(self.lambdas)
        if lam.ndim != 1 or np.any(lam <= 0) or np.any(np.diff(lam) <= 0):
            raise ValueError("spectral nodes must be positive and strictly increasing")
        if self.measure_mode not in MEASURE_MODES:
            raise ValueError(f"measure_mode must be one of {MEASURE_MODES}")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "weights", _frozen(self.weights))
        if self.weights.shape != lam.shape:
            raise ValueError("spectral weights do not match nodes")

    @property
    def lambda_max(self) -> float:
        return float(self.lambdas[-1])

    @property
    def measure_weights(self) -> np.ndarray:
        """Quadrature weights including the ``lambda`` factor when ``lambda_weighted``."""
        return self.weights * self.lambdas if self.measure_mode == "lambda_weighted" else self.weights

    def with_measure(self, measure_mode: str) -> "SpectralGrid":
        return dataclasses.replace(self, measure_mode=measure_mode)

    def meta(self) -> dict:
        return {"kind": self.kind, "count": len(self.lambdas), "lambda_max": self.lambda_max,
                "measure_mode": self.measure_mode}


@dataclass(frozen=True)
class CenterGrid:
    xis: np.ndarray
    weights: np.ndarray
    extent: float
    kind: str = "custom"

    def __post_init__(self):
        xis = np.asarray(self.xis, dtype=float)
        if xis.ndim == 1:
            xis = xis[:, None]
        object.__setattr__(self, "xis", _frozen(xis))
        object.__setattr__(self, "weights", _frozen(self.weights))
        if self.weights.shape != (len(xis),):
            raise ValueError("center weights do not match nodes")

    @property
    def dim(self) -> int:
        return self.xis.shape[1]

    @classmethod
    def from_rule(cls, rule: QuadratureRule, extent: float) -> "CenterGrid":
        return cls(rule.nodes, rule.weights, extent, kind=rule.meta.get("kind", "rule"))

    def meta(self) -> dict:
        return {"kind": self.kind, "count": len(self.weights), "extent": self.extent,
                "dim": self.dim}


@dataclass(frozen=True)
class TransformData:
    F: np.ndarray
    spectral: SpectralGrid
    centers: CenterGrid
    n: int

    def __post_init__(self):
        F = _frozen(self.F)
        if F.shape != (len(self.spectral.lambdas), len(self.centers.weights)):
            raise ValueError("F does not match the grids")
        if not np.all(np.isfinite(F)):
            raise NumericalFailure("transform data must be finite")
        object.__setattr__(self, "F", F)

    def with_measure(self, measure_mode: str) -> "TransformData":
        return dataclasses.replace(self, spectral=self.spectral.with_measure(measure_mode))

    def scaled(self, a: float) -> "TransformData":
        return dataclasses.replace(self, F=a * self.F)


@dataclass(frozen=True)
class CalibrationResult:
    """
    Calibrated constant and the relative L2 residual it achieves.

    ``alternatives`` maps every measure mode that was tried to its
    ``(constant, residual)``.
    """

    constant: float
    residual: float
    converged: bool
    measure_mode: str
    variant: str = "bessel"
    alternatives: dict = field(default_factory=dict)


def spectral_grid(lambda_max, count, kind="gauss", measure_mode="lambda_weighted") -> SpectralGrid:
    """
    Nodes on ``(0, lambda_max]``.

    ``gauss`` is Gauss-Legendre (all nodes interior); ``uniform`` uses
    ``lambda_k = k * lambda_max / count`` with trapezoid weights.
    """
    count = int(count)
    if count < 1 or not lambda_max > 0:
        raise ValueError("need count >= 1 and lambda_max > 0")
    if kind == "gauss":
        x, w = leggauss(count)
        lam, wl = 0.5 * lambda_max * (x + 1.0), 0.5 * lambda_max * w
    elif kind == "uniform":
        h = lambda_max / count
        lam = h * np.arange(1, count + 1)
        wl = np.full(count, h)
        wl[-1] *= 0.5
    else:
        raise ValueError(f"unknown spectral grid kind {kind!r}")
    return SpectralGrid(lam, wl, measure_mode, kind)


def center_grid(n, extent, count, kind="midpoint", center=None, **ball_kw) -> CenterGrid:
    """
    Translation grid covering ``B(center, extent)``.

    For n = 1: ``midpoint`` (uniform midpoint rule) or ``gauss`` on
    ``[-extent, extent]`` with ``count`` nodes. For n >= 2 a ball rule with
    radial order ``count`` is used.
    """
    center = np.zeros(n) if center is None else np.atleast_1d(np.asarray(center, dtype=float))
    count = int(count)
    if n == 1 and kind in ("midpoint", "gauss"):
        if kind == "midpoint":
            h = 2.0 * extent / count
            x = -extent + h * (np.arange(count) + 0.5)
            w = np.full(count, h)
        else:
            g, gw = leggauss(count)
            x, w = extent * g, extent * gw
        return CenterGrid((center[0] + x)[:, None], w, float(extent), kind)
    rule = ball_rule(n, center, extent, radial_order=count, **ball_kw)
    return CenterGrid.from_rule(rule, float(extent))


def _check_decay(fv, rule: QuadratureRule):
    radius = rule.meta.get("radius")
    center = rule.meta.get("center")
    if radius is None or center is None:
        return
    r = np.atleast_1d(dist(rule.nodes, np.asarray(center)))
    mass = np.abs(rule.weights * fv)
    total = mass.sum()
    if total > 0:
        outer = mass[r > 0.9 * radius].sum()
        if outer > 1e-6 * total:
            warnings.warn(f"outer 10% shell carries {outer / total:.2e} of the integral; "
                          "the field may not decay inside the truncation radius",
                          NonDecayingWarning, stacklevel=3)


def _points(x, n):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 0 or (x.ndim == 1 and n > 1)
    pts = np.atleast_2d(x) if (x.ndim > 1 or n > 1) else x.reshape(-1, 1)
    if pts.shape[1] != n:
        raise ValueError(f"points have dimension {pts.shape[1]}, expected {n}")
    return pts, single


def forward_bessel(f, n, lam, xi, rule: QuadratureRule) -> float:
    """``F(lambda, xi)`` over the truncated domain of ``rule``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    nu = order_for_dimension(n)
    fv = np.asarray(f(rule.nodes), dtype=float)
    _check_decay(fv, rule)
    r = np.atleast_1d(dist(rule.nodes, np.atleast_1d(np.asarray(xi, dtype=float))))
    vals = power_bessel_j(nu, n / 2.0, lam, r) * fv
    if not np.all(np.isfinite(vals)):
        raise NumericalFailure(f"non-finite integrand at lambda={lam}, xi={xi}")
    return float(np.sum(rule.weights * vals))


def forward_grid(f, n, sg: SpectralGrid, cg: CenterGrid, rule: QuadratureRule) -> TransformData:
    """Sample ``F`` on every ``(lambda, xi)`` pair of the grids."""
    nu = order_for_dimension(n)
    if cg.dim != n or rule.dim != n:
        raise ValueError("grid dimension does not match n")
    fv = np.asarray(f(rule.nodes), dtype=float)
    if not np.all(np.isfinite(fv)):
        raise NumericalFailure("field is non-finite at quadrature nodes")
    _check_decay(fv, rule)
    r = dist(cg.xis[:, None, :], rule.nodes[None, :, :])
    wf = rule.weights * fv
    F = np.empty((len(sg.lambdas), len(cg.weights)))
    for i, lam in enumerate(sg.lambdas):
        F[i] = power_bessel_j(nu, n / 2.0, lam, r) @ wf
        if not np.all(np.isfinite(F[i])):
            bad = int(np.argmax(~np.isfinite(F[i])))
            raise NumericalFailure(f"F is non-finite at (lambda index {i}, xi index {bad})")
    return TransformData(F, sg, cg, n)


def _reduce(td: TransformData, kernel_at, x):
    pts, single = _points(x, td.n)
    r = dist(pts[:, None, :], td.centers.xis[None, :, :])
    G = td.F * td.centers.weights
    out = np.zeros(len(pts))
    for i, (lam, mw) in enumerate(zip(td.spectral.lambdas, td.spectral.measure_weights)):
        out += mw * (kernel_at(lam, r) @ G[i])
    if not np.all(np.isfinite(out)):
        raise NumericalFailure("non-finite contribution in inverse transform")
    return float(out[0]) if single else out


def inverse_bessel(td: TransformData, C: float, x):
    """Inverse with the ``J`` kernel and constant ``C``, at one point or an array of points."""
    if not C > 0:
        raise ValueError("C must be positive")
    nu = order_for_dimension(td.n)
    p = 1.0 - td.n / 2.0
    out = _reduce(td, lambda lam, r: power_bessel_j(nu, p, lam, r), x)
    return out / (C * unit_sphere_area(td.n))


def kernel_g(n, lam, r):
    """
    Default bi-orthogonal kernel ``r^(1-n/2) Y_{n/2-1}(lambda r)``.

    Raises ``DivergenceError`` for ``r <= 0``.
    """
    nu = order_for_dimension(n)
    ra = np.asarray(r, dtype=float)
    if np.any(ra <= 0):
        raise DivergenceError("the bi-orthogonal kernel is evaluated only for r > 0")
    out = ra ** (1.0 - n / 2.0) * bessel_y(nu, lam * ra)
    return float(out) if np.ndim(out) == 0 else out


def inverse_biorthogonal(td: TransformData, C_g: float, x,
                         kernel: Optional[Callable] = None):
    """
    Bi-orthogonal inverse with a pluggable kernel ``kernel(n, lam, r)``.

    Quadrature nodes with ``r = 0`` are skipped and reported through a
    :class:`NodeCollisionWarning`.
    """
    if C_g == 0:
        raise ValueError("C_g must be non-zero")
    kernel = kernel_g if kernel is None else kernel
    n = td.n
    collisions = 0

    def at(lam, r):
        nonlocal collisions
        hit = r <= 0
        if np.any(hit):
            collisions += int(np.count_nonzero(hit))
            vals = np.zeros_like(r)
            vals[~hit] = kernel(n, lam, r[~hit])
            return vals
        return kernel(n, lam, r)

    out = _reduce(td, at, x)
    if collisions:
        warnings.warn(f"skipped {collisions} (node, lambda) pairs with r = 0 in a singular kernel",
                      NodeCollisionWarning, stacklevel=2)
    return out / C_g


def _fit(fv, rec, w, tiny=1e-300):
    rr = float(np.sum(w * rec * rec))
    fr = float(np.sum(w * fv * rec))
    ff = float(np.sum(w * fv * fv))
    scale = max(ff, rr, tiny)
    if rr <= 1e-28 * scale or abs(fr) <= 1e-28 * scale or ff == 0:
        raise DegenerateCalibrationError("reference or reconstruction is numerically zero")
    C = rr / fr
    resid = float(np.sqrt(max(np.sum(w * (fv - rec / C) ** 2), 0.0) / ff))
    return C, resid


def calibrate_constant(f_ref, n, sg: SpectralGrid, cg: CenterGrid, rule: QuadratureRule,
                       eval_rule: Optional[QuadratureRule] = None, measure_mode=None,
                       variant="bessel", threshold=1e-2, td: Optional[TransformData] = None,
                       kernel: Optional[Callable] = None) -> CalibrationResult:
    """
    Fit the normalising constant of an inverse transform on a reference field.

    The inverse is evaluated with unit constant on ``eval_rule`` (default: a
    ball of half the center-grid extent) and ``C`` is the closed-form minimiser
    of ``||f_ref - rec / C||``. With ``measure_mode=None`` both measure modes
    are tried and the one with the smaller relative residual is returned.
    ``variant`` is ``"bessel"`` or ``"biorthogonal"``.
    """
    if eval_rule is None:
        eval_rule = ball_rule(n, np.zeros(n), 0.5 * cg.extent, radial_order=64)
    if td is None:
        td = forward_grid(f_ref, n, sg, cg, rule)
    fv = np.asarray(f_ref(eval_rule.nodes), dtype=float)
    modes = MEASURE_MODES if measure_mode is None else (measure_mode,)
    fits = {}
    for mode in modes:
        tdm = td.with_measure(mode)
        if variant == "bessel":
            rec = inverse_bessel(tdm, 1.0, eval_rule.nodes)
        elif variant == "biorthogonal":
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NodeCollisionWarning)
                rec = inverse_biorthogonal(tdm, 1.0, eval_rule.nodes, kernel)
        else:
            raise ValueError(f"unknown variant {variant!r}")
        fits[mode] = _fit(fv, np.atleast_1d(rec), eval_rule.weights)
    best = min(fits, key=lambda m: fits[m][1])
    C, resid = fits[best]
    return CalibrationResult(C, resid, resid <= threshold, best, variant,
                             {m: {"constant": c, "residual": r} for m, (c, r) in fits.items()})


def auto_lambda_max(f_ref, n, cg: CenterGrid, rule: QuadratureRule, eval_rule=None,
                    feature_scale=1.0, density=8.0, kind="gauss", max_doublings=4, stable=0.05):
    """
    Spectral cut-off ``4 pi / feature_scale`` doubled until the calibrated
    residual changes by less than ``stable`` (relative). Returns
    ``(lambda_max, CalibrationResult)``.
    """
    lam_max = 4.0 * np.pi / feature_scale
    prev = None
    for _ in range(max_doublings + 1):
        sg = spectral_grid(lam_max, max(8, int(np.ceil(density * lam_max))), kind)
        cal = calibrate_constant(f_ref, n, sg, cg, rule, eval_rule)
        if prev is not None and abs(cal.residual - prev.residual) <= stable * prev.residual:
            return lam_max, cal
        prev = cal
        lam_max *= 2.0
    return lam_max / 2.0, prev


@dataclass(frozen=True)
class RoundTripReport:
    """Calibration of both inverse variants under both measure modes."""

    n: int
    spectral: dict
    centers: dict
    rule: dict
    entries: dict
    best: dict

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def roundtrip_report(f, n, sg: SpectralGrid, cg: CenterGrid, rule: QuadratureRule,
                     eval_rule: Optional[QuadratureRule] = None, kernel=None,
                     threshold=1e-2) -> RoundTripReport:
    """
    Forward-transform ``f`` once, then calibrate the ``J``-kernel and the
    bi-orthogonal inverse under each measure mode. Failures are recorded,
    never raised; a zero field yields entries flagged ``degenerate``.
    """
    entries, best = {}, {}
    try:
        td = forward_grid(f, n, sg, cg, rule)
        forward_error = None
    except Exception as exc:  # recorded in the report
        td, forward_error = None, f"{type(exc).__name__}: {exc}"
    for variant in ("bessel", "biorthogonal"):
        entries[variant] = {}
        for mode in MEASURE_MODES:
            rec = {"constant": None, "residual": None, "degenerate": False, "error": forward_error}
            if td is not None:
                try:
                    cal = calibrate_constant(f, n, sg, cg, rule, eval_rule, mode, variant,
                                             threshold, td=td, kernel=kernel)
                    rec.update(constant=cal.constant, residual=cal.residual,
                               converged=cal.converged)
                except DegenerateCalibrationError as exc:
                    rec.update(degenerate=True, error=str(exc))
                except Exception as exc:
                    rec.update(error=f"{type(exc).__name__}: {exc}")
            entries[variant][mode] = rec
        ok = {m: e for m, e in entries[variant].items() if e["residual"] is not None}
        if ok:
            m = min(ok, key=lambda k: ok[k]["residual"])
            best[variant] = {"measure_mode": m, **ok[m]}
        else:
            best[variant] = None
    return RoundTripReport(n, sg.meta(), cg.meta(), dict(rule.meta), entries, best)
