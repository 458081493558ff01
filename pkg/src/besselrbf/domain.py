"""
Geometry and quadrature: n-balls, the unit-sphere measure, Euclidean and
time-space distances, the Heaviside gate, and the quadrature rules that
realise the volume integrals of the series and transform formulas.

All rules are immutable. Monte Carlo rules draw from a counter-based
``numpy.random.Philox`` stream keyed by a single 64-bit seed, so the same
seed always produces bit-identical nodes.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gamma

from .errors import EmptyDomainError, NumericalFailure, OutsideConeError

__all__ = [
    "BallDomain",
    "SpaceTimePoint",
    "WaveContext",
    "QuadratureRule",
    "unit_sphere_area",
    "ball_volume",
    "dist",
    "spacetime_dist",
    "spacetime_dist_array",
    "heaviside",
    "gauss_legendre",
    "ball_rule",
    "shell_rule",
    "truncated_infinite_rule",
    "choose_cutoff",
    "integrate",
    "mc_stderr",
    "cone_rule",
    "philox",
]


@dataclass(frozen=True)
class BallDomain:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    @property
    def dim(self) -> int:
        return len(self.center)


@dataclass(frozen=True)
class SpaceTimePoint:
    x: np.ndarray
    t: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))


@dataclass(frozen=True)
class WaveContext:
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("wave speed must be positive")


@dataclass(frozen=True)
class QuadratureRule:
    """
    Nodes and weights of a quadrature rule.

    ``nodes`` has shape ``(N, d)``; ``weights`` has shape ``(N,)``. ``meta``
    describes how the rule was built (kind, orders, seed, cut-off radius) and
    is what gets written to run manifests.
    """

    nodes: np.ndarray
    weights: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        weights = np.asarray(self.weights, dtype=float)
        if weights.shape != (nodes.shape[0],):
            raise ValueError("node count and weight count differ")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    @property
    def is_monte_carlo(self) -> bool:
        return "seed" in self.meta


def philox(seed: int) -> np.random.Generator:
    """Counter-based generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF))


def unit_sphere_area(n: int) -> float:
    """Surface measure ``2 pi^(n/2) / Gamma(n/2)`` of the unit sphere in R^n."""
    if int(n) != n or n < 1:
        raise ValueError("dimension must be a positive integer")
    return float(2.0 * np.pi ** (n / 2.0) / gamma(n / 2.0))


def ball_volume(n: int, R: float) -> float:
    return unit_sphere_area(n) * R**n / n


def dist(x, zeta):
    """Euclidean distance; broadcasts over leading axes of either argument."""
    x = np.asarray(x, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    if np.shape(x)[-1:] != np.shape(zeta)[-1:]:
        raise ValueError(f"dimension mismatch: {np.shape(x)} vs {np.shape(zeta)}")
    d = np.sqrt(np.sum((x - zeta) ** 2, axis=-1))
    return float(d) if np.ndim(d) == 0 else d


def heaviside(s):
    """Closed-cone step: 1 for ``s >= 0``, else 0."""
    out = np.where(np.asarray(s) >= 0, 1.0, 0.0)
    return float(out) if out.ndim == 0 else out


def spacetime_dist(p: SpaceTimePoint, k: SpaceTimePoint, ctx: WaveContext) -> float:
    """
    Time-space distance ``sqrt(c^2 dt^2 - r^2)`` of ``p`` from apex ``k``.

    Raises ``OutsideConeError`` when ``c dt < r``.
    """
    dt = p.t - k.t
    r = dist(p.x, k.x)
    if ctx.c * dt - r < 0:
        raise OutsideConeError(f"c*dt = {ctx.c * dt:.6g} < r = {r:.6g}")
    return float(np.sqrt(max((ctx.c * dt) ** 2 - r * r, 0.0)))


def spacetime_dist_array(x, t, xk, tk, c):
    """
    Vectorised time-space distance and gate.

    Returns ``(rhat, r, inside)`` where ``inside`` is the closed-cone mask and
    ``rhat`` is 0 wherever ``inside`` is false.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    r = dist(x, np.atleast_1d(xk))
    r = np.atleast_1d(r)
    cdt = c * (np.asarray(t, dtype=float) - tk)
    inside = cdt - r >= 0
    rhat = np.where(inside, np.sqrt(np.maximum(cdt * cdt - r * r, 0.0)), 0.0)
    return rhat, r, inside


def gauss_legendre(m: int) -> QuadratureRule:
    """``m``-point Gauss-Legendre rule on [-1, 1], exact to degree ``2m - 1``."""
    m = int(m)
    if not 1 <= m <= 512:
        raise ValueError("Gauss-Legendre order must be in [1, 512]")
    x, w = leggauss(m)
    return QuadratureRule(x[:, None], w, {"kind": "gauss_legendre", "order": m})


def _interval(a, b, m):
    x, w = leggauss(m)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _directions(n, angular, angular_order, samples, seed):
    """Unit directions and their weights (summing to S_n), plus metadata."""
    if angular == "product":
        if n == 1:
            return np.array([[1.0], [-1.0]]), np.ones(2), {"angular": "reflection"}
        if n == 2:
            m = int(angular_order or 64)
            th = 2.0 * np.pi * np.arange(m) / m
            dirs = np.column_stack([np.cos(th), np.sin(th)])
            return dirs, np.full(m, 2.0 * np.pi / m), {"angular": "trapezoid", "angular_order": m}
        if n == 3:
            m = int(angular_order or 16)
            ct, wct = leggauss(m)
            ph = 2.0 * np.pi * np.arange(2 * m) / (2 * m)
            wph = np.full(2 * m, np.pi / m)
            st = np.sqrt(1.0 - ct**2)
            dirs = np.column_stack(
                [
                    np.outer(st, np.cos(ph)).ravel(),
                    np.outer(st, np.sin(ph)).ravel(),
                    np.repeat(ct, 2 * m),
                ]
            )
            return dirs, np.outer(wct, wph).ravel(), {"angular": "gauss_trapezoid", "angular_order": m}
        raise ValueError(f"product angular rule is only available for n <= 3, got n={n}")
    if angular == "mc":
        m = int(samples or 4096)
        g = philox(seed).standard_normal((m, n))
        dirs = g / np.linalg.norm(g, axis=1, keepdims=True)
        return dirs, np.full(m, unit_sphere_area(n) / m), {"angular": "mc", "samples": m, "seed": int(seed)}
    raise ValueError(f"unknown angular rule {angular!r}")


def shell_rule(n, center, r_inner, r_outer, radial_order=64, angular="product",
               angular_order=None, samples=None, seed=0) -> QuadratureRule:
    """Rule on the spherical shell ``r_inner <= |x - center| <= r_outer``."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if len(center) != n:
        raise ValueError("center dimension does not match n")
    if not 0 <= r_inner < r_outer:
        raise ValueError("need 0 <= r_inner < r_outer")
    if int(radial_order) < 2:
        raise ValueError("radial_order must be >= 2")
    r, wr = _interval(r_inner, r_outer, int(radial_order))
    wr = wr * r ** (n - 1)
    dirs, wd, ameta = _directions(n, angular, angular_order, samples, seed)
    # direction-major ordering: reshape(len(dirs), len(r)) recovers per-direction rays
    nodes = center + (dirs[:, None, :] * r[None, :, None]).reshape(-1, n)
    weights = np.outer(wd, wr).ravel()
    meta = {"kind": "shell", "n": n, "center": center.tolist(), "r_inner": float(r_inner),
            "radius": float(r_outer), "radial_order": int(radial_order), **ameta}
    return QuadratureRule(nodes, weights, meta)


def ball_rule(n, center, R, radial_order=64, angular="product", angular_order=None,
              samples=None, seed=0) -> QuadratureRule:
    """
    Product rule on the ball ``B(center, R)``.

    Radial Gauss-Legendre on ``[0, R]`` carrying the ``r^(n-1)`` Jacobian times an
    angular rule: reflection (n=1), trapezoid on the circle (n=2), Gauss in
    cos(theta) times trapezoid in phi (n=3), or seeded Monte Carlo directions
    (``angular="mc"``, any n).
    """
    rule = shell_rule(n, center, 0.0, R, radial_order, angular, angular_order, samples, seed)
    return QuadratureRule(rule.nodes, rule.weights, {**rule.meta, "kind": "ball"})


def choose_cutoff(f, n, center, length_scale=1.0, rel_tol=1e-12, cap=64.0, radial_order=48,
                  angular="product", angular_order=None, samples=None, seed=0) -> float:
    """
    Truncation radius standing in for the whole space.

    The radius doubles from ``length_scale`` until the newest shell carries less
    than ``rel_tol`` of the accumulated integral of ``|f|``, capped at
    ``cap * length_scale``.
    """
    kw = dict(radial_order=radial_order, angular=angular, angular_order=angular_order,
              samples=samples, seed=seed)
    R = float(length_scale)
    acc = abs(integrate(lambda z: np.abs(f(z)), ball_rule(n, center, R, **kw)))
    while R < cap * length_scale:
        shell = abs(integrate(lambda z: np.abs(f(z)), shell_rule(n, center, R, 2 * R, **kw)))
        R *= 2.0
        acc += shell
        if shell <= rel_tol * acc:
            break
    return min(R, cap * length_scale)


def truncated_infinite_rule(n, center, R_cut=None, radial_order=64, angular="product",
                            angular_order=None, samples=None, seed=0, f=None,
                            length_scale=1.0) -> QuadratureRule:
    """
    Ball rule of radius ``R_cut`` used in place of an integral over all of R^n.

    If ``R_cut`` is None it is chosen by :func:`choose_cutoff` for the field ``f``.
    """
    if R_cut is None:
        if f is None:
            raise ValueError("either R_cut or f must be given")
        R_cut = choose_cutoff(f, n, center, length_scale, angular=angular,
                              angular_order=angular_order, samples=samples, seed=seed)
    rule = ball_rule(n, center, R_cut, radial_order, angular, angular_order, samples, seed)
    return QuadratureRule(rule.nodes, rule.weights,
                          {**rule.meta, "kind": "truncated_infinite", "R_cut": float(R_cut)})


Field = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]


def _values(f: Field, rule: QuadratureRule) -> np.ndarray:
    vals = f(rule.nodes) if callable(f) else f
    vals = np.broadcast_to(np.asarray(vals, dtype=float), rule.weights.shape)
    if not np.all(np.isfinite(vals)):
        bad = int(np.count_nonzero(~np.isfinite(vals)))
        raise NumericalFailure(f"integrand is non-finite at {bad} of {len(rule)} nodes")
    return vals


def integrate(f: Field, rule: QuadratureRule, workers: int = 1) -> float:
    """
    ``sum_i w_i f(node_i)``; ``f`` maps an ``(N, d)`` node array to ``(N,)``.

    With ``workers > 1`` the field is evaluated on contiguous node chunks in a
    thread pool. Chunks are reassembled in order before one fixed reduction,
    so the result does not depend on the worker count.
    """
    if workers > 1 and callable(f) and len(rule) > workers:
        chunks = np.array_split(rule.nodes, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vals = np.concatenate([np.atleast_1d(v) for v in pool.map(f, chunks)])
        return float(np.sum(rule.weights * _values(vals, rule)))
    return float(np.sum(rule.weights * _values(f, rule)))


def mc_stderr(f: Field, rule: QuadratureRule) -> Optional[float]:
    """
    Standard error of a Monte Carlo rule's estimate, or None for deterministic rules.

    For Monte Carlo directions the per-ray radial integrals are the iid samples.
    """
    if not rule.is_monte_carlo:
        return None
    vals = _values(f, rule)
    if rule.meta.get("kind") in ("ball", "shell", "truncated_infinite"):
        m = rule.meta["samples"]
        per_ray = (rule.weights * vals).reshape(m, -1).sum(axis=1) * m
        return float(np.std(per_ray, ddof=1) / np.sqrt(m))
    m = rule.meta["samples"]
    contrib = np.zeros(m)
    contrib[: len(vals)] = vals * rule.meta["volume"]
    return float(np.std(contrib, ddof=1) / np.sqrt(m))


def cone_rule(spatial_ball: BallDomain, t_interval, apex: SpaceTimePoint, ctx: WaveContext,
              time_order=64, space_order=64, method="auto", samples=200_000, seed=0) -> QuadratureRule:
    """
    Rule on ``{(x, t) : x in ball, t in t_interval, c (t - t_k) >= |x - x_k|}``.

    Nodes have shape ``(N, n + 1)`` with time in the last column. The rule is a
    deterministic product rule when n = 1 or when the ball is centred on the apex;
    otherwise (or with ``method="mc"``) it is seeded rejection Monte Carlo.

    Raises ``EmptyDomainError`` when the cone misses the box.
    """
    n = spatial_ball.dim
    t0, t1 = map(float, t_interval)
    if not t1 > t0:
        raise ValueError("time interval must have positive length")
    c = ctx.c
    xk = apex.x
    if len(xk) != n:
        raise ValueError("apex dimension does not match the spatial ball")
    gap = max(dist(xk, spatial_ball.center) - spatial_ball.radius, 0.0)
    t_start = max(t0, apex.t + gap / c)
    if t_start >= t1:
        raise EmptyDomainError("the causal cone of the apex does not reach the space-time box")
    base_meta = {"kind": "cone", "n": n, "t_interval": [t0, t1], "apex_x": xk.tolist(),
                 "apex_t": apex.t, "c": c, "ball_center": spatial_ball.center.tolist(),
                 "ball_radius": spatial_ball.radius}

    concentric = np.allclose(xk, spatial_ball.center, rtol=0, atol=1e-15)
    if method == "auto":
        method = "product" if (n == 1 or concentric) else "mc"
    if method == "product":
        if n == 1:
            a = spatial_ball.center[0] - spatial_ball.radius
            b = spatial_ball.center[0] + spatial_ball.radius
            kinks = [apex.t + (xk[0] - a) / c, apex.t + (b - xk[0]) / c]
            brk = sorted({t_start, t1, *[s for s in kinks if t_start < s < t1]})
            nodes, weights = [], []
            for ta, tb in zip(brk[:-1], brk[1:]):
                ts, wts = _interval(ta, tb, time_order)
                for t, wt in zip(ts, wts):
                    lo = max(a, xk[0] - c * (t - apex.t))
                    hi = min(b, xk[0] + c * (t - apex.t))
                    xs, wxs = _interval(lo, hi, space_order)
                    nodes.append(np.column_stack([xs, np.full_like(xs, t)]))
                    weights.append(wt * wxs)
            return QuadratureRule(np.vstack(nodes), np.concatenate(weights),
                                  {**base_meta, "method": "product", "time_order": time_order,
                                   "space_order": space_order})
        if not concentric:
            raise ValueError("product cone rule in n >= 2 needs a ball centred on the apex")
        kink = apex.t + spatial_ball.radius / c
        brk = sorted({t_start, t1, *([kink] if t_start < kink < t1 else [])})
        nodes, weights = [], []
        for ta, tb in zip(brk[:-1], brk[1:]):
            ts, wts = _interval(ta, tb, time_order)
            for t, wt in zip(ts, wts):
                rho = min(spatial_ball.radius, c * (t - apex.t))
                sub = ball_rule(n, xk, rho, space_order)
                nodes.append(np.column_stack([sub.nodes, np.full(len(sub), t)]))
                weights.append(wt * sub.weights)
        return QuadratureRule(np.vstack(nodes), np.concatenate(weights),
                              {**base_meta, "method": "product", "time_order": time_order,
                               "space_order": space_order})
    if method != "mc":
        raise ValueError(f"unknown cone rule method {method!r}")

    rng = philox(seed)
    m = int(samples)
    g = rng.standard_normal((m, n))
    u = rng.random(m) ** (1.0 / n)
    xs = spatial_ball.center + spatial_ball.radius * u[:, None] * g / np.linalg.norm(g, axis=1, keepdims=True)
    ts = t_start + (t1 - t_start) * rng.random(m)
    inside = c * (ts - apex.t) - dist(xs, xk) >= 0
    if not np.any(inside):
        raise EmptyDomainError("no Monte Carlo sample fell inside the causal cone")
    volume = ball_volume(n, spatial_ball.radius) * (t1 - t_start)
    nodes = np.column_stack([xs[inside], ts[inside]])
    return QuadratureRule(nodes, np.full(len(nodes), volume / m),
                          {**base_meta, "method": "mc", "samples": m, "seed": int(seed),
                           "volume": volume})
