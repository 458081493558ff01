"""
Bessel functions of the first and second kind for the orders used by the
radial basis (``v = n/2 - 1``), the leading-order asymptotic form, and the
positive zeros of ``J_v``.

Evaluation of ``J_v`` and ``Y_v`` for general order is delegated to
``scipy.special`` (Amos/Cephes). Orders ``v = +-1/2`` short-circuit to their
closed trigonometric forms so that ``n = 1`` computations are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ConvergenceError, DivergenceError

__all__ = [
    "ZeroTable",
    "bessel_j",
    "bessel_y",
    "bessel_j_asymptotic",
    "bessel_zeros",
    "mcmahon_guess",
    "power_bessel_j",
    "order_for_dimension",
]


def order_for_dimension(n: int) -> float:
    """Bessel order ``n/2 - 1`` attached to spatial dimension ``n``."""
    if int(n) != n or n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n!r}")
    return n / 2.0 - 1.0


def _check_order(v):
    v = float(v)
    if not np.isfinite(v) or v < -0.5:
        raise ValueError(f"order must satisfy v >= -1/2, got {v}")
    return v


def _as_array(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("argument must be finite")
    return x


def _unwrap(x, out):
    return float(out) if np.ndim(x) == 0 else out


def bessel_j(v, x):
    """
    Bessel function of the first kind ``J_v(x)`` for real ``x >= 0``.

    Parameters
    ----------
    v : float
        Order, ``v >= -1/2``.
    x : float or array_like
        Non-negative argument.

    Raises
    ------
    ValueError
        If any ``x < 0``.
    DivergenceError
        If ``v < 0`` and any ``x == 0``.
    """
    v = _check_order(v)
    xa = _as_array(x)
    if np.any(xa < 0):
        raise ValueError("bessel_j is defined here for x >= 0 only")
    if v < 0 and np.any(xa == 0):
        raise DivergenceError(f"J_{v}(x) diverges at x = 0")
    if v == 0.5 or v == -0.5:
        with np.errstate(divide="ignore", invalid="ignore"):
            amp = np.sqrt(2.0 / (np.pi * xa))
            out = amp * (np.sin(xa) if v > 0 else np.cos(xa))
        if v > 0:
            out = np.where(xa == 0, 0.0, out)
    else:
        out = special.jv(v, xa)
    return _unwrap(x, out)


def bessel_y(v, x):
    """
    Bessel function of the second kind ``Y_v(x)`` for ``x > 0``.

    Raises ``DivergenceError`` at ``x == 0`` (the function is singular there)
    and ``ValueError`` for negative arguments.
    """
    v = _check_order(v)
    xa = _as_array(x)
    if np.any(xa < 0):
        raise ValueError("bessel_y is defined here for x > 0 only")
    if np.any(xa == 0):
        raise DivergenceError(f"Y_{v}(x) is singular at x = 0")
    if v == 0.5:
        out = -np.sqrt(2.0 / (np.pi * xa)) * np.cos(xa)
    elif v == -0.5:
        out = np.sqrt(2.0 / (np.pi * xa)) * np.sin(xa)
    else:
        out = special.yv(v, xa)
    return _unwrap(x, out)


def bessel_j_asymptotic(v, x):
    """Leading large-argument form ``sqrt(2/(pi x)) cos(x - v pi/2 - pi/4)``."""
    v = float(v)
    xa = _as_array(x)
    if np.any(xa <= 0):
        raise ValueError("asymptotic form requires x > 0")
    out = np.sqrt(2.0 / (np.pi * xa)) * np.cos(xa - 0.5 * v * np.pi - 0.25 * np.pi)
    return _unwrap(x, out)


def power_bessel_j(v, p, lam, r):
    """
    Evaluate ``r**p * J_v(lam * r)`` for ``r >= 0`` including the limit at 0.

    At ``r = 0`` the leading series term gives ``r**(p+v) (lam/2)**v / Gamma(v+1)``,
    which is 0 for ``p + v > 0``, finite for ``p + v == 0`` and singular otherwise.
    """
    v = _check_order(v)
    ra = _as_array(r)
    if np.any(ra < 0):
        raise ValueError("radius must be non-negative")
    lam = float(lam)
    zero = ra == 0
    if np.any(zero) and p + v < 0:
        raise DivergenceError(f"r**{p} J_{v}(lam r) is singular at r = 0")
    if v == -0.5 or v == 0.5:
        with np.errstate(divide="ignore", invalid="ignore"):
            amp = np.sqrt(2.0 / (np.pi * lam)) * ra ** (p - 0.5)
            trig = np.sin(lam * ra) if v > 0 else np.cos(lam * ra)
            out = amp * trig
    else:
        safe = np.where(zero, 1.0, ra)
        out = safe**p * special.jv(v, lam * safe)
    if np.any(zero):
        limit = (lam / 2.0) ** v / special.gamma(v + 1.0) if p + v == 0 else 0.0
        out = np.where(zero, limit, out)
    return _unwrap(r, out)


def mcmahon_guess(v, j):
    """McMahon large-index expansion for the ``j``-th positive zero of ``J_v``."""
    j = np.asarray(j, dtype=float)
    mu = 4.0 * v * v
    beta = (j + 0.5 * v - 0.25) * np.pi
    e = 8.0 * beta
    return (
        beta
        - (mu - 1.0) / e
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e**3)
        - 32.0 * (mu - 1.0) * (83.0 * mu**2 - 982.0 * mu + 3779.0) / (15.0 * e**5)
    )


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ZeroTable:
    """Ascending positive zeros of ``J_order`` with their residuals."""

    order: float
    zeros: np.ndarray
    tolerance: float
    residuals: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "zeros", _readonly(self.zeros))
        object.__setattr__(self, "residuals", _readonly(self.residuals))
        if self.zeros.ndim != 1 or len(self.zeros) == 0:
            raise ValueError("zero table must be a non-empty 1-D sequence")
        if np.any(np.diff(self.zeros) <= 0) or self.zeros[0] <= 0:
            raise ValueError("zeros must be positive and strictly increasing")

    def __len__(self):
        return len(self.zeros)

    def __getitem__(self, j):
        return self.zeros[j]

    @property
    def spacing(self) -> np.ndarray:
        """Consecutive differences ``lambda_{j+1} - lambda_j``."""
        return np.diff(self.zeros)


def _brackets(v, count, scan_step=0.25):
    start = max(0.5 * v, 1e-2)
    hi = float(mcmahon_guess(v, count)) + np.pi
    while True:
        grid = np.arange(start, hi + scan_step, scan_step)
        vals = special.jv(v, grid)
        change = np.nonzero(np.signbit(vals[:-1]) != np.signbit(vals[1:]))[0]
        if len(change) >= count:
            change = change[:count]
            return grid[change], grid[change + 1]
        hi += np.pi * (count - len(change) + 1)


def bessel_zeros(v, count, tol=1e-12, max_iter=60) -> ZeroTable:
    """
    First ``count`` positive zeros of ``J_v``.

    Zeros are bracketed by a sign-change scan whose extent is set by the
    McMahon expansion, narrowed by bisection and polished with a safeguarded
    Newton iteration started from the McMahon guess where it falls inside
    the bracket.

    Raises
    ------
    ConvergenceError
        If a zero does not reach ``|J_v(lambda)| <= tol``.
    """
    v = _check_order(v)
    count = int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    j = np.arange(1, count + 1, dtype=float)
    if v == -0.5 or v == 0.5:
        zeros = (j - 0.5) * np.pi if v < 0 else j * np.pi
        return ZeroTable(v, zeros, tol, np.abs(bessel_j(v, zeros)))

    lo, hi = _brackets(v, count)
    f_lo = special.jv(v, lo)
    for _ in range(12):
        mid = 0.5 * (lo + hi)
        f_mid = special.jv(v, mid)
        left = np.signbit(f_mid) == np.signbit(f_lo)
        lo = np.where(left, mid, lo)
        f_lo = np.where(left, f_mid, f_lo)
        hi = np.where(left, hi, mid)

    guess = mcmahon_guess(v, j)
    x = np.where((guess > lo) & (guess < hi), guess, 0.5 * (lo + hi))
    for _ in range(max_iter):
        fx = special.jv(v, x)
        dfx = 0.5 * (special.jv(v - 1.0, x) - special.jv(v + 1.0, x))
        step = fx / dfx
        x_new = x - step
        outside = (x_new <= lo) | (x_new >= hi) | ~np.isfinite(x_new)
        x_new = np.where(outside, 0.5 * (lo + hi), x_new)
        # keep the bracket valid for the bisection fallback
        f_new = special.jv(v, x_new)
        left = np.signbit(f_new) == np.signbit(f_lo)
        lo = np.where(left, x_new, lo)
        f_lo = np.where(left, f_new, f_lo)
        hi = np.where(left, hi, x_new)
        done = np.all(np.abs(x_new - x) <= 4 * np.finfo(float).eps * x_new)
        x = x_new
        if done:
            break

    residuals = np.abs(special.jv(v, x))
    if np.any(residuals > tol):
        bad = int(np.argmax(residuals > tol)) + 1
        raise ConvergenceError(
            f"zero {bad} of J_{v} stalled at residual {residuals[bad - 1]:.3e} > {tol:.1e}"
        )
    return ZeroTable(v, x, tol, residuals)
