"""
Named, versioned test fields.

Every field maps an ``(N, d)`` array of points to ``(N,)`` values. Space-time
fields take ``(N, n + 1)`` arrays with time in the last column.
"""
from __future__ import annotations

import numpy as np
from scipy.interpolate import LinearNDInterpolator, interp1d

FIELD_VERSION = 1

__all__ = ["FIELD_VERSION", "zero", "gaussian", "bump", "cosine_mode", "damped_parabola",
           "tabulated", "radial"]


def _radius(points, center):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return np.linalg.norm(points - np.asarray(center, dtype=float), axis=1)


def radial(profile, center):
    """Field ``profile(|x - center|)``."""
    return lambda z: profile(_radius(z, center))


def zero(points):
    return np.zeros(len(np.atleast_2d(points)))


def gaussian(center=0.0, scale=1.0):
    """``exp(-|x - center|^2 / scale^2)``."""
    return radial(lambda r: np.exp(-((r / scale) ** 2)), center)


def bump(center=0.0, R=1.0):
    """C-infinity bump ``exp(1 - 1/(1 - r^2/R^2))`` supported on ``B(center, R)``, equal to 1 at the center."""

    def profile(r):
        s = np.clip((r / R) ** 2, 0.0, 1.0)
        inside = s < 1.0
        out = np.zeros_like(s)
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
        return out

    return radial(profile, center)


def damped_parabola(center=0.0, R=1.0):
    """``(1 - r^2/R^2) exp(-r^2)``, vanishing on the sphere of radius R."""
    return radial(lambda r: (1.0 - (r / R) ** 2) * np.exp(-(r**2)), center)


def cosine_mode(basis, m, k=0):
    """Mode ``m`` (1-based) of ``basis`` at center ``k``; the n = 1 case is a cosine."""
    from .series import basis_matrix

    return lambda z: basis_matrix(basis, k, z)[m - 1]


def tabulated(points, values):
    """Linear interpolation of samples; zero outside their convex hull."""
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    if points.ndim == 1 or points.shape[1] == 1:
        fn = interp1d(points.ravel(), values, bounds_error=False, fill_value=0.0)
        return lambda z: fn(np.atleast_2d(z)[:, 0] if np.ndim(z) > 1 else np.asarray(z))
    fn = LinearNDInterpolator(points, values, fill_value=0.0)
    return lambda z: fn(np.atleast_2d(z))
