"""CSV and JSON artifacts: fixed formatting and atomic writes."""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .domain import QuadratureRule
from .series import Expansion
from .spacetime import SpaceTimeExpansion
from .specfun import ZeroTable
from .transform import TransformData


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (str, bool)):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _atomic_write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    _atomic_write(path, "\n".join(lines) + "\n")


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def write_json(path, obj):
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")


def read_csv(path):
    """Header and rows of a CSV written by :func:`write_csv` (values as strings)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def zero_table_rows(table: ZeroTable):
    """Rows ``j, lambda, spacing, residual``; spacing is to the previous zero (blank for j = 1)."""
    z = table.zeros
    return [(j + 1, z[j], None if j == 0 else z[j] - z[j - 1], table.residuals[j])
            for j in range(len(z))]


def write_zero_table(path, table: ZeroTable):
    write_csv(path, ["j", "lambda", "spacing", "residual"], zero_table_rows(table))


def write_expansion(path, exp):
    """Coefficient table ``j,k,alpha,mode,n,R``; space-time expansions add ``t_k``."""
    b = exp.basis
    st = isinstance(exp, SpaceTimeExpansion)
    header = ["j", "k", "alpha", "mode", "n", "R"] + (["t_k"] if st else [])
    rows = []
    for k in range(b.K):
        for j in range(b.J):
            row = [j + 1, k + 1, exp.alpha[j, k], b.weight_mode, b.n, b.R]
            if st:
                row.append(b.centers[k, -1])
            rows.append(row)
    write_csv(path, header, rows)


def write_samples(path, points, f, fhat, in_cone=None, time=False):
    """Samples ``x...,f,fhat,abs_err`` (plus ``t`` and ``in_cone`` for space-time)."""
    points = np.atleast_2d(points)
    d = points.shape[1] - (1 if time else 0)
    header = [f"x{i + 1}" for i in range(d)] + (["t"] if time else []) + ["f", "fhat", "abs_err"]
    if in_cone is not None:
        header.append("in_cone")
    rows = []
    for i, p in enumerate(points):
        row = list(p) + [f[i], fhat[i], abs(f[i] - fhat[i])]
        if in_cone is not None:
            row.append(int(bool(in_cone[i])))
        rows.append(row)
    write_csv(path, header, rows)


def write_transform(path, td: TransformData):
    """``lambda,xi...,F`` in row-major (lambda, xi) order."""
    header = ["lambda"] + [f"xi{i + 1}" for i in range(td.n)] + ["F"]
    rows = [[lam, *xi, td.F[i, m]]
            for i, lam in enumerate(td.spectral.lambdas)
            for m, xi in enumerate(td.centers.xis)]
    write_csv(path, header, rows)


def rule_meta(rule: QuadratureRule) -> dict:
    return dict(rule.meta)
