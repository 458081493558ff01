"""
Command-line driver.

    besselrbf <command> --config run.toml [--out DIR] [--seed N] [--quiet]

Commands: zeros, expand, reconstruct, gram, transform, spacetime, verify.
A config is a flat TOML file (or a previous run's ``manifest.json``, whose
resolved config is reused). Exit codes: 0 success, 1 configuration error,
2 numeric failure, 3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, fields
from . import io as aio
from .domain import (BallDomain, SpaceTimePoint, WaveContext, ball_rule, cone_rule,
                     truncated_infinite_rule, spacetime_dist_array)
from .errors import BesselRBFError, ConfigError
from .series import (WEIGHT_MODES, BesselRBFBasis, basis_matrix, default_rule, expand, gram,
                     l2_error, reconstruct, reconstruct_zeroth)
from .spacetime import (DISTANCE_MODES, SpaceTimeBasis, SpaceTimeExpansion, st_basis_matrix,
                        st_expand, st_project_oracle, st_reconstruct)
from .specfun import bessel_zeros
from .transform import center_grid, forward_grid, roundtrip_report, spectral_grid
from .verify import FAULTS, run_checks

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3

COMMANDS = ("zeros", "expand", "reconstruct", "gram", "transform", "spacetime", "verify")
SPATIAL_FIELDS = ("zero", "gaussian", "bump", "damped_parabola", "cosine_mode", "tabulated")
ST_FIELDS = ("zero", "cosine_mode", "gaussian")

# key -> (type, default); a default of REQUIRED must be supplied by the config
REQUIRED = object()
_COMMON = {"out": (str, "out"), "mc_seed": (int, 0)}
_SERIES = {
    "n": (int, REQUIRED), "R": (float, REQUIRED), "J": (int, REQUIRED),
    "centers": (list, None), "weight_mode": (str, "orthogonality_consistent"),
    "radial_order": (int, None), "angular": (str, "product"), "angular_order": (int, None),
    "mc_samples": (int, 4096),
}
_FIELD = {"field": (str, REQUIRED), "field_mode": (int, 1), "field_scale": (float, 1.0),
          "field_file": (str, None)}
SCHEMA = {
    "zeros": {"order": (float, None), "n": (int, None), "count": (int, REQUIRED)},
    "expand": {**_SERIES, **_FIELD, "base_point": (list, None)},
    "reconstruct": {**_SERIES, **_FIELD, "base_point": (list, None), "samples": (int, 101)},
    "gram": {**_SERIES},
    "transform": {
        "n": (int, 1), **_FIELD, "field": (str, "gaussian"), "lambda_max": (float, 12.0),
        "spectral_count": (int, 96), "spectral_kind": (str, "gauss"),
        "center_extent": (float, 8.0), "center_count": (int, 160), "center_kind": (str, "midpoint"),
        "R_cut": (float, 8.0), "radial_order": (int, 128), "eval_radius": (float, None),
        "angular": (str, "product"), "mc_samples": (int, 4096),
    },
    "spacetime": {
        "n": (int, REQUIRED), "R": (float, REQUIRED), "J": (int, REQUIRED), "c": (float, 1.0),
        "centers": (list, REQUIRED), **_FIELD, "weight_mode": (str, "orthogonality_consistent"),
        "distance_mode": (str, "rhat_throughout"), "t_interval": (list, REQUIRED),
        "ball_center": (list, None), "ball_radius": (float, None), "time_order": (int, 48),
        "space_order": (int, 48), "cone_method": (str, "auto"), "mc_samples": (int, 200000),
        "coefficients": (str, "formula"), "svd_cutoff": (float, 1e-10), "samples": (int, 441),
    },
    "verify": {"inject_fault": (str, None)},
}


def load_config(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.suffix == ".json":
            data = json.loads(path.read_text(encoding="utf-8"))
            return dict(data.get("config", data))
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc


def resolve(command: str, raw: dict) -> dict:
    """Apply defaults, check types and reject unknown keys."""
    schema = {**_COMMON, **SCHEMA[command]}
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown config key(s) for '{command}': {', '.join(unknown)}")
    cfg = {}
    for key, (typ, default) in schema.items():
        if key not in raw or raw[key] is None:
            if default is REQUIRED:
                raise ConfigError(f"missing required config key '{key}'")
            cfg[key] = default
            continue
        val = raw[key]
        try:
            if typ is int:
                if isinstance(val, bool) or float(val) != int(val):
                    raise ValueError
                val = int(val)
            elif typ is float:
                val = float(val)
            elif typ is list:
                if not isinstance(val, list):
                    raise ValueError
            elif typ is str and not isinstance(val, str):
                raise ValueError
        except (TypeError, ValueError):
            raise ConfigError(f"config key '{key}' must be of type {typ.__name__}, got {val!r}") from None
        cfg[key] = val
    _validate(command, cfg)
    return cfg


def _need(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _validate(command, cfg):
    _need(0 <= cfg["mc_seed"] < 2**64, "mc_seed must be an unsigned 64-bit integer")
    if "n" in cfg and cfg["n"] is not None:
        _need(cfg["n"] >= 1, "n must be >= 1")
    if "R" in cfg:
        _need(cfg["R"] > 0, "R must be positive")
    if "J" in cfg:
        _need(1 <= cfg["J"] <= 256, "J must lie in 1..256")
    if "weight_mode" in cfg:
        _need(cfg["weight_mode"] in WEIGHT_MODES, f"weight_mode must be one of {WEIGHT_MODES}")
    if "radial_order" in cfg and cfg["radial_order"] is not None:
        _need(2 <= cfg["radial_order"] <= 512, "radial_order must lie in 2..512")
    if "angular" in cfg:
        _need(cfg["angular"] in ("product", "mc"), "angular must be 'product' or 'mc'")
        if cfg["angular"] == "product" and cfg.get("n") is not None:
            _need(cfg["n"] <= 3, "angular='product' needs n <= 3; use angular='mc'")
    if "field" in cfg:
        allowed = ST_FIELDS if command == "spacetime" else SPATIAL_FIELDS
        _need(cfg["field"] in allowed, f"field must be one of {allowed}")
        if cfg["field"] == "tabulated":
            _need(cfg["field_file"] is not None, "field 'tabulated' needs 'field_file'")
            _need(Path(cfg["field_file"]).is_file(), f"field_file not found: {cfg['field_file']}")
        _need(cfg["field_scale"] > 0, "field_scale must be positive")
    if command == "zeros":
        _need(cfg["order"] is not None or cfg["n"] is not None, "missing required config key 'order' (or 'n')")
        if cfg["order"] is None:
            cfg["order"] = cfg["n"] / 2.0 - 1.0
        _need(cfg["order"] >= -0.5, "order must be >= -1/2")
        _need(cfg["count"] >= 1, "count must be >= 1")
    if command == "transform":
        for key in ("lambda_max", "center_extent", "R_cut"):
            _need(cfg[key] > 0, f"{key} must be positive")
        _need(cfg["spectral_count"] >= 1 and cfg["center_count"] >= 2, "grid counts too small")
        _need(cfg["n"] <= 3, "transform experiments are limited to n <= 3")
    if command == "spacetime":
        _need(cfg["distance_mode"] in DISTANCE_MODES, f"distance_mode must be one of {DISTANCE_MODES}")
        _need(cfg["c"] > 0, "c must be positive")
        _need(len(cfg["t_interval"]) == 2 and cfg["t_interval"][1] > cfg["t_interval"][0],
              "t_interval must be [t0, t1] with t1 > t0")
        _need(cfg["coefficients"] in ("formula", "oracle"), "coefficients must be 'formula' or 'oracle'")
        _need(all(len(p) == cfg["n"] + 1 for p in cfg["centers"]),
              "space-time centers need n + 1 coordinates (x..., t)")
    if command == "verify":
        _need(cfg["inject_fault"] in (None, *FAULTS), f"inject_fault must be one of {FAULTS}")
    if cfg.get("centers") is not None and command != "spacetime":
        _need(all(len(p) == cfg["n"] for p in cfg["centers"]), "centers need n coordinates each")
    if cfg.get("samples") is not None:
        _need(cfg["samples"] >= 1, "samples must be >= 1")


def _basis(cfg) -> BesselRBFBasis:
    centers = cfg["centers"] if cfg["centers"] is not None else [[0.0] * cfg["n"]]
    return BesselRBFBasis(cfg["n"], cfg["R"], centers, cfg["J"], cfg["weight_mode"])


def _rule_kw(cfg):
    kw = {"angular": cfg["angular"], "angular_order": cfg["angular_order"],
          "samples": cfg["mc_samples"], "seed": cfg["mc_seed"]}
    if cfg["radial_order"] is not None:
        kw["radial_order"] = cfg["radial_order"]
    return kw


def _spatial_field(cfg, basis=None):
    name, n = cfg["field"], cfg["n"]
    center = (basis.centers[0] if basis is not None else np.zeros(n))
    if name == "zero":
        return fields.zero
    if name == "gaussian":
        return fields.gaussian(center, cfg["field_scale"])
    if name == "bump":
        return fields.bump(center, cfg.get("R", cfg["field_scale"]))
    if name == "damped_parabola":
        return fields.damped_parabola(center, cfg["R"])
    if name == "cosine_mode":
        if basis is None or not 1 <= cfg["field_mode"] <= basis.J:
            raise ConfigError("field_mode must lie in 1..J")
        return fields.cosine_mode(basis, cfg["field_mode"])
    data = np.loadtxt(cfg["field_file"], delimiter=",", skiprows=1, ndmin=2)
    return fields.tabulated(data[:, :-1], data[:, -1])


def cmd_zeros(cfg, out):
    table = bessel_zeros(cfg["order"], cfg["count"])
    aio.write_zero_table(out / "zeros.csv", table)
    return {"outputs": ["zeros.csv"], "max_residual": float(table.residuals.max())}


def _expansion(cfg):
    basis = _basis(cfg)
    f = _spatial_field(cfg, basis)
    kw = _rule_kw(cfg)
    rules = [default_rule(basis, xk, **kw) for xk in basis.centers]
    base = np.asarray(cfg["base_point"], dtype=float) if cfg["base_point"] is not None else None
    exp = expand(f, basis, rules, base_point=base,
                 alpha0_rule=default_rule(basis, base if base is not None else basis.centers.mean(0), **kw))
    return basis, f, rules, exp


def cmd_expand(cfg, out):
    basis, f, rules, exp = _expansion(cfg)
    aio.write_expansion(out / "coefficients.csv", exp)
    return {"outputs": ["coefficients.csv"], "alpha0": exp.alpha0,
            "rules": [r.meta for r in rules]}


def cmd_reconstruct(cfg, out):
    basis, f, rules, exp = _expansion(cfg)
    n, R = basis.n, basis.R
    s = np.linspace(-R, R, cfg["samples"])
    pts = np.tile(basis.centers[0], (len(s), 1))
    pts[:, 0] += s
    kw = _rule_kw(cfg)
    zeroth = None
    if basis.weight_mode == "as_printed":
        zeroth = np.array([reconstruct_zeroth(f, basis, p, default_rule(basis, p, **kw)) for p in pts])
    fhat = np.atleast_1d(reconstruct(exp, pts, zeroth))
    fv = np.atleast_1d(f(pts))
    aio.write_samples(out / "samples.csv", pts, fv, fhat)
    summary = {"max_abs_err": float(np.max(np.abs(fv - fhat))), "weight_mode": basis.weight_mode}
    if basis.weight_mode == "orthogonality_consistent":
        rule = rules[0]
        err = l2_error(f, lambda z: reconstruct(exp, z), rule)
        norm = l2_error(f, fields.zero, rule)
        summary.update(l2_error=err, relative_l2_error=err / norm if norm > 0 else None)
    aio.write_json(out / "summary.json", summary)
    return {"outputs": ["coefficients.csv", "samples.csv", "summary.json"], "summary": summary,
            "rules": [r.meta for r in rules]}


def cmd_gram(cfg, out):
    basis = _basis(cfg)
    centroid = basis.centers.mean(axis=0)
    reach = basis.R + float(np.max(np.linalg.norm(basis.centers - centroid, axis=1)))
    rule = default_rule(basis, centroid, radius=reach, **_rule_kw(cfg))
    G = gram(basis, rule)
    rows = [(i, j, G[i, j]) for i in range(len(G)) for j in range(len(G))]
    aio.write_csv(out / "gram.csv", ["row", "col", "value"], rows)
    summary = {"max_abs_identity_deviation": float(np.max(np.abs(G - np.eye(len(G))))),
               "max_asymmetry": float(np.max(np.abs(G - G.T)))}
    aio.write_json(out / "summary.json", summary)
    return {"outputs": ["gram.csv", "summary.json"], "summary": summary, "rules": [rule.meta]}


def cmd_transform(cfg, out):
    n = cfg["n"]
    f = _spatial_field({**cfg, "R": cfg["center_extent"]})
    origin = np.zeros(n)
    kw = {"angular": cfg["angular"], "samples": cfg["mc_samples"], "seed": cfg["mc_seed"]}
    rule = truncated_infinite_rule(n, origin, cfg["R_cut"], cfg["radial_order"], **kw)
    sg = spectral_grid(cfg["lambda_max"], cfg["spectral_count"], cfg["spectral_kind"])
    cg = center_grid(n, cfg["center_extent"], cfg["center_count"], cfg["center_kind"])
    eval_radius = cfg["eval_radius"] or 0.5 * cfg["center_extent"]
    eval_rule = ball_rule(n, origin, eval_radius, radial_order=64, **kw)
    td = forward_grid(f, n, sg, cg, rule)
    aio.write_transform(out / "transform.csv", td)
    report = roundtrip_report(f, n, sg, cg, rule, eval_rule).to_dict()
    aio.write_json(out / "calibration.json", report)
    return {"outputs": ["transform.csv", "calibration.json"], "calibration": report["best"],
            "rules": [rule.meta, eval_rule.meta]}


def cmd_spacetime(cfg, out):
    n = cfg["n"]
    ctx = WaveContext(cfg["c"])
    basis = SpaceTimeBasis(n, cfg["R"], ctx, cfg["centers"], cfg["J"], cfg["weight_mode"],
                           cfg["distance_mode"])
    ball = BallDomain(cfg["ball_center"] if cfg["ball_center"] is not None else basis.centers[0, :n],
                      cfg["ball_radius"] or cfg["R"])
    rules = [cone_rule(ball, cfg["t_interval"], basis.apex(k), ctx, cfg["time_order"], cfg["space_order"],
                       cfg["cone_method"], cfg["mc_samples"], cfg["mc_seed"]) for k in range(basis.K)]
    name = cfg["field"]
    if name == "zero":
        f = lambda z: np.zeros(len(np.atleast_2d(z)))
    elif name == "cosine_mode":
        if not 1 <= cfg["field_mode"] <= basis.J:
            raise ConfigError("field_mode must lie in 1..J")
        f = lambda z: st_basis_matrix(basis, 0, z)[cfg["field_mode"] - 1]
    else:
        apex = basis.centers[0]
        t_mid = 0.5 * sum(cfg["t_interval"])

        def f(z):
            z = np.atleast_2d(z)
            _, _, inside = spacetime_dist_array(z[:, :n], z[:, n], apex[:n], apex[n], ctx.c)
            r2 = np.sum((z[:, :n] - apex[:n]) ** 2, axis=1) + (z[:, n] - t_mid) ** 2
            return np.exp(-r2 / cfg["field_scale"] ** 2) * inside

    exp = st_expand(f, basis, rules)
    if cfg["coefficients"] == "oracle":
        union = rules[0] if basis.K == 1 else _box_rule(ball, cfg, ctx)
        exp = SpaceTimeExpansion(basis, exp.alpha0, st_project_oracle(f, basis, union, cfg["svd_cutoff"]))
    aio.write_expansion(out / "st_coefficients.csv", exp)

    m = max(2, int(math.ceil(math.sqrt(cfg["samples"]))))
    xs = np.linspace(-ball.radius, ball.radius, m)
    ts = np.linspace(*cfg["t_interval"], m)
    X, T = np.meshgrid(xs, ts, indexing="ij")
    pts = np.zeros((X.size, n + 1))
    pts[:, :n] = ball.center
    pts[:, 0] += X.ravel()
    pts[:, n] = T.ravel()
    fv = np.atleast_1d(f(pts))
    fhat = np.atleast_1d(st_reconstruct(exp, pts))
    in_cone = np.zeros(len(pts), dtype=bool)
    for k in range(basis.K):
        in_cone |= spacetime_dist_array(pts[:, :n], pts[:, n], basis.centers[k, :n], basis.centers[k, n], ctx.c)[2]
    aio.write_samples(out / "st_samples.csv", pts, fv, fhat, in_cone, time=True)
    r0 = rules[0]
    fr, gr = np.atleast_1d(f(r0.nodes)), np.atleast_1d(st_reconstruct(exp, r0.nodes))
    norm = float(np.sqrt(np.sum(r0.weights * fr**2)))
    err = float(np.sqrt(np.sum(r0.weights * (fr - gr) ** 2)))
    summary = {"cone_l2_error": err, "relative_cone_l2_error": err / norm if norm > 0 else None,
               "coefficients": cfg["coefficients"]}
    aio.write_json(out / "summary.json", summary)
    return {"outputs": ["st_coefficients.csv", "st_samples.csv", "summary.json"], "summary": summary,
            "rules": [r.meta for r in rules]}


def _box_rule(ball, cfg, ctx):
    # a cone whose apex sits ball_radius/c before t0 contains the whole space-time box
    t0 = cfg["t_interval"][0]
    apex = SpaceTimePoint(ball.center, t0 - ball.radius / ctx.c)
    return cone_rule(ball, cfg["t_interval"], apex, ctx, cfg["time_order"], cfg["space_order"],
                     cfg["cone_method"], cfg["mc_samples"], cfg["mc_seed"])


def cmd_verify(cfg, out):
    checks = run_checks(cfg["mc_seed"], cfg["inject_fault"])
    aio.write_csv(out / "verify.csv", ["invariant", "measured", "bound", "passed"],
                  [(c.name, c.measured, c.bound, int(c.passed)) for c in checks])
    failed = [c.name for c in checks if not c.passed]
    return {"outputs": ["verify.csv"], "failed": failed,
            "exit_status": EXIT_VERIFY if failed else EXIT_OK}


HANDLERS = {"zeros": cmd_zeros, "expand": cmd_expand, "reconstruct": cmd_reconstruct,
            "gram": cmd_gram, "transform": cmd_transform, "spacetime": cmd_spacetime,
            "verify": cmd_verify}


def build_parser():
    p = argparse.ArgumentParser(prog="besselrbf", description="Bessel RBF wavelet series and transforms")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="TOML config or a previous manifest.json")
    p.add_argument("--out", help="output directory (overrides the config's 'out')")
    p.add_argument("--seed", type=int, help="64-bit seed (overrides 'mc_seed')")
    p.add_argument("--quiet", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    say = (lambda *a: None) if args.quiet else (lambda *a: print(*a))
    started = time.perf_counter()
    out = Path(args.out) if args.out else None
    manifest = {"tool": "besselrbf", "version": __version__, "command": args.command}
    try:
        raw = load_config(args.config)
        if args.seed is not None:
            raw["mc_seed"] = args.seed
        cfg = resolve(args.command, raw)
        if out is None:
            out = Path(cfg["out"])
        cfg["out"] = str(out)
        manifest.update(config=cfg, seed=cfg["mc_seed"])
        out.mkdir(parents=True, exist_ok=True)
        result = HANDLERS[args.command](cfg, out)
        status = result.pop("exit_status", EXIT_OK)
        manifest.update(result)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        status = EXIT_CONFIG
        manifest["error"] = str(exc)
    except (BesselRBFError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        status = EXIT_NUMERIC
        manifest["error"] = f"{type(exc).__name__}: {exc}"
    manifest["exit_status"] = status
    manifest["wall_clock_s"] = time.perf_counter() - started
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        aio.write_json(out / "manifest.json", manifest)
    if status == EXIT_VERIFY:
        print("verification failed: " + ", ".join(manifest["failed"]), file=sys.stderr)
    elif status == EXIT_OK:
        say(f"{args.command}: ok -> {out}")
    return status


if __name__ == "__main__":
    sys.exit(main())
