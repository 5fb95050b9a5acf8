"""Command-line front end: ``bosonic-bvp solve`` and ``bosonic-bvp verify``.

Configs are JSON documents validated against :data:`CONFIG_SCHEMA`.
Reports are CSV files whose first line is ``# bosonic-bvp v<schema>``.
Exit codes: 0 pass, 1 verification failure, 2 config error, 3 guard
violation, 4 budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import jsonschema
import numpy as np

from . import solver as S
from .budget import ENV_VAR
from .errors import BudgetError, DomainError, GuardError, BosonicError
from .harmonic import harmonic_basis
from .kernels import KernelConstants
from .suites import SUITES, SuiteContext, run_suite

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_GUARD, EXIT_BUDGET = 0, 1, 2, 3, 4

_vector = {"type": "array", "items": {"type": "number"}}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "m", "k"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "m": {"type": "integer", "minimum": 3, "maximum": 8},
        "k": {"type": "integer", "minimum": 1, "maximum": 8},
        "domain": {"enum": ["ball", "halfspace"]},
        "datum": {
            "type": "object",
            "required": ["kind", "coefficients"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["constant", "polynomial", "gaussian", "bump", "exponential"]},
                "coefficients": {"type": "array"},
                "center": _vector,
                "width": {"type": "number", "exclusiveMinimum": 0},
                "radius": {"type": "number", "exclusiveMinimum": 0},
                "exponents": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
                "directions": {"type": "array", "items": _vector},
            },
        },
        "quadrature": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "radial_order": {"type": "integer", "minimum": 2, "maximum": 200},
                "angular_degree": {"type": "integer", "minimum": 1, "maximum": 400},
                "sphere_degree": {"type": "integer", "minimum": 1, "maximum": 400},
                "panel_order": {"type": "integer", "minimum": 2, "maximum": 200},
                "focus_threshold": {"type": "number", "minimum": 0, "maximum": 1},
                "ratio": {"type": "number", "exclusiveMinimum": 1},
                "reach_factor": {"type": "number", "exclusiveMinimum": 0},
                "guard": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "points": {"type": "array", "items": _vector},
                "nu": {"type": "array", "items": _vector},
                "tolerances": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
            },
        },
        "seed": {"type": "integer", "minimum": 0},
    },
}


class ConfigError(Exception):
    pass


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config {path} invalid at {where}: {exc.message}") from exc
    return cfg


def settings_from(cfg: dict, threads: int | None = None) -> S.RuleSettings:
    return S.RuleSettings(workers=threads, **cfg.get("quadrature", {}))


def build_datum(cfg: dict) -> S.BoundaryDatum:
    if "domain" not in cfg or "datum" not in cfg:
        raise ConfigError("solve needs 'domain' and 'datum'")
    m, k = cfg["m"], cfg["k"]
    B = harmonic_basis(m, k)
    d = cfg["datum"]
    dom = "sphere" if cfg["domain"] == "ball" else "hyperplane"
    kind = d["kind"]
    coeffs = d["coefficients"]
    try:
        if kind == "constant":
            return S.constant_datum(B, coeffs, dom)
        if kind == "gaussian":
            return S.gaussian_datum(B, coeffs, d.get("center"), d.get("width", 1.0), dom)
        if kind == "bump":
            return S.bump_datum(B, coeffs, d.get("center"), d.get("radius", 1.0), dom)
        if kind == "exponential":
            if dom != "sphere":
                raise ConfigError("exponential data are only admitted on the sphere")
            if "directions" not in d:
                raise ConfigError("exponential datum needs 'directions'")
            return S.exponential_datum(B, coeffs, d["directions"])
        if "exponents" not in d:
            raise ConfigError("polynomial datum needs 'exponents'")
        if dom == "hyperplane":
            raise ConfigError("polynomial data grow at infinity and are only admitted on the sphere")
        return S.polynomial_datum(B, coeffs, d["exponents"], dom)
    except (ValueError, DomainError) as exc:
        raise ConfigError(f"datum: {exc}") from exc


def _fmt(x: float) -> str:
    return format(float(x), ".15e")


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(f"# bosonic-bvp v{SCHEMA_VERSION}\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _write_atomic(out: Path, files: dict[str, str]) -> None:
    """Write all files or none: stage in a temporary directory, then move into place."""
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(dir=out) as tmp:
        for name, text in files.items():
            with open(os.path.join(tmp, name), "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        for name in files:
            os.replace(os.path.join(tmp, name), out / name)


def solve(cfg: dict, threads: int | None = None) -> dict[str, str]:
    """Evaluate the configured solution at the sample points; returns file name -> contents."""
    m, k = cfg["m"], cfg["k"]
    f = build_datum(cfg)
    st = settings_from(cfg, threads)
    outs = cfg.get("outputs", {})
    pts = np.asarray(outs.get("points", [[0.0] * (m - 1) + ([0.5] if cfg["domain"] == "halfspace" else [0.0])]), float)
    nus = np.asarray(outs.get("nu", [np.eye(m)[0].tolist()]), float)
    if pts.ndim != 2 or pts.shape[1] != m or nus.ndim != 2 or nus.shape[1] != m:
        raise ConfigError(f"sample points and nu vectors must have {m} coordinates")
    if np.any(np.linalg.norm(nus, axis=1) > 1 + 1e-12):
        raise ConfigError("nu vectors must lie in the closed unit ball")
    if cfg["domain"] == "halfspace":
        bad = pts[pts[:, -1] <= 0]
        if len(bad):
            raise GuardError(f"sample point {bad[0].tolist()} is not in the upper half-space (y <= 0)")
        coef = np.array([S.poisson_coefficients_half(f, x, st) for x in pts])
    else:
        coef = np.array([S.poisson_coefficients_ball(f, x, st) for x in pts])
    B = f.basis
    header = [f"x_{i}" for i in range(1, m + 1)] + [f"nu_{i}" for i in range(1, m + 1)] + ["value"] + \
             [f"g_{j}" for j in range(1, B.dim + 1)]
    rows = []
    for x, c in zip(pts, coef):
        for nu in nus:
            val = float(B.evaluate(nu) @ c)
            rows.append([_fmt(v) for v in x] + [_fmt(v) for v in nu] + [_fmt(val)] + [_fmt(v) for v in c])
    const = KernelConstants(m, k).as_dict()
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "command": "solve",
        "constants": const,
        "domain": cfg["domain"],
        "datum": {"kind": cfg["datum"]["kind"], "label": f.label, "decay": f.decay},
        "rules": {kk: v for kk, v in st.as_dict().items() if kk != "workers"},
        "budget_env": ENV_VAR,
        "samples": len(rows),
    }
    return {"solution.csv": _csv_text(header, rows),
            "manifest.json": json.dumps(manifest, indent=2, sort_keys=True) + "\n"}


def verify(cfg: dict, suite: str, threads: int | None = None, tolerance_scale: float = 1.0):
    """Run a named suite; returns (file name -> contents, all_passed)."""
    ctx = SuiteContext(m=cfg["m"], k=cfg["k"], settings=settings_from(cfg, threads),
                       tolerance_scale=tolerance_scale,
                       overrides=cfg.get("outputs", {}).get("tolerances", {}),
                       seed=cfg.get("seed", 12345))
    rows = run_suite(suite, ctx)
    body = [[r.check_id, r.anchor, _fmt(r.measured), r.tolerance_text(), "pass" if r.passed else "FAIL"]
            for r in rows]
    ok = all(r.passed for r in rows)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "suite": suite,
        "constants": KernelConstants(cfg["m"], cfg["k"]).as_dict(),
        "rules": {kk: v for kk, v in ctx.settings.as_dict().items() if kk != "workers"},
        "tolerance_scale": tolerance_scale,
        "rows": len(rows),
        "failed": sum(not r.passed for r in rows),
    }
    return ({f"report-{suite}.csv": _csv_text(["check_id", "anchor", "measured", "tolerance", "pass"], body),
             f"manifest-{suite}.json": json.dumps(manifest, indent=2, sort_keys=True) + "\n"}, ok)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bosonic-bvp",
                                     description="Poisson-kernel solver and verification suites for bosonic Laplacians.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="JSON problem configuration")
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--threads", type=int, default=None, help="worker threads for quadrature")
    sub.add_parser("solve", parents=[common], help="evaluate the solution at sample points")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", required=True, help=f"one of: {', '.join(SUITES)}")
    v.add_argument("--tolerance-scale", type=float, default=1.0, help="multiply all suite tolerances")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be positive")
        cfg = load_config(args.config)
        if args.command == "solve":
            files, ok = solve(cfg, args.threads), True
        else:
            if args.suite not in SUITES:
                raise ConfigError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
            if not args.tolerance_scale > 0:
                raise ConfigError("--tolerance-scale must be positive")
            files, ok = verify(cfg, args.suite, args.threads, args.tolerance_scale)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (GuardError, DomainError) as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except BosonicError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    _write_atomic(Path(args.out), files)
    if args.command == "verify":
        for line in files[f"report-{args.suite}.csv"].splitlines()[2:]:
            print(line)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
