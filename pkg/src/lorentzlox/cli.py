"""Command line front end: JSON config in, CSV curve and JSON report out.

Exit codes: 0 success, 2 invalid configuration, 3 mathematically
inadmissible input, 4 computed curve failed verification.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__, kernels
from .catalog import resolve_index
from .expr import DomainError, ExprSyntaxError, depends_on_u, eval_dual, parse
from .loxodrome import (QUAD_TOL, InadmissibleError, LoxodromeProblem, loxodrome_curve)
from .oracle import verify
from .profile import ProfileCurve, check_unit_speed, infer_epsilon
from .surfaces import DEGENERACY_TOL, HelicoidalSurface

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INADMISSIBLE = 3
EXIT_VERIFY = 4

DEFAULT_TOLERANCES = {
    "quadrature": QUAD_TOL,
    "degeneracy": DEGENERACY_TOL,
    "unit_speed": 1e-9,
    "angle": 1e-6,
    "metric": 1e-9,
    "ode": 1e-7,
}
DEFAULT_OUTPUT = {"dir": "out", "curve": "curve.csv", "report": "report.json",
                  "metric": "metric.csv"}
DEFAULT_CLASSIFY_POINTS = 11

_TOP_KEYS = {"surface", "profile", "loxodrome", "tolerances", "strict_unit_speed",
             "classify", "output"}


class ConfigError(ValueError):
    """Invalid configuration; ``key`` is the dotted path of the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class RunConfig:
    kind: str
    n: int
    c: float
    components: dict
    constants: dict
    epsilon: int | None
    theta0: float
    theta0_source: Any
    branch: int
    u0: float
    u1: float
    v0: float
    steps: int
    tolerances: dict
    strict_unit_speed: bool
    classify_grid: list
    output: dict = field(default_factory=dict)


def _section(raw: dict, key: str, required: bool = True) -> dict:
    if key not in raw:
        if required:
            raise ConfigError(key, "missing")
        return {}
    sec = raw[key]
    if not isinstance(sec, dict):
        raise ConfigError(key, "must be an object")
    return sec


def _reject_unknown(sec: dict, allowed: set, prefix: str) -> None:
    for k in sec:
        if k not in allowed:
            raise ConfigError(f"{prefix}.{k}" if prefix else k, "unknown key")


def _number(sec: dict, key: str, prefix: str, default=None) -> float:
    if key not in sec:
        if default is None:
            raise ConfigError(f"{prefix}.{key}", "missing")
        return float(default)
    val = sec[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(f"{prefix}.{key}", f"expected a finite number, got {val!r}")
    return float(val)


def _integer(sec: dict, key: str, prefix: str, default=None) -> int:
    if key not in sec:
        if default is None:
            raise ConfigError(f"{prefix}.{key}", "missing")
        return int(default)
    val = sec[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"{prefix}.{key}", f"expected an integer, got {val!r}")
    return val


def _constant_expr(source, constants: dict, key: str) -> float:
    if isinstance(source, (int, float)) and not isinstance(source, bool):
        return float(source)
    if not isinstance(source, str):
        raise ConfigError(key, f"expected a number or expression, got {source!r}")
    try:
        e = parse(source, constants)
    except ExprSyntaxError as exc:
        raise ConfigError(key, str(exc)) from None
    if depends_on_u(e):
        raise ConfigError(key, "must not depend on u")
    try:
        return float(eval_dual(e, 0.0, constants).value)
    except DomainError as exc:
        raise ConfigError(key, str(exc)) from None


def load_config(raw: dict) -> RunConfig:
    """Validate a parsed JSON document; raises :class:`ConfigError`."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "")

    surf = _section(raw, "surface")
    _reject_unknown(surf, {"kind", "n", "c"}, "surface")
    kind = surf.get("kind")
    if kind not in ("I", "II", "III"):
        raise ConfigError("surface.kind", f"expected 'I', 'II' or 'III', got {kind!r}")
    n = _integer(surf, "n", "surface", 4)
    if n < 4:
        raise ConfigError("surface.n", f"dimension must be >= 4, got {n}")
    c = _number(surf, "c", "surface")
    if not c > 0:
        raise ConfigError("surface.c", f"pitch must be positive, got {c!r}")

    prof = _section(raw, "profile")
    _reject_unknown(prof, {"components", "constants", "epsilon"}, "profile")
    constants = prof.get("constants", {})
    if not isinstance(constants, dict):
        raise ConfigError("profile.constants", "must be an object")
    for name, val in constants.items():
        _number(constants, name, "profile.constants")
    constants = {k: float(v) for k, v in constants.items()}
    comps_raw = prof.get("components")
    if not isinstance(comps_raw, dict) or not comps_raw:
        raise ConfigError("profile.components", "must be a non-empty object")
    components = {}
    for key, src in comps_raw.items():
        where = f"profile.components.{key}"
        try:
            idx = resolve_index(key, n)
        except ValueError:
            raise ConfigError(where, "index must be an integer, 'n' or 'n-k'") from None
        if not 1 <= idx <= n:
            raise ConfigError(where, f"index outside 1..{n}")
        if not isinstance(src, str):
            raise ConfigError(where, "expression must be a string")
        components[idx] = src
    epsilon = prof.get("epsilon")
    if epsilon is not None and epsilon not in (1, -1):
        raise ConfigError("profile.epsilon", f"must be 1 or -1, got {epsilon!r}")

    lox = _section(raw, "loxodrome")
    _reject_unknown(lox, {"theta0", "branch", "u0", "u1", "v0", "steps"}, "loxodrome")
    if "theta0" not in lox:
        raise ConfigError("loxodrome.theta0", "missing")
    theta0 = _constant_expr(lox["theta0"], constants, "loxodrome.theta0")
    branch = _integer(lox, "branch", "loxodrome", 1)
    if branch not in (1, -1):
        raise ConfigError("loxodrome.branch", f"must be 1 or -1, got {branch}")
    u0 = _number(lox, "u0", "loxodrome")
    u1 = _number(lox, "u1", "loxodrome")
    if not u1 > u0:
        raise ConfigError("loxodrome.u1", f"must exceed u0 = {u0!r}")
    v0 = _number(lox, "v0", "loxodrome", 0.0)
    steps = _integer(lox, "steps", "loxodrome", 1000)
    if steps < 2:
        raise ConfigError("loxodrome.steps", "must be at least 2")

    tol_raw = _section(raw, "tolerances", required=False)
    _reject_unknown(tol_raw, set(DEFAULT_TOLERANCES), "tolerances")
    tolerances = {}
    for k, default in DEFAULT_TOLERANCES.items():
        val = _number(tol_raw, k, "tolerances", default)
        if not val > 0:
            raise ConfigError(f"tolerances.{k}", "must be positive")
        tolerances[k] = val

    strict = raw.get("strict_unit_speed", False)
    if not isinstance(strict, bool):
        raise ConfigError("strict_unit_speed", "must be true or false")

    cls = _section(raw, "classify", required=False)
    _reject_unknown(cls, {"grid", "points", "u0", "u1"}, "classify")
    if "grid" in cls:
        grid = cls["grid"]
        if not isinstance(grid, list) or not grid:
            raise ConfigError("classify.grid", "must be a non-empty list of numbers")
        for i in range(len(grid)):
            _number({"grid": grid[i]}, "grid", "classify")
        grid = [float(g) for g in grid]
    else:
        points = _integer(cls, "points", "classify", DEFAULT_CLASSIFY_POINTS)
        if points < 1:
            raise ConfigError("classify.points", "must be at least 1")
        lo = _number(cls, "u0", "classify", u0)
        hi = _number(cls, "u1", "classify", u1)
        grid = [lo] if points == 1 else np.linspace(lo, hi, points).tolist()

    out = _section(raw, "output", required=False)
    _reject_unknown(out, set(DEFAULT_OUTPUT), "output")
    output = dict(DEFAULT_OUTPUT)
    for k, v in out.items():
        if not isinstance(v, str) or not v:
            raise ConfigError(f"output.{k}", "must be a non-empty string")
        output[k] = v

    return RunConfig(kind, n, c, components, constants, epsilon, theta0, lox["theta0"],
                     branch, u0, u1, v0, steps, tolerances, strict, grid, output)


# -- pipeline ---------------------------------------------------------------

def build_profile(cfg: RunConfig) -> ProfileCurve:
    """Profile curve with epsilon taken from the config or inferred at u0."""
    try:
        profile = ProfileCurve.from_strings(cfg.kind, cfg.n, cfg.components,
                                            cfg.epsilon or 1, cfg.constants)
    except ExprSyntaxError as exc:
        raise ConfigError("profile.components", str(exc)) from None
    except ValueError as exc:
        raise ConfigError("profile", str(exc)) from None
    if cfg.epsilon is None:
        try:
            profile = profile.with_epsilon(infer_epsilon(profile, cfg.u0))
        except ValueError as exc:
            raise ConfigError("profile.epsilon", f"{exc}; set it explicitly") from None
    return profile


def _write_csv(path: Path, header: list, rows: np.ndarray) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{x:.17g}" for x in row))
    path.write_bytes(("\n".join(lines) + "\n").encode("ascii"))


def _write_json(path: Path, doc: dict) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2, allow_nan=False)
    path.write_bytes((text + "\n").encode("utf-8"))


def _finite(x):
    return float(x) if x is not None and math.isfinite(x) else None


def classify(cfg: RunConfig, out_dir: Path) -> list:
    """Tabulate (u, E, F, G, causal) over the classify grid and write metric.csv."""
    surface = HelicoidalSurface(build_profile(cfg), cfg.c)
    rows = [surface.first_fundamental_form(u, cfg.tolerances["degeneracy"]) for u in cfg.classify_grid]
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["u,E,F,G,causal"]
    for r in rows:
        lines.append(f"{r.u:.17g},{r.E:.17g},{r.F:.17g},{r.G:.17g},{r.causal.value}")
    (out_dir / cfg.output["metric"]).write_bytes(("\n".join(lines) + "\n").encode("ascii"))
    return rows


def _base_report(cfg: RunConfig, profile: ProfileCurve | None) -> dict:
    return {
        "version": __version__,
        "backend": kernels.active.NAME,
        "surface": {"kind": cfg.kind, "n": cfg.n, "c": cfg.c},
        "epsilon": None if profile is None else profile.epsilon,
        "theta0": cfg.theta0,
        "branch": cfg.branch,
        "u0": cfg.u0,
        "u1": cfg.u1,
        "v0": cfg.v0,
        "steps": cfg.steps,
        "tolerances": dict(cfg.tolerances),
        "strict_unit_speed": cfg.strict_unit_speed,
    }


def run(cfg: RunConfig, out_dir: Path, *, err=None) -> int:
    """Full pipeline; returns the process exit code."""
    err = sys.stderr if err is None else err
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / cfg.output["report"]
    tol = cfg.tolerances
    profile = None

    def inadmissible(message: str, bracket=None) -> int:
        doc = _base_report(cfg, profile)
        doc.update(status="inadmissible", error=message,
                   bracket=None if bracket is None else [float(bracket[0]), float(bracket[1])])
        _write_json(report_path, doc)
        print(f"inadmissible: {message}", file=err)
        if bracket is not None:
            print(f"bracket: [{bracket[0]!r}, {bracket[1]!r}]", file=err)
        return EXIT_INADMISSIBLE

    try:
        profile = build_profile(cfg)
    except DomainError as exc:
        return inadmissible(str(exc))
    grid = np.linspace(cfg.u0, cfg.u1, cfg.steps + 1)
    try:
        speed = check_unit_speed(profile, grid, tol["unit_speed"])
    except DomainError as exc:
        return inadmissible(str(exc))
    if not speed.passed:
        msg = (f"profile is not unit speed: form = {speed.worst_form!r} at u = {speed.worst_u!r}, "
               f"expected {speed.epsilon}")
        if cfg.strict_unit_speed:
            print(f"profile: {msg}", file=err)
            return EXIT_INVALID
        print(f"warning: {msg}", file=err)

    surface = HelicoidalSurface(profile, cfg.c)
    try:
        problem = LoxodromeProblem.on(surface, cfg.theta0, cfg.u0, branch=cfg.branch, v0=cfg.v0,
                                      tol=tol["degeneracy"])
        curve = loxodrome_curve(problem, cfg.u1, cfg.steps, tol=tol["quadrature"],
                                degeneracy_tol=tol["degeneracy"])
    except InadmissibleError as exc:
        return inadmissible(str(exc), exc.bracket)
    except DomainError as exc:
        return inadmissible(str(exc))
    except ValueError as exc:
        # angle/epsilon combinations with no loxodrome equation
        return inadmissible(str(exc))

    rep = verify(curve, problem, tol["degeneracy"])
    ok = rep.passed(tol["angle"], tol["metric"], tol["ode"])

    header = ["u", "v"] + [f"x{i}" for i in range(1, cfg.n + 1)]
    rows = np.column_stack([curve.u, curve.v, curve.points])
    _write_csv(out_dir / cfg.output["curve"], header, rows)

    doc = _base_report(cfg, profile)
    doc.update(
        status="ok" if ok else "verification_failed",
        surface_causal=problem.angle.surface_causal.value,
        theta_eff=problem.angle.theta_eff,
        arc_length=_finite(curve.arc_length),
        v_end=float(curve.v[-1]),
        unit_speed={"passed": speed.passed, "worst_u": speed.worst_u,
                    "worst_violation": speed.worst_violation},
        verification=rep.as_dict(),
    )
    _write_json(report_path, doc)
    if not ok:
        print("verification failed: " + json.dumps(rep.as_dict(), sort_keys=True), file=err)
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lorentzlox",
                                description="Loxodromes on helicoidal surfaces in Lorentzian n-space.")
    p.add_argument("--config", required=True, type=Path, help="JSON run configuration")
    p.add_argument("--classify-only", action="store_true",
                   help="only tabulate E, F, G and the causal type on the classify grid")
    p.add_argument("--strict-unit-speed", action="store_true", default=None,
                   help="treat a non unit-speed profile as a configuration error")
    p.add_argument("--steps", type=int, help="number of quadrature steps (samples - 1)")
    p.add_argument("--output-dir", type=Path, help="directory for curve.csv / report.json")
    p.add_argument("--backend", choices=kernels.BACKENDS, help="kernel backend (default: env or numba)")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = json.loads(args.config.read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"config: cannot read {args.config}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID
    except json.JSONDecodeError as exc:
        print(f"config: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if isinstance(raw, dict):
        if args.steps is not None:
            raw.setdefault("loxodrome", {})
            if isinstance(raw["loxodrome"], dict):
                raw["loxodrome"]["steps"] = args.steps
        if args.strict_unit_speed:
            raw["strict_unit_speed"] = True
    try:
        cfg = load_config(raw)
    except ConfigError as exc:
        print(f"config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.backend:
        kernels.use(args.backend)
    out_dir = args.output_dir if args.output_dir is not None else Path(cfg.output["dir"])
    try:
        if args.classify_only:
            rows = classify(cfg, out_dir)
            for r in rows:
                print(f"{r.u:.17g}\t{r.E:.17g}\t{r.F:.17g}\t{r.G:.17g}\t{r.causal.value}")
            return EXIT_OK
        return run(cfg, out_dir)
    except ConfigError as exc:
        print(f"config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DomainError as exc:
        print(f"inadmissible: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE


if __name__ == "__main__":
    sys.exit(main())
