"""Scenario runner: presets, sweeps, classification reports, CSV emission.

Configuration is a flat text file with one dotted key per line::

    command = classify
    model.preset = round-fiber
    model.N = 128
    run.outdir = out

Recognized keys: model.preset, model.N, model.L, model.k, model.cF, model.f,
solver.tol, solver.max_iter, run.seed, run.outdir, yamabe.c, yamabe.negative,
prescribe.target, prescribe.p, prescribe.eps, cheeger.t_max, canonical.sweep,
approx.target, approx.p, approx.eps.

Outputs per run: report.txt (key = value lines), CSV data files at full
double precision, and gnuplot-compatible two-column files under plotdata/.
Identical configuration and seed reproduce every output byte for byte; wall
time is therefore reported on stderr only.

Exit codes: 0 success, 2 precondition rejection, 3 solver non-convergence,
4 configuration or I/O failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import canonical as cv
from .cheeger import OrbitData, homogeneous_scal, isotropy_term, scal_cheeger
from .errors import ConfigError, CurvLabError, PreconditionError, SolverError
from .models import (LeftInvariantMetric, WarpedProductMetric, get_preset,
                     scal_warped)
from .prescribe import PrescribeConfig, approximate_by_diffeo, full_prescribe
from .yamabe import (ConformalProblem, SolverConfig, classify_conformal_class,
                     conformal_scal, minimize_on_constraint,
                     solve_negative_constant)

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_SOLVER = 3
EXIT_CONFIG = 4

COMMANDS = ("classify", "yamabe", "prescribe", "cheeger", "canonical", "approx")

CANONICAL_PRESETS = {
    "product-round-fiber": dict(base_dim=2, fiber_dim=2, base_scal=0.0, fiber_scal=2.0),
    "negative-base-product": dict(base_dim=2, fiber_dim=2, base_scal=-4.0, fiber_scal=2.0),
}


# ---------------------------------------------------------------------------
# profile expressions: constants, r, sin, cos, + - * ^, parentheses
# ---------------------------------------------------------------------------


class _ExprParser:
    """Recursive-descent parser for the tiny profile grammar (no eval)."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self):
        node = self._expr()
        if self._peek():
            raise ConfigError(f"unexpected input at {self.text[self.pos:]!r}")
        return node

    def _expr(self):
        node = self._term()
        while self._peek() and self._peek() in "+-":
            op = self.text[self.pos]
            self.pos += 1
            rhs = self._term()
            node = (lambda a, b: (lambda r: a(r) + b(r)))(node, rhs) if op == "+" \
                else (lambda a, b: (lambda r: a(r) - b(r)))(node, rhs)
        return node

    def _term(self):
        node = self._factor()
        while self._peek() == "*":
            self.pos += 1
            rhs = self._factor()
            node = (lambda a, b: (lambda r: a(r) * b(r)))(node, rhs)
        return node

    def _factor(self):
        node = self._atom()
        if self._peek() == "^":
            self.pos += 1
            exponent = self._atom()
            node = (lambda a, b: (lambda r: a(r) ** b(r)))(node, exponent)
        return node

    def _atom(self):
        ch = self._peek()
        if ch == "-":
            self.pos += 1
            inner = self._atom()
            return lambda r: -inner(r)
        if ch == "(":
            self.pos += 1
            node = self._expr()
            if self._peek() != ")":
                raise ConfigError("unbalanced parenthesis in profile expression")
            self.pos += 1
            return node
        if self.text.startswith("sin", self.pos):
            self.pos += 3
            if self._peek() != "(":
                raise ConfigError("sin needs parentheses")
            inner = self._atom()
            return lambda r: np.sin(inner(r))
        if self.text.startswith("cos", self.pos):
            self.pos += 3
            if self._peek() != "(":
                raise ConfigError("cos needs parentheses")
            inner = self._atom()
            return lambda r: np.cos(inner(r))
        if ch == "r":
            self.pos += 1
            return lambda r: np.asarray(r, dtype=float)
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isdigit()
                                             or self.text[self.pos] in ".eE"
                                             or (self.text[self.pos] in "+-"
                                                 and self.text[self.pos - 1] in "eE")):
            self.pos += 1
        if start == self.pos:
            raise ConfigError(f"cannot parse profile expression at {self.text[start:]!r}")
        value = float(self.text[start:self.pos])
        return lambda r: np.full_like(np.asarray(r, dtype=float), value)


def parse_profile_expr(text: str):
    """Compile a profile expression to a vectorized callable of r."""
    return _ExprParser(text.strip()).parse()


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class ScenarioConfig:
    command: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")

    def get(self, key, default=None):
        return self.options.get(key, default)

    def get_float(self, key, default=None):
        raw = self.options.get(key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"{key} must be a number, got {raw!r}") from exc

    def get_int(self, key, default=None):
        raw = self.options.get(key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"{key} must be an integer, got {raw!r}") from exc

    def get_bool(self, key, default=False):
        raw = self.options.get(key)
        if raw is None:
            return default
        if str(raw).lower() in ("1", "true", "yes", "on"):
            return True
        if str(raw).lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key} must be a boolean, got {raw!r}")


@dataclass
class RunReport:
    command: str
    summary: dict
    residuals: dict
    input_echo: dict
    files: list
    wall_time: float


def parse_config_file(path) -> dict:
    options = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        options[key.strip()] = value.strip()
    return options


def _resolve_model(cfg: ScenarioConfig):
    name = cfg.get("model.preset", "round-fiber")
    n = cfg.get_int("model.N", 64)
    length = cfg.get_float("model.L", 2 * np.pi)
    k = cfg.get_int("model.k", 3)
    profile = None
    if cfg.get("model.f") is not None:
        profile = parse_profile_expr(cfg.get("model.f"))
    try:
        model = get_preset(name, n=n, length=length, fiber_dim=k, profile=profile)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.get("model.cF") is not None and isinstance(model, WarpedProductMetric):
        model = WarpedProductMetric.from_profile(
            n, length, k, cfg.get_float("model.cF"), model.warping)
    return model


def _require_warped(model, command):
    if not isinstance(model, WarpedProductMetric):
        raise ConfigError(f"command {command!r} needs a warped-product preset")
    return model


def _require_group(model, command):
    if not isinstance(model, LeftInvariantMetric):
        raise ConfigError(f"command {command!r} needs a group preset (su2-*)")
    return model


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, float) or isinstance(x, np.floating):
        return f"{float(x):.17g}"
    return str(x)


def emit_csv(path, header, rows) -> None:
    """Comma-separated, header line, 17 significant digits, newline-terminated."""
    rows = [list(row) for row in rows]
    width = len(header)
    for row in rows:
        if len(row) != width:
            raise ValueError("rows must be rectangular")
    lines = [",".join(header)]
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def emit_plotdata(path, xs, ys) -> None:
    lines = [f"{_fmt(x)} {_fmt(y)}" for x, y in zip(xs, ys)]
    Path(path).write_text("\n".join(lines) + "\n")


def _write_report(outdir: Path, report: RunReport) -> None:
    lines = [f"command = {report.command}"]
    for key in sorted(report.input_echo):
        lines.append(f"input.{key} = {report.input_echo[key]}")
    for key, value in report.summary.items():
        lines.append(f"{key} = {_fmt(value)}")
    for key, value in report.residuals.items():
        lines.append(f"residual.{key} = {_fmt(value)}")
    (outdir / "report.txt").write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------


def _run_classify(cfg, outdir):
    model = _require_warped(_resolve_model(cfg), "classify")
    tol = cfg.get_float("solver.tol", 1e-8)
    verdict, lam1 = classify_conformal_class(model, tol=tol)
    scal = scal_warped(model)
    emit_csv(outdir / "scal.csv", ["r", "scal"], zip(model.mesh.nodes, scal))
    emit_plotdata(outdir / "plotdata" / "scal.dat", model.mesh.nodes, scal)
    return {"verdict": verdict.value, "lambda1": lam1}, {}


def _run_yamabe(cfg, outdir):
    model = _require_warped(_resolve_model(cfg), "yamabe")
    sol_cfg = SolverConfig(tol_residual=cfg.get_float("solver.tol", 1e-9),
                           max_iter=cfg.get_int("solver.max_iter", 200_000))
    if cfg.get_bool("yamabe.negative"):
        solution, c_used = solve_negative_constant(model, sol_cfg,
                                                   c=cfg.get_float("yamabe.c"))
    else:
        c = cfg.get_float("yamabe.c", 1.0)
        problem = ConformalProblem(model, c=c)
        solution = minimize_on_constraint(problem, sol_cfg)
        c_used = c
    scal_out = conformal_scal(model, solution.u)
    emit_csv(outdir / "solution.csv", ["r", "u", "scal_out"],
             zip(model.mesh.nodes, solution.u, scal_out))
    emit_plotdata(outdir / "plotdata" / "u.dat", model.mesh.nodes, solution.u)
    summary = {"lagrange": solution.lagrange, "achieved_constant": solution.achieved_constant,
               "c_used": c_used, "iterations": solution.iterations}
    return summary, {"euler_lagrange": solution.residual_norm}


def _run_prescribe(cfg, outdir):
    model = _require_warped(_resolve_model(cfg), "prescribe")
    target_text = cfg.get("prescribe.target")
    if target_text is None:
        raise ConfigError("prescribe.target is required")
    target = parse_profile_expr(target_text)(model.mesh.nodes)
    pcfg = PrescribeConfig(p=cfg.get_float("prescribe.p", 2.0),
                           eps=cfg.get_float("prescribe.eps", 1e-2),
                           newton_tol=cfg.get_float("solver.tol", 1e-10),
                           newton_max_iter=cfg.get_int("solver.max_iter", 40))
    result = full_prescribe(model, target, pcfg)
    emit_csv(outdir / "prescription.csv", ["r", "phi", "u", "scal_out"],
             zip(model.mesh.nodes, result.phi.node_values, result.u, result.scal_out))
    emit_plotdata(outdir / "plotdata" / "scal_out.dat", model.mesh.nodes, result.scal_out)
    summary = {"c": result.c, "path": result.path, "scal_eval": result.scal_eval}
    residuals = {k: v for k, v in result.residuals.items() if not isinstance(v, tuple)}
    return summary, residuals


def _run_cheeger(cfg, outdir):
    model = _require_group(_resolve_model(cfg), "cheeger")
    orbit = OrbitData(algebra=model)
    t_max = cfg.get_float("cheeger.t_max", 1e4)
    if t_max <= 0:
        raise ConfigError("cheeger.t_max must be positive")
    predicted = homogeneous_scal(orbit) + 3.0 * isotropy_term(None)
    ts = np.logspace(-2, np.log10(t_max), 60)
    rows = []
    for t in ts:
        value = scal_cheeger(orbit, None, float(t))
        over_t = value / t
        rows.append((t, value, over_t, predicted, over_t / predicted))
    emit_csv(outdir / "sweep.csv", ["t", "scal", "scal_over_t", "predicted_limit", "ratio"], rows)
    emit_plotdata(outdir / "plotdata" / "scal_over_t.dat", ts, [r[2] for r in rows])
    return {"predicted_limit": predicted, "final_ratio": rows[-1][4]}, {}


def _run_canonical(cfg, outdir):
    name = cfg.get("model.preset", "product-round-fiber")
    if name not in CANONICAL_PRESETS:
        raise ConfigError(f"unknown canonical preset {name!r}; "
                          f"choose from {sorted(CANONICAL_PRESETS)}")
    preset = CANONICAL_PRESETS[name]
    nb, k = preset["base_dim"], preset["fiber_dim"]
    K_base = np.zeros((nb, nb))
    if preset["base_scal"]:
        pair_value = preset["base_scal"] / (nb * (nb - 1))
        K_base = np.full((nb, nb), pair_value)
        np.fill_diagonal(K_base, 0.0)
    data = cv.SubmersionPointData(base_dim=nb, fiber_dim=k, K_base=K_base,
                                  K_tot_hh=K_base.copy(), K_mixed=np.zeros((nb, k)),
                                  fiber_scal=preset["fiber_scal"])
    sweep = cfg.get("canonical.sweep", "0.01:2.0:50")
    try:
        lo, hi, steps = sweep.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError as exc:
        raise ConfigError(f"canonical.sweep must be s_min:s_max:steps, got {sweep!r}") from exc
    if lo <= 0 or hi <= lo or steps < 2:
        raise ConfigError("canonical.sweep needs 0 < s_min < s_max and steps >= 2")
    fiber_pair = preset["fiber_scal"] / (k * (k - 1)) if k > 1 else preset["fiber_scal"]
    rows = []
    for s in np.linspace(lo, hi, steps):
        hh = [cv.cv_sectional(data, s, "hh", i, j) for i in range(nb) for j in range(nb) if i != j]
        hv = [cv.cv_sectional(data, s, "hv", i, j) for i in range(nb) for j in range(k)]
        rows.append((s, cv.cv_scal(data, s), min(hh), max(hh), min(hv), max(hv),
                     cv.cv_sectional(data, s, "vv", fiber_k=fiber_pair)))
    emit_csv(outdir / "sweep.csv",
             ["s", "scal", "hh_min", "hh_max", "hv_min", "hv_max", "vv_avg"], rows)
    emit_plotdata(outdir / "plotdata" / "scal.dat", [r[0] for r in rows], [r[1] for r in rows])
    threshold = cv.positivity_threshold(data) if preset["fiber_scal"] > 0 else float("nan")
    return {"positivity_threshold": threshold}, {}


def _run_approx(cfg, outdir):
    model = _require_warped(_resolve_model(cfg), "approx")
    target_text = cfg.get("approx.target", cfg.get("prescribe.target"))
    if target_text is None:
        raise ConfigError("approx.target is required")
    target = parse_profile_expr(target_text)(model.mesh.nodes)
    source = scal_warped(model)
    result = approximate_by_diffeo(model.mesh, source, target,
                                   p=cfg.get_float("approx.p", 2.0),
                                   eps=cfg.get_float("approx.eps", 1e-2))
    phi = result.phi
    composed = np.interp(np.mod(phi.node_values, model.mesh.length),
                         np.append(model.mesh.nodes, model.mesh.length),
                         np.append(source, source[0]))
    emit_csv(outdir / "diffeo.csv", ["r", "phi", "f_of_phi", "target"],
             zip(model.mesh.nodes, phi.node_values, composed, target))
    emit_plotdata(outdir / "plotdata" / "phi.dat", model.mesh.nodes, phi.node_values)
    return {"achieved_error": result.achieved_error, "requested_eps": result.requested_eps,
            "cells": result.cells}, {}


_RUNNERS = {
    "classify": _run_classify,
    "yamabe": _run_yamabe,
    "prescribe": _run_prescribe,
    "cheeger": _run_cheeger,
    "canonical": _run_canonical,
    "approx": _run_approx,
}


def run_scenario(cfg: ScenarioConfig) -> RunReport:
    """Execute one scenario, writing report.txt, CSVs and plotdata files."""
    n = cfg.get_int("model.N", 64)
    if n is not None and n < 16:
        raise ConfigError("model.N must be at least 16")
    seed = cfg.get_int("run.seed", 0)
    np.random.seed(seed % 2**32)
    outdir = Path(cfg.get("run.outdir", "curvlab-out"))
    try:
        (outdir / "plotdata").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {outdir}: {exc}") from exc

    start = time.perf_counter()
    summary, residuals = _RUNNERS[cfg.command](cfg, outdir)
    wall = time.perf_counter() - start

    report = RunReport(command=cfg.command, summary=summary, residuals=residuals,
                       input_echo=dict(sorted(cfg.options.items())),
                       files=sorted(str(p) for p in outdir.rglob("*") if p.is_file()),
                       wall_time=wall)
    _write_report(outdir, report)
    report.files = sorted(str(p) for p in outdir.rglob("*") if p.is_file())
    return report


# ---------------------------------------------------------------------------
# command line front end
# ---------------------------------------------------------------------------

_FLAG_KEYS = {
    "model": "model.preset", "preset": "model.preset", "N": "model.N", "L": "model.L",
    "k": "model.k", "cF": "model.cF", "f": "model.f", "c": "yamabe.c",
    "target": "prescribe.target", "p": "prescribe.p", "eps": "prescribe.eps",
    "t_max": "cheeger.t_max", "sweep": "canonical.sweep", "tol": "solver.tol",
    "max_iter": "solver.max_iter", "seed": "run.seed", "outdir": "run.outdir",
}


def _build_parser():
    parser = argparse.ArgumentParser(prog="curvlab",
                                     description="invariant-curvature scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        p = sub.add_parser(command)
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a dotted configuration key")
        for flag, key in _FLAG_KEYS.items():
            p.add_argument(f"--{flag.replace('_', '-')}", dest=f"flag_{flag}", default=None)
        if command == "yamabe":
            p.add_argument("--negative", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        options = {}
        if args.config:
            options.update(parse_config_file(args.config))
        for flag, key in _FLAG_KEYS.items():
            value = getattr(args, f"flag_{flag}", None)
            if value is not None:
                options[key] = value
        if getattr(args, "negative", False):
            options["yamabe.negative"] = "true"
        for override in args.set:
            if "=" not in override:
                raise ConfigError(f"--set expects KEY=VALUE, got {override!r}")
            key, _, value = override.partition("=")
            options[key.strip()] = value.strip()
        command = options.pop("command", args.command)
        cfg = ScenarioConfig(command=command, options=options)
        report = run_scenario(cfg)
    except PreconditionError as exc:
        print(f"rejected ({exc.condition or 'precondition'}): {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CurvLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for key, value in report.summary.items():
        print(f"{key} = {_fmt(value)}")
    print(f"wall time: {report.wall_time:.3f}s", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
