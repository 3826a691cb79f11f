"""Command-line scenario runner.

    gaugelab run SPEC.yaml [--grid-n N] [--tol TOL] [--csv PATH] [--report PATH]
    gaugelab list-scenarios

Spec files are YAML mappings with these keys (only ``scenario`` is required):

    scenario: vertical_strip_capacitor
    params: {E0: 2.0}                 # overrides of the scenario defaults
    constants: {c: 1.0, hbar: 1.0, q: 1.0, e: 1.0, m: 1.0}
    lambda0: 0.0
    routes: [t_then_x, x_then_t]      # default: the scenario's natural pair
    grid: {n: 401, csv_n: 21, full_n: 15}   # csv_n defaults to 11 in 2+1-D
    tolerances: {residual: 1.0e-5, fixing: 1.0e-6, equality: 1.0e-5,
                 ab: 1.0e-6, causal: 1.0e-3, faraday: 1.0e-3, probe: 1.0e-6,
                 sign: 1.0e-9, oracle: 1.0e-2}
    probe: {point: [2.0, 0.0, 3.0], nonlocal_term: 6.0}
    van_kampen: {loop_radius: 10.0, t_obs: [2.0, 8.0, 14.9]}
    semiclassical: {variant: magnetic, L: 10.0, d: 0.1, v: 100.0, W: 0.05, B: 2.0}
    output: {csv: out.csv, report: out.txt}

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage or
spec errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import analysis, gauge_solver, semiclassical
from .fields import SCENARIOS, Constants, Disc, ScenarioError, builtin_config, faraday_residual
from .numerics import BoxDomain, Interval, default_grid_n

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FULL_STEP = 1e-3
FULL_QUAD_N = 101   # quadrature samples per integral for 2+1-D solutions

TOLERANCES = {"residual": 1e-5, "fixing": 1e-6, "equality": 1e-5, "ab": 1e-6, "causal": 1e-3,
              "faraday": 1e-3, "probe": 1e-6, "sign": 1e-9, "oracle": 1e-2}

SCHEMA = {
    "scenario": str, "params": dict, "constants": dict, "lambda0": float, "routes": list,
    "grid": {"n": int, "csv_n": int, "full_n": int},
    "tolerances": {k: float for k in TOLERANCES},
    "probe": {"point": list, "nonlocal_term": float},
    "van_kampen": {"loop_radius": float, "t_obs": list},
    "semiclassical": {"variant": str, "L": float, "d": float, "v": float, "m": float,
                      "q": float, "W": float, "B": float, "E": float, "T": float},
    "output": {"csv": str, "report": str},
}

ROUTE_FAMILIES = {"1d": ("naive", "oneD"), "2d": ("twoD",), "2+1d": ("full",)}

ANCHORS = {
    "fixing": "bracket-independence conditions",
    "residual": "gauge equations grad L = dA, -(1/c) dL/dt = dphi",
    "naive": "naive combined Dirac phase",
    "equality": "route equality, AB term cancelled by nonlocal term",
    "ab": "AB phase recovered through multiplicities",
    "probe": "nonlocal field double integral",
    "causal": "van Kampen: delta L = enclosed flux at t0",
    "faraday": "Faraday law on exterior loops",
    "sign": "semiclassical phase = -AB phase",
    "oracle": "fringe displacement vs Lorentz-force trajectory",
}


class SpecError(Exception):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.message, self.line, self.column = message, line, column

    def format(self, source: str) -> str:
        where = source if self.line is None else f"{source}:{self.line}:{self.column}"
        return f"{where}: {self.message}"


@dataclass
class RunSpec:
    scenario: str
    params: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    lambda0: float = 0.0
    routes: list | None = None
    grid: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    probe: dict | None = None
    van_kampen: dict | None = None
    semiclassical: dict | None = None
    output: dict = field(default_factory=dict)


def _mark(node) -> tuple[int, int]:
    return node.start_mark.line + 1, node.start_mark.column + 1


def _check_node(node, schema, path: str):
    """Reject unknown or duplicate keys and wrong value kinds, with positions."""
    if isinstance(schema, dict):
        if not isinstance(node, yaml.MappingNode):
            raise SpecError(f"{path or 'spec'} must be a mapping", *_mark(node))
        seen = set()
        for key_node, value_node in node.value:
            key = key_node.value
            if key in seen:
                raise SpecError(f"duplicate key {path + key!r}", *_mark(key_node))
            seen.add(key)
            if key not in schema:
                raise SpecError(f"unknown key {path + key!r}", *_mark(key_node))
            _check_node(value_node, schema[key], f"{path}{key}.")
        return
    if schema is dict and not isinstance(node, yaml.MappingNode):
        raise SpecError(f"{path[:-1]} must be a mapping", *_mark(node))
    if schema is list and not isinstance(node, yaml.SequenceNode):
        raise SpecError(f"{path[:-1]} must be a list", *_mark(node))
    if schema in (str, int, float) and not isinstance(node, yaml.ScalarNode):
        raise SpecError(f"{path[:-1]} must be a scalar", *_mark(node))


def _find(node, *keys):
    for key in keys:
        if not isinstance(node, yaml.MappingNode):
            return node
        for k, v in node.value:
            if k.value == key:
                node = v
                break
        else:
            return node
    return node


def load_spec(text: str) -> RunSpec:
    """Parse and validate a spec document; errors carry line and column."""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line, col = (mark.line + 1, mark.column + 1) if mark else (None, None)
        raise SpecError(f"YAML syntax error: {exc.problem}", line, col) from None
    if root is None:
        raise SpecError("empty spec file", 1, 1)
    _check_node(root, SCHEMA, "")
    if "scenario" not in data:
        raise SpecError("missing required key 'scenario'", *_mark(root))

    def convert(keys, kind, value):
        try:
            if kind is int:
                if isinstance(value, bool) or int(value) != value:
                    raise ValueError
                return int(value)
            if kind is float:
                if isinstance(value, bool):
                    raise ValueError
                out = float(value)
                if not math.isfinite(out):
                    raise ValueError
                return out
            return str(value)
        except (TypeError, ValueError):
            raise SpecError(f"{'.'.join(keys)} must be a finite {kind.__name__}",
                            *_mark(_find(root, *keys))) from None

    spec = RunSpec(scenario=convert(["scenario"], str, data["scenario"]))
    for section in ("grid", "tolerances", "probe", "van_kampen", "semiclassical", "output"):
        if section in data:
            block = {k: (convert([section, k], SCHEMA[section][k], v)
                         if SCHEMA[section][k] is not list else v)
                     for k, v in (data[section] or {}).items()}
            setattr(spec, section, block)
    for section in ("params", "constants"):
        block = data.get(section) or {}
        setattr(spec, section, {str(k): convert([section, str(k)], float, v) for k, v in block.items()})
    if "lambda0" in data:
        spec.lambda0 = convert(["lambda0"], float, data["lambda0"])
    if "routes" in data:
        spec.routes = [convert(["routes"], str, r) for r in data["routes"]]
        for r in spec.routes:
            try:
                gauge_solver.canonical_route(r)
            except gauge_solver.RouteError as exc:
                raise SpecError(str(exc), *_mark(_find(root, "routes"))) from None
    for key in ("n", "csv_n", "full_n"):
        if key in spec.grid and spec.grid[key] < 3:
            raise SpecError(f"grid.{key} must be >= 3", *_mark(_find(root, "grid", key)))
    if spec.probe is not None:
        pt = spec.probe.get("point")
        if not (isinstance(pt, list) and len(pt) == 3):
            raise SpecError("probe.point must be a list [x, y, t]", *_mark(_find(root, "probe")))
        spec.probe["point"] = [convert(["probe", "point"], float, v) for v in pt]
    if spec.van_kampen is not None and "t_obs" in spec.van_kampen:
        spec.van_kampen["t_obs"] = [convert(["van_kampen", "t_obs"], float, v)
                                    for v in spec.van_kampen["t_obs"]]
    # build the scenario now so invalid parameters are rejected at parse time
    try:
        cfg = _build_config(spec)
    except (ScenarioError, ValueError) as exc:
        raise SpecError(str(exc), *_mark(_find(root, "params" if "params" in data else "scenario")))
    for r in spec.routes or ():
        route = gauge_solver.canonical_route(r)
        if not route.startswith(ROUTE_FAMILIES[cfg.dimension]):
            raise SpecError(f"route {r} does not apply to the {cfg.dimension} scenario {cfg.name}",
                            *_mark(_find(root, "routes")))
    if spec.semiclassical is not None:
        try:
            _slit_setup(spec)
        except (ValueError, TypeError) as exc:
            raise SpecError(f"semiclassical: {exc}", *_mark(_find(root, "semiclassical"))) from None
    return spec


def _constants(spec: RunSpec) -> Constants:
    return Constants(**spec.constants)


def _build_config(spec: RunSpec):
    try:
        con = _constants(spec)
    except TypeError as exc:
        raise ValueError(f"constants: {exc}") from None
    return builtin_config(spec.scenario, spec.params, con, spec.lambda0)


def _slit_setup(spec: RunSpec) -> tuple[semiclassical.SlitSetup, str]:
    block = dict(spec.semiclassical)
    variant = block.pop("variant", "magnetic")
    if variant not in ("magnetic", "electric"):
        raise ValueError(f"variant must be magnetic or electric, got {variant!r}")
    for key in ("L", "d", "v"):
        if key not in block:
            raise ValueError(f"missing {key}")
    setup = semiclassical.SlitSetup.from_kinematics(con=_constants(spec), **block)
    return setup, variant


@dataclass
class CheckLine:
    name: str
    anchor: str
    measured: float
    tolerance: float
    passed: bool
    note: str = ""


@dataclass
class RunReport:
    scenario: str
    lines: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(line.passed for line in self.lines)

    def add(self, name, kind, measured, tol, passed=None, note=""):
        measured = float(measured)
        ok = (measured < tol) if passed is None else bool(passed)
        self.lines.append(CheckLine(name, ANCHORS[kind], measured, tol, ok, note))

    def failing(self) -> list[str]:
        return [line.name for line in self.lines if not line.passed]

    def render(self) -> str:
        w = max([len(x.name) for x in self.lines] + [5])
        a = max([len(x.anchor) for x in self.lines] + [6])
        out = [f"scenario: {self.scenario}",
               f"{'check':<{w}}  {'anchor':<{a}}  {'measured':>12}  {'tolerance':>9}  status"]
        for x in self.lines:
            status = "PASS" if x.passed else "FAIL"
            row = f"{x.name:<{w}}  {x.anchor:<{a}}  {x.measured:>12.4e}  {x.tolerance:>9.1e}  {status}"
            out.append(row + (f"  ({x.note})" if x.note else ""))
        out.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(out) + "\n"


def _capped(dom: BoxDomain, n: int) -> BoxDomain:
    return BoxDomain(tuple((k, Interval(iv.lo, iv.hi, n)) for k, iv in dom.axes))


def _routes(spec: RunSpec, cfg) -> list[str]:
    if spec.routes:
        return [gauge_solver.canonical_route(r) for r in spec.routes]
    if cfg.name == "naive_demo_polynomial":
        return ["naive_v1", "naive_v2"]
    return list(gauge_solver.routes_for(cfg))


def execute(spec: RunSpec, grid_n: int | None = None, tol: float | None = None):
    """Run every applicable check; returns ``(report, csv_text)``."""
    cfg = _build_config(spec)
    con = cfg.constants
    tols = {**TOLERANCES, **spec.tolerances}
    if tol is not None:
        tols["residual"] = tol
    n = grid_n or spec.grid.get("n") or default_grid_n()
    full_n = min(n, spec.grid.get("full_n", 15))
    csv_n = spec.grid.get("csv_n", 11 if cfg.dimension == "2+1d" else 21)
    routes = _routes(spec, cfg)
    report = RunReport(cfg.name)

    sols = {}
    full_dim = cfg.dimension == "2+1d"
    for r in routes:
        try:
            sols[r] = gauge_solver.solve(cfg, r, min(n, FULL_QUAD_N) if full_dim else n)
        except gauge_solver.FixingError as exc:
            report.add(f"fixing {r}", "fixing", math.inf, tols["fixing"], False, str(exc)[:60])
    for r, sol in sols.items():
        if sol.fixing is not None:
            for name, value in sol.fixing.condition_residuals.items():
                report.add(f"fixing {name} [{r}]", "fixing", value, tols["fixing"])
        # 2+1-D grids are coarse, so difference with a short explicit step there
        full = len(sol.coords) == 3
        dom = _capped(cfg.observation, full_n if full else n)
        res = analysis.pde_residual(sol, cfg.potentials, dom, con, tols["residual"],
                                    observable=cfg.observable, breakpoints=cfg.breakpoints,
                                    step=FULL_STEP if full else None)
        naive = r.startswith("naive")
        report.add(f"pde_residual {r}", "naive" if naive else "residual", res.max_residual,
                   tols["residual"], note="expected-fail demonstration" if naive else "")

    pair = [r for r in routes if r in sols and not r.startswith("naive")]
    expected_ab = cfg.extras.get("flux", cfg.extras.get("ab_phase_lambda"))
    if len(pair) == 2 and (cfg.connectivity == "simple" or isinstance(expected_ab, float)):
        a, b = sols[pair[0]], sols[pair[1]]
        dom = _capped(cfg.observation, full_n if len(a.coords) == 3 else n)
        diff = analysis.difference_on_grid(a, b, dom)
        mask = _mask(cfg, a, dom)
        if cfg.connectivity == "simple":
            ratio = np.abs(diff["delta_lambda"]) / (np.abs(diff["ab_term"]) + 1.0)
            report.add("route equality", "equality", _masked_max(ratio, mask), tols["equality"])
        else:
            rel = np.abs(diff["delta_lambda"] - expected_ab) / abs(expected_ab)
            report.add("AB phase from multiplicities", "ab", _masked_max(rel, mask), tols["ab"])
    if spec.probe is not None and routes[0] in sols:
        x, y, t = spec.probe["point"]
        got = float(sols[routes[0]].evaluate_components(x, y, t)["nonlocal"])
        if "nonlocal_term" in spec.probe:
            report.add(f"nonlocal term at ({x:g}, {y:g}, {t:g})", "probe",
                       abs(got - spec.probe["nonlocal_term"]), tols["probe"], note=f"value {got:.12g}")
    if cfg.name == "van_kampen_solenoid":
        _van_kampen_checks(cfg, spec, report, tols, n)
    if spec.semiclassical is not None:
        _semiclassical_checks(spec, report, tols)

    csv_text = _csv(cfg, routes, sols, csv_n)
    return report, csv_text


def _mask(cfg, sol, dom):
    tags = sol.coords
    mesh = dict(zip(tags, np.meshgrid(*[dom[k].nodes() for k in tags], indexing="ij")))
    coords = [mesh.get(k, np.full(mesh[tags[0]].shape, b)) for k, b in zip("xyt", cfg.base)]
    return np.broadcast_to(np.asarray(cfg.observable(*coords), dtype=bool), coords[0].shape)


def _masked_max(arr, mask) -> float:
    return float(np.max(arr[mask])) if mask.any() else 0.0


def _van_kampen_checks(cfg, spec, report, tols, n):
    vk = spec.van_kampen or {}
    L = vk.get("loop_radius", 10.0)
    expected = float(cfg.extras["flux"](cfg.base[2]))
    for t_obs in vk.get("t_obs", [2.0, 8.0, 14.9]):
        rep = analysis.van_kampen_delta(cfg, L, t_obs, n=n)
        report.add(f"delta Lambda at t={t_obs:g}", "causal", abs(rep.delta_lambda - expected),
                   tols["causal"])
        report.add(f"nonlocal term at t={t_obs:g}", "causal", abs(rep.nonlocal_term), 0.0,
                   passed=rep.nonlocal_term == 0.0, note="must vanish exactly")
    t0, t_end = cfg.base[2], cfg.observation["t"].hi + 10.0
    for radius in (1.0, 2.0, 4.0, L):
        worst = faraday_residual(cfg.fields, Disc(0.0, 0.0, radius), Interval(t0, t_end, 21),
                                 cfg.constants, min(n, 201))
        report.add(f"faraday r={radius:g}", "faraday", worst, tols["faraday"])


def _semiclassical_checks(spec, report, tols):
    setup, variant = _slit_setup(spec)
    row = semiclassical.summary_row(setup, variant)
    report.add(f"semi/AB ratio [{variant}]", "sign", abs(row["ratio"] + 1.0), tols["sign"],
               note="; ".join(row["warnings"]))
    closed = (semiclassical.fringe_shift_magnetic(setup) if variant == "magnetic"
              else semiclassical.fringe_shift_electric(setup))
    x_c, _ = semiclassical.trajectory_oracle(setup, variant)
    rel = abs(x_c - closed) / abs(closed) if closed != 0 else abs(x_c)
    report.add(f"oracle x_c [{variant}]", "oracle", rel, tols["oracle"])


def _csv(cfg, routes, sols, csv_n) -> str:
    built = [r for r in routes if r in sols]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y", "t", *[f"lambda_{r}" for r in built],
                     "delta_lambda", "ab_term", "nonlocal_term"])
    if not built:
        return buf.getvalue()
    dom = _capped(cfg.observation, csv_n)
    first = sols[built[0]]
    tags = first.coords
    nodes = {k: dom[k].nodes() for k in tags}
    comps = [sols[r].components_on_grid(**nodes) for r in built]
    mask = _mask(cfg, first, dom)
    mesh = dict(zip(tags, np.meshgrid(*[nodes[k] for k in tags], indexing="ij")))
    last = comps[-1]
    ab = last["potential"] - comps[0]["potential"]
    nl = last["nonlocal"] - comps[0]["nonlocal"]
    mt = last["multiplicity"] - comps[0]["multiplicity"]
    fmt = "%.12g"
    for idx in zip(*np.nonzero(mask)):
        xyz = [mesh[k][idx] if k in mesh else b for k, b in zip("xyt", cfg.base)]
        row = [*xyz, *[c["total"][idx] for c in comps], ab[idx] + nl[idx] + mt[idx], ab[idx], nl[idx]]
        writer.writerow([fmt % float(v) for v in row])
    return buf.getvalue()


def list_scenarios() -> str:
    lines = []
    for name in sorted(SCENARIOS):
        info = SCENARIOS[name]
        params = ", ".join(f"{k}={v:g}" for k, v in info.defaults.items())
        lines.append(f"{name}\n    params: {params}\n    exercises: {info.exercises}")
    return "\n".join(lines) + "\n"


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaugelab", description="Generalized gauge function checks.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario spec file")
    run.add_argument("specfile")
    run.add_argument("--grid-n", type=int, help="samples per axis for quadrature and residuals")
    run.add_argument("--tol", type=float, help="override the PDE residual tolerance")
    run.add_argument("--csv", help="write the gauge-function table here")
    run.add_argument("--report", help="write the check report here")
    sub.add_parser("list-scenarios", help="list builtin scenarios")
    return p


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    if args.command == "list-scenarios":
        sys.stdout.write(list_scenarios())
        return EXIT_PASS
    if args.grid_n is not None and args.grid_n < 3:
        print("gaugelab: --grid-n must be >= 3", file=sys.stderr)
        return EXIT_USAGE
    if args.tol is not None and not (math.isfinite(args.tol) and args.tol > 0):
        print("gaugelab: --tol must be a positive number", file=sys.stderr)
        return EXIT_USAGE
    try:
        text = Path(args.specfile).read_text()
    except OSError as exc:
        print(f"gaugelab: cannot read {args.specfile}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    try:
        spec = load_spec(text)
    except SpecError as exc:
        print(f"gaugelab: {exc.format(args.specfile)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report, csv_text = execute(spec, args.grid_n, args.tol)
    except ValueError as exc:
        print(f"gaugelab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text_report = report.render()
    sys.stdout.write(text_report)
    csv_path = args.csv or spec.output.get("csv")
    report_path = args.report or spec.output.get("report")
    if csv_path:
        Path(csv_path).write_text(csv_text)
    if report_path:
        Path(report_path).write_text(text_report)
    if not report.passed:
        print("failed checks: " + ", ".join(report.failing()), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS


if __name__ == "__main__":
    raise SystemExit(main())
