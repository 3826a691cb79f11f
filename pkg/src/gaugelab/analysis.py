"""Verification layer: PDE residuals, route differences, fluxes, the switched
solenoid phase and the wavefunction phase map."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .fields import (Constants, Disc, PotentialSet, Rectangle, ScenarioConfig, circulation,
                     flux_through)
from .gauge_solver import GaugeSolution, routes_for, solve
from .numerics import BoxDomain, Interval, default_grid_n, evaluate, integrate_between

DEFAULT_RESIDUAL_TOL = 1e-5


@dataclass(frozen=True)
class ResidualReport:
    max_spatial_residual: dict
    max_temporal_residual: float | None
    worst_point: dict
    grid: BoxDomain
    tolerance: float
    points_checked: int

    @property
    def max_residual(self) -> float:
        vals = list(self.max_spatial_residual.values())
        if self.max_temporal_residual is not None:
            vals.append(self.max_temporal_residual)
        return max(vals, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance


@dataclass(frozen=True)
class PhaseReport:
    ab_term: float
    nonlocal_term: float
    multiplicity_term: float
    delta_lambda: float
    phase: float
    point: tuple | None = None

    def decomposition_error(self) -> float:
        return abs(self.ab_term + self.nonlocal_term + self.multiplicity_term - self.delta_lambda)


@dataclass(frozen=True)
class WavefunctionSample:
    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        vals = np.atleast_1d(np.asarray(self.values, dtype=complex))
        if pts.shape[1] != 3:
            raise ValueError("points must be (x, y, t) triples")
        if pts.shape[0] != vals.shape[0]:
            raise ValueError("one amplitude per point is required")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(vals))):
            raise ValueError("wavefunction samples must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)


def _potential_slots(con: Constants, p: PotentialSet):
    """Per-axis (target, scale): the residual is ``|scale * dLambda - target|``."""
    return {
        "x": (lambda X, Y, T: evaluate(p.A_x, X, Y, T), 1.0),
        "y": (lambda X, Y, T: evaluate(p.A_y, X, Y, T), 1.0),
        "t": (lambda X, Y, T: -evaluate(p.phi, X, Y, T), 1.0 / con.c),
    }


def _coords_3(sol, grids, t0):
    X = grids.get("x")
    Y = grids.get("y", np.zeros_like(X))
    T = grids.get("t", np.full_like(X, t0))
    return X, Y, T


def _straddles(tag: str, tags, nodes: dict, h: float, breakpoints: Callable) -> np.ndarray:
    """Mask of grid points whose stencil along ``tag`` contains a breakpoint."""
    ax = tags.index(tag)
    others = [k for k in tags if k != tag]
    shape = tuple(nodes[k].size for k in tags)
    out = np.zeros(shape, dtype=bool)
    along = nodes[tag]
    for combo in np.ndindex(*[nodes[k].size for k in others]):
        coords = {k: float(nodes[k][i]) for k, i in zip(others, combo)}
        bks = np.asarray(breakpoints(tag, **coords), dtype=float)
        if bks.size == 0:
            continue
        hit = (np.abs(along[:, None] - bks[None, :]) < h * (1.0 - 1e-9)).any(axis=1)
        index = list(combo)
        index.insert(ax, slice(None))
        out[tuple(index)] = hit
    return out


def pde_residual(sol: GaugeSolution, p: PotentialSet, dom: BoxDomain, con: Constants,
                 tol: float = DEFAULT_RESIDUAL_TOL, observable: Callable | None = None,
                 step: float | None = None,
                 breakpoints: Callable | None = None) -> ResidualReport:
    """Finite-difference check of ``grad Lambda = A`` and ``-(1/c) dLambda/dt = phi``.

    With ``step=None`` the differences use the grid spacing and Lambda is
    evaluated once on the grid; the outermost grid layer is excluded. With an
    explicit ``step`` Lambda is re-evaluated on grids shifted by ``+-step``
    along each axis. ``observable(x, y, t)`` restricts the check to points
    (and, for grid differences, stencils) inside the region where the
    solution is meant to hold. Stencils that straddle a declared
    ``breakpoints(axis, **coords)`` location of the potentials are skipped,
    since a difference quotient across a kink or jump of A or phi does not
    approximate the derivative there.
    """
    slots = _potential_slots(con, p)
    t0 = sol.base[2]
    tags = sol.coords
    nodes = {k: dom[k].nodes() for k in tags}
    mesh = dict(zip(tags, np.meshgrid(*[nodes[k] for k in tags], indexing="ij")))
    X, Y, T = _coords_3(sol, mesh, t0)
    inside = np.ones(X.shape, dtype=bool)
    if observable is not None:
        inside = np.broadcast_to(np.asarray(observable(X, Y, T), dtype=bool), X.shape).copy()

    residual = {}
    worst = (-1.0, None)
    checked = np.zeros(X.shape, dtype=bool)
    lam = sol.components_on_grid(**nodes)["total"] if step is None else None
    for ax, tag in enumerate(tags):
        target_fn, scale = slots[tag]
        if step is None:
            h = dom[tag].spacing
            sl_mid = [slice(None)] * len(tags)
            sl_hi = [slice(None)] * len(tags)
            sl_lo = [slice(None)] * len(tags)
            sl_mid[ax], sl_hi[ax], sl_lo[ax] = slice(1, -1), slice(2, None), slice(0, -2)
            deriv = np.full(X.shape, np.nan)
            deriv[tuple(sl_mid)] = (lam[tuple(sl_hi)] - lam[tuple(sl_lo)]) / (2.0 * h)
            ok = np.zeros(X.shape, dtype=bool)
            ok[tuple(sl_mid)] = inside[tuple(sl_mid)] & inside[tuple(sl_hi)] & inside[tuple(sl_lo)]
        else:
            plus = dict(nodes)
            minus = dict(nodes)
            plus[tag] = nodes[tag] + step
            minus[tag] = nodes[tag] - step
            deriv = (sol.components_on_grid(**plus)["total"]
                     - sol.components_on_grid(**minus)["total"]) / (2.0 * step)
            ok = inside
        # exclude the one-cell margin on every axis
        margin = np.zeros(X.shape, dtype=bool)
        core = tuple(slice(1, -1) if nodes[k].size > 2 else slice(None) for k in tags)
        margin[core] = True
        ok = ok & margin
        if breakpoints is not None:
            ok = ok & ~_straddles(tag, tags, nodes, dom[tag].spacing if step is None else step,
                                  breakpoints)
        checked |= ok
        res = np.abs(scale * deriv - target_fn(X, Y, T))
        res = np.where(ok, res, 0.0)
        residual[tag] = float(res.max()) if ok.any() else 0.0
        if ok.any() and residual[tag] > worst[0]:
            idx = np.unravel_index(int(np.argmax(res)), res.shape)
            worst = (residual[tag], {k: float(mesh[k][idx]) for k in tags} | {"axis": tag})
    spatial = {k: v for k, v in residual.items() if k != "t"}
    temporal = residual.get("t")
    return ResidualReport(spatial, temporal, worst[1] or {}, dom, tol, int(checked.sum()))


def _points(pts) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(pts, dtype=float))
    if arr.shape[1] == 2:
        arr = np.column_stack([arr[:, 0], np.zeros(len(arr)), arr[:, 1]])
    if arr.shape[1] != 3:
        raise ValueError("points must be (x, y, t) triples")
    return arr


def _check_pair(a: GaugeSolution, b: GaugeSolution):
    if not np.allclose(a.base, b.base, rtol=0.0, atol=0.0) or a.lambda0 != b.lambda0:
        raise ValueError(f"solutions have different bases: {a.base}/{a.lambda0} vs "
                         f"{b.base}/{b.lambda0}")


def solution_difference(a: GaugeSolution, b: GaugeSolution, pts,
                        con: Constants | None = None) -> list[PhaseReport]:
    """``Lambda_b - Lambda_a`` at each point, split into its constituents.

    ``ab_term`` is the difference of the potential line integrals (the closed
    circuit integral), ``nonlocal_term`` the difference of the field double
    integrals together with the fixing functions, ``multiplicity_term`` the
    difference of the multiplicity constants.
    """
    _check_pair(a, b)
    con = con or Constants()
    arr = _points(pts)
    ca = a.evaluate_components(arr[:, 0], arr[:, 1], arr[:, 2])
    cb = b.evaluate_components(arr[:, 0], arr[:, 1], arr[:, 2])
    out = []
    for i in range(arr.shape[0]):
        ab = float(cb["potential"][i] - ca["potential"][i])
        nl = float(cb["nonlocal"][i] - ca["nonlocal"][i])
        mt = float(cb["multiplicity"][i] - ca["multiplicity"][i])
        delta = ab + nl + mt
        out.append(PhaseReport(ab, nl, mt, delta, con.q * delta / (con.hbar * con.c),
                               tuple(arr[i])))
    return out


def difference_on_grid(a: GaugeSolution, b: GaugeSolution, dom: BoxDomain) -> dict:
    """Grid version of :func:`solution_difference`; returns arrays keyed by
    ``lambda_a``, ``lambda_b``, ``delta_lambda``, ``ab_term``, ``nonlocal_term``
    and ``multiplicity_term``."""
    _check_pair(a, b)
    if a.coords != b.coords:
        raise ValueError("solutions depend on different coordinates")
    nodes = {k: dom[k].nodes() for k in a.coords}
    ca = a.components_on_grid(**nodes)
    cb = b.components_on_grid(**nodes)
    ab = cb["potential"] - ca["potential"]
    nl = cb["nonlocal"] - ca["nonlocal"]
    mt = cb["multiplicity"] - ca["multiplicity"]
    return {"lambda_a": ca["total"], "lambda_b": cb["total"], "delta_lambda": ab + nl + mt,
            "ab_term": ab, "nonlocal_term": nl, "multiplicity_term": mt}


def enclosed_flux(fn: Callable, region, kind: str = "magnetic", con: Constants | None = None,
                  n: int | None = None, breakpoints: Callable | None = None) -> float:
    """Area integral of a field over a region.

    ``magnetic``: ``fn(x, y)`` over a rectangle, triangle or disc.
    ``electric_spacetime``: ``fn(x, t)`` over a spacetime rectangle given as
    ``Rectangle(x0, x1, t0, t1)``, multiplied by ``c``; the result is signed by
    the orientation of the rectangle (base corner first).
    """
    n = default_grid_n() if n is None else n
    breaks = breakpoints or (lambda axis, **coords: [])
    if kind == "magnetic":
        return flux_through(fn, region, n, breaks)
    if kind == "electric_spacetime":
        if not isinstance(region, Rectangle):
            raise TypeError("electric spacetime flux needs a rectangle in (x, t)")
        con = con or Constants()
        sign = math.copysign(1.0, region.x1 - region.x0) * math.copysign(1.0, region.y1 - region.y0)

        def tbreaks(axis, **coords):
            if axis == "y":
                return breaks("t", **{k: v for k, v in coords.items() if k != "x"})
            return breaks(axis, **{("t" if k == "y" else k): v for k, v in coords.items()})

        return sign * con.c * flux_through(fn, region, n, tbreaks)
    raise ValueError(f"kind must be magnetic or electric_spacetime, got {kind!r}")


def van_kampen_delta(cfg: ScenarioConfig, loop_radius: float, t_obs: float,
                     con: Constants | None = None, n: int | None = None) -> PhaseReport:
    """Primary-minus-dual gauge difference on a circle of radius ``loop_radius``
    centred on the switched solenoid.

    ``ab_term`` is the circuit integral of A at ``t_obs``, obtained as the B
    flux through the disc; ``nonlocal_term`` is ``c int_{t0}^{t_obs} (circuit
    integral of E) dt'``. Outside the light cone of the switch the electric
    field vanishes identically on the loop, so the nonlocal term is exactly 0.
    """
    if cfg.name != "van_kampen_solenoid":
        raise ValueError(f"van_kampen_delta needs the van_kampen_solenoid scenario, got {cfg.name}")
    con = con or cfg.constants
    n = default_grid_n() if n is None else n
    R = cfg.params["core_radius"]
    if not loop_radius > R:
        raise ValueError(f"loop of radius {loop_radius} intersects the solenoid core (radius {R})")
    f = cfg.fields
    t0 = cfg.base[2]
    M = cfg.extras
    loop = Disc(0.0, 0.0, float(loop_radius))

    def rbreaks(t):
        return lambda axis, **_: M["radial_breaks"](t) if axis == "r" else []

    ab = flux_through(lambda x, y: f.B(x, y, t_obs), loop, n, rbreaks(t_obs))

    def circ(tt):
        return circulation(lambda x, y: f.E_x(x, y, tt), lambda x, y: f.E_y(x, y, tt), loop, n)

    t_s, ramp, shell = cfg.params["t_switch"], cfg.params["ramp"], cfg.params["shell_width"]
    arrivals = [t_s, t_s + ramp, t_s + (loop_radius - shell) / con.c, t_s + loop_radius / con.c,
                t_s + (loop_radius + shell) / con.c]
    nonlocal_ = 0.0
    if t_obs != t0:
        nonlocal_ = con.c * integrate_between(np.vectorize(circ), t0, t_obs, n, arrivals)
    delta = ab + nonlocal_
    return PhaseReport(ab, nonlocal_, 0.0, delta, con.q * delta / (con.hbar * con.c),
                       (loop_radius, 0.0, t_obs))


def phase_map(psi1: WavefunctionSample, sol: GaugeSolution, con: Constants) -> WavefunctionSample:
    """``Psi_2 = exp(i q Lambda / (hbar c)) Psi_1`` at every sample point."""
    pts = psi1.points
    lam = np.atleast_1d(sol.evaluate(pts[:, 0], pts[:, 1], pts[:, 2]))
    factor = np.exp(1j * con.q * lam / (con.hbar * con.c))
    return WavefunctionSample(pts, factor * psi1.values)


@dataclass(frozen=True)
class CancellationReport:
    max_ratio: float
    ab_at_max_circuit: float
    nonlocal_at_max_circuit: float
    worst_point: dict = field(default_factory=dict)

    def passed(self, tol: float = 1e-5) -> bool:
        return self.max_ratio < tol


def werner_brill_cancellation(cfg: ScenarioConfig, dom: BoxDomain | None = None,
                              n: int | None = None) -> CancellationReport:
    """Route-difference cancellation for a simple-connected scenario.

    Reports ``max |delta| / (|ab| + 1)`` over the observable points of ``dom``
    and the two terms at the circuit spanned by the far corner of ``dom``.
    """
    if cfg.connectivity != "simple":
        raise ValueError("cancellation holds for simple-connected scenarios only")
    dom = dom or cfg.observation
    r1, r2 = routes_for(cfg)
    a, b = solve(cfg, r1, n), solve(cfg, r2, n)
    diff = difference_on_grid(a, b, dom)
    tags = a.coords
    mesh = dict(zip(tags, np.meshgrid(*[dom[k].nodes() for k in tags], indexing="ij")))
    X, Y, T = _coords_3(a, mesh, cfg.base[2])
    mask = np.broadcast_to(np.asarray(cfg.observable(X, Y, T), dtype=bool), X.shape)
    ratio = np.abs(diff["delta_lambda"]) / (np.abs(diff["ab_term"]) + 1.0)
    ratio = np.where(mask, ratio, 0.0)
    idx = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    corner = tuple(-1 for _ in tags)
    return CancellationReport(float(ratio.max()), float(diff["ab_term"][corner]),
                              float(diff["nonlocal_term"][corner]),
                              {k: float(mesh[k][idx]) for k in tags})
