"""Construction of gauge functions Lambda for every supported route.

Two-coordinate problems (1-D dynamic on ``(x, t)`` and 2-D static on
``(x, y)``) share one implementation. Both are phrased on a plane ``(u, v)``
with ``u = x`` and ``v = t`` or ``y``, two "potential components"

    a_u = A_x,   a_v = -c*phi (dynamic)  or  A_y (static)

and the plane "field" ``F = d_u a_v - d_v a_u`` (``c*E_x`` or ``B``). Route 1
integrates ``a_v`` along the base column and ``a_u`` along the row of the
target point; route 2 does the opposite. Each route adds the double integral
``Phi`` of ``F`` over the rectangle spanned by base and target, with sign
``+`` (route 1) or ``-`` (route 2), and a fixing function of the remaining
coordinate.

The 2+1-D routes reuse the plane fixing machinery on the ``t0`` slice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .fields import (Constants, FieldSet, Multiplicities, PotentialSet, ScenarioConfig,
                     zero)
from .numerics import (BoxDomain, cumulative_line, cumulative_rect, cumulative_rows,
                       default_grid_n, evaluate, integrate_between)

ROUTES = ("naive_v1", "naive_v2", "oneD_t_then_x", "oneD_x_then_t",
          "twoD_route1", "twoD_route2", "full_primary", "full_dual")

ROUTE_ALIASES = {
    "v1": "naive_v1", "v2": "naive_v2",
    "t_then_x": "oneD_t_then_x", "x_then_t": "oneD_x_then_t",
    "route1": "twoD_route1", "route2": "twoD_route2",
    "primary": "full_primary", "dual": "full_dual",
}

DEFAULT_TOL = 1e-6
CHECK_POINTS = 41


class FixingError(ValueError):
    """No admissible fixing function exists for the requested observation region."""


class RouteError(ValueError):
    """Route tag does not match the scenario dimension or is unknown."""


def canonical_route(route: str) -> str:
    route = ROUTE_ALIASES.get(route, route)
    if route not in ROUTES:
        raise RouteError(f"unknown route {route!r}; expected one of {', '.join(ROUTES)}")
    return route


# --------------------------------------------------------------------------
# plane description


@dataclass(frozen=True)
class _Plane:
    v_axis: str
    a_u: Callable
    a_v: Callable
    F: Callable
    u0: float
    v0: float
    breaks: Callable[..., list]

    def breaks_u(self, v) -> list:
        return self.breaks("x", **{self.v_axis: np.atleast_1d(np.asarray(v, dtype=float))})

    def breaks_v(self, u) -> list:
        return self.breaks(self.v_axis, x=np.atleast_1d(np.asarray(u, dtype=float)))


def _plane(p: PotentialSet, f: FieldSet, base, con: Constants, breaks) -> _Plane:
    x0, y0, t0 = base
    c = con.c
    if p.dimension == "1d":
        return _Plane(
            v_axis="t",
            a_u=lambda u, v: p.A_x(u, 0.0 * u, v),
            a_v=lambda u, v: -c * p.phi(u, 0.0 * u, v),
            F=lambda u, v: c * f.E_x(u, 0.0 * u, v),
            u0=x0, v0=t0, breaks=breaks,
        )
    return _Plane(
        v_axis="y",
        a_u=lambda u, v: p.A_x(u, v, t0 + 0.0 * u),
        a_v=lambda u, v: p.A_y(u, v, t0 + 0.0 * u),
        F=lambda u, v: f.B(u, v, t0 + 0.0 * u),
        u0=x0, v0=y0, breaks=breaks,
    )


def _first_admissible(admissible: Callable[[np.ndarray], np.ndarray], start: float,
                      stop: float, extra: list, n: int) -> float | None:
    """Smallest candidate coordinate >= ``start`` where ``admissible`` holds."""
    if stop <= start:
        cand = np.array([start])
    else:
        cand = np.linspace(start, stop, n)
    cand = np.unique(np.concatenate([cand, [e for e in extra if start <= e <= stop]]))
    ok = np.asarray(admissible(cand), dtype=bool)
    ok = np.broadcast_to(ok, cand.shape)
    if not ok.any():
        return None
    return float(cand[int(np.argmax(ok))])


# --------------------------------------------------------------------------
# fixing functions


@dataclass(frozen=True)
class FixingFunctions:
    """Fixing functions of one scenario with their recorded condition residuals.

    ``functions`` maps names (``g``, ``g_hat``, ``h``, ``G``, ``G_hat``, ``F``)
    to vectorised callables; ``constants`` holds the additive constant added
    to each function; ``condition_residuals`` the largest measured violation
    of each bracket-independence condition over the observation region.
    """

    functions: Mapping[str, Callable]
    condition_residuals: Mapping[str, float]
    constants: Mapping[str, float] = field(default_factory=dict)
    tolerance: float = DEFAULT_TOL
    reference_point: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "functions", MappingProxyType(dict(self.functions)))
        object.__setattr__(self, "condition_residuals",
                           MappingProxyType(dict(self.condition_residuals)))
        object.__setattr__(self, "constants", MappingProxyType(dict(self.constants)))

    def get(self, name: str):
        return self.functions.get(name)

    g = property(lambda self: self.get("g"))
    g_hat = property(lambda self: self.get("g_hat"))
    h = property(lambda self: self.get("h"))
    G = property(lambda self: self.get("G"))
    G_hat = property(lambda self: self.get("G_hat"))
    F = property(lambda self: self.get("F"))

    def max_residual(self) -> float:
        return max(self.condition_residuals.values(), default=0.0)


def _check_nodes(iv, limit=CHECK_POINTS) -> np.ndarray:
    return np.linspace(iv.lo, iv.hi, min(int(iv.n), limit))


def _solve_plane_fixing(pl: _Plane, observable: Callable, obs_u, obs_v,
                        connectivity: str, n: int, tol: float, names: tuple[str, str],
                        v_label: str):
    """Fixing functions of both routes on a plane.

    The route-1 function ``g1(u)`` follows ``g1' = -int_{v0}^{v_ref(u)} F dv``
    and vanishes at ``u0``. The route-2 function ``g2(v)`` follows
    ``g2' = +int_{u0}^{u_ref(v)} F du``; in simple-connected scenarios its
    constant is chosen so that the two routes agree on the observation region.
    """
    u0, v0 = pl.u0, pl.v0
    u_top = max(obs_u.hi, u0)
    v_top = max(obs_v.hi, v0)
    search_n = 4 * n + 1

    def v_ref(u):
        r = _first_admissible(lambda vs: observable(np.full_like(vs, u), vs), v0, v_top,
                              pl.breaks_v(u), search_n)
        return v0 if r is None else r

    def u_ref(v):
        r = _first_admissible(lambda us: observable(us, np.full_like(us, v)), u0, u_top,
                              pl.breaks_u(v), search_n)
        return u0 if r is None else r

    def d1(u):
        u = float(u)
        return -integrate_between(lambda vv: pl.F(np.full_like(vv, u), vv), v0, v_ref(u), n,
                                  pl.breaks_v(u))

    def d2(v):
        v = float(v)
        return integrate_between(lambda uu: pl.F(uu, np.full_like(uu, v)), u0, u_ref(v), n,
                                 pl.breaks_u(v))

    # breakpoints of the derivative rules: field kinks plus the edges of the
    # observation region, sampled on the observation extent
    cu = _check_nodes(obs_u)
    cv = _check_nodes(obs_v)
    kinks_u = sorted(set(pl.breaks_u(cv)) | {obs_u.lo, obs_u.hi})
    kinks_v = sorted(set(pl.breaks_v(cu)) | {obs_v.lo, obs_v.hi})

    def g1(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return cumulative_line(np.vectorize(d1), u, u0, n, kinks_u)

    def g2_raw(v):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        return cumulative_line(np.vectorize(d2), v, v0, n, kinks_v)

    # condition residuals over the observation grid restricted to D
    U, V = np.meshgrid(cu, cv, indexing="ij")
    mask = np.broadcast_to(np.asarray(observable(U, V), dtype=bool), U.shape)
    res1 = res2 = 0.0
    if mask.any():
        col = cumulative_rows(lambda vv, uu: pl.F(uu, vv), cu, cv, v0, n,
                              lambda uu: pl.breaks_v(uu))           # (nu, nv): int_{v0}^{v}
        at_ref = np.array([integrate_between(lambda vv: pl.F(np.full_like(vv, uu), vv),
                                             v0, v_ref(uu), n, pl.breaks_v(uu)) for uu in cu])
        res1 = float(np.max(np.abs(col - at_ref[:, None])[mask]))
        row = cumulative_rows(lambda uu, vv: pl.F(uu, vv), cv, cu, u0, n,
                              lambda vv: pl.breaks_u(vv))           # (nv, nu): int_{u0}^{u}
        at_ref2 = np.array([integrate_between(lambda uu: pl.F(uu, np.full_like(uu, vv)),
                                              u0, u_ref(vv), n, pl.breaks_u(vv)) for vv in cv])
        res2 = float(np.max(np.abs(row - at_ref2[:, None]).T[mask]))
    residuals = {names[0]: res1, names[1]: res2}
    bad = {k: r for k, r in residuals.items() if not r < tol}
    if bad:
        detail = ", ".join(f"{k}: {r:.3g}" for k, r in bad.items())
        raise FixingError(f"no admissible fixing function ({detail} >= tol {tol:g}); "
                          f"the observation region overlaps the field along {v_label} or x")

    K = 0.0
    ref = None
    if connectivity == "simple" and mask.any():
        i, j = np.argwhere(mask)[0]
        ref = (float(cu[i]), float(cv[j]))
        flux = cumulative_rect(lambda uu, vv: pl.F(uu, vv), [ref[0]], u0, [ref[1]], v0, n,
                               pl.breaks_u(cv), lambda uu: pl.breaks_v(uu))[0, 0]
        K = float(flux + g1(ref[0])[0] - g2_raw(ref[1])[0])

    def g2(v):
        return g2_raw(v) + K

    return g1, g2, K, residuals, ref


def _observable_plane(cfg: ScenarioConfig) -> Callable:
    x0, y0, t0 = cfg.base
    if cfg.dimension == "1d":
        return lambda u, v: cfg.observable(u, 0.0 * u, v)
    obs = cfg.observation
    t_probe = max(t0, obs["t"].lo) if "t" in obs else t0
    return lambda u, v: cfg.observable(u, v, t_probe + 0.0 * u)


def solve_fixing_1d(cfg: ScenarioConfig, n: int | None = None,
                    tol: float = DEFAULT_TOL) -> FixingFunctions:
    """Fixing functions ``g(x)`` and ``g_hat(t)`` of the two 1-D dynamic routes."""
    if cfg.dimension != "1d":
        raise RouteError(f"scenario {cfg.name} is {cfg.dimension}, not 1d")
    n = default_grid_n() if n is None else n
    pl = _plane(cfg.potentials, cfg.fields, cfg.base, cfg.constants, cfg.breakpoints)
    g1, g2, K, res, ref = _solve_plane_fixing(
        pl, _observable_plane(cfg), cfg.observation["x"], cfg.observation["t"],
        cfg.connectivity, n, tol, ("g", "g_hat"), "t")
    return FixingFunctions({"g": g1, "g_hat": g2}, res, {"g": 0.0, "g_hat": K}, tol, ref)


def solve_fixing_2d(cfg: ScenarioConfig, n: int | None = None,
                    tol: float = DEFAULT_TOL) -> FixingFunctions:
    """Fixing functions ``g(x)`` and ``h(y)`` of the two 2-D static routes."""
    if cfg.dimension != "2d":
        raise RouteError(f"scenario {cfg.name} is {cfg.dimension}, not 2d")
    n = default_grid_n() if n is None else n
    pl = _plane(cfg.potentials, cfg.fields, cfg.base, cfg.constants, cfg.breakpoints)
    g1, g2, K, res, ref = _solve_plane_fixing(
        pl, _observable_plane(cfg), cfg.observation["x"], cfg.observation["y"],
        cfg.connectivity, n, tol, ("g", "h"), "y")
    return FixingFunctions({"g": g1, "h": g2}, res, {"g": 0.0, "h": K}, tol, ref)


def solve_fixing_full(cfg: ScenarioConfig, n: int | None = None,
                      tol: float = DEFAULT_TOL) -> FixingFunctions:
    """Fixing functions ``G(y)``, ``G_hat(x)`` and ``F(x, y)`` of the 2+1-D routes.

    ``G`` and ``G_hat`` come from the magnetic field on the ``t0`` slice.
    ``F`` is taken identically zero; its conditions ``F_x = -c int E_x dt'``,
    ``F_y = -c int E_y dt'`` and their mixed-partial compatibility
    (equivalent to ``B(t) = B(t0)``) are measured on the observation grid.
    """
    if cfg.dimension not in ("2d", "2+1d"):
        raise RouteError(f"scenario {cfg.name} is {cfg.dimension}, not 2+1d")
    n = default_grid_n() if n is None else n
    f, con = cfg.fields, cfg.constants
    x0, y0, t0 = cfg.base
    pl = _plane(PotentialSet(cfg.potentials.A_x, cfg.potentials.A_y, cfg.potentials.phi, "2d"),
                f, cfg.base, con, cfg.breakpoints)
    obs = cfg.observation
    g1, g2, K, res, ref = _solve_plane_fixing(
        pl, _observable_plane(cfg), obs["x"], obs["y"], cfg.connectivity, n, tol,
        ("G_hat", "G"), "y")
    residuals = dict(res)
    if "t" in obs:
        cx, cy, ct = _check_nodes(obs["x"], 11), _check_nodes(obs["y"], 11), _check_nodes(obs["t"], 11)
        X, Y, T = np.meshgrid(cx, cy, ct, indexing="ij")
        mask = np.broadcast_to(np.asarray(cfg.observable(X, Y, T), dtype=bool), X.shape)
        fx = fy = mixed = 0.0
        tb = cfg.breakpoints("t")
        for i, xv in enumerate(cx):
            for j, yv in enumerate(cy):
                if not mask[i, j].any():
                    continue
                ex = cumulative_line(lambda tt: f.E_x(np.full_like(tt, xv), np.full_like(tt, yv), tt),
                                     ct, t0, n, tb)
                ey = cumulative_line(lambda tt: f.E_y(np.full_like(tt, xv), np.full_like(tt, yv), tt),
                                     ct, t0, n, tb)
                b_t = evaluate(f.B, xv, yv, ct)
                b_0 = float(evaluate(f.B, xv, yv, t0))
                m = mask[i, j]
                fx = max(fx, float(np.max(np.abs(con.c * ex)[m])))
                fy = max(fy, float(np.max(np.abs(con.c * ey)[m])))
                mixed = max(mixed, float(np.max(np.abs(b_t - b_0)[m])))
        residuals.update({"F_x": fx, "F_y": fy, "F_mixed": mixed})
        bad = {k: r for k, r in residuals.items() if k.startswith("F") and not r < tol}
        if bad:
            detail = ", ".join(f"{k}: {r:.3g}" for k, r in bad.items())
            raise FixingError(f"no admissible fixing function ({detail} >= tol {tol:g}); "
                              "the electric field reaches the observation region")

    def F(x, y):
        return np.zeros(np.broadcast(x, y).shape)

    return FixingFunctions({"G_hat": g1, "G": g2, "F": F}, residuals,
                           {"G_hat": 0.0, "G": K, "F": 0.0}, tol, ref)


# --------------------------------------------------------------------------
# solutions


PartsFn = Callable[..., Mapping[str, np.ndarray]]


@dataclass(frozen=True)
class GaugeSolution:
    """A constructed gauge function.

    ``coords`` lists the coordinate tags the solution depends on, in the
    axis order used by :meth:`on_grid`. Values split into a ``potential``
    part (line integrals of the potentials), a ``nonlocal`` part (field
    double integrals plus fixing functions) and the ``multiplicity``
    constant; ``lambda0`` is added on top.
    """

    route: str
    scenario: str
    coords: tuple[str, ...]
    base: tuple[float, float, float]
    lambda0: float
    parts: PartsFn = field(repr=False)
    fixing: FixingFunctions | None = None
    connectivity: str = "simple"
    default_multiplicities: Multiplicities | None = None
    multiplicities: Multiplicities | None = None
    multiplicity: float = 0.0

    def components_on_grid(self, **nodes) -> dict[str, np.ndarray]:
        arrays = [np.atleast_1d(np.asarray(nodes[c], dtype=float)) for c in self.coords]
        raw = self.parts(*arrays)
        shape = tuple(a.size for a in arrays)
        pot = np.broadcast_to(raw["potential"], shape).astype(float)
        nonlocal_ = np.broadcast_to(raw["nonlocal"], shape).astype(float)
        mult = np.full(shape, float(self.multiplicity))
        return {"potential": pot, "nonlocal": nonlocal_, "multiplicity": mult,
                "total": self.lambda0 + pot + nonlocal_ + mult}

    def on_grid(self, domain: BoxDomain) -> np.ndarray:
        """Lambda on the tensor grid of ``domain`` (axes in ``coords`` order)."""
        missing = [c for c in self.coords if c not in domain]
        if missing:
            raise ValueError(f"grid lacks axes {missing} required by route {self.route}")
        return self.components_on_grid(**{c: domain[c].nodes() for c in self.coords})["total"]

    def evaluate_components(self, x, y=0.0, t=0.0) -> dict[str, np.ndarray]:
        X, Y, T = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, t)))
        coord = {"x": X, "y": Y, "t": T}
        out = {k: np.empty(X.shape) for k in ("potential", "nonlocal", "multiplicity", "total")}
        for idx in np.ndindex(X.shape):
            comp = self.components_on_grid(**{c: coord[c][idx] for c in self.coords})
            for k in out:
                out[k][idx] = comp[k].ravel()[0]
        return out

    def evaluate(self, x, y=0.0, t=0.0):
        total = self.evaluate_components(x, y, t)["total"]
        return float(total) if total.ndim == 0 else total

    __call__ = evaluate


def _as_breaks(breakpoints) -> Callable[..., list]:
    if breakpoints is None:
        return lambda axis, **coords: []
    return breakpoints


def naive_dirac_lambda(p: PotentialSet, base, variant: str, con: Constants,
                       lambda0: float = 0.0, n: int | None = None,
                       breakpoints=None) -> GaugeSolution:
    """The naive combined Dirac phase on a 1-D dynamic potential set.

    ``v1`` integrates ``A(x', t)`` and ``phi(x, t')``; ``v2`` integrates
    ``A(x', t0)`` and ``phi(x0, t')``. Neither solves the gauge equations
    unless ``A`` is static and ``phi`` uniform.
    """
    route = canonical_route(variant)
    if route not in ("naive_v1", "naive_v2"):
        raise RouteError(f"naive variant must be v1 or v2, got {variant!r}")
    if p.dimension != "1d":
        raise RouteError(f"naive Dirac form needs a 1d potential set, got {p.dimension}")
    n = default_grid_n() if n is None else n
    base = tuple(float(b) for b in base) if len(base) == 3 else (float(base[0]), 0.0, float(base[1]))
    pl = _plane(p, FieldSet(zero, zero, zero), base, con, _as_breaks(breakpoints or p.breakpoints))

    def parts(us, vs):
        if route == "naive_v1":
            a = cumulative_rows(lambda uu, vv: pl.a_u(uu, vv), vs, us, pl.u0, n,
                                lambda vv: pl.breaks_u(vv)).T
            b = cumulative_rows(lambda vv, uu: pl.a_v(uu, vv), us, vs, pl.v0, n,
                                lambda uu: pl.breaks_v(uu))
        else:
            a = cumulative_line(lambda uu: pl.a_u(uu, np.full_like(uu, pl.v0)), us, pl.u0, n,
                                pl.breaks_u(pl.v0))[:, None]
            b = cumulative_line(lambda vv: pl.a_v(np.full_like(vv, pl.u0), vv), vs, pl.v0, n,
                                pl.breaks_v(pl.u0))[None, :]
        return {"potential": a + b, "nonlocal": 0.0}

    return GaugeSolution(route, "custom", ("x", "t"), base, lambda0, parts)


def _plane_parts(pl: _Plane, route1: bool, fix1, fix2, n: int) -> PartsFn:
    def parts(us, vs):
        flux = cumulative_rect(lambda uu, vv: pl.F(uu, vv), us, pl.u0, vs, pl.v0, n,
                               pl.breaks_u(vs), lambda uu: pl.breaks_v(uu))
        if route1:
            along_row = cumulative_rows(lambda uu, vv: pl.a_u(uu, vv), vs, us, pl.u0, n,
                                        lambda vv: pl.breaks_u(vv)).T
            base_col = cumulative_line(lambda vv: pl.a_v(np.full_like(vv, pl.u0), vv), vs,
                                       pl.v0, n, pl.breaks_v(pl.u0))
            return {"potential": along_row + base_col[None, :],
                    "nonlocal": flux + fix1(us)[:, None]}
        base_row = cumulative_line(lambda uu: pl.a_u(uu, np.full_like(uu, pl.v0)), us, pl.u0,
                                   n, pl.breaks_u(pl.v0))
        along_col = cumulative_rows(lambda vv, uu: pl.a_v(uu, vv), us, vs, pl.v0, n,
                                    lambda uu: pl.breaks_v(uu))
        return {"potential": base_row[:, None] + along_col,
                "nonlocal": -flux + fix2(vs)[None, :]}

    return parts


def lambda_1d(cfg: ScenarioConfig, route: str = "t_then_x", fix: FixingFunctions | None = None,
              n: int | None = None, tol: float = DEFAULT_TOL) -> GaugeSolution:
    """Generalized 1-D dynamic solution along ``t_then_x`` or ``x_then_t``."""
    route = canonical_route(route)
    if route not in ("oneD_t_then_x", "oneD_x_then_t"):
        raise RouteError(f"route {route} is not a 1-D dynamic route")
    n = default_grid_n() if n is None else n
    fix = fix or solve_fixing_1d(cfg, n, tol)
    for name in ("g", "g_hat"):
        if fix.get(name) is None:
            raise ValueError(f"fixing function {name} missing")
    pl = _plane(cfg.potentials, cfg.fields, cfg.base, cfg.constants, cfg.breakpoints)
    parts = _plane_parts(pl, route == "oneD_t_then_x", fix.g, fix.g_hat, n)
    return GaugeSolution(route, cfg.name, ("x", "t"), cfg.base, cfg.lambda0, parts, fix,
                         cfg.connectivity, cfg.multiplicities)


def lambda_2d_static(cfg: ScenarioConfig, route: str = "route1",
                     fix: FixingFunctions | None = None, n: int | None = None,
                     tol: float = DEFAULT_TOL) -> GaugeSolution:
    """Generalized 2-D static solution along ``route1`` or ``route2``."""
    route = canonical_route(route)
    if route not in ("twoD_route1", "twoD_route2"):
        raise RouteError(f"route {route} is not a 2-D static route")
    n = default_grid_n() if n is None else n
    fix = fix or solve_fixing_2d(cfg, n, tol)
    for name in ("g", "h"):
        if fix.get(name) is None:
            raise ValueError(f"fixing function {name} missing")
    pl = _plane(cfg.potentials, cfg.fields, cfg.base, cfg.constants, cfg.breakpoints)
    parts = _plane_parts(pl, route == "twoD_route1", fix.g, fix.h, n)
    return GaugeSolution(route, cfg.name, ("x", "y"), cfg.base, cfg.lambda0, parts, fix,
                         cfg.connectivity, cfg.multiplicities)


def lambda_full(cfg: ScenarioConfig, route: str = "primary",
                fix: FixingFunctions | None = None, n: int | None = None,
                tol: float = DEFAULT_TOL) -> GaugeSolution:
    """2+1-D solution (``primary``) or its spatial dual (``dual``).

    The primary route carries ``-Phi_B(t0) + G(y)``, the dual route
    ``+Phi_B(t0) + G_hat(x)``; both add the spacetime double integrals of
    ``E_x`` and ``E_y`` along their respective spatial legs.
    """
    route = canonical_route(route)
    if route not in ("full_primary", "full_dual"):
        raise RouteError(f"route {route} is not a 2+1-D route")
    if cfg.dimension not in ("2d", "2+1d"):
        raise RouteError(f"scenario {cfg.name} is {cfg.dimension}; 2+1-D routes need 2d or 2+1d")
    n = default_grid_n() if n is None else n
    fix = fix or solve_fixing_full(cfg, n, tol)
    p, f, c = cfg.potentials, cfg.fields, cfg.constants.c
    x0, y0, t0 = cfg.base
    bk = cfg.breakpoints
    primary = route == "full_primary"
    G = fix.G if primary else fix.G_hat
    if G is None:
        raise ValueError("fixing function G/G_hat missing")

    def tb():
        return bk("t")

    def parts(xs, ys, ts):
        nx, ny, nt = xs.size, ys.size, ts.size
        pot = np.zeros((nx, ny, nt))
        nonl = np.zeros((nx, ny, nt))
        phi_leg = -c * cumulative_line(lambda tt: p.phi(np.full_like(tt, x0), np.full_like(tt, y0), tt),
                                       ts, t0, n, tb())
        flux0 = cumulative_rect(lambda xx, yy: f.B(xx, yy, np.full_like(xx, t0)), xs, x0, ys, y0, n,
                                bk("x", y=ys, t=t0), lambda xx: bk("y", x=xx, t=t0))
        pot += phi_leg[None, None, :]
        if primary:
            a_leg = cumulative_rows(lambda xx, tt: p.A_x(xx, np.full_like(xx, y0), tt), ts, xs, x0, n,
                                    lambda tt: bk("x", y=y0, t=tt))            # (nt, nx)
            pot += a_leg.T[:, None, :]
            for k, tv in enumerate(ts):
                pot[:, :, k] += cumulative_rows(
                    lambda yy, xx: p.A_y(xx, yy, np.full_like(yy, tv)), xs, ys, y0, n,
                    lambda xx: bk("y", x=xx, t=tv))
            e_leg = c * cumulative_rect(lambda tt, xx: f.E_x(xx, np.full_like(xx, y0), tt),
                                        ts, t0, xs, x0, n, tb(), lambda tt: bk("x", y=y0, t=tt))
            nonl += e_leg.T[:, None, :]
            for i, xv in enumerate(xs):
                nonl[i] += c * cumulative_rect(
                    lambda tt, yy: f.E_y(np.full_like(yy, xv), yy, tt), ts, t0, ys, y0, n,
                    tb(), lambda tt: bk("y", x=xv, t=tt)).T
            nonl += -flux0[:, :, None] + np.asarray(G(ys))[None, :, None]
        else:
            for k, tv in enumerate(ts):
                pot[:, :, k] += cumulative_rows(
                    lambda xx, yy: p.A_x(xx, yy, np.full_like(xx, tv)), ys, xs, x0, n,
                    lambda yy: bk("x", y=yy, t=tv)).T
            b_leg = cumulative_rows(lambda yy, tt: p.A_y(np.full_like(yy, x0), yy, tt), ts, ys, y0, n,
                                    lambda tt: bk("y", x=x0, t=tt))            # (nt, ny)
            pot += b_leg.T[None, :, :]
            for j, yv in enumerate(ys):
                nonl[:, j, :] += c * cumulative_rect(
                    lambda tt, xx: f.E_x(xx, np.full_like(xx, yv), tt), ts, t0, xs, x0, n,
                    tb(), lambda tt: bk("x", y=yv, t=tt)).T
            e_leg = c * cumulative_rect(lambda tt, yy: f.E_y(np.full_like(yy, x0), yy, tt),
                                        ts, t0, ys, y0, n, tb(), lambda tt: bk("y", x=x0, t=tt))
            nonl += e_leg.T[None, :, :]
            nonl += flux0[:, :, None] + np.asarray(G(xs))[:, None, None]
        return {"potential": pot, "nonlocal": nonl}

    return GaugeSolution(route, cfg.name, ("x", "y", "t"), cfg.base, cfg.lambda0, parts, fix,
                         cfg.connectivity, cfg.multiplicities)


_MULT_SLOT = {
    "oneD_t_then_x": lambda m: m.tau, "twoD_route1": lambda m: m.tau,
    "oneD_x_then_t": lambda m: m.chi, "twoD_route2": lambda m: m.chi,
    "full_primary": lambda m: m.f, "full_dual": lambda m: -m.f,
}


def apply_multiplicity(sol: GaugeSolution, values: Multiplicities | None = None) -> GaugeSolution:
    """Add the multiplicity constant belonging to ``sol``'s route.

    ``values`` defaults to the scenario's own multiplicities. Only
    multiply-connected scenarios admit multiplicities.
    """
    if sol.connectivity != "multiple":
        raise ValueError(f"scenario {sol.scenario} is simply connected; multiplicities are "
                         "only present for multivalued gauge functions")
    values = values if values is not None else sol.default_multiplicities
    if values is None:
        raise ValueError("no multiplicity values supplied")
    if sol.route not in _MULT_SLOT:
        raise RouteError(f"route {sol.route} takes no multiplicity")
    return replace(sol, multiplicities=values, multiplicity=float(_MULT_SLOT[sol.route](values)))


def solve(cfg: ScenarioConfig, route: str, n: int | None = None, tol: float = DEFAULT_TOL,
          fix: FixingFunctions | None = None, with_multiplicity: bool = True) -> GaugeSolution:
    """Build the solution for ``route``, adding default multiplicities when the
    scenario is multiply connected and ``with_multiplicity`` is set."""
    route = canonical_route(route)
    if route.startswith("naive"):
        return replace(naive_dirac_lambda(cfg.potentials, cfg.base, route, cfg.constants,
                                          cfg.lambda0, n, cfg.breakpoints), scenario=cfg.name)
    if route.startswith("oneD"):
        sol = lambda_1d(cfg, route, fix, n, tol)
    elif route.startswith("twoD"):
        sol = lambda_2d_static(cfg, route, fix, n, tol)
    else:
        sol = lambda_full(cfg, route, fix, n, tol)
    if with_multiplicity and cfg.connectivity == "multiple":
        sol = apply_multiplicity(sol)
    return sol


def routes_for(cfg: ScenarioConfig) -> tuple[str, str]:
    """The pair of generalized routes natural to the scenario's dimension."""
    return {
        "1d": ("oneD_t_then_x", "oneD_x_then_t"),
        "2d": ("twoD_route1", "twoD_route2"),
        "2+1d": ("full_primary", "full_dual"),
    }[cfg.dimension]


def condition_residual(cfg: ScenarioConfig, name: str, fn: Callable, n: int | None = None,
                       step: float = 1e-5, points: int = CHECK_POINTS,
                       window: tuple[float, float] | None = None) -> float:
    """Largest violation of the bracket-independence condition for a candidate
    fixing function ``fn`` over the observation region.

    The condition is checked in derivative form, e.g. for ``g`` on a 2-D
    static scenario ``|int_{y0}^{y} B(x, y') dy' + g'(x)|`` at every
    observation point, with ``g'`` taken by central differences. ``window``
    limits the check to an interval of the function's own argument, for
    closed forms that are only meant to hold on part of the range.
    """
    n = default_grid_n() if n is None else n
    pl = _plane(cfg.potentials if cfg.dimension != "2+1d" else
                PotentialSet(cfg.potentials.A_x, cfg.potentials.A_y, cfg.potentials.phi, "2d"),
                cfg.fields, cfg.base, cfg.constants, cfg.breakpoints)
    obs = cfg.observation
    v_tag = "t" if cfg.dimension == "1d" else "y"
    cu = _check_nodes(obs["x"], points)
    cv = _check_nodes(obs[v_tag], points)
    U, V = np.meshgrid(cu, cv, indexing="ij")
    mask = np.broadcast_to(np.asarray(_observable_plane(cfg)(U, V), dtype=bool), U.shape)
    if window is not None:
        arg = U if name in ("g", "G_hat") else V
        mask = mask & (arg >= window[0]) & (arg <= window[1])
    if not mask.any():
        return 0.0
    if name in ("g", "G_hat"):
        col = cumulative_rows(lambda vv, uu: pl.F(uu, vv), cu, cv, pl.v0, n,
                              lambda uu: pl.breaks_v(uu))
        d = (np.asarray(fn(cu + step)) - np.asarray(fn(cu - step))) / (2 * step)
        res = np.abs(col + d[:, None])
    elif name in ("g_hat", "h", "G"):
        row = cumulative_rows(lambda uu, vv: pl.F(uu, vv), cv, cu, pl.u0, n,
                              lambda vv: pl.breaks_u(vv)).T
        d = (np.asarray(fn(cv + step)) - np.asarray(fn(cv - step))) / (2 * step)
        res = np.abs(-row + d[None, :])
    else:
        raise ValueError(f"unknown fixing function {name!r}")
    return float(np.max(res[mask]))
