"""Potential and field configurations, field derivation and consistency checks.

All quantities are Gaussian-CGS with every constant configurable. Potentials
and fields are plain callables ``f(x, y, t)`` that broadcast over NumPy
arrays. The potentials of a configuration are always *differences* between
two systems (system 2 minus system 1), so a configuration describes the pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .numerics import BoxDomain, Interval, evaluate, integrate_between, integrate_iterated

ScalarField = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]

DIMENSIONS = ("1d", "2d", "2+1d")
SQRT3 = math.sqrt(3.0)


class ScenarioError(ValueError):
    """Unknown scenario or invalid scenario parameters."""


class DomainError(ValueError):
    """A field or potential was evaluated outside its declared domain."""


def zero(x, y, t):
    return np.zeros(np.broadcast(x, y, t).shape)


def _ind(cond):
    return np.where(cond, 1.0, 0.0)


@dataclass(frozen=True)
class Constants:
    c: float = 1.0
    hbar: float = 1.0
    q: float = 1.0
    e: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("speed of light must be positive")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        if not self.m > 0:
            raise ValueError("mass must be positive")
        if self.e == 0:
            raise ValueError("elementary charge must be nonzero")

    @classmethod
    def with_planck(cls, h: float, **kw) -> "Constants":
        """Build from Planck's constant ``h`` rather than ``hbar``."""
        return cls(hbar=h / (2.0 * math.pi), **kw)

    @property
    def h(self) -> float:
        return 2.0 * math.pi * self.hbar

    @property
    def flux_quantum(self) -> float:
        """``h c / e``."""
        return self.h * self.c / self.e


def _static_breaks(**axes) -> Callable[..., list]:
    table = {k: sorted(float(v) for v in vals) for k, vals in axes.items()}

    def breaks(axis, **_coords):
        return list(table.get(axis, ()))

    return breaks


def _no_breaks(axis, **_coords):
    return []


@dataclass(frozen=True)
class PotentialSet:
    """Potential differences ``A = A2 - A1``, ``phi = phi2 - phi1``.

    ``derivatives`` may hold closed-form partials under the keys
    ``A_x_t``, ``A_y_t``, ``phi_x``, ``phi_y``, ``A_y_x`` and ``A_x_y``.
    """

    A_x: ScalarField
    A_y: ScalarField
    phi: ScalarField
    dimension: str
    derivatives: Mapping[str, ScalarField] = field(default_factory=dict)
    domain: BoxDomain | None = None
    breakpoints: Callable[..., list] = _no_breaks

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise ValueError(f"dimension must be one of {DIMENSIONS}, got {self.dimension!r}")
        if self.dimension == "1d" and self.A_y is not zero:
            raise ValueError("1d potential sets must have A_y identically zero")
        object.__setattr__(self, "derivatives", MappingProxyType(dict(self.derivatives)))

    def check_static(self, samples: int = 5, seed: int = 0) -> float:
        """Largest change of the potentials under a time shift (2d sets only)."""
        rng = np.random.default_rng(seed)
        x, y = rng.uniform(-2.0, 2.0, size=(2, samples))
        worst = 0.0
        for fn in (self.A_x, self.A_y, self.phi):
            a = evaluate(fn, x, y, 0.0)
            b = evaluate(fn, x, y, 1.7)
            worst = max(worst, float(np.max(np.abs(a - b))))
        return worst


@dataclass(frozen=True)
class FieldSet:
    E_x: ScalarField
    E_y: ScalarField
    B: ScalarField
    faraday_consistent: bool | None = None
    breakpoints: Callable[..., list] = _no_breaks


def _guard(fn: ScalarField, domain: BoxDomain | None, name: str) -> ScalarField:
    if domain is None:
        return fn

    def wrapped(x, y, t):
        inside = domain.contains(x=x, y=y, t=t)
        if not np.all(inside):
            bad = np.argwhere(~np.broadcast_to(inside, np.broadcast(x, y, t).shape))
            idx = tuple(bad[0]) if bad.size else ()
            xs, ys, ts = (np.broadcast_to(v, np.broadcast(x, y, t).shape)[idx] for v in (x, y, t))
            raise DomainError(f"{name} evaluated outside declared domain at "
                              f"(x={xs:.6g}, y={ys:.6g}, t={ts:.6g})")
        return fn(x, y, t)

    return wrapped


def _fd(fn: ScalarField, axis: str, h: float) -> ScalarField:
    def d(x, y, t):
        x, y, t = (np.asarray(v, dtype=float) for v in (x, y, t))
        if axis == "x":
            return (fn(x + h, y, t) - fn(x - h, y, t)) / (2.0 * h)
        if axis == "y":
            return (fn(x, y + h, t) - fn(x, y - h, t)) / (2.0 * h)
        return (fn(x, y, t + h) - fn(x, y, t - h)) / (2.0 * h)

    return d


def derive_fields(p: PotentialSet, con: Constants, h: float = 1e-5) -> FieldSet:
    """Fields from potentials: ``E = -grad phi - (1/c) dA/dt``, ``B = curl A``.

    Closed-form partials from ``p.derivatives`` are used when present, central
    differences with step ``h`` otherwise.
    """
    d = dict(p.derivatives)
    part = {
        "A_x_t": d.get("A_x_t") or _fd(p.A_x, "t", h),
        "A_y_t": d.get("A_y_t") or _fd(p.A_y, "t", h),
        "phi_x": d.get("phi_x") or _fd(p.phi, "x", h),
        "phi_y": d.get("phi_y") or _fd(p.phi, "y", h),
        "A_y_x": d.get("A_y_x") or _fd(p.A_y, "x", h),
        "A_x_y": d.get("A_x_y") or _fd(p.A_x, "y", h),
    }
    c = con.c

    def E_x(x, y, t):
        return -part["phi_x"](x, y, t) - part["A_x_t"](x, y, t) / c

    def E_y(x, y, t):
        return -part["phi_y"](x, y, t) - part["A_y_t"](x, y, t) / c

    def B(x, y, t):
        return part["A_y_x"](x, y, t) - part["A_x_y"](x, y, t)

    if p.dimension == "1d":
        E_y_fn = zero
        B_fn = zero
    else:
        E_y_fn, B_fn = E_y, B
    return FieldSet(
        E_x=_guard(E_x, p.domain, "E_x"),
        E_y=_guard(E_y_fn, p.domain, "E_y") if E_y_fn is not zero else zero,
        B=_guard(B_fn, p.domain, "B") if B_fn is not zero else zero,
        faraday_consistent=True,
        breakpoints=p.breakpoints,
    )


# --------------------------------------------------------------------------
# regions and loops

@dataclass(frozen=True)
class Rectangle:
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def area(self) -> float:
        return abs(self.x1 - self.x0) * abs(self.y1 - self.y0)


@dataclass(frozen=True)
class Triangle:
    """Apex-up equilateral triangle with its base on ``y = y_base``."""

    x_left: float
    side: float
    y_base: float = 0.0

    @property
    def height(self) -> float:
        return SQRT3 * self.side / 2.0

    @property
    def area(self) -> float:
        return SQRT3 * self.side ** 2 / 4.0


@dataclass(frozen=True)
class Disc:
    xc: float
    yc: float
    radius: float

    @property
    def area(self) -> float:
        return math.pi * self.radius ** 2


def _require_area(region):
    if not region.area > 0:
        raise ValueError(f"degenerate region {region!r} (zero area)")


def flux_through(fn: Callable[[np.ndarray, np.ndarray], np.ndarray], region,
                 n: int = 401, breaks: Callable[..., list] = _no_breaks) -> float:
    """Area integral of ``fn(x, y)`` over a rectangle, triangle or disc."""
    _require_area(region)
    if isinstance(region, Rectangle):
        xa, xb = sorted((region.x0, region.x1))
        ya, yb = sorted((region.y0, region.y1))
        ybreaks = breaks("y", x=np.array([xa, xb]))
        return integrate_iterated(
            lambda y, x: fn(x, y), Interval(ya, yb, n), Interval(xa, xb, n),
            outer_breakpoints=ybreaks, inner_breakpoints=breaks("x"),
        )
    if isinstance(region, Triangle):
        h = region.height

        def row(y):
            y = float(y)
            half = (h - (y - region.y_base)) / SQRT3
            mid = region.x_left + region.side / 2.0
            if half <= 0:
                return 0.0
            return integrate_between(lambda x: fn(x, y), mid - half, mid + half, n,
                                     breaks("x", y=y))

        ys = region.y_base
        return integrate_between(np.vectorize(row), ys, ys + h, n, breaks("y"))
    if isinstance(region, Disc):
        rbreaks = [r - 0 for r in breaks("r") if 0 < r < region.radius]
        return integrate_iterated(
            lambda th, r: r * fn(region.xc + r * np.cos(th), region.yc + r * np.sin(th)),
            Interval(0.0, 2.0 * math.pi, n), Interval(0.0, region.radius, n),
            inner_breakpoints=rbreaks,
        )
    raise TypeError(f"unsupported region {region!r}")


def circulation(E_x: Callable, E_y: Callable, loop, n: int = 401,
                breaks: Callable[..., list] = _no_breaks) -> float:
    """Counter-clockwise line integral of the planar vector field ``(E_x, E_y)``."""
    _require_area(loop)
    if isinstance(loop, Rectangle):
        xa, xb = sorted((loop.x0, loop.x1))
        ya, yb = sorted((loop.y0, loop.y1))
        bottom = integrate_between(lambda x: E_x(x, ya), xa, xb, n, breaks("x", y=ya))
        right = integrate_between(lambda y: E_y(xb, y), ya, yb, n, breaks("y", x=xb))
        top = integrate_between(lambda x: E_x(x, yb), xa, xb, n, breaks("x", y=yb))
        left = integrate_between(lambda y: E_y(xa, y), ya, yb, n, breaks("y", x=xa))
        return bottom + right - top - left
    if isinstance(loop, Disc):
        r = loop.radius

        def tangential(th):
            x = loop.xc + r * np.cos(th)
            y = loop.yc + r * np.sin(th)
            return r * (-np.sin(th) * E_x(x, y) + np.cos(th) * E_y(x, y))

        return integrate_between(tangential, 0.0, 2.0 * math.pi, n)
    raise TypeError(f"unsupported loop {loop!r}")


def faraday_residual(f: FieldSet, loop, times: Interval, con: Constants,
                     n: int = 401, dt: float = 1e-4) -> float:
    """Largest ``|circulation of E + (1/c) d(enclosed B flux)/dt|`` over ``times``."""
    _require_area(loop)
    worst = 0.0
    for t in times.nodes():
        def bk(axis, _t=t, **coords):
            return f.breakpoints(axis, t=_t, **coords)

        circ = circulation(lambda x, y: f.E_x(x, y, t), lambda x, y: f.E_y(x, y, t),
                           loop, n, bk)

        def bkt(axis, _t=t, **coords):
            # kinks at both shifted instants sit on panel edges, so the
            # quadrature error does not jump between the two evaluations
            return sorted({*f.breakpoints(axis, t=_t - dt, **coords),
                           *f.breakpoints(axis, t=_t + dt, **coords)})

        def flux_at(tt):
            return flux_through(lambda x, y: f.B(x, y, tt), loop, n, bkt)

        dphi = (flux_at(t + dt) - flux_at(t - dt)) / (2.0 * dt)
        worst = max(worst, abs(circ + dphi / con.c))
    return worst


def consistency_deviation(p: PotentialSet, f: FieldSet, con: Constants, points,
                          h: float = 1e-5) -> float:
    """Largest relative mismatch between ``f`` and fields derived from ``p``.

    ``points`` is an ``(N, 3)`` array of ``(x, y, t)`` samples.
    """
    derived = derive_fields(p, con, h)
    pts = np.asarray(points, dtype=float)
    x, y, t = pts[:, 0], pts[:, 1], pts[:, 2]
    worst = 0.0
    for mine, theirs in ((f.E_x, derived.E_x), (f.E_y, derived.E_y), (f.B, derived.B)):
        a = evaluate(mine, x, y, t)
        b = evaluate(theirs, x, y, t)
        scale = max(1.0, float(np.max(np.abs(a))))
        worst = max(worst, float(np.max(np.abs(a - b))) / scale)
    return worst


# --------------------------------------------------------------------------
# scenarios

@dataclass(frozen=True)
class Multiplicities:
    """Additive constants of multiply-connected configurations.

    ``tau`` is added to the first 1-D/2-D route, ``chi`` to the second one,
    ``f`` to the primary 2+1-D route and ``-f`` to its spatial dual.
    """

    tau: float = 0.0
    chi: float = 0.0
    f: float = 0.0

    def is_zero(self) -> bool:
        return self.tau == 0.0 and self.chi == 0.0 and self.f == 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    params: Mapping[str, float]
    constants: Constants
    potentials: PotentialSet
    fields: FieldSet
    connectivity: str
    base: tuple[float, float, float]
    observation: BoxDomain
    observable: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    multiplicities: Multiplicities | None = None
    lambda0: float = 0.0
    description: str = ""
    extras: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.connectivity not in ("simple", "multiple"):
            raise ValueError(f"connectivity must be simple or multiple, got {self.connectivity!r}")
        if (self.multiplicities is not None) != (self.connectivity == "multiple"):
            raise ValueError("multiplicity values are present iff connectivity is multiple")
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))
        object.__setattr__(self, "extras", MappingProxyType(dict(self.extras)))

    @property
    def dimension(self) -> str:
        return self.potentials.dimension

    def breakpoints(self, axis: str, **coords) -> list:
        return self.potentials.breakpoints(axis, **coords)


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def _dsmoothstep(u):
    inside = (u > 0.0) & (u < 1.0)
    u = np.clip(u, 0.0, 1.0)
    return np.where(inside, 6.0 * u * (1.0 - u), 0.0)


def _wide_domain(*tags) -> BoxDomain:
    return BoxDomain.of(**{k: Interval(-1e6, 1e6, 3) for k in tags})


def _vertical_strip_capacitor(P, con):
    E0, a, b, k = P["E0"], P["a"], P["b"], P["gauge_mix"]
    x0, t0 = P["x0"], P["t0"]
    if not a < b:
        raise ScenarioError(f"strip edges need a < b, got a={a}, b={b}")
    if not x0 < a:
        raise ScenarioError("base point must lie left of the strip (x0 < a)")
    c = con.c

    def strip(x):
        return _ind((x >= a) & (x <= b))

    pots = PotentialSet(
        A_x=lambda x, y, t: -c * k * E0 * t * strip(x),
        A_y=zero,
        phi=lambda x, y, t: -(1.0 - k) * E0 * np.clip(x - a, 0.0, b - a) + 0.0 * t,
        dimension="1d",
        derivatives={
            "A_x_t": lambda x, y, t: -c * k * E0 * strip(x) + 0.0 * t,
            "phi_x": lambda x, y, t: -(1.0 - k) * E0 * strip(x) + 0.0 * t,
        },
        domain=_wide_domain("x", "t"),
        breakpoints=_static_breaks(x=(a, b)),
    )
    flds = FieldSet(
        E_x=lambda x, y, t: E0 * strip(x) + 0.0 * t,
        E_y=zero, B=zero, faraday_consistent=True, breakpoints=pots.breakpoints,
    )
    obs = BoxDomain.of(x=Interval(b + 0.25, b + 3.25), t=Interval(t0, t0 + 4.0))
    return dict(
        potentials=pots, fields=flds, connectivity="simple", base=(x0, 0.0, t0),
        observation=obs, observable=lambda x, y, t: np.asarray(x) >= b,
        description="1-D capacitor charged for all time: E = E0 on a <= x <= b",
    )


def _temporal_strip(P, con):
    E0, T, k = P["E0"], P["T"], P["gauge_mix"]
    x0, t0 = P["x0"], P["t0"]
    if not T > 0:
        raise ScenarioError(f"pulse duration T must be positive, got {T}")
    if not t0 < 0:
        raise ScenarioError("base instant must precede the pulse (t0 < 0)")
    c = con.c

    def pulse(t):
        return _ind((t >= 0.0) & (t <= T))

    pots = PotentialSet(
        A_x=lambda x, y, t: -c * (1.0 - k) * E0 * np.clip(t, 0.0, T) + 0.0 * x,
        A_y=zero,
        phi=lambda x, y, t: -k * E0 * x * pulse(t),
        dimension="1d",
        derivatives={
            "A_x_t": lambda x, y, t: -c * (1.0 - k) * E0 * pulse(t) + 0.0 * x,
            "phi_x": lambda x, y, t: -k * E0 * pulse(t) + 0.0 * x,
        },
        domain=_wide_domain("x", "t"),
        breakpoints=_static_breaks(t=(0.0, T)),
    )
    flds = FieldSet(
        E_x=lambda x, y, t: E0 * pulse(t) + 0.0 * x,
        E_y=zero, B=zero, faraday_consistent=True, breakpoints=pots.breakpoints,
    )
    obs = BoxDomain.of(x=Interval(x0 - 1.0, x0 + 3.0), t=Interval(T + 0.25, T + 3.25))
    return dict(
        potentials=pots, fields=flds, connectivity="simple", base=(x0, 0.0, t0),
        observation=obs, observable=lambda x, y, t: np.asarray(t) >= T,
        description="uniform E0 in all space for 0 <= t <= T",
    )


def _triangle_edges(a):
    h = SQRT3 * a / 2.0

    def breaks(axis, **coords):
        if axis == "x":
            out = {0.0, a / 2.0, a}
            ys = np.atleast_1d(coords.get("y", np.array([])))
            for y in ys[(ys >= 0.0) & (ys <= h)]:
                out.update((y / SQRT3, a - y / SQRT3))
            return sorted(out)
        if axis == "y":
            out = {0.0, h}
            xs = np.atleast_1d(coords.get("x", np.array([])))
            left = xs[(xs > 0.0) & (xs < a / 2.0)]
            right = xs[(xs >= a / 2.0) & (xs < a)]
            out.update((SQRT3 * left).tolist())
            out.update((SQRT3 * (a - right)).tolist())
            return sorted(out)
        return []

    return breaks


def _triangle_B(P, con):
    B0, a, k = P["B"], P["a"], P["gauge_mix"]
    x0, y0 = P["x0"], P["y0"]
    if not a > 0:
        raise ScenarioError(f"triangle side must be positive, got {a}")
    if not (x0 <= 0.0 and y0 <= 0.0):
        raise ScenarioError("base point must lie to the lower left of the triangle")
    h = SQRT3 * a / 2.0

    def inside(x, y):
        return (y >= 0.0) & (y <= h) & (x >= y / SQRT3) & (x <= a - y / SQRT3)

    def row_length(x, y):
        width = np.clip(a - 2.0 * y / SQRT3, 0.0, None)
        return np.clip(x - y / SQRT3, 0.0, width) * _ind((y >= 0.0) & (y <= h))

    breaks = _triangle_edges(a)
    pots = PotentialSet(
        A_x=lambda x, y, t: k * y + 0.0 * x,
        A_y=lambda x, y, t: B0 * row_length(x, y) + k * x + 0.0 * t,
        phi=zero,
        dimension="2d",
        derivatives={
            "A_x_t": zero, "A_y_t": zero, "phi_x": zero, "phi_y": zero,
            "A_x_y": lambda x, y, t: k + 0.0 * (x + y + t),
            "A_y_x": lambda x, y, t: B0 * _ind(inside(x, y)) + k + 0.0 * t,
        },
        domain=_wide_domain("x", "y", "t"),
        breakpoints=breaks,
    )
    flds = FieldSet(E_x=zero, E_y=zero,
                    B=lambda x, y, t: B0 * _ind(inside(x, y)) + 0.0 * t,
                    faraday_consistent=True, breakpoints=breaks)

    def observable(x, y, t=0.0):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        floor = np.where(x <= a / 2.0, h, np.where(x < a, SQRT3 * (a - x), -np.inf))
        return y >= floor

    obs = BoxDomain.of(x=Interval(a / 2.0, a + 1.0), y=Interval(-0.25, h + 0.5))
    return dict(
        potentials=pots, fields=flds, connectivity="simple", base=(x0, y0, 0.0),
        observation=obs, observable=lambda x, y, t: observable(x, y),
        description="uniform B inside an apex-up equilateral triangle (base on the x axis, "
                    "left vertex at the origin)",
        extras={"region": Triangle(0.0, a, 0.0)},
    )


def _magnetic_ab_flux_tube(P, con):
    B0, s, k = P["B"], P["half_width"], P["gauge_mix"]
    x0, y0 = P["x0"], P["y0"]
    if not s > 0:
        raise ScenarioError("tube half width must be positive")
    if not (x0 < -s and y0 < -s):
        raise ScenarioError("base point must lie to the lower left of the tube")

    def tube(x, y):
        return _ind((np.abs(x) <= s) & (np.abs(y) <= s))

    flux = 4.0 * s * s * B0
    breaks = _static_breaks(x=(-s, s), y=(-s, s))
    pots = PotentialSet(
        A_x=lambda x, y, t: k * y + 0.0 * x,
        A_y=lambda x, y, t: B0 * np.clip(x + s, 0.0, 2.0 * s) * _ind(np.abs(y) <= s) + k * x,
        phi=zero,
        dimension="2d",
        derivatives={
            "A_x_t": zero, "A_y_t": zero, "phi_x": zero, "phi_y": zero,
            "A_x_y": lambda x, y, t: k + 0.0 * (x + y + t),
            "A_y_x": lambda x, y, t: B0 * tube(x, y) + k + 0.0 * t,
        },
        domain=_wide_domain("x", "y", "t"),
        breakpoints=breaks,
    )
    flds = FieldSet(E_x=zero, E_y=zero, B=lambda x, y, t: B0 * tube(x, y) + 0.0 * t,
                    faraday_consistent=True, breakpoints=breaks)
    obs = BoxDomain.of(x=Interval(s + 0.25, s + 2.25), y=Interval(s + 0.25, s + 2.25))
    return dict(
        potentials=pots, fields=flds, connectivity="multiple", base=(x0, y0, 0.0),
        observation=obs,
        observable=lambda x, y, t: (np.asarray(x) >= s) & (np.asarray(y) >= s),
        multiplicities=Multiplicities(tau=-flux, chi=flux),
        description="inaccessible square flux tube |x|,|y| <= half_width carrying flux B*(2s)^2",
        extras={"flux": flux},
    )


def _electric_ab_cages(P, con):
    V0, T, w = P["V0"], P["T"], P["wall"]
    x0, t0 = P["x0"], P["t0"]
    if not (T > 0 and w > 0):
        raise ScenarioError("pulse duration and wall half-thickness must be positive")
    if not (x0 < -w and t0 < 0):
        raise ScenarioError("base point must be in the left cage before the pulse")
    c = con.c

    def V(t):
        return V0 * _ind((t >= 0.0) & (t <= T))

    def wall(x):
        return _ind(np.abs(x) <= w)

    pots = PotentialSet(
        A_x=zero, A_y=zero,
        phi=lambda x, y, t: V(t) * np.clip((x + w) / (2.0 * w), 0.0, 1.0),
        dimension="1d",
        derivatives={"A_x_t": zero, "phi_x": lambda x, y, t: V(t) * wall(x) / (2.0 * w)},
        domain=_wide_domain("x", "t"),
        breakpoints=_static_breaks(x=(-w, w), t=(0.0, T)),
    )
    flds = FieldSet(E_x=lambda x, y, t: -V(t) * wall(x) / (2.0 * w), E_y=zero, B=zero,
                    faraday_consistent=True, breakpoints=pots.breakpoints)
    electric_flux = -c * V0 * T          # c * (integral of E over the enclosed patch)
    obs = BoxDomain.of(x=Interval(w + 0.25, w + 2.25), t=Interval(T + 0.25, T + 2.25))
    return dict(
        potentials=pots, fields=flds, connectivity="multiple", base=(x0, 0.0, t0),
        observation=obs,
        observable=lambda x, y, t: (np.asarray(x) >= w) & (np.asarray(t) >= T),
        multiplicities=Multiplicities(tau=-electric_flux, chi=electric_flux),
        description="two equipotential cages; right cage raised to V0 for 0 <= t <= T",
        extras={"electric_flux": electric_flux, "ab_phase_lambda": -c * V0 * T},
    )


def van_kampen_model(Phi0, Phi1, t_s, ramp, R, shell, c):
    """Flux function ``Psi(r, t)`` (flux through the disc of radius r) and its
    partials for a confined solenoid whose flux is switched at ``t_s``.

    Outside the sharp wavefront ``r = c (t - t_s)`` the enclosed flux stays at
    its initial value; the compensating flux rides on an outgoing shell of
    width ``shell`` just behind the front. Fields follow from
    ``B = dPsi/dr / (2 pi r)`` and ``E_phi = -dPsi/dt / (2 pi r c)`` so
    Faraday's law holds identically.
    """
    def flux(t):
        return Phi0 + (Phi1 - Phi0) * _smoothstep((np.asarray(t, dtype=float) - t_s) / ramp)

    def dflux(t):
        return (Phi1 - Phi0) * _dsmoothstep((np.asarray(t, dtype=float) - t_s) / ramp) / ramp

    def front(t):
        return c * (np.asarray(t, dtype=float) - t_s)

    def u(r, t):
        return (r - front(t) + shell) / shell

    def profile(r):
        return np.minimum(r / R, 1.0) ** 2

    def psi(r, t):
        r = np.asarray(r, dtype=float)
        return profile(r) * (Phi0 + (flux(t) - Phi0) * (1.0 - _smoothstep(u(r, t))))

    def psi_t(r, t):
        r = np.asarray(r, dtype=float)
        sig = _smoothstep(u(r, t))
        dsig_dt = _dsmoothstep(u(r, t)) * (-c / shell)
        return profile(r) * (dflux(t) * (1.0 - sig) - (flux(t) - Phi0) * dsig_dt)

    def b_field(r, t):
        r = np.asarray(r, dtype=float)
        core = r < R
        dp_over_r = np.where(core, 2.0 / R ** 2, 0.0)
        p_over_r = np.where(core, r / R ** 2, 1.0 / np.where(core, 1.0, r))
        bracket = Phi0 + (flux(t) - Phi0) * (1.0 - _smoothstep(u(r, t)))
        dsig_dr = _dsmoothstep(u(r, t)) / shell
        return (dp_over_r * bracket - p_over_r * (flux(t) - Phi0) * dsig_dr) / (2.0 * math.pi)

    def bracket(r, t):
        return Phi0 + (flux(t) - Phi0) * (1.0 - _smoothstep(u(r, t)))

    def bracket_t(r, t):
        return dflux(t) * (1.0 - _smoothstep(u(r, t))) \
            + (flux(t) - Phi0) * _dsmoothstep(u(r, t)) * c / shell

    def profile_over_r2(r):
        # p(r) / r^2 without the removable singularity at the axis
        r = np.asarray(r, dtype=float)
        core = r < R
        return np.where(core, 1.0 / R ** 2, 1.0 / np.where(core, 1.0, r) ** 2)

    def e_phi_over_r(r, t):
        return -bracket_t(r, t) * profile_over_r2(r) / (2.0 * math.pi * c)

    def a_phi_over_r(r, t):
        return bracket(r, t) * profile_over_r2(r) / (2.0 * math.pi)

    def radial_breaks(t):
        f = float(front(t))
        return sorted({R, *(v for v in (f - shell, f) if v > 0)})

    return dict(flux=flux, dflux=dflux, front=front, psi=psi, psi_t=psi_t,
                b_field=b_field, e_phi_over_r=e_phi_over_r, a_phi_over_r=a_phi_over_r,
                radial_breaks=radial_breaks)


def circle_breaks(radii, other, clustering: int = 48) -> list:
    """Cartesian breakpoints for integrands with kinks on centred circles.

    For each radius ``r`` this returns the chord ends ``+-sqrt(r^2 - v^2)``
    for every value ``v`` of the other coordinate, plus Chebyshev-clustered
    points ``+-r cos(k pi / m)`` that tame the square-root behaviour of
    chord lengths near the tangent points.
    """
    other = np.atleast_1d(np.asarray(other, dtype=float))
    out = set()
    for r in radii:
        ks = np.arange(clustering + 1)
        out.update((r * np.cos(np.pi * ks / clustering)).tolist())
        inside = other[np.abs(other) < r]
        half = np.sqrt(r * r - inside * inside)
        out.update(half.tolist())
        out.update((-half).tolist())
    return sorted(out)


def _van_kampen_solenoid(P, con):
    Phi0, Phi1, t_s, ramp = P["Phi0"], P["Phi1"], P["t_switch"], P["ramp"]
    R, shell = P["core_radius"], P["shell_width"]
    x0, y0, t0 = P["x0"], P["y0"], P["t0"]
    if not (ramp > 0 and R > 0 and shell > 0):
        raise ScenarioError("ramp, core_radius and shell_width must be positive")
    if not t0 < t_s:
        raise ScenarioError("base instant must precede the switch (t0 < t_switch)")
    if not (x0 < -R and y0 < -R):
        raise ScenarioError("base point must lie to the lower left of the solenoid core")
    c = con.c
    M = van_kampen_model(Phi0, Phi1, t_s, ramp, R, shell, c)

    def rad(x, y):
        return np.hypot(x, y)

    def A_x(x, y, t):
        return -M["a_phi_over_r"](rad(x, y), t) * y

    def A_y(x, y, t):
        return M["a_phi_over_r"](rad(x, y), t) * x

    def E_x(x, y, t):
        return -M["e_phi_over_r"](rad(x, y), t) * y

    def E_y(x, y, t):
        return M["e_phi_over_r"](rad(x, y), t) * x

    def B(x, y, t):
        return M["b_field"](rad(x, y), t)

    def breaks(axis, **coords):
        t = coords.get("t", t0)
        if axis == "r":
            return M["radial_breaks"](float(np.max(t)))
        if axis == "t":
            return [t_s, t_s + ramp]
        radii = set()
        for tv in np.atleast_1d(t):
            radii.update(M["radial_breaks"](float(tv)))
        other = coords.get("y" if axis == "x" else "x", ())
        return circle_breaks(sorted(radii), other)

    def A_x_t(x, y, t):
        return -E_x(x, y, t) * c

    def A_y_t(x, y, t):
        return -E_y(x, y, t) * c

    pots = PotentialSet(
        A_x=A_x, A_y=A_y, phi=zero, dimension="2+1d",
        derivatives={"A_x_t": A_x_t, "A_y_t": A_y_t, "phi_x": zero, "phi_y": zero},
        domain=_wide_domain("x", "y", "t"),
        breakpoints=breaks,
    )
    flds = FieldSet(E_x=E_x, E_y=E_y, B=B, faraday_consistent=True, breakpoints=breaks)

    def observable(x, y, t):
        x, y, t = (np.asarray(v, dtype=float) for v in (x, y, t))
        return (x >= R) & (y >= R) & (np.hypot(x, y) > M["front"](t))

    obs = BoxDomain.of(x=Interval(1.0, 4.0, 21), y=Interval(1.0, 4.0, 21),
                       t=Interval(t0, t_s + 0.9, 21))
    return dict(
        potentials=pots, fields=flds, connectivity="multiple", base=(x0, y0, t0),
        observation=obs, observable=observable,
        multiplicities=Multiplicities(f=float(M["flux"](t0))),
        description="confined solenoid flux switched from Phi0 to Phi1 on [t_switch, "
                    "t_switch + ramp]; exterior fields confined behind a causal wavefront",
        extras=M,
    )


def _naive_demo_polynomial(P, con):
    x0, t0 = P["x0"], P["t0"]
    c = con.c
    pots = PotentialSet(
        A_x=lambda x, y, t: x * t,
        A_y=zero,
        phi=lambda x, y, t: x * x * t,
        dimension="1d",
        derivatives={"A_x_t": lambda x, y, t: x + 0.0 * t, "phi_x": lambda x, y, t: 2.0 * x * t},
        domain=_wide_domain("x", "t"),
    )
    flds = FieldSet(E_x=lambda x, y, t: -2.0 * x * t - x / c, E_y=zero, B=zero,
                    faraday_consistent=True)
    obs = BoxDomain.of(x=Interval(0.5, 2.0), t=Interval(0.5, 2.0))
    return dict(
        potentials=pots, fields=flds, connectivity="simple", base=(x0, 0.0, t0),
        observation=obs, observable=lambda x, y, t: np.ones(np.broadcast(x, t).shape, bool),
        description="A = x t, phi = x^2 t: demonstrates that the naive combined Dirac "
                    "phase fails the gauge equations",
    )


@dataclass(frozen=True)
class ScenarioInfo:
    name: str
    builder: Callable
    defaults: Mapping[str, float]
    exercises: str


SCENARIOS: dict[str, ScenarioInfo] = {
    info.name: info for info in (
        ScenarioInfo("vertical_strip_capacitor", _vertical_strip_capacitor,
                     dict(E0=2.0, a=0.0, b=1.0, gauge_mix=0.5, x0=-1.0, t0=0.0),
                     "1-D dynamic routes (time-first / space-first) with a spatial strip of E"),
        ScenarioInfo("temporal_strip", _temporal_strip,
                     dict(E0=1.0, T=1.0, gauge_mix=0.5, x0=0.0, t0=-1.0),
                     "1-D dynamic routes with a finite-duration uniform E"),
        ScenarioInfo("triangle_B", _triangle_B,
                     dict(B=1.0, a=2.0, gauge_mix=0.3, x0=-0.5, y0=-0.5),
                     "2-D static routes with a triangular B; separable enclosed flux"),
        ScenarioInfo("magnetic_ab_flux_tube", _magnetic_ab_flux_tube,
                     dict(B=1.0, half_width=0.5, gauge_mix=0.2, x0=-2.0, y0=-2.0),
                     "2-D static routes with multiplicities: magnetic AB phase"),
        ScenarioInfo("electric_ab_cages", _electric_ab_cages,
                     dict(V0=1.0, T=1.0, wall=0.5, x0=-2.0, t0=-1.0),
                     "1-D dynamic routes with multiplicities: electric AB phase"),
        ScenarioInfo("van_kampen_solenoid", _van_kampen_solenoid,
                     dict(Phi0=1.0, Phi1=2.0, t_switch=5.0, ramp=1.0, core_radius=0.5,
                          shell_width=0.5, x0=-2.0, y0=-2.0, t0=0.0),
                     "2+1-D primary/dual routes; causal phase difference for a switched flux"),
        ScenarioInfo("naive_demo_polynomial", _naive_demo_polynomial,
                     dict(x0=0.2, t0=0.3),
                     "naive combined Dirac phase (both variants) failing the gauge equations"),
    )
}


def builtin_config(name: str, params: Mapping[str, float] | None = None,
                   con: Constants | None = None, lambda0: float = 0.0) -> ScenarioConfig:
    """Build one of the named scenarios, overriding defaults with ``params``."""
    if name not in SCENARIOS:
        raise ScenarioError(f"unknown scenario {name!r}; known: {', '.join(SCENARIOS)}")
    info = SCENARIOS[name]
    params = dict(params or {})
    unknown = set(params) - set(info.defaults)
    if unknown:
        raise ScenarioError(f"unknown parameters for {name}: {', '.join(sorted(unknown))}")
    merged = {**info.defaults, **{k: float(v) for k, v in params.items()}}
    for key, value in merged.items():
        if not math.isfinite(value):
            raise ScenarioError(f"parameter {key} must be finite")
    con = con or Constants()
    parts = info.builder(merged, con)
    return ScenarioConfig(name=name, params=merged, constants=con, lambda0=lambda0, **parts)


def custom_config(name: str, potentials: PotentialSet, base: tuple[float, float, float],
                  observation: BoxDomain, con: Constants | None = None,
                  fields: FieldSet | None = None, connectivity: str = "simple",
                  multiplicities: Multiplicities | None = None,
                  observable: Callable | None = None, lambda0: float = 0.0) -> ScenarioConfig:
    """Wrap user-supplied potentials as a scenario.

    Fields are derived from the potentials unless given; the observable
    region defaults to the whole observation box.
    """
    con = con or Constants()
    if observable is None:
        def observable(x, y, t):
            return np.ones(np.broadcast(np.asarray(x), np.asarray(y), np.asarray(t)).shape, bool)
    return ScenarioConfig(
        name=name, params={}, constants=con, potentials=potentials,
        fields=fields or derive_fields(potentials, con), connectivity=connectivity,
        base=tuple(float(v) for v in base), observation=observation, observable=observable,
        multiplicities=multiplicities, lambda0=lambda0,
    )
