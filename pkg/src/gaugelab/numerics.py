"""Grids, composite Simpson quadrature and central differences.

Every quadrature here works on *panels*: a panel ``[a, b]`` is sampled at its
two edges and its midpoint and integrated with the 3-point Simpson rule.
Panels never straddle a declared breakpoint, so piecewise-polynomial
integrands (strips, triangles, ramps) of degree <= 3 are integrated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels

DEFAULT_N = 401


class QuadratureError(ValueError):
    """Raised when an integrand or difference quotient is not finite."""


def default_grid_n() -> int:
    """Default sample count, overridable with ``GAUGELAB_DEFAULT_GRID``."""
    import os

    raw = os.environ.get("GAUGELAB_DEFAULT_GRID")
    if not raw:
        return DEFAULT_N
    n = int(raw)
    if n < 3:
        raise ValueError(f"GAUGELAB_DEFAULT_GRID must be >= 3, got {n}")
    return n


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    n: int = DEFAULT_N

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval bounds must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"interval requires lo < hi, got [{self.lo}, {self.hi}]")
        if int(self.n) != self.n or self.n < 3:
            raise ValueError(f"interval sample count must be an integer >= 3, got {self.n}")

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def nodes(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, int(self.n))

    def contains(self, value) -> np.ndarray:
        v = np.asarray(value)
        return (v >= self.lo) & (v <= self.hi)


@dataclass(frozen=True)
class BoxDomain:
    """An axis-aligned box; axes are tagged ``x``, ``y`` or ``t``."""

    axes: tuple[tuple[str, Interval], ...]

    def __post_init__(self):
        tags = [tag for tag, _ in self.axes]
        if not 1 <= len(tags) <= 3:
            raise ValueError("a box needs 1, 2 or 3 axes")
        if len(set(tags)) != len(tags):
            raise ValueError(f"duplicate axis tags: {tags}")
        for tag in tags:
            if tag not in ("x", "y", "t"):
                raise ValueError(f"unknown axis tag {tag!r}")

    @classmethod
    def of(cls, **axes: Interval) -> "BoxDomain":
        order = [k for k in ("x", "y", "t") if k in axes]
        return cls(tuple((k, axes[k]) for k in order))

    @property
    def tags(self) -> tuple[str, ...]:
        return tuple(tag for tag, _ in self.axes)

    def __getitem__(self, tag: str) -> Interval:
        for name, iv in self.axes:
            if name == tag:
                return iv
        raise KeyError(tag)

    def __contains__(self, tag: str) -> bool:
        return tag in self.tags

    def contains(self, **coords) -> np.ndarray:
        inside = np.asarray(True)
        for tag, iv in self.axes:
            if tag in coords:
                inside = inside & iv.contains(coords[tag])
        return inside


def _check_finite(values: np.ndarray, coords: Sequence[np.ndarray], names: Sequence[str]):
    bad = ~np.isfinite(values)
    if bad.any():
        idx = np.unravel_index(int(np.argmax(bad)), values.shape)
        where = ", ".join(
            f"{name}={float(np.broadcast_to(c, values.shape)[idx]):.12g}"
            for name, c in zip(names, coords)
        )
        raise QuadratureError(f"non-finite integrand value at {where}")


def evaluate(f: Callable, *coords) -> np.ndarray:
    """Evaluate ``f`` on broadcast arrays, falling back to element-wise calls."""
    arrays = np.broadcast_arrays(*[np.asarray(c, dtype=float) for c in coords])
    try:
        out = np.asarray(f(*arrays), dtype=float)
    except (TypeError, ValueError):
        out = None
    if out is None or out.shape != arrays[0].shape:
        if out is not None and out.ndim == 0:
            return np.full(arrays[0].shape, float(out))
        flat = [a.ravel() for a in arrays]
        out = np.array([float(f(*vals)) for vals in zip(*flat)]).reshape(arrays[0].shape)
    return out


def panel_edges(lo: float, hi: float, n: int, breakpoints: Iterable[float] = ()) -> np.ndarray:
    """Panel edges covering ``[lo, hi]`` with no panel straddling a breakpoint.

    ``n`` is the nominal sample count over the whole interval, i.e. about
    ``(n - 1) / 2`` panels, distributed over the segments by length.
    """
    if hi == lo:
        return np.array([lo])
    sign = 1.0 if hi > lo else -1.0
    a, b = min(lo, hi), max(lo, hi)
    cuts = sorted({float(p) for p in breakpoints if a < p < b})
    keys = [a, *cuts, b]
    total_panels = max(1, (int(n) - 1) // 2)
    span = b - a
    pieces = []
    for left, right in zip(keys[:-1], keys[1:]):
        k = max(1, int(round(total_panels * (right - left) / span)))
        pieces.append(np.linspace(left, right, k + 1)[:-1])
    pieces.append(np.array([b]))
    edges = np.concatenate(pieces)
    return edges if sign > 0 else edges[::-1]


EDGE_NUDGE = 1e-9


def panel_samples(edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Three samples per panel (left edge, midpoint, right edge) and the
    signed panel widths.

    Edge samples are pulled into their panel by ``EDGE_NUDGE`` times the
    panel width, so a field that jumps at a breakpoint is sampled from the
    correct side on each panel.
    """
    edges = np.asarray(edges, dtype=float)
    widths = np.diff(edges)
    eps = EDGE_NUDGE * widths
    samples = np.empty(3 * widths.size)
    samples[0::3] = edges[:-1] + eps
    samples[1::3] = edges[:-1] + 0.5 * widths
    samples[2::3] = edges[1:] - eps
    return samples, widths


def simpson_weights(edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Samples and quadrature weights equivalent to summing Simpson panels."""
    samples, widths = panel_samples(edges)
    weights = np.empty_like(samples)
    weights[0::3] = widths / 6.0
    weights[1::3] = 4.0 * widths / 6.0
    weights[2::3] = widths / 6.0
    return samples, weights


def integrate_line(f: Callable[[np.ndarray], np.ndarray], iv: Interval,
                   breakpoints: Iterable[float] = ()) -> float:
    """Composite Simpson estimate of the integral of ``f`` over ``iv``."""
    samples, widths = panel_samples(panel_edges(iv.lo, iv.hi, iv.n, breakpoints))
    values = evaluate(f, samples)
    _check_finite(values, [samples], ["x"])
    return float(_kernels.simpson_panels(values, widths))


def integrate_between(f: Callable, lo: float, hi: float, n: int | None = None,
                      breakpoints: Iterable[float] = ()) -> float:
    """Signed integral from ``lo`` to ``hi`` (``hi < lo`` allowed, equal gives 0)."""
    if lo == hi:
        return 0.0
    n = default_grid_n() if n is None else n
    if hi > lo:
        return integrate_line(f, Interval(lo, hi, n), breakpoints)
    return -integrate_line(f, Interval(hi, lo, n), breakpoints)


def integrate_iterated(f: Callable[[np.ndarray, np.ndarray], np.ndarray],
                       outer: Interval, inner: Interval,
                       outer_breakpoints: Iterable[float] = (),
                       inner_breakpoints: Iterable[float] = ()) -> float:
    """Iterated Simpson: integral over ``outer`` of the integral over ``inner``.

    ``f`` is called as ``f(outer_coord, inner_coord)``.
    """
    so, wo = simpson_weights(panel_edges(outer.lo, outer.hi, outer.n, outer_breakpoints))
    si, wi = simpson_weights(panel_edges(inner.lo, inner.hi, inner.n, inner_breakpoints))
    O, I = np.meshgrid(so, si, indexing="ij")
    values = evaluate(f, O, I)
    _check_finite(values, [O, I], ["outer", "inner"])
    inner_sums = values @ wi
    return float(np.dot(wo, inner_sums))


def central_diff(f: Callable[[float], float], at: float, h: float) -> float:
    """Second-order central difference ``(f(at+h) - f(at-h)) / 2h``."""
    if not h > 0:
        raise ValueError(f"difference step must be positive, got {h}")
    plus = float(f(at + h))
    minus = float(f(at - h))
    if not (math.isfinite(plus) and math.isfinite(minus)):
        raise QuadratureError(f"non-finite sample near x={at:.12g} (h={h:.3g})")
    return (plus - minus) / (2.0 * h)


@dataclass(frozen=True)
class CumulativeAxis:
    """Panel layout for running integrals from ``anchor`` to each of ``nodes``.

    ``samples`` are the quadrature abscissae (edges and midpoints),
    ``widths`` the panel widths and ``node_edge``/``anchor_edge`` the edge
    indices at which the requested nodes and the anchor sit.
    """

    samples: np.ndarray
    widths: np.ndarray
    node_edge: np.ndarray
    anchor_edge: int
    edges: np.ndarray

    @classmethod
    def build(cls, nodes: Sequence[float], anchor: float, n: int | None = None,
              breakpoints: Iterable[float] = ()) -> "CumulativeAxis":
        n = default_grid_n() if n is None else n
        nodes = np.atleast_1d(np.asarray(nodes, dtype=float))
        keys = np.unique(np.concatenate([nodes, [anchor]]))
        lo, hi = float(keys[0]), float(keys[-1])
        if hi == lo:
            return cls(np.zeros(0), np.zeros(0), np.zeros(nodes.size, dtype=int), 0,
                       np.array([lo]))
        span = hi - lo
        target = span / max(1, (n - 1) // 2)
        cuts = {float(p) for p in breakpoints if lo < p < hi}
        keys = np.unique(np.concatenate([keys, sorted(cuts)]))
        left, right = keys[:-1], keys[1:]
        k = np.maximum(1, np.ceil((right - left) / target - 1e-9).astype(int))
        seg = np.repeat(np.arange(k.size), k)
        j = np.arange(seg.size) - np.repeat(np.cumsum(k) - k, k)
        edges = np.append(left[seg] + (right - left)[seg] * j / k[seg], hi)
        samples, widths = panel_samples(edges)
        node_edge = np.searchsorted(edges, nodes)
        anchor_edge = int(np.searchsorted(edges, anchor))
        return cls(samples, widths, node_edge, anchor_edge, edges)

    def running(self, values: np.ndarray) -> np.ndarray:
        """Running integrals along the last axis of ``values`` (sampled at
        ``samples``), returned at the requested nodes relative to the anchor."""
        values = np.asarray(values, dtype=float)
        lead = values.shape[:-1]
        if self.widths.size == 0:
            cum = np.zeros((int(np.prod(lead, dtype=int)), 1))
        else:
            cum = _kernels.cumulative_panels(values.reshape(-1, values.shape[-1]), self.widths)
        rel = cum[:, self.node_edge] - cum[:, [self.anchor_edge]]
        return rel.reshape(*lead, self.node_edge.size)


def cumulative_line(f: Callable, nodes: Sequence[float], anchor: float,
                    n: int | None = None, breakpoints: Iterable[float] = ()) -> np.ndarray:
    """Integrals of ``f`` from ``anchor`` to every node (vectorised)."""
    axis = CumulativeAxis.build(nodes, anchor, n, breakpoints)
    values = evaluate(f, axis.samples)
    _check_finite(values, [axis.samples], ["u"])
    return axis.running(values)


def cumulative_rows(f: Callable, rows: Sequence[float], nodes: Sequence[float],
                    anchor: float, n: int | None = None,
                    breakpoints: Iterable[float] | Callable[[float], Iterable[float]] = ()
                    ) -> np.ndarray:
    """Running integrals ``int_{anchor}^{node_j} f(u, row_i) du`` for every row.

    ``breakpoints`` is either a fixed collection or a callable returning the
    breakpoints for a given row value. Returns shape ``(len(rows), len(nodes))``.
    """
    rows = np.atleast_1d(np.asarray(rows, dtype=float))
    nodes = np.atleast_1d(np.asarray(nodes, dtype=float))
    if not callable(breakpoints):
        axis = CumulativeAxis.build(nodes, anchor, n, breakpoints)
        U, R = np.meshgrid(axis.samples, rows, indexing="xy")
        values = evaluate(f, U, R)
        _check_finite(values, [U, R], ["u", "row"])
        return axis.running(values)
    # rows sharing a breakpoint layout are integrated together
    groups: dict[tuple, list[int]] = {}
    for i, r in enumerate(rows):
        groups.setdefault(tuple(sorted(float(b) for b in breakpoints(float(r)))), []).append(i)
    out = np.empty((rows.size, nodes.size))
    for key, members in groups.items():
        axis = CumulativeAxis.build(nodes, anchor, n, key)
        U, R = np.meshgrid(axis.samples, rows[members], indexing="xy")
        values = evaluate(f, U, R)
        _check_finite(values, [U, R], ["u", "row"])
        out[members] = axis.running(values)
    return out


def cumulative_rect(f: Callable, nodes_u: Sequence[float], anchor_u: float,
                    nodes_v: Sequence[float], anchor_v: float, n: int | None = None,
                    breakpoints_u: Iterable[float] = (),
                    breakpoints_v: Iterable[float] | Callable[[float], Iterable[float]] = ()
                    ) -> np.ndarray:
    """Double integrals ``int_{anchor_u}^{u_i} du int_{anchor_v}^{v_j} dv f(u, v)``
    for every node pair, returned with shape ``(len(nodes_u), len(nodes_v))``.

    The inner (``v``) integral is evaluated per outer sample, so its
    breakpoints may depend on ``u``. Breakpoints of the outer integrand that
    depend on the target ``v_j`` must be supplied (as a union) in
    ``breakpoints_u``.
    """
    au = CumulativeAxis.build(nodes_u, anchor_u, n, breakpoints_u)
    inner = cumulative_rows(lambda v, u: f(u, v), au.samples, nodes_v, anchor_v, n,
                            breakpoints_v)
    return au.running(inner.T).T
