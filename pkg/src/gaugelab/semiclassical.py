"""Double-slit phases: closed-form AB and semiclassical phases for a magnetic
strip and for an electric pulse, plus a Lorentz-force trajectory oracle.

Geometry: particles travel along +z toward the screen; x is the transverse
screen coordinate, positive upward. The magnetic strip occupies
``0 <= z <= W`` with B along +y, so a positive charge is deflected toward -x.
The electric pulse points along +x and lasts ``T``, centred on the moment
the particle passes the slits. Every sign flips for negative charges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .fields import Constants

REGIME_LIMIT = 0.05
MIN_ORACLE_STEPS = 10_000


class Phase(float):
    """A float that also carries regime warnings raised while computing it."""

    regime_warnings: tuple[str, ...]

    def __new__(cls, value, warnings=()):
        obj = super().__new__(cls, value)
        obj.regime_warnings = tuple(warnings)
        return obj


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class SlitSetup:
    L: float
    d: float
    lambda_dB: float
    v: float
    q: float = 1.0
    m: float = 1.0
    W: float = 0.0
    B: float = 0.0
    E: float = 0.0
    T: float = 0.0
    con: Constants = field(default_factory=Constants)

    def __post_init__(self):
        for name in ("L", "d", "lambda_dB", "v", "m"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.W < 0 or self.T < 0:
            raise ValueError("strip width and pulse duration must be non-negative")
        expected = self.con.h / (self.m * self.v)
        if abs(self.lambda_dB - expected) > 1e-9 * expected:
            raise ValueError(f"lambda_dB={self.lambda_dB} inconsistent with h/(m v)={expected}")

    @classmethod
    def from_kinematics(cls, L, d, v, m=1.0, con: Constants | None = None, **kw) -> "SlitSetup":
        """Setup whose de Broglie wavelength is ``h / (m v)``."""
        con = con or Constants()
        if not (m > 0 and v > 0):
            raise ValueError("mass and speed must be positive")
        return cls(L=L, d=d, lambda_dB=con.h / (m * v), v=v, m=m, con=con, **kw)

    @property
    def magnetic_ratio(self) -> float:
        return self.W / self.L

    @property
    def electric_ratio(self) -> float:
        return self.v * self.T / self.L

    def warnings(self, variant: str) -> tuple[str, ...]:
        ratio = self.magnetic_ratio if variant == "magnetic" else self.electric_ratio
        label = "W/L" if variant == "magnetic" else "vT/L"
        if ratio >= REGIME_LIMIT:
            return (f"small-deflection regime violated: {label} = {ratio:.3g} >= {REGIME_LIMIT}",)
        return ()


def ab_phase_magnetic(s: SlitSetup) -> Phase:
    """``2 pi (q/e) Phi / Phi_0`` with ``Phi = B W d`` and ``Phi_0 = h c / e``."""
    flux = s.B * s.W * s.d
    return Phase(2.0 * math.pi * (s.q / s.con.e) * flux / s.con.flux_quantum,
                 s.warnings("magnetic"))


def fringe_shift_magnetic(s: SlitSetup) -> Phase:
    """Central-fringe displacement ``-B W q L lambda / (h c)``."""
    return Phase(-s.B * s.W * s.q * s.L * s.lambda_dB / (s.con.h * s.con.c),
                 s.warnings("magnetic"))


def ab_phase_electric(s: SlitSetup) -> Phase:
    """``-2 pi (q/e) c T dV / Phi_0`` with ``dV = E d``."""
    dv = s.E * s.d
    return Phase(-2.0 * math.pi * (s.q / s.con.e) * s.con.c * s.T * dv / s.con.flux_quantum,
                 s.warnings("electric"))


def fringe_shift_electric(s: SlitSetup) -> Phase:
    """Central-fringe displacement ``q E T L lambda / h``."""
    return Phase(s.q * s.E * s.T * s.L * s.lambda_dB / s.con.h, s.warnings("electric"))


def semi_phase(s: SlitSetup, x_c: float) -> Phase:
    """Path-difference phase ``(2 pi / lambda) d x_c / L`` at the displaced fringe."""
    warn = tuple(getattr(x_c, "regime_warnings", ()))
    if abs(x_c) >= REGIME_LIMIT * s.L:
        warn += (f"|x_c|/L = {abs(x_c) / s.L:.3g} is not small",)
    return Phase(2.0 * math.pi * s.d * x_c / (s.lambda_dB * s.L), warn)


def trajectory_oracle(s: SlitSetup, variant: str, steps: int = 20_000) -> tuple[float, float]:
    """Integrate the Lorentz force for one ray per slit (starting at
    ``x = +-d/2``) and return the midpoint screen displacement ``x_c`` and
    the mean transverse velocity change ``delta_v``.

    Magnetic: RK4 through the strip, with a final partial step that lands each
    ray exactly on ``z = W``, then straight flight to the screen at
    ``z = W/2 + L``. Electric: RK4 over the pulse ``[-T/2, T/2]`` (slit passage
    at ``t = 0``), then straight flight until ``t = L / v``.
    """
    if steps < MIN_ORACLE_STEPS:
        raise ValueError(f"oracle needs at least {MIN_ORACLE_STEPS} steps, got {steps}")
    if variant not in ("magnetic", "electric"):
        raise ValueError(f"variant must be magnetic or electric, got {variant!r}")
    rays = [_ray(s, variant, steps, x_start) for x_start in (-s.d / 2.0, s.d / 2.0)]
    x_c = 0.5 * (rays[0][0] + rays[1][0])
    dv = 0.5 * (rays[0][1] + rays[1][1])
    return float(x_c), float(dv)


def _ray(s: SlitSetup, variant: str, steps: int, x_start: float) -> tuple[float, float]:
    qm = s.q / s.m
    inv_c = 1.0 / s.con.c
    start = (x_start, 0.0, 0.0, s.v)
    if variant == "magnetic":
        if s.W == 0.0 or s.B == 0.0:
            return x_start, 0.0
        dt = s.W / (s.v * steps)
        state = _kernels.rk4_lorentz_plane(start, qm, 0.0, 0.0, s.B, inv_c, dt, steps)
        _finite(state)
        remaining = (s.W - state[1]) / state[3]
        if remaining != 0.0:
            state = _kernels.rk4_lorentz_plane(state, qm, 0.0, 0.0, s.B, inv_c, remaining, 1)
            _finite(state)
        x, z, vx, vz = state
        if vz <= 0:
            raise OracleError("particle turned around inside the strip")
        return x + vx * (s.W / 2.0 + s.L - z) / vz, vx
    if s.T == 0.0 or s.E == 0.0:
        return x_start, 0.0
    state = _kernels.rk4_lorentz_plane(start, qm, s.E, 0.0, 0.0, inv_c, s.T / steps, steps)
    _finite(state)
    x, _, vx, _ = state
    flight = s.L / s.v - s.T / 2.0
    if flight < 0:
        raise OracleError("screen reached before the pulse ended")
    return x + vx * flight, vx


def _finite(state):
    if not np.all(np.isfinite(state)):
        raise OracleError(f"non-finite trajectory state {state}")


def summary_row(s: SlitSetup, variant: str) -> dict:
    """Values for the report table: AB phase, semiclassical phase and their ratio."""
    if variant == "magnetic":
        ab = ab_phase_magnetic(s)
        semi = semi_phase(s, fringe_shift_magnetic(s))
    else:
        ab = ab_phase_electric(s)
        semi = semi_phase(s, fringe_shift_electric(s))
    ratio = semi / ab if ab != 0 else float("nan")
    return {"variant": variant, "ab_phase": float(ab), "semi_phase": float(semi), "ratio": ratio,
            "warnings": ab.regime_warnings}
