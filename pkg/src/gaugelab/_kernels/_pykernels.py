"""Pure-Python/NumPy implementations of the hot kernels.

Semantics are identical to the compiled module ``_ckernels``; this module is
used whenever the extension is unavailable or ``GAUGELAB_PURE_PYTHON`` is set.
"""

import numpy as np


def simpson_panels(values, widths):
    """Sum of Simpson panels.

    ``values`` holds ``3P`` samples, three per panel (left edge, midpoint,
    right edge), and ``widths`` the ``P`` panel widths.
    """
    f = np.asarray(values, dtype=np.float64)
    w = np.asarray(widths, dtype=np.float64)
    total = 0.0
    for k in range(w.shape[0]):
        total += w[k] / 6.0 * (f[3 * k] + 4.0 * f[3 * k + 1] + f[3 * k + 2])
    return total


def cumulative_panels(values, widths):
    """Running Simpson integral along the last axis of a 2-D array.

    Returns an array of shape ``(M, P+1)`` whose column ``k`` is the integral
    from the first edge up to edge ``k``.
    """
    f = np.ascontiguousarray(values, dtype=np.float64)
    w = np.asarray(widths, dtype=np.float64)
    panel = w / 6.0 * (f[:, 0::3] + 4.0 * f[:, 1::3] + f[:, 2::3])
    out = np.zeros((f.shape[0], w.shape[0] + 1))
    np.cumsum(panel, axis=1, out=out[:, 1:])
    return out


def _lorentz_rhs(s, qm, ex, ez, by, inv_c):
    vx, vz = s[2], s[3]
    return np.array([
        vx,
        vz,
        qm * (ex - inv_c * vz * by),
        qm * (ez + inv_c * vx * by),
    ])


def rk4_lorentz_plane(state, qm, ex, ez, by, inv_c, dt, nsteps):
    """Classical RK4 for a charge in uniform in-plane E and out-of-plane B.

    ``state`` is ``(x, z, vx, vz)``; returns the state after ``nsteps`` steps.
    """
    s = np.array(state, dtype=np.float64)
    half = 0.5 * dt
    for _ in range(int(nsteps)):
        k1 = _lorentz_rhs(s, qm, ex, ez, by, inv_c)
        k2 = _lorentz_rhs(s + half * k1, qm, ex, ez, by, inv_c)
        k3 = _lorentz_rhs(s + half * k2, qm, ex, ez, by, inv_c)
        k4 = _lorentz_rhs(s + dt * k3, qm, ex, ez, by, inv_c)
        s = s + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)
    return s
