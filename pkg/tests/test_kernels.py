import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gaugelab._kernels import _pykernels


def test_simpson_panels_exact_for_cubic(kernels):
    edges = np.linspace(0.0, 2.0, 11)
    mids = 0.5 * (edges[:-1] + edges[1:])
    samples = np.stack([edges[:-1], mids, edges[1:]], axis=1).ravel()
    total = kernels.simpson_panels(samples ** 3, np.diff(edges))
    assert total == pytest.approx(4.0, abs=1e-13)


def test_cumulative_panels_shape_and_running_sum(kernels):
    widths = np.array([0.5, 0.5, 1.0])
    vals = np.ones((2, 9))
    out = kernels.cumulative_panels(vals, widths)
    assert out.shape == (2, 4)
    np.testing.assert_allclose(out[0], [0.0, 0.5, 1.0, 2.0], atol=1e-15)


def test_rk4_free_flight(kernels):
    s = kernels.rk4_lorentz_plane(np.array([1.0, 2.0, 0.5, 3.0]), 1.0, 0.0, 0.0, 0.0, 1.0, 0.1, 10)
    np.testing.assert_allclose(s, [1.5, 5.0, 0.5, 3.0], atol=1e-14)


def test_rk4_magnetic_rotation_preserves_speed(kernels):
    s = kernels.rk4_lorentz_plane(np.array([0.0, 0.0, 0.0, 1.0]), 1.0, 0.0, 0.0, 1.0, 1.0, 1e-3, 6283)
    assert np.hypot(s[2], s[3]) == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.integers(1, 30).map(lambda p: 3 * p),
              elements=st.floats(-1e3, 1e3)))
def test_backends_agree_on_simpson(values):
    from gaugelab._kernels import _ckernels
    widths = np.linspace(0.1, 1.0, values.size // 3)
    a = _pykernels.simpson_panels(values, widths)
    b = _ckernels.simpson_panels(values, widths)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(0.5, 5))
def test_backends_agree_on_rk4(ex, ez, by, vz):
    from gaugelab._kernels import _ckernels
    state = np.array([0.0, 0.0, 0.1, vz])
    a = _pykernels.rk4_lorentz_plane(state, 1.0, ex, ez, by, 1.0, 1e-3, 50)
    b = _ckernels.rk4_lorentz_plane(state, 1.0, ex, ez, by, 1.0, 1e-3, 50)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_pure_python_switch():
    env = dict(os.environ, GAUGELAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import gaugelab; print(gaugelab.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
