"""Hot numerical kernels with a compiled core and a NumPy fallback.

The compiled extension is preferred. Setting the environment variable
``GAUGELAB_PURE_PYTHON=1`` before import forces the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("GAUGELAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

simpson_panels = _impl.simpson_panels
cumulative_panels = _impl.cumulative_panels
rk4_lorentz_plane = _impl.rk4_lorentz_plane

__all__ = [
    "BACKEND",
    "simpson_panels",
    "cumulative_panels",
    "rk4_lorentz_plane",
]
