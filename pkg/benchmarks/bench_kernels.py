"""Time the compiled kernels against the NumPy fallback.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Both backends
are imported directly, so the comparison does not depend on
``GAUGELAB_PURE_PYTHON``. Each kernel's outputs are also compared to make
sure the two backends agree.
"""

import argparse
import timeit

import numpy as np

from gaugelab._kernels import _pykernels

try:
    from gaugelab._kernels import _ckernels
except ImportError:
    _ckernels = None


def cases():
    rng = np.random.default_rng(0)
    panels = 4000
    line = rng.standard_normal(3 * panels)
    widths = np.full(panels, 1.0 / panels)
    block = rng.standard_normal((400, 3 * 400))
    bwidths = np.full(400, 1.0 / 400)
    state = np.array([0.0, 0.0, 0.0, 100.0])
    return {
        "simpson_panels (4000 panels)": lambda k: k.simpson_panels(line, widths),
        "cumulative_panels (400 x 400)": lambda k: k.cumulative_panels(block, bwidths),
        "rk4_lorentz_plane (20000 steps)":
            lambda k: k.rk4_lorentz_plane(state, 1.0, 0.0, 0.0, 2.0, 1.0, 5e-7, 20000),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; run `python setup.py build_ext --inplace` first")
        return 1
    print(f"{'kernel':<34}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}{'max diff':>12}")
    for name, call in cases().items():
        t_py = min(timeit.repeat(lambda: call(_pykernels), number=1, repeat=args.repeat))
        t_c = min(timeit.repeat(lambda: call(_ckernels), number=1, repeat=args.repeat))
        diff = np.max(np.abs(np.asarray(call(_pykernels)) - np.asarray(call(_ckernels))))
        print(f"{name:<34}{t_py * 1e3:>14.3f}{t_c * 1e3:>14.3f}{t_py / t_c:>10.1f}{diff:>12.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
