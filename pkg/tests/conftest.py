import importlib

import pytest

from gaugelab._kernels import _pykernels


def _backends():
    out = [pytest.param(_pykernels, id="python")]
    try:
        ck = importlib.import_module("gaugelab._kernels._ckernels")
    except ImportError:
        out.append(pytest.param(None, id="cython", marks=pytest.mark.skip("extension not built")))
    else:
        out.append(pytest.param(ck, id="cython"))
    return out


@pytest.fixture(params=_backends())
def kernels(request):
    return request.param
