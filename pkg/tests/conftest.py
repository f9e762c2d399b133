import numpy as np
import pytest

from catsampler import _fallback

try:
    from catsampler import _kernels
except ImportError:  # pragma: no cover
    _kernels = None

BACKENDS = {"python": _fallback}
if _kernels is not None:
    BACKENDS["cython"] = _kernels


@pytest.fixture(params=sorted(BACKENDS))
def kernels(request):
    """Each available kernel implementation in turn."""
    return BACKENDS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
