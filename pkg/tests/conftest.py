import numpy as np
import pytest

from chebosc.polynomial_basis import Kind
from chebosc.quadrature import CoefficientSource

KINDS = list(Kind)
SOURCES = list(CoefficientSource)


@pytest.fixture(params=KINDS, ids=lambda k: k.value)
def kind(request):
    return request.param


@pytest.fixture(params=SOURCES, ids=lambda s: s.value)
def source(request):
    return request.param


@pytest.fixture
def x_grid():
    return np.linspace(-1.0, 1.0, 101)
