import numpy as np
import pytest

from symcone.algebra import Algebra

ALL_ALGEBRAS = [
    Algebra.sym_real(1),
    Algebra.sym_real(2),
    Algebra.sym_real(3),
    Algebra.herm_complex(2),
    Algebra.herm_complex(3),
    Algebra.lorentz(2),
    Algebra.lorentz(4),
]


@pytest.fixture
def rng():
    return np.random.default_rng(20250809)


@pytest.fixture(params=ALL_ALGEBRAS, ids=lambda a: a.spec_string())
def algebra(request):
    return request.param
