import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symcone.eigh import jacobi_eigh, jacobi_eigh_batch, jacobi_eigvals_batch
from symcone.errors import JacobiConvergenceError


def _random_symmetric(rng, n, count=1):
    a = rng.standard_normal((count, n, n))
    return (a + a.transpose(0, 2, 1)) / 2.0


@pytest.mark.parametrize("n", [2, 3, 4, 6, 8, 15])
def test_eigenvalues_match_lapack_oracle(rng, n):
    mats = _random_symmetric(rng, n, count=40)
    w = jacobi_eigvals_batch(mats)
    expected = np.linalg.eigvalsh(mats)
    np.testing.assert_allclose(w, expected, rtol=1e-11, atol=1e-11)


@pytest.mark.parametrize("n", [2, 3, 5, 9])
def test_eigenvectors_reconstruct_input(rng, n):
    mats = _random_symmetric(rng, n, count=25)
    w, v = jacobi_eigh_batch(mats)
    rebuilt = np.einsum("nij,nj,nkj->nik", v, w, v)
    np.testing.assert_allclose(rebuilt, mats, atol=1e-12 * np.abs(mats).max())
    gram = np.einsum("nji,njk->nik", v, v)
    np.testing.assert_allclose(gram, np.broadcast_to(np.eye(n), gram.shape), atol=1e-13)


def test_diagonal_matrices_are_exact():
    mats = np.array([np.diag([3.0, -1.0, 2.0]), np.diag([0.0, 0.0, 5.0])])
    w, v = jacobi_eigh_batch(mats)
    np.testing.assert_array_equal(
        w, np.sort(np.array([[3.0, -1.0, 2.0], [0.0, 0.0, 5.0]]), axis=1)
    )
    # no rotations happen, so the vectors are signed permutations of the basis
    assert set(np.abs(v).ravel()) == {0.0, 1.0}


def test_zero_and_single_entry():
    w, v = jacobi_eigh_batch(np.zeros((2, 4, 4)))
    assert (w == 0).all()
    w, v = jacobi_eigh_batch(np.full((1, 1, 1), 7.0))
    assert w[0, 0] == 7.0


def test_single_matrix_wrapper(rng):
    m = _random_symmetric(rng, 5)[0]
    w, v = jacobi_eigh(m)
    np.testing.assert_allclose((v * w) @ v.T, m, atol=1e-13)


def test_determinism(rng):
    mats = _random_symmetric(rng, 4, count=10)
    w1, v1 = jacobi_eigh_batch(mats)
    w2, v2 = jacobi_eigh_batch(mats)
    assert np.array_equal(w1, w2) and np.array_equal(v1, v2)


def test_convergence_failure_is_loud(rng):
    mats = _random_symmetric(rng, 4, count=3)
    with pytest.raises(JacobiConvergenceError, match="off-diagonal"):
        jacobi_eigh_batch(mats, max_sweeps=0)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        jacobi_eigh_batch(np.zeros((3, 2)))
    with pytest.raises(ValueError):
        jacobi_eigh_batch(np.full((1, 2, 2), np.nan))


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=2, max_value=6).flatmap(
        lambda n: st.lists(
            st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
            min_size=n * n,
            max_size=n * n,
        )
    )
)
def test_reconstruction_property(flat):
    n = int(np.sqrt(len(flat)))
    raw = np.asarray(flat, dtype=float).reshape(n, n)
    mat = (raw + raw.T) / 2.0
    w, v = jacobi_eigh(mat)
    scale = max(np.abs(mat).max(), 1.0)
    assert np.abs((v * w) @ v.T - mat).max() <= 1e-12 * scale
