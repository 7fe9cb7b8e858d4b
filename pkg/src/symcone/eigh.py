"""Cyclic-Jacobi eigendecomposition for small dense symmetric matrices.

The cone predicates and samplers need spectra that are reproducible bit for
bit across platforms and thread counts, so this module sticks to plain numpy
arithmetic with a fixed sweep order; LAPACK is never called.  Matrices here
are tiny (rank at most 8, operator size at most a few dozen), where Jacobi is
both accurate and fast enough.
"""

from __future__ import annotations

import numpy as np

from .errors import JacobiConvergenceError

MAX_SWEEPS = 40
OFF_DIAG_TOL = 1e-15


def _max_offdiag(b: np.ndarray) -> np.ndarray:
    n = b.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.abs(b[:, mask]).max(axis=1)


def _rotate(b: np.ndarray, v: np.ndarray | None, p: int, q: int) -> None:
    apq = b[:, p, q]
    active = apq != 0.0
    if not active.any():
        return
    app = b[:, p, p]
    aqq = b[:, q, q]
    with np.errstate(over="ignore"):
        theta = np.where(active, (aqq - app) / np.where(active, 2.0 * apq, 1.0), 0.0)
    # |theta| beyond ~1e150 would overflow theta^2 and means the pivot is
    # already negligible; the clamp keeps t ~ 0 (no-op rotation) there
    theta = np.clip(theta, -1e150, 1e150)
    hyp = np.sqrt(theta * theta + 1.0)
    # smaller-magnitude root of t^2 + 2*theta*t - 1 = 0, written with a single
    # division whose denominator is always >= 1
    t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + hyp)
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    cc = c[:, None]
    ss = s[:, None]

    bp = b[:, p, :].copy()
    bq = b[:, q, :].copy()
    b[:, p, :] = cc * bp - ss * bq
    b[:, q, :] = ss * bp + cc * bq
    bp = b[:, :, p].copy()
    bq = b[:, :, q].copy()
    b[:, :, p] = cc * bp - ss * bq
    b[:, :, q] = ss * bp + cc * bq
    zeroed = np.where(active, 0.0, b[:, p, q])
    b[:, p, q] = zeroed
    b[:, q, p] = zeroed

    if v is not None:
        vp = v[:, :, p].copy()
        vq = v[:, :, q].copy()
        v[:, :, p] = cc * vp - ss * vq
        v[:, :, q] = ss * vp + cc * vq


def jacobi_eigh_batch(
    mats,
    compute_vectors: bool = True,
    max_sweeps: int = MAX_SWEEPS,
):
    """Diagonalize a stack of real symmetric matrices by cyclic Jacobi sweeps.

    Parameters
    ----------
    mats : (N, n, n) array_like, each matrix symmetric.
    compute_vectors : accumulate eigenvector matrices as well.

    Returns ``(w, v)`` where ``w`` is (N, n) with eigenvalues in ascending
    order and ``v`` is (N, n, n) with matching orthonormal columns (``None``
    when ``compute_vectors`` is false).  Raises JacobiConvergenceError with a
    diagnostic if any matrix fails to reach the off-diagonal tolerance.
    """
    b = np.array(mats, dtype=float)
    if b.ndim != 3 or b.shape[-1] != b.shape[-2]:
        raise ValueError(f"expected a (N, n, n) stack, got shape {b.shape}")
    if not np.isfinite(b).all():
        raise ValueError("non-finite entries in eigensolver input")
    n_mats, n, _ = b.shape
    v = np.tile(np.eye(n), (n_mats, 1, 1)) if compute_vectors else None
    if n == 1 or n_mats == 0:
        w = b[:, 0, 0].copy() if n_mats else np.zeros((0, n))
        return (w.reshape(n_mats, n) if n == 1 else w), v

    scale = np.abs(b).max(axis=(1, 2))
    threshold = np.maximum(scale, np.finfo(float).tiny) * OFF_DIAG_TOL
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]

    for _ in range(max_sweeps):
        if np.all(_max_offdiag(b) <= threshold):
            break
        for p, q in pairs:
            _rotate(b, v, p, q)
    worst = _max_offdiag(b)
    if not np.all(worst <= threshold):
        rel = float((worst / np.maximum(scale, np.finfo(float).tiny)).max())
        raise JacobiConvergenceError(
            f"Jacobi sweeps did not converge after {max_sweeps} sweeps: "
            f"max relative off-diagonal {rel:.3e}"
        )

    w = np.diagonal(b, axis1=1, axis2=2).copy()
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    if compute_vectors:
        v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, v


def jacobi_eigh(mat, compute_vectors: bool = True, max_sweeps: int = MAX_SWEEPS):
    """Single-matrix wrapper around :func:`jacobi_eigh_batch`."""
    m = np.asarray(mat, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    w, v = jacobi_eigh_batch(m[None], compute_vectors=compute_vectors, max_sweeps=max_sweeps)
    return w[0], (v[0] if v is not None else None)


def jacobi_eigvals_batch(mats, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    w, _ = jacobi_eigh_batch(mats, compute_vectors=False, max_sweeps=max_sweeps)
    return w


def jacobi_eigvals(mat, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    w, _ = jacobi_eigh(mat, compute_vectors=False, max_sweeps=max_sweeps)
    return w
