"""Euclidean simple Jordan algebras with an orthonormal coordinate basis.

Three families are implemented: real symmetric matrices, complex Hermitian
matrices, and the Lorentz (spin) family on R^{n+1}.  An element is stored as
a real coordinate vector in a basis that is orthonormal for the algebra's
inner product, so ``inner(x, y)`` equals the dot product of coordinates and
endomorphisms are plain real matrices.

Coordinate layout
-----------------
``SYM_REAL(r)``     ``[x_11 .. x_rr,  sqrt(2)*x_ij for i<j row-major]``
``HERM_COMPLEX(r)`` ``[x_11 .. x_rr,  sqrt(2)*Re x_ij (i<j),  sqrt(2)*Im x_ij (i<j)]``
``LORENTZ(n)``      ``[x_0, x_1, .., x_n]`` (canonical basis of R^{n+1})

Matrix kinds use the trace inner product Tr(x y); the Lorentz family uses
the Euclidean dot product on R^{n+1}.  With the dot-product convention the
Lorentz unit has squared norm 1 rather than rank 2; determinant and trace
keep their rank-2 spectral definitions (det = x_0^2 - |xbar|^2, tr = 2 x_0).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from . import eigh
from .errors import (
    AlgebraMismatch,
    DimensionMismatch,
    NotInCone,
    SingularElement,
)

# Relative tolerances for singularity / cone-boundary decisions, both taken
# relative to the spectral radius of the element being tested.
EPS_SINGULAR = 1e-12
EPS_CONE = 1e-12

_SQRT2 = math.sqrt(2.0)


class AlgebraKind(str, Enum):
    SYM_REAL = "symr"
    HERM_COMPLEX = "hermc"
    LORENTZ = "lorentz"


@dataclass(frozen=True)
class Algebra:
    """Descriptor of a Euclidean simple Jordan algebra.

    ``param`` is the matrix size r for the matrix kinds and n for the
    Lorentz algebra on R^{n+1}.
    """

    kind: AlgebraKind
    param: int

    def __post_init__(self):
        if not isinstance(self.param, int):
            object.__setattr__(self, "param", int(self.param))
        if self.kind is AlgebraKind.LORENTZ:
            if self.param < 2:
                raise ValueError("Lorentz algebra requires n >= 2")
        elif self.param < 1:
            raise ValueError("matrix algebra requires r >= 1")

    @property
    def rank(self) -> int:
        return 2 if self.kind is AlgebraKind.LORENTZ else self.param

    @property
    def dim(self) -> int:
        if self.kind is AlgebraKind.SYM_REAL:
            return self.param * (self.param + 1) // 2
        if self.kind is AlgebraKind.HERM_COMPLEX:
            return self.param * self.param
        return self.param + 1

    @property
    def peirce_degree(self) -> int:
        if self.kind is AlgebraKind.SYM_REAL:
            return 1
        if self.kind is AlgebraKind.HERM_COMPLEX:
            return 2
        return self.param - 1

    @classmethod
    def sym_real(cls, r: int) -> "Algebra":
        return cls(AlgebraKind.SYM_REAL, r)

    @classmethod
    def herm_complex(cls, r: int) -> "Algebra":
        return cls(AlgebraKind.HERM_COMPLEX, r)

    @classmethod
    def lorentz(cls, n: int) -> "Algebra":
        return cls(AlgebraKind.LORENTZ, n)

    def spec_string(self) -> str:
        return f"{self.kind.value}:{self.param}"

    @classmethod
    def from_spec(cls, spec: str) -> "Algebra":
        """Parse strings like ``symr:3``, ``hermc:2`` or ``lorentz:4``."""
        try:
            name, _, number = spec.partition(":")
            return cls(AlgebraKind(name.strip()), int(number))
        except (ValueError, KeyError) as exc:
            raise ValueError(
                f"malformed algebra spec {spec!r}; expected kind:size with kind "
                f"in {{symr, hermc, lorentz}}"
            ) from exc


@dataclass(frozen=True, eq=False)
class Element:
    """A point of the algebra, stored as coordinates in the fixed basis."""

    algebra: Algebra
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if c.shape != (self.algebra.dim,):
            raise DimensionMismatch(
                f"coords shape {c.shape} does not match dim {self.algebra.dim} "
                f"of {self.algebra.spec_string()}"
            )
        if not np.isfinite(c).all():
            raise ValueError("element coordinates must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    # -- arithmetic in the ambient vector space -------------------------
    def __add__(self, other: "Element") -> "Element":
        _check_same_algebra(self, other)
        return Element(self.algebra, self.coords + other.coords)

    def __sub__(self, other: "Element") -> "Element":
        _check_same_algebra(self, other)
        return Element(self.algebra, self.coords - other.coords)

    def __neg__(self) -> "Element":
        return Element(self.algebra, -self.coords)

    def __mul__(self, scalar) -> "Element":
        return Element(self.algebra, self.coords * float(scalar))

    __rmul__ = __mul__

    # -- structured views ------------------------------------------------
    def to_matrix(self) -> np.ndarray:
        """Hermitian-matrix view; not defined for the Lorentz family."""
        if self.algebra.kind is AlgebraKind.LORENTZ:
            raise ValueError("Lorentz elements have no matrix view; use lorentz_parts()")
        return coords_to_mats(self.algebra, self.coords)

    def lorentz_parts(self) -> tuple[float, np.ndarray]:
        if self.algebra.kind is not AlgebraKind.LORENTZ:
            raise ValueError("lorentz_parts() is only defined for the Lorentz family")
        return float(self.coords[0]), self.coords[1:].copy()

    # -- serialization ----------------------------------------------------
    def to_json_dict(self) -> dict:
        return {
            "algebra": {"kind": self.algebra.kind.value, "r_or_n": self.algebra.param},
            "coords": [float(c) for c in self.coords],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @staticmethod
    def from_json_dict(data: dict) -> "Element":
        alg = Algebra(AlgebraKind(data["algebra"]["kind"]), int(data["algebra"]["r_or_n"]))
        return Element(alg, np.asarray(data["coords"], dtype=float))

    @staticmethod
    def from_json(text: str) -> "Element":
        return Element.from_json_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class LinearMap:
    """An endomorphism of the algebra in the fixed coordinate basis."""

    algebra: Algebra
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        d = self.algebra.dim
        if m.shape != (d, d):
            raise DimensionMismatch(f"entries shape {m.shape}, expected ({d}, {d})")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)


def _check_same_algebra(x: Element, y: Element) -> None:
    if x.algebra != y.algebra:
        raise AlgebraMismatch(
            f"mixed algebras: {x.algebra.spec_string()} vs {y.algebra.spec_string()}"
        )


# ---------------------------------------------------------------------------
# coordinate packing (batch-aware: leading axes are preserved)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _upper_indices(r: int):
    return np.triu_indices(r, 1)


def coords_to_mats(algebra: Algebra, coords: np.ndarray) -> np.ndarray:
    """Coordinates -> Hermitian matrices for the matrix kinds.

    Accepts any leading batch shape: ``(..., dim) -> (..., r, r)``.
    """
    c = np.asarray(coords, dtype=float)
    r = algebra.param
    iu, ju = _upper_indices(r)
    n_off = iu.size
    if algebra.kind is AlgebraKind.SYM_REAL:
        m = np.zeros(c.shape[:-1] + (r, r))
        m[..., np.arange(r), np.arange(r)] = c[..., :r]
        off = c[..., r:] / _SQRT2
        m[..., iu, ju] = off
        m[..., ju, iu] = off
        return m
    if algebra.kind is AlgebraKind.HERM_COMPLEX:
        m = np.zeros(c.shape[:-1] + (r, r), dtype=complex)
        m[..., np.arange(r), np.arange(r)] = c[..., :r]
        upper = (c[..., r:r + n_off] + 1j * c[..., r + n_off:]) / _SQRT2
        m[..., iu, ju] = upper
        m[..., ju, iu] = upper.conj()
        return m
    raise ValueError("no matrix view for the Lorentz family")


def mats_to_coords(algebra: Algebra, mats: np.ndarray) -> np.ndarray:
    """Hermitian matrices -> coordinates, inverse of :func:`coords_to_mats`."""
    m = np.asarray(mats)
    r = algebra.param
    iu, ju = _upper_indices(r)
    if algebra.kind is AlgebraKind.SYM_REAL:
        diag = m[..., np.arange(r), np.arange(r)]
        off = m[..., iu, ju] * _SQRT2
        return np.concatenate([diag, off], axis=-1)
    if algebra.kind is AlgebraKind.HERM_COMPLEX:
        diag = m[..., np.arange(r), np.arange(r)].real
        upper = m[..., iu, ju] * _SQRT2
        return np.concatenate([diag, upper.real, upper.imag], axis=-1)
    raise ValueError("no matrix view for the Lorentz family")


def element_from_matrix(algebra: Algebra, mat: np.ndarray, tol: float = 1e-10) -> Element:
    """Build an element from a (numerically) Hermitian matrix."""
    m = np.asarray(mat, dtype=complex if algebra.kind is AlgebraKind.HERM_COMPLEX else float)
    scale = max(float(np.abs(m).max()), 1.0)
    if np.abs(m - m.conj().T).max() > tol * scale:
        raise ValueError("input matrix is not Hermitian within tolerance")
    m = (m + m.conj().T) / 2.0
    return Element(algebra, mats_to_coords(algebra, m))


def _embed_hermitian(mats: np.ndarray) -> np.ndarray:
    """Represent Hermitian H = A + iB as the real symmetric [[A, -B], [B, A]].

    The map is an algebra homomorphism, so spectra are doubled and spectral
    functions commute with it.
    """
    a = mats.real
    b = mats.imag
    top = np.concatenate([a, -b], axis=-1)
    bottom = np.concatenate([b, a], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


# ---------------------------------------------------------------------------
# batch spectral kernels (shared by the samplers and the split transform)
# ---------------------------------------------------------------------------

def traces_batch(algebra: Algebra, coords: np.ndarray) -> np.ndarray:
    """Traces of a (N, dim) coordinate batch."""
    c = np.asarray(coords, dtype=float)
    if algebra.kind is AlgebraKind.LORENTZ:
        return 2.0 * c[:, 0]
    return c[:, : algebra.param].sum(axis=1)


def eigvals_batch(algebra: Algebra, coords: np.ndarray) -> np.ndarray:
    """Jordan eigenvalues for a (N, dim) batch, ascending along the last axis."""
    c = np.asarray(coords, dtype=float)
    if algebra.kind is AlgebraKind.LORENTZ:
        x0 = c[:, 0]
        nrm = np.sqrt(np.sum(c[:, 1:] ** 2, axis=1))
        return np.stack([x0 - nrm, x0 + nrm], axis=1)
    mats = coords_to_mats(algebra, c)
    if algebra.kind is AlgebraKind.SYM_REAL:
        return eigh.jacobi_eigvals_batch(mats)
    w2 = eigh.jacobi_eigvals_batch(_embed_hermitian(mats))
    # the embedding doubles every eigenvalue; adjacent sorted pairs collapse
    return (w2[:, 0::2] + w2[:, 1::2]) / 2.0


def spectral_map_batch(algebra: Algebra, coords: np.ndarray, fn) -> np.ndarray:
    """Apply the spectral function ``fn`` elementwise on a (N, dim) batch.

    The caller is responsible for domain checks on the eigenvalues.
    """
    c = np.asarray(coords, dtype=float)
    if algebra.kind is AlgebraKind.LORENTZ:
        x0 = c[:, 0]
        xbar = c[:, 1:]
        nrm = np.sqrt(np.sum(xbar**2, axis=1))
        f_hi = fn(x0 + nrm)
        f_lo = fn(x0 - nrm)
        out = np.empty_like(c)
        out[:, 0] = (f_hi + f_lo) / 2.0
        safe = np.where(nrm > 0.0, nrm, 1.0)
        out[:, 1:] = (((f_hi - f_lo) / 2.0) / safe)[:, None] * xbar
        return out
    mats = coords_to_mats(algebra, c)
    if algebra.kind is AlgebraKind.SYM_REAL:
        w, v = eigh.jacobi_eigh_batch(mats)
        out = np.einsum("nij,nj,nkj->nik", v, fn(w), v)
        out = (out + out.transpose(0, 2, 1)) / 2.0
        return mats_to_coords(algebra, out)
    r = algebra.param
    w, v = eigh.jacobi_eigh_batch(_embed_hermitian(mats))
    big = np.einsum("nij,nj,nkj->nik", v, fn(w), v)
    re = (big[:, :r, :r] + big[:, r:, r:]) / 2.0
    im = (big[:, r:, :r] - big[:, :r, r:]) / 2.0
    herm = re + 1j * im
    herm = (herm + herm.conj().transpose(0, 2, 1)) / 2.0
    return mats_to_coords(algebra, herm)


# ---------------------------------------------------------------------------
# core operations
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _unit_coords(algebra: Algebra) -> np.ndarray:
    if algebra.kind is AlgebraKind.LORENTZ:
        c = np.zeros(algebra.dim)
        c[0] = 1.0
    else:
        c = np.zeros(algebra.dim)
        c[: algebra.param] = 1.0
    c.setflags(write=False)
    return c


def unit(algebra: Algebra) -> Element:
    """The Jordan unit e, with e o x = x for every x."""
    return Element(algebra, _unit_coords(algebra))


@lru_cache(maxsize=None)
def basis_elements(algebra: Algebra) -> tuple[Element, ...]:
    """The fixed orthonormal basis as elements."""
    eye = np.eye(algebra.dim)
    return tuple(Element(algebra, eye[k]) for k in range(algebra.dim))


def jordan_product(x: Element, y: Element) -> Element:
    """The Jordan product x o y (symmetrized matrix product; spin product)."""
    _check_same_algebra(x, y)
    alg = x.algebra
    if alg.kind is AlgebraKind.LORENTZ:
        xc, yc = x.coords, y.coords
        out = np.empty(alg.dim)
        out[0] = float(np.dot(xc, yc))
        out[1:] = xc[0] * yc[1:] + yc[0] * xc[1:]
        return Element(alg, out)
    xm = x.to_matrix()
    ym = y.to_matrix()
    return Element(alg, mats_to_coords(alg, (xm @ ym + ym @ xm) / 2.0))


def l_map(x: Element) -> LinearMap:
    """Matrix of y -> x o y in the fixed basis (symmetric by associativity)."""
    alg = x.algebra
    cols = [jordan_product(x, b).coords for b in basis_elements(alg)]
    return LinearMap(alg, np.stack(cols, axis=1))


def p_map(x: Element) -> LinearMap:
    """Quadratic representation 2 L(x)^2 - L(x^2)."""
    lx = l_map(x).entries
    lx2 = l_map(jordan_product(x, x)).entries
    return LinearMap(x.algebra, 2.0 * (lx @ lx) - lx2)


def apply(m: LinearMap, x: Element) -> Element:
    """Apply an endomorphism to an element."""
    if m.algebra != x.algebra:
        raise AlgebraMismatch(
            f"map on {m.algebra.spec_string()} applied to {x.algebra.spec_string()}"
        )
    return Element(x.algebra, m.entries @ x.coords)


def quadratic_action(y: Element, x: Element) -> Element:
    """P(y) x without materializing the operator matrix.

    Matrix kinds evaluate the two-sided conjugation y x y on the structured
    view; the Lorentz family uses P(y) x = 2 <y, x> y - det(y) (x0, -xbar).
    Agrees with ``apply(p_map(y), x)`` and is much cheaper in hot loops.
    """
    _check_same_algebra(y, x)
    alg = y.algebra
    if alg.kind is AlgebraKind.LORENTZ:
        dot = float(y.coords @ x.coords)
        dety = y.coords[0] ** 2 - float(y.coords[1:] @ y.coords[1:])
        flipped = x.coords.copy()
        flipped[1:] *= -1.0
        return Element(alg, 2.0 * dot * y.coords - dety * flipped)
    ym = y.to_matrix()
    out = ym @ x.to_matrix() @ ym
    return Element(alg, mats_to_coords(alg, (out + out.conj().T) / 2.0))


def eigenvalues(x: Element) -> np.ndarray:
    """The rank-many Jordan eigenvalues, sorted descending."""
    return eigvals_batch(x.algebra, x.coords[None])[0][::-1].copy()


def trace(x: Element) -> float:
    if x.algebra.kind is AlgebraKind.LORENTZ:
        return 2.0 * float(x.coords[0])
    return float(np.sum(x.coords[: x.algebra.param]))


def det(x: Element) -> float:
    if x.algebra.kind is AlgebraKind.LORENTZ:
        x0, xbar = float(x.coords[0]), x.coords[1:]
        return x0 * x0 - float(np.dot(xbar, xbar))
    return float(np.prod(eigenvalues(x)))


def inner(x: Element, y: Element) -> float:
    """Algebra inner product: Tr(x y) for matrix kinds, dot for Lorentz.

    Computed through the structured view so the coordinate-isometry property
    is a statement about the basis, not a tautology.
    """
    _check_same_algebra(x, y)
    if x.algebra.kind is AlgebraKind.LORENTZ:
        return float(np.dot(x.coords, y.coords))
    xm = x.to_matrix()
    ym = y.to_matrix()
    return float(np.real(np.sum(xm * ym.conj())))


def _spectral_map(x: Element, fn) -> Element:
    return Element(x.algebra, spectral_map_batch(x.algebra, x.coords[None], fn)[0])


def inverse(x: Element) -> Element:
    """Jordan inverse; raises SingularElement near the non-invertible set."""
    w = eigenvalues(x)
    radius = float(np.abs(w).max())
    if radius == 0.0 or float(np.abs(w).min()) < EPS_SINGULAR * radius:
        raise SingularElement(
            f"element of {x.algebra.spec_string()} is singular "
            f"(|eigenvalues| in [{np.abs(w).min():.3e}, {radius:.3e}])"
        )
    return _spectral_map(x, lambda t: 1.0 / t)


def sqrt_in_cone(x: Element) -> Element:
    """The unique square root inside the open cone."""
    w = eigenvalues(x)
    radius = float(np.abs(w).max())
    if radius == 0.0 or float(w.min()) <= EPS_CONE * radius:
        raise NotInCone(
            f"square root requested outside the open cone "
            f"(min eigenvalue {w.min():.3e}, radius {radius:.3e})"
        )
    return _spectral_map(x, np.sqrt)


def inv_sqrt_in_cone(x: Element) -> Element:
    """x^{-1/2} in one spectral pass; same domain as :func:`sqrt_in_cone`."""
    w = eigenvalues(x)
    radius = float(np.abs(w).max())
    if radius == 0.0 or float(w.min()) <= EPS_CONE * radius:
        raise NotInCone(
            f"inverse square root requested outside the open cone "
            f"(min eigenvalue {w.min():.3e}, radius {radius:.3e})"
        )
    return _spectral_map(x, lambda t: 1.0 / np.sqrt(t))
