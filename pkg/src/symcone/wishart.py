"""Wishart distributions on symmetric cones.

For shape p and scale a in the open cone, the distribution has density

    det(a)^p / Gamma_V(p) * det(y)^(p - dim/r) * exp(-<a, y>)

on the open cone (p above dim/r - 1; below that threshold the distribution
is singular and out of scope here), and Laplace transform

    E[exp(-<t, Y>)] = det(e + P(a^(-1/2)) t)^(-p),

the symmetrized, basis-independent form of det(1 + t a^(-1))^(-p).

``Gamma_V`` is the multivariate gamma of the cone,

    Gamma_V(p) = (2 pi)^((dim - r)/2) * prod_j Gamma(p - (j-1) d / 2),

which is exact for the matrix kinds in this package's orthonormal basis.
The Lorentz family uses the Euclidean dot product instead of the trace form,
which rescales the integral; the closed-form correction factor
2^(2p - 1 - (n-1)/2) is applied there (and pinned down by the normalization
tests).  For the same reason the Lorentz mean is 2 p a^(-1) rather than
p a^(-1): the gradient of log det at the unit is (rank / <e, e>) e.

Sampling is exact (no rejection): a Bartlett factorization for the matrix
kinds and a gamma/beta/sphere factorization for the Lorentz family, driven
by counter-based streams so batches are reproducible and parallel-safe.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import rng
from .algebra import (
    EPS_CONE,
    Algebra,
    AlgebraKind,
    Element,
    coords_to_mats,
    eigvals_batch,
    eigenvalues,
    inner,
    inv_sqrt_in_cone,
    mats_to_coords,
    p_map,
    quadratic_action,
    unit,
)
from .errors import NotInCone, OutOfRegion, PoleError
from .geometry import ConeElement

LN_2PI = math.log(2.0 * math.pi)


def shape_threshold(algebra: Algebra) -> float:
    """The density-existence threshold dim/r - 1 (= (r-1) d / 2)."""
    return algebra.dim / algebra.rank - 1.0


def log_multivariate_gamma(algebra: Algebra, p: float) -> float:
    """log Gamma_V(p); raises PoleError when any gamma argument is <= 0."""
    r = algebra.rank
    d = algebra.peirce_degree
    args = [p - 0.5 * j * d for j in range(r)]
    if min(args) <= 0.0:
        raise PoleError(
            f"multivariate gamma pole: p={p} gives argument {min(args)} <= 0 "
            f"(requires p > {(r - 1) * d / 2})"
        )
    value = 0.5 * (algebra.dim - r) * LN_2PI + sum(math.lgamma(a) for a in args)
    if algebra.kind is AlgebraKind.LORENTZ:
        # dot-product convention on R^{n+1}; see the module docstring
        value += (2.0 * p - 1.0 - 0.5 * (algebra.param - 1)) * math.log(2.0)
    return value


def multivariate_gamma(algebra: Algebra, p: float) -> float:
    return math.exp(log_multivariate_gamma(algebra, p))


def mean_scale_factor(algebra: Algebra) -> float:
    """E[Y] = factor * p * a^(-1); 1 for trace-form kinds, 2 for Lorentz."""
    e = unit(algebra)
    return algebra.rank / inner(e, e)


@dataclass(frozen=True, eq=False)
class WishartParams:
    algebra: Algebra
    p: float
    a: ConeElement

    def __post_init__(self):
        if self.a.algebra != self.algebra:
            raise ValueError("scale element belongs to a different algebra")
        thr = shape_threshold(self.algebra)
        if not self.p > thr:
            raise ValueError(
                f"shape p={self.p} out of range for {self.algebra.spec_string()}: "
                f"requires p > {thr} (= dim/r - 1)"
            )
        # scale-dependent density constants, computed once (hot loops)
        log_det_a = float(np.sum(np.log(eigenvalues(self.a.element))))
        object.__setattr__(self, "_log_det_a", log_det_a)
        object.__setattr__(
            self,
            "_log_norm",
            self.p * log_det_a - log_multivariate_gamma(self.algebra, self.p),
        )

    @classmethod
    def isotropic(cls, algebra: Algebra, p: float, scale: float = 1.0) -> "WishartParams":
        return cls(algebra, p, ConeElement.certify(scale * unit(algebra)))


def _log_det_from_eigs(eigs: np.ndarray) -> float:
    return float(np.sum(np.log(eigs)))


def log_density(params: WishartParams, y: Element) -> float:
    """Log density at y; -inf off the open cone (the support indicator)."""
    if y.algebra != params.algebra:
        raise ValueError("evaluation point belongs to a different algebra")
    alg = params.algebra
    w = eigenvalues(y)
    radius = float(np.abs(w).max())
    if radius == 0.0 or float(w.min()) <= EPS_CONE * radius:
        return float("-inf")
    q = alg.dim / alg.rank
    return (
        params._log_norm
        + (params.p - q) * _log_det_from_eigs(w)
        - inner(params.a.element, y)
    )


def laplace_transform(params: WishartParams, t: Element) -> float:
    """det(e + P(a^(-1/2)) t)^(-p); OutOfRegion when the argument leaves V."""
    if t.algebra != params.algebra:
        raise ValueError("transform argument belongs to a different algebra")
    alg = params.algebra
    w_half = inv_sqrt_in_cone(params.a.element)
    arg = unit(alg) + quadratic_action(w_half, t)
    eigs = eigenvalues(arg)
    radius = float(np.abs(eigs).max())
    if radius == 0.0 or float(eigs.min()) <= 0.0:
        raise OutOfRegion(
            f"e + P(a^(-1/2)) t left the open cone (min eigenvalue {eigs.min():.3e})"
        )
    return math.exp(-params.p * _log_det_from_eigs(eigs))


def mean(params: WishartParams) -> Element:
    from .algebra import inverse  # local import keeps module top uncluttered

    return mean_scale_factor(params.algebra) * params.p * inverse(params.a.element)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _bartlett_chunk(algebra: Algebra, p: float, m: int, gen: np.random.Generator) -> np.ndarray:
    """Draw m standard (scale = e) Wishart matrices for a matrix kind.

    Lower-triangular T with T_jj^2 ~ Gamma(p - j d / 2) and off-diagonal
    entries N(0, 1/2) per real component; Y = T T*.  Draw order is fixed so
    regeneration is bit-identical.
    """
    r = algebra.param
    d = algebra.peirce_degree
    complex_kind = algebra.kind is AlgebraKind.HERM_COMPLEX
    t = np.zeros((m, r, r), dtype=complex if complex_kind else float)
    for j in range(r):
        t[:, j, j] = np.sqrt(gen.gamma(shape=p - 0.5 * j * d, size=m))
    il, jl = np.tril_indices(r, -1)
    if il.size:
        if complex_kind:
            re = gen.normal(0.0, math.sqrt(0.5), size=(m, il.size))
            im = gen.normal(0.0, math.sqrt(0.5), size=(m, il.size))
            t[:, il, jl] = re + 1j * im
        else:
            t[:, il, jl] = gen.normal(0.0, math.sqrt(0.5), size=(m, il.size))
    y = t @ t.conj().transpose(0, 2, 1)
    return (y + y.conj().transpose(0, 2, 1)) / 2.0


def _lorentz_chunk(algebra: Algebra, p: float, m: int, gen: np.random.Generator) -> np.ndarray:
    """Standard Lorentz-cone draws via the polar factorization.

    With x = (s, s sqrt(u) * xi): s ~ Gamma(2p), u ~ Beta(n/2, p - (n-1)/2)
    and xi uniform on the sphere, independently.
    """
    n = algebra.param
    s = gen.gamma(shape=2.0 * p, size=m)
    u = gen.beta(0.5 * n, p - 0.5 * (n - 1), size=m)
    g = gen.standard_normal(size=(m, n))
    norm = np.sqrt(np.sum(g * g, axis=1))
    norm = np.where(norm > 0.0, norm, 1.0)
    xi = g / norm[:, None]
    coords = np.empty((m, n + 1))
    coords[:, 0] = s
    coords[:, 1:] = (s * np.sqrt(u))[:, None] * xi
    return coords


def _standard_chunk_coords(algebra: Algebra, p: float, m: int, gen) -> np.ndarray:
    if algebra.kind is AlgebraKind.LORENTZ:
        return _lorentz_chunk(algebra, p, m, gen)
    return mats_to_coords(algebra, _bartlett_chunk(algebra, p, m, gen))


def _transport(params: WishartParams, coords: np.ndarray) -> np.ndarray:
    """Map standard draws to scale a by the quadratic representation of a^(-1/2)."""
    alg = params.algebra
    w_half = inv_sqrt_in_cone(params.a.element)
    if alg.kind is AlgebraKind.LORENTZ:
        m = p_map(w_half).entries
        return coords @ m.T
    w = coords_to_mats(alg, w_half.coords)
    y = w @ coords_to_mats(alg, coords) @ w
    return mats_to_coords(alg, (y + y.conj().transpose(0, 2, 1)) / 2.0)


@dataclass(eq=False)
class SampleBatch:
    """A deterministic, seed-tagged batch of cone elements.

    ``coords`` is the (count, dim) coordinate matrix, ``min_eigenvalues`` the
    per-sample cone certificates.  The ``samples`` list of certified cone
    elements is materialized lazily; vectorized consumers should stay on the
    arrays.
    """

    params: WishartParams
    seed: int
    stream: int
    coords: np.ndarray
    min_eigenvalues: np.ndarray

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        self.coords.setflags(write=False)
        self.min_eigenvalues = np.asarray(self.min_eigenvalues, dtype=float)
        self.min_eigenvalues.setflags(write=False)

    def __len__(self) -> int:
        return self.coords.shape[0]

    @cached_property
    def samples(self) -> list[ConeElement]:
        alg = self.params.algebra
        return [
            ConeElement(Element(alg, row), float(lo))
            for row, lo in zip(self.coords, self.min_eigenvalues)
        ]

    # -- serialization ----------------------------------------------------
    def to_json_dict(self) -> dict:
        return {
            "format": "symcone-samples",
            "algebra": {
                "kind": self.params.algebra.kind.value,
                "r_or_n": self.params.algebra.param,
            },
            "p": self.params.p,
            "scale": [float(c) for c in self.params.a.coords],
            "seed": self.seed,
            "stream": self.stream,
            "count": len(self),
            "samples": [[float(c) for c in row] for row in self.coords],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SampleBatch":
        alg = Algebra(AlgebraKind(data["algebra"]["kind"]), int(data["algebra"]["r_or_n"]))
        a = ConeElement.certify(Element(alg, np.asarray(data["scale"], dtype=float)))
        params = WishartParams(alg, float(data["p"]), a)
        coords = np.asarray(data["samples"], dtype=float).reshape(int(data["count"]), alg.dim)
        return cls(
            params=params,
            seed=int(data["seed"]),
            stream=int(data["stream"]),
            coords=coords,
            min_eigenvalues=eigvals_batch(alg, coords)[:, 0],
        )

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            self.write_csv(fh)

    def write_csv(self, fh) -> None:
        meta = {
            "algebra": self.params.algebra.spec_string(),
            "p": repr(self.params.p),
            "scale": json.dumps([float(c) for c in self.params.a.coords]),
            "seed": str(self.seed),
            "stream": str(self.stream),
            "count": str(len(self)),
        }
        for key, value in meta.items():
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"c{k}" for k in range(self.params.algebra.dim)])
        for row in self.coords:
            writer.writerow([repr(float(c)) for c in row])

    @classmethod
    def from_csv(cls, path) -> "SampleBatch":
        with open(path, "r", newline="") as fh:
            return cls.read_csv(fh)

    @classmethod
    def read_csv(cls, fh) -> "SampleBatch":
        meta = {}
        body = []
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value
            else:
                body.append(line)
        reader = csv.reader(io.StringIO("".join(body)))
        header = next(reader)
        rows = [[float(c) for c in row] for row in reader if row]
        alg = Algebra.from_spec(meta["algebra"])
        if len(header) != alg.dim:
            raise ValueError("CSV header does not match the algebra dimension")
        a = ConeElement.certify(Element(alg, np.asarray(json.loads(meta["scale"]))))
        params = WishartParams(alg, float(meta["p"]), a)
        coords = np.asarray(rows, dtype=float).reshape(int(meta["count"]), alg.dim)
        return cls(
            params=params,
            seed=int(meta["seed"]),
            stream=int(meta["stream"]),
            coords=coords,
            min_eigenvalues=eigvals_batch(alg, coords)[:, 0],
        )


def sample(
    params: WishartParams,
    count: int,
    seed: int,
    stream: int = 0,
    workers: int = 1,
    _purpose: int = rng.PURPOSE_SAMPLE,
) -> SampleBatch:
    """Draw ``count`` i.i.d. cone elements from the distribution.

    Output is a pure function of (seed, stream, count): draws are organized
    in fixed-size chunks keyed by (seed, purpose, stream, chunk index), so
    the worker count changes wall time only, never the values.
    """
    alg = params.algebra
    layout = rng.chunk_layout(count)
    coords = np.empty((count, alg.dim))

    def fill(entry):
        k, start, size = entry
        gen = rng.make_generator(seed, _purpose, stream, k)
        coords[start : start + size] = _standard_chunk_coords(alg, params.p, size, gen)

    if workers > 1 and len(layout) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, layout))
    else:
        for entry in layout:
            fill(entry)

    coords = _transport(params, coords)
    min_eigs = eigvals_batch(alg, coords)[:, 0]
    if not (min_eigs > 0.0).all():
        worst = float(min_eigs.min())
        raise NotInCone(
            f"sampler produced a draw outside the open cone (min eigenvalue "
            f"{worst:.3e}); shape p={params.p} may be too close to the threshold"
        )
    return SampleBatch(
        params=params, seed=seed, stream=stream, coords=coords, min_eigenvalues=min_eigs
    )
