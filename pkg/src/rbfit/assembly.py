"""Assembly of the augmented symmetric block system.

For N sites, a kernel and an optional polynomial tail with m monomials the
interpolation conditions plus the orthogonality side conditions form the
(N+m) x (N+m) symmetric system

    [ B   P ] [ lambda ]   [ h ]
    [ P^T 0 ] [   a    ] = [ 0 ]

with ``B[i, j] = phi(||x_i - x_j||)`` and ``P[i, :]`` the monomials at site i.
B is built once per unordered pair and mirrored, so symmetry is exact.  For
compact kernels B can be stored compressed by rows, with the zero pattern
given exactly by the radius-neighbor adjacency.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.sparse as sp

from .exceptions import ConfigurationError, DuplicatePointError
from .geometry import PointCloud, neighbor_pairs, pair_distances
from .kernels import Kernel, kernel_eval, kernel_is_compact, min_poly_degree, support_radius

__all__ = [
    "PolyBasis",
    "BlockSystem",
    "assemble_dense",
    "assemble_sparse",
    "densify",
    "side_condition_defect",
]


@dataclass(frozen=True)
class PolyBasis:
    """Monomial basis of total degree <= ``degree`` in ``dim`` variables.

    Column order is fixed for reproducibility: the constant first, then the
    linear terms per axis, then the degree-2 products in lexicographic axis
    order, e.g. ``[1, x, y, x^2, xy, y^2]`` in 2-D.
    """

    degree: int
    dim: int

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise ConfigurationError(f"polynomial degree must be 0, 1 or 2, got {self.degree}")
        if self.dim not in (1, 2, 3):
            raise ConfigurationError(f"dim must be 1, 2 or 3, got {self.dim}")

    @property
    def m(self) -> int:
        return comb(self.degree + self.dim, self.dim)

    @property
    def exponents(self) -> tuple[tuple[int, ...], ...]:
        """Per-column exponent tuples, one entry per axis."""
        cols = [(0,) * self.dim]
        for total in range(1, self.degree + 1):
            for axes in itertools.combinations_with_replacement(range(self.dim), total):
                e = [0] * self.dim
                for ax in axes:
                    e[ax] += 1
                cols.append(tuple(e))
        return tuple(cols)

    def matrix(self, points: np.ndarray) -> np.ndarray:
        """Evaluate all monomial columns at the given (N, dim) points."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.shape[1] != self.dim:
            raise ValueError(f"points are {pts.shape[1]}-D but basis is {self.dim}-D")
        cols = []
        for e in self.exponents:
            col = np.ones(pts.shape[0])
            for ax, p in enumerate(e):
                if p:
                    col = col * pts[:, ax] ** p
            cols.append(col)
        return np.column_stack(cols)


@dataclass(frozen=True)
class BlockSystem:
    """Assembled system: kernel block B (dense or CSR), tail block P, rhs [h; 0]."""

    B: np.ndarray | sp.csr_matrix
    P: np.ndarray
    rhs: np.ndarray
    kernel: Kernel
    sites: np.ndarray
    poly: PolyBasis | None

    @property
    def n(self) -> int:
        return self.B.shape[0]

    @property
    def m(self) -> int:
        return self.P.shape[1]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.B)

    def dense_B(self) -> np.ndarray:
        return self.B.toarray() if self.is_sparse else self.B

    def full_matrix(self) -> np.ndarray:
        """The dense (n+m) x (n+m) augmented matrix."""
        n, m = self.n, self.m
        full = np.zeros((n + m, n + m))
        full[:n, :n] = self.dense_B()
        if m:
            full[:n, n:] = self.P
            full[n:, :n] = self.P.T
        return full

    def norm_inf(self) -> float:
        """Infinity norm (max absolute row sum) of the full matrix, by blocks."""
        absB = abs(self.B)
        b_rows = np.asarray(absB.sum(axis=1)).reshape(-1)
        if self.m == 0:
            return float(b_rows.max())
        absP = np.abs(self.P)
        top = b_rows + absP.sum(axis=1)
        bottom = absP.sum(axis=0)
        return float(max(top.max(), bottom.max()))


def _check_compatibility(kernel: Kernel, poly: PolyBasis | None) -> None:
    need = min_poly_degree(kernel)
    if need is not None and (poly is None or poly.degree < need):
        have = "no tail" if poly is None else f"degree {poly.degree}"
        raise ConfigurationError(
            f"kernel {kernel.kind.value!r} is conditionally positive definite and "
            f"requires a polynomial tail of degree >= {need}, got {have}"
        )


def _tail(cloud: PointCloud, poly: PolyBasis | None) -> np.ndarray:
    if poly is None:
        return np.zeros((cloud.n, 0))
    if poly.dim != cloud.dim:
        raise ValueError(f"basis is {poly.dim}-D but cloud is {cloud.dim}-D")
    return poly.matrix(cloud.points)


def _rhs(cloud: PointCloud, m: int) -> np.ndarray:
    return np.concatenate([cloud.values, np.zeros(m)])


def assemble_dense(cloud: PointCloud, kernel: Kernel, poly: PolyBasis | None) -> BlockSystem:
    """Assemble with a dense B.

    Works for any kernel.  Raises `DuplicatePointError` if two sites
    coincide (B would have identical rows) and `ConfigurationError` if the
    kernel requires a higher-degree tail than supplied.
    """
    _check_compatibility(kernel, poly)
    n = cloud.n
    iu, ju = np.triu_indices(n, k=1)
    dist = pair_distances(cloud.points, iu, ju)
    dup = dist == 0.0
    if np.any(dup):
        k = int(np.argmax(dup))
        raise DuplicatePointError(
            f"sites {iu[k]} and {ju[k]} coincide; interpolation matrix would be singular"
        )
    B = np.empty((n, n))
    vals = kernel_eval(kernel, dist)
    B[iu, ju] = vals
    B[ju, iu] = vals
    np.fill_diagonal(B, kernel_eval(kernel, 0.0))
    P = _tail(cloud, poly)
    return BlockSystem(B, P, _rhs(cloud, P.shape[1]), kernel, cloud.points, poly)


def assemble_sparse(cloud: PointCloud, kernel: Kernel, poly: PolyBasis | None) -> BlockSystem:
    """Assemble with B in CSR form; requires a compactly supported kernel.

    Mathematically identical to `assemble_dense`: within-support entries are
    computed once per unordered pair through the same kernel and distance
    code, then mirrored.  Diagonal entries are stored explicitly.  The tail
    block P stays dense.
    """
    _check_compatibility(kernel, poly)
    if not kernel_is_compact(kernel):
        raise ConfigurationError(
            f"sparse assembly needs a compactly supported kernel, got {kernel.kind.value!r}"
        )
    n = cloud.n
    ii, jj, dist = neighbor_pairs(cloud, support_radius(kernel))
    dup = dist == 0.0
    if np.any(dup):
        k = int(np.argmax(dup))
        raise DuplicatePointError(
            f"sites {ii[k]} and {jj[k]} coincide; interpolation matrix would be singular"
        )
    vals = kernel_eval(kernel, dist)
    diag = np.arange(n)
    rows = np.concatenate([ii, jj, diag])
    cols = np.concatenate([jj, ii, diag])
    data = np.concatenate([vals, vals, np.full(n, kernel_eval(kernel, 0.0))])
    B = sp.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    B.sort_indices()
    P = _tail(cloud, poly)
    return BlockSystem(B, P, _rhs(cloud, P.shape[1]), kernel, cloud.points, poly)


def densify(system: BlockSystem) -> BlockSystem:
    """Dense copy of a (possibly sparse) system; a no-op for dense input."""
    if not system.is_sparse:
        return system
    return BlockSystem(
        system.B.toarray(), system.P, system.rhs, system.kernel, system.sites, system.poly
    )


def side_condition_defect(model, cloud: PointCloud, poly: PolyBasis | None) -> np.ndarray:
    """Post-solve audit of the orthogonality conditions: returns P^T lambda.

    Evaluated in the model's fitting frame (sites mapped through its stored
    normalization), i.e. against the P that actually entered the solve.
    Every component should be ~0 for a valid fit; m = 0 gives an empty
    vector.
    """
    if poly is None:
        return np.zeros(0)
    sites = model.normalization.apply(cloud.points)
    P = poly.matrix(sites)
    return P.T @ model.weights
