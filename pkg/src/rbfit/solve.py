"""Solvers for the augmented block system and evaluation of fitted models.

Three interchangeable paths produce the same weights on well-conditioned
problems:

* ``solve_direct``  — pivoted symmetric-indefinite (LDL^T) factorization of
  the full matrix.  The zero block makes the system indefinite, so plain
  Cholesky does not apply and plain LU would waste the symmetry.
* ``solve_schur``   — block elimination: factor B once, form the (signed)
  complement ``S = -P^T B^{-1} P``, solve the small m x m system for the
  tail coefficients, back-substitute for the weights.  Needs B positive
  definite, hence a strictly positive definite kernel.
* ``solve_sparse_cg`` — conjugate gradients on the sparse B from a compact
  kernel; with a tail present the Schur elimination is reused with every
  B-solve done by CG (m + 1 solves to form the small system, one more to
  recover the weights).

Every successful solve records the true residual ``||Mx - b||_inf`` of the
full system, and any pivot below ``1e3 * eps * ||M||_inf`` aborts with a
singularity error instead of returning garbage.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve, ldl, solve_triangular

from .assembly import BlockSystem, PolyBasis, assemble_dense, assemble_sparse
from .exceptions import (
    ConfigurationError,
    ConvergenceError,
    RankDeficientError,
    SingularBlockError,
    SingularSystemError,
)
from .geometry import PointCloud
from .kernels import Kernel, kernel_eval
from .normalize import NormalizeTransform, fit_transform

__all__ = [
    "FitReport",
    "InterpolantModel",
    "GridSpec",
    "solve_direct",
    "solve_schur",
    "solve_sparse_cg",
    "evaluate",
    "evaluate_grid",
    "residual_inf",
    "fit",
    "SOLVER_NAMES",
]

SOLVER_NAMES = ("direct", "schur", "cg")

_PIVOT_FACTOR = 1e3  # pivots below _PIVOT_FACTOR * eps * ||M||_inf are singular

DEFAULT_CG_TOL = 1e-10


@dataclass(frozen=True)
class FitReport:
    solver: str
    residual: float
    iterations: int | None = None


@dataclass(frozen=True)
class InterpolantModel:
    """A fitted interpolant: kernel, centers, weights and polynomial tail.

    ``centers`` are stored in the fitting frame; ``normalization`` maps query
    points into that frame (the identity transform when fitting raw
    coordinates).  Immutable and safe to evaluate concurrently.
    """

    kernel: Kernel
    centers: np.ndarray
    weights: np.ndarray
    poly: PolyBasis | None
    poly_coeffs: np.ndarray
    normalization: NormalizeTransform
    fit_report: FitReport

    @property
    def n(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]


def residual_inf(system: BlockSystem, weights: np.ndarray, coeffs: np.ndarray) -> float:
    """Independently recomputed ``||Mx - b||_inf`` from the blocks."""
    top = system.B @ weights - system.rhs[: system.n]
    if system.m:
        top = top + system.P @ coeffs
        bottom = system.P.T @ weights
        return float(max(np.abs(top).max(), np.abs(bottom).max()))
    return float(np.abs(top).max())


def _pivot_threshold(system: BlockSystem) -> float:
    return _PIVOT_FACTOR * np.finfo(float).eps * system.norm_inf()


def _model(system: BlockSystem, weights, coeffs, report: FitReport) -> InterpolantModel:
    return InterpolantModel(
        kernel=system.kernel,
        centers=system.sites,
        weights=np.asarray(weights, dtype=float),
        poly=system.poly,
        poly_coeffs=np.asarray(coeffs, dtype=float),
        normalization=NormalizeTransform.identity(system.sites.shape[1]),
        fit_report=report,
    )


def _ldl_pivots(d: np.ndarray) -> float:
    """Smallest singular value over the 1x1 / 2x2 pivot blocks of an LDL^T D."""
    n = d.shape[0]
    smallest = np.inf
    i = 0
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0.0:
            blk = d[i : i + 2, i : i + 2]
            smallest = min(smallest, np.linalg.svd(blk, compute_uv=False)[-1])
            i += 2
        else:
            smallest = min(smallest, abs(d[i, i]))
            i += 1
    return float(smallest)


def _ldl_solve(d: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Solve D y = z for the block-diagonal D of an LDL^T factorization."""
    y = np.empty_like(z)
    n = d.shape[0]
    i = 0
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0.0:
            y[i : i + 2] = np.linalg.solve(d[i : i + 2, i : i + 2], z[i : i + 2])
            i += 2
        else:
            y[i] = z[i] / d[i, i]
            i += 1
    return y


def solve_direct(system: BlockSystem) -> InterpolantModel:
    """Solve the full (n+m) system by pivoted LDL^T (Bunch-Kaufman).

    Raises `SingularSystemError`, carrying the offending pivot magnitude,
    when the smallest pivot falls below the safety threshold.
    """
    M = system.full_matrix()
    b = system.rhs
    lu, d, perm = ldl(M, lower=True)
    pivot = _ldl_pivots(d)
    threshold = _pivot_threshold(system)
    if not np.isfinite(pivot) or pivot < threshold:
        raise SingularSystemError(
            f"system numerically singular: pivot {pivot:.3e} below threshold {threshold:.3e}",
            pivot=pivot,
        )
    ltri = lu[perm]
    z = solve_triangular(ltri, b[perm], lower=True, unit_diagonal=True)
    y = _ldl_solve(d, z)
    w = solve_triangular(ltri.T, y, lower=False, unit_diagonal=True)
    x = np.empty_like(w)
    x[perm] = w
    weights, coeffs = x[: system.n], x[system.n :]
    report = FitReport("direct", residual_inf(system, weights, coeffs))
    return _model(system, weights, coeffs, report)


def _factor_spd(matrix: np.ndarray, threshold: float, error):
    """Cholesky-factor an SPD matrix, mapping failure/tiny pivots to `error`."""
    try:
        factor = cho_factor(matrix, lower=True)
    except np.linalg.LinAlgError as exc:
        raise error(f"{exc}") from None
    pivots = np.diag(factor[0]) ** 2
    smallest = float(pivots.min()) if pivots.size else np.inf
    if smallest < threshold:
        raise error(
            f"factorization pivot {smallest:.3e} below threshold {threshold:.3e}"
        )
    return factor


def solve_schur(system: BlockSystem) -> InterpolantModel:
    """Solve by block elimination through the Schur complement of B.

    Factor B (Cholesky), form ``S = -P^T B^{-1} P``, solve
    ``S a = -P^T B^{-1} h`` for the tail coefficients, then recover
    ``lambda = B^{-1} (h - P a)``.  With no tail this reduces to a single
    B-solve.  Raises `SingularBlockError` if B is not positive definite
    (e.g. a conditionally positive definite kernel) and `RankDeficientError`
    if P is rank deficient (e.g. collinear sites with a linear tail).
    """
    threshold = _pivot_threshold(system)
    B = system.dense_B()
    h = system.rhs[: system.n]
    facB = _factor_spd(
        B, threshold, lambda msg: SingularBlockError(f"kernel block not positive definite: {msg}")
    )
    if system.m == 0:
        weights = cho_solve(facB, h)
        report = FitReport("schur", residual_inf(system, weights, np.zeros(0)))
        return _model(system, weights, np.zeros(0), report)

    P = system.P
    Z = cho_solve(facB, P)  # B^{-1} P, column by column
    zh = cho_solve(facB, h)  # B^{-1} h
    PtZ = P.T @ Z  # -S; positive definite iff P has full column rank
    PtZ = 0.5 * (PtZ + PtZ.T)
    facS = _factor_spd(
        PtZ, threshold, lambda msg: RankDeficientError(f"polynomial block rank deficient: {msg}")
    )
    coeffs = cho_solve(facS, P.T @ zh)
    weights = zh - Z @ coeffs
    report = FitReport("schur", residual_inf(system, weights, coeffs))
    return _model(system, weights, coeffs, report)


def _cg(B, rhs: np.ndarray, tol: float, max_iter: int) -> tuple[np.ndarray, int]:
    """Conjugate gradients on SPD ``B`` to relative residual ``tol``.

    Returns ``(solution, iterations)``; raises `ConvergenceError` with the
    final relative residual if ``max_iter`` is exhausted first.
    """
    norm_rhs = float(np.linalg.norm(rhs))
    if norm_rhs == 0.0:
        return np.zeros_like(rhs), 0
    x = np.zeros_like(rhs)
    r = rhs.copy()
    p = r.copy()
    rs = float(r @ r)
    for k in range(1, max_iter + 1):
        Bp = B @ p
        curvature = float(p @ Bp)
        if curvature <= 0.0:
            raise SingularBlockError(
                f"kernel block not positive definite (curvature {curvature:.3e} in CG)"
            )
        alpha = rs / curvature
        x += alpha * p
        r -= alpha * Bp
        rs_next = float(r @ r)
        if np.sqrt(rs_next) <= tol * norm_rhs:
            return x, k
        p = r + (rs_next / rs) * p
        rs = rs_next
    raise ConvergenceError(
        f"CG did not reach tol {tol:g} within {max_iter} iterations "
        f"(relative residual {np.sqrt(rs) / norm_rhs:.3e})",
        residual=float(np.sqrt(rs) / norm_rhs),
        iterations=max_iter,
    )


def solve_sparse_cg(
    system: BlockSystem, tol: float = DEFAULT_CG_TOL, max_iter: int | None = None
) -> InterpolantModel:
    """Solve a sparse-B system with conjugate gradients.

    Without a tail this is plain CG on B.  With a tail, the Schur elimination
    runs with CG as the B-solver: m + 1 solves build the m x m complement and
    its right-hand side, one further solve recovers the weights.  Total CG
    iterations across all solves are recorded in the fit report.
    """
    if not system.is_sparse:
        raise ConfigurationError("solve_sparse_cg needs a sparse system (assemble_sparse)")
    if tol <= 0.0:
        raise ConfigurationError(f"cg tolerance must be positive, got {tol}")
    if max_iter is None:
        max_iter = 10 * system.n
    if max_iter < 1:
        raise ConfigurationError(f"cg max_iter must be >= 1, got {max_iter}")

    B = system.B
    h = system.rhs[: system.n]
    if system.m == 0:
        weights, iters = _cg(B, h, tol, max_iter)
        report = FitReport("cg", residual_inf(system, weights, np.zeros(0)), iterations=iters)
        return _model(system, weights, np.zeros(0), report)

    P = system.P
    total = 0
    zh, k = _cg(B, h, tol, max_iter)
    total += k
    Z = np.empty_like(P)
    for col in range(system.m):
        Z[:, col], k = _cg(B, P[:, col], tol, max_iter)
        total += k
    PtZ = P.T @ Z
    PtZ = 0.5 * (PtZ + PtZ.T)
    threshold = _pivot_threshold(system)
    facS = _factor_spd(
        PtZ, threshold, lambda msg: RankDeficientError(f"polynomial block rank deficient: {msg}")
    )
    coeffs = cho_solve(facS, P.T @ zh)
    weights, k = _cg(B, h - P @ coeffs, tol, max_iter)
    total += k
    report = FitReport("cg", residual_inf(system, weights, coeffs), iterations=total)
    return _model(system, weights, coeffs, report)


_SOLVERS = {"direct": solve_direct, "schur": solve_schur, "cg": solve_sparse_cg}


def _eval_points(model: InterpolantModel, pts: np.ndarray) -> np.ndarray:
    """Vectorized interpolant evaluation at (k, dim) domain points.

    Reductions run per point over the centers with `np.sum`, whose summation
    order depends only on the center count, so grid evaluation is exactly
    the pointwise evaluation at every node.
    """
    local = model.normalization.apply(pts)
    out = np.empty(local.shape[0])
    centers = model.centers
    chunk = max(1, 2_000_000 // max(1, model.n))
    for start in range(0, local.shape[0], chunk):
        block = local[start : start + chunk]
        diff = block[:, None, :] - centers[None, :, :]
        r = np.sqrt(np.sum(diff * diff, axis=-1))
        out[start : start + chunk] = np.sum(kernel_eval(model.kernel, r) * model.weights, axis=1)
    if model.poly is not None:
        out += np.sum(model.poly.matrix(local) * model.poly_coeffs, axis=1)
    return out


def evaluate(model: InterpolantModel, query) -> float:
    """Evaluate the fitted interpolant at one point."""
    q = np.atleast_1d(np.asarray(query, dtype=float))
    if q.ndim != 1 or q.shape[0] != model.dim:
        raise ValueError(f"query must be a {model.dim}-D point, got shape {q.shape}")
    return float(_eval_points(model, q.reshape(1, -1))[0])


@dataclass(frozen=True)
class GridSpec:
    """Cartesian evaluation grid: per-axis (min, max, count).

    ``count = 1`` places the single node at the axis minimum.  Nodes are
    enumerated in row-major order (last axis fastest).
    """

    mins: tuple[float, ...]
    maxs: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        mins = tuple(float(v) for v in self.mins)
        maxs = tuple(float(v) for v in self.maxs)
        counts = tuple(int(c) for c in self.counts)
        if not (len(mins) == len(maxs) == len(counts)) or not 1 <= len(mins) <= 3:
            raise ValueError("grid needs matching mins/maxs/counts for 1 to 3 axes")
        if any(c < 1 for c in counts):
            raise ValueError(f"grid counts must be >= 1, got {counts}")
        if any(not np.isfinite(a) or not np.isfinite(b) or a > b for a, b in zip(mins, maxs)):
            raise ValueError("grid axis ranges must be finite with min <= max")
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)
        object.__setattr__(self, "counts", counts)

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def axes(self) -> list[np.ndarray]:
        return [
            np.linspace(lo, hi, c) if c > 1 else np.array([lo])
            for lo, hi, c in zip(self.mins, self.maxs, self.counts)
        ]

    def nodes(self) -> np.ndarray:
        """All grid nodes as a (size, dim) array in row-major order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)


def evaluate_grid(model: InterpolantModel, grid: GridSpec) -> np.ndarray:
    """Evaluate over a Cartesian grid; equals pointwise `evaluate` per node."""
    if grid.dim != model.dim:
        raise ValueError(f"grid is {grid.dim}-D but model is {model.dim}-D")
    return _eval_points(model, grid.nodes())


def fit(
    cloud: PointCloud,
    kernel: Kernel,
    degree: int | None = 1,
    solver: str = "direct",
    normalize: bool = True,
    cg_tol: float = DEFAULT_CG_TOL,
    cg_max_iter: int | None = None,
) -> InterpolantModel:
    """Fit an interpolant to a point cloud.

    With ``normalize`` on (the default) the sites are mapped into [-1, 1]^d
    and the kernel shape is rescaled so the physical support is unchanged;
    the resulting transform is stored on the model and applied to every
    query.  ``degree=None`` fits without a polynomial tail (positive
    definite kernels only).  ``solver='cg'`` assembles sparse and therefore
    requires a compact kernel; the other solvers assemble dense.
    """
    if solver not in _SOLVERS:
        raise ConfigurationError(f"unknown solver {solver!r}; choose one of {SOLVER_NAMES}")
    poly = None if degree is None else PolyBasis(degree, cloud.dim)
    transform = fit_transform(cloud) if normalize else NormalizeTransform.identity(cloud.dim)
    work = PointCloud(transform.apply(cloud.points), cloud.values)
    work_kernel = kernel.rescaled(transform.half_extent)
    if solver == "cg":
        system = assemble_sparse(work, work_kernel, poly)
        model = solve_sparse_cg(system, tol=cg_tol, max_iter=cg_max_iter)
    else:
        system = assemble_dense(work, work_kernel, poly)
        model = _SOLVERS[solver](system)
    return replace(model, normalization=transform)
