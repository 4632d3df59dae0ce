"""Conditioning and determinant diagnostics for the augmented block system.

The block factorization of the full matrix M through the Schur complement of
B yields the determinant identity

    det(M) = det(B) * det(-P^T B^{-1} P)

(the sign belongs to the complement because the trailing diagonal block is
zero).  The tail block P carries raw coordinates, so translating the sites
inflates the entries of P^T P quadratically with the offset and drives the
condition number of M up, while det(P^T P) itself is translation invariant in
exact arithmetic (translation acts on P as unit-determinant column
operations).  `translation_experiment` measures both effects and the
normalized pipeline's immunity to them; `ptp_translation_invariance_check`
isolates the determinant from the entry growth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import BlockSystem, PolyBasis, assemble_dense
from .exceptions import ConfigurationError, NumericalError
from .geometry import PointCloud
from .kernels import Kernel
from .normalize import fit_transform
from .solve import solve_direct

__all__ = [
    "DeterminantReport",
    "SparsityReport",
    "TranslationRecord",
    "PtPDriftReport",
    "DiagnosticsReport",
    "condition_estimate",
    "determinant_report",
    "translation_experiment",
    "ptp_translation_invariance_check",
    "sparsity_report",
    "diagnose",
]

_DET_SIZE_LIMIT = 1000
_COND_SIZE_LIMIT = 2000


def condition_estimate(matrix) -> float:
    """2-norm condition number from the full singular spectrum.

    Exact at the problem sizes this package targets (up to ~2000); returns
    ``inf`` once the smallest singular value drops below eps times the
    largest, i.e. the matrix is numerically singular.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"condition estimate needs a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("condition estimate needs finite entries")
    sigma = np.linalg.svd(a, compute_uv=False)
    smax, smin = float(sigma[0]), float(sigma[-1])
    if smax == 0.0 or smin < np.finfo(float).eps * smax:
        return np.inf
    return smax / smin


@dataclass(frozen=True)
class DeterminantReport:
    """det(B), det of the signed Schur complement, and det(M), computed
    independently of each other.  ``det_schur`` is None when B is singular."""

    det_B: float
    det_schur: float | None
    det_full: float

    @property
    def identity_rel_error(self) -> float | None:
        """Relative defect of det(M) = det(B) * det_schur."""
        if self.det_schur is None or self.det_full == 0.0:
            return None
        return abs(self.det_full - self.det_B * self.det_schur) / abs(self.det_full)


def determinant_report(system: BlockSystem) -> DeterminantReport:
    """Compute the three determinants of the block factorization identity.

    det(M) comes from the assembled full matrix, det(B) from the kernel
    block, and the complement determinant from ``-P^T B^{-1} P`` formed via
    a direct solve against the P columns; nothing is derived from anything
    else, so the product identity is a genuine cross-check.
    """
    if system.n + system.m > _DET_SIZE_LIMIT:
        raise ValueError(f"determinant report limited to n + m <= {_DET_SIZE_LIMIT}")
    B = system.dense_B()
    det_B = float(np.linalg.det(B))
    det_full = float(np.linalg.det(system.full_matrix()))
    det_schur = None
    if det_B != 0.0:
        try:
            schur = -system.P.T @ np.linalg.solve(B, system.P)
            det_schur = float(np.linalg.det(schur))
        except np.linalg.LinAlgError:
            det_B = 0.0
    return DeterminantReport(det_B=det_B, det_schur=det_schur, det_full=det_full)


@dataclass(frozen=True)
class SparsityReport:
    """Storage statistics for a sparse kernel block."""

    n: int
    nnz: int
    nnz_fraction: float
    avg_neighbors_per_row: float
    bandwidth: int
    bytes_sparse: int
    bytes_dense: int


def sparsity_report(system: BlockSystem) -> SparsityReport:
    """nnz fraction, neighbor and bandwidth statistics of a sparse B."""
    if not system.is_sparse:
        raise ConfigurationError("sparsity report needs a sparse system (assemble_sparse)")
    B = system.B
    n = system.n
    coo = B.tocoo()
    bandwidth = int(np.abs(coo.row - coo.col).max()) if coo.nnz else 0
    return SparsityReport(
        n=n,
        nnz=int(B.nnz),
        nnz_fraction=B.nnz / float(n * n),
        avg_neighbors_per_row=B.nnz / float(n),
        bandwidth=bandwidth,
        bytes_sparse=int(B.data.nbytes + B.indices.nbytes + B.indptr.nbytes),
        bytes_dense=int(n * n * np.dtype(float).itemsize),
    )


@dataclass(frozen=True)
class TranslationRecord:
    """One offset of the translation sweep."""

    offset: float
    cond_raw: float
    cond_normalized: float
    det_ptp: float
    max_ptp_entry: float
    residual: float | None
    status: str

    def to_json_dict(self) -> dict:
        return {
            "offset": self.offset,
            "cond_raw": self.cond_raw,
            "cond_normalized": self.cond_normalized,
            "det_ptp": self.det_ptp,
            "max_ptp_entry": self.max_ptp_entry,
            "residual": self.residual,
            "status": self.status,
        }


def translation_experiment(
    cloud: PointCloud, kernel: Kernel, poly: PolyBasis, offsets
) -> list[TranslationRecord]:
    """Sweep rigid translations and record raw vs normalized conditioning.

    For each offset T the sites move by (T, ..., T) and the system is
    assembled twice: raw (no normalization), from which the condition
    number, det(P^T P), the largest |P^T P| entry and the direct-solve
    residual are recorded; and through the normalization pipeline, from
    which only the condition number is kept for contrast.  Failed solves at
    extreme offsets are recorded in ``status`` rather than raised.
    """
    offsets = [float(t) for t in offsets]
    if 0.0 not in offsets:
        raise ValueError("offsets must include 0 as the baseline")
    records = []
    for off in offsets:
        shifted = cloud.translated(off)
        raw = assemble_dense(shifted, kernel, poly)
        cond_raw = condition_estimate(raw.full_matrix())
        ptp = raw.P.T @ raw.P
        det_ptp = float(np.linalg.det(ptp))
        max_ptp = float(np.abs(ptp).max())
        status = "ok"
        residual: float | None
        try:
            residual = solve_direct(raw).fit_report.residual
        except NumericalError as exc:
            residual = None
            status = type(exc).__name__
        transform = fit_transform(shifted)
        norm_cloud = PointCloud(transform.apply(shifted.points), shifted.values)
        norm_system = assemble_dense(norm_cloud, kernel.rescaled(transform.half_extent), poly)
        cond_norm = condition_estimate(norm_system.full_matrix())
        records.append(
            TranslationRecord(
                offset=off,
                cond_raw=cond_raw,
                cond_normalized=cond_norm,
                det_ptp=det_ptp,
                max_ptp_entry=max_ptp,
                residual=residual,
                status=status,
            )
        )
    return records


@dataclass(frozen=True)
class PtPDriftReport:
    """det(P^T P) before/after translation and the numerical drift between
    them (the exact-arithmetic difference is zero)."""

    det_raw: float
    det_translated: float

    @property
    def rel_drift(self) -> float:
        if self.det_raw == 0.0:
            return 0.0 if self.det_translated == 0.0 else np.inf
        return abs(self.det_translated - self.det_raw) / abs(self.det_raw)


def ptp_translation_invariance_check(cloud: PointCloud, offset: float) -> PtPDriftReport:
    """Measure the numerical drift of det(P^T P) under translation.

    Uses the degree-1 basis, for which translation acts on P as adding
    multiples of the constant column to the coordinate columns, a
    unit-determinant operation: det(P^T P) is exactly translation invariant.
    Any measured drift is catastrophic cancellation in the moment sums, not
    a property of the determinant.
    """
    poly = PolyBasis(1, cloud.dim)
    if cloud.n < poly.m:
        raise ValueError(f"need at least {poly.m} sites for the degree-1 basis")
    P0 = poly.matrix(cloud.points)
    P1 = poly.matrix(cloud.translated(offset).points)
    return PtPDriftReport(
        det_raw=float(np.linalg.det(P0.T @ P0)),
        det_translated=float(np.linalg.det(P1.T @ P1)),
    )


@dataclass(frozen=True)
class DiagnosticsReport:
    """Single-configuration diagnostics bundle (see `diagnose`)."""

    n: int
    m: int
    cond_full: float
    cond_B: float
    det_B: float | None
    det_schur: float | None
    det_full: float | None
    det_ptp: float | None
    side_defect: np.ndarray
    nnz_fraction: float | None
    residual: float | None
    solver_status: str
    spectrum: np.ndarray = field(repr=False, default=None)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "cond_full": self.cond_full,
            "cond_B": self.cond_B,
            "det_B": self.det_B,
            "det_schur": self.det_schur,
            "det_full": self.det_full,
            "det_ptp": self.det_ptp,
            "side_defect": [float(v) for v in self.side_defect],
            "nnz_fraction": self.nnz_fraction,
            "residual": self.residual,
            "solver_status": self.solver_status,
        }


def diagnose(
    cloud: PointCloud,
    kernel: Kernel,
    poly: PolyBasis | None,
    normalize: bool = True,
    sparse_system: BlockSystem | None = None,
) -> DiagnosticsReport:
    """Assemble one configuration and report conditioning, determinants and
    the post-solve side-condition defect.

    When ``normalize`` is set the sites are mapped to [-1, 1]^d (with the
    kernel rescaled) before assembly, matching the fitting pipeline; raw
    assembly reproduces the instability described in the module docstring.
    ``sparse_system`` optionally supplies a matching sparse assembly whose
    nnz fraction is included.
    """
    if normalize:
        transform = fit_transform(cloud)
        work = PointCloud(transform.apply(cloud.points), cloud.values)
        work_kernel = kernel.rescaled(transform.half_extent)
    else:
        work = cloud
        work_kernel = kernel
    system = assemble_dense(work, work_kernel, poly)
    full = system.full_matrix()
    spectrum = np.linalg.svd(full, compute_uv=False)
    smax, smin = float(spectrum[0]), float(spectrum[-1])
    cond_full = np.inf if smax == 0.0 or smin < np.finfo(float).eps * smax else smax / smin
    cond_B = condition_estimate(system.dense_B())

    det_B = det_schur = det_full = None
    if system.n + system.m <= _DET_SIZE_LIMIT:
        det = determinant_report(system)
        det_B, det_schur, det_full = det.det_B, det.det_schur, det.det_full
    det_ptp = float(np.linalg.det(system.P.T @ system.P)) if system.m else None

    status = "ok"
    residual: float | None = None
    defect = np.zeros(system.m)
    try:
        model = solve_direct(system)
        residual = model.fit_report.residual
        if system.m:
            defect = system.P.T @ model.weights
    except NumericalError as exc:
        status = type(exc).__name__

    nnz_fraction = None
    if sparse_system is not None:
        nnz_fraction = sparsity_report(sparse_system).nnz_fraction

    return DiagnosticsReport(
        n=system.n,
        m=system.m,
        cond_full=cond_full,
        cond_B=cond_B,
        det_B=det_B,
        det_schur=det_schur,
        det_full=det_full,
        det_ptp=det_ptp,
        side_defect=defect,
        nnz_fraction=nnz_fraction,
        residual=residual,
        solver_status=status,
        spectrum=spectrum,
    )
