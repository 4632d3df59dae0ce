"""Scattered-data interpolation with radial kernels.

Fits ``f(x) = sum_j w_j * phi(||x - x_j||) + p(x)`` to N sites in 1 to 3
dimensions, where phi is a global or compactly supported radial kernel and p
is an optional low-degree polynomial tail tied down by orthogonality side
conditions.  Compact kernels yield sparse systems; three solver paths (dense
direct, Schur block elimination, conjugate gradients) are interchangeable.
The diagnostics subpackage quantifies how translating the data away from the
origin degrades the conditioning of the augmented system and how domain
normalization (on by default when fitting) removes that sensitivity.
"""

from .assembly import (
    BlockSystem,
    PolyBasis,
    assemble_dense,
    assemble_sparse,
    densify,
    side_condition_defect,
)
from .diagnostics import (
    DiagnosticsReport,
    condition_estimate,
    determinant_report,
    diagnose,
    ptp_translation_invariance_check,
    sparsity_report,
    translation_experiment,
)
from .exceptions import (
    ConfigurationError,
    ConvergenceError,
    DataError,
    DuplicatePointError,
    NumericalError,
    RankDeficientError,
    SingularBlockError,
    SingularSystemError,
)
from .geometry import PointCloud, distance, radius_neighbors
from .io import read_model_json, read_points_csv, write_grid_csv, write_model_json
from .kernels import (
    Kernel,
    KernelKind,
    kernel_eval,
    kernel_from_name,
    kernel_is_compact,
    min_poly_degree,
    support_radius,
)
from .normalize import NormalizeTransform, fit_transform
from .solve import (
    FitReport,
    GridSpec,
    InterpolantModel,
    evaluate,
    evaluate_grid,
    fit,
    residual_inf,
    solve_direct,
    solve_schur,
    solve_sparse_cg,
)

__version__ = "0.1.0"

__all__ = [
    "BlockSystem",
    "PolyBasis",
    "assemble_dense",
    "assemble_sparse",
    "densify",
    "side_condition_defect",
    "DiagnosticsReport",
    "condition_estimate",
    "determinant_report",
    "diagnose",
    "ptp_translation_invariance_check",
    "sparsity_report",
    "translation_experiment",
    "ConfigurationError",
    "ConvergenceError",
    "DataError",
    "DuplicatePointError",
    "NumericalError",
    "RankDeficientError",
    "SingularBlockError",
    "SingularSystemError",
    "PointCloud",
    "distance",
    "radius_neighbors",
    "read_model_json",
    "read_points_csv",
    "write_grid_csv",
    "write_model_json",
    "Kernel",
    "KernelKind",
    "kernel_eval",
    "kernel_from_name",
    "kernel_is_compact",
    "min_poly_degree",
    "support_radius",
    "NormalizeTransform",
    "fit_transform",
    "FitReport",
    "GridSpec",
    "InterpolantModel",
    "evaluate",
    "evaluate_grid",
    "fit",
    "residual_inf",
    "solve_direct",
    "solve_schur",
    "solve_sparse_cg",
    "__version__",
]
