"""CSV and JSON input/output.

Point data and evaluation grids travel as CSV (human-auditable, diff
friendly); models and diagnostic reports as JSON.  Floats are serialized with
`repr`, the shortest representation that parses back to the identical double,
so save/load round trips are bit-exact.  All writes go through a temp file
and an atomic rename.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .exceptions import DataError, DuplicatePointError
from .geometry import PointCloud
from .kernels import Kernel
from .normalize import NormalizeTransform
from .assembly import PolyBasis
from .solve import FitReport, GridSpec, InterpolantModel

__all__ = [
    "read_points_csv",
    "write_model_json",
    "read_model_json",
    "write_grid_csv",
    "write_json_report",
]

_HEADERS = {("x", "h"): 1, ("x", "y", "h"): 2, ("x", "y", "z", "h"): 3}

MODEL_SCHEMA_VERSION = 1


def _atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_points_csv(path) -> PointCloud:
    """Load scattered sites and values from CSV.

    The header must be ``x,h``, ``x,y,h`` or ``x,y,z,h`` (dimension is
    inferred from it).  Malformed headers, non-numeric or non-finite cells,
    wrong column counts and duplicated sites each raise a distinct error
    naming the offending line.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    points: list[list[float]] = []
    values: list[float] = []
    seen: dict[tuple, int] = {}
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = None
        dim = None
        for lineno, row in enumerate(reader, start=1):
            cells = [c.strip() for c in row]
            if not cells or all(c == "" for c in cells):
                continue
            if header is None:
                header = tuple(c.lower() for c in cells)
                if header not in _HEADERS:
                    raise DataError(
                        f"{path}:{lineno}: malformed header {','.join(cells)!r}; "
                        "expected 'x,h', 'x,y,h' or 'x,y,z,h'"
                    )
                dim = _HEADERS[header]
                continue
            if len(cells) != dim + 1:
                raise DataError(
                    f"{path}:{lineno}: expected {dim + 1} columns, found {len(cells)}"
                )
            try:
                numbers = [float(c) for c in cells]
            except ValueError:
                bad = next(c for c in cells if not _is_float(c))
                raise DataError(f"{path}:{lineno}: non-numeric cell {bad!r}") from None
            if not all(np.isfinite(numbers)):
                raise DataError(f"{path}:{lineno}: non-finite value in row")
            key = tuple(numbers[:dim])
            if key in seen:
                raise DuplicatePointError(
                    f"{path}:{lineno}: duplicate point, first seen on line {seen[key]}"
                )
            seen[key] = lineno
            points.append(numbers[:dim])
            values.append(numbers[dim])
    if header is None:
        raise DataError(f"{path}: empty file, expected a header row")
    if not points:
        raise DataError(f"{path}: no data rows")
    return PointCloud(np.asarray(points), np.asarray(values))


def _is_float(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _floats(seq) -> list:
    return [float(v) for v in np.asarray(seq).reshape(-1)]


def write_model_json(model: InterpolantModel, path) -> None:
    """Serialize a fitted model; see `read_model_json` for the schema."""
    doc = {
        "kernel": {"kind": model.kernel.kind.value, "shape": model.kernel.shape},
        "dim": model.dim,
        "centers": [_floats(row) for row in model.centers],
        "lambda": _floats(model.weights),
        "poly": {
            "degree": None if model.poly is None else model.poly.degree,
            "coeffs": _floats(model.poly_coeffs),
        },
        "normalize": {
            "center": _floats(model.normalization.center),
            "half_extent": model.normalization.half_extent,
        },
        "fit": {"solver": model.fit_report.solver, "residual": model.fit_report.residual},
    }
    _atomic_write_text(path, json.dumps(doc, indent=2) + "\n")


def _require(doc: dict, key: str, context: str):
    if key not in doc:
        raise DataError(f"model JSON schema v{MODEL_SCHEMA_VERSION}: missing field {context}{key!r}")
    return doc[key]


def read_model_json(path) -> InterpolantModel:
    """Load a model saved by `write_model_json`.

    Schema (v1): ``{kernel: {kind, shape}, dim, centers, lambda,
    poly: {degree, coeffs}, normalize: {center, half_extent},
    fit: {solver, residual}}``.  Any missing field or inconsistent shape
    raises a `DataError` tagged with the schema version.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"model file not found: {path}")
    try:
        with open(path) as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise DataError(f"model JSON schema v{MODEL_SCHEMA_VERSION}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DataError(f"model JSON schema v{MODEL_SCHEMA_VERSION}: top level must be an object")

    kernel_doc = _require(doc, "kernel", "")
    dim = int(_require(doc, "dim", ""))
    centers = np.asarray(_require(doc, "centers", ""), dtype=float)
    if centers.ndim == 1:
        centers = centers.reshape(-1, 1)
    weights = np.asarray(_require(doc, "lambda", ""), dtype=float)
    poly_doc = _require(doc, "poly", "")
    degree = _require(poly_doc, "degree", "poly.")
    coeffs = np.asarray(_require(poly_doc, "coeffs", "poly."), dtype=float)
    norm_doc = _require(doc, "normalize", "")
    fit_doc = _require(doc, "fit", "")
    try:
        kernel = Kernel(
            _require(kernel_doc, "kind", "kernel."), _require(kernel_doc, "shape", "kernel.")
        )
        transform = NormalizeTransform(
            np.asarray(_require(norm_doc, "center", "normalize."), dtype=float),
            _require(norm_doc, "half_extent", "normalize."),
        )
    except (ValueError, TypeError) as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(f"model JSON schema v{MODEL_SCHEMA_VERSION}: {exc}") from None
    report = FitReport(
        solver=str(_require(fit_doc, "solver", "fit.")),
        residual=float(_require(fit_doc, "residual", "fit.")),
    )

    if centers.shape[0] != weights.shape[0]:
        raise DataError(
            f"model JSON schema v{MODEL_SCHEMA_VERSION}: {centers.shape[0]} centers "
            f"but {weights.shape[0]} weights"
        )
    if centers.shape[1] != dim or transform.dim != dim:
        raise DataError(f"model JSON schema v{MODEL_SCHEMA_VERSION}: inconsistent dimensions")
    try:
        poly = None if degree is None else PolyBasis(int(degree), dim)
    except (ValueError, TypeError) as exc:
        raise DataError(f"model JSON schema v{MODEL_SCHEMA_VERSION}: {exc}") from None
    expected_m = 0 if poly is None else poly.m
    if coeffs.shape[0] != expected_m:
        raise DataError(
            f"model JSON schema v{MODEL_SCHEMA_VERSION}: degree {degree} implies "
            f"{expected_m} coefficients, found {coeffs.shape[0]}"
        )
    return InterpolantModel(
        kernel=kernel,
        centers=centers,
        weights=weights,
        poly=poly,
        poly_coeffs=coeffs,
        normalization=transform,
        fit_report=report,
    )


def write_grid_csv(values: np.ndarray, grid: GridSpec, path) -> None:
    """Write grid evaluations as CSV: coordinate columns plus ``f``.

    One row per node in row-major order; output bytes are deterministic for
    identical inputs.
    """
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.shape[0] != grid.size:
        raise ValueError(f"grid has {grid.size} nodes but {values.shape[0]} values supplied")
    names = ["x", "y", "z"][: grid.dim]
    lines = [",".join(names + ["f"])]
    for node, val in zip(grid.nodes(), values):
        lines.append(",".join(repr(float(c)) for c in node) + f",{repr(float(val))}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def write_json_report(payload, path) -> None:
    """Write a diagnostics/experiment report as pretty-printed JSON."""

    def _default(obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        raise TypeError(f"not JSON serializable: {type(obj)!r}")

    text = json.dumps(payload, indent=2, default=_default, allow_nan=True)
    _atomic_write_text(path, text + "\n")
