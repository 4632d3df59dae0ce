"""Point clouds, exact pairwise distances and radius-limited neighbor search.

All distance computations in the package funnel through `pair_distances` so
that dense assembly, sparse assembly and neighbor queries make bit-identical
inclusion decisions near the support boundary.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

__all__ = ["PointCloud", "distance", "pair_distances", "radius_neighbors", "neighbor_pairs"]

# Below this size a vectorized O(N^2) scan beats building a hash grid.
_BRUTE_FORCE_LIMIT = 256


@dataclass(frozen=True)
class PointCloud:
    """N interpolation sites in d dimensions (d in {1,2,3}) with scalar values.

    ``points`` is coerced to an (N, dim) float array; a 1-D array of
    coordinates is treated as N sites on the line.  Coordinates and values
    must be finite.  Sites are required to be pairwise distinct for the
    interpolation problem to be well posed; construction does not run the
    quadratic duplicate scan, which is enforced where it is cheap (CSV
    ingestion and assembly).
    """

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if pts.ndim != 2 or pts.shape[1] not in (1, 2, 3):
            raise ValueError(f"points must be (N, dim) with dim in {{1,2,3}}, got shape {pts.shape}")
        if pts.shape[0] < 1:
            raise ValueError("point cloud must contain at least one site")
        if vals.shape[0] != pts.shape[0]:
            raise ValueError(f"{pts.shape[0]} points but {vals.shape[0]} values")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def translated(self, offset: float) -> "PointCloud":
        """Cloud with ``offset`` added to every coordinate of every site."""
        return PointCloud(self.points + float(offset), self.values)


def distance(p, q) -> float:
    """Euclidean distance between two points of equal dimension."""
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape[0]} vs {q.shape[0]}")
    d = p - q
    return float(np.sqrt(np.sum(d * d)))


def pair_distances(points: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Distances ||points[i] - points[j]|| for parallel index arrays.

    Single code path shared by every caller so identical pairs always yield
    identical floating-point distances.
    """
    d = points[i] - points[j]
    return np.sqrt(np.sum(d * d, axis=-1))


def _cell_keys(points: np.ndarray, cell: float) -> np.ndarray:
    return np.floor(points / cell).astype(np.int64)


def _build_grid(points: np.ndarray, cell: float) -> dict:
    grid = defaultdict(list)
    for idx, key in enumerate(_cell_keys(points, cell)):
        grid[tuple(key)].append(idx)
    return grid


def _grid_candidates(grid: dict, key: np.ndarray, dim: int) -> np.ndarray:
    # 3^d neighborhood of the query cell
    out = []
    for off in np.ndindex(*(3,) * dim):
        cell = tuple(key + np.asarray(off) - 1)
        hit = grid.get(cell)
        if hit:
            out.extend(hit)
    return np.asarray(out, dtype=np.intp)


def radius_neighbors(cloud: PointCloud, center_index: int, radius: float) -> list[tuple[int, float]]:
    """All sites strictly within ``radius`` of site ``center_index``.

    Returns ``(index, distance)`` pairs in ascending index order, including
    the center itself at distance zero.  The boundary is exclusive, matching
    compact kernels that vanish exactly at their support radius.
    """
    if not 0 <= center_index < cloud.n:
        raise ValueError(f"center index {center_index} out of range for N={cloud.n}")
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    pts = cloud.points
    if cloud.n < _BRUTE_FORCE_LIMIT:
        cand = np.arange(cloud.n)
    else:
        grid = _build_grid(pts, radius)
        key = np.floor(pts[center_index] / radius).astype(np.int64)
        cand = np.sort(_grid_candidates(grid, key, cloud.dim))
    dist = pair_distances(pts, np.full(cand.shape, center_index), cand)
    keep = dist < radius
    return [(int(a), float(b)) for a, b in zip(cand[keep], dist[keep])]


def neighbor_pairs(cloud: PointCloud, radius: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All unordered pairs ``i < j`` with ``||x_i - x_j|| < radius``.

    Returns ``(i, j, dist)`` arrays; the workhorse behind sparse assembly.
    Uses a uniform hash grid with cell size ``radius`` above the brute-force
    cutoff, so each query touches at most 3^d cells.
    """
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    pts = cloud.points
    n = cloud.n
    if n < _BRUTE_FORCE_LIMIT:
        iu, ju = np.triu_indices(n, k=1)
        dist = pair_distances(pts, iu, ju)
        keep = dist < radius
        return iu[keep], ju[keep], dist[keep]

    grid = _build_grid(pts, radius)
    keys = _cell_keys(pts, radius)
    ii, jj, dd = [], [], []
    for i in range(n):
        cand = _grid_candidates(grid, keys[i], cloud.dim)
        cand = cand[cand > i]
        if cand.size == 0:
            continue
        dist = pair_distances(pts, np.full(cand.shape, i), cand)
        keep = dist < radius
        if np.any(keep):
            cand = cand[keep]
            order = np.argsort(cand)
            ii.append(np.full(cand.shape, i))
            jj.append(cand[order])
            dd.append(dist[keep][order])
    if not ii:
        empty = np.empty(0, dtype=np.intp)
        return empty, empty.copy(), np.empty(0)
    return np.concatenate(ii), np.concatenate(jj), np.concatenate(dd)
