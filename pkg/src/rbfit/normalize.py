"""Domain normalization: center-and-scale sites into [-1, 1]^d before assembly.

Interpolating far from the origin inflates the polynomial block of the
augmented system and with it the condition number, even though the underlying
problem is unchanged.  Mapping the bounding box to [-1, 1]^d with a single
isotropic scale removes that sensitivity without distorting distances, so one
global kernel shape parameter stays meaningful; composing the scale into the
kernel (`Kernel.rescaled`) preserves the physical support radius.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import PointCloud

__all__ = ["NormalizeTransform", "fit_transform"]


@dataclass(frozen=True)
class NormalizeTransform:
    """Affine map ``x -> (x - center) / half_extent`` and its inverse."""

    center: np.ndarray
    half_extent: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(-1)
        h = float(self.half_extent)
        if not np.all(np.isfinite(c)) or not np.isfinite(h) or h <= 0.0:
            raise ValueError("transform needs finite center and positive half_extent")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "half_extent", h)

    @classmethod
    def identity(cls, dim: int) -> "NormalizeTransform":
        return cls(np.zeros(dim), 1.0)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def _check(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if pts.shape[-1] != self.dim:
            raise ValueError(f"dimension mismatch: transform is {self.dim}-D, point is {pts.shape[-1]}-D")
        return pts

    def apply(self, pts):
        """Map point(s) into normalized coordinates."""
        return (self._check(pts) - self.center) / self.half_extent

    def invert(self, pts):
        """Map normalized point(s) back to domain coordinates."""
        return self._check(pts) * self.half_extent + self.center


def fit_transform(cloud: PointCloud) -> NormalizeTransform:
    """Transform taking the cloud's bounding box into [-1, 1]^d.

    The scale is isotropic (half of the largest box side) so shapes are
    preserved.  A degenerate box (single site, zero extent) falls back to
    half_extent 1, making the transform a pure translation.
    """
    lo = cloud.points.min(axis=0)
    hi = cloud.points.max(axis=0)
    center = 0.5 * (lo + hi)
    half_extent = 0.5 * float((hi - lo).max())
    if half_extent <= 0.0:
        half_extent = 1.0
    return NormalizeTransform(center, half_extent)
