"""Radial kernels for scattered-data interpolation.

A kernel is a univariate profile applied to the Euclidean distance
``r = ||x - c||`` between an evaluation point and a center.  Supported
profiles, with ``t = shape * r`` for the compactly supported family:

==============  ==========================================  =========
name            expression                                  support
==============  ==========================================  =========
tps             ``r^2 ln r``  (0 at r = 0)                  global
gaussian        ``exp(-(shape * r)^2)``                     global
multiquadric    ``sqrt(r^2 + shape^2)``                     global
wendland-c0     ``(1 - t)_+^2``                             r < 1/shape
wendland-c2     ``(1 - t)_+^4 (4t + 1)``                    r < 1/shape
wendland-c4     ``(1 - t)_+^6 (35t^2 + 18t + 3) / 3``       r < 1/shape
==============  ==========================================  =========

The Wendland profiles are positive definite in up to three dimensions, so
they need no polynomial tail.  ``tps`` is conditionally positive definite of
order 2 and requires a tail of degree >= 1; ``multiquadric`` is order 1 and
requires at least a constant.  Compact kernels return exactly zero (not
merely small) outside their support, which is what makes sparse assembly
possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import ConfigurationError

__all__ = [
    "KernelKind",
    "Kernel",
    "kernel_from_name",
    "kernel_eval",
    "kernel_is_compact",
    "support_radius",
    "min_poly_degree",
    "KERNEL_NAMES",
]


class KernelKind(str, Enum):
    TPS = "tps"
    GAUSSIAN = "gaussian"
    MULTIQUADRIC = "multiquadric"
    WENDLAND_C0 = "wendland-c0"
    WENDLAND_C2 = "wendland-c2"
    WENDLAND_C4 = "wendland-c4"


KERNEL_NAMES = tuple(k.value for k in KernelKind)

_ALIASES = {"thin-plate-spline": KernelKind.TPS}

_COMPACT = frozenset(
    {KernelKind.WENDLAND_C0, KernelKind.WENDLAND_C2, KernelKind.WENDLAND_C4}
)

# Minimum polynomial-tail degree needed for a uniquely solvable system.
# None means the kernel is positive definite and may be used with no tail.
_MIN_DEGREE = {
    KernelKind.TPS: 1,
    KernelKind.MULTIQUADRIC: 0,
    KernelKind.GAUSSIAN: None,
    KernelKind.WENDLAND_C0: None,
    KernelKind.WENDLAND_C2: None,
    KernelKind.WENDLAND_C4: None,
}


@dataclass(frozen=True)
class Kernel:
    """A radial profile plus its shape parameter.

    For the Wendland family ``shape`` scales the distance before evaluation,
    so the support radius in domain units is ``1 / shape``.  For ``gaussian``
    it is the width parameter, for ``multiquadric`` the additive constant,
    and ``tps`` ignores it.
    """

    kind: KernelKind
    shape: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        object.__setattr__(self, "shape", float(self.shape))
        if not np.isfinite(self.shape) or self.shape <= 0.0:
            raise ConfigurationError(f"kernel shape must be positive, got {self.shape}")

    def rescaled(self, factor: float) -> "Kernel":
        """Shape parameter for the same physical kernel after dividing all
        coordinates by ``factor``.

        Distances shrink by ``factor``, so length-scale parameters follow:
        the Wendland scale and the gaussian width multiply by ``factor``,
        the multiquadric constant (a length) divides by it, and ``tps`` is
        scale-equivalent once a degree >= 1 tail is present.
        """
        if factor <= 0.0 or not np.isfinite(factor):
            raise ConfigurationError(f"rescale factor must be positive, got {factor}")
        if self.kind is KernelKind.TPS:
            return self
        if self.kind is KernelKind.MULTIQUADRIC:
            return Kernel(self.kind, self.shape / factor)
        return Kernel(self.kind, self.shape * factor)


def kernel_from_name(name: str, shape: float = 1.0) -> Kernel:
    """Build a kernel from its CLI name (``tps``, ``gaussian``, ``multiquadric``,
    ``wendland-c0``, ``wendland-c2``, ``wendland-c4``)."""
    key = name.strip().lower()
    if key in _ALIASES:
        return Kernel(_ALIASES[key], shape)
    try:
        return Kernel(KernelKind(key), shape)
    except ValueError:
        raise ConfigurationError(
            f"unknown kernel {name!r}; choose one of {', '.join(KERNEL_NAMES)}"
        ) from None


def kernel_is_compact(kernel: Kernel) -> bool:
    """True for the Wendland family (zero beyond ``1/shape``)."""
    return kernel.kind in _COMPACT


def support_radius(kernel: Kernel) -> float | None:
    """Support radius in domain units for compact kernels, else None."""
    return 1.0 / kernel.shape if kernel_is_compact(kernel) else None


def min_poly_degree(kernel: Kernel) -> int | None:
    """Smallest tail degree required for solvability (None: no tail needed)."""
    return _MIN_DEGREE[kernel.kind]


def kernel_eval(kernel: Kernel, r):
    """Evaluate the kernel profile at distance(s) ``r >= 0``.

    Accepts a scalar or any ndarray and preserves the input shape.  Compact
    kernels return exact zeros for ``shape * r >= 1``; ``tps`` returns its
    limit value 0 at ``r = 0``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise ValueError("kernel argument r must be non-negative")

    kind = kernel.kind
    if kind is KernelKind.TPS:
        out = np.zeros_like(r)
        pos = r > 0.0
        rp = r[pos]
        out[pos] = rp * rp * np.log(rp)
    elif kind is KernelKind.GAUSSIAN:
        t = kernel.shape * r
        out = np.exp(-(t * t))
    elif kind is KernelKind.MULTIQUADRIC:
        out = np.sqrt(r * r + kernel.shape * kernel.shape)
    else:
        t = kernel.shape * r
        u = np.where(t < 1.0, 1.0 - t, 0.0)  # exact zero outside support
        if kind is KernelKind.WENDLAND_C0:
            out = u * u
        elif kind is KernelKind.WENDLAND_C2:
            out = u**4 * (4.0 * t + 1.0)
        else:
            out = u**6 * (35.0 * t * t + 18.0 * t + 3.0) / 3.0

    return float(out) if out.ndim == 0 else out
