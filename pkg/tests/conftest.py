import numpy as np
import pytest

from rbfit import Kernel, PointCloud


def random_cloud(seed, n, dim, lo=0.0, hi=1.0):
    """Uniform random sites in a box with uniform values in [-1, 1]."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(lo, hi, size=(n, dim))
    vals = rng.uniform(-1.0, 1.0, size=n)
    return PointCloud(pts, vals)


def well_spaced_cloud(seed, n, dim, values=None):
    """Jittered-grid sites in the unit box: random but with a guaranteed
    minimum gap, so the kernel block stays well conditioned."""
    rng = np.random.default_rng(seed)
    g = int(np.ceil(n ** (1.0 / dim)))
    cells = rng.choice(g**dim, size=n, replace=False)
    idx = np.stack(np.unravel_index(cells, (g,) * dim), axis=-1)
    cell = 1.0 / g
    pts = (idx + 0.5) * cell + rng.uniform(-0.35, 0.35, size=(n, dim)) * cell
    vals = rng.uniform(-1.0, 1.0, size=n) if values is None else values(pts)
    return PointCloud(pts, vals)


def spacing_alpha(n, dim, factor=4.0, box=1.0):
    """Kernel scale whose support is ~`factor` times the mean spacing."""
    spacing = box * (1.0 / n) ** (1.0 / dim)
    return 1.0 / (factor * spacing)


def wendland_for(cloud, factor=4.0):
    return Kernel("wendland-c2", spacing_alpha(cloud.n, cloud.dim, factor))


@pytest.fixture
def cloud_2d():
    return well_spaced_cloud(7, 40, 2)
