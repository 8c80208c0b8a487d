import numpy as np
import pytest

from oscflow.grid import BinarySet, Grid2D, ScalarField, make_discrete_ball


@pytest.fixture
def rng():
    return np.random.default_rng(20240701)


def random_field(rng, grid, lo=-1.0, hi=1.0):
    return ScalarField(grid, rng.uniform(lo, hi, size=(grid.height, grid.width)))


def random_set(rng, grid, p=0.5):
    return BinarySet(grid, (rng.random((grid.height, grid.width)) < p).astype(np.uint8))


def disk_mask(n, cx, cy, radius):
    jj, ii = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return ((ii - cx) ** 2 + (jj - cy) ** 2 <= radius ** 2).astype(np.uint8)


def random_blob(rng, grid, n_disks=3, rmin=2, rmax=5, margin=8):
    """Union of random disks away from the border; may be empty-ish."""
    h, w = grid.height, grid.width
    mask = np.zeros((h, w), dtype=np.uint8)
    jj, ii = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    for _ in range(n_disks):
        cx = rng.integers(margin, w - margin)
        cy = rng.integers(margin, h - margin)
        r = rng.integers(rmin, rmax + 1)
        mask |= ((ii - cx) ** 2 + (jj - cy) ** 2 <= r * r).astype(np.uint8)
    return BinarySet(grid, mask)


def dilate(set_, rho):
    """Morphological dilation by the discrete ball of radius rho."""
    ball = make_discrete_ball(rho)
    h, w = set_.mask.shape
    out = np.zeros_like(set_.mask)
    for di, dj in ball.offsets:
        src = set_.mask[
            max(0, -dj): h - max(0, dj),
            max(0, -di): w - max(0, di),
        ]
        out[
            max(0, dj): h - max(0, -dj),
            max(0, di): w - max(0, -di),
        ] |= src
    return BinarySet(set_.grid, out)
