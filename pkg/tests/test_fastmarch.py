import numpy as np
import pytest

from conftest import disk_mask, random_blob, dilate

from oscflow.grid import BinarySet, Grid2D, ScalarField
from oscflow.fastmarch import (
    fast_march,
    init_band,
    signed_distance,
    signed_distance_field,
)


def test_init_band_1d_interface():
    grid = Grid2D(6, 1)
    u = ScalarField(grid, (np.arange(6) - 2.5).reshape(1, 6))
    band = init_band(u)
    finite = np.isfinite(band)
    assert finite.sum() == 2
    assert band[0, 2] == pytest.approx(0.5)
    assert band[0, 3] == pytest.approx(0.5)


def test_init_band_checkerboard():
    grid = Grid2D(8, 8)
    jj, ii = np.meshgrid(np.arange(8), np.arange(8), indexing="ij")
    u = ScalarField(grid, np.where((ii + jj) % 2 == 0, 1.0, -1.0))
    band = init_band(u)
    np.testing.assert_allclose(band, 0.5)


def test_init_band_no_interface():
    grid = Grid2D(5, 5)
    u = ScalarField(grid, np.ones((5, 5)))
    band = init_band(u)
    assert not np.isfinite(band).any()
    # constant-sign fields clamp at the cap
    sd = signed_distance_field(u)
    assert np.all(sd.values == grid.diameter)


def test_fast_march_planar_exact():
    grid = Grid2D(6, 6)
    vals = np.tile(np.arange(6) - 2.5, (6, 1))
    sd = signed_distance_field(ScalarField(grid, vals))
    np.testing.assert_allclose(sd.values, vals, atol=1e-12)


def test_fast_march_point_source_accuracy():
    # first-order upwind overestimates along diagonals; the 9% bound holds
    # away from the immediate neighborhood of the seed
    n = 41
    grid = Grid2D(n, n)
    band = np.full((n, n), np.inf)
    band[20, 20] = 0.0
    d = fast_march(band, grid)
    jj, ii = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    eu = np.hypot(ii - 20.0, jj - 20.0)
    assert np.all(d >= eu - 1e-9)
    far = eu >= 8.0
    assert np.all(d[far] <= eu[far] * 1.09)
    near = eu > 0
    assert np.all(d[near] <= eu[near] * 1.21)


def test_fast_march_two_seeds_vs_min():
    # union of seeds is pointwise <= min of single-seed solves (exact),
    # with equality inside each seed's causal zone
    n = 64
    grid = Grid2D(n, n)
    b1 = np.full((n, n), np.inf)
    b1[10, 10] = 0.0
    b2 = np.full((n, n), np.inf)
    b2[40, 50] = 0.0
    d1 = fast_march(b1, grid)
    d2 = fast_march(b2, grid)
    d12 = fast_march(np.minimum(b1, b2), grid)
    dmin = np.minimum(d1, d2)
    assert np.all(d12 <= dmin + 1e-12)
    causal = dmin < np.hypot(30, 40) / 2 - 1
    assert causal.sum() > 1000
    np.testing.assert_allclose(d12[causal], dmin[causal], atol=1e-12)


def test_signed_distance_halfplane_exact():
    grid = Grid2D(8, 6)
    mask = np.zeros((6, 8), dtype=np.uint8)
    mask[:, :4] = 1
    sd = signed_distance(BinarySet(grid, mask))
    expect = np.tile(np.arange(8) - 3.5, (6, 1))
    np.testing.assert_allclose(sd.values, expect, atol=1e-12)


def test_signed_distance_single_pixel():
    grid = Grid2D(9, 9)
    mask = np.zeros((9, 9), dtype=np.uint8)
    mask[4, 4] = 1
    sd = signed_distance(BinarySet(grid, mask))
    assert sd.values[4, 4] == pytest.approx(-0.5)
    assert np.all(sd.values.ravel()[np.arange(81) != 40] > 0)


def test_signed_distance_disk():
    grid = Grid2D(64, 64)
    mask = disk_mask(64, 31.5, 31.5, 16.0)
    sd = signed_distance(BinarySet(grid, mask))
    jj, ii = np.meshgrid(np.arange(64), np.arange(64), indexing="ij")
    radial = np.hypot(ii - 31.5, jj - 31.5) - 16.0
    assert np.abs(sd.values - radial).max() <= 1.5


def test_signed_distance_empty_full():
    grid = Grid2D(5, 5)
    empty = BinarySet(grid, np.zeros((5, 5), dtype=np.uint8))
    full = BinarySet(grid, np.ones((5, 5), dtype=np.uint8))
    cap = grid.diameter
    assert np.all(signed_distance(empty).values == cap)
    assert np.all(signed_distance(full).values == -cap)


def test_signed_distance_symmetric_set():
    grid = Grid2D(21, 21)
    mask = disk_mask(21, 10, 10, 5.0)
    sd = signed_distance(BinarySet(grid, mask)).values
    np.testing.assert_allclose(sd, sd[::-1, :], atol=1e-12)
    np.testing.assert_allclose(sd, sd[:, ::-1], atol=1e-12)
    np.testing.assert_allclose(sd, sd.T, atol=1e-12)


def test_signed_distance_nested_comparison(rng):
    # A inside B implies distance-to-A >= distance-to-B everywhere
    grid = Grid2D(48, 48)
    for _ in range(8):
        a = random_blob(rng, grid, n_disks=2, rmin=2, rmax=4, margin=12)
        if a.is_empty():
            continue
        b = dilate(a, rng.choice([1.0, 2.0]))
        da = signed_distance(a).values
        db = signed_distance(b).values
        assert np.all(da >= db - 1e-9)


def test_march_values_never_below_seeds():
    # acceptance ordering: accepted values are nondecreasing (asserted in
    # the march itself); spot-check output dominates the band
    grid = Grid2D(16, 16)
    mask = disk_mask(16, 7.5, 7.5, 4.0)
    band_inside = signed_distance(BinarySet(grid, mask))
    assert band_inside.values.min() >= -grid.diameter
