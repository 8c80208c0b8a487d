"""Grid geometry, fields, discrete balls and weight profiles.

Everything downstream (energies, cuts, distance transforms, the flow
drivers) consumes the types defined here.  All types are immutable after
construction; the numpy arrays they hold are set non-writeable so they can
be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np


class BoundaryMode(Enum):
    """How windows behave at the grid border.

    CLIP intersects stencils with the grid rectangle (the default used by
    the discrete energies).  PAD_CONSTANT is only meaningful for callers
    that pad explicitly; the core operations always clip.
    """

    CLIP = "clip"
    PAD_CONSTANT = "pad_constant"


class InvalidRadiusError(ValueError):
    pass


class InvalidProfileError(ValueError):
    pass


@dataclass(frozen=True)
class Grid2D:
    """Rectangular cell grid, ``width`` x ``height`` cells of size ``spacing``.

    Cell (i, j) has its center at physical coordinates (i*spacing, j*spacing),
    0 <= i < width, 0 <= j < height.
    """

    width: int
    height: int
    spacing: float = 1.0
    boundary_mode: BoundaryMode = BoundaryMode.CLIP
    pad_value: float = 0.0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.width}x{self.height}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    @property
    def cell_area(self) -> float:
        return self.spacing * self.spacing

    @property
    def diameter(self) -> float:
        """Length of the grid diagonal; used as the distance cap."""
        return float(np.hypot(self.width, self.height)) * self.spacing

    def index(self, i: int, j: int) -> int:
        return j * self.width + i

    def contains(self, i: int, j: int) -> bool:
        return 0 <= i < self.width and 0 <= j < self.height


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ScalarField:
    """Real-valued function sampled on a grid (level-set function or distance).

    ``values`` has shape (height, width), row j = y, column i = x.
    """

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.grid.height, self.grid.width):
            raise ValueError(
                f"values shape {v.shape} does not match grid "
                f"{(self.grid.height, self.grid.width)}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", _frozen(v))

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())

    def with_values(self, values: np.ndarray) -> "ScalarField":
        return ScalarField(self.grid, values)


@dataclass(frozen=True)
class BinarySet:
    """A {0,1}-valued grid field representing a set E (1 = inside)."""

    grid: Grid2D
    mask: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mask)
        if m.shape != (self.grid.height, self.grid.width):
            raise ValueError(
                f"mask shape {m.shape} does not match grid "
                f"{(self.grid.height, self.grid.width)}"
            )
        if m.dtype != np.uint8:
            if not np.isin(m, (0, 1)).all():
                raise ValueError("mask values must be 0 or 1")
            m = m.astype(np.uint8)
        object.__setattr__(self, "mask", _frozen(m))

    @property
    def pixel_count(self) -> int:
        return int(self.mask.sum())

    @property
    def area(self) -> float:
        return self.pixel_count * self.grid.cell_area

    @property
    def equivalent_radius(self) -> float:
        """Radius of the disk with the same area."""
        return float(np.sqrt(self.area / np.pi))

    def is_empty(self) -> bool:
        return self.pixel_count == 0

    def is_full(self) -> bool:
        return self.pixel_count == self.grid.n_cells

    def complement(self) -> "BinarySet":
        return BinarySet(self.grid, 1 - self.mask)

    def to_field(self, inside: float = 1.0, outside: float = 0.0) -> ScalarField:
        vals = np.where(self.mask == 1, inside, outside)
        return ScalarField(self.grid, vals)


@dataclass(frozen=True)
class DiscreteBall:
    """Integer offsets {(di, dj) : di^2 + dj^2 <= radius^2}."""

    radius: float
    offsets: np.ndarray  # shape (k, 2), columns (di, dj)

    def __post_init__(self):
        o = np.asarray(self.offsets, dtype=np.int64)
        object.__setattr__(self, "offsets", _frozen(o))

    def __len__(self) -> int:
        return self.offsets.shape[0]


def make_discrete_ball(rho: float) -> DiscreteBall:
    """Lattice ball of radius ``rho``: all (i, j) with i^2 + j^2 <= rho^2."""
    if rho < 1:
        raise InvalidRadiusError(f"ball radius must be >= 1, got {rho}")
    r = int(np.floor(rho))
    rr = rho * rho
    offs = [
        (di, dj)
        for dj in range(-r, r + 1)
        for di in range(-r, r + 1)
        if di * di + dj * dj <= rr
    ]
    return DiscreteBall(rho, np.array(offs, dtype=np.int64))


@dataclass(frozen=True)
class WeightProfile:
    """Even, nonincreasing weight function with inner plateau, plus quadrature.

    The profile is constant at ``plateau_height`` on [0, delta_inner],
    decreases to 0 at ``rho0``, and vanishes beyond.  The induced measure
    w(s) ds with w(s) = -2 s f'(s) lives on [delta_inner, rho0] and is
    discretized by the stored (node, weight) quadrature; weights sum to 1.
    """

    rho0: float
    delta_inner: float
    plateau_height: float
    nodes: np.ndarray    # quadrature radii s_k in [delta_inner, rho0]
    weights: np.ndarray  # quadrature weights w_k >= 0, sum = 1

    def __post_init__(self):
        if not 0 < self.delta_inner < self.rho0:
            raise InvalidProfileError(
                f"need 0 < delta_inner < rho0, got {self.delta_inner}, {self.rho0}"
            )
        n = np.asarray(self.nodes, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if n.shape != w.shape or n.ndim != 1 or n.size == 0:
            raise InvalidProfileError("nodes/weights must be matching 1-d arrays")
        if np.any(w < 0):
            raise InvalidProfileError("quadrature weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InvalidProfileError(f"weights must sum to 1, got {w.sum()!r}")
        if np.any(n < self.delta_inner - 1e-12) or np.any(n > self.rho0 + 1e-12):
            raise InvalidProfileError("quadrature nodes must lie in [delta_inner, rho0]")
        object.__setattr__(self, "nodes", _frozen(n))
        object.__setattr__(self, "weights", _frozen(w))

    def f(self, s):
        """The weight function itself (even, trapezoidal)."""
        s = np.abs(np.asarray(s, dtype=np.float64))
        c = self.plateau_height
        ramp = c * (self.rho0 - s) / (self.rho0 - self.delta_inner)
        return np.where(s <= self.delta_inner, c, np.clip(ramp, 0.0, c))

    def f_prime(self, s):
        """One-sided derivative of f for s >= 0 (piecewise constant)."""
        s = np.asarray(s, dtype=np.float64)
        slope = -self.plateau_height / (self.rho0 - self.delta_inner)
        inside = (s > self.delta_inner) & (s < self.rho0)
        return np.where(inside, slope, 0.0)


def make_trapezoid_profile(rho0: float, delta_inner: float, n_quad: int = 3) -> WeightProfile:
    """Trapezoidal profile: plateau on [0, delta_inner], affine down to 0 at rho0.

    The plateau height 1/(rho0 + delta_inner) normalizes the induced measure
    w(s) = -2 s f'(s) to total mass 1.  The quadrature is the midpoint rule
    on [delta_inner, rho0]; since w is linear there, the rule is exact and
    the final renormalization only removes float rounding.
    """
    if not 0 < delta_inner < rho0:
        raise InvalidProfileError(
            f"need 0 < delta_inner < rho0, got delta_inner={delta_inner}, rho0={rho0}"
        )
    if n_quad < 1:
        raise InvalidProfileError(f"n_quad must be >= 1, got {n_quad}")
    c = 1.0 / (rho0 + delta_inner)
    slope = -c / (rho0 - delta_inner)
    ds = (rho0 - delta_inner) / n_quad
    nodes = delta_inner + (np.arange(n_quad) + 0.5) * ds
    weights = (-2.0 * nodes * slope) * ds
    weights = weights / weights.sum()
    return WeightProfile(rho0, delta_inner, c, nodes, weights)


def window_at(grid: Grid2D, center: tuple[int, int], ball: DiscreteBall) -> list[tuple[int, int]]:
    """Cells of ``center + ball`` clipped to the grid rectangle.

    Never empty: the center itself is always a member.
    """
    ci, cj = center
    if not grid.contains(ci, cj):
        raise ValueError(f"center {center} outside {grid.width}x{grid.height} grid")
    out = []
    for di, dj in ball.offsets:
        i, j = ci + int(di), cj + int(dj)
        if grid.contains(i, j):
            out.append((i, j))
    return out


def quantize_levels(field: ScalarField, n_levels: int) -> np.ndarray:
    """Thresholds realizing the coarea decomposition of a field on a machine.

    Returns strictly increasing thresholds placed at midpoints between
    consecutive quantization values.  If the field has at most ``n_levels``
    distinct values those values are used directly (thresholding then
    reconstructs the field exactly); otherwise the values are n_levels
    uniformly spaced points spanning [min, max].

    A constant field has no interior levels: returns an empty array.
    """
    if n_levels < 2:
        raise ValueError(f"n_levels must be >= 2, got {n_levels}")
    vals = quantization_values(field, n_levels)
    if vals.size <= 1:
        return np.empty(0, dtype=np.float64)
    return 0.5 * (vals[1:] + vals[:-1])


def quantization_values(field: ScalarField, n_levels: int) -> np.ndarray:
    """The value ladder behind :func:`quantize_levels` (sorted, distinct)."""
    distinct = np.unique(field.values)
    if distinct.size <= n_levels:
        return distinct
    return np.linspace(field.min(), field.max(), n_levels)
