"""Signed distance to the zero level set of a field, by fast marching.

The interface is located to sub-cell precision (linear interpolation along
sign-changing edges for fields, midpoints between differing neighbors for
binary masks); each side is then swept outward with the first-order upwind
Eikonal update ordered by a priority queue.  Ties break by (value, cell
index) so runs are deterministic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .grid import BinarySet, Grid2D, ScalarField

UNSET = np.inf


@dataclass(frozen=True)
class SignedDistanceField:
    """Distance to the recorded interface, negative inside, positive outside."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.grid.height, self.grid.width):
            raise ValueError("values shape does not match grid")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def to_field(self) -> ScalarField:
        return ScalarField(self.grid, self.values)

    @property
    def inside(self) -> np.ndarray:
        return self.values <= 0


def init_band(field: ScalarField) -> np.ndarray:
    """Seed distances next to the interface of ``field``.

    A grid edge carries the interface when its endpoints lie on different
    sides of {u <= 0}.  Both endpoints then receive the first-order
    sub-cell distance from linear interpolation of u along the edge; cells
    away from any interface stay at +inf.  Returns unsigned distances.
    """
    u = field.values
    h, w = u.shape
    sp = field.grid.spacing
    band = np.full((h, w), UNSET)
    inside = u <= 0.0

    def seed_pairs(ua, ub, ia, ib):
        # crossing fraction from a, in [0, 1]; ua, ub straddle zero
        t = ua / (ua - ub)
        da = np.abs(t) * sp
        db = np.abs(1.0 - t) * sp
        np.minimum.at(band, ia, da)
        np.minimum.at(band, ib, db)

    # horizontal edges
    cross = inside[:, :-1] != inside[:, 1:]
    if cross.any():
        jj, ii = np.nonzero(cross)
        seed_pairs(u[jj, ii], u[jj, ii + 1], (jj, ii), (jj, ii + 1))
    # vertical edges
    cross = inside[:-1, :] != inside[1:, :]
    if cross.any():
        jj, ii = np.nonzero(cross)
        seed_pairs(u[jj, ii], u[jj + 1, ii], (jj, ii), (jj + 1, ii))
    return band


def _mask_band(mask: np.ndarray, spacing: float) -> np.ndarray:
    """Seed band for a binary mask: interface at cell-boundary midpoints."""
    h, w = mask.shape
    band = np.full((h, w), UNSET)
    half = 0.5 * spacing
    diff = mask[:, :-1] != mask[:, 1:]
    jj, ii = np.nonzero(diff)
    np.minimum.at(band, (jj, ii), half)
    np.minimum.at(band, (jj, ii + 1), half)
    diff = mask[:-1, :] != mask[1:, :]
    jj, ii = np.nonzero(diff)
    np.minimum.at(band, (jj, ii), half)
    np.minimum.at(band, (jj + 1, ii), half)
    return band


def fast_march(band: np.ndarray, grid: Grid2D, domain: np.ndarray | None = None) -> np.ndarray:
    """Upwind first-order Eikonal solve outward from the seeded band.

    ``band`` holds seed values (+inf elsewhere); ``domain`` optionally
    restricts the march to a subset of cells (used to sweep each side of an
    interface separately).  Accepted values are verified to be
    nondecreasing, which is the defining monotonicity of the method.
    """
    h, w = band.shape
    if domain is None:
        domain = np.ones((h, w), dtype=bool)
    sp = grid.spacing
    dist = np.where(domain, band, UNSET)
    if not np.isfinite(dist).any():
        raise ValueError("empty band: nothing to march from")
    accepted = np.zeros((h, w), dtype=bool)

    heap = []
    jj, ii = np.nonzero(np.isfinite(dist))
    for j, i in zip(jj.tolist(), ii.tolist()):
        heapq.heappush(heap, (dist[j, i], j * w + i))

    def update(j, i):
        # one-dimensional minima of accepted neighbors per axis
        a = UNSET
        if i > 0 and accepted[j, i - 1]:
            a = dist[j, i - 1]
        if i + 1 < w and accepted[j, i + 1]:
            a = min(a, dist[j, i + 1])
        b = UNSET
        if j > 0 and accepted[j - 1, i]:
            b = dist[j - 1, i]
        if j + 1 < h and accepted[j + 1, i]:
            b = min(b, dist[j + 1, i])
        if a > b:
            a, b = b, a
        if not np.isfinite(a):
            return UNSET
        if b - a >= sp:
            return a + sp
        # two-sided quadratic: (d-a)^2 + (d-b)^2 = sp^2
        return 0.5 * (a + b + np.sqrt(2.0 * sp * sp - (a - b) ** 2))

    last = -UNSET
    while heap:
        d, flat = heapq.heappop(heap)
        j, i = divmod(flat, w)
        if accepted[j, i] or d > dist[j, i]:
            continue
        accepted[j, i] = True
        assert d >= last - 1e-12, "fast marching acceptance went backwards"
        last = d
        for dj, di in ((0, 1), (0, -1), (1, 0), (-1, 0)):
            nj, ni = j + dj, i + di
            if 0 <= ni < w and 0 <= nj < h and domain[nj, ni] and not accepted[nj, ni]:
                cand = update(nj, ni)
                # never overwrite a band seed with a larger sweep value
                if cand < dist[nj, ni]:
                    dist[nj, ni] = cand
                    heapq.heappush(heap, (cand, nj * w + ni))
    return dist


def signed_distance_field(field: ScalarField, cap: float | None = None) -> SignedDistanceField:
    """Signed distance to the zero level set of a field (negative in {u <= 0})."""
    u = field.values
    inside = u <= 0.0
    if cap is None:
        cap = field.grid.diameter
    if inside.all() or (~inside).all():
        vals = np.where(inside, -cap, cap)
        return SignedDistanceField(field.grid, vals)
    band = init_band(field)
    return _march_two_sided(field.grid, band, inside, cap)


def signed_distance(set_: BinarySet, cap: float | None = None) -> SignedDistanceField:
    """Signed distance to the boundary of a binary set.

    The interface sits at midpoints between differing neighbors, so a
    single-pixel set has distance -spacing/2 at its center.  Empty and full
    sets clamp to +/- cap (default: the grid diameter).
    """
    if cap is None:
        cap = set_.grid.diameter
    mask = set_.mask
    if set_.is_empty() or set_.is_full():
        vals = np.where(mask == 1, -cap, cap)
        return SignedDistanceField(set_.grid, vals)
    band = _mask_band(mask, set_.grid.spacing)
    return _march_two_sided(set_.grid, band, mask == 1, cap)


def _march_two_sided(grid: Grid2D, band: np.ndarray, inside: np.ndarray, cap: float) -> SignedDistanceField:
    vals = np.empty(band.shape)
    for side_inside in (True, False):
        dom = inside if side_inside else ~inside
        if not dom.any():
            continue
        d = fast_march(band, grid, domain=dom)
        d = np.minimum(d, cap)
        vals[dom] = -d[dom] if side_inside else d[dom]
    return SignedDistanceField(grid, vals)
