"""Oscillation energies, their weighted variants, and the TV baseline.

The basic object is the window oscillation max - min.  Summing it over all
(clipped) ball windows and scaling by spacing^2/(2 rho) gives the discrete
single-radius energy; averaging that over the radii of a weight profile
gives the profile energy.  Both satisfy a coarea identity and are
submodular on binary sets, which is what makes the graph-cut proximal step
exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .grid import (
    BinarySet,
    DiscreteBall,
    Grid2D,
    ScalarField,
    WeightProfile,
    make_discrete_ball,
    quantization_values,
    quantize_levels,
)


@dataclass(frozen=True)
class EnergyConfig:
    """Which energy drives a flow: one radius, a profile, or the TV baseline."""

    kind: str  # "osc_single" | "osc_profile" | "tv"
    rho: Optional[float] = None
    profile: Optional[WeightProfile] = None

    def __post_init__(self):
        if self.kind == "osc_single":
            if self.rho is None or self.rho < 1:
                raise ValueError(f"osc_single needs rho >= 1, got {self.rho}")
        elif self.kind == "osc_profile":
            if self.profile is None:
                raise ValueError("osc_profile needs a WeightProfile")
        elif self.kind != "tv":
            raise ValueError(f"unknown energy kind {self.kind!r}")

    def balls_with_weights(self, spacing: float) -> list[tuple[DiscreteBall, float]]:
        """Per-window coefficients of the cut energy, spacing^2 included.

        osc_single contributes spacing^2/(2 rho) per window; a profile
        contributes w_k * spacing^2/(2 s_k) per window at each node s_k.
        """
        a = spacing * spacing
        if self.kind == "osc_single":
            return [(make_discrete_ball(self.rho), a / (2.0 * self.rho))]
        if self.kind == "osc_profile":
            p = self.profile
            return [
                (make_discrete_ball(float(s)), float(w) * a / (2.0 * float(s)))
                for s, w in zip(p.nodes, p.weights)
            ]
        raise ValueError("tv energy has no window decomposition")


def osc_window(field: ScalarField, window: list[tuple[int, int]]) -> float:
    """max - min of the field over a nonempty list of cells."""
    if not window:
        raise ValueError("window must be nonempty")
    vals = [field.values[j, i] for (i, j) in window]
    return float(max(vals) - min(vals))


@njit(cache=True, nogil=True)
def _osc_sum(values, offs_i, offs_j):
    """Sum over all cells of (max - min) on the clipped translated stencil."""
    h, w = values.shape
    k = offs_i.shape[0]
    total = 0.0
    for cj in range(h):
        for ci in range(w):
            lo = values[cj, ci]
            hi = lo
            for t in range(k):
                i = ci + offs_i[t]
                j = cj + offs_j[t]
                if 0 <= i < w and 0 <= j < h:
                    v = values[j, i]
                    if v < lo:
                        lo = v
                    elif v > hi:
                        hi = v
            total += hi - lo
    return total


@njit(cache=True, nogil=True)
def _mixed_window_count(mask, offs_i, offs_j):
    """Number of clipped windows containing both a 0 and a 1."""
    h, w = mask.shape
    k = offs_i.shape[0]
    count = 0
    for cj in range(h):
        for ci in range(w):
            saw0 = False
            saw1 = False
            for t in range(k):
                i = ci + offs_i[t]
                j = cj + offs_j[t]
                if 0 <= i < w and 0 <= j < h:
                    if mask[j, i] == 0:
                        saw0 = True
                    else:
                        saw1 = True
                    if saw0 and saw1:
                        count += 1
                        break
    return count


def _ball_columns(ball: DiscreteBall):
    o = ball.offsets
    return np.ascontiguousarray(o[:, 0]), np.ascontiguousarray(o[:, 1])


def osc_sum(field: ScalarField, rho: float) -> float:
    """Raw sum of window oscillations (no scaling); integer for integer fields."""
    ball = make_discrete_ball(rho)
    oi, oj = _ball_columns(ball)
    return float(_osc_sum(field.values, oi, oj))


def energy_osc(field: ScalarField, rho: float) -> float:
    """Discrete single-radius oscillation energy of a field.

    (spacing^2 / 2 rho) * sum over cells of the window oscillation, windows
    clipped at the border.  Zero iff the field is constant.
    """
    return float(field.grid.cell_area / (2.0 * rho) * osc_sum(field, rho))


def mixed_window_count(set_: BinarySet, rho: float) -> int:
    """Exact integer count of windows straddling the boundary of the set."""
    ball = make_discrete_ball(rho)
    oi, oj = _ball_columns(ball)
    return int(_mixed_window_count(set_.mask, oi, oj))


def energy_osc_binary(set_: BinarySet, rho: float) -> float:
    """Single-radius energy of a binary set: (1/2rho) * mixed-window count * cell area."""
    n = mixed_window_count(set_, rho)
    return float(set_.grid.cell_area / (2.0 * rho) * n)


def energy_profile(field: ScalarField, profile: WeightProfile) -> float:
    """Profile-weighted oscillation energy: sum_k w_k * energy_osc(field, s_k)."""
    return float(
        sum(
            float(w) * energy_osc(field, float(s))
            for s, w in zip(profile.nodes, profile.weights)
        )
    )


def energy_profile_binary(set_: BinarySet, profile: WeightProfile) -> float:
    return float(
        sum(
            float(w) * energy_osc_binary(set_, float(s))
            for s, w in zip(profile.nodes, profile.weights)
        )
    )


def energy_tv(field: ScalarField) -> float:
    """Discrete total variation: forward differences, isotropic magnitude.

    sum_ij sqrt(ux^2 + uy^2) * spacing with one-sided zero extension at the
    border.  One-homogeneous; equals the jump count for 1-d binary profiles.
    """
    v = field.values
    ux = np.zeros_like(v)
    uy = np.zeros_like(v)
    ux[:, :-1] = v[:, 1:] - v[:, :-1]
    uy[:-1, :] = v[1:, :] - v[:-1, :]
    return float(np.hypot(ux, uy).sum() * field.grid.spacing)


def energy_of(config: EnergyConfig, field_or_set) -> float:
    """Energy of a field or binary set under the configured functional."""
    if isinstance(field_or_set, BinarySet):
        if config.kind == "osc_single":
            return energy_osc_binary(field_or_set, config.rho)
        if config.kind == "osc_profile":
            return energy_profile_binary(field_or_set, config.profile)
        return energy_tv(field_or_set.to_field())
    if config.kind == "osc_single":
        return energy_osc(field_or_set, config.rho)
    if config.kind == "osc_profile":
        return energy_profile(field_or_set, config.profile)
    return energy_tv(field_or_set)


def coarea_decompose(field: ScalarField, rho: float, n_levels: Optional[int] = None):
    """Layer-cake decomposition of the oscillation energy.

    Returns (thresholds, per-level binary energies, level gaps) such that
    sum(gap_l * energy_l) equals energy_osc of the quantized field.  For a
    field already taking finitely many values (n_levels >= #distinct) the
    identity is exact.
    """
    if n_levels is None:
        n_levels = int(np.unique(field.values).size)
        n_levels = max(n_levels, 2)
    thresholds = quantize_levels(field, n_levels)
    vals = quantization_values(field, n_levels)
    gaps = np.diff(vals)
    energies = np.empty(thresholds.size, dtype=np.float64)
    for idx, t in enumerate(thresholds):
        level_set = BinarySet(field.grid, (field.values > t).astype(np.uint8))
        energies[idx] = energy_osc_binary(level_set, rho)
    return thresholds, energies, gaps
