"""Non-local curvature flow by oscillation energies.

Graph-cut proximal steps, fast-marching redistancing, analytic ball
oracles, and pointwise curvature/Hamiltonian evaluators on a 2-d grid.
"""

__version__ = "0.1.0"

from .grid import (
    BinarySet,
    BoundaryMode,
    DiscreteBall,
    Grid2D,
    InvalidProfileError,
    InvalidRadiusError,
    ScalarField,
    WeightProfile,
    make_discrete_ball,
    make_trapezoid_profile,
    quantize_levels,
    window_at,
)
from .energy import (
    EnergyConfig,
    coarea_decompose,
    energy_osc,
    energy_osc_binary,
    energy_profile,
    energy_tv,
    osc_window,
)
from .maxflow import (
    CutGraph,
    CutSolution,
    InvalidEnergyError,
    brute_force_binary_min,
    build_binary_osc_graph,
    build_binary_tv_graph,
    solve_min_cut,
)
