"""Analytic ground truth for the evolution of balls.

A ball of radius r shrinks with radial speed

    g(r) = integral of f'(s) * [(1 + s/r)^(d-1) - ((1 - s/r)^+)^(d-1)] ds,

always negative.  For r at or above the profile support (d = 2) the
bracket collapses to 2s/r and g(r) = -1/r exactly, which is the classical
curvature speed; the ODE then solves to r(t) = sqrt(r0^2 - 2t).  These
closed forms, plus the per-step stationarity equation of the proximal
problem on balls, are the quantitative acceptance backbone for the grid
scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import WeightProfile


@dataclass(frozen=True)
class BallODEConfig:
    r0: float
    profile: WeightProfile
    d: int = 2
    dt: float = 0.01

    def __post_init__(self):
        if not self.r0 > 0:
            raise ValueError(f"r0 must be positive, got {self.r0}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")


def ball_rhs(r: float, profile: WeightProfile, d: int = 2) -> float:
    """Radial speed g(r) < 0 of a shrinking ball, from the profile quadrature.

    Uses the stored weights: w_k = -2 s_k f'(s_k) ds, so
    f'(s_k) ds = -w_k / (2 s_k).
    """
    if not r > 0:
        raise ValueError(f"ball radius must be positive, got {r}")
    s = profile.nodes
    w = profile.weights
    bracket = (1.0 + s / r) ** (d - 1) - np.clip(1.0 - s / r, 0.0, None) ** (d - 1)
    return float(-(w / (2.0 * s) * bracket).sum())


def ball_ode_integrate(cfg: BallODEConfig):
    """RK4 trajectory of the ball radius down to extinction.

    Near extinction the step shrinks so the stiff tail stays resolved; the
    crossing time is located by linear interpolation of the final step.
    Returns (times, radii, extinction_time).
    """
    times = [0.0]
    radii = [cfg.r0]
    t = 0.0
    r = cfg.r0
    floor = 1e-9 * cfg.r0

    def g(x):
        return ball_rhs(max(x, floor), cfg.profile, cfg.d)

    while True:
        speed = abs(g(r))
        dt = min(cfg.dt, 0.1 * r / speed)
        k1 = g(r)
        k2 = g(max(r + 0.5 * dt * k1, floor))
        k3 = g(max(r + 0.5 * dt * k2, floor))
        k4 = g(max(r + dt * k3, floor))
        r_new = r + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if r_new <= floor or not np.isfinite(r_new):
            # linear interpolation of the crossing inside the final step
            t_star = t + dt * r / max(r - r_new, r)
            times.append(t_star)
            radii.append(0.0)
            return np.array(times), np.array(radii), float(t_star)
        t += dt
        r = r_new
        times.append(t)
        radii.append(r)


def extinction_time(r0: float, profile: WeightProfile, d: int = 2, dt: float = 0.001) -> float:
    _, _, t_star = ball_ode_integrate(BallODEConfig(r0, profile, d, dt))
    return t_star


def small_radius_speed_constant(profile: WeightProfile, d: int = 2, n_scan: int = 2000) -> float:
    """c with |g(r)| <= c * r^(1-d) for r <= 1, computed by scanning."""
    rs = np.linspace(1e-6, 1.0, n_scan)
    vals = np.array([abs(ball_rhs(float(r), profile, d)) * r ** (d - 1) for r in rs])
    return float(vals.max())


def extinction_lower_constant(profile: WeightProfile, d: int = 2) -> float:
    """c0 with T*(r0) >= c0 * r0^d for r0 <= 1.

    Comparing with dr/dt = -c r^(1-d) (whose extinction time is
    r0^d / (d c)) gives c0 = 1 / (d c).
    """
    c = small_radius_speed_constant(profile, d)
    return 1.0 / (d * c)


def proximal_ball_radius(R: float, h: float, profile: WeightProfile, d: int = 2) -> float:
    """Radius after one proximal step on a ball: solve (r - R)/h = g(r).

    The equation is the stationarity condition of the one-step energy
    e(r, R); its largest root on (0, R] is the local minimum (the smaller
    root, when present, is a local maximum).  Returns 0 when no root exists
    or when vanishing beats the stationary radius (extinction within the
    step).
    """
    if not (R > 0 and h > 0):
        raise ValueError("need R > 0 and h > 0")

    def phi(r):
        return (r - R) / h - ball_rhs(r, profile, d)

    # scan for the rightmost sign change; phi > 0 at both endpoints when a
    # root pair exists, negative between the two roots
    n_scan = 400
    rs = np.linspace(R / n_scan, R, n_scan)
    vals = np.array([phi(float(r)) for r in rs])
    neg = np.nonzero(vals < 0)[0]
    if neg.size == 0:
        return 0.0
    i = int(neg[-1])
    if i + 1 >= n_scan:
        # phi(R) = -g(R) > 0 always; can't happen for valid profiles
        return float(R)
    lo, hi = float(rs[i]), float(rs[i + 1])
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if phi(mid) < 0:
            lo = mid
        else:
            hi = mid
    r_star = 0.5 * (lo + hi)
    if proximal_step_energy(r_star, R, h, profile, d) >= proximal_step_energy(0.0, R, h, profile, d):
        return 0.0
    return r_star


def proximal_step_energy(r: float, R: float, h: float, profile: WeightProfile, d: int = 2) -> float:
    """One-step energy e(r, R) of candidate ball radius r from ball radius R.

    Profile energy of the r-ball plus (1/h) times the distance-weighted
    volume between the two balls.
    """
    s = profile.nodes
    w = profile.weights
    omega = _unit_ball_volume(d)
    # profile energy of B_r: -int f'(s) omega [(r+s)^d - ((r-s)^+)^d] ds
    surf = (w / (2.0 * s) * ((r + s) ** d - np.clip(r - s, 0.0, None) ** d)).sum()
    energy = omega * float(surf)
    # (d omega / h) * int_r^R (R - s) s^(d-1) ds, valid for r on either side of R
    fid = R * (R ** d - r ** d) / d - (R ** (d + 1) - r ** (d + 1)) / (d + 1)
    return energy + d * omega / h * float(fid)


def _unit_ball_volume(d: int) -> float:
    from math import gamma, pi

    return pi ** (d / 2) / gamma(d / 2 + 1)


def disk_energy_exact(R: float, rho: float) -> float:
    """Closed-form single-radius energy of a disk: the rho-annulus area over 2 rho."""
    if not (R > 0 and rho > 0):
        raise ValueError("need R > 0 and rho > 0")
    inner = max(R - rho, 0.0)
    return float(np.pi * ((R + rho) ** 2 - inner ** 2) / (2.0 * rho))


def iterate_proximal_radii(r0: float, h: float, profile: WeightProfile, d: int = 2,
                           n_steps: int | None = None, t_max: float | None = None):
    """Euler-style iteration of the per-step stationarity radii.

    Returns (times, radii); stops at extinction or after the horizon.
    """
    if n_steps is None:
        if t_max is None:
            raise ValueError("need n_steps or t_max")
        n_steps = int(np.ceil(t_max / h))
    times = [0.0]
    radii = [r0]
    r = r0
    for i in range(n_steps):
        r = proximal_ball_radius(r, h, profile, d)
        times.append((i + 1) * h)
        radii.append(r)
        if r == 0.0:
            break
    return np.array(times), np.array(radii)
