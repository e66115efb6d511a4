"""Best responses and Nash equilibria of the incentivized eco-driving game.

A driver's incentivized cost is convex and differentiable in her own level,
so her best response follows from the sign of the own-level derivative:
nonnegative at 0 pins the response to 0, nonpositive at 1 pins it to 1, and
otherwise bisection finds the interior stationary point. Equilibria are
computed by Gauss-Seidel iterated best response in ascending driver order,
which is deterministic by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    EcoProfile,
    IncentiveVector,
    Scenario,
    TypeProfile,
    ValidationError,
    _check_index,
    _check_theta_i,
    _check_u_i,
    _levels,
)

_MAX_BISECT = 200


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances shared by the equilibrium and audit routines."""

    tol_profile: float = 1e-6
    tol_deriv: float = 1e-8
    max_sweeps: int = 500
    grid_points: int = 101

    def __post_init__(self):
        if self.tol_profile <= 0 or self.tol_deriv <= 0:
            raise ValidationError("tolerances must be strictly positive")
        if self.max_sweeps <= 0 or self.grid_points <= 0:
            raise ValidationError("max_sweeps and grid_points must be positive")


DEFAULT_OPTIONS = SolverOptions()


@dataclass(frozen=True)
class NashResult:
    """Outcome of an equilibrium search.

    `residual` is the largest per-driver level change over the final sweep;
    `converged` means it fell at or below the requested profile tolerance.
    A non-converged result still carries the last iterate, which callers
    must treat as data rather than an error.
    """

    profile: EcoProfile
    converged: bool
    iterations: int
    residual: float


def _own_cost_deriv(
    scenario: Scenario, i: int, t: float, s_i: float, avg_i: float, theta_i: float, u_i: float
) -> float:
    # Derivative of the incentivized cost in the own level t, neighbors fixed.
    p = scenario.params[i]
    emis = theta_i * p.xbar * scenario.log_alpha[i] * p.alpha ** (t + s_i)
    conform = (1.0 - theta_i) * 2.0 * p.beta * (t - avg_i)
    return emis + conform - u_i


def _best_response(
    scenario: Scenario, i: int, levels: np.ndarray, theta_i: float, u_i: float, tol_deriv: float
) -> float:
    s_i = float(scenario._w_off[i] @ levels)
    avg_i = s_i / scenario._w_sum[i] if scenario._w_sum[i] > 0.0 else 0.0

    def g(t: float) -> float:
        return _own_cost_deriv(scenario, i, t, s_i, avg_i, theta_i, u_i)

    # Upper corner first: when the derivative is flat at zero this returns
    # the largest minimizer, the eco-favoring tie-break.
    if g(1.0) <= 0.0:
        return 1.0
    if g(0.0) >= 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    mid = 0.5
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) <= tol_deriv:
            return mid
        if gm < 0.0:
            lo = mid
        else:
            hi = mid
    return mid


def best_response(
    scenario: Scenario,
    i: int,
    a_others: EcoProfile,
    theta_i: float,
    u_i: float,
    opts: SolverOptions = DEFAULT_OPTIONS,
) -> float:
    """Cost-minimizing level for driver i against the other drivers' levels.

    Slot i of `a_others` is ignored (only neighbor levels enter the cost).
    """
    _check_index(scenario, i)
    theta_i = _check_theta_i(theta_i)
    u_i = _check_u_i(u_i)
    return _best_response(scenario, i, _levels(a_others), theta_i, u_i, opts.tol_deriv)


def nash_solve(
    scenario: Scenario,
    theta: TypeProfile,
    u: IncentiveVector,
    init: EcoProfile,
    opts: SolverOptions = DEFAULT_OPTIONS,
) -> NashResult:
    """Gauss-Seidel iterated best response from `init`.

    Sweeps drivers in ascending index; converged when the largest level
    change over a full sweep is at most `opts.tol_profile`. Exhausting
    `opts.max_sweeps` returns the last iterate with converged=False.
    """
    n = scenario.n
    if len(theta) != n or len(u) != n or len(init) != n:
        raise ValidationError("theta, u, and init must all have length n")
    levels = _levels(init).copy()
    residual = np.inf
    sweeps = 0
    for sweeps in range(1, opts.max_sweeps + 1):
        residual = 0.0
        for i in range(n):
            new = _best_response(scenario, i, levels, theta.theta[i], u.u[i], opts.tol_deriv)
            residual = max(residual, abs(new - levels[i]))
            levels[i] = new
        if residual <= opts.tol_profile:
            return NashResult(EcoProfile(levels), True, sweeps, residual)
    return NashResult(EcoProfile(levels), False, sweeps, residual)


def epsilon_nash_check(
    scenario: Scenario,
    theta: TypeProfile,
    u: IncentiveVector,
    a: EcoProfile,
    opts: SolverOptions = DEFAULT_OPTIONS,
) -> np.ndarray:
    """Largest unilateral grid improvement available to each driver.

    For every driver the own level is swept over an evenly spaced grid of
    `opts.grid_points` points on [0, 1]; the entry is the best cost decrease
    found, floored at 0. A profile is an epsilon-equilibrium when every
    entry is at most epsilon.
    """
    n = scenario.n
    if len(theta) != n or len(u) != n or len(a) != n:
        raise ValidationError("theta, u, and a must all have length n")
    levels = _levels(a)
    grid = np.linspace(0.0, 1.0, opts.grid_points)
    out = np.empty(n)
    for i in range(n):
        p = scenario.params[i]
        s_i = float(scenario._w_off[i] @ levels)
        avg_i = s_i / scenario._w_sum[i] if scenario._w_sum[i] > 0.0 else 0.0
        th, ui = theta.theta[i], u.u[i]

        def ell(t):
            x = p.xbar * p.alpha ** (t + s_i)
            y = p.beta * (t - avg_i) ** 2 + p.gamma * s_i + p.ybar
            return th * x + (1.0 - th) * y - ui * t

        out[i] = max(0.0, float(ell(levels[i]) - ell(grid).min()))
    return out
