"""Obedience and incentive-compatibility audits.

Obedience of a mechanism (f, u) means each driver, facing the others at
their recommended levels, never gains by choosing a level below her own
recommendation. Two interchangeable checkers are provided: a direct grid
verification of that cost inequality, and a rate form comparing the
incentive against the type-weighted difference quotients of emission and
travel time over the same grid. Their verdicts agree by construction.

Incentive compatibility is audited three ways, because the rate condition
for it admits two readings: a frozen-mechanism derivative check (the
mechanism outcome held fixed while the true type varies), a through-
mechanism derivative check (report and true type varied together), and an
empirical sweep of the reported type that also records concavity defects
and the cost-minimizing report. Reports are data: failed checks return
margins and witnesses, they never raise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import DEFAULT_OPTIONS, SolverOptions, _best_response
from .mechanism import InfeasibleError, solve_mechanism
from .model import (
    EcoProfile,
    IncentiveVector,
    Scenario,
    TypeProfile,
    ValidationError,
    _check_index,
    _levels,
    emission,
    travel_time,
)

PASS_TOL = 1e-6
IC_GRID_POINTS = 11


@dataclass(frozen=True)
class ObedienceReport:
    """Per-driver obedience margins with the grid points attaining them.

    A margin is the incentive minus the largest type-weighted rate at which
    the driver could trade recommendation shortfall for cost; drivers with a
    zero recommendation have nothing to undercut and report +inf. The
    witness entry is NaN for those drivers.
    """

    per_driver_margin: np.ndarray
    witness: np.ndarray
    passed: bool


@dataclass(frozen=True)
class MisreportRow:
    """One reported-type sample of a misreport sweep for a single driver."""

    theta_hat: float
    f_i: float
    u_i: float
    a_opt: float
    ell_at_a_opt: float
    ell_at_f: float
    obedient: bool
    solved: bool = True


@dataclass(frozen=True)
class IcReport:
    """Incentive-compatibility diagnostics for every driver.

    frozen_residual: derivative defect with the mechanism outcome frozen.
    total_residual: derivative defect with report and true type tied.
    concavity_defect: largest positive second difference of the reported-
    type cost map (nonpositive values mean the map is concave on the grid).
    min_theta_hat / empirical_ic: grid minimizer of that map and whether
    truthful reporting attains the grid minimum.
    """

    frozen_residual: np.ndarray
    total_residual: np.ndarray
    concavity_defect: np.ndarray
    min_theta_hat: np.ndarray
    empirical_ic: np.ndarray
    h: float
    theta_hat_grid: np.ndarray

    @property
    def concave_ok(self) -> np.ndarray:
        return self.concavity_defect <= PASS_TOL


def _check_lengths(scenario: Scenario, **vectors) -> None:
    for name, v in vectors.items():
        if len(v) != scenario.n:
            raise ValidationError(f"{name} has length {len(v)}, expected {scenario.n}")


def _cost_terms(scenario: Scenario, i: int, own, base_levels: np.ndarray):
    """Emission and travel-time costs for driver i at own level(s) `own`,
    the rest of the profile fixed at base_levels (slot i unused)."""
    p = scenario.params[i]
    s = float(scenario._w_off[i] @ base_levels)
    avg = s / scenario._w_sum[i] if scenario._w_sum[i] > 0.0 else 0.0
    x = p.xbar * p.alpha ** (own + s)
    y = p.beta * (own - avg) ** 2 + p.gamma * s + p.ybar
    return x, y


def obedience_margin(
    scenario: Scenario,
    theta: TypeProfile,
    f: EcoProfile,
    u: IncentiveVector,
    opts: SolverOptions = DEFAULT_OPTIONS,
) -> ObedienceReport:
    """Rate-form obedience check over a grid of undercutting levels."""
    _check_lengths(scenario, theta=theta, f=f, u=u)
    fl = _levels(f)
    margins = np.empty(scenario.n)
    witness = np.full(scenario.n, math.nan)
    for i in range(scenario.n):
        if fl[i] == 0.0:
            margins[i] = math.inf
            continue
        grid = np.linspace(0.0, fl[i], opts.grid_points, endpoint=False)
        x_g, y_g = _cost_terms(scenario, i, grid, fl)
        x_f, y_f = _cost_terms(scenario, i, fl[i], fl)
        gap = fl[i] - grid
        xi = (x_f - x_g) / gap
        tau = (y_f - y_g) / gap
        rhs = theta.theta[i] * xi + (1.0 - theta.theta[i]) * tau
        k = int(np.argmax(rhs))
        margins[i] = u.u[i] - rhs[k]
        witness[i] = grid[k]
    return ObedienceReport(margins, witness, bool(np.all(margins >= -PASS_TOL)))


def obedience_definition_check(
    scenario: Scenario,
    theta: TypeProfile,
    f: EcoProfile,
    u: IncentiveVector,
    opts: SolverOptions = DEFAULT_OPTIONS,
) -> np.ndarray:
    """Direct grid verification that no driver gains by undercutting.

    The inequality is allowed the same rate slack as the margin check
    (scaled by the undercut distance) so the two verdicts coincide.
    """
    _check_lengths(scenario, theta=theta, f=f, u=u)
    fl = _levels(f)
    out = np.empty(scenario.n, dtype=bool)
    for i in range(scenario.n):
        if fl[i] == 0.0:
            out[i] = True
            continue
        grid = np.linspace(0.0, fl[i], opts.grid_points, endpoint=False)
        x_g, y_g = _cost_terms(scenario, i, grid, fl)
        x_f, y_f = _cost_terms(scenario, i, fl[i], fl)
        th, ui = theta.theta[i], u.u[i]
        ell_f = th * x_f + (1.0 - th) * y_f - ui * fl[i]
        ell_g = th * x_g + (1.0 - th) * y_g - ui * grid
        out[i] = bool(np.all(ell_f <= ell_g + PASS_TOL * (fl[i] - grid)))
    return out


def misreport_sweep(
    scenario: Scenario,
    theta: TypeProfile,
    i: int,
    theta_hat_grid,
    mode: str,
    budget: float,
    solve_style: str = "local",
    opts: SolverOptions = DEFAULT_OPTIONS,
) -> list[MisreportRow]:
    """Mechanism response to driver i misreporting her type.

    For each reported value the mechanism is re-solved with the remaining
    types truthful, then the driver best-responds to the others held at
    their recommendations, under her true type and the incentive assigned
    to her report. Solver failures mark the row instead of aborting.
    """
    _check_index(scenario, i)
    _check_lengths(scenario, theta=theta)
    grid = np.asarray(theta_hat_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("theta_hat_grid must be a non-empty vector")
    if grid.min() < 0.0 or grid.max() > 1.0:
        raise ValidationError("theta_hat_grid values must lie in [0, 1]")

    theta_true_i = float(theta.theta[i])
    rows: list[MisreportRow] = []
    for th_hat in grid:
        reported = theta.theta.copy()
        reported[i] = th_hat
        try:
            outcome = solve_mechanism(
                scenario, TypeProfile(reported), budget, mode, solve_style
            )
        except InfeasibleError:
            rows.append(
                MisreportRow(float(th_hat), math.nan, math.nan, math.nan,
                             math.nan, math.nan, False, solved=False)
            )
            continue
        fl = _levels(outcome.f)
        u_i = float(outcome.u.u[i])
        a_opt = _best_response(scenario, i, fl, theta_true_i, u_i, opts.tol_deriv)
        x_o, y_o = _cost_terms(scenario, i, a_opt, fl)
        x_f, y_f = _cost_terms(scenario, i, fl[i], fl)
        ell_opt = theta_true_i * x_o + (1.0 - theta_true_i) * y_o - u_i * a_opt
        ell_f = theta_true_i * x_f + (1.0 - theta_true_i) * y_f - u_i * fl[i]
        rows.append(
            MisreportRow(
                theta_hat=float(th_hat),
                f_i=float(fl[i]),
                u_i=u_i,
                a_opt=float(a_opt),
                ell_at_a_opt=float(ell_opt),
                ell_at_f=float(ell_f),
                obedient=bool(a_opt >= fl[i] - PASS_TOL),
            )
        )
    return rows


def _ell_at_outcome(scenario: Scenario, i: int, outcome, theta_i: float) -> float:
    fl = _levels(outcome.f)
    x_f, y_f = _cost_terms(scenario, i, fl[i], fl)
    return theta_i * x_f + (1.0 - theta_i) * y_f - float(outcome.u.u[i]) * fl[i]


def ic_derivative_check(
    scenario: Scenario,
    theta: TypeProfile,
    mode: str,
    budget: float,
    solve_style: str = "local",
    h: float = 1e-3,
) -> IcReport:
    """Derivative and sweep diagnostics of incentive compatibility."""
    _check_lengths(scenario, theta=theta)
    if h <= 0.0:
        raise ValidationError(f"h = {h} must be > 0")
    for i in range(scenario.n):
        if not h < theta.theta[i] < 1.0 - h:
            raise ValidationError(
                f"theta[{i}] = {theta.theta[i]} too close to the boundary for h = {h}"
            )

    base = solve_mechanism(scenario, theta, budget, mode, solve_style)
    fl = base.f
    n = scenario.n
    grid = np.linspace(0.0, 1.0, IC_GRID_POINTS)

    frozen = np.empty(n)
    total = np.empty(n)
    defect = np.empty(n)
    min_th = np.empty(n)
    empirical = np.empty(n, dtype=bool)
    for i in range(n):
        th_i = float(theta.theta[i])
        x_f = emission(scenario, i, fl)
        y_f = travel_time(scenario, i, fl)
        slope = x_f - y_f

        # Frozen mechanism: vary the true type only.
        ell_plus = _frozen_ell(x_f, y_f, base, i, th_i + h)
        ell_minus = _frozen_ell(x_f, y_f, base, i, th_i - h)
        frozen[i] = abs((ell_plus - ell_minus) / (2.0 * h) - slope)

        # Through the mechanism: report and true type move together.
        psi = []
        for t in (th_i - h, th_i + h):
            reported = theta.theta.copy()
            reported[i] = t
            out_t = solve_mechanism(scenario, TypeProfile(reported), budget, mode, solve_style)
            psi.append(_ell_at_outcome(scenario, i, out_t, t))
        total[i] = abs((psi[1] - psi[0]) / (2.0 * h) - slope)

        # Reported-type sweep with the true type fixed.
        phi = np.empty(grid.size)
        for k, t in enumerate(grid):
            reported = theta.theta.copy()
            reported[i] = t
            out_t = solve_mechanism(scenario, TypeProfile(reported), budget, mode, solve_style)
            phi[k] = _ell_at_outcome(scenario, i, out_t, th_i)
        second = phi[2:] - 2.0 * phi[1:-1] + phi[:-2]
        defect[i] = float(second.max()) if second.size else 0.0
        min_th[i] = grid[int(np.argmin(phi))]
        truthful = _ell_at_outcome(scenario, i, base, th_i)
        empirical[i] = bool(truthful <= phi.min() + 1e-9)

    return IcReport(
        frozen_residual=frozen,
        total_residual=total,
        concavity_defect=defect,
        min_theta_hat=min_th,
        empirical_ic=empirical,
        h=h,
        theta_hat_grid=grid,
    )


def _frozen_ell(x_f: float, y_f: float, outcome, i: int, t: float) -> float:
    return t * x_f + (1.0 - t) * y_f - float(outcome.u.u[i]) * float(outcome.f.a[i])


def budget_check(u: IncentiveVector, budget: float) -> float:
    """Slack of the budget constraint; nonnegative (to tolerance) passes."""
    return float(budget - u.u.sum())
