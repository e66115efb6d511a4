"""First-best and second-best incentive mechanisms.

Both mechanisms recommend the level profile minimizing total emissions over
the box [0, 1]^n subject to a budget cap on a sum of hinged own-level
gradients, then pay each driver the hinged gradient at the recommendation:

    first best   cap and pay  max(0, d c_i / d a_i)   (type-dependent)
    second best  cap and pay  max(0, d y_i / d a_i)   (type-independent)

The minimization runs projected-gradient descent on the box with an exterior
quadratic penalty on constraint violation. The hinge is smoothed by a
softplus whose sharpness grows over continuation rounds together with the
penalty weight; feasibility of the returned point is always certified with
the exact hinge, and an infeasible candidate is repaired by shrinking it
toward the origin (which is feasible for any nonnegative budget).

`local` style descends from the origin only; `global` style adds the
all-ones and midpoint starts plus five seeded uniform starts and keeps the
feasible candidate with the least objective.
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
    _levels,
    emissions,
    nominal_grads_own,
    total_emissions_grad,
    travel_time_grads_own,
)

FIRST_BEST = "first_best"
SECOND_BEST = "second_best"
MODES = (FIRST_BEST, SECOND_BEST)
STYLES = ("local", "global")

FEAS_TOL = 1e-6

# Continuation schedule: penalty weight and softplus sharpness both grow
# tenfold per round; the final round's hinge bias is below 1e-5 per driver.
PENALTY_ROUNDS = 5
PENALTY_START = 1.0
PENALTY_GROWTH = 10.0
SHARPNESS_START = 10.0
SHARPNESS_GROWTH = 10.0
STEP_START = 0.1
PG_TOL = 1e-7
MAX_ITERS_PER_ROUND = 10_000
REPAIR_STEPS = 60
DEFAULT_START_SEED = 0


class InfeasibleError(RuntimeError):
    """No feasible profile exists (the origin itself violates the budget)."""


@dataclass(frozen=True)
class SolverMeta:
    """Provenance of a mechanism outcome."""

    style: str
    starts: tuple[str, ...]
    best_start: str
    iterations: int
    repaired: bool

    def to_dict(self) -> dict:
        return {
            "style": self.style,
            "starts": ",".join(self.starts),
            "best_start": self.best_start,
            "iterations": self.iterations,
            "repaired": self.repaired,
        }


@dataclass(frozen=True)
class MechanismOutcome:
    """Recommendation, incentives, and certification data for one solve."""

    f: EcoProfile
    u: IncentiveVector
    objective: float
    constraint_value: float
    budget: float
    mode: str
    solver_meta: SolverMeta

    @property
    def total_incentive(self) -> float:
        return float(self.u.u.sum())


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def _theta_array(scenario: Scenario, theta, mode: str) -> np.ndarray | None:
    if mode == SECOND_BEST:
        return None
    if theta is None:
        raise ValidationError("first_best mode requires a type profile")
    arr = theta.theta if isinstance(theta, TypeProfile) else np.asarray(theta, dtype=float)
    if arr.size != scenario.n:
        raise ValidationError(f"theta has length {arr.size}, expected {scenario.n}")
    return arr


# --- constraint machinery -------------------------------------------------

def _hinge_args(scenario: Scenario, theta: np.ndarray | None, levels: np.ndarray, mode: str):
    """Per-driver own-level gradients whose positive parts are capped."""
    if mode == SECOND_BEST:
        return travel_time_grads_own(scenario, levels)
    return nominal_grads_own(scenario, theta, levels)


def _hinge_jac(scenario: Scenario, theta: np.ndarray | None, levels: np.ndarray, mode: str):
    """Jacobian of the hinge arguments with respect to the level vector."""
    conform = 2.0 * scenario.beta[:, None] * (np.eye(scenario.n) - scenario._avg_mat)
    if mode == SECOND_BEST:
        return conform
    expo = levels + scenario._w_off @ levels
    xg = scenario.xbar * scenario.log_alpha * np.exp(scenario.log_alpha * expo)
    return (theta * xg * scenario.log_alpha)[:, None] * scenario._exp_mat + (
        (1.0 - theta)[:, None] * conform
    )


def _exact_constraint(scenario, theta, levels, mode) -> float:
    g = _hinge_args(scenario, theta, levels, mode)
    return float(np.maximum(g, 0.0).sum())


def first_best_constraint(scenario: Scenario, theta: TypeProfile, a: EcoProfile) -> float:
    """Budget usage of a profile under the type-dependent hinge."""
    arr = _theta_array(scenario, theta, FIRST_BEST)
    return _exact_constraint(scenario, arr, _levels(a), FIRST_BEST)


def second_best_constraint(scenario: Scenario, a: EcoProfile) -> float:
    """Budget usage of a profile under the travel-time hinge."""
    return _exact_constraint(scenario, None, _levels(a), SECOND_BEST)


def first_best_incentive(scenario: Scenario, theta: TypeProfile, f: EcoProfile) -> IncentiveVector:
    """Hinged nominal-cost gradient at the recommendation.

    Drivers whose nominal cost is already decreasing at the recommendation
    get a zero rate; complying is in their own interest.
    """
    arr = _theta_array(scenario, theta, FIRST_BEST)
    g = _hinge_args(scenario, arr, _levels(f), FIRST_BEST)
    return IncentiveVector(np.maximum(g, 0.0))


def second_best_incentive(scenario: Scenario, f: EcoProfile) -> IncentiveVector:
    """Hinged travel-time gradient at the recommendation; type-independent."""
    g = _hinge_args(scenario, None, _levels(f), SECOND_BEST)
    return IncentiveVector(np.maximum(g, 0.0))


# --- penalized descent ----------------------------------------------------

def _pgd(value, grad, a: np.ndarray, max_iters: int) -> tuple[np.ndarray, int]:
    f = value(a)
    iters = 0
    stalled = 0
    eta0 = STEP_START
    while iters < max_iters:
        iters += 1
        g = grad(a)
        if np.linalg.norm(a - np.clip(a - g, 0.0, 1.0)) <= PG_TOL:
            break
        eta = eta0
        accepted = False
        while eta >= 1e-14:
            trial = np.clip(a - eta * g, 0.0, 1.0)
            ft = value(trial)
            if ft <= f + 1e-4 * float(g @ (trial - a)):
                # Progress below floating resolution for a few iterations in
                # a row means the iterate is numerically stationary.
                stalled = stalled + 1 if f - ft <= 1e-13 * (1.0 + abs(f)) else 0
                a, f = trial, ft
                accepted = True
                break
            eta *= 0.5
        if not accepted or stalled >= 3:
            break  # no further descent at floating precision
        # Reuse the accepted step as next trial scale (regrown, capped) so
        # stiff penalty rounds do not re-halve from scratch every iteration.
        eta0 = min(STEP_START, 4.0 * eta)
    return a, iters


def _descend(scenario, theta, budget, mode, start: np.ndarray) -> tuple[np.ndarray, int]:
    a = np.clip(np.asarray(start, dtype=float), 0.0, 1.0)
    n = scenario.n
    w_off = scenario._w_off
    avg_mat = scenario._avg_mat
    exp_mat = scenario._exp_mat
    log_a = scenario.log_alpha
    xbar = scenario.xbar
    beta2 = 2.0 * scenario.beta
    conform_jac = beta2[:, None] * (np.eye(n) - avg_mat)

    def hinge_parts(x):
        xv = xbar * np.exp(log_a * (x + w_off @ x))
        conform = beta2 * (x - avg_mat @ x)
        if mode == SECOND_BEST:
            return xv, conform
        return xv, theta * (log_a * xv) + (1.0 - theta) * conform

    total = 0
    for r in range(PENALTY_ROUNDS):
        rho = PENALTY_START * PENALTY_GROWTH**r
        sharp = SHARPNESS_START * SHARPNESS_GROWTH**r

        def value(x):
            xv, g = hinge_parts(x)
            viol = float(np.logaddexp(0.0, sharp * g).sum()) / sharp - budget
            return float(xv.sum()) + (rho * viol * viol if viol > 0.0 else 0.0)

        def grad(x):
            xv, g = hinge_parts(x)
            out = exp_mat.T @ (log_a * xv)
            viol = float(np.logaddexp(0.0, sharp * g).sum()) / sharp - budget
            if viol > 0.0:
                sig = np.exp(-np.logaddexp(0.0, -sharp * g))
                if mode == SECOND_BEST:
                    jac_t_sig = conform_jac.T @ sig
                else:
                    jac_t_sig = exp_mat.T @ (theta * log_a**2 * xv * sig) + conform_jac.T @ (
                        (1.0 - theta) * sig
                    )
                out = out + (2.0 * rho * viol) * jac_t_sig
            return out

        a, iters = _pgd(value, grad, a, MAX_ITERS_PER_ROUND)
        total += iters
    return a, total


def _repair(scenario, theta, budget, mode, levels: np.ndarray) -> np.ndarray:
    """Shrink an infeasible profile toward the origin until feasible.

    Bisection targets the exact budget boundary, not the certification
    tolerance, so repaired outcomes come back with nonnegative slack.
    """
    lo, hi = 0.0, 1.0
    for _ in range(REPAIR_STEPS):
        mid = 0.5 * (lo + hi)
        if _exact_constraint(scenario, theta, mid * levels, mode) <= budget:
            lo = mid
        else:
            hi = mid
    return lo * levels


def _starts(scenario: Scenario, solve_style: str, seed: int):
    n = scenario.n
    starts = [("zeros", np.zeros(n))]
    if solve_style == "global":
        starts.append(("ones", np.ones(n)))
        starts.append(("half", np.full(n, 0.5)))
        rng = np.random.Generator(np.random.PCG64(seed))
        for k in range(5):
            starts.append((f"uniform{k}", rng.uniform(0.0, 1.0, size=n)))
    return starts


def solve_mechanism(
    scenario: Scenario,
    theta: TypeProfile | None,
    budget: float,
    mode: str,
    solve_style: str = "local",
    start_seed: int = DEFAULT_START_SEED,
) -> MechanismOutcome:
    """Solve the budgeted emission-minimization program for one mechanism.

    `theta` is required for first_best and ignored entirely for second_best.
    Raises InfeasibleError only when the origin itself violates the budget,
    which cannot happen for this cost family but is kept for future ones.
    """
    _check_mode(mode)
    if solve_style not in STYLES:
        raise ValidationError(f"solve_style must be one of {STYLES}, got {solve_style!r}")
    if budget < 0.0:
        raise ValidationError(f"budget = {budget} must be >= 0")
    theta_arr = _theta_array(scenario, theta, mode)

    origin = np.zeros(scenario.n)
    if _exact_constraint(scenario, theta_arr, origin, mode) > budget + FEAS_TOL:
        raise InfeasibleError(
            f"budget {budget} infeasible even at the all-zeros profile ({mode})"
        )

    candidates = []
    start_list = _starts(scenario, solve_style, start_seed)
    for label, start in start_list:
        levels, iters = _descend(scenario, theta_arr, budget, mode, start)
        repaired = False
        if _exact_constraint(scenario, theta_arr, levels, mode) > budget + FEAS_TOL:
            levels = _repair(scenario, theta_arr, budget, mode, levels)
            repaired = True
        objective = float(emissions(scenario, levels).sum())
        candidates.append((objective, tuple(-levels), label, levels, iters, repaired))

    candidates.sort(key=lambda c: (c[0], c[1]))
    objective, _, label, levels, iters, repaired = candidates[0]

    f = EcoProfile(levels)
    if mode == FIRST_BEST:
        u = first_best_incentive(scenario, TypeProfile(theta_arr), f)
    else:
        u = second_best_incentive(scenario, f)
    meta = SolverMeta(
        style=solve_style,
        starts=tuple(label for label, _ in start_list),
        best_start=label,
        iterations=iters,
        repaired=repaired,
    )
    return MechanismOutcome(
        f=f,
        u=u,
        objective=objective,
        constraint_value=_exact_constraint(scenario, theta_arr, levels, mode),
        budget=float(budget),
        mode=mode,
        solver_meta=meta,
    )


# --- exhaustive oracle for small instances ---------------------------------

def _batch_hinge_args(scenario, theta, profiles: np.ndarray, mode: str) -> np.ndarray:
    avg = profiles @ scenario._avg_mat.T
    conform = 2.0 * scenario.beta * (profiles - avg)
    if mode == SECOND_BEST:
        return conform
    expo = profiles + profiles @ scenario._w_off.T
    xg = scenario.xbar * scenario.log_alpha * np.exp(scenario.log_alpha * expo)
    return theta * xg + (1.0 - theta) * conform


def brute_force_mechanism(
    scenario: Scenario,
    theta: TypeProfile | None,
    budget: float,
    mode: str,
    grid_step: float,
) -> MechanismOutcome:
    """Exhaustive box-grid scan; the validation oracle for small n.

    Ties in the objective break toward the lexicographically largest
    profile, matching the eco-favoring convention elsewhere.
    """
    _check_mode(mode)
    if budget < 0.0:
        raise ValidationError(f"budget = {budget} must be >= 0")
    if scenario.n > 3:
        raise ValidationError(f"brute force supports n <= 3, got n = {scenario.n}")
    steps = round(1.0 / grid_step)
    if steps < 1 or abs(steps * grid_step - 1.0) > 1e-9:
        raise ValidationError(f"grid_step = {grid_step} must divide 1 evenly")
    theta_arr = _theta_array(scenario, theta, mode)

    axis = np.linspace(0.0, 1.0, steps + 1)
    mesh = np.meshgrid(*([axis] * scenario.n), indexing="ij")
    profiles = np.stack([m.ravel() for m in mesh], axis=1)

    best = None  # (objective, neg-profile tuple, profile)
    for lo in range(0, profiles.shape[0], 200_000):
        block = profiles[lo : lo + 200_000]
        expo = block + block @ scenario._w_off.T
        obj = (scenario.xbar * np.exp(scenario.log_alpha * expo)).sum(axis=1)
        cons = np.maximum(_batch_hinge_args(scenario, theta_arr, block, mode), 0.0).sum(axis=1)
        feas = np.flatnonzero(cons <= budget + FEAS_TOL)
        if feas.size == 0:
            continue
        omin = obj[feas].min()
        ties = feas[obj[feas] == omin]
        keys = block[ties]
        order = np.lexsort(tuple(keys[:, k] for k in range(scenario.n - 1, -1, -1)))
        cand = keys[order[-1]]
        key = (float(omin), tuple(-cand))
        if best is None or key < (best[0], best[1]):
            best = (float(omin), tuple(-cand), cand.copy())

    if best is None:
        raise InfeasibleError(f"budget {budget} infeasible on the whole grid ({mode})")
    objective, _, levels = best

    f = EcoProfile(levels)
    if mode == FIRST_BEST:
        u = first_best_incentive(scenario, TypeProfile(theta_arr), f)
    else:
        u = second_best_incentive(scenario, f)
    meta = SolverMeta(
        style="brute_force",
        starts=(f"grid:{grid_step}",),
        best_start=f"grid:{grid_step}",
        iterations=profiles.shape[0],
        repaired=False,
    )
    return MechanismOutcome(
        f=f,
        u=u,
        objective=objective,
        constraint_value=_exact_constraint(scenario, theta_arr, levels, mode),
        budget=float(budget),
        mode=mode,
        solver_meta=meta,
    )
