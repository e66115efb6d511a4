"""Driver cost model for the eco-driving game.

Each driver i picks an eco-driving level a_i in [0, 1]. Drivers are coupled
through a weighted interaction matrix W: the neighbors of i are the drivers
j != i with w_ij > 0. Given a level profile a, driver i incurs

    emission        x_i(a) = xbar_i * alpha_i ** (a_i + s_i(a))
    travel time     y_i(a) = beta_i * (a_i - avg_i(a))**2 + gamma_i * s_i(a) + ybar_i

where s_i(a) is the weighted sum of neighbor levels and avg_i(a) the weighted
average (defined as 0 for drivers without neighbors, so a lone driver's travel
time grows as beta_i * a_i**2 above its floor). A driver of type theta_i
weighs the two into a nominal cost, and a per-unit incentive rate u_i turns
that into the incentivized cost she actually minimizes.

All evaluations are pure functions of immutable inputs; validation rejects
out-of-range values instead of clamping them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class ValidationError(ValueError):
    """An input violates a domain invariant (never silently corrected)."""


def _as_vector(values, name: str, n: int | None = None) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.size != n:
        raise ValidationError(f"{name} must have length {n}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def _check_unit_range(arr: np.ndarray, name: str) -> None:
    bad = np.flatnonzero((arr < 0.0) | (arr > 1.0))
    if bad.size:
        i = int(bad[0])
        raise ValidationError(f"{name}[{i}] = {arr[i]} is outside [0, 1]")


@dataclass(frozen=True)
class DriverParams:
    """Per-driver parameters of the emission and travel-time curves.

    alpha: emission decay base, in (0, 1); xbar: emission cost at the
    all-zeros profile; beta: conformity weight; gamma: neighborhood level
    weight; ybar: travel-time cost floor.
    """

    alpha: float
    beta: float
    gamma: float
    xbar: float
    ybar: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError(f"alpha = {self.alpha} must lie in (0, 1)")
        if self.beta < 0.0:
            raise ValidationError(f"beta = {self.beta} must be >= 0")
        if self.gamma < 0.0:
            raise ValidationError(f"gamma = {self.gamma} must be >= 0")
        if self.xbar <= 0.0:
            raise ValidationError(f"xbar = {self.xbar} must be > 0")
        if self.ybar <= 0.0:
            raise ValidationError(f"ybar = {self.ybar} must be > 0")


class Scenario:
    """A game instance: interaction weights plus per-driver parameters.

    The diagonal of `weights` must be exactly 1 (self-interaction
    convention); it never enters the neighbor sums, which run over the
    off-diagonal positive entries only.
    """

    def __init__(self, weights, params: Sequence[DriverParams]):
        W = np.array(weights, dtype=float)
        params = tuple(params)
        n = len(params)
        if W.shape != (n, n):
            raise ValidationError(
                f"weights must be {n}x{n} to match {n} driver params, got {W.shape}"
            )
        if not np.all(np.isfinite(W)):
            raise ValidationError("weights contains non-finite entries")
        diag = np.diagonal(W)
        if not np.all(diag == 1.0):
            i = int(np.flatnonzero(diag != 1.0)[0])
            raise ValidationError(f"weights diagonal must equal 1, got {diag[i]} at [{i},{i}]")
        off = W[~np.eye(n, dtype=bool)]
        if off.size and (off.min() < 0.0 or off.max() > 1.0):
            raise ValidationError("off-diagonal weights must lie in [0, 1]")

        self.n = n
        self.weights = W
        self.params = params
        self.alpha = np.array([p.alpha for p in params])
        self.beta = np.array([p.beta for p in params])
        self.gamma = np.array([p.gamma for p in params])
        self.xbar = np.array([p.xbar for p in params])
        self.ybar = np.array([p.ybar for p in params])
        self.log_alpha = np.log(self.alpha)

        # Derived coupling structure. _w_off zeroes the diagonal, so dot
        # products against it realize sums over the neighbor set; _avg_mat
        # rows are zero for drivers without neighbors (average := 0).
        self._w_off = W.copy()
        np.fill_diagonal(self._w_off, 0.0)
        self._w_sum = self._w_off.sum(axis=1)
        self._avg_mat = np.divide(
            self._w_off,
            self._w_sum[:, None],
            out=np.zeros_like(self._w_off),
            where=self._w_sum[:, None] > 0.0,
        )
        # d(exponent_i)/d(a_k): own level plus weighted neighbor levels.
        self._exp_mat = self._w_off + np.eye(n)

        for arr in (
            self.weights, self.alpha, self.beta, self.gamma, self.xbar,
            self.ybar, self.log_alpha, self._w_off, self._w_sum,
            self._avg_mat, self._exp_mat,
        ):
            arr.setflags(write=False)

    def neighbors(self, i: int) -> np.ndarray:
        """Indices of the drivers whose levels enter driver i's costs."""
        _check_index(self, i)
        return np.flatnonzero(self._w_off[i] > 0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scenario):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.weights, other.weights)

    def __repr__(self) -> str:
        return f"Scenario(n={self.n})"


@dataclass(frozen=True)
class EcoProfile:
    """A full vector of eco-driving levels, each in [0, 1]."""

    a: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.a, "a")
        _check_unit_range(arr, "a")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)

    def __len__(self) -> int:
        return self.a.size


@dataclass(frozen=True)
class TypeProfile:
    """A full vector of driver types, each in [0, 1]."""

    theta: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.theta, "theta")
        _check_unit_range(arr, "theta")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "theta", arr)

    def __len__(self) -> int:
        return self.theta.size


@dataclass(frozen=True)
class IncentiveVector:
    """Per-driver incentive rates, each >= 0."""

    u: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.u, "u")
        bad = np.flatnonzero(arr < 0.0)
        if bad.size:
            i = int(bad[0])
            raise ValidationError(f"u[{i}] = {arr[i]} must be >= 0")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "u", arr)

    def __len__(self) -> int:
        return self.u.size

    @classmethod
    def zeros(cls, n: int) -> "IncentiveVector":
        return cls(np.zeros(n))


def _check_index(scenario: Scenario, i: int) -> None:
    if not 0 <= i < scenario.n:
        raise IndexError(f"driver index {i} out of range for n={scenario.n}")


def _check_theta_i(theta_i: float) -> float:
    if not 0.0 <= theta_i <= 1.0:
        raise ValidationError(f"theta_i = {theta_i} is outside [0, 1]")
    return float(theta_i)


def _check_u_i(u_i: float) -> float:
    if u_i < 0.0:
        raise ValidationError(f"u_i = {u_i} must be >= 0")
    return float(u_i)


def _levels(a) -> np.ndarray:
    return a.a if isinstance(a, EcoProfile) else np.asarray(a, dtype=float)


# --- vectorized evaluations over all drivers (levels: raw array) ---

def neighbor_sums(scenario: Scenario, levels: np.ndarray) -> np.ndarray:
    """Weighted sums of neighbor levels, s_i = sum_j w_ij * a_j over j != i."""
    return scenario._w_off @ levels


def neighbor_avgs(scenario: Scenario, levels: np.ndarray) -> np.ndarray:
    """Weighted averages of neighbor levels; 0 for drivers without neighbors."""
    return scenario._avg_mat @ levels


def emissions(scenario: Scenario, levels: np.ndarray) -> np.ndarray:
    expo = levels + neighbor_sums(scenario, levels)
    return scenario.xbar * np.exp(scenario.log_alpha * expo)


def travel_times(scenario: Scenario, levels: np.ndarray) -> np.ndarray:
    s = neighbor_sums(scenario, levels)
    avg = scenario._avg_mat @ levels
    return scenario.beta * (levels - avg) ** 2 + scenario.gamma * s + scenario.ybar


def emission_grads_own(scenario: Scenario, levels: np.ndarray) -> np.ndarray:
    """d x_i / d a_i for every driver; always <= 0."""
    return scenario.log_alpha * emissions(scenario, levels)


def travel_time_grads_own(scenario: Scenario, levels: np.ndarray) -> np.ndarray:
    """d y_i / d a_i for every driver; vanishes at consensus profiles."""
    avg = scenario._avg_mat @ levels
    return 2.0 * scenario.beta * (levels - avg)


def nominal_grads_own(scenario: Scenario, theta: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """d c_i / d a_i for every driver at type profile theta."""
    return theta * emission_grads_own(scenario, levels) + (1.0 - theta) * travel_time_grads_own(
        scenario, levels
    )


def total_emissions_grad(scenario: Scenario, levels: np.ndarray) -> np.ndarray:
    """Gradient of sum_i x_i(a) with respect to the full level vector."""
    x = emissions(scenario, levels)
    return scenario._exp_mat.T @ (scenario.log_alpha * x)


# --- single-driver operations (profiles are validated EcoProfile values) ---

def neighbor_avg(scenario: Scenario, i: int, a: EcoProfile) -> float:
    """Weighted average of driver i's neighbor levels (0 without neighbors)."""
    _check_index(scenario, i)
    return float(scenario._avg_mat[i] @ _levels(a))


def emission(scenario: Scenario, i: int, a: EcoProfile) -> float:
    _check_index(scenario, i)
    levels = _levels(a)
    expo = levels[i] + scenario._w_off[i] @ levels
    return float(scenario.xbar[i] * scenario.alpha[i] ** expo)


def travel_time(scenario: Scenario, i: int, a: EcoProfile) -> float:
    _check_index(scenario, i)
    levels = _levels(a)
    s = scenario._w_off[i] @ levels
    avg = scenario._avg_mat[i] @ levels
    p = scenario.params[i]
    return float(p.beta * (levels[i] - avg) ** 2 + p.gamma * s + p.ybar)


def emission_grad_own(scenario: Scenario, i: int, a: EcoProfile) -> float:
    _check_index(scenario, i)
    return float(scenario.log_alpha[i] * emission(scenario, i, a))


def travel_time_grad_own(scenario: Scenario, i: int, a: EcoProfile) -> float:
    _check_index(scenario, i)
    levels = _levels(a)
    avg = scenario._avg_mat[i] @ levels
    return float(2.0 * scenario.beta[i] * (levels[i] - avg))


def nominal_cost(scenario: Scenario, i: int, a: EcoProfile, theta_i: float) -> float:
    """Type-weighted combination of emission and travel-time costs."""
    theta_i = _check_theta_i(theta_i)
    return theta_i * emission(scenario, i, a) + (1.0 - theta_i) * travel_time(scenario, i, a)


def nominal_cost_grad_own(scenario: Scenario, i: int, a: EcoProfile, theta_i: float) -> float:
    theta_i = _check_theta_i(theta_i)
    return theta_i * emission_grad_own(scenario, i, a) + (1.0 - theta_i) * travel_time_grad_own(
        scenario, i, a
    )


def incentivized_cost(
    scenario: Scenario, i: int, a: EcoProfile, theta_i: float, u_i: float
) -> float:
    """Nominal cost minus the incentive payment u_i * a_i."""
    u_i = _check_u_i(u_i)
    return nominal_cost(scenario, i, a, theta_i) - u_i * _levels(a)[i]


def total_emissions(scenario: Scenario, a: EcoProfile) -> float:
    """Network objective: the sum of all drivers' emission costs."""
    levels = _levels(a)
    if levels.size != scenario.n:
        raise ValidationError(f"profile has length {levels.size}, expected {scenario.n}")
    return float(emissions(scenario, levels).sum())
