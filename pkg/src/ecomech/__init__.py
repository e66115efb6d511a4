"""Eco-driving incentive mechanisms: cost models, equilibria, and audits."""

from .audit import (
    IcReport,
    MisreportRow,
    ObedienceReport,
    budget_check,
    ic_derivative_check,
    misreport_sweep,
    obedience_definition_check,
    obedience_margin,
)
from .equilibrium import (
    NashResult,
    SolverOptions,
    best_response,
    epsilon_nash_check,
    nash_solve,
)
from .mechanism import (
    FIRST_BEST,
    SECOND_BEST,
    InfeasibleError,
    MechanismOutcome,
    SolverMeta,
    brute_force_mechanism,
    first_best_constraint,
    first_best_incentive,
    second_best_constraint,
    second_best_incentive,
    solve_mechanism,
)
from .model import (
    DriverParams,
    EcoProfile,
    IncentiveVector,
    Scenario,
    TypeProfile,
    ValidationError,
    emission,
    emission_grad_own,
    incentivized_cost,
    neighbor_avg,
    nominal_cost,
    nominal_cost_grad_own,
    total_emissions,
    travel_time,
    travel_time_grad_own,
)
from .scenarios import GenerationSpec, ScenarioFormatError, generate, load, save

__version__ = "0.1.0"

__all__ = [
    "DriverParams",
    "EcoProfile",
    "FIRST_BEST",
    "GenerationSpec",
    "IcReport",
    "IncentiveVector",
    "InfeasibleError",
    "MechanismOutcome",
    "MisreportRow",
    "NashResult",
    "ObedienceReport",
    "SECOND_BEST",
    "Scenario",
    "ScenarioFormatError",
    "SolverMeta",
    "SolverOptions",
    "TypeProfile",
    "ValidationError",
    "best_response",
    "brute_force_mechanism",
    "budget_check",
    "emission",
    "emission_grad_own",
    "epsilon_nash_check",
    "first_best_constraint",
    "first_best_incentive",
    "generate",
    "ic_derivative_check",
    "incentivized_cost",
    "load",
    "misreport_sweep",
    "nash_solve",
    "neighbor_avg",
    "nominal_cost",
    "nominal_cost_grad_own",
    "obedience_definition_check",
    "obedience_margin",
    "save",
    "second_best_constraint",
    "second_best_incentive",
    "solve_mechanism",
    "total_emissions",
    "travel_time",
    "travel_time_grad_own",
]
