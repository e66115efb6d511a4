"""Command-line orchestration and CSV emission.

Subcommands: generate | solve | budget-sweep | misreport | audit. Every
table goes out as CSV with '#'-prefixed key=value metadata lines above the
header, reals printed with 12 significant digits, and booleans as
true/false. Column names and order are stable; downstream renderers key by
name.

Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 solver
infeasibility, 5 audit failure under --strict.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .audit import (
    PASS_TOL,
    budget_check,
    ic_derivative_check,
    misreport_sweep,
    obedience_definition_check,
    obedience_margin,
)
from .equilibrium import DEFAULT_OPTIONS
from .mechanism import FIRST_BEST, SECOND_BEST, InfeasibleError, solve_mechanism
from .model import TypeProfile, ValidationError
from .scenarios import GenerationSpec, ScenarioFormatError, generate, load, save

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_INFEASIBLE = 4
EXIT_AUDIT = 5

_MODE_FLAGS = {"first-best": FIRST_BEST, "second-best": SECOND_BEST}
_MODE_NAMES = {v: k for k, v in _MODE_FLAGS.items()}
FULL_COMPLIANCE_TOL = 1e-6


@dataclass
class SweepTable:
    """Row-oriented experiment output with reproducibility metadata."""

    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def append(self, **cells) -> None:
        missing = set(self.columns) - set(cells)
        extra = set(cells) - set(self.columns)
        if missing or extra:
            raise ValidationError(f"row does not match columns (missing {missing}, extra {extra})")
        self.rows.append(cells)

    def write(self, path) -> None:
        lines = [f"# {k}={_cell(v)}" for k, v in self.metadata.items()]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_cell(row[c]) for c in self.columns))
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")


def _cell(v) -> str:
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(float(v), ".12g")
    return str(v)


def _base_metadata(args, **extra) -> dict:
    md = {"artifact_version": __version__, "csv_schema": 1}
    if getattr(args, "seed", None) is not None:
        md["seed"] = args.seed
    md.update(extra)
    md["tol_profile"] = DEFAULT_OPTIONS.tol_profile
    md["tol_deriv"] = DEFAULT_OPTIONS.tol_deriv
    md["grid_points"] = DEFAULT_OPTIONS.grid_points
    return md


def _parse_grid(text: str, name: str) -> np.ndarray:
    """Parse either 'lo:hi:count' or a comma-separated list of values."""
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            values = np.linspace(float(lo), float(hi), int(count))
        else:
            values = np.array([float(tok) for tok in text.split(",") if tok != ""])
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} grid {text!r} is not 'lo:hi:count' or 'v1,v2,...'") from exc
    if values.size == 0:
        raise ValidationError(f"{name} grid {text!r} is empty")
    return values


def _load_scenario(path):
    try:
        return load(path)
    except OSError as exc:
        raise _IoFailure(f"cannot read scenario {path}: {exc}") from exc


class _IoFailure(RuntimeError):
    pass


def _full_compliance(f_levels: np.ndarray) -> bool:
    return bool(f_levels.min() >= 1.0 - FULL_COMPLIANCE_TOL)


# --- subcommands ------------------------------------------------------------

def cmd_generate(args) -> int:
    spec = GenerationSpec(n=args.n, seed=args.seed, zero_prob=args.zero_prob)
    scenario, theta = generate(spec)
    try:
        save(scenario, theta, args.out)
    except OSError as exc:
        raise _IoFailure(f"cannot write {args.out}: {exc}") from exc
    print(f"wrote scenario n={scenario.n} seed={args.seed} to {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    scenario, theta = _load_scenario(args.scenario)
    mode = _MODE_FLAGS[args.mode]
    outcome = solve_mechanism(scenario, theta, args.budget, mode, args.style)
    n = scenario.n
    columns = ["mode", "style", "budget", "objective", "constraint_value",
               "total_incentive", "full_compliance"]
    columns += [f"f_{i}" for i in range(n)] + [f"u_{i}" for i in range(n)]
    table = SweepTable(
        columns=columns,
        metadata=_base_metadata(
            args, command="solve", scenario=args.scenario, mode=args.mode,
            solve_style=args.style, budget=args.budget,
            **{f"solver_{k}": v for k, v in outcome.solver_meta.to_dict().items()},
        ),
    )
    row = {
        "mode": args.mode,
        "style": args.style,
        "budget": outcome.budget,
        "objective": outcome.objective,
        "constraint_value": outcome.constraint_value,
        "total_incentive": outcome.total_incentive,
        "full_compliance": _full_compliance(outcome.f.a),
    }
    row.update({f"f_{i}": outcome.f.a[i] for i in range(n)})
    row.update({f"u_{i}": outcome.u.u[i] for i in range(n)})
    table.append(**row)
    _write(table, args.out)
    return EXIT_OK


def cmd_budget_sweep(args) -> int:
    scenario, theta = _load_scenario(args.scenario)
    budgets = _parse_grid(args.budgets, "budget")
    if budgets.min() < 0.0:
        raise ValidationError(f"budget grid contains negative value {budgets.min()}")
    modes = list(_MODE_FLAGS) if args.mode == "both" else [args.mode]
    table = SweepTable(
        columns=["budget", "mode", "total_emissions", "total_incentive", "full_compliance"],
        metadata=_base_metadata(
            args, command="budget-sweep", scenario=args.scenario, mode=args.mode,
            solve_style=args.style, budgets=args.budgets,
        ),
    )
    for mode_name in modes:
        mode = _MODE_FLAGS[mode_name]
        for b in budgets:
            outcome = solve_mechanism(scenario, theta, float(b), mode, args.style)
            table.append(
                budget=float(b),
                mode=mode_name,
                total_emissions=outcome.objective,
                total_incentive=outcome.total_incentive,
                full_compliance=_full_compliance(outcome.f.a),
            )
    _write(table, args.out)
    return EXIT_OK


def cmd_misreport(args) -> int:
    scenario, theta = _load_scenario(args.scenario)
    grid = _parse_grid(args.theta_hats, "theta_hat")
    if grid.min() < 0.0 or grid.max() > 1.0:
        raise ValidationError("theta_hat grid values must lie in [0, 1]")
    if args.true_theta is not None:
        arr = theta.theta.copy()
        if not 0 <= args.driver < scenario.n:
            raise ValidationError(f"driver index {args.driver} out of range for n={scenario.n}")
        arr[args.driver] = args.true_theta
        theta = TypeProfile(arr)
    mode = _MODE_FLAGS[args.mode]
    rows = misreport_sweep(scenario, theta, args.driver, grid, mode, args.budget, args.style)
    table = SweepTable(
        columns=["theta_hat", "f_i", "u_i", "a_opt", "ell_at_a_opt", "ell_at_f",
                 "obedient", "solved"],
        metadata=_base_metadata(
            args, command="misreport", scenario=args.scenario, mode=args.mode,
            solve_style=args.style, budget=args.budget, driver=args.driver,
            true_theta=float(theta.theta[args.driver]),
        ),
    )
    for r in rows:
        table.append(theta_hat=r.theta_hat, f_i=r.f_i, u_i=r.u_i, a_opt=r.a_opt,
                     ell_at_a_opt=r.ell_at_a_opt, ell_at_f=r.ell_at_f,
                     obedient=r.obedient, solved=r.solved)
    _write(table, args.out)
    return EXIT_OK


def cmd_audit(args) -> int:
    scenario, theta = _load_scenario(args.scenario)
    mode = _MODE_FLAGS[args.mode]
    outcome = solve_mechanism(scenario, theta, args.budget, mode, args.style)
    obed = obedience_margin(scenario, theta, outcome.f, outcome.u)
    defs = obedience_definition_check(scenario, theta, outcome.f, outcome.u)
    ic = ic_derivative_check(scenario, theta, mode, args.budget, args.style, h=args.ic_h)
    slack = budget_check(outcome.u, args.budget)

    budget_ok = slack >= -PASS_TOL
    frozen_ok = bool(np.all(ic.frozen_residual <= PASS_TOL))
    empirical_ok = bool(np.all(ic.empirical_ic))
    strict_ok = obed.passed and bool(np.all(defs)) and budget_ok and frozen_ok and empirical_ok

    table = SweepTable(
        columns=["driver", "theta", "f_i", "u_i", "obedience_margin", "obedience_witness",
                 "definition_pass", "ic_frozen_residual", "ic_total_residual",
                 "ic_concavity_defect", "ic_min_theta_hat", "ic_empirical"],
        metadata=_base_metadata(
            args, command="audit", scenario=args.scenario, mode=args.mode,
            solve_style=args.style, budget=args.budget, ic_h=args.ic_h,
            objective=outcome.objective, budget_slack=slack,
            budget_pass=budget_ok, obedience_pass=obed.passed, strict_pass=strict_ok,
        ),
    )
    for i in range(scenario.n):
        table.append(
            driver=i,
            theta=theta.theta[i],
            f_i=outcome.f.a[i],
            u_i=outcome.u.u[i],
            obedience_margin=obed.per_driver_margin[i],
            obedience_witness=obed.witness[i],
            definition_pass=bool(defs[i]),
            ic_frozen_residual=ic.frozen_residual[i],
            ic_total_residual=ic.total_residual[i],
            ic_concavity_defect=ic.concavity_defect[i],
            ic_min_theta_hat=ic.min_theta_hat[i],
            ic_empirical=bool(ic.empirical_ic[i]),
        )
    _write(table, args.out)
    if args.strict and not strict_ok:
        print("audit failed under --strict", file=sys.stderr)
        return EXIT_AUDIT
    return EXIT_OK


def _write(table: SweepTable, path) -> None:
    try:
        table.write(path)
    except OSError as exc:
        raise _IoFailure(f"cannot write {path}: {exc}") from exc
    print(f"wrote {len(table.rows)} rows to {path}")


# --- argument plumbing ------------------------------------------------------

def _add_common(p, *, budget=True) -> None:
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--mode", choices=list(_MODE_FLAGS), required=True)
    if budget:
        p.add_argument("--budget", type=float, required=True)
    p.add_argument("--style", choices=["local", "global"], default="local")
    p.add_argument("--seed", type=int, default=None, help="recorded in metadata")
    p.add_argument("--out", required=True, help="output CSV path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecomech",
        description="Solve and audit eco-driving incentive mechanisms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw a scenario and write it as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--zero-prob", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="solve one mechanism at one budget")
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("budget-sweep", help="solve across a budget grid")
    p.add_argument("--scenario", required=True)
    p.add_argument("--mode", choices=[*_MODE_FLAGS, "both"], default="both")
    p.add_argument("--budgets", required=True, help="'lo:hi:count' or 'v1,v2,...'")
    p.add_argument("--style", choices=["local", "global"], default="local")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_budget_sweep)

    p = sub.add_parser("misreport", help="sweep one driver's reported type")
    _add_common(p)
    p.add_argument("--driver", type=int, required=True)
    p.add_argument("--theta-hats", default="0:1:21", help="'lo:hi:count' or 'v1,v2,...'")
    p.add_argument("--true-theta", type=float, default=None,
                   help="override the swept driver's true type")
    p.set_defaults(func=cmd_misreport)

    p = sub.add_parser("audit", help="solve then audit obedience, IC, and budget")
    _add_common(p)
    p.add_argument("--ic-h", type=float, default=1e-3)
    p.add_argument("--strict", action="store_true",
                   help="exit nonzero when an audited property fails")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ScenarioFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except _IoFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
