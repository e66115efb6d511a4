"""Figure rendering from experiment CSV tables.

Each figure kind declares the columns it needs; a missing column raises a
TableError naming it before any drawing happens. Output format follows the
file extension (png, pdf, svg). Rendering is deterministic for fixed
inputs: fixed figure sizes, no timestamps, data order taken from the rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .tables import Table, TableError, read_tables

KINDS = (
    "surface_emission",
    "surface_travel_time",
    "cost_surface",
    "misreport_levels",
    "budget_sweep",
)


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: a figure kind, its input tables, and the output path."""

    kind: str
    input_paths: tuple[str, ...]
    output_path: str
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise TableError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.input_paths:
            raise TableError("at least one input table is required")


def render(spec: FigureSpec) -> Path:
    table = read_tables(spec.input_paths)
    fig = _DRAWERS[spec.kind](table, spec.labels)
    out = Path(spec.output_path)
    fig.savefig(out)
    plt.close(fig)
    return out


def _budget_sweep(table: Table, labels: dict):
    table.require("budget", "mode", "total_emissions")
    budgets = table.floats("budget")
    emissions = table.floats("total_emissions")
    modes = table.strings("mode")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for mode in dict.fromkeys(modes):  # first-seen order, deterministic
        series = sorted(
            (b, e) for b, e, m in zip(budgets, emissions, modes) if m == mode
        )
        ax.plot([b for b, _ in series], [e for _, e in series], marker="o", label=mode)
    ax.set_xlabel(labels.get("xlabel", "total budget"))
    ax.set_ylabel(labels.get("ylabel", "total emissions"))
    ax.set_title(labels.get("title", "Emissions under the recommended levels"))
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def _misreport_levels(table: Table, labels: dict):
    table.require("theta_hat", "f_i", "a_opt")
    theta = table.floats("theta_hat")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(theta, table.floats("f_i"), marker="o", label="recommended level")
    ax.plot(theta, table.floats("a_opt"), marker="s", label="optimal level")
    ax.set_xlabel(labels.get("xlabel", "reported type"))
    ax.set_ylabel(labels.get("ylabel", "eco-driving level"))
    ax.set_title(labels.get("title", "Recommended vs optimal level by report"))
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def _surface(table: Table, value_column: str, labels: dict, default_title: str):
    table.require("a1", "a2", value_column)
    a1 = table.floats("a1")
    a2 = table.floats("a2")
    values = table.floats(value_column)
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    tric = ax.tricontourf(a1, a2, values, levels=24)
    fig.colorbar(tric, ax=ax, label=labels.get("colorbar", value_column))
    ax.set_xlabel(labels.get("xlabel", "own level a1"))
    ax.set_ylabel(labels.get("ylabel", "neighbor level a2"))
    ax.set_title(labels.get("title", default_title))
    fig.tight_layout()
    return fig


def _cost_surface(table: Table, labels: dict):
    table.require("a1", "a2", "nominal_cost", "incentivized_cost")
    a1 = table.floats("a1")
    a2 = table.floats("a2")
    nominal = table.floats("nominal_cost")
    incentivized = table.floats("incentivized_cost")
    lo = min(min(nominal), min(incentivized))
    hi = max(max(nominal), max(incentivized))
    fig, axes = plt.subplots(1, 2, figsize=(10.0, 4.2), sharey=True)
    for ax, vals, name in (
        (axes[0], nominal, "nominal cost"),
        (axes[1], incentivized, "incentivized cost"),
    ):
        tric = ax.tricontourf(a1, a2, vals, levels=24, vmin=lo, vmax=hi)
        ax.set_title(name)
        ax.set_xlabel(labels.get("xlabel", "own level a1"))
        fig.colorbar(tric, ax=ax)
    axes[0].set_ylabel(labels.get("ylabel", "neighbor level a2"))
    fig.suptitle(labels.get("title", "Driver cost with and without incentive"))
    fig.tight_layout()
    return fig


_DRAWERS = {
    "budget_sweep": _budget_sweep,
    "misreport_levels": _misreport_levels,
    "surface_emission": lambda t, lb: _surface(t, "emission", lb, "Emission cost"),
    "surface_travel_time": lambda t, lb: _surface(
        t, "travel_time", lb, "Travel-time cost"
    ),
    "cost_surface": _cost_surface,
}
