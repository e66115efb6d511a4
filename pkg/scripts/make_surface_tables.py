#!/usr/bin/env python3
"""Tabulate the two-driver cost surfaces as CSV for the figure renderer.

Evaluates driver 1's emission, travel time, and nominal/incentivized costs
on a level grid for a symmetric coupled pair, producing the inputs for the
surface figure kinds.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from ecomech import DriverParams, EcoProfile, Scenario
from ecomech import emission, travel_time, nominal_cost, incentivized_cost
from ecomech.cli import SweepTable

THETA = 0.2
RATE = 1.0


def run(outdir: Path, points: int) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    params = DriverParams(alpha=0.7, beta=2.5, gamma=3.5, xbar=4.0, ybar=1.0)
    pair = Scenario([[1.0, 0.5], [0.5, 1.0]], [params, params])
    axis = np.linspace(0.0, 1.0, points)
    meta = dict(command="surface-tables", theta=THETA, incentive_rate=RATE, grid_points=points)

    emis = SweepTable(columns=["a1", "a2", "emission"], metadata=meta)
    tt = SweepTable(columns=["a1", "a2", "travel_time"], metadata=meta)
    cost = SweepTable(columns=["a1", "a2", "nominal_cost", "incentivized_cost"], metadata=meta)
    for a1 in axis:
        for a2 in axis:
            prof = EcoProfile(np.array([a1, a2]))
            emis.append(a1=a1, a2=a2, emission=emission(pair, 0, prof))
            tt.append(a1=a1, a2=a2, travel_time=travel_time(pair, 0, prof))
            cost.append(
                a1=a1, a2=a2,
                nominal_cost=nominal_cost(pair, 0, prof, THETA),
                incentivized_cost=incentivized_cost(pair, 0, prof, THETA, RATE),
            )
    emis.write(outdir / "surface_emission.csv")
    tt.write(outdir / "surface_travel_time.csv")
    cost.write(outdir / "surface_cost.csv")
    print(f"surface tables written to {outdir}/")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("out"))
    parser.add_argument("--points", type=int, default=41)
    args = parser.parse_args()
    sys.exit(run(args.out, args.points))
