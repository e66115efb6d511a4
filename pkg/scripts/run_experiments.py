#!/usr/bin/env python3
"""Desk-scale experiment runner.

Generates the pinned 10-driver protocol scenario, runs the misreport sweeps
for driver 0 under both mechanisms, a budget sweep under both mechanisms,
and a second-best audit, leaving every table as CSV in the output directory.
The figure renderer consumes these files as-is.
"""

import argparse
import sys
from pathlib import Path

from ecomech.cli import main as cli

PROTOCOL_SEED = 18586
BUDGET = 3.0


def run(outdir: Path) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    scenario = outdir / "protocol_scenario.json"
    seed = str(PROTOCOL_SEED)

    steps = [
        ["generate", "--n", "10", "--seed", seed, "--out", str(scenario)],
        ["misreport", "--scenario", str(scenario), "--mode", "first-best",
         "--budget", str(BUDGET), "--driver", "0", "--theta-hats", "0:1:21",
         "--seed", seed, "--out", str(outdir / "misreport_first_best.csv")],
        ["misreport", "--scenario", str(scenario), "--mode", "second-best",
         "--budget", str(BUDGET), "--driver", "0", "--theta-hats", "0:1:21",
         "--seed", seed, "--out", str(outdir / "misreport_second_best.csv")],
        ["budget-sweep", "--scenario", str(scenario), "--budgets", "0:12:25",
         "--seed", seed, "--out", str(outdir / "budget_sweep.csv")],
        ["audit", "--scenario", str(scenario), "--mode", "second-best",
         "--budget", str(BUDGET), "--seed", seed,
         "--out", str(outdir / "audit_second_best.csv")],
    ]
    for argv in steps:
        code = cli(argv)
        if code != 0:
            print(f"step failed ({code}): {' '.join(argv)}", file=sys.stderr)
            return code
    print(f"experiment tables written to {outdir}/")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("out"))
    sys.exit(run(parser.parse_args().out))
