"""Renderer tests against real tables produced by the ecomech CLI."""

import subprocess
import sys
from pathlib import Path

import pytest

from figrender import FigureSpec, TableError, render
from figrender.cli import main as render_cli

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def run_ecomech(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "ecomech.cli", *args],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def tables(tmp_path_factory):
    """Budget-sweep and misreport CSVs from an actual solver run."""
    root = tmp_path_factory.mktemp("tables")
    scenario = root / "scenario.json"
    sweep = root / "budget_sweep.csv"
    misreport = root / "misreport.csv"
    run_ecomech("generate", "--n", "1", "--seed", "0", "--out", str(scenario))
    run_ecomech("budget-sweep", "--scenario", str(scenario), "--budgets", "0:6:13",
                "--out", str(sweep))
    run_ecomech("misreport", "--scenario", str(scenario), "--mode", "second-best",
                "--budget", "3", "--driver", "0", "--theta-hats", "0:1:11",
                "--out", str(misreport))
    return {"sweep": sweep, "misreport": misreport}


class TestRoundTrip:
    def test_budget_sweep_renders(self, tables, tmp_path):
        out = tmp_path / "sweep.png"
        got = render(FigureSpec("budget_sweep", (str(tables["sweep"]),), str(out)))
        assert got == out
        assert out.read_bytes()[:8] == PNG_MAGIC

    def test_misreport_renders(self, tables, tmp_path):
        out = tmp_path / "misreport.png"
        render(FigureSpec("misreport_levels", (str(tables["misreport"]),), str(out)))
        assert out.read_bytes()[:8] == PNG_MAGIC

    def test_cli_renders(self, tables, tmp_path):
        out = tmp_path / "sweep.png"
        code = render_cli(["--kind", "budget_sweep", "--in", str(tables["sweep"]),
                           "--out", str(out), "--title", "desk run"])
        assert code == 0
        assert out.exists()

    def test_vector_output(self, tables, tmp_path):
        out = tmp_path / "sweep.svg"
        render(FigureSpec("budget_sweep", (str(tables["sweep"]),), str(out)))
        assert b"<svg" in out.read_bytes()[:300]


class TestValidation:
    def test_truncated_table_names_missing_column(self, tables, tmp_path):
        truncated = tmp_path / "truncated.csv"
        lines = tables["sweep"].read_text().splitlines()
        kept = [
            ",".join(line.split(",")[1:]) if not line.startswith("#") else line
            for line in lines
        ]
        truncated.write_text("\n".join(kept) + "\n")
        with pytest.raises(TableError, match="budget"):
            render(FigureSpec("budget_sweep", (str(truncated),), str(tmp_path / "x.png")))

    def test_cli_exit_code_on_missing_column(self, tables, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("mode,total_emissions\nfirst-best,3.0\n")
        code = render_cli(["--kind", "budget_sweep", "--in", str(bad),
                           "--out", str(tmp_path / "x.png")])
        assert code == 2
        assert "budget" in capsys.readouterr().err

    def test_empty_table_is_error(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("# seed=1\nbudget,mode,total_emissions\n")
        with pytest.raises(TableError, match="empty"):
            render(FigureSpec("budget_sweep", (str(empty),), str(tmp_path / "x.png")))

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(TableError, match="kind"):
            FigureSpec("pie_chart", ("a.csv",), str(tmp_path / "x.png"))

    def test_mismatched_inputs_rejected(self, tables, tmp_path):
        other = tmp_path / "other.csv"
        other.write_text("a,b\n1,2\n")
        with pytest.raises(TableError, match="columns"):
            render(FigureSpec("budget_sweep",
                              (str(tables["sweep"]), str(other)),
                              str(tmp_path / "x.png")))


class TestSurfaces:
    @pytest.fixture()
    def surface_csv(self, tmp_path):
        path = tmp_path / "surface.csv"
        rows = ["a1,a2,emission,travel_time,nominal_cost,incentivized_cost"]
        for i in range(4):
            for j in range(4):
                a1, a2 = i / 3, j / 3
                rows.append(f"{a1},{a2},{4 - a1 - a2},{1 + a1 * a1},{2 - a1},{1.5 - a1}")
        path.write_text("# command=surface-tables\n" + "\n".join(rows) + "\n")
        return path

    @pytest.mark.parametrize("kind", ["surface_emission", "surface_travel_time",
                                      "cost_surface"])
    def test_surface_kinds_render(self, surface_csv, tmp_path, kind):
        out = tmp_path / f"{kind}.png"
        render(FigureSpec(kind, (str(surface_csv),), str(out)))
        assert out.read_bytes()[:8] == PNG_MAGIC
