"""CLI and serialization tests: round trips, CSV schema, determinism."""

import csv
import json
import shutil

import numpy as np
import pytest

from cruiseopt.cli import (build_parser, emit_direct_csv, emit_trajectory_csv,
                           main, write_solution_dir)
from cruiseopt.scenario import (default_aircraft_path, default_scenario_path,
                                load_scenario, save_scenario)


class TestScenarioRoundTrip:
    def test_save_load_preserves_fields(self, scenario, tmp_path):
        path = tmp_path / "scenario.json"
        save_scenario(scenario, path)
        # the aircraft reference is relative to the scenario file
        shutil.copy(default_aircraft_path(), tmp_path / scenario.aircraft_file)
        back = load_scenario(path)
        for name in ("x0", "y0", "xf", "yf", "v0", "vf", "m0", "h",
                     "alpha", "pi_min", "pi_max"):
            assert getattr(back, name) == getattr(scenario, name)
        assert back.wind == scenario.wind
        assert back.aircraft == scenario.aircraft

    def test_shipped_scenario_values(self, scenario):
        assert (scenario.x0, scenario.y0) == (0.0, 0.0)
        assert (scenario.xf, scenario.yf) == (1.5e6, 7.0e5)
        assert scenario.v0 == scenario.vf == 200.0
        assert scenario.m0 == 59000.0
        assert scenario.h == 10000.0
        assert (scenario.pi_min, scenario.pi_max) == (0.0, 1.0)


class TestTrajectoryCsv:
    def test_schema_and_monotone_time(self, sol_04, tmp_path):
        path = tmp_path / "traj.csv"
        emit_trajectory_csv(sol_04, path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "x", "y", "v", "m", "chi", "pi", "S", "H",
                           "lam_x", "lam_y", "lam_v", "lam_m", "lc", "detM",
                           "mach", "cas_flag"]
        assert all(len(r) == 17 for r in rows)
        t = np.array([float(r[0]) for r in rows[1:]])
        assert np.all(np.diff(t) > 0.0)
        assert set(r[-1] for r in rows[1:]) <= {"0", "1"}

    def test_full_precision_round_trip(self, sol_04, tmp_path):
        path = tmp_path / "traj.csv"
        emit_trajectory_csv(sol_04, path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        m_csv = np.array([float(r[4]) for r in rows[1:]])
        assert m_csv == pytest.approx(sol_04.trajectory.states[:, 3], rel=0.0)

    def test_reemission_is_byte_identical(self, sol_04, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_trajectory_csv(sol_04, p1)
        emit_trajectory_csv(sol_04, p2)
        assert p1.read_bytes() == p2.read_bytes()


def test_direct_csv_schema(direct_04, tmp_path):
    path = tmp_path / "direct.csv"
    emit_direct_csv(direct_04, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x", "y", "v", "m", "chi", "pi"]
    assert len(rows) == direct_04.grid.N + 2  # header + N nodes + terminal


class TestSolutionDirectory:
    def test_write_then_verify_command(self, sol_04, tmp_path):
        outdir = tmp_path / "run"
        write_solution_dir(sol_04, outdir, steps=200)
        for name in ("scenario.json", "aircraft.json", "solution.json",
                     "trajectory.csv"):
            assert (outdir / name).exists()
        with open(outdir / "solution.json") as fh:
            doc = json.load(fh)
        assert doc["converged"] is True
        assert doc["schedule"]["final_throttle"] is None
        assert doc["alpha"] == sol_04.alpha
        # the stored directory is self-contained: the verify command
        # re-integrates the schedule and re-runs every check
        assert main(["verify", "--solution", str(outdir)]) == 0

    def test_final_throttle_survives_round_trip(self, sol_01, tmp_path):
        outdir = tmp_path / "run01"
        write_solution_dir(sol_01, outdir, steps=200)
        with open(outdir / "solution.json") as fh:
            doc = json.load(fh)
        assert doc["schedule"]["final_throttle"] == sol_01.scenario.pi_max
        assert main(["verify", "--solution", str(outdir)]) == 0


class TestArgumentHandling:
    def test_alpha_outside_unit_interval_rejected(self, capsys):
        rc = main(["solve-indirect", "--alpha", "1.5", "--out", "/tmp/x"])
        assert rc == 1
        assert "outside [0, 1]" in capsys.readouterr().err

    def test_missing_out_is_a_parse_error(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["solve-indirect"])

    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_default_scenario_is_shipped_file(self):
        args = build_parser().parse_args(["solve-indirect", "--out", "/tmp/x"])
        assert args.scenario == str(default_scenario_path())
