"""Sweep orchestration, CSV/manifest output, CLI surface and exit codes."""

import csv
import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from bhchaos import (ConfigError, SweepConfig, make_grid, run_sweep_d1,
                     run_sweep_dynamics, threshold_rows)
from bhchaos.cli import main


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


class TestGrid:
    def test_log_spacing(self):
        grid = make_grid(0.01, 100.0, 5)
        assert grid == (0.01, 0.1, 1.0, 10.0, 100.0)

    def test_endpoints_exact(self):
        grid = make_grid(0.05, 100.0, 7)
        assert grid[0] == 0.05 and grid[-1] == 100.0

    def test_empty_grid_rejected(self):
        with pytest.raises(ConfigError):
            make_grid(0.1, 1.0, 0)

    def test_negative_bounds_rejected(self):
        with pytest.raises(ConfigError):
            make_grid(-1.0, 1.0, 3)

    def test_single_point(self):
        assert make_grid(2.0, 2.0, 1) == (2.0,)


@pytest.fixture(scope="module")
def small_sweep(tmp_path_factory):
    out = tmp_path_factory.mktemp("d1")
    config = SweepConfig(mode="sweep_d1", sizes=((5, 5),),
                         grid=make_grid(0.1, 10.0, 3),
                         state_kind="staggered", eps_windows=8,
                         window_size=10)
    return config, run_sweep_d1(config, out)


@pytest.fixture(scope="module")
def small_dynamics(tmp_path_factory):
    out = tmp_path_factory.mktemp("dyn")
    config = SweepConfig(mode="sweep_dynamics", sizes=((4, 4),),
                         grid=(0.5, 2.0), state_kind="homogeneous",
                         tmax=30.0, dt_sample=0.5, t_window=(10.0, 30.0))
    return config, run_sweep_dynamics(config, out)


class TestSweepD1:
    def test_rows_per_scheme(self, small_sweep):
        config, result = small_sweep
        eps_rows = read_csv(result.out_dir / "d1_eps_windows.csv")
        assert len(eps_rows) == 3 * 8
        ref_rows = read_csv(result.out_dir / "d1_ref_windows.csv")
        assert {r["gamma"] for r in ref_rows} == {"0.1", "1.0", "10.0"}

    def test_window_populations_partition(self, small_sweep):
        _, result = small_sweep
        eps_rows = read_csv(result.out_dir / "d1_eps_windows.csv")
        for gamma in ("0.1", "1.0", "10.0"):
            total = sum(int(r["count"]) for r in eps_rows if r["gamma"] == gamma)
            assert total == 66  # D+(5,5)

    def test_manifest_registers_files(self, small_sweep):
        _, result = small_sweep
        manifest = json.loads((result.out_dir / "manifest.json").read_text())
        assert set(manifest["files"]) == {"d1_eps_windows.csv", "d1_ref_windows.csv"}
        assert all(t["status"] == "ok" for t in manifest["tasks"])
        assert manifest["config_hash"] == result.config.config_hash()

    def test_rerun_is_byte_identical(self, small_sweep, tmp_path):
        config, result = small_sweep
        rerun = run_sweep_d1(config, tmp_path)
        for name in ("d1_eps_windows.csv", "d1_ref_windows.csv"):
            assert (tmp_path / name).read_bytes() == \
                (result.out_dir / name).read_bytes()

    def test_capacity_failure_is_per_task(self, tmp_path):
        config = SweepConfig(mode="sweep_d1", sizes=((5, 5),),
                             grid=(1.0, 2.0), dense_cap=10)
        result = run_sweep_d1(config, tmp_path)
        assert len(result.failed) == 2
        assert all("CapacityError" in t.error for t in result.failed)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert all(t["status"] == "failed" for t in manifest["tasks"])


class TestSweepDynamics:
    def test_summary_rows(self, small_dynamics):
        _, result = small_dynamics
        rows = read_csv(result.out_dir / "dynamics_summary.csv")
        assert len(rows) == 2
        for row in rows:
            assert float(row["var_t_nc"]) >= 0
            assert row["f_bar_scaled"] == ""  # homogeneous: F0 = 0, unscaled

    def test_timeseries_conservation(self, small_dynamics):
        _, result = small_dynamics
        rows = read_csv(result.out_dir / "profiles.csv")
        by_key = {}
        for r in rows:
            by_key.setdefault((r["gamma"], r["tau"]), 0.0)
            by_key[(r["gamma"], r["tau"])] += float(r["density"])
        assert all(abs(total - 4.0) < 1e-8 for total in by_key.values())

    def test_timeseries_row_count(self, small_dynamics):
        _, result = small_dynamics
        rows = read_csv(result.out_dir / "timeseries.csv")
        assert len(rows) == 2 * 61  # two grid points, tau = 0..30 step 0.5

    def test_localized_even_lattice_runs_in_full_basis(self, tmp_path):
        config = SweepConfig(mode="sweep_dynamics", sizes=((4, 4),),
                             grid=(1.0,), state_kind="localized", ell=3,
                             tmax=10.0, dt_sample=0.5, t_window=(5.0, 10.0))
        result = run_sweep_dynamics(config, tmp_path)
        assert not result.failed
        rows = read_csv(tmp_path / "dynamics_summary.csv")
        assert float(rows[0]["f0"]) > 0

    def test_worker_pool_matches_serial(self, tmp_path):
        config = SweepConfig(mode="sweep_dynamics", sizes=((4, 4),),
                             grid=(0.5, 1.0, 2.0), state_kind="homogeneous",
                             tmax=10.0, dt_sample=0.5, t_window=(5.0, 10.0))
        serial = run_sweep_dynamics(config, tmp_path / "serial", workers=1)
        pooled = run_sweep_dynamics(config, tmp_path / "pooled", workers=3)
        assert (serial.out_dir / "dynamics_summary.csv").read_bytes() == \
            (pooled.out_dir / "dynamics_summary.csv").read_bytes()


class TestThresholdRows:
    def test_values(self):
        rows = threshold_rows([(10, 10)])
        by_state = {r["state"]: r for r in rows}
        assert by_state["homogeneous"]["gamma_c_exact"] == "1/2"
        assert by_state["staggered"]["gamma_c_exact"] == "2/5"
        assert Fraction(by_state["localized"]["eta_c_exact"]) == \
            Fraction(9 * 8, 6) / (2 * 100)

    def test_states_without_construction_are_skipped(self):
        rows = threshold_rows([(6, 6)])
        kinds = {r["state"] for r in rows}
        assert kinds == {"homogeneous", "staggered", "localized"}


class TestCliSurface:
    def test_thresholds_stdout(self, capsys):
        assert main(["thresholds", "--n", "10", "--l", "10"]) == 0
        out = capsys.readouterr().out
        assert "homogeneous" in out and "0.5" in out

    def test_staggered_table(self, capsys):
        assert main(["staggered-table", "--l", "10,13"]) == 0
        out = capsys.readouterr().out
        assert "0203003020" in out and "0200303030020" in out

    def test_spectrum_command(self, tmp_path, capsys):
        code = main(["spectrum", "--n", "4", "--l", "4", "--gamma", "1.0",
                     "--out", str(tmp_path)])
        assert code == 0
        rows = read_csv(tmp_path / "spectrum.csv")
        assert len(rows) == 19  # D+(4,4)
        eps = [float(r["eps"]) for r in rows]
        assert min(eps) == 0.0 and max(eps) == 1.0

    def test_sweep_d1_cli(self, tmp_path):
        code = main(["sweep-d1", "--n", "4", "--l", "4", "--grid-min", "0.5",
                     "--grid-max", "2.0", "--grid-count", "2",
                     "--state", "homogeneous", "--windows", "5",
                     "--window-size", "5", "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "manifest.json").exists()

    def test_evolve_cli(self, tmp_path):
        code = main(["evolve", "--n", "4", "--l", "4", "--gamma", "1.0",
                     "--state", "homogeneous", "--tmax", "5",
                     "--dt-sample", "0.5", "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "timeseries.csv").exists()

    def test_evolve_needs_exactly_one_coupling(self, tmp_path):
        code = main(["evolve", "--n", "4", "--l", "4", "--state", "homogeneous",
                     "--out", str(tmp_path)])
        assert code == 2

    def test_config_error_exit_code(self, tmp_path):
        code = main(["sweep-d1", "--n", "4", "--l", "4,5", "--grid-min", "0.5",
                     "--grid-max", "2.0", "--grid-count", "2",
                     "--out", str(tmp_path)])
        assert code == 2

    def test_bad_grid_exit_code(self, tmp_path):
        code = main(["sweep-d1", "--n", "4", "--l", "4", "--grid-min", "-1",
                     "--grid-max", "2.0", "--grid-count", "2",
                     "--out", str(tmp_path)])
        assert code == 2

    def test_capacity_exit_code(self, tmp_path):
        code = main(["spectrum", "--n", "8", "--l", "8", "--gamma", "1.0",
                     "--dense-cap", "10", "--out", str(tmp_path)])
        assert code == 3

    def test_env_output_root(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("BHCHAOS_OUT", str(tmp_path))
        assert main(["staggered-table", "--l", "10"]) == 0
        assert (tmp_path / "staggered-table" / "staggered_states.csv").exists()
