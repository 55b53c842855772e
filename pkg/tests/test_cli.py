"""End-to-end command line behavior: exit codes, determinism, output files."""

import subprocess
import sys

import pytest

from jswsim.cli import main


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_simulate_ok(self, capsys):
        code, out, _ = run(["simulate", "--seed", "1", "--horizon", "50"], capsys)
        assert code == 0
        assert "seed 1" in out

    def test_violation_is_one(self, tmp_path, capsys):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[compare]\nservers = 3\nservers_small = 2\ncorrupt_step = 5\n")
        code, out, _ = run(
            ["compare", "--config", str(cfg), "--seed", "1", "--horizon", "50"], capsys
        )
        assert code == 1
        assert "FAIL" in out and "step 5" in out

    def test_bad_config_is_two(self, capsys):
        code, _, err = run(["simulate", "--config", "missing.ini"], capsys)
        assert code == 2
        assert "config error" in err

    def test_seed_seeds_conflict_is_two(self, capsys):
        code, _, err = run(["simulate", "--seed", "1", "--seeds", "1 2"], capsys)
        assert code == 2
        assert "mutually exclusive" in err

    def test_bad_trace_is_three(self, tmp_path, capsys):
        trace = tmp_path / "t.txt"
        trace.write_text("1.0 1.0\nbroken line\n")
        cfg = tmp_path / "c.ini"
        cfg.write_text(f"[model]\nkind = trace\npath = {trace}\n")
        code, _, err = run(
            ["simulate", "--config", str(cfg), "--seed", "1", "--horizon", "2"], capsys
        )
        assert code == 3
        assert "input error" in err

    def test_unstable_is_four(self, tmp_path, capsys):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[model]\nsigma = exponential(0.5)\nxi = exponential(2.0)\n")
        code, _, err = run(["loynes", "--config", str(cfg), "--seed", "1"], capsys)
        assert code == 4
        assert "instability" in err

    def test_non_convergence_is_five_with_estimate(self, tmp_path, capsys):
        cfg = tmp_path / "c.ini"
        cfg.write_text(
            "[model]\nsigma = exponential(1.0)\nxi = exponential(0.9)\n"
            "[loynes]\nservers = 1\ntolerance = 1e-9\nwindow = 16\nmax_n = 64\n"
        )
        code, out, err = run(["loynes", "--config", str(cfg), "--seed", "12"], capsys)
        assert code == 5
        assert "NOT CONVERGED" in out
        assert "profile=" in out  # the estimate is still printed
        assert "tolerance" in err

    def test_premise_failure_is_six(self, tmp_path, capsys):
        cfg = tmp_path / "c.ini"
        cfg.write_text(
            "[compare]\nmode = allocation\nservers = 3\nrank = 2\n"
            "start = 0 2 2\nstart_alt = 1 1 3\n"
        )
        code, _, err = run(
            ["compare", "--config", str(cfg), "--seed", "1", "--horizon", "10"], capsys
        )
        assert code == 6
        assert "premise" in err


class TestDeterminism:
    def test_simulate_rerun_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["simulate", "--seeds", "1..3", "--horizon", "40"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_jobs_do_not_change_output(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["simulate", "--seeds", "1..4", "--horizon", "40"]
        assert main(base + ["--jobs", "1", "--out", str(a)]) == 0
        assert main(base + ["--jobs", "3", "--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_csv_has_no_carriage_returns(self, tmp_path, capsys):
        out = tmp_path / "a.csv"
        main(["simulate", "--seed", "1", "--horizon", "5", "--out", str(out)])
        capsys.readouterr()
        raw = out.read_bytes()
        assert b"\r" not in raw
        header = raw.decode().splitlines()
        assert header[5] == "seed,step,w1,w2,total,wait"

    def test_rows_written_seed_sorted(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["simulate", "--seeds", "3 1 2", "--horizon", "5", "--out", str(a)]) == 0
        assert main(["simulate", "--seeds", "1..3", "--horizon", "5", "--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()


class TestOutputs:
    def test_loynes_snapshots(self, tmp_path, capsys):
        snap = tmp_path / "s.csv"
        code, out, _ = run(
            ["loynes", "--seeds", "1 2", "--out", str(snap)], capsys
        )
        assert code == 0
        assert "mean offered wait over 2 seeds" in out
        lines = snap.read_text().splitlines()
        assert "seed,n,coordinate,value" in lines
        assert any(line.startswith("1,64,1,") for line in lines)

    def test_compare_violations_csv(self, tmp_path, capsys):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[compare]\nservers = 2\nservers_small = 1\ncorrupt_step = 3\n")
        out_csv = tmp_path / "v.csv"
        code, _, _ = run(
            [
                "compare",
                "--config",
                str(cfg),
                "--seeds",
                "1 2",
                "--horizon",
                "20",
                "--out",
                str(out_csv),
            ],
            capsys,
        )
        assert code == 1
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "inequality,step,lhs,rhs"
        assert len(lines) == 3  # one corrupted step per seed

    def test_compare_trajectory_dump(self, tmp_path, capsys):
        traj = tmp_path / "t.csv"
        cfg = tmp_path / "c.ini"
        cfg.write_text(f"[compare]\nservers = 2\nservers_small = 1\ntrajectories = {traj}\n")
        code, _, _ = run(
            ["compare", "--config", str(cfg), "--seed", "3", "--horizon", "10"], capsys
        )
        assert code == 0
        lines = traj.read_text().splitlines()
        assert lines[0] == "step,system,coordinate,value"
        assert any("seed3:S2P1" in line for line in lines)
        assert any("seed3:S1P1" in line for line in lines)

    def test_verify_properties_lines(self, capsys):
        code, out, _ = run(["verify-properties", "--instances", "50"], capsys)
        assert code == 0
        assert out.count("PASS") >= 6
        for name in ("negation-symmetry", "step-comparison"):
            assert f"suite {name}: 50 instances, 0 failures PASS" in out

    def test_env_var_supplies_config(self, tmp_path, capsys, monkeypatch):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[run]\nseeds = 41\nhorizon = 7\n")
        monkeypatch.setenv("JSWSIM_CONFIG", str(cfg))
        code, out, _ = run(["simulate"], capsys)
        assert code == 0
        assert "seed 41: 7 arrivals" in out

    def test_verify_properties_config_subset(self, tmp_path, capsys):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[properties]\nsuites = convex-battery\ninstances = 25\n")
        code, out, _ = run(["verify-properties", "--config", str(cfg)], capsys)
        assert code == 0
        assert out.count("suite ") == 1


class TestScenarios:
    """End-to-end runs with closed-form or coupling-backed expectations."""

    def test_dd1_under_capacity_waits_are_zero(self, tmp_path, capsys):
        cfg = tmp_path / "c.ini"
        cfg.write_text(
            "[model]\nsigma = deterministic(0.5)\nxi = deterministic(1.0)\n"
            "[system]\nservers = 1\n"
        )
        out = tmp_path / "t.csv"
        code, _, _ = run(
            [
                "simulate",
                "--config",
                str(cfg),
                "--seed",
                "1",
                "--horizon",
                "200",
                "--out",
                str(out),
            ],
            capsys,
        )
        assert code == 0
        rows = out.read_text().splitlines()[6:]  # past 5 comment lines + header
        waits = [line.rsplit(",", 1)[1] for line in rows]
        assert waits[0] == ""  # step 0 precedes the first arrival
        assert set(waits[1:]) == {"0.0"}

    def test_simulate_million_step_row_count(self, tmp_path, capsys):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[model]\nsigma = exponential(1.0)\nxi = exponential(1.0)\n")
        out = tmp_path / "big.csv"
        code, _, _ = run(
            [
                "simulate",
                "--config",
                str(cfg),
                "--seed",
                "7",
                "--horizon",
                "1000000",
                "--out",
                str(out),
            ],
            capsys,
        )
        assert code == 0
        with out.open() as fh:
            total = sum(1 for _ in fh)
        assert total == 5 + 1 + 1_000_001  # comments, header, one row per step

    def test_dd1_loynes_converges_at_first_check(self, tmp_path, capsys):
        cfg = tmp_path / "c.ini"
        cfg.write_text(
            "[model]\nsigma = deterministic(0.5)\nxi = deterministic(1.0)\n"
            "[loynes]\nservers = 1\n"
        )
        code, out, _ = run(["loynes", "--config", str(cfg), "--seed", "1"], capsys)
        assert code == 0
        assert "seed 1: n=128 converged increment=0 profile=(0)" in out

    def test_mm2_mean_wait_band_over_200_replications(self, tmp_path, capsys):
        # Two unit-rate servers fed by unit-rate arrivals queue a third of
        # the time, for a mean offered wait of 1/3 (Erlang delay formula).
        # Seeds are pinned so the 200-replication mean is a regression
        # value, not a coin flip; 776..975 lands at 0.3335.
        cfg = tmp_path / "c.ini"
        cfg.write_text(
            "[model]\nsigma = exponential(1.0)\nxi = exponential(1.0)\n"
            "[loynes]\nservers = 2\n"
        )
        code, out, _ = run(["loynes", "--config", str(cfg), "--seeds", "776..975"], capsys)
        assert code == 0
        line = [l for l in out.splitlines() if l.startswith("mean offered wait")][-1]
        assert line.startswith("mean offered wait over 200 seeds:")
        mean = float(line.rsplit(":", 1)[1])
        assert 0.31 <= mean <= 0.35

    def test_compare_three_vs_two_over_100_seeds(self, tmp_path, capsys):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[compare]\nservers = 3\nservers_small = 2\n")
        code, out, _ = run(
            ["compare", "--config", str(cfg), "--seeds", "1..100", "--horizon", "1000"],
            capsys,
        )
        assert code == 0
        assert out.strip().endswith("PASS: dominance held at every step of every run")

    def test_compare_equal_server_counts_all_equal(self, tmp_path, capsys):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[compare]\nservers = 2\nservers_small = 2\n")
        code, out, _ = run(
            ["compare", "--config", str(cfg), "--seed", "5", "--horizon", "100"], capsys
        )
        assert code == 0
        assert "0 violations" in out

    def test_property_sweep_dimension_one(self, tmp_path, capsys):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[properties]\nmax_dim = 1\ninstances = 400\n")
        code, out, _ = run(["verify-properties", "--config", str(cfg)], capsys)
        assert code == 0
        assert out.count("0 failures PASS") == 6


class TestHelp:
    def test_epilog_lists_config_surface(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        for fragment in (
            "simulate",
            "loynes",
            "compare",
            "verify-properties",
            "[model]",
            "sigma_states",
            "corrupt_step",
            "JSWSIM_CONFIG",
            "exponential(RATE)",
        ):
            assert fragment in out, fragment

    def test_console_script_installed(self):
        proc = subprocess.run(
            [sys.executable, "-m", "jswsim.cli", "--version"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "jswsim 0.1.0" in proc.stdout
