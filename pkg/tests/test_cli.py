"""End-to-end checks of the command line driver.

Every test calls main(argv) in-process, so exit codes are plain return
values and error text lands on capsys. Runs are kept tiny (n=64, a few
time units); the physics behind each subcommand has its own suite.
"""

import hashlib
import json
from pathlib import Path

import pytest

from burgulence.cli import main


def write_config(directory: Path, payload: dict) -> str:
    path = directory / "config.json"
    path.write_text(json.dumps(payload))
    return str(path)


def tree_hash(root: Path) -> str:
    digest = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            digest.update(str(path.relative_to(root)).encode())
            digest.update(path.read_bytes())
    return digest.hexdigest()


WHITE_RUN = {
    "trajectory": {"nu": 0.04, "n": 64,
                   "forcing": {"kind": "white", "k_max": 8}},
    "ensemble": 2,
    "t_end": 3.0,
    "burn_in": 1.0,
    "snapshot_interval": 1.0,
    "save_snapshots": True,
}


@pytest.fixture(scope="module")
def white_run(tmp_path_factory) -> Path:
    """A small white-forced run with snapshots, shared by post-processing."""
    base = tmp_path_factory.mktemp("white_run")
    cfg = write_config(base, WHITE_RUN)
    out = base / "run"
    assert main(["simulate", "--config", cfg, "--seed", "11",
                 "--out", str(out)]) == 0
    return out


class TestSimulate:

    def test_deterministic_smoke(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "trajectory": {"nu": 0.1, "n": 64},
            "initial": {"kind": "sine"},
            "t_end": 1.0,
        })
        out = tmp_path / "run"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        captured = capsys.readouterr()
        assert "records, ensemble 1" in captured.out
        index = json.loads((out / "index.json").read_text())
        assert index["kind"] == "ensemble"
        assert index["command"] == "simulate"

    def test_stochastic_without_seed_refused(self, tmp_path, capsys):
        cfg = write_config(tmp_path, WHITE_RUN)
        rc = main(["simulate", "--config", cfg,
                   "--out", str(tmp_path / "run")])
        assert rc == 1
        assert "stochastic runs need" in capsys.readouterr().err

    def test_reruns_are_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, {
            "trajectory": {"nu": 0.05, "n": 64,
                           "forcing": {"kind": "white", "k_max": 8}},
            "t_end": 2.0,
            "snapshot_interval": 1.0,
            "save_snapshots": True,
        })
        argv = ["simulate", "--config", cfg, "--seed", "7", "--out"]
        assert main(argv + [str(tmp_path / "a")]) == 0
        assert main(argv + [str(tmp_path / "b")]) == 0
        assert tree_hash(tmp_path / "a") == tree_hash(tmp_path / "b")

    def test_nested_override_reaches_config(self, tmp_path):
        cfg = write_config(tmp_path, {
            "trajectory": {"nu": 0.1, "n": 64},
            "initial": {"kind": "sine"},
            "t_end": 0.5,
        })
        out = tmp_path / "run"
        assert main(["simulate", "--config", cfg, "--out", str(out),
                     "--trajectory.nu=0.05"]) == 0
        index = json.loads((out / "index.json").read_text())
        assert index["trajectory"]["nu"] == 0.05

    def test_malformed_override_is_an_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "trajectory": {"nu": 0.1, "n": 64},
            "initial": {"kind": "sine"},
            "t_end": 0.5,
        })
        rc = main(["simulate", "--config", cfg,
                   "--out", str(tmp_path / "run"), "--oops"])
        assert rc == 1
        assert "unrecognized argument" in capsys.readouterr().err

    def test_snapshots_written_with_manifest(self, white_run):
        index = json.loads((white_run / "index.json").read_text())
        rels = index["files"]["snapshots"]
        # 2 trajectories x t in {1, 2, 3}
        assert len(rels) == 6
        assert len(index["snapshot_times"]) == 6
        for rel in rels:
            assert (white_run / rel).is_file()


class TestOracleValidate:

    def test_table_and_csv(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"nu": 0.05, "n": 64,
                                      "times": [0.1, 0.2]})
        out = tmp_path / "oracle"
        assert main(["oracle-validate", "--config", cfg,
                     "--out", str(out)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("t=0.1")
        assert "L2_err=" in lines[0]
        csv_lines = (out / "validation.csv").read_text().splitlines()
        assert csv_lines[0] == "t,L2_err,Linf_err"
        assert len(csv_lines) == 3
        index = json.loads((out / "index.json").read_text())
        assert index["kind"] == "oracle-validate"

    def test_overrides_without_config_file(self, capsys):
        assert main(["oracle-validate", "--nu=0.05", "--n=64",
                     "--times=[0.1]"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("t=0.1")


class TestSweep:

    def test_deterministic_sweep(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "nus": [0.4, 0.2, 0.1],
            "norms": ["n1_2^2"],
            "trajectory": {"n": 64},
            "initial": {"kind": "sine"},
            "t_end": 1.0,
        })
        out = tmp_path / "sweep"
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        csv_lines = (out / "sweep.csv").read_text().splitlines()
        assert csv_lines[0] == "nu,n1_2^2,n1_2^2_stderr"
        assert len(csv_lines) == 4
        fits = json.loads((out / "fits.json").read_text())
        assert fits["nus"] == [0.4, 0.2, 0.1]
        fit = fits["fits"]["n1_2^2"]
        assert {"exponent", "prefactor", "r_squared", "points"} <= set(fit)
        assert "n1_2^2: nu^" in capsys.readouterr().out

    def test_empty_nus_refused(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"trajectory": {"n": 64}})
        rc = main(["sweep", "--config", cfg, "--out", str(tmp_path / "s")])
        assert rc == 1
        assert "nonempty nus" in capsys.readouterr().err

    def test_explicit_initial_needs_fixed_n(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "nus": [0.4, 0.2, 0.1],
            "initial": {"kind": "sine"},
        })
        rc = main(["sweep", "--config", cfg, "--out", str(tmp_path / "s")])
        assert rc == 1
        assert "fixed n" in capsys.readouterr().err


class TestStructure:

    def test_outputs(self, white_run, tmp_path, capsys):
        out = tmp_path / "structure"
        assert main(["structure", "--run", str(white_run),
                     "--out", str(out),
                     "--interval=[0.03125,0.25]", "--trim=0.0"]) == 0
        fits = json.loads((out / "fits.json").read_text())
        assert fits["interval"] == [0.03125, 0.25]
        assert set(fits["structure"]) == {"1", "2", "3", "4"}
        for fit in fits["structure"].values():
            assert {"exponent", "prefactor", "r_squared",
                    "points"} <= set(fit)
        assert "exponent" in fits["flatness"]
        csv_lines = (out / "structure.csv").read_text().splitlines()
        assert csv_lines[0] == "ell,S_1,S_2,S_3,S_4,flatness"
        captured = capsys.readouterr().out
        assert "S_4: ell^" in captured
        assert "flatness: ell^" in captured

    def test_default_interval_too_narrow_on_coarse_grid(self, white_run,
                                                        tmp_path, capsys):
        # calibrated J2 at nu=0.04, trimmed, leaves two grid shifts on n=64
        rc = main(["structure", "--run", str(white_run),
                   "--out", str(tmp_path / "s")])
        assert rc == 1
        assert "scales" in capsys.readouterr().err


class TestSpectrum:

    def test_outputs(self, white_run, tmp_path, capsys):
        out = tmp_path / "spectrum"
        assert main(["spectrum", "--run", str(white_run),
                     "--out", str(out),
                     "--interval=[0.0625,0.5]", "--trim=0.0"]) == 0
        fits = json.loads((out / "fits.json").read_text())
        assert set(fits) == {"interval", "spectrum"}
        assert len(fits["spectrum"]["points"]) >= 3
        csv_lines = (out / "spectrum.csv").read_text().splitlines()
        assert csv_lines[0] == "k,E"
        assert len(csv_lines) == len(fits["spectrum"]["points"]) + 1
        assert "E(k): k^" in capsys.readouterr().out


class TestOccupation:

    def test_single_k(self, white_run, tmp_path, capsys):
        out = tmp_path / "occ"
        assert main(["occupation", "--run", str(white_run),
                     "--out", str(out), "--k=4"]) == 0
        report = json.loads((out / "occupation.json").read_text())
        assert report["nu"] == 0.04
        assert report["window"] == [1.0, 3.0]
        # 2 trajectories x records at t = 1.0, 1.25, ..., 3.0
        assert report["record_count"] == 18
        assert set(report["fractions"]) == {"4"}
        assert 0.0 <= report["fractions"]["4"] <= 1.0
        assert report["smallest_k"] is None
        assert "K=4: occupation" in capsys.readouterr().out

    def test_scan_covers_dyadic_ks(self, white_run, tmp_path):
        out = tmp_path / "occ"
        assert main(["occupation", "--run", str(white_run),
                     "--out", str(out)]) == 0
        report = json.loads((out / "occupation.json").read_text())
        assert set(report["fractions"]) == {"2", "4", "8", "16", "32", "64"}
        assert "smallest_k" in report

    def test_empty_window_refused(self, white_run, tmp_path, capsys):
        rc = main(["occupation", "--run", str(white_run),
                   "--out", str(tmp_path / "occ"), "--window=[100,200]"])
        assert rc == 1
        assert "no records inside window" in capsys.readouterr().err


class TestCouple:

    def test_outputs(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "trajectory": {"nu": 0.1, "n": 64,
                           "forcing": {"kind": "white", "k_max": 8}},
            "pairs": 2,
            "t_end": 2.0,
        })
        out = tmp_path / "couple"
        assert main(["couple", "--config", cfg, "--seed", "3",
                     "--out", str(out)]) == 0
        csv_lines = (out / "coupling.csv").read_text().splitlines()
        assert csv_lines[0] == "t,d0,d1"
        summary = json.loads((out / "summary.json").read_text())
        assert summary["pairs"] == 2
        assert len(summary["initial"]) == 2
        assert len(summary["decay_ratios"]) == 2
        # same noise on both legs: the L1 gap never grows
        assert summary["max_uptick"] < 1e-8
        for d0, d1 in zip(summary["initial"], summary["final"]):
            assert d1 < d0
        assert "mean decay ratio" in capsys.readouterr().out

    def test_needs_seed(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "trajectory": {"nu": 0.1, "n": 64,
                           "forcing": {"kind": "white", "k_max": 8}},
        })
        rc = main(["couple", "--config", cfg, "--out", str(tmp_path / "c")])
        assert rc == 1
        assert "stochastic" in capsys.readouterr().err


class TestStationary:

    def test_outputs(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "trajectory": {"nu": 0.1, "n": 64,
                           "forcing": {"kind": "white", "k_max": 8}},
            "ensemble": 4,
            "t_end": 9.0,
            "burn_in": 1.0,
            "snapshot_interval": 1.0,
            "observables": ["n0_2^2"],
        })
        out = tmp_path / "stat"
        assert main(["stationary", "--config", cfg, "--seed", "5",
                     "--out", str(out)]) == 0
        report = json.loads((out / "stationary.json").read_text())
        balance = report["balance"]
        assert {"window", "mean_h1_sq", "dissipation_rate", "trace_rate",
                "ratio", "balanced"} <= set(balance)
        assert balance["ratio"] is not None
        row = report["observables"]["n0_2^2"]
        # 4 trajectories x t in {1, ..., 9}
        assert row["samples"] == 36
        assert isinstance(row["consistent"], bool)
        assert row["measure_stderr"] > 0.0
        index = json.loads((out / "index.json").read_text())
        assert index["command"] == "stationary"
        assert len(index["files"]["snapshots"]) == 36
        assert "dissipation/injection ratio" in capsys.readouterr().out


class TestParser:

    def test_unknown_command_exits(self):
        with pytest.raises(SystemExit):
            main(["bogus"])

    def test_missing_required_out_exits(self, tmp_path):
        cfg = write_config(tmp_path, {"nus": [0.4, 0.2, 0.1]})
        with pytest.raises(SystemExit):
            main(["sweep", "--config", cfg])

    def test_config_must_be_an_object(self, tmp_path, capsys):
        path = tmp_path / "config.json"
        path.write_text("[1, 2]")
        rc = main(["simulate", "--config", str(path),
                   "--out", str(tmp_path / "run")])
        assert rc == 1
        assert "JSON object" in capsys.readouterr().err

    def test_missing_config_file_is_an_error(self, tmp_path, capsys):
        rc = main(["simulate", "--config", str(tmp_path / "nope.json"),
                   "--out", str(tmp_path / "run")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err
