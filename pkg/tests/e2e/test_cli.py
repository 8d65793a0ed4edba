"""End-to-end tests of the copqaoa command line."""

import json

import pytest

from copula_qaoa.infrastructure.repositories import RunDirectory, load_instance, load_uc
from copula_qaoa.main import build_parser, main


class TestGen:
    """Tests for the gen subcommand."""

    def test_knapsack(self, tmp_path, capsys):
        """An inverse strongly correlated instance is written."""
        target = tmp_path / "isc.txt"
        assert main(["gen", "--n", "10", "--seed", "4", "--out", str(target)]) == 0
        assert load_instance(target).n == 10
        assert "isc-n10-s4" in capsys.readouterr().out

    def test_unit_commitment(self, tmp_path):
        """--kind uc writes a unit-commitment instance."""
        target = tmp_path / "uc.txt"
        argv = ["gen", "--kind", "uc", "--n", "4", "--seed", "1", "--out", str(target)]
        assert main(argv) == 0
        assert load_uc(target).n == 4

    def test_missing_arguments(self, capsys):
        """gen needs a size, a seed and a target."""
        assert main(["gen", "--n", "5"]) == 1
        assert "error:" in capsys.readouterr().err


class TestSolve:
    """Tests for the solve subcommand."""

    @pytest.mark.parametrize("method", ["greedy", "dp", "bnb", "brute", "random"])
    def test_methods(self, tmp_path, instance_file, method):
        """Every classical method writes a run directory."""
        out = tmp_path / method
        argv = ["solve", "--method", method, "--instance", str(instance_file),
                "--seed", "0", "--shots", "200", "--out", str(out)]
        assert main(argv) == 0
        assert (out / RunDirectory.MANIFEST).exists()

    def test_dp_prints_ratio(self, tmp_path, instance_file, capsys):
        """The summary shows the report of the run."""
        argv = ["solve", "--method", "dp", "--instance", str(instance_file),
                "--seed", "0", "--out", str(tmp_path / "run")]
        main(argv)
        assert "approximation ratio: 1.000000" in capsys.readouterr().out

    def test_missing_seed(self, tmp_path, instance_file, capsys):
        """Runs need a seed."""
        argv = ["solve", "--instance", str(instance_file), "--out", str(tmp_path / "run")]
        assert main(argv) == 1
        assert "seed" in capsys.readouterr().err

    def test_bad_instance_file(self, tmp_path, capsys):
        """Malformed files exit with status 1."""
        broken = tmp_path / "broken.txt"
        broken.write_text("3 50\n60 10\n")
        argv = ["solve", "--instance", str(broken), "--seed", "0", "--out", str(tmp_path / "r")]
        assert main(argv) == 1
        assert "instance" in capsys.readouterr().err


class TestQaoa:
    """Tests for the circuit subcommands."""

    def test_run_fixed_angles(self, tmp_path, instance_file):
        """qaoa-run samples the given layers."""
        out = tmp_path / "run"
        argv = ["qaoa-run", "--instance", str(instance_file), "--seed", "1", "--shots", "500",
                "--gammas", "0.05,0.02", "--betas", "0.4,0.3", "--out", str(out)]
        assert main(argv) == 0
        circuit = json.loads((out / RunDirectory.CIRCUIT).read_text())
        assert circuit["gammas"] == [0.05, 0.02]

    def test_train(self, tmp_path, instance_file):
        """qaoa-train trains one layer by default."""
        out = tmp_path / "run"
        argv = ["qaoa-train", "--instance", str(instance_file), "--seed", "1", "--shots", "500",
                "--restarts", "2", "--budget", "6", "--out", str(out)]
        assert main(argv) == 0
        trace = json.loads((out / RunDirectory.TRACE).read_text())
        assert len(trace["layers"]) == 1

    def test_grid(self, tmp_path, instance_file):
        """qaoa-grid writes the landscape and heatmap."""
        out = tmp_path / "run"
        argv = ["qaoa-grid", "--instance", str(instance_file), "--seed", "1", "--shots", "500",
                "--grid-size", "3", "--out", str(out)]
        assert main(argv) == 0
        assert (out / RunDirectory.HEATMAP_SVG).exists()
        assert not (out / RunDirectory.TRACE).exists()

    def test_grid_then_train(self, tmp_path, instance_file):
        """--train continues from the grid argmax."""
        out = tmp_path / "run"
        argv = ["qaoa-grid", "--train", "--instance", str(instance_file), "--seed", "1",
                "--shots", "500", "--grid-size", "3", "--restarts", "2", "--budget", "4",
                "--out", str(out)]
        assert main(argv) == 0
        assert (out / RunDirectory.TRACE).exists()

    def test_mismatched_angles(self, tmp_path, instance_file):
        """Angle lists must have equal length."""
        argv = ["qaoa-run", "--instance", str(instance_file), "--seed", "1",
                "--gammas", "0.1,0.2", "--betas", "0.3", "--out", str(tmp_path / "run")]
        assert main(argv) == 1

    def test_config_file(self, tmp_path, instance_file):
        """Flags override values from --config."""
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"method": "copqaoa", "seed": 3, "shots": 100,
                                      "gammas": [0.1], "betas": [0.2]}))
        out = tmp_path / "run"
        argv = ["qaoa-run", "--config", str(config), "--instance", str(instance_file),
                "--shots", "300", "--out", str(out)]
        assert main(argv) == 0
        manifest = json.loads((out / RunDirectory.MANIFEST).read_text())
        assert manifest["config"]["shots"] == 300
        assert manifest["config"]["seed"] == 3


class TestUcScan:
    """Tests for the uc-scan subcommand."""

    def test_scan(self, tmp_path, uc_file, capsys):
        """The summary names the best commitment."""
        out = tmp_path / "run"
        argv = ["uc-scan", "--instance", str(uc_file), "--seed", "0", "--points", "100",
                "--out", str(out)]
        assert main(argv) == 0
        assert '"commitment": "101"' in capsys.readouterr().out
        assert (out / RunDirectory.SCAN).exists()

    def test_quantum_solver(self, tmp_path, uc_file):
        """--solver copqaoa drives the scan with sampled knapsack answers."""
        out = tmp_path / "run"
        argv = ["uc-scan", "--instance", str(uc_file), "--seed", "1", "--points", "20",
                "--solver", "copqaoa", "--depth", "0", "--shots", "500", "--no-refine",
                "--out", str(out)]
        assert main(argv) == 0
        solution = json.loads((out / RunDirectory.SOLUTION).read_text())
        assert solution["relative_gap"] >= -1e-9
        assert solution["refinements"] == []


class TestReportAndReplay:
    """Tests for report and replay."""

    def test_report(self, tmp_path, instance_file, capsys):
        """report recomputes metrics from a samples file."""
        out = tmp_path / "run"
        main(["solve", "--method", "random", "--instance", str(instance_file), "--seed", "0",
              "--shots", "300", "--out", str(out)])
        capsys.readouterr()
        argv = ["report", "--instance", str(instance_file),
                "--samples", str(out / RunDirectory.SAMPLES), "--top-k", "10"]
        assert main(argv) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["top_k_used"] == 10
        saved = json.loads((out / RunDirectory.METRICS).read_text())
        assert report["valid_ratio"] == saved["valid_ratio"]

    def test_replay(self, tmp_path, instance_file):
        """replay reproduces the samples of a run."""
        out = tmp_path / "run"
        main(["qaoa-run", "--instance", str(instance_file), "--seed", "8", "--shots", "400",
              "--gammas", "0.05", "--betas", "0.4", "--out", str(out)])
        again = tmp_path / "again"
        assert main(["replay", str(out / RunDirectory.MANIFEST), "--out", str(again)]) == 0
        assert (out / RunDirectory.SAMPLES).read_bytes() == (
            again / RunDirectory.SAMPLES
        ).read_bytes()

    def test_unknown_command(self):
        """argparse rejects unknown subcommands."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["anneal"])
