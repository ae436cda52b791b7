"""Tests for argument parsing, precedence rules, and the main dispatch."""

import json

import numpy as np
import pytest

from uat_bench.cli import Command, main, parse_args
from uat_bench.experiment import load_error_table
from uat_bench.network import load_parameters

TINY_SWEEP = [
    "--train-k", "8", "--test-k", "12", "--widths", "1,2", "--depths", "1",
    "--restarts", "1", "--epochs", "2", "--batch-size", "16",
]


class TestParseArgs:
    def test_sweep_with_seed(self):
        command = parse_args(["sweep", "--function", "ackley", "--seed", "7"])
        assert command.verb == "sweep"
        assert command.config.function == "ackley"
        assert command.config.master_seed == 7
        # untouched fields keep their defaults
        assert command.config.train_k == 320
        assert command.config.restarts == 200
        assert command.config.widths == tuple(range(1, 11))

    def test_train_single_cell(self):
        command = parse_args(
            ["train", "--function", "rosenbrock", "--width", "4", "--depth", "6"]
        )
        assert command.verb == "train"
        assert command.config.widths == (4,)
        assert command.config.depths == (6,)

    def test_unknown_function_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            parse_args(["sweep", "--function", "sphere"])
        assert exc.value.code == 1

    def test_unknown_verb_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            parse_args(["frobnicate"])
        assert exc.value.code == 1

    def test_missing_function_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            parse_args(["sweep"])
        assert exc.value.code == 1

    def test_unknown_option_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            parse_args(["grad-check", "--wibble", "3"])
        assert exc.value.code == 1

    def test_invalid_widths_list(self):
        with pytest.raises(SystemExit) as exc:
            parse_args(["sweep", "--function", "ackley", "--widths", "1,two"])
        assert exc.value.code == 1

    def test_out_of_range_value_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            parse_args(["sweep", "--function", "ackley", "--restarts", "0"])
        assert exc.value.code == 1

    def test_config_file_supplies_fields(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({
            "function": "borehole", "train_k": 16, "master_seed": 9,
            "widths": [1, 3], "out_dir": str(tmp_path / "out"),
        }))
        command = parse_args(["sweep", "--config", str(path)])
        assert command.config.function == "borehole"
        assert command.config.train_k == 16
        assert command.config.master_seed == 9
        assert command.config.widths == (1, 3)
        assert str(command.config.out_dir) == str(tmp_path / "out")

    def test_flags_override_config_file_per_field(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({
            "function": "borehole", "train_k": 16, "epochs": 7, "master_seed": 9,
        }))
        command = parse_args([
            "sweep", "--config", str(path), "--train-k", "32", "--seed", "1",
        ])
        assert command.config.train_k == 32       # flag wins
        assert command.config.master_seed == 1    # flag wins
        assert command.config.epochs == 7         # file value survives
        assert command.config.function == "borehole"

    def test_invalid_json_config(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text("not json {")
        with pytest.raises(SystemExit) as exc:
            parse_args(["sweep", "--config", str(path)])
        assert exc.value.code == 1

    def test_unknown_config_field_rejected(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"function": "ackley", "learning_rate": 1.0}))
        with pytest.raises(SystemExit) as exc:
            parse_args(["sweep", "--config", str(path)])
        assert exc.value.code == 1

    def test_env_var_supplies_out_dir(self, monkeypatch, tmp_path):
        monkeypatch.setenv("UAT_BENCH_OUT", str(tmp_path / "env"))
        command = parse_args(["sweep", "--function", "ackley"])
        assert str(command.config.out_dir) == str(tmp_path / "env")

    def test_out_flag_beats_env_var(self, monkeypatch, tmp_path):
        monkeypatch.setenv("UAT_BENCH_OUT", str(tmp_path / "env"))
        command = parse_args(
            ["sweep", "--function", "ackley", "--out", str(tmp_path / "flag")]
        )
        assert str(command.config.out_dir) == str(tmp_path / "flag")

    def test_config_out_dir_beats_env_var(self, monkeypatch, tmp_path):
        monkeypatch.setenv("UAT_BENCH_OUT", str(tmp_path / "env"))
        path = tmp_path / "c.json"
        path.write_text(json.dumps({
            "function": "ackley", "out_dir": str(tmp_path / "file"),
        }))
        command = parse_args(["sweep", "--config", str(path)])
        assert str(command.config.out_dir) == str(tmp_path / "file")

    def test_default_out_dir_is_cwd(self, monkeypatch):
        monkeypatch.delenv("UAT_BENCH_OUT", raising=False)
        command = parse_args(["sweep", "--function", "ackley"])
        assert str(command.config.out_dir) == "."

    def test_no_normalize_flag(self):
        command = parse_args(["sweep", "--function", "ackley", "--no-normalize"])
        assert command.config.normalize is False

    def test_emit_surface_k(self):
        command = parse_args(["emit-surface", "--function", "ackley", "--k", "9"])
        assert command.surface_k == 9
        with pytest.raises(SystemExit):
            parse_args(["emit-surface", "--function", "ackley", "--k", "1"])

    def test_grad_check_options(self):
        command = parse_args(["grad-check", "--trials", "5", "--seed", "3"])
        assert command.trials == 5
        assert command.check_seed == 3

    def test_list_functions_takes_no_config(self):
        command = parse_args(["list-functions"])
        assert command == Command(verb="list-functions")


class TestMain:
    def test_list_functions(self, capsys):
        assert main(parse_args(["list-functions"])) == 0
        out = capsys.readouterr().out
        assert "ackley" in out and "rosenbrock" in out and "borehole" in out
        assert "[-5, 5]" in out

    def test_grad_check_passes(self, capsys):
        assert main(parse_args(["grad-check", "--trials", "5"])) == 0
        assert "max relative error" in capsys.readouterr().out

    def test_emit_surface_writes_file(self, tmp_path, capsys):
        command = parse_args(
            ["emit-surface", "--function", "ackley", "--k", "4",
             "--out", str(tmp_path)]
        )
        assert main(command) == 0
        assert (tmp_path / "fig_ackley.dat").exists()

    def test_sweep_writes_table_surface_and_checkpoint(self, tmp_path, capsys):
        command = parse_args(
            ["sweep", "--function", "ackley", "--seed", "3",
             "--out", str(tmp_path), *TINY_SWEEP]
        )
        assert main(command) == 0
        depths, columns = load_error_table(tmp_path / "ackley.dat")
        assert depths == [1]
        assert set(columns) == {"width_1", "width_2"}
        assert (tmp_path / "fig_ackley.dat").exists()
        assert (tmp_path / "ackley.checkpoint").exists()
        out = capsys.readouterr().out
        assert out.count("best error") == 2  # one summary line per cell

    def test_sweep_onto_finished_checkpoint_is_runtime_error(self, tmp_path, capsys):
        argv = ["sweep", "--function", "ackley", "--seed", "3",
                "--out", str(tmp_path), *TINY_SWEEP]
        assert main(parse_args(argv)) == 0
        capsys.readouterr()
        assert main(parse_args(argv)) == 2
        assert "resume" in capsys.readouterr().err

    def test_resume_completes_partial_checkpoint(self, tmp_path, capsys):
        argv_tail = ["--function", "ackley", "--seed", "3",
                     "--out", str(tmp_path), *TINY_SWEEP]
        assert main(parse_args(["sweep", *argv_tail])) == 0
        reference = (tmp_path / "ackley.dat").read_bytes()

        checkpoint = tmp_path / "ackley.checkpoint"
        kept = checkpoint.read_text().splitlines()[:2]
        for stale in ("ackley.dat", "fig_ackley.dat"):
            (tmp_path / stale).unlink()
        checkpoint.write_text("\n".join(kept) + "\n")

        assert main(parse_args(["resume", *argv_tail])) == 0
        assert (tmp_path / "ackley.dat").read_bytes() == reference
        assert "[checkpoint]" in capsys.readouterr().out

    def test_train_saves_loadable_network(self, tmp_path, capsys):
        command = parse_args(
            ["train", "--function", "ackley", "--width", "2", "--depth", "1",
             "--restarts", "1", "--epochs", "2", "--train-k", "8",
             "--test-k", "12", "--batch-size", "16", "--out", str(tmp_path)]
        )
        assert main(command) == 0
        path = tmp_path / "ackley_w2_d1.network"
        assert path.exists()
        params = load_parameters(path)
        assert params.layers[0][0].shape == (2, 2)

    def test_runtime_failure_reports_to_stderr(self, tmp_path, capsys):
        config = tmp_path / "c.json"
        config.write_text(json.dumps({"function": "ackley"}))
        bad = tmp_path / "blocked"
        bad.write_text("a file where the out dir must go")
        command = parse_args(
            ["emit-surface", "--config", str(config), "--out", str(bad)]
        )
        assert main(command) == 2
        assert capsys.readouterr().err.startswith("uat-bench:")
