"""Preset registry and the command-line front end."""

import json
import subprocess
import sys

import pytest

from shallowop.cli import main
from shallowop.errors import ConfigError
from shallowop.experiment import ExperimentConfig, read_report_csv
from shallowop.presets import (
    get_preset,
    preset_description,
    preset_dict,
    preset_names,
)


class TestPresets:
    def test_registry_covers_the_benchmarks(self):
        names = preset_names()
        for expected in ("integral_gaussian", "poisson_dirichlet", "superposition_sin",
                         "matrix_sin_trace", "sequence_decay", "hilbert_poisson",
                         "zero_map"):
            assert expected in names

    def test_every_preset_parses(self):
        for name in preset_names():
            cfg = get_preset(name)
            assert cfg.name == name
            assert preset_description(name)

    def test_preset_dict_is_a_private_copy(self):
        d = preset_dict("poisson_dirichlet")
        d["seed"] = 999
        d["ensemble"]["count"] = 1
        again = preset_dict("poisson_dirichlet")
        assert again["seed"] != 999
        assert again["ensemble"]["count"] != 1

    def test_unknown_preset_lists_alternatives(self):
        with pytest.raises(ConfigError, match="integral_gaussian"):
            get_preset("not_a_preset")

    def test_presets_pin_unregularized_fits(self):
        # the shipped benchmark ensembles need the minimum-norm path to converge
        for name in preset_names():
            assert get_preset(name).fit["lam"] == 0.0


def quick_config(tmp_path, **overrides):
    doc = {
        "name": "quick",
        "grid": {"a": 0.0, "b": 1.0, "n": 41},
        "ensemble": {"family": "band_limited", "count": 30, "radii": [1.0, 0.5]},
        "operator": {"kind": "poisson"},
        "seminorms": [{"kind": "lq", "q": 2.0}],
        "epsilons": [0.2, 0.1],
        "fit": {"lam": 0.0, "width": 32, "max_width": 256},
        "seed": 11,
    }
    doc.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


class TestCliRun:
    def test_run_writes_reports_and_exits_zero(self, tmp_path, capsys):
        cfg = quick_config(tmp_path)
        out = tmp_path / "results"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        assert (out / "report.csv").exists()
        assert (out / "report.json").exists()
        stdout = capsys.readouterr().out
        assert "epsilon=0.2" in stdout and "epsilon=0.1" in stdout

    def test_run_accepts_preset_name(self, tmp_path, capsys):
        out = tmp_path / "results"
        assert main(["run", "--config", "zero_map", "--out", str(out)]) == 0
        (row,) = read_report_csv(out / "report.csv")[:1]
        assert row["m_centers"] == 1

    def test_out_flag_overrides_config(self, tmp_path, capsys):
        cfg = quick_config(tmp_path, out=str(tmp_path / "from_config"))
        override = tmp_path / "flag_wins"
        assert main(["run", "--config", str(cfg), "--out", str(override)]) == 0
        assert (override / "report.csv").exists()
        assert not (tmp_path / "from_config").exists()

    def test_missing_out_dir_is_a_config_error(self, tmp_path, capsys):
        cfg = quick_config(tmp_path)
        assert main(["run", "--config", str(cfg)]) == 2
        assert "output directory" in capsys.readouterr().err

    def test_seed_flag_changes_results(self, tmp_path, capsys):
        cfg = quick_config(tmp_path)
        out_a, out_b, out_c = (tmp_path / n for n in ("a", "b", "c"))
        main(["run", "--config", str(cfg), "--out", str(out_a)])
        main(["run", "--config", str(cfg), "--out", str(out_b), "--seed", "12"])
        main(["run", "--config", str(cfg), "--out", str(out_c), "--seed", "11"])
        rows_a = read_report_csv(out_a / "report.csv")
        rows_b = read_report_csv(out_b / "report.csv")
        rows_c = read_report_csv(out_c / "report.csv")
        assert rows_a[0]["train_sup_error"] != rows_b[0]["train_sup_error"]
        assert rows_a[0]["train_sup_error"] == rows_c[0]["train_sup_error"]

    def test_threads_flag_reproduces_serial_numbers(self, tmp_path, capsys):
        cfg = quick_config(tmp_path)
        out_a, out_b = tmp_path / "serial", tmp_path / "threaded"
        main(["run", "--config", str(cfg), "--out", str(out_a)])
        main(["run", "--config", str(cfg), "--out", str(out_b), "--threads", "2"])
        rows_a = read_report_csv(out_a / "report.csv")
        rows_b = read_report_csv(out_b / "report.csv")
        for a, b in zip(rows_a, rows_b):
            a.pop("wall_ms"), b.pop("wall_ms")
            assert a == b

    def test_missing_config_file_diagnosed(self, tmp_path, capsys):
        assert main(["run", "--config", str(tmp_path / "nope.json")]) == 2
        err = capsys.readouterr().err
        assert "nope.json" in err

    def test_invalid_json_diagnosed(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["run", "--config", str(bad)]) == 2
        assert "bad.json" in capsys.readouterr().err

    def test_invalid_field_diagnosed_by_name(self, tmp_path, capsys):
        cfg = quick_config(tmp_path, epsilons=[-0.5])
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
        assert "epsilons" in capsys.readouterr().err

    def test_negative_seed_rejected(self, tmp_path, capsys):
        cfg = quick_config(tmp_path)
        code = main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"),
                     "--seed", "-3"])
        assert code == 2
        assert "seed" in capsys.readouterr().err

    def test_bad_thread_count_rejected(self, tmp_path, capsys):
        cfg = quick_config(tmp_path)
        code = main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"),
                     "--threads", "0"])
        assert code == 2
        assert "threads" in capsys.readouterr().err


class TestCliPresets:
    def test_list_names_every_preset(self, capsys):
        assert main(["presets", "list"]) == 0
        out = capsys.readouterr().out
        for name in preset_names():
            assert name in out

    def test_show_emits_loadable_json(self, tmp_path, capsys):
        assert main(["presets", "show", "poisson_dirichlet"]) == 0
        doc = json.loads(capsys.readouterr().out)
        cfg = ExperimentConfig.from_dict(doc)
        assert cfg.name == "poisson_dirichlet"

    def test_show_unknown_preset_fails(self, capsys):
        assert main(["presets", "show", "wat"]) == 2
        assert "wat" in capsys.readouterr().err


class TestConsoleScript:
    def test_module_entry_point_runs(self):
        proc = subprocess.run(
            [sys.executable, "-m", "shallowop.cli", "presets", "list"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "integral_gaussian" in proc.stdout
