import json
from dataclasses import replace

import numpy as np
import pytest

from mmfsk import FiberSpec, FrequencyAlphabet, PamScheme, ReceiverSpec
from mmfsk.config import DEFAULTS, load_settings, parse_config_text
from mmfsk.harness import (
    ConfigError,
    OffsetTuning,
    ResultTable,
    SemanticConfig,
    SweepConfig,
    run_offset_hist,
    run_pam,
    run_semantic,
    run_ser_vs_rate,
    run_ser_vs_spacing,
    write_csv,
    write_json,
)


def small_sweep(**kw):
    base = dict(
        fiber=FiberSpec(1000.0, 1.45, 0.0084, 512, 2e-6, 99),
        rx=ReceiverSpec(8e9, 2e-8, 5e-11, 25.0, 8),
        alphabet=FrequencyAlphabet(0.0, 600e3, 32),
        pam=PamScheme((0.25, 0.5, 0.75, 1.0)),
        cores=3,
        trials=300,
        master_seed=5,
        spacing_hz=(2e4, 1e5, 6e5),
        sample_rate_hz=(6e9, 9e9),
        fusion=True,
    )
    base.update(kw)
    return SweepConfig(**base)


class TestSweepConfigValidation:
    def test_rejects_zero_trials(self):
        with pytest.raises(ConfigError):
            small_sweep(trials=0)

    def test_rejects_zero_cores(self):
        with pytest.raises(ConfigError):
            small_sweep(cores=0)

    def test_rejects_negative_seed(self):
        with pytest.raises(ConfigError):
            small_sweep(master_seed=-1)


class TestSerVsSpacing:
    def test_requires_axis(self):
        with pytest.raises(ConfigError):
            run_ser_vs_spacing(small_sweep(spacing_hz=()))

    def test_shape_and_ranges(self):
        table = run_ser_vs_spacing(small_sweep())
        assert table.columns == ["spacing_hz", "trials", "errors", "ser"]
        assert table.column("spacing_hz") == [2e4, 1e5, 6e5]
        for ser in table.column("ser"):
            assert 0.0 <= ser <= 1.0

    def test_bit_identical_reruns_and_workers(self, tmp_path):
        cfg = small_sweep()
        paths = [tmp_path / f"run{i}.csv" for i in range(3)]
        write_csv(run_ser_vs_spacing(cfg), paths[0])
        write_csv(run_ser_vs_spacing(cfg), paths[1])
        write_csv(run_ser_vs_spacing(cfg, workers=2), paths[2])
        blobs = [p.read_bytes() for p in paths]
        assert blobs[0] == blobs[1] == blobs[2]


class TestPam:
    def test_noiseless_is_error_free(self):
        cfg = small_sweep(rx=ReceiverSpec(8e9, 2e-8, 5e-11, float("inf"), 8))
        table = run_pam(cfg)
        row = dict(zip(table.columns, table.rows[0]))
        assert row["freq_ser"] == 0.0
        assert row["level_ser"] == 0.0


class TestSerVsRate:
    def test_requires_fusion(self):
        with pytest.raises(ConfigError):
            run_ser_vs_rate(small_sweep(fusion=False))

    def test_requires_axis(self):
        with pytest.raises(ConfigError):
            run_ser_vs_rate(small_sweep(sample_rate_hz=()))

    def test_fused_never_worse_than_best_core(self):
        cfg = small_sweep(rx=ReceiverSpec(8e9, 2e-8, 5e-11, 8.0, 8), trials=400)
        table = run_ser_vs_rate(cfg)
        for row in table.rows:
            r = dict(zip(table.columns, row))
            per_core = [r[f"ser_core{c}"] for c in range(cfg.cores)]
            assert r["ser_fused"] <= min(per_core)


class TestOffsetHist:
    def test_fractions_sum_to_one(self, settings):
        cfg = replace(settings.sweep, trials=2000)
        table = run_offset_hist(cfg, settings.offsets)
        fractions = table.column("fraction")
        assert sum(fractions) == pytest.approx(1.0, abs=1e-9)
        assert all(isinstance(o, int) for o in table.column("offset"))
        assert "tuned_spacing_hz" in table.metadata
        assert 0.0 < float(table.metadata["measured_ser"]) < 1.0

    def test_untunable_band_raises(self, settings):
        cfg = replace(settings.sweep, trials=100)
        tuning = OffsetTuning(probe_trials=100, grid_min_hz=1e6, grid_max_hz=2e6, grid_points=3)
        with pytest.raises(RuntimeError):
            run_offset_hist(cfg, tuning)


class TestSemantic:
    def test_zero_error_rate_matches_clean_error(self, settings):
        sem = SemanticConfig(
            mode="perturb", error_rates=(0.0,), noise_seeds=1, sequences=500
        )
        table = run_semantic(settings.sweep, sem)
        clean = float(table.metadata["clean_test_error"])
        row = dict(zip(table.columns, table.rows[0]))
        assert row["ser"] == 0.0
        assert row["class_err_greedy"] == clean
        assert row["class_err_baseline"] == clean

    def test_perturb_path_robustness_separation(self, settings):
        table = run_semantic(settings.sweep, SemanticConfig(mode="perturb"))
        assert len(table.rows) == 4
        for row in table.rows:
            r = dict(zip(table.columns, row))
            assert r["class_err_greedy"] < r["ser"]
            assert r["class_err_greedy"] < r["class_err_baseline"]


class TestConfigParsing:
    def test_comments_and_spacing(self):
        raw = parse_config_text(
            "# a comment\n\n  trials = 123  \nfiber.modes=64\n"
        )
        assert raw == {"trials": "123", "fiber.modes": "64"}

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            parse_config_text("fiber.coating = teflon\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            parse_config_text("just some words\n")

    def test_bad_value_type(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("trials = many\n")
        with pytest.raises(ConfigError):
            load_settings(path)

    def test_seed_override(self):
        settings = load_settings(None, master_seed=77)
        assert settings.sweep.master_seed == 77

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_settings("/nonexistent/config.cfg")

    def test_defaults_cover_all_keys(self):
        settings = load_settings()
        assert settings.sweep.alphabet.size == int(DEFAULTS["alphabet.size"])
        assert settings.semantic.vocab_size == int(DEFAULTS["semantic.vocab"])


class TestConfigEcho:
    def test_metadata_reproduces_run(self, tmp_path):
        cfg = small_sweep()
        table = run_ser_vs_spacing(cfg)
        echo = {k: v for k, v in table.metadata.items() if k in DEFAULTS}
        path = tmp_path / "echo.cfg"
        path.write_text("".join(f"{k} = {v}\n" for k, v in echo.items()))
        settings = load_settings(path)
        again = run_ser_vs_spacing(settings.sweep)
        assert again.rows == table.rows


class TestTableOutput:
    @pytest.fixture()
    def table(self):
        return ResultTable(
            ["x", "ser"],
            [[1, 0.125], [2, 1.0 / 3.0]],
            {"command": "demo", "master_seed": "1"},
        )

    def test_csv_round_trip_precision(self, table, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(table, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "# command=demo"
        assert lines[2] == "x,ser"
        assert float(lines[4].split(",")[1]) == 1.0 / 3.0

    def test_json_structure(self, table, tmp_path):
        path = tmp_path / "t.json"
        write_json(table, path)
        payload = json.loads(path.read_text())
        assert set(payload) == {"metadata", "rows"}
        assert payload["rows"][1]["ser"] == 1.0 / 3.0

    def test_column_accessor(self, table):
        assert table.column("x") == [1, 2]
        with pytest.raises(ValueError):
            table.column("missing")
