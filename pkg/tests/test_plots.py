import pytest

from mmfsk.harness import ResultTable
from mmfsk.plots import render_table

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def check_png(table, tmp_path):
    path = tmp_path / "fig.png"
    render_table(table, path)
    assert path.read_bytes()[:8] == PNG_MAGIC


def test_ser_spacing_figure(tmp_path):
    table = ResultTable(
        ["spacing_hz", "trials", "errors", "ser"],
        [[1e4, 100, 40, 0.4], [1e5, 100, 0, 0.0]],
        {"command": "ser-spacing"},
    )
    check_png(table, tmp_path)


def test_ser_rate_figure(tmp_path):
    cols = ["sample_rate_hz", "trials", "errors_core0", "errors_core1",
            "ser_core0", "ser_core1", "errors_fused", "ser_fused"]
    table = ResultTable(
        cols,
        [[6e9, 100, 3, 1, 0.03, 0.01, 0, 0.0], [9e9, 100, 0, 0, 0.0, 0.0, 0, 0.0]],
        {"command": "ser-rate"},
    )
    check_png(table, tmp_path)


def test_pam_figure(tmp_path):
    table = ResultTable(
        ["trials", "freq_errors", "freq_ser", "level_errors", "level_ser"],
        [[100, 0, 0.0, 2, 0.02]],
        {"command": "pam"},
    )
    check_png(table, tmp_path)


def test_offsets_figure(tmp_path):
    table = ResultTable(
        ["offset", "count", "fraction"],
        [[-2, 5, 0.05], [-1, 40, 0.4], [1, 45, 0.45], [2, 10, 0.1]],
        {"command": "offsets", "measured_ser": "0.43"},
    )
    check_png(table, tmp_path)


def test_semantic_figure(tmp_path):
    table = ResultTable(
        ["sample_rate_hz", "ser", "class_err_greedy", "class_err_baseline"],
        [[1e9, 0.45, 0.03, 0.15], [8e9, 0.08, 0.01, 0.03]],
        {"command": "semantic"},
    )
    check_png(table, tmp_path)


def test_unknown_command_rejected(tmp_path):
    table = ResultTable(["x"], [[1]], {"command": "mystery"})
    with pytest.raises(ValueError):
        render_table(table, tmp_path / "fig.png")
