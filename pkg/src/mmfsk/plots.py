"""Render sweep result tables to figure files next to the delimited output."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .harness import ResultTable


def render_table(table: ResultTable, path) -> None:
    """Dispatch on the table's command and save a PNG."""
    command = table.metadata.get("command", "")
    renderers = {
        "ser-spacing": _render_ser_spacing,
        "ser-rate": _render_ser_rate,
        "pam": _render_pam,
        "offsets": _render_offsets,
        "semantic": _render_semantic,
    }
    if command not in renderers:
        raise ValueError(f"no figure renderer for command {command!r}")
    fig = renderers[command](table)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _render_ser_spacing(table: ResultTable):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(table.column("spacing_hz"), table.column("ser"), "o-")
    ax.set_xscale("log")
    ax.set_xlabel("frequency spacing (Hz)")
    ax.set_ylabel("symbol error rate")
    ax.grid(True, which="both", linestyle="--", linewidth=0.5)
    fig.tight_layout()
    return fig


def _render_ser_rate(table: ResultTable):
    fig, ax = plt.subplots(figsize=(6, 4))
    rates = [r / 1e9 for r in table.column("sample_rate_hz")]
    cores = [c for c in table.columns if c.startswith("ser_core")]
    for name in cores:
        ax.plot(rates, table.column(name), "o-", linewidth=0.8, alpha=0.6, label=name)
    ax.plot(rates, table.column("ser_fused"), "ks-", linewidth=2, label="fused")
    ax.set_xlabel("sampling rate (GHz)")
    ax.set_ylabel("symbol error rate")
    ax.legend(fontsize=7, ncol=2)
    ax.grid(True, linestyle="--", linewidth=0.5)
    fig.tight_layout()
    return fig


def _render_pam(table: ResultTable):
    fig, ax = plt.subplots(figsize=(4.5, 4))
    row = table.rows[0]
    freq_ser = row[table.columns.index("freq_ser")]
    level_ser = row[table.columns.index("level_ser")]
    ax.bar(["frequency", "level"], [freq_ser, level_ser])
    ax.set_ylabel("error rate")
    fig.tight_layout()
    return fig


def _render_offsets(table: ResultTable):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(table.column("offset"), table.column("fraction"))
    ax.set_xlabel("decoded index minus true index")
    ax.set_ylabel("fraction of errors")
    ser = table.metadata.get("measured_ser", "")
    if ser:
        ax.set_title(f"symbol error rate {float(ser):.3f}")
    fig.tight_layout()
    return fig


def _render_semantic(table: ResultTable):
    fig, ax = plt.subplots(figsize=(6, 4))
    x = table.column(table.columns[0])
    if table.columns[0] == "sample_rate_hz":
        x = [v / 1e9 for v in x]
        ax.set_xlabel("sampling rate (GHz)")
    else:
        ax.set_xlabel("target symbol error rate")
    ax.plot(x, table.column("ser"), "o-", label="symbol error rate")
    ax.plot(x, table.column("class_err_greedy"), "s-", label="classification (greedy order)")
    ax.plot(x, table.column("class_err_baseline"), "^-", label="classification (original order)")
    ax.set_ylabel("error rate")
    ax.legend(fontsize=8)
    ax.grid(True, linestyle="--", linewidth=0.5)
    fig.tight_layout()
    return fig
