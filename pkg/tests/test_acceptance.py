"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines live.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from mmfsk import (
    FiberSpec,
    FrequencyAlphabet,
    IntensityTrace,
    PamScheme,
    ReceiverSpec,
    decode_frequency,
    delay_spread,
    ssb_spectrum,
    ssb_tone,
    synthesize_channel,
)
from mmfsk.cli import main
from mmfsk.harness import (
    SemanticConfig,
    SweepConfig,
    run_offset_hist,
    run_pam,
    run_semantic,
    run_ser_vs_rate,
    run_ser_vs_spacing,
    trial_rng,
    write_csv,
)
from mmfsk.modulation import ToneCommand


def report(criterion: int, description: str, passed: bool) -> None:
    status = "PASS" if passed else "FAIL"
    print(f"[acceptance {criterion:>2}] {status} - {description}")
    assert passed, f"criterion {criterion}: {description}"


def test_criterion_1_spectral_efficiency(capsys):
    assert main(["eff"]) == 0
    seven_bit = float(capsys.readouterr().out.strip())
    args = ["eff", "--bits-per-symbol", "14"]
    assert main(args) == 0
    fourteen_bit = float(capsys.readouterr().out.strip())
    ok = abs(seven_bit - 4.56) <= 0.01 and abs(fourteen_bit - 9.12) <= 0.01
    with capsys.disabled():
        report(1, f"eff prints 4.56 and 9.12 (got {seven_bit:.4f}, {fourteen_bit:.4f})", ok)


def test_criterion_2_delay_spread_formula():
    cases = [
        (1000.0, 1.45, 0.001),
        (2500.0, 1.47, 0.004),
        (500.0, 1.46, 0.0084),
    ]
    ok = True
    for length, n, dn in cases:
        spec = FiberSpec(length, n, dn, 64, 2e-6, 0)
        # independent evaluation with a different operation order
        byhand = (length * dn) / (299_792_458.0 * n)
        ok &= abs(delay_spread(spec) - byhand) <= 1e-12 * byhand
    report(2, "delay spread matches hand evaluation to 1e-12 relative on 3 sets", ok)


def test_criterion_3_ssb_behavior():
    vpi, fm = 4.0, 1e6
    lines = ssb_spectrum(0.05 * vpi, vpi, fm, 16e-6, 64e6)
    strongest = max(lines, key=lambda l: l.power_db)
    image = min(lines, key=lambda l: abs(l.frequency_hz + fm))
    suppression = strongest.power_db - image.power_db
    lines_small = ssb_spectrum(0.01 * vpi, vpi, fm, 16e-6, 64e6)
    front = min(lines_small, key=lambda l: abs(l.frequency_hz - fm))
    _, linear = ssb_tone(ToneCommand(1.0, 0.01 * vpi, vpi, 0.0, fm))
    rel = abs(front.amplitude - linear) / linear
    ok = suppression >= 30.0 and rel < 0.01
    report(3, f"image suppressed {suppression:.0f} dB; linearized amplitude off by {rel:.2%}", ok)


def test_criterion_4_decoder_soundness(settings, default_bank):
    bank = default_bank
    s = bank.alphabet.size
    ok_oracle = True
    for t in range(100):
        rng = trial_rng(0xACCE9, 0, t)
        sym = int(rng.integers(s))
        fp = bank.traces[0, sym]
        std = fp.max() / 10.0 ** (10.0 / 20.0)
        samples = fp + rng.normal(0.0, std, len(fp))
        trace = IntensityTrace(samples, bank.rx.sample_rate_hz, 0)
        corr = [float(np.corrcoef(samples, bank.traces[0, i])[0, 1]) for i in range(s)]
        ok_oracle &= decode_frequency(trace, bank, 0)[0] == int(np.argmax(corr))
    ok_scale = True
    for t in range(25):
        rng = trial_rng(0xACCE9, 1, t)
        sym = int(rng.integers(s))
        fp = bank.traces[0, sym]
        std = fp.max() / 10.0 ** (10.0 / 20.0)
        samples = fp + rng.normal(0.0, std, len(fp))
        base = decode_frequency(IntensityTrace(samples, bank.rx.sample_rate_hz, 0), bank, 0)
        for a in (0.5, 3.0, 11.0):
            scaled = IntensityTrace(a * samples, bank.rx.sample_rate_hz, 0)
            ok_scale &= decode_frequency(scaled, bank, 0)[0] == base[0]
    report(4, "decoder equals brute-force oracle on 100 trials; scale invariant", ok_oracle and ok_scale)


def test_criterion_5_ser_vs_spacing_shape(settings):
    cfg = replace(settings.sweep, trials=10_000)
    table = run_ser_vs_spacing(cfg)
    ser = table.column("ser")
    ok = all(b <= a for a, b in zip(ser, ser[1:])) and ser[-1] == 0.0
    report(5, f"SER non-increasing over spacing grid and 0 at the top: {ser}", ok)


def test_criterion_6_pam4(settings):
    cfg = replace(settings.sweep, trials=10_000)
    clean = run_pam(cfg)
    row = dict(zip(clean.columns, clean.rows[0]))
    noisy_cfg = replace(cfg, rx=replace(cfg.rx, snr_db=0.0))
    noisy = run_pam(noisy_cfg)
    noisy_row = dict(zip(noisy.columns, noisy.rows[0]))
    ok = (
        row["freq_ser"] == 0.0
        and row["level_ser"] == 0.0
        and noisy_row["level_ser"] > 0.0
    )
    report(
        6,
        "PAM-4 error-free at 25 dB over 10k trials; level errors appear at 0 dB "
        f"(level SER {noisy_row['level_ser']:.3f})",
        ok,
    )


def test_criterion_7_offset_histogram(settings):
    cfg = replace(settings.sweep, trials=10_000)
    table = run_offset_hist(cfg, settings.offsets)
    ser = float(table.metadata["measured_ser"])
    offsets = np.array(table.column("offset"))
    fractions = np.array(table.column("fraction"))
    share_one = float(fractions[np.abs(offsets) == 1].sum())
    max_abs = int(np.abs(offsets).max())
    ok = 0.38 <= ser <= 0.48 and share_one > 0.5 and max_abs <= 4
    report(
        7,
        f"offset histogram at SER {ser:.3f}: |1|-share {share_one:.2f}, max |offset| {max_abs}",
        ok,
    )


def test_criterion_8_multicore_fusion(settings):
    cfg = replace(
        settings.sweep,
        rx=replace(settings.sweep.rx, snr_db=14.0),
        trials=10_000,
        master_seed=2,
        fusion=True,
    )
    table = run_ser_vs_rate(cfg)
    k = cfg.cores
    dominance = True
    rescue_point = False
    top_clean = True
    for i, row in enumerate(table.rows):
        r = dict(zip(table.columns, row))
        per_core = [r[f"ser_core{c}"] for c in range(k)]
        dominance &= r["ser_fused"] <= min(per_core)
        if max(per_core) > 0.0 and r["ser_fused"] == 0.0:
            rescue_point = True
        if i == len(table.rows) - 1:
            top_clean = all(v == 0.0 for v in per_core)
    ok = dominance and rescue_point and top_clean
    report(
        8,
        "fused SER <= min per-core at every rate; some core errs while fusion "
        "does not; top rate error-free on all cores",
        ok,
    )


def test_criterion_9_semantic_robustness(settings):
    table = run_semantic(settings.sweep, settings.semantic)
    ok = True
    summary = []
    for row in table.rows:
        r = dict(zip(table.columns, row))
        ok &= r["class_err_greedy"] < r["ser"]
        ok &= r["class_err_greedy"] < r["class_err_baseline"]
        summary.append(
            f"ser {r['ser']:.2f}: greedy {r['class_err_greedy']:.3f} "
            f"< base {r['class_err_baseline']:.3f}"
        )
    report(9, "; ".join(summary), ok)


def test_criterion_10_determinism(settings, tmp_path):
    fiber = FiberSpec(1000.0, 1.45, 0.0084, 512, 2e-6, 99)
    rx = ReceiverSpec(8e9, 2e-8, 5e-11, 20.0, 8)
    cfg = SweepConfig(
        fiber=fiber,
        rx=rx,
        alphabet=FrequencyAlphabet(0.0, 600e3, 32),
        pam=PamScheme((0.25, 0.5, 0.75, 1.0)),
        cores=3,
        trials=500,
        master_seed=31,
        spacing_hz=(2e4, 6e5),
        sample_rate_hz=(6e9, 9e9),
        fusion=True,
    )
    blobs = {}
    for name, run in (
        ("spacing-w1", lambda: run_ser_vs_spacing(cfg, workers=1)),
        ("spacing-w1-again", lambda: run_ser_vs_spacing(cfg, workers=1)),
        ("spacing-w3", lambda: run_ser_vs_spacing(cfg, workers=3)),
        ("rate-w1", lambda: run_ser_vs_rate(cfg, workers=1)),
        ("rate-w2", lambda: run_ser_vs_rate(cfg, workers=2)),
    ):
        path = tmp_path / f"{name}.csv"
        write_csv(run(), path)
        blobs[name] = path.read_bytes()
    ok = (
        blobs["spacing-w1"] == blobs["spacing-w1-again"] == blobs["spacing-w3"]
        and blobs["rate-w1"] == blobs["rate-w2"]
    )
    report(10, "sweeps byte-identical across re-runs and worker counts", ok)
