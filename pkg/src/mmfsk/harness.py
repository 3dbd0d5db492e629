"""Seeded Monte Carlo experiment sweeps with machine-readable result tables.

Every sweep is a pure function of its configuration and master seed:
per-trial random streams are derived from (master seed, point index,
trial index), so results do not depend on execution order or worker
count. Tables carry a config echo sufficient to re-run them exactly.
"""

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from . import __version__
from .channel import FiberSpec, ReceiverSpec, synthesize_channel
from .codec import FingerprintBank, FrequencyAlphabet, PamScheme, build_bank
from .semantic import (
    DEFAULT_OFFSET_MODEL,
    OffsetErrorModel,
    greedy_order,
    load_embeddings,
    perturb,
    save_permutation,
)
from .sentiment import TrainConfig, evaluate, synth_corpus, train

_TRIAL_CHUNK = 2048
_OFFSET_PROBE_BASE = 1_000_000  # point-index namespace for tuning probes


class ConfigError(ValueError):
    """Invalid or unknown configuration input."""


@dataclass(frozen=True)
class SweepConfig:
    """Bound parameters for one experiment sweep."""

    fiber: FiberSpec
    rx: ReceiverSpec
    alphabet: FrequencyAlphabet
    pam: PamScheme
    cores: int
    trials: int
    master_seed: int
    spacing_hz: tuple[float, ...] = ()
    sample_rate_hz: tuple[float, ...] = ()
    snr_db: tuple[float, ...] = ()
    fusion: bool = False

    def __post_init__(self):
        if self.cores < 1:
            raise ConfigError("cores must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be a non-negative integer")


@dataclass(frozen=True)
class OffsetTuning:
    """Spacing auto-tune settings for the error-offset histogram run."""

    probe_trials: int = 200
    ser_low: float = 0.38
    ser_high: float = 0.48
    grid_min_hz: float = 4e3
    grid_max_hz: float = 40e3
    grid_points: int = 7
    max_bisections: int = 16

    def __post_init__(self):
        if not 0 < self.ser_low < self.ser_high < 1:
            raise ConfigError("need 0 < ser_low < ser_high < 1")
        if self.grid_min_hz >= self.grid_max_hz:
            raise ConfigError("grid_min_hz must be below grid_max_hz")


@dataclass(frozen=True)
class SemanticConfig:
    """Corpus, ordering, and operating points for the robustness experiment."""

    vocab_size: int = 512
    dim: int = 16
    train_n: int = 2000
    test_n: int = 500
    seq_len: int = 20
    corpus_seed: int = 7
    spacing_hz: float = 20e3
    rates_hz: tuple[float, ...] = (1.25e9, 2e9, 4e9, 8e9)
    error_rates: tuple[float, ...] = (0.1, 0.2, 0.3, 0.43)
    noise_seeds: int = 20
    sequences: int = 100
    mode: str = "channel"
    start: int = 0

    def __post_init__(self):
        if self.mode not in ("channel", "perturb"):
            raise ConfigError("semantic.mode must be 'channel' or 'perturb'")
        if self.noise_seeds < 1 or self.sequences < 1:
            raise ConfigError("noise_seeds and sequences must be >= 1")


@dataclass
class ResultTable:
    """Rectangular named columns plus a config echo in metadata."""

    columns: list[str]
    rows: list[list]
    metadata: dict[str, str]

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def write_csv(table: ResultTable, path) -> None:
    def emit(f):
        for k, v in table.metadata.items():
            f.write(f"# {k}={v}\n")
        f.write(",".join(table.columns) + "\n")
        for row in table.rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")

    if hasattr(path, "write"):
        emit(path)
    else:
        with open(path, "w", encoding="utf-8") as f:
            emit(f)


def write_json(table: ResultTable, path) -> None:
    payload = {
        "metadata": table.metadata,
        "rows": [dict(zip(table.columns, row)) for row in table.rows],
    }

    def emit(f):
        json.dump(payload, f, indent=1)
        f.write("\n")

    if hasattr(path, "write"):
        emit(path)
    else:
        with open(path, "w", encoding="utf-8") as f:
            emit(f)


def write_table(table: ResultTable, path, fmt: str = "csv") -> None:
    if fmt == "csv":
        write_csv(table, path)
    elif fmt == "json":
        write_json(table, path)
    else:
        raise ConfigError(f"unknown output format {fmt!r}")


def trial_rng(master_seed: int, point_index: int, trial_index: int) -> np.random.Generator:
    """Per-trial random stream, a pure function of its three indices."""
    return np.random.default_rng(
        np.random.SeedSequence((master_seed, point_index, trial_index))
    )


def _zscore_rows(a: np.ndarray) -> np.ndarray:
    c = a - a.mean(axis=1, keepdims=True)
    return c / np.linalg.norm(c, axis=1, keepdims=True)


def _snr_amplitude(snr_db: float) -> float:
    return 10.0 ** (snr_db / 20.0)


def _run_trials(
    bank: FingerprintBank,
    core: int,
    master_seed: int,
    point_index: int,
    trials: int,
    pam: PamScheme | None = None,
):
    """Transmit random symbols through one core and decode them.

    Reuses the bank's noiseless unit-level traces as the transmit side
    (identical to per-call propagation, which is deterministic) and adds
    per-trial seeded noise. Returns (symbols, decisions) or, with pam,
    (symbols, levels, decisions, level_decisions).
    """
    s = bank.alphabet.size
    n = bank.rx.n_samples
    amp = _snr_amplitude(bank.rx.snr_db)
    stds = bank.peaks[core] / amp if np.isfinite(amp) else np.zeros(s)
    zt = bank._z[core].T
    levels = np.asarray(pam.levels) if pam is not None else None

    syms = np.empty(trials, dtype=np.int64)
    levs = np.empty(trials, dtype=np.int64) if pam is not None else None
    decs = np.empty(trials, dtype=np.int64)
    ldecs = np.empty(trials, dtype=np.int64) if pam is not None else None

    for start in range(0, trials, _TRIAL_CHUNK):
        stop = min(start + _TRIAL_CHUNK, trials)
        block = np.empty((stop - start, n))
        for t in range(start, stop):
            rng = trial_rng(master_seed, point_index, t)
            sym = int(rng.integers(s))
            syms[t] = sym
            scale = 1.0
            if pam is not None:
                lev = int(rng.integers(len(levels)))
                levs[t] = lev
                scale = levels[lev]
            trace = scale * bank.traces[core, sym]
            if stds[sym] > 0.0:
                trace = trace + rng.normal(0.0, stds[sym], n)
            block[t - start] = trace
        scores = _zscore_rows(block) @ zt
        dec = np.argmax(scores, axis=1)
        decs[start:stop] = dec
        if pam is not None:
            fpd = bank.traces[core, dec]
            est = np.sum(block * fpd, axis=1) / np.sum(fpd * fpd, axis=1)
            ldecs[start:stop] = np.argmin(np.abs(est[:, None] - levels[None, :]), axis=1)
    if pam is not None:
        return syms, levs, decs, ldecs
    return syms, decs


def _base_metadata(cfg: SweepConfig, command: str) -> dict[str, str]:
    md = {"artifact": f"mmfsk {__version__}", "command": command}
    md.update(config_echo(cfg))
    return md


def config_echo(cfg: SweepConfig) -> dict[str, str]:
    fs, rx, al = cfg.fiber, cfg.rx, cfg.alphabet
    return {
        "master_seed": str(cfg.master_seed),
        "fiber.length_m": repr(fs.length_m),
        "fiber.n_avg": repr(fs.n_avg),
        "fiber.delta_n": repr(fs.delta_n),
        "fiber.modes": str(fs.mode_count),
        "fiber.theta_spread_s": repr(fs.theta_spread_s),
        "fiber.rng_seed": str(fs.rng_seed),
        "rx.sample_rate_hz": repr(rx.sample_rate_hz),
        "rx.symbol_period_s": repr(rx.symbol_period_s),
        "rx.pulse_width_s": repr(rx.pulse_width_s),
        "rx.snr_db": repr(rx.snr_db),
        "rx.oversample": str(rx.oversample),
        "alphabet.size": str(al.size),
        "alphabet.spacing_hz": repr(al.spacing_hz),
        "alphabet.start_offset_hz": repr(al.start_offset_hz),
        "pam.levels": ",".join(repr(v) for v in cfg.pam.levels),
        "cores": str(cfg.cores),
        "trials": str(cfg.trials),
    }


# --- sweeps -------------------------------------------------------------------

def _spacing_point(cfg: SweepConfig, point_index: int) -> list:
    spacing = cfg.spacing_hz[point_index]
    alphabet = replace(cfg.alphabet, spacing_hz=spacing)
    channel = synthesize_channel(cfg.fiber, 1)
    bank = build_bank(channel, alphabet, cfg.rx)
    syms, decs = _run_trials(bank, 0, cfg.master_seed, point_index, cfg.trials)
    errors = int(np.sum(syms != decs))
    return [spacing, cfg.trials, errors, errors / cfg.trials]


def run_ser_vs_spacing(cfg: SweepConfig, workers: int = 1) -> ResultTable:
    """Single-core symbol error rate at each alphabet spacing."""
    if not cfg.spacing_hz:
        raise ConfigError("spacing axis is empty")
    rows = _map_points(_spacing_point, cfg, len(cfg.spacing_hz), workers)
    md = _base_metadata(cfg, "ser-spacing")
    md["sweep.spacing_hz"] = ",".join(repr(v) for v in cfg.spacing_hz)
    return ResultTable(["spacing_hz", "trials", "errors", "ser"], rows, md)


def run_pam(cfg: SweepConfig) -> ResultTable:
    """Frequency and amplitude error rates for random (symbol, level) pairs."""
    channel = synthesize_channel(cfg.fiber, 1)
    bank = build_bank(channel, cfg.alphabet, cfg.rx)
    syms, levs, decs, ldecs = _run_trials(
        bank, 0, cfg.master_seed, 0, cfg.trials, pam=cfg.pam
    )
    fe = int(np.sum(syms != decs))
    le = int(np.sum(levs != ldecs))
    row = [cfg.trials, fe, fe / cfg.trials, le, le / cfg.trials]
    return ResultTable(
        ["trials", "freq_errors", "freq_ser", "level_errors", "level_ser"],
        [row],
        _base_metadata(cfg, "pam"),
    )


def _rate_point(cfg: SweepConfig, point_index: int) -> list:
    rate = cfg.sample_rate_hz[point_index]
    rx = replace(cfg.rx, sample_rate_hz=rate)
    channel = synthesize_channel(cfg.fiber, cfg.cores)
    bank = build_bank(channel, cfg.alphabet, rx)
    k, s, n = bank.traces.shape
    amp = _snr_amplitude(rx.snr_db)
    stds = bank.peaks / amp if np.isfinite(amp) else np.zeros((k, s))
    zts = [bank._z[c].T for c in range(k)]

    core_errors = np.zeros(k, dtype=np.int64)
    fused_errors = 0
    for start in range(0, cfg.trials, _TRIAL_CHUNK):
        stop = min(start + _TRIAL_CHUNK, cfg.trials)
        m = stop - start
        syms = np.empty(m, dtype=np.int64)
        blocks = np.empty((k, m, n))
        for t in range(start, stop):
            rng = trial_rng(cfg.master_seed, point_index, t)
            sym = int(rng.integers(s))
            syms[t - start] = sym
            noise = rng.standard_normal((k, n)) * stds[:, sym][:, None]
            blocks[:, t - start, :] = bank.traces[:, sym, :] + noise
        fused = np.zeros((m, s))
        for c in range(k):
            scores = _zscore_rows(blocks[c]) @ zts[c]
            core_errors[c] += int(np.sum(np.argmax(scores, axis=1) != syms))
            fused += scores
        fused_errors += int(np.sum(np.argmax(fused, axis=1) != syms))
    row = [rate, cfg.trials]
    row += [int(e) for e in core_errors]
    row += [float(e / cfg.trials) for e in core_errors]
    row += [fused_errors, fused_errors / cfg.trials]
    return row


def run_ser_vs_rate(cfg: SweepConfig, workers: int = 1) -> ResultTable:
    """Per-core and fused symbol error rates across receiver sampling rates."""
    if not cfg.sample_rate_hz:
        raise ConfigError("sample-rate axis is empty")
    if not cfg.fusion:
        raise ConfigError("the rate sweep requires fusion on")
    rows = _map_points(_rate_point, cfg, len(cfg.sample_rate_hz), workers)
    cols = ["sample_rate_hz", "trials"]
    cols += [f"errors_core{c}" for c in range(cfg.cores)]
    cols += [f"ser_core{c}" for c in range(cfg.cores)]
    cols += ["errors_fused", "ser_fused"]
    md = _base_metadata(cfg, "ser-rate")
    md["sweep.sample_rate_hz"] = ",".join(repr(v) for v in cfg.sample_rate_hz)
    return ResultTable(cols, rows, md)


def tune_offset_spacing(cfg: SweepConfig, tuning: OffsetTuning) -> tuple[float, float]:
    """Find a spacing whose probe SER lands in the target band.

    Coarse geometric grid first, then bisection of the bracketing pair;
    every probe uses its own derived seeds. Returns (spacing, probe ser).
    """
    channel = synthesize_channel(cfg.fiber, 1)
    probe_count = 0

    def probe(spacing: float) -> float:
        nonlocal probe_count
        alphabet = replace(cfg.alphabet, spacing_hz=spacing)
        bank = build_bank(channel, alphabet, cfg.rx)
        syms, decs = _run_trials(
            bank, 0, cfg.master_seed, _OFFSET_PROBE_BASE + probe_count,
            tuning.probe_trials,
        )
        probe_count += 1
        return float(np.mean(syms != decs))

    target = 0.5 * (tuning.ser_low + tuning.ser_high)
    inner = 0.25 * (tuning.ser_high - tuning.ser_low)
    grid = np.geomspace(tuning.grid_min_hz, tuning.grid_max_hz, tuning.grid_points)
    sers = [probe(sp) for sp in grid]
    best = int(np.argmin(np.abs(np.asarray(sers) - target)))
    if abs(sers[best] - target) <= inner:
        return float(grid[best]), sers[best]
    lo = hi = None
    for i in range(len(grid) - 1):
        if sers[i] > target >= sers[i + 1]:
            lo, hi = grid[i], grid[i + 1]
            break
    if lo is None:
        raise RuntimeError("offset tuning grid does not bracket the target error rate")
    for _ in range(tuning.max_bisections):
        mid = float(np.sqrt(lo * hi))
        ser = probe(mid)
        if abs(ser - target) <= inner:
            return mid, ser
        if ser > target:
            lo = mid
        else:
            hi = mid
    raise RuntimeError("offset tuning did not converge into the target band")


def run_offset_hist(cfg: SweepConfig, tuning: OffsetTuning = OffsetTuning()) -> ResultTable:
    """Histogram of signed index offsets among errors at a high-SER spacing."""
    spacing, probe_ser = tune_offset_spacing(cfg, tuning)
    alphabet = replace(cfg.alphabet, spacing_hz=spacing)
    channel = synthesize_channel(cfg.fiber, 1)
    bank = build_bank(channel, alphabet, cfg.rx)
    syms, decs = _run_trials(bank, 0, cfg.master_seed, 0, cfg.trials)
    err = decs != syms
    n_err = int(np.sum(err))
    if n_err == 0:
        raise RuntimeError("no errors recorded at the tuned operating point")
    offsets = (decs - syms)[err]
    values, counts = np.unique(offsets, return_counts=True)
    rows = [
        [int(v), int(c), float(c / n_err)] for v, c in zip(values, counts)
    ]
    md = _base_metadata(cfg, "offsets")
    md["tuned_spacing_hz"] = repr(spacing)
    md["probe_ser"] = repr(probe_ser)
    md["measured_ser"] = repr(n_err / cfg.trials)
    return ResultTable(["offset", "count", "fraction"], rows, md)


def run_semantic(cfg: SweepConfig, sem: SemanticConfig = SemanticConfig()) -> ResultTable:
    """Classification error under greedy vs original index ordering.

    Transmits test sequences either through the full channel (sweeping
    the receiver sampling rate) or through the index-offset fast path
    (sweeping the error rate); reports the symbol error rate alongside
    both classification error rates, averaged over the noise seeds.
    """
    table, train_corpus, test_corpus = synth_corpus(
        sem.vocab_size, sem.dim, sem.train_n, sem.test_n, sem.seq_len, sem.corpus_seed
    )
    clf = train(train_corpus, table, TrainConfig())
    clean_err = evaluate(clf, test_corpus, table)
    order = greedy_order(table, sem.start)
    positions = order.positions()

    n_seq = min(sem.sequences, len(test_corpus))
    seqs = np.stack(test_corpus.sequences[:n_seq])
    labels = test_corpus.labels[:n_seq]
    flat = seqs.ravel()
    idx_greedy = positions[flat]

    def classify(tokens_flat: np.ndarray) -> float:
        feats = table.vectors[tokens_flat.reshape(seqs.shape)].mean(axis=1)
        decided = (feats @ clf.weights + clf.bias >= 0.0).astype(np.int64)
        return float(np.mean(decided != labels))

    rows = []
    if sem.mode == "channel":
        alphabet = FrequencyAlphabet(
            cfg.alphabet.start_offset_hz, sem.spacing_hz, sem.vocab_size
        )
        channel = synthesize_channel(cfg.fiber, 1)
        points = sem.rates_hz
        for p, rate in enumerate(points):
            rx = replace(cfg.rx, sample_rate_hz=rate)
            bank = build_bank(channel, alphabet, rx)
            zt = bank._z[0].T
            amp = _snr_amplitude(rx.snr_db)
            stds = bank.peaks[0] / amp if np.isfinite(amp) else np.zeros(alphabet.size)
            ser_acc, greedy_acc, base_acc = [], [], []
            for seed_i in range(sem.noise_seeds):
                rng = trial_rng(cfg.master_seed, p, seed_i)
                z = rng.standard_normal((len(flat), rx.n_samples))
                for kind, idx in (("greedy", idx_greedy), ("base", flat)):
                    noisy = bank.traces[0, idx] + z * stds[idx][:, None]
                    dec = np.argmax(_zscore_rows(noisy) @ zt, axis=1)
                    if kind == "greedy":
                        ser_acc.append(float(np.mean(dec != idx)))
                        greedy_acc.append(classify(order.order[dec]))
                    else:
                        base_acc.append(classify(dec))
            rows.append(
                [rate, float(np.mean(ser_acc)), float(np.mean(greedy_acc)),
                 float(np.mean(base_acc))]
            )
        cols = ["sample_rate_hz", "ser", "class_err_greedy", "class_err_baseline"]
    else:
        points = sem.error_rates
        for p, rate in enumerate(points):
            model = OffsetErrorModel(rate, DEFAULT_OFFSET_MODEL.offset_weights)
            ser_acc, greedy_acc, base_acc = [], [], []
            for seed_i in range(sem.noise_seeds):
                seed_int = int(
                    np.random.SeedSequence(
                        (cfg.master_seed, p, seed_i)
                    ).generate_state(1, np.uint64)[0]
                )
                pert_g = perturb(idx_greedy, model, sem.vocab_size, seed_int)
                pert_b = perturb(flat, model, sem.vocab_size, seed_int)
                ser_acc.append(float(np.mean(pert_g != idx_greedy)))
                greedy_acc.append(classify(order.order[pert_g]))
                base_acc.append(classify(pert_b))
            rows.append(
                [rate, float(np.mean(ser_acc)), float(np.mean(greedy_acc)),
                 float(np.mean(base_acc))]
            )
        cols = ["target_error_rate", "ser", "class_err_greedy", "class_err_baseline"]

    md = _base_metadata(cfg, "semantic")
    md["semantic.mode"] = sem.mode
    md["semantic.vocab"] = str(sem.vocab_size)
    md["semantic.dim"] = str(sem.dim)
    md["semantic.train_n"] = str(sem.train_n)
    md["semantic.test_n"] = str(sem.test_n)
    md["semantic.seq_len"] = str(sem.seq_len)
    md["semantic.corpus_seed"] = str(sem.corpus_seed)
    md["semantic.spacing_hz"] = repr(sem.spacing_hz)
    md["semantic.rates_hz"] = ",".join(repr(v) for v in sem.rates_hz)
    md["semantic.error_rates"] = ",".join(repr(v) for v in sem.error_rates)
    md["semantic.noise_seeds"] = str(sem.noise_seeds)
    md["semantic.sequences"] = str(n_seq)
    md["semantic.start"] = str(sem.start)
    md["clean_test_error"] = repr(clean_err)
    return ResultTable(cols, rows, md)


def run_order(embedding_path, start: int, out_path) -> None:
    """File-level wrapper over greedy_order."""
    table = load_embeddings(embedding_path)
    perm = greedy_order(table, start)
    save_permutation(perm, out_path)


def _map_points(point_fn, cfg: SweepConfig, n_points: int, workers: int) -> list[list]:
    if workers <= 1:
        return [point_fn(cfg, i) for i in range(n_points)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(partial(point_fn, cfg), range(n_points)))
