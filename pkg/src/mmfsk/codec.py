"""Symbol/frequency codec: fingerprint bank, correlation decoding, PAM, fusion.

Decoding matches a received trace against a pre-computed bank of
noiseless unit-level reference traces (one per core and alphabet
frequency) by Pearson correlation; amplitude is recovered afterwards by
least-squares against the winning reference, so the two decisions
decouple (Pearson is scale invariant).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    ChannelInstance,
    FiberSpec,
    IntensityTrace,
    ReceiverSpec,
    check_window,
    pulse_basis,
    unit_traces,
)

BANK_MAGIC = "MMFBANK"
BANK_VERSION = 1


class DegenerateTraceError(ValueError):
    """Correlation against a constant sequence is undefined."""


class BankFormatError(ValueError):
    """Bank file is malformed or carries an unknown version."""


@dataclass(frozen=True)
class FrequencyAlphabet:
    """Bijection between symbol indices and frequency offsets on a uniform grid."""

    start_offset_hz: float
    spacing_hz: float
    size: int

    def __post_init__(self):
        if self.spacing_hz <= 0:
            raise ValueError("spacing_hz must be > 0")
        if self.size < 2:
            raise ValueError("size must be >= 2")

    def frequency(self, symbol_index: int) -> float:
        if not 0 <= symbol_index < self.size:
            raise ValueError(f"symbol index {symbol_index} out of range")
        return self.start_offset_hz + symbol_index * self.spacing_hz

    def frequencies(self) -> np.ndarray:
        return self.start_offset_hz + self.spacing_hz * np.arange(self.size)


@dataclass(frozen=True)
class PamScheme:
    """Ordered intensity multipliers in (0, 1], topped by 1."""

    levels: tuple[float, ...]

    def __post_init__(self):
        if len(self.levels) < 1:
            raise ValueError("at least one level required")
        if any(not 0 < v <= 1 for v in self.levels):
            raise ValueError("levels must lie in (0, 1]")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError("levels must be strictly increasing")
        if self.levels[-1] != 1.0:
            raise ValueError("top level must be 1.0")

    @property
    def top_index(self) -> int:
        return len(self.levels) - 1


DEFAULT_PAM = PamScheme((0.25, 0.5, 0.75, 1.0))


@dataclass(frozen=True)
class SymbolStream:
    """Transmit-order list of (symbol_index, level_index) pairs."""

    pairs: tuple[tuple[int, int], ...]


@dataclass(eq=False)
class FingerprintBank:
    """Per-core, per-symbol noiseless unit-level reference traces.

    traces has shape (core_count, alphabet.size, n_samples). The bank is
    immutable after construction; rebuilding from (fiber_spec, core_count)
    with build_bank reproduces it bit-identically.
    """

    alphabet: FrequencyAlphabet
    rx: ReceiverSpec
    traces: np.ndarray
    fiber_spec: FiberSpec
    core_count: int
    _z: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        k, s, n = self.traces.shape
        if k != self.core_count or s != self.alphabet.size or n != self.rx.n_samples:
            raise ValueError("trace array shape does not match bank geometry")
        centered = self.traces - self.traces.mean(axis=2, keepdims=True)
        norms = np.linalg.norm(centered, axis=2, keepdims=True)
        if np.any(norms == 0):
            raise DegenerateTraceError("bank contains a constant trace")
        self._z = centered / norms

    def fingerprint(self, core: int, symbol_index: int) -> np.ndarray:
        return self.traces[core, symbol_index]

    @property
    def peaks(self) -> np.ndarray:
        """Per-(core, symbol) unit-level trace peak, shape (K, S)."""
        return self.traces.max(axis=2)


def build_bank(
    channel: ChannelInstance, alphabet: FrequencyAlphabet, rx: ReceiverSpec
) -> FingerprintBank:
    """Record the noiseless unit-level trace for every (core, symbol)."""
    check_window(channel, rx)
    basis = pulse_basis(channel, rx)
    traces = unit_traces(
        channel, rx, np.arange(channel.core_count), alphabet.frequencies(), basis
    )
    return FingerprintBank(alphabet, rx, traces, channel.spec, channel.core_count)


def pearson(x, y) -> float:
    """Sample Pearson correlation of two equal-length sequences."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("inputs must be equal-length 1-D sequences of length >= 2")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        raise DegenerateTraceError("correlation undefined for constant input")
    return float(xc @ yc) / denom


def _check_geometry(trace: IntensityTrace, bank: FingerprintBank) -> None:
    if len(trace.samples) != bank.rx.n_samples:
        raise ValueError(
            f"trace length {len(trace.samples)} does not match bank ({bank.rx.n_samples})"
        )
    if trace.sample_rate_hz != bank.rx.sample_rate_hz:
        raise ValueError("trace sample rate does not match bank")


def _zscore(x: np.ndarray) -> np.ndarray:
    c = x - x.mean()
    n = np.linalg.norm(c)
    if n == 0.0:
        raise DegenerateTraceError("correlation undefined for constant trace")
    return c / n


def decode_frequency(
    trace: IntensityTrace, bank: FingerprintBank, core: int
) -> tuple[int, float]:
    """Most-correlated symbol index and its score; ties go to the smallest index."""
    _check_geometry(trace, bank)
    if not 0 <= core < bank.core_count:
        raise ValueError(f"core {core} out of range")
    scores = bank._z[core] @ _zscore(np.asarray(trace.samples, dtype=np.float64))
    best = int(np.argmax(scores))
    return best, float(scores[best])


def decode_level(
    trace: IntensityTrace,
    bank: FingerprintBank,
    core: int,
    symbol_index: int,
    pam: PamScheme,
) -> int:
    """Least-squares intensity scale against the unit fingerprint, snapped to a level."""
    _check_geometry(trace, bank)
    fp = bank.traces[core, symbol_index]
    scale = float(np.dot(trace.samples, fp) / np.dot(fp, fp))
    return int(np.argmin(np.abs(np.asarray(pam.levels) - scale)))


def fuse_decode(
    traces: list[IntensityTrace], bank: FingerprintBank
) -> tuple[int, float]:
    """Argmax of summed per-core correlation scores over core-aligned traces."""
    if len(traces) != bank.core_count:
        raise ValueError(
            f"expected {bank.core_count} traces, got {len(traces)}"
        )
    total = np.zeros(bank.alphabet.size)
    for k, trace in enumerate(traces):
        if trace.core_index != k:
            raise ValueError(f"trace at position {k} carries core index {trace.core_index}")
        _check_geometry(trace, bank)
        total += bank._z[k] @ _zscore(np.asarray(trace.samples, dtype=np.float64))
    best = int(np.argmax(total))
    return best, float(total[best])


def spectral_efficiency(
    symbol_rate_hz: float, bits_per_symbol: float, spacing_hz: float, channels: int
) -> float:
    """Delivered bit rate over occupied bandwidth, bits/s/Hz."""
    if min(symbol_rate_hz, bits_per_symbol, spacing_hz, channels) <= 0:
        raise ValueError("all arguments must be positive")
    return (symbol_rate_hz * bits_per_symbol) / (spacing_hz * channels)


def ascii_encode(data: bytes, pam: PamScheme = DEFAULT_PAM) -> SymbolStream:
    """Map ASCII bytes to symbol indices at the top intensity level."""
    for b in data:
        if b >= 128:
            raise ValueError(f"non-ASCII byte {b:#x}")
    top = pam.top_index
    return SymbolStream(tuple((b, top) for b in data))


def ascii_decode(stream: SymbolStream) -> bytes:
    """Invert ascii_encode; level indices are ignored."""
    for sym, _ in stream.pairs:
        if not 0 <= sym < 128:
            raise ValueError(f"symbol index {sym} outside the ASCII range")
    return bytes(sym for sym, _ in stream.pairs)


# --- bank persistence -------------------------------------------------------

def _provenance_items(bank: FingerprintBank) -> list[tuple[str, object]]:
    fs, rx, al = bank.fiber_spec, bank.rx, bank.alphabet
    return [
        ("fiber.length_m", fs.length_m),
        ("fiber.n_avg", fs.n_avg),
        ("fiber.delta_n", fs.delta_n),
        ("fiber.modes", fs.mode_count),
        ("fiber.theta_spread_s", fs.theta_spread_s),
        ("fiber.rng_seed", fs.rng_seed),
        ("rx.sample_rate_hz", rx.sample_rate_hz),
        ("rx.symbol_period_s", rx.symbol_period_s),
        ("rx.pulse_width_s", rx.pulse_width_s),
        ("rx.snr_db", rx.snr_db),
        ("rx.oversample", rx.oversample),
        ("alphabet.start_offset_hz", al.start_offset_hz),
        ("alphabet.spacing_hz", al.spacing_hz),
        ("alphabet.size", al.size),
    ]


def save_bank(bank: FingerprintBank, path) -> None:
    """Write the textual bank file: header, provenance, one trace per line."""
    k, s, n = bank.traces.shape
    with open(path, "w", encoding="utf-8") as f:
        f.write(
            f"{BANK_MAGIC} {BANK_VERSION} {s} {k} {n} {bank.rx.sample_rate_hz!r}\n"
        )
        for key, val in _provenance_items(bank):
            f.write(f"{key}={val!r}\n")
        for core in range(k):
            for sym in range(s):
                f.write(" ".join(repr(float(v)) for v in bank.traces[core, sym]))
                f.write("\n")


def load_bank(path) -> FingerprintBank:
    """Read a bank file written by save_bank; rejects unknown versions."""
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 6 or header[0] != BANK_MAGIC:
            raise BankFormatError("not a bank file")
        if header[1] != str(BANK_VERSION):
            raise BankFormatError(f"unsupported bank version {header[1]}")
        s, k, n = int(header[2]), int(header[3]), int(header[4])
        prov: dict[str, str] = {}
        while True:
            pos = f.tell()
            line = f.readline()
            if "=" not in line:
                f.seek(pos)
                break
            key, _, val = line.strip().partition("=")
            prov[key] = val
        try:
            fiber = FiberSpec(
                length_m=float(prov["fiber.length_m"]),
                n_avg=float(prov["fiber.n_avg"]),
                delta_n=float(prov["fiber.delta_n"]),
                mode_count=int(prov["fiber.modes"]),
                theta_spread_s=float(prov["fiber.theta_spread_s"]),
                rng_seed=int(prov["fiber.rng_seed"]),
            )
            rx = ReceiverSpec(
                sample_rate_hz=float(prov["rx.sample_rate_hz"]),
                symbol_period_s=float(prov["rx.symbol_period_s"]),
                pulse_width_s=float(prov["rx.pulse_width_s"]),
                snr_db=float(prov["rx.snr_db"]),
                oversample=int(prov["rx.oversample"]),
            )
            alphabet = FrequencyAlphabet(
                start_offset_hz=float(prov["alphabet.start_offset_hz"]),
                spacing_hz=float(prov["alphabet.spacing_hz"]),
                size=int(prov["alphabet.size"]),
            )
        except KeyError as e:
            raise BankFormatError(f"missing provenance key {e.args[0]}") from e
        traces = np.empty((k, s, n))
        for core in range(k):
            for sym in range(s):
                row = np.array(f.readline().split(), dtype=np.float64)
                if len(row) != n:
                    raise BankFormatError(
                        f"trace line for core {core} symbol {sym} has {len(row)} samples"
                    )
                traces[core, sym] = row
    return FingerprintBank(alphabet, rx, traces, fiber, k)
