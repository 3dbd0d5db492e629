"""Parametric multimode-fiber channel: mode delays, spectral phases, spatial sampling.

A channel realization is a frozen random draw of per-mode group delays,
per-mode spectral phase sensitivities, and per-core complex coupling
weights. Launching a pulse at a frequency offset f from the carrier
produces a train of interfering Gaussian sub-pulses whose detected
intensity trace ("dispersion curve") is characteristic of f.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

SPEED_OF_LIGHT_M_S = 299_792_458.0

# Gaussian sub-pulses are evaluated within +/- this many FWHM of their
# center; beyond that the amplitude is below 1e-19 of the peak.
_SUPPORT_FWHM = 4.0
_FOUR_LN2 = 4.0 * math.log(2.0)


class WindowOverlapError(ValueError):
    """Symbol window too short to hold the delay spread plus pulse margins."""


@dataclass(frozen=True)
class FiberSpec:
    """Static fiber parameters plus the seed of its random realization."""

    length_m: float
    n_avg: float
    delta_n: float
    mode_count: int
    theta_spread_s: float
    rng_seed: int

    def __post_init__(self):
        if self.length_m <= 0:
            raise ValueError("length_m must be > 0")
        if self.n_avg <= 1:
            raise ValueError("n_avg must be > 1")
        if not 0 < self.delta_n < self.n_avg:
            raise ValueError("delta_n must lie in (0, n_avg)")
        if self.mode_count < 2:
            raise ValueError("mode_count must be >= 2")
        if self.theta_spread_s <= 0:
            raise ValueError("theta_spread_s must be > 0")


@dataclass(frozen=True)
class ReceiverSpec:
    """Receiver geometry and noise level.

    oversample is the number of internal fine-grid points per receiver
    sample; each receiver sample is the mean of the fine-grid intensity
    over its bin (integrate-and-dump detection).
    """

    sample_rate_hz: float
    symbol_period_s: float
    pulse_width_s: float
    snr_db: float
    oversample: int

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be > 0")
        if self.symbol_period_s <= 0:
            raise ValueError("symbol_period_s must be > 0")
        if self.pulse_width_s <= 0:
            raise ValueError("pulse_width_s must be > 0")
        if self.oversample < 4:
            raise ValueError("oversample must be >= 4")

    @property
    def n_samples(self) -> int:
        return int(math.floor(self.symbol_period_s * self.sample_rate_hz))


@dataclass(frozen=True, eq=False)
class ChannelInstance:
    """One frozen random realization of the fiber, sampled at K cores.

    delays_s[m] is the group delay of mode m, spectral_phases_s[m] its
    frequency sensitivity, and coupling[k, m] the complex weight with
    which core k sees mode m. Rows of coupling carry unit total power.
    """

    spec: FiberSpec
    core_count: int
    delays_s: np.ndarray
    spectral_phases_s: np.ndarray
    coupling: np.ndarray

    def __post_init__(self):
        spread = delay_spread(self.spec)
        if self.delays_s.min() < 0 or self.delays_s.max() > spread:
            raise ValueError("mode delays must lie in [0, delay_spread]")
        power = np.sum(np.abs(self.coupling) ** 2, axis=1)
        if np.any(np.abs(power - 1.0) > 1e-9):
            raise ValueError("per-core coupling power must be 1 within 1e-9")


@dataclass(frozen=True, eq=False)
class IntensityTrace:
    """Detected intensity samples for one symbol window at one core."""

    samples: np.ndarray
    sample_rate_hz: float
    core_index: int

    def __post_init__(self):
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("trace samples must be finite")


def delay_spread(spec: FiberSpec) -> float:
    """Maximum intermodal delay spread (L/c) * (delta_n / n_avg), seconds."""
    return (spec.length_m / SPEED_OF_LIGHT_M_S) * (spec.delta_n / spec.n_avg)


def synthesize_channel(spec: FiberSpec, core_count: int) -> ChannelInstance:
    """Draw a channel realization deterministically from spec.rng_seed.

    Delays are i.i.d. uniform on [0, delay_spread], spectral phases
    i.i.d. uniform on [0, theta_spread_s], and coupling weights i.i.d.
    complex circular-normal with each core row normalized to unit power.
    """
    if core_count < 1:
        raise ValueError("core_count must be >= 1")
    rng = np.random.default_rng(spec.rng_seed)
    m = spec.mode_count
    delays = rng.uniform(0.0, delay_spread(spec), m)
    phases = rng.uniform(0.0, spec.theta_spread_s, m)
    # interleaved real/imag draws keep existing cores unchanged when more
    # cores are requested from the same seed
    parts = rng.standard_normal((core_count, m, 2))
    w = (parts[..., 0] + 1j * parts[..., 1]) / math.sqrt(2.0)
    w /= np.sqrt(np.sum(np.abs(w) ** 2, axis=1, keepdims=True))
    return ChannelInstance(spec, core_count, delays, phases, w)


def check_window(channel: ChannelInstance, rx: ReceiverSpec) -> None:
    """Reject receiver windows that cannot hold the dispersed pulse train.

    The sub-pulse train is placed with a one-pulse-width lead-in, so the
    window must hold the delay spread plus one pulse width on each side;
    anything shorter signals inter-symbol overlap.
    """
    needed = delay_spread(channel.spec) + 2.0 * rx.pulse_width_s
    if needed > rx.symbol_period_s:
        raise WindowOverlapError(
            f"symbol window {rx.symbol_period_s:.3g} s cannot hold delay spread "
            f"plus pulse margins ({needed:.3g} s)"
        )


def pulse_basis(channel: ChannelInstance, rx: ReceiverSpec) -> sparse.csr_matrix:
    """Sparse (n_fine x M) matrix of Gaussian sub-pulse amplitude samples.

    Column m holds the unit-peak Gaussian of FWHM pulse_width_s centered
    at delays_s[m] plus a one-pulse-width lead-in, evaluated at fine-grid
    bin midpoints and truncated beyond +/- _SUPPORT_FWHM widths.
    """
    n_fine = rx.n_samples * rx.oversample
    dt = 1.0 / (rx.sample_rate_hz * rx.oversample)
    centers = channel.delays_s + rx.pulse_width_s
    half = max(1, int(math.ceil(_SUPPORT_FWHM * rx.pulse_width_s / dt)))
    center_idx = np.round(centers / dt - 0.5).astype(np.int64)
    idx = center_idx[:, None] + np.arange(-half, half + 1)[None, :]
    t = (idx + 0.5) * dt
    vals = np.exp(-_FOUR_LN2 * (t - centers[:, None]) ** 2 / rx.pulse_width_s**2)
    ok = (idx >= 0) & (idx < n_fine)
    rows = idx[ok]
    cols = np.broadcast_to(
        np.arange(channel.spec.mode_count)[:, None], idx.shape
    )[ok]
    return sparse.csr_matrix(
        (vals[ok], (rows, cols)), shape=(n_fine, channel.spec.mode_count)
    )


def unit_traces(
    channel: ChannelInstance,
    rx: ReceiverSpec,
    cores: np.ndarray,
    freqs: np.ndarray,
    basis: sparse.csr_matrix | None = None,
) -> np.ndarray:
    """Noiseless unit-level traces, shape (len(cores), len(freqs), n_samples).

    The field at core k is sum_m coupling[k, m] * g(t - center_m) *
    exp(i 2 pi f spectral_phases_s[m]); each receiver sample averages the
    fine-grid intensity |field|^2 over its bin.
    """
    check_window(channel, rx)
    if basis is None:
        basis = pulse_basis(channel, rx)
    cores = np.atleast_1d(np.asarray(cores, dtype=np.int64))
    freqs = np.atleast_1d(np.asarray(freqs, dtype=np.float64))
    n_rx, ov = rx.n_samples, rx.oversample
    out = np.empty((len(cores), len(freqs), n_rx))
    # one matvec per (core, frequency) so that single-trace and batched
    # evaluations take the identical floating-point path
    for j, f in enumerate(freqs):
        phase = np.exp(1j * 2.0 * np.pi * f * channel.spectral_phases_s)
        for i, k in enumerate(cores):
            field = basis @ (channel.coupling[k] * phase)
            inten = np.abs(field) ** 2
            out[i, j] = inten.reshape(n_rx, ov).mean(axis=1)
    return out


def noise_std_for(unit_trace: np.ndarray, snr_db: float) -> float:
    """Per-sample noise std: unit-level trace peak divided by 10^(snr/20)."""
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return float(unit_trace.max()) / 10.0 ** (snr_db / 20.0)


def propagate(
    channel: ChannelInstance,
    core: int,
    freq_offset_hz: float,
    intensity_level: float,
    rx: ReceiverSpec,
    noise_seed: int,
) -> IntensityTrace:
    """Simulate one received symbol window at one core.

    The noiseless trace is intensity_level times the unit-level trace at
    freq_offset_hz; additive white Gaussian noise per receiver sample is
    calibrated so the unit-level trace peak over the noise std matches
    rx.snr_db (snr_db = +inf disables noise). Deterministic in noise_seed.
    """
    if not 0 <= core < channel.core_count:
        raise ValueError(f"core {core} out of range [0, {channel.core_count})")
    if intensity_level < 0:
        raise ValueError("intensity_level must be >= 0")
    unit = unit_traces(channel, rx, np.array([core]), np.array([freq_offset_hz]))[0, 0]
    samples = intensity_level * unit
    std = noise_std_for(unit, rx.snr_db)
    if std > 0.0:
        samples = samples + np.random.default_rng(noise_seed).normal(0.0, std, rx.n_samples)
    return IntensityTrace(samples, rx.sample_rate_hz, core)


def spectral_correlation(
    channel: ChannelInstance, core: int, f1_hz: float, f2_hz: float, rx: ReceiverSpec
) -> float:
    """Pearson correlation between the noiseless traces at f1 and f2.

    Returns NaN if either trace is constant (degenerate variance).
    """
    if not 0 <= core < channel.core_count:
        raise ValueError(f"core {core} out of range [0, {channel.core_count})")
    traces = unit_traces(channel, rx, np.array([core]), np.array([f1_hz, f2_hz]))[0]
    return _pearson_or_nan(traces[0], traces[1])


def _pearson_or_nan(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        return math.nan
    return float(xc @ yc) / denom
