"""I/Q modulator transfer function and its single-sideband linearization.

Driving the two arms of a null-biased I/Q modulator with quadrature
sinusoids at f_m shifts the carrier by f_m; for small drive amplitudes
the output is a single clean tone. These functions verify that claim
standalone; the channel consumes commanded frequency offsets directly.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class IqDrive:
    """Instantaneous drive voltages of the I and Q arms."""

    v1: float
    v2: float
    v_pi: float
    e_in: complex

    def __post_init__(self):
        if self.v_pi <= 0:
            raise ValueError("v_pi must be > 0")


@dataclass(frozen=True)
class ToneCommand:
    """Quadrature sinusoidal drive: amplitude v0 at frequency fm on carrier f0."""

    e0: float
    v0: float
    v_pi: float
    f0_hz: float
    fm_hz: float

    def __post_init__(self):
        if self.v_pi <= 0:
            raise ValueError("v_pi must be > 0")
        if self.v0 < 0:
            raise ValueError("v0 must be >= 0")


class SpectralLine(NamedTuple):
    frequency_hz: float
    power_db: float  # relative to the strongest line
    amplitude: float  # absolute field amplitude of the line


def iq_output(d: IqDrive) -> complex:
    """Exact output field of the null-biased I/Q modulator."""
    return 0.5 * d.e_in * (
        math.sin(math.pi * d.v1 / d.v_pi) + 1j * math.sin(math.pi * d.v2 / d.v_pi)
    )


def ssb_tone(c: ToneCommand) -> tuple[float, float]:
    """Linearized single-sideband output: (frequency_hz, field amplitude)."""
    return c.f0_hz + c.fm_hz, math.pi * c.v0 * c.e0 / (2.0 * c.v_pi)


def ssb_spectrum(
    v0: float, v_pi: float, fm_hz: float, duration_s: float, rate_hz: float
) -> list[SpectralLine]:
    """Discrete spectrum of the exact modulator output under tone drive.

    Evaluates the exact transfer function with v1 = v0 cos(2 pi fm t) and
    v2 = v0 sin(2 pi fm t) over whole drive periods and returns the lines
    at harmonics k * fm. Powers are dB relative to the strongest line;
    exact zeros are floored 300 dB down.
    """
    if v_pi <= 0:
        raise ValueError("v_pi must be > 0")
    if rate_hz <= 4.0 * fm_hz:
        raise ValueError("rate_hz must exceed 4 * fm_hz")
    periods = duration_s * fm_hz
    if abs(periods - round(periods)) > 1e-9 or round(periods) < 1:
        raise ValueError("duration_s must span a whole number of drive periods")
    n = duration_s * rate_hz
    if abs(n - round(n)) > 1e-6:
        raise ValueError("duration_s must span a whole number of samples")
    n = int(round(n))

    t = np.arange(n) / rate_hz
    v1 = v0 * np.cos(2.0 * np.pi * fm_hz * t)
    v2 = v0 * np.sin(2.0 * np.pi * fm_hz * t)
    e_out = 0.5 * (np.sin(np.pi * v1 / v_pi) + 1j * np.sin(np.pi * v2 / v_pi))

    coeffs = np.fft.fft(e_out) / n
    freqs = np.fft.fftfreq(n, d=1.0 / rate_hz)
    # the drive is periodic in 1/fm, so all content sits on harmonics of fm
    bins_per_harmonic = int(round(n * fm_hz / rate_hz))
    harmonic_idx = np.arange(n) % bins_per_harmonic == 0 if bins_per_harmonic > 1 else np.ones(n, bool)
    amps = np.abs(coeffs[harmonic_idx])
    line_freqs = freqs[harmonic_idx]
    power = amps**2
    ref = power.max()
    floor = ref * 1e-30
    power_db = 10.0 * np.log10(np.maximum(power, floor) / ref)
    order = np.argsort(line_freqs)
    return [
        SpectralLine(float(line_freqs[i]), float(power_db[i]), float(amps[i]))
        for i in order
    ]


def image_suppression_db(lines: list[SpectralLine]) -> float:
    """Strongest line power minus the strongest negative-frequency line power."""
    best = max(line.power_db for line in lines)
    neg = [line.power_db for line in lines if line.frequency_hz < 0]
    if not neg:
        return math.inf
    return best - max(neg)
