"""Flat key=value configuration files with documented defaults."""

from dataclasses import dataclass

from .channel import FiberSpec, ReceiverSpec
from .codec import FrequencyAlphabet, PamScheme
from .harness import ConfigError, OffsetTuning, SemanticConfig, SweepConfig

DEFAULTS: dict[str, str] = {
    "fiber.length_m": "1000.0",
    "fiber.n_avg": "1.45",
    "fiber.delta_n": "0.0084",
    "fiber.modes": "4096",
    "fiber.theta_spread_s": "2e-6",
    "fiber.rng_seed": "2024",
    "rx.sample_rate_hz": "8e9",
    "rx.symbol_period_s": "2e-8",
    "rx.pulse_width_s": "5e-11",
    "rx.snr_db": "25.0",
    "rx.oversample": "8",
    "alphabet.size": "128",
    "alphabet.spacing_hz": "600e3",
    "alphabet.start_offset_hz": "0.0",
    "pam.levels": "0.25,0.5,0.75,1.0",
    "cores": "7",
    "trials": "10000",
    "master_seed": "1",
    "sweep.spacing_hz": "6e3,1e4,2e4,1e5,5e6",
    "sweep.sample_rate_hz": "6e9,7e9,8e9,9e9,10e9,11e9",
    "sweep.snr_db": "0,5,10,15,20,25",
    "offsets.probe_trials": "200",
    "offsets.ser_low": "0.38",
    "offsets.ser_high": "0.48",
    "offsets.grid_min_hz": "4e3",
    "offsets.grid_max_hz": "40e3",
    "semantic.vocab": "512",
    "semantic.dim": "16",
    "semantic.train_n": "2000",
    "semantic.test_n": "500",
    "semantic.seq_len": "20",
    "semantic.corpus_seed": "7",
    "semantic.spacing_hz": "2e4",
    "semantic.rates_hz": "1.25e9,2e9,4e9,8e9",
    "semantic.error_rates": "0.1,0.2,0.3,0.43",
    "semantic.noise_seeds": "20",
    "semantic.sequences": "100",
    "semantic.mode": "channel",
    "semantic.start": "0",
}


@dataclass(frozen=True)
class Settings:
    """Parsed configuration: one sweep config plus sub-experiment settings."""

    sweep: SweepConfig
    semantic: SemanticConfig
    offsets: OffsetTuning
    raw: dict[str, str]


def parse_config_text(text: str) -> dict[str, str]:
    """Parse `key = value` lines; blank lines and # comments are skipped."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        out[key] = value
    return out


def _f(raw: dict[str, str], key: str) -> float:
    try:
        return float(raw[key])
    except ValueError as e:
        raise ConfigError(f"config key {key} must be a real number") from e


def _i(raw: dict[str, str], key: str) -> int:
    try:
        return int(raw[key])
    except ValueError as e:
        raise ConfigError(f"config key {key} must be an integer") from e


def _floats(raw: dict[str, str], key: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in raw[key].split(",") if v.strip())
    except ValueError as e:
        raise ConfigError(f"config key {key} must be comma-separated reals") from e


def load_settings(
    config_path=None, master_seed: int | None = None
) -> Settings:
    """Merge a config file over the defaults and build typed settings."""
    raw = dict(DEFAULTS)
    if config_path is not None:
        try:
            with open(config_path, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}") from e
        raw.update(parse_config_text(text))
    if master_seed is not None:
        if master_seed < 0:
            raise ConfigError("master seed must be non-negative")
        raw["master_seed"] = str(master_seed)

    try:
        fiber = FiberSpec(
            length_m=_f(raw, "fiber.length_m"),
            n_avg=_f(raw, "fiber.n_avg"),
            delta_n=_f(raw, "fiber.delta_n"),
            mode_count=_i(raw, "fiber.modes"),
            theta_spread_s=_f(raw, "fiber.theta_spread_s"),
            rng_seed=_i(raw, "fiber.rng_seed"),
        )
        rx = ReceiverSpec(
            sample_rate_hz=_f(raw, "rx.sample_rate_hz"),
            symbol_period_s=_f(raw, "rx.symbol_period_s"),
            pulse_width_s=_f(raw, "rx.pulse_width_s"),
            snr_db=_f(raw, "rx.snr_db"),
            oversample=_i(raw, "rx.oversample"),
        )
        alphabet = FrequencyAlphabet(
            start_offset_hz=_f(raw, "alphabet.start_offset_hz"),
            spacing_hz=_f(raw, "alphabet.spacing_hz"),
            size=_i(raw, "alphabet.size"),
        )
        pam = PamScheme(_floats(raw, "pam.levels"))
        sweep = SweepConfig(
            fiber=fiber,
            rx=rx,
            alphabet=alphabet,
            pam=pam,
            cores=_i(raw, "cores"),
            trials=_i(raw, "trials"),
            master_seed=_i(raw, "master_seed"),
            spacing_hz=_floats(raw, "sweep.spacing_hz"),
            sample_rate_hz=_floats(raw, "sweep.sample_rate_hz"),
            snr_db=_floats(raw, "sweep.snr_db"),
            fusion=True,
        )
        semantic = SemanticConfig(
            vocab_size=_i(raw, "semantic.vocab"),
            dim=_i(raw, "semantic.dim"),
            train_n=_i(raw, "semantic.train_n"),
            test_n=_i(raw, "semantic.test_n"),
            seq_len=_i(raw, "semantic.seq_len"),
            corpus_seed=_i(raw, "semantic.corpus_seed"),
            spacing_hz=_f(raw, "semantic.spacing_hz"),
            rates_hz=_floats(raw, "semantic.rates_hz"),
            error_rates=_floats(raw, "semantic.error_rates"),
            noise_seeds=_i(raw, "semantic.noise_seeds"),
            sequences=_i(raw, "semantic.sequences"),
            mode=raw["semantic.mode"],
            start=_i(raw, "semantic.start"),
        )
        offsets = OffsetTuning(
            probe_trials=_i(raw, "offsets.probe_trials"),
            ser_low=_f(raw, "offsets.ser_low"),
            ser_high=_f(raw, "offsets.ser_high"),
            grid_min_hz=_f(raw, "offsets.grid_min_hz"),
            grid_max_hz=_f(raw, "offsets.grid_max_hz"),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return Settings(sweep=sweep, semantic=semantic, offsets=offsets, raw=raw)
