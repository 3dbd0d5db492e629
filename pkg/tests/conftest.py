import pytest

from mmfsk import build_bank, synthesize_channel
from mmfsk.config import load_settings


@pytest.fixture(scope="session")
def settings():
    return load_settings()


@pytest.fixture(scope="session")
def default_channel(settings):
    """Seven-core channel at the default fiber realization."""
    return synthesize_channel(settings.sweep.fiber, settings.sweep.cores)


@pytest.fixture(scope="session")
def default_bank(settings, default_channel):
    """Default 128-symbol, 600 kHz, seven-core fingerprint bank."""
    return build_bank(default_channel, settings.sweep.alphabet, settings.sweep.rx)
