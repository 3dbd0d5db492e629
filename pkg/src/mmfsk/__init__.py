"""mmfsk: frequency-fingerprint communication over a simulated multimode fiber.

A deterministic simulator and codec for dense frequency-shift keying
through intermodal dispersion: symbols map to frequency offsets, the
fiber stretches each pulse into a characteristic intensity trace, and a
correlation decoder matches traces against a pre-built fingerprint bank.
Includes PAM intensity levels, multi-core fusion, embedding-driven
symbol ordering, and a synthetic sentiment-robustness experiment.
"""

__version__ = "0.1.0"

from .channel import (
    ChannelInstance,
    FiberSpec,
    IntensityTrace,
    ReceiverSpec,
    WindowOverlapError,
    delay_spread,
    propagate,
    spectral_correlation,
    synthesize_channel,
)
from .codec import (
    DEFAULT_PAM,
    BankFormatError,
    DegenerateTraceError,
    FingerprintBank,
    FrequencyAlphabet,
    PamScheme,
    SymbolStream,
    ascii_decode,
    ascii_encode,
    build_bank,
    decode_frequency,
    decode_level,
    fuse_decode,
    load_bank,
    pearson,
    save_bank,
    spectral_efficiency,
)
from .modulation import IqDrive, SpectralLine, ToneCommand, iq_output, ssb_spectrum, ssb_tone
from .semantic import (
    DEFAULT_OFFSET_MODEL,
    EmbeddingTable,
    IndexPermutation,
    OffsetErrorModel,
    adjacency_mean,
    cosine,
    greedy_order,
    load_embeddings,
    load_permutation,
    perturb,
    save_embeddings,
    save_permutation,
)
from .sentiment import (
    LabeledCorpus,
    LinearClassifier,
    TrainConfig,
    evaluate,
    load_classifier,
    load_corpus,
    predict,
    save_classifier,
    save_corpus,
    synth_corpus,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")]
