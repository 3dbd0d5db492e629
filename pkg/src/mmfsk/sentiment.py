"""Synthetic sentiment corpus and a mean-pooled logistic classifier.

Token embeddings are drawn along a hidden sentiment axis with additive
noise; samples draw tokens biased toward one polarity and are labeled by
the sign of their mean projection onto the axis. A full-batch logistic
regression over mean-pooled embeddings then measures how well meaning
survives symbol errors.
"""

import math
from dataclasses import dataclass

import numpy as np

from .semantic import EmbeddingTable

# Polarity bias of sample token draws and embedding noise scale. The bias
# is kept moderate so a visible fraction of samples sits near the decision
# boundary; fully separated samples would hide the ordering effect.
_POLARITY_BIAS = 0.8
_EMBED_NOISE = 0.25


@dataclass(frozen=True, eq=False)
class LabeledCorpus:
    """Token-index sequences with binary labels."""

    sequences: list[np.ndarray]
    labels: np.ndarray
    vocab_size: int

    def __post_init__(self):
        if len(self.sequences) != len(self.labels):
            raise ValueError("sequence and label counts differ")
        for seq in self.sequences:
            if len(seq) == 0:
                raise ValueError("sequences must be non-empty")
            if seq.min() < 0 or seq.max() >= self.vocab_size:
                raise ValueError("token index out of range")
        present = set(int(v) for v in self.labels)
        if not present <= {0, 1}:
            raise ValueError("labels must be 0 or 1")
        if present != {0, 1}:
            raise ValueError("both labels must be present")

    def __len__(self) -> int:
        return len(self.sequences)


@dataclass(frozen=True, eq=False)
class LinearClassifier:
    weights: np.ndarray
    bias: float

    def __post_init__(self):
        if not (np.all(np.isfinite(self.weights)) and math.isfinite(self.bias)):
            raise ValueError("classifier parameters must be finite")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 300
    l2: float = 0.001

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")


def synth_corpus(
    vocab_size: int,
    dim: int,
    train_n: int,
    test_n: int,
    seq_len: int,
    seed: int,
) -> tuple[EmbeddingTable, LabeledCorpus, LabeledCorpus]:
    """Generate embeddings plus train/test corpora, deterministic in seed.

    Token polarities are an evenly spaced grid over [-1, 1] assigned in
    shuffled original-index order, so adjacent original indices carry
    unrelated polarities and re-ordering has room to help.
    """
    if vocab_size < 8:
        raise ValueError("vocab_size must be >= 8")
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if train_n < 2 or test_n < 2 or seq_len < 1:
        raise ValueError("infeasible corpus sizes")
    rng = np.random.default_rng(seed)
    axis = rng.standard_normal(dim)
    axis /= np.linalg.norm(axis)
    polarity = rng.permutation(np.linspace(-1.0, 1.0, vocab_size))
    vectors = polarity[:, None] * axis[None, :] + _EMBED_NOISE * rng.standard_normal(
        (vocab_size, dim)
    )
    tokens = [f"tok{i:05d}" for i in range(vocab_size)]
    table = EmbeddingTable(tokens, vectors)

    def draw(count: int) -> LabeledCorpus:
        sequences = []
        labels = np.empty(count, dtype=np.int64)
        for i in range(count):
            side = 1.0 if rng.random() < 0.5 else -1.0
            weights = np.exp(side * _POLARITY_BIAS * polarity)
            weights /= weights.sum()
            seq = rng.choice(vocab_size, size=seq_len, p=weights)
            sequences.append(seq.astype(np.int64))
            projection = float(vectors[seq].mean(axis=0) @ axis)
            labels[i] = 1 if projection > 0 else 0
        return LabeledCorpus(sequences, labels, vocab_size)

    return table, draw(train_n), draw(test_n)


def _features(corpus: LabeledCorpus, table: EmbeddingTable) -> np.ndarray:
    return np.stack([table.vectors[seq].mean(axis=0) for seq in corpus.sequences])


def train(
    corpus: LabeledCorpus, table: EmbeddingTable, cfg: TrainConfig = TrainConfig()
) -> LinearClassifier:
    """Full-batch gradient descent on L2-penalized logistic loss."""
    if corpus.vocab_size > table.size:
        raise ValueError("corpus vocabulary exceeds embedding table")
    x = _features(corpus, table)
    y = corpus.labels.astype(np.float64)
    n, d = x.shape
    w = np.zeros(d)
    b = 0.0
    for _ in range(cfg.epochs):
        p = 1.0 / (1.0 + np.exp(-(x @ w + b)))
        w = w - cfg.learning_rate * (x.T @ (p - y) / n + cfg.l2 * w)
        b = b - cfg.learning_rate * float(np.mean(p - y))
    return LinearClassifier(w, b)


def log_loss(
    clf: LinearClassifier, corpus: LabeledCorpus, table: EmbeddingTable, l2: float = 0.0
) -> float:
    """Mean logistic loss of the classifier on a corpus, plus the L2 penalty."""
    x = _features(corpus, table)
    y = corpus.labels.astype(np.float64)
    z = x @ clf.weights + clf.bias
    # log(1 + exp(-|z|)) formulation avoids overflow for large |z|
    loss = np.mean(np.logaddexp(0.0, z) - y * z)
    return float(loss + 0.5 * l2 * clf.weights @ clf.weights)


def predict(clf: LinearClassifier, seq, table: EmbeddingTable) -> float:
    """Probability of label 1 for one token-index sequence."""
    seq = np.asarray(seq, dtype=np.int64)
    z = float(table.vectors[seq].mean(axis=0) @ clf.weights + clf.bias)
    return 1.0 / (1.0 + math.exp(-z))


def evaluate(clf: LinearClassifier, corpus: LabeledCorpus, table: EmbeddingTable) -> float:
    """Fraction of samples whose thresholded prediction (p >= 0.5) misses the label."""
    x = _features(corpus, table)
    decided = (x @ clf.weights + clf.bias >= 0.0).astype(np.int64)
    return float(np.mean(decided != corpus.labels))


# --- file formats ------------------------------------------------------------

def save_corpus(corpus: LabeledCorpus, path) -> None:
    """Write `N vocab_size` then one `label idx1 .. idxk` line per sample."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{len(corpus)} {corpus.vocab_size}\n")
        for seq, label in zip(corpus.sequences, corpus.labels):
            f.write(f"{label} " + " ".join(str(i) for i in seq) + "\n")


def load_corpus(path) -> LabeledCorpus:
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ValueError("corpus file header must be 'N vocab_size'")
        n, vocab = int(header[0]), int(header[1])
        sequences = []
        labels = np.empty(n, dtype=np.int64)
        for i in range(n):
            parts = f.readline().split()
            if len(parts) < 2:
                raise ValueError(f"corpus line {i + 2} must hold a label and indices")
            labels[i] = int(parts[0])
            sequences.append(np.array(parts[1:], dtype=np.int64))
    return LabeledCorpus(sequences, labels, vocab)


def save_classifier(clf: LinearClassifier, path) -> None:
    """Write `d` then the d weights and the bias, one real per line."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{len(clf.weights)}\n")
        for w in clf.weights:
            f.write(f"{float(w)!r}\n")
        f.write(f"{float(clf.bias)!r}\n")


def load_classifier(path) -> LinearClassifier:
    with open(path, "r", encoding="utf-8") as f:
        values = f.read().split()
    if not values:
        raise ValueError("empty classifier file")
    d = int(values[0])
    if len(values) != d + 2:
        raise ValueError(f"classifier file must hold d then {d + 1} reals")
    reals = np.array(values[1:], dtype=np.float64)
    return LinearClassifier(reals[:d], float(reals[d]))
