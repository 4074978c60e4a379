"""Context-dependent word-use representations from a sentence time classifier.

The built-in encoder is deliberately small: a token embedding table, a
learned per-offset weighting that mixes each token's embedding with its
neighbors inside a fixed radius, and a logistic head over the mean-pooled
contextual vectors that predicts the sentence's period. The per-token
contextual vectors that feed the pooled classifier input double as word-use
representations. Anything honoring the same contract (per-use vectors in the
TSV format below) can be plugged in via import_uses instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import T2, PERIODS, Corpus, TimeClfDataset, TRAIN, TEST
from .errors import DatasetError, FormatError, TrainingDivergedError

_LR_FLOOR_FACTOR = 1e-2


@dataclass(frozen=True)
class EncoderConfig:
    dimension: int = 128
    context_radius: int = 5
    epochs: int = 1
    learning_rate: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.context_radius < 0:
            raise ValueError("context_radius must be >= 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass
class ClfMetrics:
    accuracy: float
    per_label_accuracy: dict[str, float]
    example_counts: dict[str, int]


@dataclass
class UseSet:
    """All contextual vectors of one word in one period, one per occurrence."""

    word: str
    period: str
    vectors: np.ndarray  # (n_uses, dimension)
    sentence_indices: list[int]

    @property
    def empty(self) -> bool:
        return len(self.vectors) == 0


class TimeClassifier:
    """Trained sentence time classifier exposing per-token contextual vectors."""

    def __init__(
        self,
        words: list[str],
        embeddings: np.ndarray,
        offset_weights: np.ndarray,
        head_w: np.ndarray,
        head_b: float,
        config: EncoderConfig,
    ):
        self.words = words
        self.word_ids = {w: i for i, w in enumerate(words)}
        self.embeddings = embeddings
        self.offset_weights = offset_weights  # length 2 * radius + 1
        self.head_w = head_w
        self.head_b = head_b
        self.config = config

    @property
    def radius(self) -> int:
        return (len(self.offset_weights) - 1) // 2

    def _embed(self, tokens: list[str]) -> np.ndarray:
        rows = np.zeros((len(tokens), self.embeddings.shape[1]))
        for i, tok in enumerate(tokens):
            idx = self.word_ids.get(tok)
            if idx is not None:
                rows[i] = self.embeddings[idx]
        return rows

    def contextual_vectors(self, tokens: list[str]) -> np.ndarray:
        """Per-token contextual vectors: each token's embedding mixed with its
        neighbors under the learned offset weighting. Out-of-vocabulary tokens
        contribute a zero embedding."""
        rows = self._embed(tokens)
        return _mix(rows, self.offset_weights)

    def predict_proba(self, tokens: list[str]) -> float:
        """Probability that the sentence comes from the second period."""
        if not tokens:
            raise ValueError("cannot classify an empty sentence")
        pooled = self.contextual_vectors(tokens).mean(axis=0)
        return float(_sigmoid(self.head_w @ pooled + self.head_b))


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + np.exp(-z))
    ez = np.exp(z)
    return ez / (1.0 + ez)


def _mix(rows: np.ndarray, offset_weights: np.ndarray) -> np.ndarray:
    """H[i] = sum over offsets o of weight[o] * rows[i + o], missing
    neighbors contributing nothing."""
    radius = (len(offset_weights) - 1) // 2
    h = np.zeros_like(rows)
    length = len(rows)
    for o in range(-radius, radius + 1):
        w = offset_weights[o + radius]
        if o == 0:
            h += w * rows
        elif o < 0 and length + o > 0:
            h[-o:] += w * rows[:o]
        elif o > 0 and length - o > 0:
            h[:-o] += w * rows[o:]
    return h


def classifier_loss_and_grads(
    model: TimeClassifier, tokens: list[str], label: int
) -> tuple[float, dict[str, np.ndarray]]:
    """Binary cross-entropy of one example and its gradients with respect to
    the head, the offset weights and the embedding rows involved.

    The embedding gradient is returned dense over the vocabulary (callers
    doing SGD apply it sparsely via the token ids instead).
    """
    rows = model._embed(tokens)
    g = model.offset_weights
    radius = model.radius
    length = len(tokens)

    h = _mix(rows, g)
    pooled = h.mean(axis=0)
    z = float(model.head_w @ pooled + model.head_b)
    p = _sigmoid(z)
    y = float(label)
    eps = 1e-12
    loss = -(y * np.log(p + eps) + (1.0 - y) * np.log(1.0 - p + eps))

    dz = p - y
    d_head_w = dz * pooled
    d_head_b = dz
    d_pool = dz * model.head_w  # dH[i] = d_pool / length for every i

    d_g = np.zeros_like(g)
    for o in range(-radius, radius + 1):
        if o <= 0:
            segment = rows[: length + o] if o < 0 else rows
        else:
            segment = rows[o:]
        if len(segment):
            d_g[o + radius] = (d_pool @ segment.sum(axis=0)) / length

    # Token at position j feeds h[j - o] for every valid offset o, so its
    # embedding gradient is d_pool/length scaled by the sum of valid weights.
    coeffs = np.empty(length)
    for j in range(length):
        lo = max(-radius, j - (length - 1))
        hi = min(radius, j)
        coeffs[j] = g[lo + radius : hi + radius + 1].sum()
    d_rows = np.outer(coeffs, d_pool) / length

    d_emb = np.zeros_like(model.embeddings)
    for j, tok in enumerate(tokens):
        idx = model.word_ids.get(tok)
        if idx is not None:
            d_emb[idx] += d_rows[j]

    return float(loss), {
        "head_w": d_head_w,
        "head_b": np.array(d_head_b),
        "offset_weights": d_g,
        "embeddings": d_emb,
    }


def train_time_classifier(
    dataset: TimeClfDataset,
    config: EncoderConfig,
    vocabulary: list[str] | None = None,
) -> tuple[TimeClassifier, ClfMetrics]:
    """Train on the train split for exactly `config.epochs` passes and report
    accuracy on the untouched test split.

    `vocabulary` may supply additional words (e.g. the full joint corpus
    vocabulary) so that later extraction never meets out-of-vocabulary
    tokens; words never seen in training keep their random initialization.
    """
    train_idx = dataset.indices(TRAIN)
    test_idx = dataset.indices(TEST)
    if not train_idx or not test_idx:
        raise DatasetError("both train and test splits must be non-empty")

    words = sorted({t for tokens, _ in dataset.examples for t in tokens})
    if vocabulary is not None:
        seen = set(words)
        words.extend(w for w in vocabulary if w not in seen)

    rng = np.random.default_rng(config.seed)
    d = config.dimension
    n_offsets = 2 * config.context_radius + 1
    # Unit-scale embeddings keep the pooled features (and hence the head
    # gradients) large enough to train in a single epoch.
    model = TimeClassifier(
        words=words,
        embeddings=rng.random((len(words), d)) - 0.5,
        offset_weights=np.full(n_offsets, 1.0 / n_offsets),
        head_w=np.zeros(d),
        head_b=0.0,
        config=config,
    )

    lr0 = config.learning_rate
    lr_floor = lr0 * _LR_FLOOR_FACTOR
    total_steps = config.epochs * len(train_idx)
    step = 0
    for _ in range(config.epochs):
        for i in rng.permutation(len(train_idx)):
            example_idx = train_idx[int(i)]
            tokens, label = dataset.examples[example_idx]
            if not tokens:
                continue
            lr = max(lr0 * (1.0 - step / total_steps), lr_floor)
            step += 1
            _sgd_step(model, tokens, 1 if label == T2 else 0, lr, step)

    metrics = _evaluate(model, dataset, test_idx)
    return model, metrics


def _sgd_step(
    model: TimeClassifier, tokens: list[str], label: int, lr: float, step: int
) -> None:
    rows = model._embed(tokens)
    g = model.offset_weights.copy()  # snapshot: all gradients at one point
    radius = model.radius
    length = len(tokens)

    h = _mix(rows, g)
    pooled = h.mean(axis=0)
    z = float(model.head_w @ pooled + model.head_b)
    if not np.isfinite(z):
        raise TrainingDivergedError(f"non-finite activation at step {step}", step=step)
    dz = _sigmoid(z) - float(label)
    d_pool = dz * model.head_w

    model.head_w -= lr * dz * pooled
    model.head_b -= lr * dz

    prefix = np.vstack([np.zeros(rows.shape[1]), np.cumsum(rows, axis=0)])
    for o in range(-radius, radius + 1):
        if o <= 0:
            seg_sum = prefix[length + o] if o < 0 else prefix[length]
        else:
            seg_sum = prefix[length] - prefix[o]
        model.offset_weights[o + radius] -= lr * float(d_pool @ seg_sum) / length

    coeffs = np.empty(length)
    for j in range(length):
        lo = max(-radius, j - (length - 1))
        hi = min(radius, j)
        coeffs[j] = g[lo + radius : hi + radius + 1].sum()
    d_rows = np.outer(-lr * coeffs / length, d_pool)
    ids = np.array(
        [model.word_ids[t] for t in tokens if t in model.word_ids], dtype=np.int64
    )
    keep = np.array([t in model.word_ids for t in tokens])
    if len(ids):
        np.add.at(model.embeddings, ids, d_rows[keep])


def _evaluate(
    model: TimeClassifier, dataset: TimeClfDataset, test_idx: list[int]
) -> ClfMetrics:
    hits = {p: 0 for p in PERIODS}
    counts = {p: 0 for p in PERIODS}
    for i in test_idx:
        tokens, label = dataset.examples[i]
        if not tokens:
            continue
        predicted = T2 if model.predict_proba(tokens) > 0.5 else PERIODS[0]
        counts[label] += 1
        if predicted == label:
            hits[label] += 1
    total = sum(counts.values())
    if total == 0:
        raise DatasetError("test split has no usable examples")
    per_label = {
        p: (hits[p] / counts[p]) if counts[p] else 0.0 for p in PERIODS
    }
    accuracy = sum(hits.values()) / total
    return ClfMetrics(
        accuracy=accuracy, per_label_accuracy=per_label, example_counts=counts
    )


def extract_uses(
    model: TimeClassifier, corpus: Corpus, targets: list[str]
) -> list[UseSet]:
    """One contextual vector per occurrence of each target in the corpus.

    Occurrences in the same sentence yield separate entries. A target absent
    from the corpus yields an empty UseSet; downstream policy decides what to
    do with it.
    """
    wanted = set(targets)
    collected: dict[str, list[np.ndarray]] = {w: [] for w in targets}
    indices: dict[str, list[int]] = {w: [] for w in targets}
    for si, sentence in enumerate(corpus.sentences):
        if wanted.isdisjoint(sentence):
            continue
        vectors = model.contextual_vectors(sentence)
        for pos, token in enumerate(sentence):
            if token in wanted:
                collected[token].append(vectors[pos])
                indices[token].append(si)
    dim = model.embeddings.shape[1]
    return [
        UseSet(
            word=w,
            period=corpus.period,
            vectors=np.array(collected[w]).reshape(len(collected[w]), dim),
            sentence_indices=indices[w],
        )
        for w in targets
    ]


def save_classifier(model: TimeClassifier, path: str | Path) -> None:
    """Persist the trained classifier (binary, full precision)."""
    cfg = model.config
    np.savez(
        path,
        words=np.array(model.words),
        embeddings=model.embeddings,
        offset_weights=model.offset_weights,
        head_w=model.head_w,
        head_b=np.array(model.head_b),
        config=np.array(
            [
                cfg.dimension,
                cfg.context_radius,
                cfg.epochs,
                cfg.learning_rate,
                cfg.seed,
            ]
        ),
    )


def load_classifier(path: str | Path) -> TimeClassifier:
    data = np.load(path)
    raw = data["config"]
    config = EncoderConfig(
        dimension=int(raw[0]),
        context_radius=int(raw[1]),
        epochs=int(raw[2]),
        learning_rate=float(raw[3]),
        seed=int(raw[4]),
    )
    return TimeClassifier(
        words=[str(w) for w in data["words"]],
        embeddings=data["embeddings"],
        offset_weights=data["offset_weights"],
        head_w=data["head_w"],
        head_b=float(data["head_b"]),
        config=config,
    )


def export_uses(use_sets: list[UseSet], path: str | Path) -> None:
    """Write use sets as TSV: word, period, sentence_index, vector (space
    separated, 9 significant digits)."""
    with open(path, "w", encoding="utf-8") as fh:
        for us in use_sets:
            for si, vec in zip(us.sentence_indices, us.vectors):
                values = " ".join(format(x, ".9g") for x in vec)
                fh.write(f"{us.word}\t{us.period}\t{si}\t{values}\n")


def import_uses(path: str | Path) -> list[UseSet]:
    """Read the use-set TSV, grouping rows by (word, period) in order of
    first appearance. Raises FormatError (with the line number) on ragged
    vector dimensions or malformed rows."""
    groups: dict[tuple[str, str], tuple[list[np.ndarray], list[int]]] = {}
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 4:
                raise FormatError("expected 4 tab-separated fields", line=i)
            word, period, si_str, vec_str = parts
            if period not in PERIODS:
                raise FormatError(f"unknown period {period!r}", line=i)
            try:
                si = int(si_str)
                vec = np.array([float(x) for x in vec_str.split()])
            except ValueError as exc:
                raise FormatError("malformed use-set row", line=i) from exc
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise FormatError(
                    f"vector dimension {len(vec)} != {dim}", line=i
                )
            vectors, sids = groups.setdefault((word, period), ([], []))
            vectors.append(vec)
            sids.append(si)
    return [
        UseSet(
            word=word,
            period=period,
            vectors=np.array(vectors),
            sentence_indices=sids,
        )
        for (word, period), (vectors, sids) in groups.items()
    ]
