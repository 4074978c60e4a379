"""Scoring predictions against gold data.

Ranked predictions are evaluated with Spearman's rank-order correlation;
binary change labels with plain accuracy. Spearman is computed tie-corrected
by converting both sides to average ranks and taking the product-moment
correlation of the rank vectors (exact in the presence of ties).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .ensemble import CHANGED, Ranking, average_ranks
from .errors import FormatError, TargetMismatchError, UndefinedCorrelationError
from .scoring import ChangeScores


@dataclass
class GoldData:
    """Gold annotations for the target words: graded change values and/or
    binary change labels."""

    graded: dict[str, float] | None = None
    binary: dict[str, int] | None = None


def load_gold(path: str | Path) -> GoldData:
    """Read graded gold data: `word<TAB>float`, one target per line."""
    graded: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise FormatError(f"expected 'word<TAB>value' in {path}", line=i)
            try:
                graded[parts[0]] = float(parts[1])
            except ValueError as exc:
                raise FormatError(f"bad gold value {parts[1]!r}", line=i) from exc
    return GoldData(graded=graded)


def load_binary_gold(path: str | Path) -> GoldData:
    """Read binary gold labels: `word<TAB>0|1`, one target per line."""
    binary: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2 or parts[1] not in ("0", "1"):
                raise FormatError(f"expected 'word<TAB>0|1' in {path}", line=i)
            binary[parts[0]] = int(parts[1])
    return GoldData(binary=binary)


def spearman_values(x: np.ndarray, y: np.ndarray) -> float:
    """Tie-corrected Spearman's rho of two value vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("expected two 1-d vectors of equal length")
    if len(x) < 2:
        raise UndefinedCorrelationError("need at least two items")
    rx = average_ranks(x)
    ry = average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    vx = float((dx * dx).sum())
    vy = float((dy * dy).sum())
    if vx == 0.0 or vy == 0.0:
        raise UndefinedCorrelationError("zero rank variance on one side")
    # Single square root keeps rho exactly +/-1 for identical/reversed ranks.
    return float((dx * dy).sum() / np.sqrt(vx * vy))


def _as_value_map(pred) -> Mapping[str, float]:
    if isinstance(pred, Ranking):
        return pred.ranks
    if isinstance(pred, ChangeScores):
        return pred.scores
    return pred


def spearman(pred, gold: GoldData | Mapping[str, float]) -> float:
    """Spearman's rho of a prediction (Ranking, ChangeScores or mapping)
    against graded gold values, matched by target word."""
    pred_map = _as_value_map(pred)
    gold_map = gold.graded if isinstance(gold, GoldData) else gold
    if gold_map is None:
        raise ValueError("gold data has no graded values")
    ps, gs = set(pred_map), set(gold_map)
    if ps != gs:
        raise TargetMismatchError(only_left=ps - gs, only_right=gs - ps)
    words = list(pred_map)
    return spearman_values(
        np.array([pred_map[w] for w in words]),
        np.array([gold_map[w] for w in words]),
    )


def binary_accuracy(
    pred: Mapping[str, str | int], gold: GoldData | Mapping[str, int]
) -> float:
    """Fraction of matching binary change labels."""
    gold_map = gold.binary if isinstance(gold, GoldData) else gold
    if gold_map is None:
        raise ValueError("gold data has no binary labels")
    ps, gs = set(pred), set(gold_map)
    if ps != gs:
        raise TargetMismatchError(only_left=ps - gs, only_right=gs - ps)

    def _as_int(label) -> int:
        if isinstance(label, str):
            return 1 if label == CHANGED or label == "1" else 0
        return int(label)

    hits = sum(1 for w in gold_map if _as_int(pred[w]) == int(gold_map[w]))
    return hits / len(gold_map)
