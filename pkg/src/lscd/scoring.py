"""Per-target change scores.

Context-free: Euclidean distance between a word's aligned vectors.
Context-dependent: mean pairwise Euclidean (MPE) distance between the two
periods' sets of word-use vectors,

    d(W_t1, W_t2) = (1 / (|W_t1| * |W_t2|)) * sum_i sum_j ||w_i - w_j||

computed exactly over all pairs by default; a seeded uniform pair subsample
can be enabled for very frequent words.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, TYPE_CHECKING

import numpy as np

from .align import AlignedPair

if TYPE_CHECKING:
    from .context import UseSet

CONTEXT_FREE = "context_free"
CONTEXT_DEPENDENT = "context_dependent"

# Cap on the elements of one pairwise-distance block, to bound memory.
_BLOCK_ELEMENTS = 2**21


@dataclass
class ChangeScores:
    """Scores per target word.

    Targets that could not be scored are listed in `unscorable` with a
    reason. After median substitution (fill_unscorable) such targets carry
    a score as well; `status` distinguishes the cases.
    """

    model: str
    scores: dict[str, float]
    unscorable: dict[str, str] = field(default_factory=dict)

    @property
    def targets(self) -> list[str]:
        return list(self.scores) + [w for w in self.unscorable if w not in self.scores]

    def status(self, word: str) -> str:
        reason = self.unscorable.get(word)
        if reason is None:
            return "ok"
        if word in self.scores:
            return f"median({reason})"
        return f"unscorable({reason})"


def static_score(aligned: AlignedPair, targets: list[str]) -> ChangeScores:
    """Euclidean distance between the rotated t1 vector and the t2 vector."""
    scores: dict[str, float] = {}
    unscorable: dict[str, str] = {}
    for word in targets:
        in_t1 = word in aligned.space_t1
        in_t2 = word in aligned.space_t2
        if not (in_t1 and in_t2):
            missing = [p for p, ok in (("t1", in_t1), ("t2", in_t2)) if not ok]
            unscorable[word] = f"missing in {' and '.join(missing)} vocabulary"
            continue
        mapped = aligned.space_t1.vector(word) @ aligned.rotation
        scores[word] = float(np.linalg.norm(mapped - aligned.space_t2.vector(word)))
    return ChangeScores(model=CONTEXT_FREE, scores=scores, unscorable=unscorable)


def mpe_distance(
    uses_t1: np.ndarray,
    uses_t2: np.ndarray,
    pair_budget: int | None = None,
    seed: int = 0,
) -> float:
    """Mean over all pairwise L2 distances between two sets of vectors.

    With a pair budget set and fewer pairs than budget available the exact
    mean is returned; otherwise `pair_budget` pairs are sampled uniformly
    (seeded, with replacement).
    """
    a = np.asarray(uses_t1, dtype=np.float64)
    b = np.asarray(uses_t2, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("use sets must be 2-d arrays")
    if len(a) == 0 or len(b) == 0:
        raise ValueError("use sets must be non-empty")
    if a.shape[1] != b.shape[1]:
        raise ValueError("use sets have different dimensionality")
    # Canonical operand order makes d(A, B) and d(B, A) run the identical
    # float computation, so symmetry holds exactly.
    if (len(b), b.tobytes()) < (len(a), a.tobytes()):
        a, b = b, a
    m, n = len(a), len(b)

    if pair_budget is not None and m * n > pair_budget:
        rng = np.random.default_rng(seed)
        ii = rng.integers(0, m, size=pair_budget)
        jj = rng.integers(0, n, size=pair_budget)
        return float(np.linalg.norm(a[ii] - b[jj], axis=1).mean())

    block = max(1, _BLOCK_ELEMENTS // (n * a.shape[1]))
    total = 0.0
    for start in range(0, m, block):
        diff = a[start : start + block, None, :] - b[None, :, :]
        total += float(np.sqrt((diff * diff).sum(axis=2)).sum())
    return total / (m * n)


def contextual_score(
    use_pairs: Iterable[tuple["UseSet", "UseSet"]],
    targets: list[str],
    pair_budget: int | None = None,
    seed: int = 0,
) -> ChangeScores:
    """MPE distance per target from its two per-period use sets."""
    by_word: dict[str, tuple["UseSet", "UseSet"]] = {}
    for uses_t1, uses_t2 in use_pairs:
        if uses_t1.word != uses_t2.word:
            raise ValueError(
                f"mismatched use-set pair: {uses_t1.word!r} vs {uses_t2.word!r}"
            )
        by_word[uses_t1.word] = (uses_t1, uses_t2)

    scores: dict[str, float] = {}
    unscorable: dict[str, str] = {}
    for word in targets:
        pair = by_word.get(word)
        if pair is None:
            unscorable[word] = "no uses extracted"
            continue
        uses_t1, uses_t2 = pair
        empty = [p for p, u in (("t1", uses_t1), ("t2", uses_t2)) if len(u.vectors) == 0]
        if empty:
            unscorable[word] = " and ".join(f"no {p} uses" for p in empty)
            continue
        scores[word] = mpe_distance(
            uses_t1.vectors, uses_t2.vectors, pair_budget=pair_budget, seed=seed
        )
    return ChangeScores(model=CONTEXT_DEPENDENT, scores=scores, unscorable=unscorable)


def write_scores_tsv(all_scores: Iterable[ChangeScores], path) -> None:
    """Scores TSV: one row per (model, target) as model, word, score, status.

    Unscored targets carry `nan` in the score column; their reason lives in
    the status column.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("model\tword\tscore\tstatus\n")
        for cs in all_scores:
            for word in cs.targets:
                value = cs.scores.get(word, float("nan"))
                fh.write(
                    f"{cs.model}\t{word}\t{format(value, '.9g')}\t{cs.status(word)}\n"
                )


def read_scores_tsv(path) -> dict[str, ChangeScores]:
    """Inverse of write_scores_tsv, keyed by model tag."""
    by_model: dict[str, ChangeScores] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith("model\t"):
            raise ValueError(f"not a scores TSV: {path}")
        for line in fh:
            model, word, score_str, status = line.rstrip("\n").split("\t")
            cs = by_model.setdefault(model, ChangeScores(model=model, scores={}))
            if status.startswith("unscorable(") or status.startswith("median("):
                cs.unscorable[word] = status[status.index("(") + 1 : -1]
            if status == "ok" or status.startswith("median("):
                cs.scores[word] = float(score_str)
    return by_model


def fill_unscorable(scores: ChangeScores) -> ChangeScores:
    """Assign unscorable targets the median of the scored values so that a
    full ranking exists; the unscorable reasons stay attached for flagging.

    With nothing scored at all every target gets 0.0 (a fully tied ranking).
    """
    if not scores.unscorable:
        return scores
    fill = float(np.median(list(scores.scores.values()))) if scores.scores else 0.0
    filled = dict(scores.scores)
    for word in scores.unscorable:
        filled[word] = fill
    return ChangeScores(
        model=scores.model, scores=filled, unscorable=dict(scores.unscorable)
    )
