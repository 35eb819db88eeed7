"""Interpolated word scores and ranked, truncatable vocabularies."""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence

from .corpus import CorpusProfile
from .errors import EstimationError, VocabSelectError
from .weights import MixtureWeights


@dataclass(frozen=True)
class RankedVocabulary:
    """Training words ordered by descending score, ties by ascending word."""

    entries: tuple[tuple[str, float], ...]

    def __len__(self):
        return len(self.entries)

    @property
    def words(self) -> list[str]:
        return [w for w, _ in self.entries]

    @property
    def scores(self) -> list[float]:
        return [s for _, s in self.entries]


def rank_scores(scores: dict[str, float]) -> RankedVocabulary:
    return RankedVocabulary(tuple(
        sorted(scores.items(), key=lambda item: (-item[1], item[0]))))


def score_and_rank(train: Sequence[CorpusProfile],
                   weights: MixtureWeights) -> RankedVocabulary:
    """Score each training word by sum_j lambda_j n_j(word) and rank.

    The scores use unsmoothed normalized counts.  Words seen only in
    held-out text never enter the ranking.
    """
    if len(weights.lambdas) != len(train):
        raise EstimationError(
            f"{len(weights.lambdas)} weights for {len(train)} corpora")
    for p in train:
        if p.token_count == 0:
            raise EstimationError(f"training corpus {p.corpus_id!r} is empty")
    words = set()
    for p in train:
        words.update(p.raw_counts)
    scores = {}
    for w in words:
        s = 0.0
        # Fixed corpus order keeps the floating-point sum reproducible.
        for lam, p in zip(weights.lambdas, train):
            s += lam * p.normalized_counts.get(w, 0.0)
        scores[w] = s
    return rank_scores(scores)


def truncate(ranked: RankedVocabulary, size: int) -> set[str]:
    """The top ``size`` words (all of them if fewer)."""
    if size < 1:
        raise VocabSelectError("vocabulary size must be at least 1")
    return {w for w, _ in ranked.entries[:size]}


def format_ranked(ranked: RankedVocabulary) -> str:
    out = io.StringIO()
    for rank, (word, score) in enumerate(ranked.entries, 1):
        out.write(f"{rank}\t{word}\t{score:.12g}\n")
    return out.getvalue()
