"""OOV-rate curves and leave-one-segment-out cross-validation."""

from __future__ import annotations

import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import CorpusProfile, merge
from .errors import EstimationError, VocabSelectError
from .vocab import RankedVocabulary, score_and_rank
from .weights import Direction, EmConfig, Method, MixtureWeights, estimate

_logger = logging.getLogger(__name__)

METHODS = (Method.ML, Method.EUCLIDEAN, Method.KL, Method.UNIFORM)


@dataclass(frozen=True)
class OovCurve:
    points: tuple[tuple[int, float], ...]
    split_count: int = 1

    @property
    def sizes(self) -> list[int]:
        return [k for k, _ in self.points]

    @property
    def rates(self) -> list[float]:
        return [r for _, r in self.points]


@dataclass(frozen=True)
class SplitPlan:
    """Leave-one-out folds over named held-out segments.

    ``folds[k]`` is ``(dev_indices, test_index)``.
    """

    segments: tuple[str, ...]
    folds: tuple[tuple[tuple[int, ...], int], ...]

    @classmethod
    def leave_one_out(cls, segments: Sequence[str]) -> SplitPlan:
        s = len(segments)
        if s < 2:
            raise VocabSelectError(
                f"cross-validation needs at least 2 segments, got {s}")
        folds = tuple((tuple(i for i in range(s) if i != k), k)
                      for k in range(s))
        return cls(tuple(segments), folds)


def oov_rate(vocab: set[str] | frozenset[str], test: CorpusProfile) -> float:
    """Fraction of test tokens whose word is outside ``vocab``."""
    if test.token_count == 0:
        raise VocabSelectError(f"test corpus {test.corpus_id!r} is empty")
    oov = sum(c for w, c in test.raw_counts.items() if w not in vocab)
    return oov / test.token_count


def curve(ranked: RankedVocabulary, test: CorpusProfile,
          sizes: Sequence[int]) -> OovCurve:
    """OOV rate of the top-k vocabulary for each k in ``sizes``.

    Computed in one pass: each test word is charged to the rank at which it
    enters the vocabulary, so the result equals truncate + oov_rate per size.
    """
    sizes = [int(k) for k in sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise VocabSelectError("sizes must be strictly increasing")
    if sizes and sizes[0] < 1:
        raise VocabSelectError("vocabulary size must be at least 1")
    if test.token_count == 0:
        raise VocabSelectError(f"test corpus {test.corpus_id!r} is empty")
    position = {w: i for i, w in enumerate(ranked.words)}
    # covered[i] = test tokens whose word has rank i
    covered = np.zeros(len(ranked) + 1, dtype=np.int64)
    for w, c in test.raw_counts.items():
        covered[position.get(w, len(ranked))] += c
    cum = np.cumsum(covered[:-1])
    points = []
    for k in sizes:
        inside = int(cum[min(k, len(ranked)) - 1]) if len(ranked) else 0
        points.append((k, (test.token_count - inside) / test.token_count))
    return OovCurve(tuple(points))


def average_curves(curves: Sequence[OovCurve]) -> OovCurve:
    """Unweighted mean over folds at each size."""
    if not curves:
        raise VocabSelectError("no curves to average")
    sizes = curves[0].sizes
    if any(c.sizes != sizes for c in curves):
        raise VocabSelectError("curves have different size grids")
    n = len(curves)
    points = tuple(
        (k, math.fsum(c.points[i][1] for c in curves) / n)
        for i, k in enumerate(sizes))
    return OovCurve(points, split_count=sum(c.split_count for c in curves))


def mean_weights(folds: Sequence[MixtureWeights]) -> MixtureWeights:
    m = len(folds[0])
    lam = [math.fsum(w.lambdas[j] for w in folds) / len(folds)
           for j in range(m)]
    dist = None
    if all(w.distances is not None for w in folds):
        dist = tuple(math.fsum(w.distances[j] for w in folds) / len(folds)
                     for j in range(m))
    return MixtureWeights(tuple(lam), folds[0].method,
                          iterations=0, distances=dist,
                          corpus_ids=folds[0].corpus_ids)


def log_sizes(lo: int, hi: int, n: int = 51) -> list[int]:
    """About ``n`` integer sizes log-spaced over [lo, hi], deduplicated."""
    if lo < 1 or hi < lo or n < 1:
        raise VocabSelectError(f"bad size grid {lo}:{hi}:{n}")
    if n == 1 or lo == hi:
        return [hi]
    grid = np.geomspace(lo, hi, n)
    sizes = sorted({int(round(x)) for x in grid} | {lo, hi})
    return sizes


def parse_sizes(spec: str, union_size: int) -> list[int]:
    """Parse ``log:LO:HI:N`` or a comma list; ``UNION`` is the candidate
    pool size."""
    spec = spec.strip()

    def value(tok: str) -> int:
        tok = tok.strip()
        if tok.upper() == "UNION":
            return union_size
        try:
            return int(tok)
        except ValueError:
            raise VocabSelectError(f"bad size {tok!r}") from None

    if spec.startswith("log:"):
        parts = spec.split(":")
        if len(parts) != 4:
            raise VocabSelectError(f"bad size grid {spec!r}")
        return log_sizes(value(parts[1]), value(parts[2]), value(parts[3]))
    sizes = [value(t) for t in spec.split(",") if t.strip()]
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])) \
            or sizes[0] < 1:
        raise VocabSelectError(f"sizes {spec!r} must be increasing, >= 1")
    return sizes


@dataclass(frozen=True)
class CrossValidationResult:
    curve: OovCurve
    fold_curves: tuple[OovCurve, ...]
    fold_weights: tuple[MixtureWeights, ...]
    mean_weights: MixtureWeights


def evaluate_split(train: Sequence[CorpusProfile], dev: CorpusProfile,
                   test: CorpusProfile, method: Method | str,
                   sizes: Sequence[int], em: EmConfig = EmConfig(),
                   direction: Direction | str = Direction.HELDOUT_TO_TRAIN):
    weights = estimate(method, train, dev, em, direction)
    ranked = score_and_rank(train, weights)
    return weights, curve(ranked, test, sizes)


def cross_validate(train: Sequence[CorpusProfile],
                   segments: Sequence[CorpusProfile],
                   method: Method | str = Method.ML,
                   sizes: Sequence[int] | None = None,
                   em: EmConfig = EmConfig(),
                   direction: Direction | str = Direction.HELDOUT_TO_TRAIN,
                   jobs: int = 1) -> CrossValidationResult:
    """Estimate on all segments but one, measure OOV on the remaining one,
    and average over every choice of test segment.

    Development segments are pooled into one profile per fold.  ``sizes``
    defaults to the 51-point log grid over the candidate pool.
    """
    for seg in segments:
        if seg.token_count == 0:
            raise VocabSelectError(f"held-out segment {seg.corpus_id!r} "
                                   "is empty")
    plan = SplitPlan.leave_one_out([s.corpus_id for s in segments])
    if sizes is None:
        union = set()
        for p in train:
            union.update(p.raw_counts)
        sizes = log_sizes(1, max(len(union), 1))

    def run(fold):
        k, (dev_ids, test_id) = fold
        dev = merge([segments[i] for i in dev_ids], corpus_id="dev")
        try:
            return evaluate_split(train, dev, segments[test_id], method,
                                  sizes, em, direction)
        except EstimationError as exc:
            raise EstimationError(
                f"fold {k + 1} (test segment "
                f"{plan.segments[test_id]!r}): {exc}") from exc

    folds = list(enumerate(plan.folds))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, folds))
    else:
        results = [run(f) for f in folds]
    fold_weights = tuple(w for w, _ in results)
    fold_curves = tuple(c for _, c in results)
    return CrossValidationResult(average_curves(fold_curves), fold_curves,
                                 fold_weights, mean_weights(fold_weights))


def format_curve_csv(curves: dict[str, OovCurve]) -> str:
    """CSV with one rate column per method, or ``oov_rate`` for one curve
    passed under the key ``""``."""
    names = list(curves)
    first = curves[names[0]]
    for c in curves.values():
        if c.sizes != first.sizes:
            raise VocabSelectError("curves have different size grids")
    header = ["vocab_size"] + [f"oov_rate_{n}" if n else "oov_rate"
                               for n in names]
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for i, k in enumerate(first.sizes):
        row = [str(k)] + [f"{curves[n].points[i][1]:.6f}" for n in names]
        out.write(",".join(row) + "\n")
    return out.getvalue()
