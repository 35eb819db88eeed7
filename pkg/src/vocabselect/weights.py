"""Estimation of per-corpus interpolation weights.

Four estimators produce a :class:`MixtureWeights` vector on the simplex:

* ``ml`` -- weights maximizing the held-out likelihood of the mixture of
  smoothed training unigram models, found by EM;
* ``euclidean`` / ``kl`` -- weights inversely proportional to the distance
  of each training corpus from the held-out text;
* ``uniform`` -- equal weights.
"""

from __future__ import annotations

import enum
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .corpus import (CorpusProfile, GlobalVocabulary, SmoothedDistribution,
                     smooth)
from .errors import EstimationError, IngestionError

_logger = logging.getLogger(__name__)

ZERO_DISTANCE = 1e-12


class Method(str, enum.Enum):
    ML = "ml"
    EUCLIDEAN = "euclidean"
    KL = "kl"
    UNIFORM = "uniform"


class UpdateRule(str, enum.Enum):
    STANDARD = "standard"
    FIGURE1 = "figure1"


class Direction(str, enum.Enum):
    HELDOUT_TO_TRAIN = "h2t"
    TRAIN_TO_HELDOUT = "t2h"


@dataclass(frozen=True)
class EmConfig:
    update_rule: UpdateRule = UpdateRule.STANDARD
    convergence_threshold: float = 1e-6
    max_iterations: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "update_rule", UpdateRule(self.update_rule))
        if not self.convergence_threshold > 0:
            raise EstimationError("convergence threshold must be positive")
        if self.max_iterations < 1:
            raise EstimationError("max_iterations must be at least 1")


@dataclass(frozen=True)
class MixtureWeights:
    """Interpolation weights plus estimation metadata.

    ``loglik_trace`` holds the held-out log-likelihood (natural log) of the
    initial weights followed by one value per EM iteration.
    """

    lambdas: tuple[float, ...]
    method: Method
    iterations: int = 0
    final_log_likelihood: float | None = None
    distances: tuple[float, ...] | None = None
    corpus_ids: tuple[str, ...] | None = None
    loglik_trace: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        lam = tuple(float(x) for x in self.lambdas)
        object.__setattr__(self, "lambdas", lam)
        if not lam:
            raise EstimationError("empty weight vector")
        if min(lam) < 0 or abs(math.fsum(lam) - 1.0) > 1e-9:
            raise EstimationError(f"weights {lam} are not on the simplex")
        if self.corpus_ids is not None and len(self.corpus_ids) != len(lam):
            raise EstimationError("one corpus id per weight is required")

    def __len__(self):
        return len(self.lambdas)


def _check_nonempty(profile: CorpusProfile, role: str):
    if profile.token_count == 0:
        raise EstimationError(f"{role} corpus {profile.corpus_id!r} is empty")


def log_likelihood(lambdas: np.ndarray, probs: np.ndarray,
                   counts: np.ndarray) -> float:
    """sum_i C(w_i) log sum_j lambda_j P(w_i|j), in nats.

    ``probs`` has shape (m, n) restricted to the held-out words and ``counts``
    shape (n,).
    """
    return math.fsum((counts * np.log(lambdas @ probs)).tolist())


def _heldout_arrays(train: Sequence[SmoothedDistribution],
                    heldout: CorpusProfile):
    vocab = train[0].vocab
    for dist in train[1:]:
        if dist.vocab != vocab:
            raise EstimationError(
                "training distributions use different vocabularies")
    words = heldout.words()
    for w in words:
        if w not in vocab:
            raise EstimationError(
                f"held-out word {w!r} is not in the global vocabulary")
    ids = np.array([vocab.index[w] for w in words], dtype=np.intp)
    probs = np.vstack([d.probs[ids] for d in train])
    counts = np.array([heldout.raw_counts[w] for w in words], dtype=float)
    rel = np.array([heldout.normalized_counts[w] for w in words])
    return probs, counts, rel


def estimate_ml(train: Sequence[SmoothedDistribution], heldout: CorpusProfile,
                config: EmConfig = EmConfig()) -> MixtureWeights:
    """Maximum-likelihood interpolation weights by EM.

    With the standard rule each step moves every weight to the average
    posterior responsibility of its corpus over held-out tokens.  The
    ``figure1`` rule instead reweights each corpus by its whole-corpus
    held-out likelihood, which drives the weights to a vertex.
    """
    m = len(train)
    if m == 0:
        raise EstimationError("no training corpora")
    _check_nonempty(heldout, "held-out")
    probs, counts, rel = _heldout_arrays(train, heldout)
    lam = np.full(m, 1.0 / m)
    trace = [log_likelihood(lam, probs, counts)]
    if UpdateRule(config.update_rule) is UpdateRule.FIGURE1:
        corpus_loglik = np.log(probs) @ counts
    iterations = 0
    while iterations < config.max_iterations:
        if config.update_rule is UpdateRule.STANDARD:
            mix = lam @ probs
            # Relative counts keep the update bit-identical under count scaling.
            new = lam * (probs @ (rel / mix))
            new /= new.sum()
        else:
            logw = np.log(lam) + corpus_loglik
            logw -= logw.max()
            new = np.exp(logw)
            new /= new.sum()
        iterations += 1
        delta = float(np.max(np.abs(new - lam)))
        lam = new
        trace.append(log_likelihood(lam, probs, counts))
        if delta <= config.convergence_threshold:
            break
    else:
        _logger.warning("EM stopped after %d iterations without converging",
                        iterations)
    return MixtureWeights(tuple(lam.tolist()), Method.ML,
                          iterations=iterations,
                          final_log_likelihood=trace[-1],
                          corpus_ids=tuple(d.corpus_id for d in train),
                          loglik_trace=tuple(trace))


def euclidean_distance(a: CorpusProfile, b: CorpusProfile,
                       vocab: GlobalVocabulary | None = None) -> float:
    """Euclidean distance between the normalized count vectors of two corpora.

    Words absent from a corpus count as 0.  ``vocab`` is accepted for
    symmetry with the other metrics; words outside both corpora add nothing.
    """
    _check_nonempty(a, "first")
    _check_nonempty(b, "second")
    words = vocab.words if vocab is not None else sorted(
        set(a.raw_counts) | set(b.raw_counts))
    na, nb = a.normalized_counts, b.normalized_counts
    return math.sqrt(math.fsum(
        (na.get(w, 0.0) - nb.get(w, 0.0)) ** 2 for w in words))


def kl_divergence(p: SmoothedDistribution, q: SmoothedDistribution) -> float:
    """KL(p || q) in bits.

    Summed as p * (r - 1 - ln r) with r = q/p, whose terms are individually
    nonnegative; this equals sum p log2(p/q) for normalized inputs.
    """
    if p.vocab != q.vocab:
        raise EstimationError("distributions are over different vocabularies")
    d = q.probs / p.probs - 1.0
    terms = np.maximum(p.probs * (d - np.log1p(d)), 0.0)
    return math.fsum(terms.tolist()) / math.log(2)


def weights_from_distances(distances: Sequence[float],
                           method: Method | str = Method.EUCLIDEAN,
                           corpus_ids: Sequence[str] | None = None,
                           ) -> MixtureWeights:
    """lambda_j = (1/D_j) / sum_k (1/D_k).

    If some distances are zero (<= 1e-12) the whole mass is split evenly
    among those corpora.
    """
    dist = [float(d) for d in distances]
    if not dist:
        raise EstimationError("no distances")
    if any(d < 0 or math.isnan(d) for d in dist):
        raise EstimationError(f"invalid distances {dist}")
    zero = [d <= ZERO_DISTANCE for d in dist]
    if any(zero):
        z = sum(zero)
        lam = [1.0 / z if is_zero else 0.0 for is_zero in zero]
    else:
        inv = [1.0 / d for d in dist]
        total = math.fsum(inv)
        lam = [x / total for x in inv]
    return MixtureWeights(tuple(lam), method, distances=tuple(dist),
                          corpus_ids=None if corpus_ids is None
                          else tuple(corpus_ids))


def estimate_by_distance(train: Sequence[CorpusProfile],
                         heldout: CorpusProfile,
                         metric: Method | str = Method.KL,
                         direction: Direction | str
                         = Direction.HELDOUT_TO_TRAIN,
                         vocab: GlobalVocabulary | None = None,
                         ) -> MixtureWeights:
    """Inverse-distance weights with Euclidean or KL distances.

    KL compares Witten-Bell smoothed distributions over ``vocab`` (by
    default the union of all corpora including the held-out one).
    """
    metric = Method(metric)
    direction = Direction(direction)
    if not train:
        raise EstimationError("no training corpora")
    _check_nonempty(heldout, "held-out")
    for p in train:
        _check_nonempty(p, "training")
    if vocab is None:
        vocab = GlobalVocabulary.from_profiles([*train, heldout])
    if metric is Method.EUCLIDEAN:
        dist = [euclidean_distance(heldout, p, vocab) for p in train]
    elif metric is Method.KL:
        h = smooth(heldout, vocab)
        dists = [smooth(p, vocab) for p in train]
        if direction is Direction.HELDOUT_TO_TRAIN:
            dist = [kl_divergence(h, d) for d in dists]
        else:
            dist = [kl_divergence(d, h) for d in dists]
    else:
        raise EstimationError(f"{metric.value} is not a distance method")
    return weights_from_distances(dist, metric,
                                  [p.corpus_id for p in train])


def estimate_uniform(m: int, corpus_ids: Sequence[str] | None = None,
                     ) -> MixtureWeights:
    if m < 1:
        raise EstimationError("uniform weights need at least one corpus")
    return MixtureWeights((1.0 / m,) * m, Method.UNIFORM,
                          corpus_ids=None if corpus_ids is None
                          else tuple(corpus_ids))


def estimate(method: Method | str, train: Sequence[CorpusProfile],
             heldout: CorpusProfile, em: EmConfig = EmConfig(),
             direction: Direction | str = Direction.HELDOUT_TO_TRAIN,
             ) -> MixtureWeights:
    """Run one estimator on profiles, smoothing as the method requires."""
    method = Method(method)
    if not train:
        raise EstimationError("no training corpora")
    for p in train:
        _check_nonempty(p, "training")
    _check_nonempty(heldout, "held-out")
    ids = [p.corpus_id for p in train]
    if method is Method.UNIFORM:
        return estimate_uniform(len(train), ids)
    vocab = GlobalVocabulary.from_profiles([*train, heldout])
    if method is Method.ML:
        return estimate_ml([smooth(p, vocab) for p in train], heldout, em)
    return estimate_by_distance(train, heldout, method, direction, vocab)


def format_weights_report(weights: MixtureWeights) -> str:
    ids = weights.corpus_ids or tuple(
        f"corpus{j + 1}" for j in range(len(weights)))
    out = io.StringIO()
    for j, (cid, lam) in enumerate(zip(ids, weights.lambdas)):
        dist = ("NA" if weights.distances is None
                else repr(weights.distances[j]))
        out.write(f"{cid}\t{lam!r}\t{dist}\n")
    loglik = ("NA" if weights.final_log_likelihood is None
              else repr(weights.final_log_likelihood))
    out.write(f"# method={weights.method.value} "
              f"iterations={weights.iterations} loglik={loglik}\n")
    return out.getvalue()


def parse_weights_report(text: str) -> MixtureWeights:
    ids, lams, dists = [], [], []
    meta = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            for item in line[1:].split():
                key, _, value = item.partition("=")
                meta[key] = value
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise IngestionError(f"weights line {lineno}: expected 3 fields")
        try:
            ids.append(parts[0])
            lams.append(float(parts[1]))
            dists.append(None if parts[2] == "NA" else float(parts[2]))
        except ValueError:
            raise IngestionError(
                f"weights line {lineno}: bad number") from None
    try:
        method = Method(meta.get("method", "uniform"))
        iterations = int(meta.get("iterations", "0"))
        loglik = meta.get("loglik", "NA")
        return MixtureWeights(
            tuple(lams), method, iterations=iterations,
            final_log_likelihood=None if loglik == "NA" else float(loglik),
            distances=None if any(d is None for d in dists) else tuple(dists),
            corpus_ids=tuple(ids))
    except ValueError as exc:
        raise IngestionError(f"bad weights report: {exc}") from None
