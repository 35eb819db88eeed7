"""Domain vocabulary selection from interpolated multi-corpus unigram counts.

Typical use::

    train = [load_corpus(paths, name) for name, paths in corpora.items()]
    dev = load_corpus(dev_paths, "dev")
    weights = estimate("ml", train, dev)
    ranked = score_and_rank(train, weights)
    top = truncate(ranked, 20000)
"""

from .corpus import (CorpusProfile, GlobalVocabulary, SmoothedDistribution,
                     count, load_corpus, merge, read_count_file, smooth,
                     tokenize)
from .errors import EstimationError, IngestionError, VocabSelectError
from .evaluation import (OovCurve, SplitPlan, cross_validate, curve,
                         oov_rate)
from .vocab import RankedVocabulary, score_and_rank, truncate
from .weights import (Direction, EmConfig, Method, MixtureWeights,
                      UpdateRule, estimate, estimate_by_distance,
                      estimate_ml, estimate_uniform, euclidean_distance,
                      kl_divergence, weights_from_distances)

__all__ = [
    "CorpusProfile", "GlobalVocabulary", "SmoothedDistribution", "count",
    "load_corpus", "merge", "read_count_file", "smooth", "tokenize",
    "EstimationError", "IngestionError", "VocabSelectError", "OovCurve",
    "SplitPlan", "cross_validate", "curve", "oov_rate", "RankedVocabulary",
    "score_and_rank", "truncate", "Direction", "EmConfig", "Method",
    "MixtureWeights", "UpdateRule", "estimate", "estimate_by_distance",
    "estimate_ml", "estimate_uniform", "euclidean_distance", "kl_divergence",
    "weights_from_distances",
]
