"""Corpus ingestion: tokenizing, unigram counting and Witten-Bell smoothing.

A corpus is reduced to a :class:`CorpusProfile` holding raw and
length-normalized unigram counts.  Profiles of several corpora share a
:class:`GlobalVocabulary`, over which :func:`smooth` builds strictly
positive unigram distributions.
"""

from __future__ import annotations

import collections
import io
import logging
import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import IngestionError, VocabSelectError

_logger = logging.getLogger(__name__)


def tokenize(text: str | bytes, fold: bool = True) -> list[str]:
    """Split text into maximal runs of non-whitespace characters.

    ``bytes`` input is decoded as strict UTF-8.  With ``fold`` set, tokens
    are lowercased.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise IngestionError(
                f"invalid UTF-8 at byte offset {exc.start}") from None
    if fold:
        text = text.lower()
    return text.split()


@dataclass(frozen=True)
class CorpusProfile:
    """Raw and length-normalized unigram counts of one corpus.

    Build instances with :func:`count` or :meth:`from_counts`; the
    normalized counts and totals are derived from ``raw_counts``.
    """

    corpus_id: str
    raw_counts: Mapping[str, int]
    token_count: int = field(init=False)
    type_count: int = field(init=False)
    normalized_counts: Mapping[str, float] = field(init=False)

    def __post_init__(self):
        raw = {}
        for word, c in self.raw_counts.items():
            c = int(c)
            if c < 0:
                raise VocabSelectError(
                    f"negative count {c} for {word!r} in {self.corpus_id!r}")
            if c > 0:
                raw[word] = c
        total = sum(raw.values())
        object.__setattr__(self, "raw_counts", raw)
        object.__setattr__(self, "token_count", total)
        object.__setattr__(self, "type_count", len(raw))
        # int / int is correctly rounded, so c/N equals (k*c)/(k*N) bitwise.
        object.__setattr__(self, "normalized_counts",
                           {w: c / total for w, c in raw.items()})

    @classmethod
    def from_counts(cls, counts: Mapping[str, int],
                    corpus_id: str) -> CorpusProfile:
        return cls(corpus_id=corpus_id, raw_counts=dict(counts))

    def words(self) -> list[str]:
        """Words present in the corpus in code-point order."""
        return sorted(self.raw_counts)

    def scaled(self, k: int) -> CorpusProfile:
        """Profile of the corpus with every token repeated ``k`` times."""
        return CorpusProfile(
            self.corpus_id, {w: c * k for w, c in self.raw_counts.items()})

    def __eq__(self, other):
        if not isinstance(other, CorpusProfile):
            return NotImplemented
        return (self.corpus_id == other.corpus_id
                and self.raw_counts == other.raw_counts)

    def __hash__(self):
        return hash((self.corpus_id, frozenset(self.raw_counts.items())))


def count(tokens: Iterable[str], corpus_id: str) -> CorpusProfile:
    """Tally token multiplicities into a profile."""
    return CorpusProfile(corpus_id, collections.Counter(tokens))


def merge(profiles: Sequence[CorpusProfile],
          corpus_id: str | None = None) -> CorpusProfile:
    """Sum the counts of several profiles (shards of one corpus, or pooled
    held-out segments).  The result does not depend on argument order."""
    if corpus_id is None:
        if not profiles:
            raise VocabSelectError("merge of zero profiles needs a corpus_id")
        corpus_id = profiles[0].corpus_id
    total = collections.Counter()
    for p in profiles:
        total.update(p.raw_counts)
    return CorpusProfile(corpus_id, total)


def read_text_file(path: str | os.PathLike, corpus_id: str | None = None,
                   fold: bool = True) -> CorpusProfile:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IngestionError(f"cannot read {os.fspath(path)}: "
                             f"{exc.strerror}") from None
    try:
        tokens = tokenize(data, fold=fold)
    except IngestionError as exc:
        raise IngestionError(f"{os.fspath(path)}: {exc}") from None
    return count(tokens, corpus_id if corpus_id is not None
                 else os.path.basename(os.fspath(path)))


def _is_comment(line: str) -> bool:
    # A word may itself start with '#'; only lines that are not valid
    # records count as comments.
    if not line.startswith("#"):
        return False
    word, sep, value = line.rpartition("\t")
    return not (sep and word and value.isdigit())


def read_count_file(path_or_stream, corpus_id: str | None = None,
                    ) -> CorpusProfile:
    """Parse the ``word<TAB>count`` exchange format."""
    if isinstance(path_or_stream, (str, os.PathLike)):
        name = os.fspath(path_or_stream)
        try:
            with open(path_or_stream, encoding="utf-8") as fh:
                text = fh.read()
        except (OSError, UnicodeDecodeError) as exc:
            raise IngestionError(f"cannot read {name}: {exc}") from None
    else:
        name = getattr(path_or_stream, "name", "<stream>")
        text = path_or_stream.read()
    counts = collections.Counter()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or _is_comment(line):
            continue
        word, sep, value = line.rpartition("\t")
        if not sep or not word or not value.isdigit():
            raise IngestionError(f"{name}:{lineno}: malformed count record")
        counts[word] += int(value)
    return CorpusProfile(corpus_id if corpus_id is not None
                         else os.path.basename(name), counts)


def format_count_file(profile: CorpusProfile) -> str:
    out = io.StringIO()
    for word in profile.words():
        out.write(f"{word}\t{profile.raw_counts[word]}\n")
    return out.getvalue()


def load_corpus(paths: Sequence[str | os.PathLike], corpus_id: str,
                fold: bool = True) -> CorpusProfile:
    """Read a named corpus made of several files.

    Files ending in ``.tsv`` or ``.counts`` are read as count files, all
    others as plain UTF-8 text.
    """
    shards = []
    for path in paths:
        if os.fspath(path).endswith((".tsv", ".counts")):
            shards.append(read_count_file(path, corpus_id))
        else:
            shards.append(read_text_file(path, corpus_id, fold=fold))
    profile = merge(shards, corpus_id)
    _logger.debug("loaded %s: %d tokens, %d types", corpus_id,
                  profile.token_count, profile.type_count)
    return profile


@dataclass(frozen=True)
class GlobalVocabulary:
    """Sorted union of the words of several corpora with dense ids."""

    words: tuple[str, ...]
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        words = tuple(sorted(set(self.words)))
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "index",
                           {w: i for i, w in enumerate(words)})

    @classmethod
    def from_profiles(cls, profiles: Iterable[CorpusProfile],
                      ) -> GlobalVocabulary:
        union = set()
        for p in profiles:
            union.update(p.raw_counts)
        return cls(tuple(union))

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def __iter__(self):
        return iter(self.words)

    def vector(self, values: Mapping[str, float]) -> np.ndarray:
        """Dense array of ``values`` in id order, missing words as 0."""
        out = np.zeros(len(self.words))
        for w, v in values.items():
            out[self.index[w]] = v
        return out


@dataclass(frozen=True, eq=False)
class SmoothedDistribution:
    """Strictly positive unigram distribution over a global vocabulary.

    ``probs[i]`` is the probability of ``vocab.words[i]``.
    """

    corpus_id: str
    vocab: GlobalVocabulary
    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.shape != (len(self.vocab),):
            raise VocabSelectError(
                f"{probs.shape[0]} probabilities for a vocabulary of "
                f"{len(self.vocab)} words")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def probabilities(self) -> dict[str, float]:
        return dict(zip(self.vocab.words, self.probs.tolist()))

    def __getitem__(self, word: str) -> float:
        return float(self.probs[self.vocab.index[word]])


def smooth(profile: CorpusProfile,
           vocab: GlobalVocabulary) -> SmoothedDistribution:
    """Witten-Bell unigram distribution of ``profile`` over ``vocab``.

    Seen words get c(w) / (N + T).  The reserved mass T / (N + T) is spread
    evenly over the vocabulary words the corpus never saw; when there are
    none, the seen probabilities are renormalized to sum to one.
    """
    n, t = profile.token_count, profile.type_count
    if n == 0:
        raise VocabSelectError("cannot smooth empty corpus")
    missing = [w for w in profile.raw_counts if w not in vocab]
    if missing:
        raise VocabSelectError(
            f"word {missing[0]!r} of {profile.corpus_id!r} is not in the "
            "vocabulary")
    unseen = len(vocab) - t
    if unseen == 0:
        probs = np.array([profile.raw_counts[w] / n for w in vocab.words])
    else:
        probs = np.full(len(vocab), t / ((n + t) * unseen))
        for w, c in profile.raw_counts.items():
            probs[vocab.index[w]] = c / (n + t)
    return SmoothedDistribution(profile.corpus_id, vocab, probs)
