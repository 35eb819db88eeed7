"""Seeded Zipfian surrogate corpora for desk-scale experiments.

Every training corpus draws from its own finite Zipf distribution over
``vocab_size`` words.  A block of ``overlap * vocab_size`` words is shared
by all corpora, the rest is private, and each corpus assigns frequency
ranks to its words by an independent random permutation.  Held-out
segments are sampled token by token from the ``mixture`` of the corpus
distributions.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import VocabSelectError


@dataclass(frozen=True)
class SynthSpec:
    exponent: float = 1.0
    vocab_size: int = 20000
    train_tokens: tuple[int, ...] = (200000, 200000)
    overlap: float = 0.3
    mixture: tuple[float, ...] = (0.85, 0.15)
    segments: int = 6
    segment_tokens: int = 4000
    tokens_per_line: int = 20

    def __post_init__(self):
        object.__setattr__(self, "train_tokens",
                           tuple(int(n) for n in self.train_tokens))
        object.__setattr__(self, "mixture",
                           tuple(float(x) for x in self.mixture))
        if not self.exponent > 0:
            raise VocabSelectError("Zipf exponent must be positive")
        if self.vocab_size < 1:
            raise VocabSelectError("vocab_size must be positive")
        if not self.train_tokens or min(self.train_tokens) < 1:
            raise VocabSelectError("every corpus needs a positive size")
        if not 0.0 <= self.overlap <= 1.0:
            raise VocabSelectError("overlap must lie in [0, 1]")
        if len(self.mixture) != len(self.train_tokens):
            raise VocabSelectError("one mixture weight per corpus required")
        if min(self.mixture) < 0 or abs(sum(self.mixture) - 1.0) > 1e-9:
            raise VocabSelectError("mixture weights must lie on the simplex")
        if self.segments < 1 or self.segment_tokens < 1:
            raise VocabSelectError("segments and segment_tokens must be "
                                   "positive")
        if self.tokens_per_line < 1:
            raise VocabSelectError("tokens_per_line must be positive")

    @property
    def corpora(self) -> int:
        return len(self.train_tokens)


@dataclass(frozen=True)
class SynthCorpora:
    """Generated token lists plus the true per-corpus distributions."""

    train: tuple[list[str], ...]
    heldout: tuple[list[str], ...]
    word_ids: tuple[np.ndarray, ...] = field(repr=False)
    probs: np.ndarray = field(repr=False)
    names: tuple[str, ...] = ()


def zipf_probs(n: int, exponent: float) -> np.ndarray:
    p = np.arange(1, n + 1, dtype=float) ** -exponent
    return p / p.sum()


def _word(i: int) -> str:
    return f"w{i:06d}"


def generate(spec: SynthSpec, seed: int) -> SynthCorpora:
    rng = np.random.default_rng(seed)
    v = spec.vocab_size
    shared = int(round(spec.overlap * v))
    private = v - shared
    base = zipf_probs(v, spec.exponent)
    word_ids = []
    for j in range(spec.corpora):
        own = np.concatenate([
            np.arange(shared),
            shared + j * private + np.arange(private)])
        # word_ids[j][r] is the word at frequency rank r of corpus j
        word_ids.append(rng.permutation(own))
    total = shared + spec.corpora * private

    def sample(j: int, n: int) -> np.ndarray:
        return word_ids[j][rng.choice(v, size=n, p=base)]

    train = tuple([_word(i) for i in sample(j, n).tolist()]
                  for j, n in enumerate(spec.train_tokens))
    heldout = []
    for _ in range(spec.segments):
        comp = rng.choice(spec.corpora, size=spec.segment_tokens,
                          p=np.array(spec.mixture))
        ids = np.empty(spec.segment_tokens, dtype=np.int64)
        for j in range(spec.corpora):
            pos = np.flatnonzero(comp == j)
            ids[pos] = sample(j, len(pos))
        heldout.append([_word(i) for i in ids.tolist()])
    probs = np.zeros((spec.corpora, total))
    for j in range(spec.corpora):
        probs[j, word_ids[j]] = base
    names = tuple(f"train{j + 1}" for j in range(spec.corpora))
    return SynthCorpora(train, tuple(heldout), tuple(word_ids), probs, names)


def _lines(tokens: list[str], per_line: int) -> str:
    return "".join(" ".join(tokens[i:i + per_line]) + "\n"
                   for i in range(0, len(tokens), per_line))


def write_corpora(corpora: SynthCorpora, spec: SynthSpec,
                  out_dir: str | os.PathLike) -> list[str]:
    """Write corpora plus a ready-to-use ``run.cfg``; returns written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def emit(name: str, text: str):
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(path)

    for name, tokens in zip(corpora.names, corpora.train):
        emit(f"{name}.txt", _lines(tokens, spec.tokens_per_line))
    seg_names = []
    for k, tokens in enumerate(corpora.heldout, 1):
        seg_names.append(f"heldout{k}.txt")
        emit(seg_names[-1], _lines(tokens, spec.tokens_per_line))
    cfg = [f"train.{name} = {name}.txt" for name in corpora.names]
    cfg.append("heldout = " + " ".join(seg_names))
    emit("run.cfg", "\n".join(cfg) + "\n")
    return written


def parse_spec(text: str) -> SynthSpec:
    """Read a ``key = value`` generator spec; list values are
    comma-separated."""
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise VocabSelectError(f"spec line {lineno}: expected key = value")
        try:
            if key in ("exponent", "overlap"):
                kwargs[key] = float(value)
            elif key in ("vocab_size", "segments", "segment_tokens",
                         "tokens_per_line"):
                kwargs[key] = int(value)
            elif key == "train_tokens":
                kwargs[key] = tuple(int(x) for x in value.split(","))
            elif key == "mixture":
                kwargs[key] = tuple(float(x) for x in value.split(","))
            else:
                raise VocabSelectError(
                    f"spec line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, VocabSelectError):
                raise
            raise VocabSelectError(
                f"spec line {lineno}: bad value for {key}") from None
    if "mixture" in kwargs and "train_tokens" not in kwargs:
        kwargs["train_tokens"] = (200000,) * len(kwargs["mixture"])
    if "train_tokens" in kwargs and "mixture" not in kwargs:
        m = len(kwargs["train_tokens"])
        kwargs["mixture"] = (1.0 / m,) * m
    return SynthSpec(**kwargs)
