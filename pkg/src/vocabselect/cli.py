"""``vocabselect`` command line.

Exit status is 0 on success, 2 for usage, configuration and input errors,
and 3 when weight estimation fails.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field

from . import corpus, evaluation, synth
from .errors import EstimationError, VocabSelectError
from .vocab import format_ranked, score_and_rank
from .weights import (Direction, EmConfig, Method, MixtureWeights, estimate,
                      format_weights_report, parse_weights_report)

_logger = logging.getLogger("vocabselect")

EXIT_USAGE = 2
EXIT_ESTIMATION = 3


class ConfigError(VocabSelectError):
    pass


@dataclass
class RunConfig:
    train: dict[str, list[str]] = field(default_factory=dict)
    heldout: list[str] = field(default_factory=list)
    test: list[str] = field(default_factory=list)
    method: str = "ml"
    em_update: str = "standard"
    em_threshold: float = 1e-6
    em_max_iter: int = 1000
    kl_direction: str = "h2t"
    fold: bool = True
    sizes: str = "log:1:UNION:51"
    jobs: int = 1

    def em_config(self) -> EmConfig:
        return EmConfig(self.em_update, self.em_threshold, self.em_max_iter)

    def validate(self, need_heldout: bool = True):
        if not self.train:
            raise ConfigError("config names no training corpus (train.NAME)")
        if need_heldout and not self.heldout:
            raise ConfigError("config names no held-out segment (heldout)")
        try:
            Method(self.method)
            Direction(self.kl_direction)
            self.em_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        for path in [p for ps in self.train.values() for p in ps] \
                + self.heldout + self.test:
            if not os.path.isfile(path):
                raise ConfigError(f"no such file: {path}")


_BOOL = {"true": True, "yes": True, "1": True, "on": True,
         "false": False, "no": False, "0": False, "off": False}


def _apply(cfg: RunConfig, key: str, value: str, base: str):
    def paths():
        return [os.path.join(base, p) for p in value.split()]

    try:
        if key.startswith("train."):
            name = key[len("train."):]
            if not name:
                raise ConfigError("empty training corpus name")
            cfg.train[name] = paths()
        elif key in ("heldout", "test"):
            setattr(cfg, key, paths())
        elif key in ("method", "em_update", "kl_direction", "sizes"):
            setattr(cfg, key, value)
        elif key == "em_threshold":
            cfg.em_threshold = float(value)
        elif key in ("em_max_iter", "jobs"):
            setattr(cfg, key, int(value))
        elif key == "fold":
            cfg.fold = _BOOL[value.lower()]
        else:
            raise ConfigError(f"unknown config key {key!r}")
    except (KeyError, ValueError):
        raise ConfigError(f"bad value for {key}: {value!r}") from None


def load_config(path: str | None, overrides: list[str] = ()) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
        base = os.path.dirname(os.path.abspath(path))
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            _apply(cfg, key.strip(), value.strip(), base)
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        _apply(cfg, key.strip(), value.strip(), os.getcwd())
    return cfg


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _train_profiles(cfg: RunConfig) -> list[corpus.CorpusProfile]:
    return [corpus.load_corpus(paths, name, fold=cfg.fold)
            for name, paths in cfg.train.items()]


def _segments(cfg: RunConfig) -> list[corpus.CorpusProfile]:
    return [corpus.load_corpus([p], os.path.basename(p), fold=cfg.fold)
            for p in cfg.heldout]


def cmd_count(args) -> int:
    shards = [corpus.read_text_file(p, "counts", fold=not args.no_fold)
              for p in args.inputs]
    profile = corpus.merge(shards, "counts") if shards else \
        corpus.count([], "counts")
    _emit(corpus.format_count_file(profile), args.out)
    return 0


def cmd_weights(args, cfg: RunConfig) -> int:
    cfg.validate()
    train = _train_profiles(cfg)
    heldout = corpus.merge(_segments(cfg), "heldout")
    weights = estimate(cfg.method, train, heldout, cfg.em_config(),
                       cfg.kl_direction)
    _emit(format_weights_report(weights), args.out)
    return 0


def _align(weights: MixtureWeights, names: list[str]) -> MixtureWeights:
    ids = list(weights.corpus_ids or ())
    if ids == names:
        return weights
    if sorted(ids) != sorted(names):
        raise ConfigError(f"weights are for corpora {ids}, config has "
                          f"{names}")
    order = [ids.index(n) for n in names]
    return MixtureWeights(
        tuple(weights.lambdas[j] for j in order), weights.method,
        weights.iterations, weights.final_log_likelihood,
        None if weights.distances is None
        else tuple(weights.distances[j] for j in order), tuple(names))


def cmd_rank(args, cfg: RunConfig) -> int:
    cfg.validate(need_heldout=False)
    try:
        with open(args.weights, encoding="utf-8") as fh:
            weights = parse_weights_report(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {args.weights}: {exc.strerror}") \
            from None
    weights = _align(weights, list(cfg.train))
    ranked = score_and_rank(_train_profiles(cfg), weights)
    _emit(format_ranked(ranked), args.out)
    return 0


def _format_fold_weights(results: dict[str, evaluation.CrossValidationResult],
                         ) -> str:
    lines = ["fold\tmethod\tcorpus_id\tlambda\tdistance"]
    for name, res in results.items():
        rows = [(str(k + 1), w) for k, w in enumerate(res.fold_weights)]
        rows.append(("mean", res.mean_weights))
        for fold, w in rows:
            for j, cid in enumerate(w.corpus_ids):
                dist = "NA" if w.distances is None else repr(w.distances[j])
                lines.append(f"{fold}\t{name}\t{cid}\t{w.lambdas[j]!r}\t"
                             f"{dist}")
    return "\n".join(lines) + "\n"


def cmd_curve(args, cfg: RunConfig) -> int:
    cfg.validate()
    train = _train_profiles(cfg)
    union = set()
    for p in train:
        union.update(p.raw_counts)
    sizes = evaluation.parse_sizes(cfg.sizes, len(union))
    methods = list(evaluation.METHODS) if args.compare else [
        Method(cfg.method)]
    segments = _segments(cfg)
    if not cfg.test and len(segments) < 2:
        raise ConfigError("cross-validation needs at least 2 held-out "
                          "segments; give a test file for a single split")
    curves, results = {}, {}
    for m in methods:
        if cfg.test:
            dev = corpus.merge(segments, "dev")
            test = corpus.load_corpus(cfg.test, "test", fold=cfg.fold)
            w, c = evaluation.evaluate_split(
                train, dev, test, m, sizes, cfg.em_config(), cfg.kl_direction)
            res = evaluation.CrossValidationResult(
                c, (c,), (w,), evaluation.mean_weights([w]))
        else:
            res = evaluation.cross_validate(
                train, segments, m, sizes, cfg.em_config(), cfg.kl_direction,
                jobs=cfg.jobs)
        key = m.value if args.compare else ""
        curves[key] = res.curve
        results[m.value] = res
    _emit(evaluation.format_curve_csv(curves), args.out)
    if args.weights_out:
        _emit(_format_fold_weights(results), args.weights_out)
    return 0


def cmd_synth(args) -> int:
    if args.spec is None:
        spec = synth.SynthSpec()
    else:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                spec = synth.parse_spec(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read {args.spec}: {exc.strerror}") \
                from None
    synth.write_corpora(synth.generate(spec, args.seed), spec, args.out_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vocabselect",
        description="Select a domain vocabulary from several training "
                    "corpora.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="unigram counts of text files")
    p.add_argument("--in", dest="inputs", nargs="*", default=[],
                   metavar="FILE")
    p.add_argument("--out")
    p.add_argument("--no-fold", action="store_true",
                   help="keep letter case")

    def common(p):
        p.add_argument("--config", required=True)
        p.add_argument("--set", dest="overrides", action="append",
                       default=[], metavar="KEY=VALUE",
                       help="override a config entry")
        p.add_argument("--no-fold", action="store_true", default=None)
        p.add_argument("--out")

    p = sub.add_parser("weights", help="estimate interpolation weights")
    common(p)
    p.add_argument("--method", choices=[m.value for m in Method])
    p.add_argument("--em-update", choices=["standard", "figure1"])
    p.add_argument("--em-threshold", type=float)
    p.add_argument("--em-max-iter", type=int)
    p.add_argument("--kl-direction", choices=["h2t", "t2h"])

    p = sub.add_parser("rank", help="rank the training vocabulary")
    common(p)
    p.add_argument("--weights", required=True)

    p = sub.add_parser("curve", help="cross-validated OOV curves")
    common(p)
    p.add_argument("--compare", action="store_true",
                   help="run all four methods on the same folds")
    p.add_argument("--method", choices=[m.value for m in Method])
    p.add_argument("--em-update", choices=["standard", "figure1"])
    p.add_argument("--em-threshold", type=float)
    p.add_argument("--em-max-iter", type=int)
    p.add_argument("--kl-direction", choices=["h2t", "t2h"])
    p.add_argument("--sizes")
    p.add_argument("--test", nargs="+", metavar="FILE",
                   help="single split: pool held-out segments as dev data "
                        "and measure on these files")
    p.add_argument("--jobs", type=int)
    p.add_argument("--weights-out", help="per-fold weights table")

    p = sub.add_parser("synth", help="generate Zipfian surrogate corpora")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--spec")
    p.add_argument("--out-dir", required=True)
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config, args.overrides)
    for name in ("method", "em_update", "em_threshold", "em_max_iter",
                 "kl_direction", "sizes", "jobs"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "test", None):
        cfg.test = list(args.test)
    if args.no_fold:
        cfg.fold = False
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else
                        logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "count":
            return cmd_count(args)
        if args.command == "synth":
            return cmd_synth(args)
        cfg = _config_from_args(args)
        handler = {"weights": cmd_weights, "rank": cmd_rank,
                   "curve": cmd_curve}[args.command]
        return handler(args, cfg)
    except EstimationError as exc:
        print(f"vocabselect: estimation error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except VocabSelectError as exc:
        print(f"vocabselect: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # Reader went away (e.g. piped into head); stay quiet.
        sys.stderr.close()
        return 0


if __name__ == "__main__":
    sys.exit(main())
