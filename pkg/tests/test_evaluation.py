import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vocabselect.corpus import CorpusProfile, count
from vocabselect.errors import EstimationError, VocabSelectError
from vocabselect.evaluation import (METHODS, OovCurve, SplitPlan,
                                    average_curves, cross_validate, curve,
                                    format_curve_csv, log_sizes, oov_rate,
                                    parse_sizes)
from vocabselect.vocab import rank_scores, truncate


def test_oov_rate():
    test = count("a b c c".split(), "x")
    assert oov_rate({"a", "b"}, test) == 0.5
    assert oov_rate({"a", "b", "c", "d"}, test) == 0.0
    assert oov_rate({"a"}, count("b b b".split(), "x")) == 1.0
    with pytest.raises(VocabSelectError):
        oov_rate({"a"}, count([], "x"))


def test_curve_enumeration():
    ranked = rank_scores({"a": 3.0, "b": 2.0, "c": 1.0})
    c = curve(ranked, count("a b c".split(), "t"), [1, 2, 3])
    assert c.rates == pytest.approx([2 / 3, 1 / 3, 0.0], abs=1e-15)
    assert c.split_count == 1


def test_curve_limit_is_unseen_fraction():
    ranked = rank_scores({"a": 3.0, "b": 2.0})
    c = curve(ranked, count("a z z b y".split(), "t"), [50])
    assert c.rates == [3 / 5]


def test_curve_size_one_is_top_word():
    ranked = rank_scores({"a": 3.0, "b": 2.0})
    assert curve(ranked, count("b b a".split(), "t"), [1]).rates == [2 / 3]


def test_curve_rejects_unsorted_sizes():
    ranked = rank_scores({"a": 1.0})
    with pytest.raises(VocabSelectError):
        curve(ranked, count(["a"], "t"), [2, 2])
    with pytest.raises(VocabSelectError):
        curve(ranked, count(["a"], "t"), [0, 1])


@settings(max_examples=100)
@given(st.dictionaries(st.integers(0, 40), st.integers(0, 6), min_size=1),
       st.dictionaries(st.integers(0, 60), st.integers(1, 9), min_size=1))
def test_curve_matches_truncate_oracle(scores, test_counts):
    ranked = rank_scores({f"w{k}": float(s) for k, s in scores.items()})
    test = CorpusProfile.from_counts(
        {f"w{k}": c for k, c in test_counts.items()}, "t")
    sizes = list(range(1, len(ranked) + 3))
    c = curve(ranked, test, sizes)
    assert c.rates == [oov_rate(truncate(ranked, k), test) for k in sizes]
    assert all(a >= b for a, b in zip(c.rates, c.rates[1:]))


def test_split_plan():
    plan = SplitPlan.leave_one_out(["s1", "s2", "s3"])
    assert plan.folds == (((1, 2), 0), ((0, 2), 1), ((0, 1), 2))
    assert sorted(t for _, t in plan.folds) == [0, 1, 2]
    for dev, t in plan.folds:
        assert t not in dev
    with pytest.raises(VocabSelectError):
        SplitPlan.leave_one_out(["only"])


def test_average_bounds():
    a = OovCurve(((1, 0.5), (2, 0.2)))
    b = OovCurve(((1, 0.3), (2, 0.1)))
    avg = average_curves([a, b])
    assert avg.rates == pytest.approx([0.4, 0.15])
    assert avg.split_count == 2
    with pytest.raises(VocabSelectError):
        average_curves([a, OovCurve(((1, 0.1),))])


def _toy():
    rnd = random.Random(1)
    train = [count([f"a{rnd.randint(0, 30)}" for _ in range(300)]
                   + [f"s{rnd.randint(0, 10)}" for _ in range(100)], "t1"),
             count([f"b{rnd.randint(0, 30)}" for _ in range(300)]
                   + [f"s{rnd.randint(0, 10)}" for _ in range(100)], "t2")]
    segs = [count([f"a{rnd.randint(0, 40)}" for _ in range(40)]
                  + [f"b{rnd.randint(0, 40)}" for _ in range(10)], f"h{k}")
            for k in range(4)]
    return train, segs


def test_two_identical_segments():
    train = [count("a b b c".split(), "t")]
    seg = count("a c d".split(), "h")
    res = cross_validate(train, [seg, count("a c d".split(), "h2")],
                         "ml", [1, 2, 3])
    assert res.fold_curves[0] == res.fold_curves[1]
    assert res.curve.points == res.fold_curves[0].points
    assert res.curve.split_count == 2


def test_uniform_folds():
    train, segs = _toy()
    res = cross_validate(train, segs, "uniform", [1, 5, 20])
    assert all(w.lambdas == (0.5, 0.5) for w in res.fold_weights)
    assert res.mean_weights.lambdas == (0.5, 0.5)


@pytest.mark.parametrize("method", list(METHODS))
def test_cross_validation_properties(method):
    train, segs = _toy()
    union = len(set(train[0].raw_counts) | set(train[1].raw_counts))
    sizes = log_sizes(1, union, 12)
    res = cross_validate(train, segs, method, sizes)
    assert len(res.fold_weights) == 4
    for i, k in enumerate(sizes):
        fold_rates = [c.points[i][1] for c in res.fold_curves]
        assert min(fold_rates) <= res.curve.points[i][1] <= max(fold_rates)
    assert all(a >= b for a, b in zip(res.curve.rates, res.curve.rates[1:]))
    assert res.curve.split_count == 4
    threaded = cross_validate(train, segs, method, sizes, jobs=3)
    assert threaded.curve == res.curve
    assert threaded.fold_weights == res.fold_weights


def test_union_size_rates_agree():
    train, segs = _toy()
    union = len(set(train[0].raw_counts) | set(train[1].raw_counts))
    last = {m: cross_validate(train, segs, m, [union]).curve.rates[-1]
            for m in METHODS}
    assert len(set(last.values())) == 1


def test_fold_errors_name_fold():
    train = [count(["a"], "t1"), count([], "t2")]
    segs = [count(["a"], "h1"), count(["a"], "h2")]
    with pytest.raises(EstimationError, match="fold 1"):
        cross_validate(train, segs, "ml", [1])
    with pytest.raises(VocabSelectError):
        cross_validate(train[:1], segs[:1], "ml", [1])


def test_sizes():
    assert log_sizes(1, 1) == [1]
    g = log_sizes(1, 90000, 51)
    assert g[0] == 1 and g[-1] == 90000
    assert all(b > a for a, b in zip(g, g[1:]))
    assert len(g) <= 51
    assert parse_sizes("log:1:UNION:51", 90000) == g
    assert parse_sizes("1, 10,UNION", 77) == [1, 10, 77]
    for bad in ("3,2", "0,1", "log:1:x:3", "log:1:2"):
        with pytest.raises(VocabSelectError):
            parse_sizes(bad, 10)


def test_csv_format():
    a = OovCurve(((1, 0.5), (10, 1 / 3)))
    assert format_curve_csv({"": a}) == (
        "vocab_size,oov_rate\n1,0.500000\n10,0.333333\n")
    text = format_curve_csv({m.value: a for m in METHODS})
    assert text.splitlines()[0] == (
        "vocab_size,oov_rate_ml,oov_rate_euclidean,oov_rate_kl,"
        "oov_rate_uniform")
