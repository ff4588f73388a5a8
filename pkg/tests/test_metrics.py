import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linkhide.metrics import (
    MetricError,
    ScoredRanking,
    ap_from_arrays,
    auc,
    auc_from_arrays,
    average_precision,
    evaluate,
    pr_points,
    roc_points,
)

import suites
from oracles import brute_force_ap, brute_force_auc


def ranking(probe_scores, rest_scores):
    scores = {}
    probe = set()
    for i, s in enumerate(probe_scores):
        scores[(0, i + 1)] = s
        probe.add((0, i + 1))
    for i, s in enumerate(rest_scores):
        scores[(1, i + 2)] = s
    return ScoredRanking(scores, probe)


def test_auc_example_with_tie():
    assert auc(ranking([5], [3, 5])) == 0.75


def test_auc_perfect_and_all_ties():
    assert auc(ranking([4, 5], [1, 2, 3])) == 1.0
    assert auc(ranking([2, 2], [2, 2, 2])) == 0.5


def test_ap_examples():
    assert average_precision(ranking([5], [1, 1])) == 1.0
    assert average_precision(ranking([1], [2, 3])) == pytest.approx(1 / 3, abs=1e-12)
    assert average_precision(ranking([3, 1], [2])) == pytest.approx(5 / 6, abs=1e-12)


def test_empty_sets_rejected():
    with pytest.raises(MetricError):
        auc_from_arrays([], [1.0])
    with pytest.raises(MetricError):
        auc(ranking([1.0], []))
    with pytest.raises(MetricError):
        ap_from_arrays([], [1.0])


def test_ranking_validation():
    with pytest.raises(MetricError):
        ScoredRanking({(0, 1): 1.0}, {(0, 2)})
    with pytest.raises(MetricError):
        ScoredRanking({(0, 1): 1.0, (0, 2): 2.0}, {(0, 1)}, rest={(0, 1), (0, 2)})
    r = ScoredRanking({(0, 1): 1.0, (0, 2): 2.0}, {(0, 1)}, rest={(0, 2)})
    assert evaluate(r).auc == 0.0


def test_brute_force_equivalence():
    assert suites.metric_mismatches(200, seed=3) == []


def test_multiplicity_counts_match_expansion():
    rng = np.random.default_rng(0)
    for _ in range(50):
        q = rng.integers(0, 4, size=5).astype(float)
        vals = rng.integers(0, 4, size=6).astype(float)
        counts = rng.integers(1, 5, size=6)
        expanded = np.repeat(vals, counts)
        assert auc_from_arrays(q, vals, counts) == auc_from_arrays(q, expanded)
        assert ap_from_arrays(q, vals, counts) == pytest.approx(ap_from_arrays(q, expanded), abs=1e-15)


score_lists = st.lists(st.integers(0, 6), min_size=1, max_size=30)


@settings(max_examples=80, deadline=None)
@given(score_lists, score_lists)
def test_monotone_transform_invariance(q, x):
    q, x = np.array(q, float), np.array(x, float)
    f = lambda s: np.exp(s) * 3 + 1
    assert auc_from_arrays(q, x) == auc_from_arrays(f(q), f(x))
    assert ap_from_arrays(q, x) == pytest.approx(ap_from_arrays(f(q), f(x)), abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=30, unique=True), st.integers(1, 29))
def test_reversed_ranking_complements_auc(values, k):
    k = min(k, len(values) - 1)
    q, x = np.array(values[:k]), np.array(values[k:])
    assert auc_from_arrays(q, x) + auc_from_arrays(-q, -x) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(score_lists, score_lists)
def test_ranges_and_brute_force(q, x):
    a, p = auc_from_arrays(q, x), ap_from_arrays(q, x)
    assert 0.0 <= a <= 1.0 and 0.0 < p <= 1.0
    assert a == pytest.approx(brute_force_auc(q, x), abs=1e-12)
    assert p == pytest.approx(brute_force_ap(q, x), abs=1e-12)


def test_roc_points_perfect_separation():
    c = roc_points(ranking([2.0], [1.0]))
    assert c.points == [(0.0, 1.0), (1.0, 1.0)]
    assert not c.tie_broken


def test_curves_with_ties_are_flagged_and_complete():
    r = ranking([1.0, 1.0], [1.0, 0.0, 1.0])
    roc, pr = roc_points(r), pr_points(r)
    assert roc.tie_broken and pr.tie_broken
    assert len(roc.points) == len(pr.points) == 5
    assert roc.points[-1] == (1.0, 1.0)
    assert roc_points(r).points == roc.points


def test_curves_need_both_sets():
    with pytest.raises(MetricError):
        roc_points(ScoredRanking({(0, 1): 1.0}, {(0, 1)}))


def test_curve_csv(tmp_path):
    p = tmp_path / "roc.csv"
    roc_points(ranking([2.0], [1.0])).write_csv(p)
    assert p.read_text() == "x,y\n0.0,1.0\n1.0,1.0\n"
