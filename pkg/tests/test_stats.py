import itertools
import math
import warnings

import numpy as np
import pytest
from scipy import stats as sps

from bilasym.config import TwoGroupDataset, feature_labels, sequential_scheme
from bilasym.scores import L1, L2
from bilasym.stats import (
    InsufficientReplicates,
    ZeroVariance,
    bootstrap_critical,
    bootstrap_null_max,
    exact_u_distribution,
    feature_t_stats,
    mann_whitney_statistic,
    mann_whitney_u,
    pooled_t_test,
    run_comparison,
    stars,
    uit_max,
    welch_t_test,
)


def test_pooled_t_by_hand():
    u1 = [1.0, 2.0, 3.0]
    u2 = [4.0, 5.0, 6.0, 7.0]
    # sp2 = (2*1 + 3*(5/3)) / 5 = 1.4; t = 3.5 / sqrt(1.4*(1/3+1/4))
    r = pooled_t_test(u1, u2)
    assert r.statistic == pytest.approx(3.5 / math.sqrt(1.4 * 7 / 12))
    assert r.df == 5


def test_pooled_and_welch_against_scipy(rng):
    for _ in range(20):
        u1 = rng.normal(0, 1, rng.integers(2, 15))
        u2 = rng.normal(0.5, 2, rng.integers(2, 15))
        for fn, eq in ((pooled_t_test, True), (welch_t_test, False)):
            ours = fn(u1, u2, "two-sided")
            ref = sps.ttest_ind(u2, u1, equal_var=eq)
            assert ours.statistic == pytest.approx(ref.statistic, rel=1e-10)
            assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-8)
            one = fn(u1, u2, "greater")
            assert one.p_value == pytest.approx(sps.ttest_ind(u2, u1, equal_var=eq, alternative="greater").pvalue, rel=1e-8)


def test_t_orientation():
    assert pooled_t_test([0.0, 1.0], [5.0, 6.0]).p_value < 0.05
    assert pooled_t_test([5.0, 6.0], [0.0, 1.0]).p_value > 0.95


def test_zero_variance_raises():
    with pytest.raises(ZeroVariance) as info:
        pooled_t_test([1.0, 1.0], [2.0, 2.0])
    assert info.value.mean_difference == 1.0
    with pytest.raises(ZeroVariance):
        welch_t_test([3.0, 3.0, 3.0], [3.0, 3.0])


def test_bad_sidedness():
    with pytest.raises(ValueError):
        pooled_t_test([1, 2], [3, 4], "less")


def test_mann_whitney_by_hand():
    r = mann_whitney_u([1.0, 2.0], [3.0, 4.0])
    assert r.statistic == 4
    assert r.p_value == pytest.approx(1 / 6)
    assert r.method == "mann-whitney-exact"


def test_mann_whitney_statistic_with_ties():
    assert mann_whitney_statistic([1.0, 2.0], [2.0, 3.0]) == 3.5


def test_exact_distribution_sums_to_binomial():
    for n1, n2 in [(1, 1), (3, 4), (7, 5), (10, 10)]:
        counts = exact_u_distribution(n1, n2)
        assert len(counts) == n1 * n2 + 1
        assert sum(counts) == math.comb(n1 + n2, n1)
        assert counts == counts[::-1]


def enumerate_p(u1, u2, two_sided=False):
    pooled = list(u1) + list(u2)
    n1 = len(u1)
    U = mann_whitney_statistic(u1, u2)
    hi = lo = total = 0
    for idx in itertools.combinations(range(len(pooled)), n1):
        g1 = [pooled[i] for i in idx]
        g2 = [pooled[i] for i in range(len(pooled)) if i not in idx]
        u = mann_whitney_statistic(g1, g2)
        hi += u >= U
        lo += u <= U
        total += 1
    return min(1.0, 2 * min(hi, lo) / total) if two_sided else hi / total


def test_mann_whitney_exact_against_enumeration(rng):
    for _ in range(30):
        n1, n2 = rng.integers(1, 7, 2)
        u1, u2 = rng.normal(size=n1), rng.normal(0.5, size=n2)
        assert mann_whitney_u(u1, u2).p_value == pytest.approx(enumerate_p(u1, u2), abs=1e-15)
        assert mann_whitney_u(u1, u2, "two-sided").p_value == pytest.approx(enumerate_p(u1, u2, True), abs=1e-15)


def test_mann_whitney_approx_against_scipy(rng):
    u1 = np.round(rng.normal(size=15), 1)
    u2 = np.round(rng.normal(0.3, size=17), 1)
    for ours_side, sp_side in (("greater", "greater"), ("two-sided", "two-sided")):
        ours = mann_whitney_u(u1, u2, ours_side)
        ref = sps.mannwhitneyu(u2, u1, alternative=sp_side, method="asymptotic", use_continuity=True)
        assert ours.method == "mann-whitney-approx"
        assert ours.statistic == ref.statistic
        assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-10)


def test_mann_whitney_exact_rejects_ties():
    with pytest.raises(ValueError):
        mann_whitney_u([1.0, 2.0], [2.0, 3.0], exact=True)


def make_dataset(rng, n1=8, n2=9, J=5, shift=None):
    g1 = rng.normal(size=(n1, J))
    g2 = rng.normal(size=(n2, J))
    if shift is not None:
        g2 = g2 + shift
    return TwoGroupDataset(g1, g2, kind="signed")


def test_feature_t_stats_match_columnwise_pooled_t(rng):
    ds = make_dataset(rng)
    v = feature_t_stats(ds)
    for j in range(ds.n_features):
        assert v[j] == pytest.approx(pooled_t_test(ds.group1[:, j], ds.group2[:, j]).statistic, rel=1e-12)
    assert uit_max(v) == v.max()


def test_feature_t_stats_degenerate_column_warns(rng):
    ds = make_dataset(rng)
    g1, g2 = ds.group1.copy(), ds.group2.copy()
    g1[:, 2] = 0.0
    g2[:, 2] = 0.0
    with pytest.warns(RuntimeWarning):
        v = feature_t_stats(TwoGroupDataset(g1, g2, kind="signed"))
    assert v[2] == 0.0


def test_bootstrap_worker_invariance(rng):
    ds = make_dataset(rng)
    a = bootstrap_null_max(ds.pooled(), ds.n1, 1000, 7, workers=1)
    b = bootstrap_null_max(ds.pooled(), ds.n1, 1000, 7, workers=4)
    np.testing.assert_array_equal(a, b)
    assert a.size == 1000


def test_bootstrap_prefix_stable(rng):
    # Extending B only appends replicates.
    ds = make_dataset(rng)
    a = bootstrap_null_max(ds.pooled(), ds.n1, 1024, 3)
    b = bootstrap_null_max(ds.pooled(), ds.n1, 2048, 3)
    np.testing.assert_array_equal(a, b[:1024])


def test_bootstrap_critical_selection_and_bounds(rng):
    shift = np.array([0.0, 0.0, 3.0, 0.0, 0.0])
    ds = make_dataset(rng, 12, 13, shift=shift)
    res = bootstrap_critical(ds, B=2000, seed=1)
    assert 2 in res.selected
    for j in range(5):
        assert (j in res.selected) == (res.lower_bounds[j] > 0)
    assert res.V == res.v.max()
    assert np.quantile(res.null_max, 0.95, method="inverted_cdf") == res.V_crit
    assert res.p_value < 0.01


def test_bootstrap_minimum_replicates(rng):
    with pytest.raises(InsufficientReplicates):
        bootstrap_critical(make_dataset(rng), B=100)


def test_permutation_scheme_runs(rng):
    res = bootstrap_critical(make_dataset(rng), B=1000, scheme="permutation")
    assert res.scheme == "permutation"
    assert res.null_max.size == 1000


def test_stars():
    assert [stars(p) for p in (0.2, 0.04, 0.009, 0.0004, math.nan)] == ["", "*", "**", "***", ""]


def test_run_comparison_rows(rng):
    scheme = sequential_scheme(2, 1)
    labels = feature_labels(scheme, 2)
    g1 = np.abs(rng.normal(size=(6, 5)))
    g2 = np.abs(rng.normal(1.0, size=(7, 5)))
    rows = run_comparison(TwoGroupDataset(g1, g2, index_map=labels), [L1, L2], ["pooled-t", "mann-whitney"], frame="rest")
    assert len(rows) == 4
    assert rows[0]["score"] == "l1" and rows[0]["method"] == "pooled-t"
    assert rows[0]["mean2"] == pytest.approx(g2.sum(1).mean())
    assert rows[1]["method"] == "mann-whitney-exact"
    assert all(r["frame"] == "rest" for r in rows)


def test_run_comparison_degenerate_separation():
    g1 = np.zeros((3, 2))
    g2 = np.ones((3, 2))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rows = run_comparison(TwoGroupDataset(g1, g2), [L1])
    assert rows[0]["statistic"] == math.inf and rows[0]["p_value"] == 0.0
