import numpy as np
import pytest
import scipy.stats
from hypothesis import given, strategies as st

from aigiqa.metrics import (
    ScorePairSet,
    UndefinedCorrelationError,
    average_ranks,
    plcc,
    srcc,
)


def rank_simple(values):
    """Ranks for tie-free vectors, 1-based."""
    order = np.argsort(values)
    ranks = np.empty(len(values))
    ranks[order] = np.arange(1, len(values) + 1)
    return ranks


def srcc_classic(truth, predicted):
    """1 - 6*sum(d^2)/(N*(N^2-1)); exact only without ties."""
    truth = np.asarray(truth, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    d = rank_simple(truth) - rank_simple(predicted)
    n = len(truth)
    return 1.0 - 6.0 * float(d @ d) / (n * (n * n - 1))


def plcc_direct(truth, predicted):
    """Centered dot product over the product of centered norms."""
    t = np.asarray(truth, dtype=float)
    p = np.asarray(predicted, dtype=float)
    tc = t - t.mean()
    pc = p - p.mean()
    return float((tc * pc).sum() / np.sqrt((tc * tc).sum() * (pc * pc).sum()))


def tie_free_pair(seed, n):
    rng = np.random.default_rng(seed)
    while True:
        t = rng.normal(size=n)
        p = rng.normal(size=n)
        if len(np.unique(t)) == n and len(np.unique(p)) == n:
            return t, p


class TestSrcc:
    def test_identical_ranking(self):
        assert srcc([1, 2, 3], [10, 20, 30]) == pytest.approx(1.0, abs=1e-15)

    def test_reversed_ranking(self):
        assert srcc([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-15)

    def test_partial_ranking(self):
        assert srcc([1, 2, 3], [2, 1, 3]) == pytest.approx(0.5, abs=1e-15)
        assert srcc_classic([1, 2, 3], [2, 1, 3]) == pytest.approx(0.5, abs=1e-15)

    def test_all_tied_raises(self):
        with pytest.raises(UndefinedCorrelationError):
            srcc([1, 1, 1], [1, 2, 3])
        with pytest.raises(UndefinedCorrelationError):
            srcc([1, 2, 3], [2, 2, 2])

    @pytest.mark.parametrize("seed", range(10))
    def test_agrees_with_classic_formula_without_ties(self, seed):
        t, p = tie_free_pair(seed, 5 + seed * 13)
        assert srcc(t, p) == pytest.approx(srcc_classic(t, p), abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_agrees_with_scipy_including_ties(self, seed):
        rng = np.random.default_rng(seed)
        t = rng.integers(0, 6, size=40).astype(float)  # plenty of ties
        p = rng.integers(0, 6, size=40).astype(float)
        if len(np.unique(t)) < 2 or len(np.unique(p)) < 2:
            pytest.skip("degenerate draw")
        expected = scipy.stats.spearmanr(t, p).statistic
        assert srcc(t, p) == pytest.approx(expected, abs=1e-12)

    @given(st.integers(0, 1000))
    def test_monotone_transform_invariance(self, seed):
        t, p = tie_free_pair(seed, 20)
        base = srcc(t, p)
        assert srcc(np.exp(t), p) == pytest.approx(base, abs=1e-12)
        assert srcc(t, p**3) == pytest.approx(base, abs=1e-12)


class TestPlcc:
    def test_positive_affine_image(self):
        assert plcc([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0, abs=1e-15)

    def test_hand_case(self):
        assert plcc([1, 2, 3], [1, 2, 4]) == pytest.approx(0.9819805060619657, abs=1e-12)
        assert plcc([1, 2, 3], [1, 2, 4]) == pytest.approx(0.9820, abs=1e-4)

    def test_negation(self):
        t = np.array([0.3, 1.4, 4.4, 2.2])
        assert plcc(t, -t) == pytest.approx(-1.0, abs=1e-15)

    def test_zero_variance_raises(self):
        with pytest.raises(UndefinedCorrelationError):
            plcc([2, 2, 2], [1, 2, 3])

    @pytest.mark.parametrize("seed", range(10))
    def test_agrees_with_direct_formula_and_scipy(self, seed):
        t, p = tie_free_pair(seed, 8 + seed * 17)
        assert plcc(t, p) == pytest.approx(plcc_direct(t, p), abs=1e-12)
        assert plcc(t, p) == pytest.approx(scipy.stats.pearsonr(t, p).statistic, abs=1e-12)

    @given(st.integers(0, 1000))
    def test_affine_invariance(self, seed):
        t, p = tie_free_pair(seed, 15)
        base = plcc(t, p)
        assert plcc(2.5 * t + 7, p) == pytest.approx(base, abs=1e-12)
        assert plcc(t, 0.1 * p - 3) == pytest.approx(base, abs=1e-12)


class TestProperties:
    @given(st.integers(0, 500))
    def test_symmetry(self, seed):
        t, p = tie_free_pair(seed, 12)
        assert srcc(t, p) == pytest.approx(srcc(p, t), abs=1e-12)
        assert plcc(t, p) == pytest.approx(plcc(p, t), abs=1e-12)

    @given(st.integers(0, 500))
    def test_bounds(self, seed):
        t, p = tie_free_pair(seed, 30)
        assert -1.0 <= srcc(t, p) <= 1.0
        assert -1.0 <= plcc(t, p) <= 1.0


class TestScorePairSet:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            ScorePairSet(np.array([1.0, 2.0]), np.array([1.0]))

    def test_too_short(self):
        with pytest.raises(ValueError):
            ScorePairSet(np.array([1.0]), np.array([1.0]))

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            ScorePairSet(np.array([1.0, np.nan]), np.array([1.0, 2.0]))

    def test_accepted_by_metrics(self):
        pairs = ScorePairSet(np.array([1.0, 2.0, 3.0]), np.array([2.0, 1.0, 3.0]))
        assert srcc(pairs) == pytest.approx(0.5, abs=1e-15)
        assert plcc(pairs) == pytest.approx(plcc_direct(pairs.truth, pairs.predicted), abs=1e-15)


def test_average_ranks_ties():
    assert average_ranks(np.array([10.0, 20.0, 20.0, 30.0])).tolist() == [1.0, 2.5, 2.5, 4.0]
    assert average_ranks(np.array([5.0, 5.0, 5.0])).tolist() == [2.0, 2.0, 2.0]
