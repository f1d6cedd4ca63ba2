"""Statistics kernel tests; scipy appears only as an oracle, never at runtime."""

import math
import random

import pytest
import scipy.stats

from langtransfer import stats
from langtransfer.errors import ValidationError


class TestPearson:
    def test_perfect_positive(self):
        assert stats.pearson_r([1, 2, 3, 4], [2, 4, 6, 8]) == pytest.approx(1.0)

    def test_perfect_negative(self):
        assert stats.pearson_r([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_matches_scipy(self):
        rng = random.Random(7)
        for _ in range(50):
            n = rng.randrange(3, 30)
            x = [rng.gauss(0, 1) for _ in range(n)]
            y = [rng.gauss(0, 1) for _ in range(n)]
            expected = scipy.stats.pearsonr(x, y).statistic
            assert stats.pearson_r(x, y) == pytest.approx(expected, abs=1e-12)

    def test_zero_variance_raises(self):
        with pytest.raises(ValidationError):
            stats.pearson_r([1, 1, 1], [1, 2, 3])

    def test_too_short_raises(self):
        with pytest.raises(ValidationError):
            stats.pearson_r([1, 2], [3, 4])

    def test_length_mismatch_raises(self):
        with pytest.raises(ValidationError):
            stats.pearson_r([1, 2, 3], [1, 2])


class TestSpearman:
    def test_monotone_is_one(self):
        assert stats.spearman_rho([1, 5, 9], [10, 200, 3000]) == pytest.approx(1.0)

    def test_ties_match_scipy(self):
        rng = random.Random(11)
        for _ in range(30):
            n = rng.randrange(4, 20)
            # coarse values force ties
            x = [float(rng.randrange(5)) for _ in range(n)]
            y = [float(rng.randrange(5)) for _ in range(n)]
            try:
                got = stats.spearman_rho(x, y)
            except ValidationError:
                continue  # all-tied vector, zero variance
            expected = scipy.stats.spearmanr(x, y).statistic
            assert got == pytest.approx(expected, abs=1e-12)


class TestCorrelationTTest:
    def test_known_value(self):
        # r = 0.73 over 22 unordered pairs
        result = stats.t_test_correlation(0.73, 22)
        assert result.statistic == pytest.approx(4.776, abs=1e-3)
        assert result.df == 20
        assert result.p_value == pytest.approx(1.15e-4, rel=0.01)

    def test_matches_scipy_sf(self):
        for r, n in [(0.1, 5), (-0.6, 12), (0.31, 40), (0.9, 8)]:
            result = stats.t_test_correlation(r, n)
            expected = 2 * scipy.stats.t.sf(abs(result.statistic), n - 2)
            assert result.p_value == pytest.approx(expected, rel=1e-9)

    def test_perfect_correlation_degenerate(self):
        result = stats.t_test_correlation(1.0, 10)
        assert result.p_value == 0.0
        assert result.degenerate

    def test_bad_inputs(self):
        with pytest.raises(ValidationError):
            stats.t_test_correlation(1.5, 10)
        with pytest.raises(ValidationError):
            stats.t_test_correlation(0.5, 2)


class TestChiSquare:
    def test_known_table(self):
        table = stats.ContingencyTable(
            rows=("a", "b"), cols=("x", "y"), counts=((10, 20), (20, 10))
        )
        result = stats.chi_square(table)
        assert result.statistic == pytest.approx(6.6667, abs=1e-4)
        assert result.df == 1
        assert result.p_value == pytest.approx(0.0098, abs=1e-3)

    def test_matches_scipy(self):
        rng = random.Random(3)
        for _ in range(30):
            nr, nc = rng.randrange(2, 5), rng.randrange(2, 5)
            counts = tuple(
                tuple(rng.randrange(1, 40) for _ in range(nc)) for _ in range(nr)
            )
            table = stats.ContingencyTable(
                rows=tuple(f"r{i}" for i in range(nr)),
                cols=tuple(f"c{j}" for j in range(nc)),
                counts=counts,
            )
            result = stats.chi_square(table)
            expected = scipy.stats.chi2_contingency(counts, correction=False)
            assert result.statistic == pytest.approx(expected.statistic, rel=1e-9)
            assert result.p_value == pytest.approx(expected.pvalue, rel=1e-6, abs=1e-12)

    def test_zero_marginal_raises(self):
        table = stats.ContingencyTable(
            rows=("a", "b"), cols=("x", "y"), counts=((0, 0), (5, 5))
        )
        with pytest.raises(ValidationError):
            stats.chi_square(table)

    def test_table_shape_validated(self):
        with pytest.raises(ValidationError):
            stats.ContingencyTable(rows=("a",), cols=("x", "y"), counts=((1, 2),))


class TestEmd:
    def test_identical_is_zero(self):
        p = {1: 0.5, 2: 0.5}
        assert stats.emd_1d(p, dict(p)) == 0.0

    def test_unit_shift(self):
        assert stats.emd_1d({0: 1.0}, {1: 1.0}) == pytest.approx(1.0)
        assert stats.emd_1d({0: 1.0}, {5: 1.0}) == pytest.approx(5.0)

    def test_unnormalized_raises(self):
        with pytest.raises(ValidationError):
            stats.emd_1d({0: 0.7}, {0: 1.0})

    def test_matches_scipy_wasserstein(self):
        rng = random.Random(19)
        for _ in range(40):
            support = sorted(rng.sample(range(50), rng.randrange(2, 8)))
            def hist():
                w = [rng.random() + 0.01 for _ in support]
                s = sum(w)
                return {k: v / s for k, v in zip(support, w)}
            p, q = hist(), hist()
            expected = scipy.stats.wasserstein_distance(
                support, support, list(p.values()), list(q.values())
            )
            assert stats.emd_1d(p, q) == pytest.approx(expected, abs=1e-12)

    def test_metric_properties(self):
        rng = random.Random(23)
        for _ in range(200):
            def hist():
                support = rng.sample(range(30), rng.randrange(2, 6))
                w = [rng.random() + 0.01 for _ in support]
                s = sum(w)
                return {k: v / s for k, v in zip(support, w)}
            p, q, r = hist(), hist(), hist()
            dpq = stats.emd_1d(p, q)
            assert dpq >= 0.0
            assert dpq == pytest.approx(stats.emd_1d(q, p), abs=1e-12)
            assert stats.emd_1d(p, q) + stats.emd_1d(q, r) >= stats.emd_1d(p, r) - 1e-9
