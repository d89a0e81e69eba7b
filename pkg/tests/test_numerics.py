"""
Tests for special functions and the rank-1 SVD
"""
import math

import numpy as np
import pytest
from scipy import special, stats

from sepca.core.numerics import (
    chi2_sf, erf, erfc, erfcinv, erfinv, norm_cdf, norm_sf, rank1_svd,
)
from sepca.errors import DomainError


class TestErf:
    """Test erf / erfc"""

    def test_known_values(self):
        assert erf(0.0) == 0.0
        assert abs(erf(10.0) - 1.0) <= 1e-15
        assert abs(erf(1.0) - 0.842700792949715) <= 1e-12

    def test_matches_scipy(self):
        x = np.linspace(-6, 6, 1201)
        assert np.max(np.abs(erf(x) - special.erf(x))) <= 1e-12

    def test_odd_and_monotone(self):
        x = np.linspace(0.01, 5, 500)
        assert np.allclose(erf(-x), -erf(x), atol=0, rtol=0)
        assert np.all(np.diff(erf(np.linspace(-4, 4, 801))) >= 0)

    def test_erfc_upper_tail_relative_accuracy(self):
        x = np.linspace(3, 25, 221)
        assert np.allclose(erfc(x), special.erfc(x), rtol=1e-11, atol=0)

    def test_erfc_lower_half(self):
        x = np.array([-5.0, -3.0, -1.0, 0.0, 2.5])
        assert np.allclose(erfc(x), special.erfc(x), atol=1e-14)

    def test_scalar_and_shape(self):
        assert isinstance(erf(0.3), float)
        grid = np.zeros((3, 4))
        assert erf(grid).shape == (3, 4)

    def test_gaussian_cdf(self):
        x = np.linspace(-8, 8, 161)
        assert np.allclose(norm_cdf(x), stats.norm.cdf(x), atol=1e-14)
        assert np.allclose(norm_sf(x), stats.norm.sf(x), atol=1e-14)
        assert norm_cdf(0.0) == pytest.approx(0.5)


class TestErfinv:
    """Test erfinv / erfcinv"""

    def test_known_values(self):
        assert erfinv(0.0) == 0.0
        assert erfinv(0.99) == pytest.approx(1.82139, abs=1e-5)
        assert erfinv(erf(1.7)) == pytest.approx(1.7, abs=1e-10)

    def test_roundtrip_on_grid(self):
        x = np.linspace(-3, 3, 121)
        assert np.max(np.abs(erfinv(erf(x)) - x)) <= 1e-10

    def test_forward_residual(self):
        y = np.concatenate((np.linspace(-0.999999, 0.999999, 401), [1e-9, -0.5, 0.5]))
        assert np.max(np.abs(erf(erfinv(y)) - y)) <= 1e-12

    def test_monotone(self):
        assert np.all(np.diff(erfinv(np.linspace(-0.99, 0.99, 199))) > 0)

    def test_domain(self):
        for bad in (1.0, -1.0, 1.5, float("nan")):
            with pytest.raises(DomainError):
                erfinv(bad)
        with pytest.raises(ValueError):
            erfcinv(0.0)

    def test_erfcinv_small_arguments(self):
        q = np.array([1e-16, 1e-10, 1e-6, 1e-3, 0.3, 1.0, 1.7])
        assert np.allclose(erfcinv(q), special.erfcinv(q), rtol=1e-12, atol=1e-15)


class TestChi2Sf:
    """Test the chi-square survival function"""

    def test_boundaries(self):
        assert chi2_sf(0.0, 7) == 1.0
        assert chi2_sf(1e5, 7) <= 1e-300
        assert chi2_sf(np.inf, 3) == 0.0

    def test_two_degrees_is_exponential(self):
        assert chi2_sf(2.0, 2) == pytest.approx(math.exp(-1.0), abs=1e-12)
        x = np.linspace(0, 60, 601)
        assert np.max(np.abs(chi2_sf(x, 2) - np.exp(-x / 2))) <= 1e-12

    @pytest.mark.parametrize("dof", [1, 3, 10, 100, 500])
    def test_matches_scipy(self, dof):
        x = np.linspace(0, 3 * dof + 40, 400)
        assert np.max(np.abs(chi2_sf(x, dof) - stats.chi2.sf(x, dof))) <= 1e-10

    def test_monotone_decreasing(self):
        values = chi2_sf(np.linspace(0, 200, 1000), 50)
        assert np.all(np.diff(values) <= 0)

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            chi2_sf(1.0, 0)
        with pytest.raises(DomainError):
            chi2_sf(-1.0, 3)


class TestRank1SVD:
    """Test power-iteration rank-1 SVD"""

    def test_scaled_basis_vector(self):
        result = rank1_svd(3.0 * np.array([[1.0, 0.0], [0.0, 0.0]]))
        assert result.sigma1 == pytest.approx(3.0)
        assert np.allclose(result.u_hat, [1.0, 0.0], atol=1e-12)
        assert np.allclose(result.v_hat, [1.0, 0.0], atol=1e-12)
        assert not result.degenerate

    def test_exact_rank_one(self):
        rng = np.random.default_rng(7)
        u = rng.standard_normal(9)
        u /= np.linalg.norm(u)
        v = rng.standard_normal(6)
        v /= np.linalg.norm(v)
        result = rank1_svd(2.5 * np.outer(u, v))
        sign = np.sign(result.u_hat @ u)
        assert result.sigma1 == pytest.approx(2.5, abs=1e-8)
        assert np.allclose(sign * result.u_hat, u, atol=1e-8)
        assert np.allclose(sign * result.v_hat, v, atol=1e-8)

    def test_matches_full_decomposition(self):
        rng = np.random.default_rng(12345)
        for _ in range(100):
            rows, cols = rng.integers(1, 13, size=2)
            matrix = rng.standard_normal((rows, cols))
            result = rank1_svd(matrix)
            top = np.linalg.svd(matrix, compute_uv=False)[0]
            assert result.sigma1 == pytest.approx(top, rel=1e-8)
            assert np.linalg.norm(result.u_hat) == pytest.approx(1.0, abs=1e-10)
            assert np.linalg.norm(result.v_hat) == pytest.approx(1.0, abs=1e-10)
            residual = np.linalg.norm(matrix @ result.v_hat - result.sigma1 * result.u_hat)
            assert residual <= 1e-8 * result.sigma1

    def test_sign_convention(self):
        rng = np.random.default_rng(3)
        result = rank1_svd(rng.standard_normal((8, 5)))
        assert result.u_hat[np.argmax(np.abs(result.u_hat))] > 0

    def test_zero_matrix(self):
        result = rank1_svd(np.zeros((3, 4)))
        assert result.sigma1 == 0.0
        assert result.degenerate
        assert np.linalg.norm(result.u_hat) == 1.0
        assert np.linalg.norm(result.v_hat) == 1.0

    def test_start_vector_breakdown(self):
        # all-ones start lies in the null space of M M^T
        result = rank1_svd(np.array([[1.0, 1.0], [-1.0, -1.0]]))
        assert result.sigma1 == pytest.approx(2.0)
        assert np.allclose(result.u_hat, np.array([1.0, -1.0]) / math.sqrt(2))
        assert np.allclose(result.v_hat, np.array([1.0, 1.0]) / math.sqrt(2))

    def test_permutation_invariance(self):
        rng = np.random.default_rng(11)
        matrix = rng.standard_normal((7, 10))
        rows, cols = rng.permutation(7), rng.permutation(10)
        base = rank1_svd(matrix)
        permuted = rank1_svd(matrix[rows][:, cols])
        assert permuted.sigma1 == pytest.approx(base.sigma1, rel=1e-10)
        sign = np.sign(permuted.u_hat @ base.u_hat[rows])
        assert np.allclose(sign * permuted.u_hat, base.u_hat[rows], atol=1e-7)

    def test_rejects_bad_matrix(self):
        with pytest.raises(DomainError):
            rank1_svd(np.zeros((0, 3)))
        with pytest.raises(DomainError):
            rank1_svd(np.array([[1.0, np.nan]]))
