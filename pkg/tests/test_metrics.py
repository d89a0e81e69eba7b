"""
Tests for estimation loss and support metrics
"""
import numpy as np
import pytest
from pydantic import ValidationError

from sepca.core.metrics import l2_loss, overlap, support_metrics
from sepca.errors import DomainError
from sepca.models.schemas import SupportMetrics


def unit(values):
    values = np.asarray(values, dtype=np.float64)
    return values / np.linalg.norm(values)


class TestL2Loss:
    """Test the sign-aligned squared error"""

    def test_identities(self):
        u = unit([1.0, 2.0, 0.0, -1.0])
        assert l2_loss(u, u) == 0.0
        assert l2_loss(u, -u) == 0.0
        assert l2_loss(u, np.zeros(4)) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert l2_loss(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(2.0)

    def test_bounded(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            u, u_hat = unit(rng.standard_normal(6)), unit(rng.standard_normal(6))
            assert 0.0 <= l2_loss(u, u_hat) <= 2.0

    def test_sign_symmetry(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            u, u_hat = rng.standard_normal(9), rng.standard_normal(9)
            base = l2_loss(u, u_hat)
            assert l2_loss(-u, u_hat) == pytest.approx(base, abs=1e-12)
            assert l2_loss(u, -u_hat) == pytest.approx(base, abs=1e-12)
            assert l2_loss(-u, -u_hat) == pytest.approx(base, abs=1e-12)

    def test_missed_coordinate_decomposition(self):
        rng = np.random.default_rng(2)
        p = 30
        for _ in range(100):
            u = unit(rng.standard_normal(p))
            chosen = rng.uniform(size=p) < 0.4
            u_hat = np.where(chosen, rng.standard_normal(p), 0.0)
            if u @ u_hat < 0:
                u_hat = -u_hat
            inside = np.sum((u[chosen] - u_hat[chosen]) ** 2)
            missed = np.sum(u[~chosen] ** 2)
            assert l2_loss(u, u_hat) == pytest.approx(inside + missed, abs=1e-12)

    def test_overlap(self):
        u = unit([1.0, 1.0])
        assert overlap(u, u) == pytest.approx(1.0)
        assert overlap(u, np.array([1.0, 0.0])) == pytest.approx(0.5)

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            l2_loss(np.ones(3), np.ones(4))


class TestSupportMetrics:
    """Test Hamming distance, TPR and FDR on 0-based index sets"""

    def test_exact_recovery(self):
        metrics = support_metrics([2, 5], [5, 2], p=10)
        assert metrics.hamming == 0
        assert metrics.tpr == 1.0
        assert metrics.fdr == 0.0

    def test_partial_overlap(self):
        metrics = support_metrics([0, 1], [1, 2], p=10)
        assert metrics.hamming == 2
        assert metrics.tpr == 0.5
        assert metrics.fdr == 0.5

    def test_empty_selection(self):
        metrics = support_metrics([0], [], p=10)
        assert metrics.hamming == 1
        assert metrics.tpr == 0.0
        assert metrics.fdr == 0.0

    def test_empty_support(self):
        clean = support_metrics([], [], p=4)
        assert clean.tpr == 1.0
        assert not clean.tpr_undefined
        noisy = support_metrics([], [3], p=4)
        assert noisy.tpr == 0.0
        assert noisy.fdr == 1.0
        assert noisy.tpr_undefined

    def test_duplicates_collapse(self):
        assert support_metrics([1, 1], [1, 1, 1], p=3).hamming == 0

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            support_metrics([0], [4], p=4)
        with pytest.raises(DomainError):
            support_metrics([-1], [], p=4)

    def test_model_bounds(self):
        with pytest.raises(ValidationError):
            SupportMetrics(hamming=0, tpr=1.5, fdr=0.0)
