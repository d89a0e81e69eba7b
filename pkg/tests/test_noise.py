"""
Tests for robust noise-scale estimation
"""
import logging
import math

import numpy as np
import pytest

from sepca.core.noise import estimate_sigma
from sepca.errors import DomainError
from sepca.models.schemas import DataMatrix, SignalModel, VProfile, VProfileKind
from sepca.simulators.base import generate_data
from sepca.simulators.profiles import make_v


def model(sigma, theta=0.0, p=50, n=200):
    u = np.zeros(p)
    u[0] = 1.0
    return SignalModel(theta=theta, u=u, v=make_v(VProfile(kind=VProfileKind.RISE_FALL, n=n)),
                       sigma=sigma)


class TestEstimateSigma:
    """Test the Haar/MAD estimator"""

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 3.0])
    def test_calibration(self, sigma):
        estimates = [estimate_sigma(generate_data(model(sigma), seed)).sigma for seed in range(50)]
        assert np.mean(estimates) == pytest.approx(sigma, rel=0.02)

    def test_median_band(self):
        estimates = [estimate_sigma(generate_data(model(1.0, p=200, n=512), seed)).sigma
                     for seed in range(50)]
        assert 0.95 <= float(np.median(estimates)) <= 1.05

    def test_noiseless_smooth_signal(self):
        matrix = generate_data(model(0.0, theta=1.0, n=512), seed=0)
        assert estimate_sigma(matrix).sigma < 0.01

    def test_robust_to_signal(self):
        estimates = [estimate_sigma(generate_data(model(1.0, theta=5.0), seed)).sigma
                     for seed in range(20)]
        assert np.mean(estimates) == pytest.approx(1.0, rel=0.05)

    def test_scale_equivariance(self):
        matrix = generate_data(model(1.0), seed=3)
        base = estimate_sigma(matrix).sigma
        assert estimate_sigma(matrix.scaled(4.0)).sigma == pytest.approx(4.0 * base)

    def test_coefficient_count(self):
        matrix = generate_data(model(1.0, n=201), seed=0)
        result = estimate_sigma(matrix)
        assert result.coefficients == 50 * 100
        assert result.sigma == pytest.approx(1.0, rel=0.1)

    def test_pairwise_differences(self):
        values = np.array([[1.0, 3.0, 2.0, 2.0], [0.0, 0.0, 5.0, 1.0]])
        # pooled details: -sqrt(2), 0, 0, 2 sqrt(2)
        result = estimate_sigma(DataMatrix(values=values))
        d = np.array([-2.0, 0.0, 0.0, 4.0]) / math.sqrt(2)
        mad = np.median(np.abs(d - np.median(d))) / 0.6744897501960817
        assert result.sigma == pytest.approx(mad * 2.0, rel=1e-6)

    def test_constant_matrix_degenerate(self, caplog):
        with caplog.at_level(logging.WARNING, logger="sepca"):
            result = estimate_sigma(DataMatrix(values=np.ones((4, 6))))
        assert result.degenerate
        assert result.sigma == 0.0
        assert "degenerate" in caplog.text

    def test_needs_two_columns(self):
        with pytest.raises(DomainError):
            estimate_sigma(DataMatrix(values=np.ones((3, 1))))
