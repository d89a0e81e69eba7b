"""
Noise-scale estimation from finest-scale Haar detail coefficients
"""
import logging
import math

import numpy as np
import pywt
from scipy.stats import median_abs_deviation

from ..errors import DomainError
from ..models.schemas import DataMatrix, NoiseEstimate

logger = logging.getLogger(__name__)


def estimate_sigma(matrix: DataMatrix) -> NoiseEstimate:
    """
    Robust sigma from the pooled detail coefficients (X_{i,2k} - X_{i,2k+1}) / sqrt(2).

    Entries carry variance sigma^2 / n, so the Gaussian-consistent MAD is
    rescaled by sqrt(n). An odd last column is dropped.
    """
    values = matrix.values
    n = matrix.cols
    if n < 2:
        raise DomainError("noise estimation needs at least two columns")
    if n % 2:
        values = values[:, :-1]

    _, detail = pywt.dwt(values, "haar", axis=1)
    coefficients = detail.ravel()
    mad = float(median_abs_deviation(coefficients, scale="normal"))
    sigma = mad * math.sqrt(n)

    degenerate = not sigma > 0
    if degenerate:
        logger.warning("detail coefficients have zero spread; noise estimate is degenerate")
        sigma = 0.0
    return NoiseEstimate(sigma=sigma, degenerate=degenerate, coefficients=int(coefficients.size))
