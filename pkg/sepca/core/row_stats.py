"""
Row test statistics and family-wise error thresholds
"""
import logging
import math
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from ..errors import DomainError
from ..models.schemas import DataMatrix, StatKind, ThresholdVariant
from .numerics import SQRT2, erfcinv

logger = logging.getLogger(__name__)

K = math.e
C2 = SQRT2 * K
C1 = K * math.sqrt(1.0 - 2.0 / math.pi)
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


class ThresholdConstants(BaseModel):
    """Constants behind the thresholds for a given p"""
    p: int
    K: float = K
    C1: float = C1
    C2: float = C2
    U: float
    delta: float
    kappa_min: float
    kappa_u: float
    C_U: float


def _check_p(p: int) -> None:
    if p < 2:
        raise DomainError(f"thresholds need p >= 2, got {p}")


def u_of_p(p: int) -> float:
    """U(p) = sqrt(2) erfinv(1 - 1/p), the 1 - 1/(2p) Gaussian quantile"""
    _check_p(p)
    return SQRT2 * erfcinv(1.0 / p)


def delta_p(p: int) -> float:
    _check_p(p)
    return (math.pi ** 2 / 12.0) * math.log(p) ** -1.5


def exact_sum_unit(p: int) -> float:
    """Exact sum threshold in units of sigma/sqrt(n)"""
    log_ep = math.log(math.e * p)
    return (math.sqrt(2.0 * math.log(p))
            + (log_ep / 3.0 + math.sqrt(log_ep)) / u_of_p(p)
            + delta_p(p))


def kappa_minimum(p: int) -> float:
    """Admissibility bound sqrt(2)/U(p) (3 + sqrt(log p))"""
    _check_p(p)
    return SQRT2 / u_of_p(p) * (3.0 + math.sqrt(math.log(p)))


def dominating_kappa(p: int) -> float:
    """
    Smallest admissible kappa_U for which the table bound dominates the exact
    sum threshold, tau_{n,p} <= sigma C_U sqrt(log p / n).
    """
    dominating = 3.0 * SQRT2 * (exact_sum_unit(p) / math.sqrt(math.log(p)) - SQRT2)
    return max(kappa_minimum(p), dominating)


def threshold_constants(p: int, kappa_u: Optional[float] = None) -> ThresholdConstants:
    """
    Evaluate U(p), delta_p, kappa_U and C_U.

    kappa_U defaults to its admissible minimum. Pass dominating_kappa(p) to get
    a table bound that is never below the exact sum threshold.
    """
    _check_p(p)
    u = u_of_p(p)
    kappa_min = kappa_minimum(p)
    if kappa_u is None:
        kappa_u = kappa_min
    elif kappa_u < kappa_min:
        raise DomainError(f"kappa_u={kappa_u!r} is below the admissible minimum {kappa_min!r}")
    return ThresholdConstants(
        p=p, U=u, delta=delta_p(p), kappa_min=kappa_min, kappa_u=kappa_u,
        C_U=SQRT2 + kappa_u / (3.0 * SQRT2),
    )


class ThresholdSpec(BaseModel):
    """Inputs of an FWER threshold"""
    kind: StatKind
    n: int = Field(..., ge=1)
    p: int = Field(..., ge=2)
    sigma: float = Field(1.0, gt=0)
    variant: ThresholdVariant = ThresholdVariant.EXACT_SUM
    kappa_u: Optional[float] = None

    def constants(self) -> ThresholdConstants:
        return threshold_constants(self.p, self.kappa_u)


def fwer_threshold(spec: ThresholdSpec) -> float:
    """Threshold tau_{n,p} for the row statistic of the given kind"""
    sigma, n, p = spec.sigma, spec.n, spec.p
    _check_p(p)
    root_n = math.sqrt(n)
    log_ep = math.log(math.e * p)

    if spec.kind == StatKind.ELL1:
        return sigma * (SQRT_2_OVER_PI + C1 * log_ep / root_n)
    if spec.kind == StatKind.ELL2:
        return sigma ** 2 * (1.0 + C2 * log_ep / root_n)
    if spec.variant == ThresholdVariant.EXACT_SUM:
        return sigma / root_n * exact_sum_unit(p)
    return sigma * spec.constants().C_U * math.sqrt(math.log(p) / n)


def row_statistic(kind: StatKind, row: np.ndarray) -> float:
    """Statistic of one row"""
    values = np.asarray(row, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise DomainError("row must be a non-empty vector")
    return float(row_statistics(kind, values[np.newaxis, :])[0])


def row_statistics(kind: StatKind, matrix: Union[DataMatrix, np.ndarray]) -> np.ndarray:
    """
    Statistics of every row, in O(pn)

    sum: |sum_k x_k| / sqrt(n); ell1: sum_k |x_k| / sqrt(n); ell2: sum_k x_k^2
    """
    values = matrix.values if isinstance(matrix, DataMatrix) else np.asarray(matrix, dtype=np.float64)
    if values.ndim != 2 or values.size == 0:
        raise DomainError("row statistics need a non-empty matrix")
    if not np.all(np.isfinite(values)):
        raise DomainError("row statistics need finite entries")
    root_n = math.sqrt(values.shape[1])
    kind = StatKind(kind)
    if kind == StatKind.SUM:
        return np.abs(values.sum(axis=1)) / root_n
    if kind == StatKind.ELL1:
        return np.abs(values).sum(axis=1) / root_n
    return np.einsum("ij,ij->i", values, values)
