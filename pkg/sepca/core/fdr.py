"""
False discovery rate controlled selection

Higher Criticism over row p-values, and penalized least squares hard
thresholding of the row sums.
"""
import logging
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from ..errors import DomainError
from ..models.schemas import Algorithm, DataMatrix, HCResult, HCRule, SelectionResult, StatKind
from .numerics import SQRT2, chi2_sf, erfc
from .row_stats import row_statistics

logger = logging.getLogger(__name__)

HC_MIN_P = 16
DEFAULT_ZETA = 1.02
DEFAULT_NU = math.e ** 2


def row_sums(matrix: DataMatrix) -> np.ndarray:
    """y_i = sum_k X_ik, distributed N(0, sigma^2) for a null row"""
    return matrix.values.sum(axis=1)


def pvalues(matrix: DataMatrix, kind: StatKind, sigma: float) -> np.ndarray:
    """
    Per-row p-values under the noise-only null.

    sum: two-sided Gaussian on the row sum; ell2: chi-square with n degrees
    of freedom on n * T_i / sigma^2.
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    kind = StatKind(kind)
    if kind == StatKind.SUM:
        return erfc(np.abs(row_sums(matrix)) / (sigma * SQRT2))
    if kind == StatKind.ELL2:
        stats = row_statistics(StatKind.ELL2, matrix)
        return chi2_sf(matrix.cols * stats / sigma ** 2, matrix.cols)
    raise DomainError(f"p-values are defined for sum and ell2 statistics, not {kind.value}")


def hc_threshold(p: int) -> float:
    if p < HC_MIN_P:
        raise DomainError(f"Higher Criticism needs p >= {HC_MIN_P}, got {p}")
    return math.sqrt(2.0 * math.log(math.log(p)))


def hc_select(pvals: np.ndarray, rule: HCRule = HCRule.CLOSURE) -> HCResult:
    """
    Higher Criticism over sorted p-values.

    HC_i = sqrt(p) (i/p - p_(i)) / sqrt(p_(i)(1 - p_(i))). The reported
    maximum runs over ranks with 1/p <= p_(i) <= 1/2; selection also admits
    ranks with p_(i) < 1/p, where p_(i) = 0 counts as +inf. Closure selects
    every rank up to the largest qualifying one, literal only the qualifying
    ranks. Rows tied with a selected p-value are selected with it.
    """
    pv = np.asarray(pvals, dtype=np.float64)
    if pv.ndim != 1:
        raise DomainError("p-values must be a vector")
    p = pv.size
    threshold = hc_threshold(p)
    if np.any(np.isnan(pv)) or np.any(pv < 0) or np.any(pv > 1):
        raise DomainError("p-values must lie in [0, 1]")
    rule = HCRule(rule)

    order = np.argsort(pv, kind="stable")
    sorted_p = pv[order]
    ranks = np.arange(1, p + 1, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = math.sqrt(p) * (ranks / p - sorted_p) / np.sqrt(sorted_p * (1.0 - sorted_p))

    admissible = (sorted_p >= 1.0 / p) & (sorted_p <= 0.5)
    below = sorted_p < 1.0 / p
    hc_values = np.where(admissible, raw, np.nan)
    selection_values = np.where(admissible | below, raw, np.nan)
    selection_values[sorted_p == 0.0] = np.inf

    hc_max = float(np.nanmax(hc_values)) if np.any(admissible) else None
    qualifies = np.nan_to_num(selection_values, nan=-np.inf) > threshold

    if not np.any(qualifies):
        chosen = np.zeros(p, dtype=bool)
    elif rule == HCRule.CLOSURE:
        cutoff = sorted_p[int(np.flatnonzero(qualifies)[-1])]
        chosen = pv <= cutoff
    else:
        chosen = np.isin(pv, sorted_p[qualifies])

    selected = [int(i) for i in np.flatnonzero(chosen)]
    logger.debug("HC (%s): %d selected, HC max %s, threshold %.4f",
                 rule.value, len(selected), hc_max, threshold)
    return HCResult(
        pvalues=pv, sorted_index=order, hc_values=hc_values,
        selection_values=selection_values, hc_max=hc_max,
        threshold=threshold, selected=selected, rule=rule,
    )


def select_hc(matrix: DataMatrix, kind: StatKind, sigma: float,
              rule: HCRule = HCRule.CLOSURE) -> SelectionResult:
    """HC-sum / HC-ell2 selection on a data matrix"""
    kind = StatKind(kind)
    pv = pvalues(matrix, kind, sigma)
    result = hc_select(pv, rule)
    algorithm = Algorithm.HC_SUM if kind == StatKind.SUM else Algorithm.HC_ELL2
    return SelectionResult(
        selected=result.selected,
        stats=row_statistics(kind, matrix),
        threshold=result.threshold,
        algorithm=algorithm,
        pvalues=pv,
        metadata={"hc_max": result.hc_max, "rule": result.rule.value},
    )


class FdrPenalty(BaseModel):
    """
    Complexity penalty pen(k) = xi1 zeta k (1 + sqrt(2 L_k))^2 with
    L_k = (1 + 2 beta_pen) log(nu p / k), and the hard thresholds
    t_k = sqrt(pen(k) - pen(k - 1)).
    """
    p: int = Field(..., ge=1)
    zeta: float = Field(DEFAULT_ZETA, gt=1)
    nu: float = Field(DEFAULT_NU, ge=math.e)
    xi1: float = Field(1.0, ge=1)
    beta_pen: float = Field(0.0, ge=0)

    @property
    def b(self) -> float:
        return 1.0 + 2.0 * self.beta_pen

    def _check_k(self, k: int, lowest: int = 0) -> None:
        if not lowest <= k <= self.p:
            raise DomainError(f"k must lie in [{lowest}, {self.p}], got {k}")

    def log_term(self, k: int) -> float:
        self._check_k(k, 1)
        return self.b * math.log(self.nu * self.p / k)

    def lam(self, k: int) -> float:
        """lambda_{p,k} = sqrt(xi1 zeta) (1 + sqrt(2 L_k))"""
        return math.sqrt(self.xi1 * self.zeta) * (1.0 + math.sqrt(2.0 * self.log_term(k)))

    def pen(self, k: int) -> float:
        self._check_k(k)
        if k == 0:
            return 0.0
        return k * self.lam(k) ** 2

    def t(self, k: int) -> float:
        self._check_k(k, 1)
        return math.sqrt(max(self.pen(k) - self.pen(k - 1), 0.0))

    def table(self) -> np.ndarray:
        """pen(k) for k = 0..p"""
        k = np.arange(1, self.p + 1, dtype=np.float64)
        root = 1.0 + np.sqrt(2.0 * self.b * np.log(self.nu * self.p / k))
        return np.concatenate(([0.0], self.xi1 * self.zeta * k * root ** 2))


def fdr_penalty(p: int, zeta: float = DEFAULT_ZETA, nu: float = DEFAULT_NU,
                xi1: float = 1.0, beta_pen: float = 0.0) -> FdrPenalty:
    return FdrPenalty(p=p, zeta=zeta, nu=nu, xi1=xi1, beta_pen=beta_pen)


def nu_for_fdr_level(omega: float) -> float:
    """nu = 2^(1/omega) targets false discovery rate omega"""
    if not 0.0 < omega < 1.0:
        raise DomainError(f"FDR level must lie in (0, 1), got {omega!r}")
    nu = 2.0 ** (1.0 / omega)
    if nu < math.e:
        raise DomainError(f"FDR level {omega!r} gives nu={nu:.4f} < e")
    return nu


def fdr_objective(y: np.ndarray, sigma: float, penalty: FdrPenalty) -> np.ndarray:
    """sum_{i>k} |y|_(i)^2 + sigma^2 pen(k) for k = 0..p"""
    magnitudes = np.sort(np.abs(y))[::-1]
    tail = np.concatenate((np.cumsum((magnitudes ** 2)[::-1])[::-1], [0.0]))
    return tail + sigma ** 2 * penalty.table()


def fdr_select(matrix: DataMatrix, sigma: float,
               penalty: Optional[FdrPenalty] = None) -> SelectionResult:
    """Hard threshold |y_i| at sigma t_k, k minimizing the penalized residual"""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    p = matrix.rows
    penalty = penalty or fdr_penalty(p)
    if penalty.p != p:
        raise DomainError(f"penalty built for p={penalty.p}, matrix has {p} rows")

    y = row_sums(matrix)
    magnitudes = np.abs(y)
    k_hat = int(np.argmin(fdr_objective(y, sigma, penalty)))

    if k_hat >= 1:
        threshold = sigma * penalty.t(k_hat)
        selected = [int(i) for i in np.flatnonzero(magnitudes >= threshold)]
    else:
        threshold = None
        selected = []

    logger.debug("FDR selection: k_hat=%d, %d selected", k_hat, len(selected))
    return SelectionResult(
        selected=selected,
        stats=magnitudes,
        threshold=threshold,
        algorithm=Algorithm.FDR,
        metadata={"k_hat": k_hat, "zeta": penalty.zeta, "nu": penalty.nu},
    )
