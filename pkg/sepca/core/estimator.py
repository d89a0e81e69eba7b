"""
Two-stage estimation engine - coordinate selection followed by a rank-1 SVD
"""
import logging
from typing import Callable, Dict, Optional

import numpy as np

from ..errors import DomainError
from ..models.schemas import (
    Algorithm, DataMatrix, Estimate, HCRule, SelectionResult, StatKind, ThresholdVariant,
)
from .fdr import DEFAULT_NU, DEFAULT_ZETA, fdr_penalty, fdr_select, select_hc
from .fwer import select_fwer
from .numerics import rank1_svd
from .row_stats import row_statistics

logger = logging.getLogger(__name__)


def estimate_two_stage(matrix: DataMatrix, selection: SelectionResult,
                       svd_fallback: bool = False) -> Estimate:
    """
    Rank-1 SVD of X restricted to the selected rows, embedded into R^p.

    An empty selection gives a zero estimate with the empty flag set, or the
    full-matrix SVD when svd_fallback is on.
    """
    p = matrix.rows
    indices = np.asarray(selection.selected, dtype=np.intp)
    if indices.size and (indices.min() < 0 or indices.max() >= p):
        raise DomainError(f"selected rows must lie in [0, {p - 1}]")

    if indices.size == 0:
        if svd_fallback:
            logger.debug("empty %s selection, falling back to the full SVD",
                         selection.algorithm.value)
            svd = rank1_svd(matrix.values)
            return Estimate(u_hat=svd.u_hat, v_hat=svd.v_hat, theta_hat=svd.sigma1,
                            selection=selection, fallback=True)
        logger.debug("empty %s selection, returning the zero estimate",
                     selection.algorithm.value)
        return Estimate(u_hat=np.zeros(p), v_hat=np.zeros(matrix.cols), theta_hat=0.0,
                        selection=selection, empty=True)

    svd = rank1_svd(matrix.restrict(list(indices)))
    u_hat = np.zeros(p)
    u_hat[indices] = svd.u_hat
    return Estimate(u_hat=u_hat, v_hat=svd.v_hat, theta_hat=svd.sigma1, selection=selection)


class TwoStageEstimator:
    """Runs any of the selection algorithms and the shared second stage"""

    def __init__(self, variant: ThresholdVariant = ThresholdVariant.EXACT_SUM,
                 hc_rule: HCRule = HCRule.CLOSURE, zeta: float = DEFAULT_ZETA,
                 nu: float = DEFAULT_NU, kappa_u: Optional[float] = None,
                 svd_fallback: bool = False):
        self.variant = ThresholdVariant(variant)
        self.hc_rule = HCRule(hc_rule)
        self.zeta = zeta
        self.nu = nu
        self.kappa_u = kappa_u
        self.svd_fallback = svd_fallback
        self.selectors: Dict[Algorithm, Callable[[DataMatrix, float], SelectionResult]] = {
            Algorithm.SUM: self._select_sum,
            Algorithm.ELL1: self._select_ell1,
            Algorithm.ELL2: self._select_ell2,
            Algorithm.HC_SUM: self._select_hc_sum,
            Algorithm.HC_ELL2: self._select_hc_ell2,
            Algorithm.FDR: self._select_fdr,
            Algorithm.SVD_BASELINE: self._select_all,
        }

    def select(self, matrix: DataMatrix, algorithm: Algorithm, sigma: float) -> SelectionResult:
        """First stage for the given algorithm"""
        selector = self.selectors.get(Algorithm(algorithm))
        if selector is None:
            raise DomainError(f"Unknown algorithm: {algorithm}")
        return selector(matrix, sigma)

    def estimate(self, matrix: DataMatrix, algorithm: Algorithm, sigma: float) -> Estimate:
        """Both stages"""
        return estimate_two_stage(matrix, self.select(matrix, algorithm, sigma), self.svd_fallback)

    def _select_sum(self, matrix: DataMatrix, sigma: float) -> SelectionResult:
        return select_fwer(matrix, StatKind.SUM, sigma, self.variant, self.kappa_u)

    def _select_ell1(self, matrix: DataMatrix, sigma: float) -> SelectionResult:
        return select_fwer(matrix, StatKind.ELL1, sigma)

    def _select_ell2(self, matrix: DataMatrix, sigma: float) -> SelectionResult:
        return select_fwer(matrix, StatKind.ELL2, sigma)

    def _select_hc_sum(self, matrix: DataMatrix, sigma: float) -> SelectionResult:
        return select_hc(matrix, StatKind.SUM, sigma, self.hc_rule)

    def _select_hc_ell2(self, matrix: DataMatrix, sigma: float) -> SelectionResult:
        return select_hc(matrix, StatKind.ELL2, sigma, self.hc_rule)

    def _select_fdr(self, matrix: DataMatrix, sigma: float) -> SelectionResult:
        penalty = fdr_penalty(matrix.rows, zeta=self.zeta, nu=self.nu)
        return fdr_select(matrix, sigma, penalty)

    def _select_all(self, matrix: DataMatrix, sigma: float) -> SelectionResult:
        # plain SVD: every row is kept
        return SelectionResult(
            selected=list(range(matrix.rows)),
            stats=row_statistics(StatKind.ELL2, matrix),
            algorithm=Algorithm.SVD_BASELINE,
        )
