"""
Family-wise error controlled coordinate selection
"""
import logging
from typing import Optional

import numpy as np

from ..errors import DomainError
from ..models.schemas import Algorithm, DataMatrix, SelectionResult, StatKind, ThresholdVariant
from .row_stats import ThresholdSpec, fwer_threshold, row_statistics

logger = logging.getLogger(__name__)


def select_fwer(matrix: DataMatrix, kind: StatKind, sigma: float,
                variant: ThresholdVariant = ThresholdVariant.EXACT_SUM,
                kappa_u: Optional[float] = None) -> SelectionResult:
    """Select every row whose statistic reaches the threshold (ties included)"""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    kind = StatKind(kind)
    variant = ThresholdVariant(variant)
    spec = ThresholdSpec(kind=kind, n=matrix.cols, p=matrix.rows, sigma=sigma,
                         variant=variant, kappa_u=kappa_u)
    threshold = fwer_threshold(spec)
    stats = row_statistics(kind, matrix)
    selected = [int(i) for i in np.flatnonzero(stats >= threshold)]

    logger.debug("%s selection: %d of %d rows at threshold %.6g",
                 kind.value, len(selected), matrix.rows, threshold)
    return SelectionResult(
        selected=selected,
        stats=stats,
        threshold=threshold,
        algorithm=Algorithm(kind.value),
        metadata={"variant": variant.value if kind == StatKind.SUM else None},
    )
