"""
Estimation loss and support recovery metrics
"""
import logging
from typing import Iterable

import numpy as np

from ..errors import DomainError
from ..models.schemas import SupportMetrics

logger = logging.getLogger(__name__)


def l2_loss(u: np.ndarray, u_hat: np.ndarray) -> float:
    """||u - sign(<u, u_hat>) u_hat||^2, sign(0) = +1"""
    u = np.asarray(u, dtype=np.float64)
    u_hat = np.asarray(u_hat, dtype=np.float64)
    if u.shape != u_hat.shape:
        raise DomainError(f"shape mismatch: {u.shape} vs {u_hat.shape}")
    sign = -1.0 if float(u @ u_hat) < 0 else 1.0
    diff = u - sign * u_hat
    return float(diff @ diff)


def overlap(u: np.ndarray, u_hat: np.ndarray) -> float:
    """Squared cosine |<u, u_hat>|^2 for unit vectors"""
    return float(np.dot(u, u_hat)) ** 2


def _index_set(indices: Iterable[int], p: int, name: str) -> set:
    result = {int(i) for i in indices}
    if any(i < 0 or i >= p for i in result):
        raise DomainError(f"{name} has indices outside [0, {p - 1}]")
    return result


def support_metrics(support: Iterable[int], selected: Iterable[int], p: int) -> SupportMetrics:
    """Hamming distance, true positive rate and false discovery proportion"""
    true_set = _index_set(support, p, "support")
    hat_set = _index_set(selected, p, "selection")
    hits = len(true_set & hat_set)

    tpr_undefined = False
    if true_set:
        tpr = hits / len(true_set)
    else:
        tpr = 1.0 if not hat_set else 0.0
        tpr_undefined = bool(hat_set)
        if tpr_undefined:
            logger.debug("empty support with a non-empty selection; tpr set to 0")

    fdr = len(hat_set - true_set) / len(hat_set) if hat_set else 0.0
    return SupportMetrics(hamming=len(true_set ^ hat_set), tpr=tpr, fdr=fdr,
                          tpr_undefined=tpr_undefined)
