"""
Detection boundaries and the SVD breakdown limit
"""
import logging
import math

import numpy as np

from ..errors import DomainError, NumericalError
from ..models.schemas import Algorithm, BoundarySpec, SUM_FAMILY, as_vector, is_equisigned
from .numerics import SQRT2, SQRT_PI, erf
from .row_stats import C1, C2, SQRT_2_OVER_PI, threshold_constants

logger = logging.getLogger(__name__)

T_ELL1_LIMIT = 1e6
T_ELL1_TOL = 1e-10


def rho(beta: float) -> float:
    """HC boundary exponent: beta - 1/2 up to 3/4, (1 - sqrt(1 - beta))^2 above"""
    if not 0.5 < beta < 1.0:
        raise DomainError(f"sparsity index must lie in (1/2, 1), got {beta!r}")
    if beta <= 0.75:
        return beta - 0.5
    return (1.0 - math.sqrt(1.0 - beta)) ** 2


def g_ell1(t: float, v: np.ndarray) -> float:
    """
    Mean of the l1 statistic of a row carrying t v plus unit noise:
    (1/n) sqrt(2/pi) [sum_k exp(-a_k^2) + sqrt(pi) sum_k a_k erf(a_k)],
    a_k = sqrt(n) t v_k / sqrt(2)
    """
    n = v.size
    a = math.sqrt(n) * t * v / SQRT2
    total = np.exp(-a * a).sum() + SQRT_PI * (a * erf(a)).sum()
    return SQRT_2_OVER_PI * float(total) / n


def _unit(v: np.ndarray) -> np.ndarray:
    v = as_vector(v)
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-8:
        raise DomainError(f"v must have unit l2 norm, got {norm!r}")
    return v


def solve_t_ell1(n: int, p: int, v: np.ndarray) -> float:
    """Root t > 0 of g_ell1(t, v) = sqrt(2/pi) + C1 log(ep)/sqrt(n), by bisection"""
    if p < 2:
        raise DomainError(f"p must be at least 2, got {p}")
    v = _unit(v)
    if v.size != n:
        raise DomainError(f"v has length {v.size}, expected n={n}")
    target = SQRT_2_OVER_PI + C1 * (1.0 + math.log(p)) / math.sqrt(n)

    lo, hi = 0.0, 1.0
    while g_ell1(hi, v) < target:
        lo, hi = hi, 2.0 * hi
        if hi > T_ELL1_LIMIT:
            raise NumericalError(
                f"t_ell1 bracket exceeded {T_ELL1_LIMIT:g} (n={n}, log p={math.log(p):.6g})")

    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        residual = g_ell1(mid, v) - target
        if abs(residual) <= T_ELL1_TOL:
            return mid
        if residual < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * hi:
            break
    residual = abs(g_ell1(mid, v) - target)
    if residual > T_ELL1_TOL:
        raise NumericalError(f"t_ell1 bisection stalled with residual {residual:.3g}")
    return mid


def _sum_family_norm(spec: BoundarySpec) -> float:
    v = spec.v
    if not is_equisigned(v):
        raise DomainError(f"{spec.algorithm.value} boundary needs an equisigned v")
    total = abs(float(v.sum()))
    if total == 0.0:
        raise DomainError(f"{spec.algorithm.value} boundary is undefined for sum(v) = 0")
    # |sum v| equals ||v||_1 for equisigned v
    return total


def beta_crit(spec: BoundarySpec) -> float:
    """
    Smallest |theta u_i| each algorithm detects.

    The (1 - o(1)) factors of the HC and FDR boundaries are set to 1.
    """
    sigma, n, p = spec.sigma, spec.n, spec.p
    log_p = math.log(p)

    if spec.algorithm == Algorithm.ELL2:
        return sigma * math.sqrt(C2 * math.log(math.e * p) / math.sqrt(n))
    if spec.algorithm == Algorithm.HC_ELL2:
        return sigma * rho(spec.beta_sparsity) * 2.0 * log_p / math.sqrt(n)
    if spec.algorithm == Algorithm.ELL1:
        return sigma * solve_t_ell1(n, p, spec.v)

    if spec.algorithm not in SUM_FAMILY:
        raise DomainError(f"no detection boundary for {spec.algorithm.value}")
    v_l1 = _sum_family_norm(spec)
    if spec.algorithm == Algorithm.SUM:
        return sigma * threshold_constants(p).C_U * math.sqrt(log_p) / v_l1
    if spec.algorithm == Algorithm.HC_SUM:
        return sigma * math.sqrt(rho(spec.beta_sparsity)) * math.sqrt(2.0 * log_p) / v_l1
    lam = 1.0 + math.sqrt(2.0 * math.log(spec.nu * p / spec.k_hat))
    return sigma * math.sqrt(spec.zeta) * lam / v_l1


def svd_overlap_limit(theta: float, sigma: float, c: float) -> float:
    """
    Almost-sure limit of |<u_hat, u>|^2 for the plain SVD when p/n -> c.

    Zero below the breakdown point theta/sigma = c^(1/4).
    """
    if not c > 0:
        raise DomainError(f"aspect ratio c must be positive, got {c!r}")
    if theta < 0 or sigma < 0:
        raise DomainError("theta and sigma must be non-negative")
    if sigma == 0:
        return 1.0 if theta > 0 else 0.0
    phi = theta / sigma
    if phi == 0 or phi < c ** 0.25:
        return 0.0
    phi2 = phi * phi
    value = 1.0 - c * (1.0 + phi2) / (phi2 * (c + phi2))
    return min(max(value, 0.0), 1.0)
