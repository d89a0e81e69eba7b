"""
Hyperspherical-cap comparison of the selection algorithms

With sigma = 1, a norm statistic (ell2 family) detects a row signal theta u_i v
once |theta u_i| exceeds a sphere radius r, while a sum statistic detects it
once the projection onto the all-ones direction clears a hyperplane at
distance r - h. The sum statistic wins inside the cap of half-angle
theta_lim = arccos((r - h) / r) around the all-ones direction.
"""
import logging
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from ..errors import DomainError
from ..models.schemas import (
    ELL2_FAMILY, HC_ALGORITHMS, SUM_FAMILY, Algorithm, GeometryReport, as_vector, sparsity_index,
)
from .fdr import DEFAULT_NU, DEFAULT_ZETA
from .row_stats import C2, threshold_constants
from .theory import rho

logger = logging.getLogger(__name__)


def theta_v(v: np.ndarray) -> float:
    """Angle between v and the all-ones direction"""
    v = as_vector(v)
    cosine = float(np.abs(v).sum() / (np.linalg.norm(v) * math.sqrt(v.size)))
    return math.acos(min(max(cosine, -1.0), 1.0))


class CapParams(BaseModel):
    """Problem size and selection-rule parameters shared by the cap formulas"""
    n: int = Field(..., ge=1)
    p: int = Field(..., ge=2)
    beta_sparsity: Optional[float] = None
    k_hat: int = Field(1, ge=1)
    zeta: float = Field(DEFAULT_ZETA, gt=0)
    nu: float = Field(DEFAULT_NU, gt=0)

    def rho(self, algorithm: Algorithm) -> float:
        if self.beta_sparsity is None:
            raise DomainError(f"{algorithm.value} needs a sparsity index")
        return rho(self.beta_sparsity)


def hyperplane_distance(algorithm: Algorithm, params: CapParams) -> float:
    """r - h of a sum-family algorithm"""
    n, p = params.n, params.p
    log_p = math.log(p)
    if algorithm == Algorithm.SUM:
        return threshold_constants(p).C_U * math.sqrt(log_p / n)
    if algorithm == Algorithm.HC_SUM:
        return math.sqrt(2.0 * params.rho(algorithm) * log_p / n)
    lam = 1.0 + math.sqrt(2.0 * math.log(params.nu * p / params.k_hat))
    return math.sqrt(params.zeta) * lam / math.sqrt(n)


def sphere_radius(algorithm: Algorithm, params: CapParams) -> float:
    """r of an ell2-family algorithm"""
    n, p = params.n, params.p
    if algorithm == Algorithm.ELL2:
        return math.sqrt(C2 * math.log(math.e * p) / math.sqrt(n))
    return 2.0 * params.rho(algorithm) * math.log(p) / math.sqrt(n)


def table_condition(sum_alg: Algorithm, norm_alg: Algorithm,
                    params: CapParams) -> Optional[bool]:
    """Closed-form sufficient condition for the cap to exist, where one is known"""
    if sum_alg == Algorithm.FDR:
        return None
    c_u = threshold_constants(params.p).C_U
    if norm_alg == Algorithm.ELL2:
        if sum_alg == Algorithm.SUM:
            return params.n >= c_u ** 4 / C2 ** 2
        return True
    r = params.rho(norm_alg)
    if sum_alg == Algorithm.SUM:
        return params.p >= math.exp(c_u ** 2 / (4.0 * r * r))
    return params.p >= math.exp(1.0 / (2.0 * r))


def cap_angle(r: float, h: float) -> Optional[float]:
    """theta_lim = arccos((r - h) / r), None when no cap exists"""
    if not r > 0:
        raise DomainError(f"sphere radius must be positive, got {r!r}")
    cosine = (r - h) / r
    if not 0.0 <= cosine <= 1.0:
        return None
    return math.acos(cosine)


def _preferred(first: Algorithm, second: Algorithm, ratio: float) -> Optional[Algorithm]:
    if ratio < 1.0:
        return first
    if ratio > 1.0:
        return second
    return None


def geometry_compare(alg_a: Algorithm, alg_b: Algorithm, n: int, p: int,
                     beta_sparsity: Optional[float] = None, sparsity: Optional[int] = None,
                     k_hat: int = 1, zeta: float = DEFAULT_ZETA, nu: float = DEFAULT_NU,
                     v: Optional[np.ndarray] = None) -> GeometryReport:
    """
    Compare two algorithms (sigma = 1).

    Across families the report carries the cap (r, h, theta_lim) and
    ratio = cos theta_lim; within a family ratio is the threshold of alg_a
    over that of alg_b. With v supplied, preferred names the algorithm with
    the lower boundary for that v.
    """
    alg_a, alg_b = Algorithm(alg_a), Algorithm(alg_b)
    known = SUM_FAMILY + ELL2_FAMILY
    for alg in (alg_a, alg_b):
        if alg not in known:
            raise DomainError(f"no geometric comparison is defined for {alg.value}")
    if alg_a == alg_b:
        raise DomainError("geometry_compare needs two different algorithms")
    if n < 1 or p < 2:
        raise DomainError(f"need n >= 1 and p >= 2, got n={n}, p={p}")
    if beta_sparsity is None and sparsity is not None:
        beta_sparsity = sparsity_index(sparsity, p)
    if any(alg in HC_ALGORITHMS for alg in (alg_a, alg_b)) and beta_sparsity is None:
        raise DomainError("HC comparisons need beta_sparsity or sparsity")
    if k_hat < 1 or k_hat > p:
        raise DomainError(f"k_hat must lie in [1, {p}], got {k_hat}")
    params = CapParams(n=n, p=p, beta_sparsity=beta_sparsity, k_hat=k_hat, zeta=zeta, nu=nu)

    angle_v = None
    if v is not None:
        v = as_vector(v)
        if v.size != n:
            raise DomainError(f"v has length {v.size}, expected n={n}")
        angle_v = theta_v(v)

    report = dict(alg_a=alg_a, alg_b=alg_b, n=n, p=p, theta_v=angle_v)

    if alg_a in SUM_FAMILY and alg_b in SUM_FAMILY:
        ratio = hyperplane_distance(alg_a, params) / hyperplane_distance(alg_b, params)
        return GeometryReport(ratio=ratio, preferred=_preferred(alg_a, alg_b, ratio), **report)
    if alg_a in ELL2_FAMILY and alg_b in ELL2_FAMILY:
        ratio = sphere_radius(alg_a, params) / sphere_radius(alg_b, params)
        return GeometryReport(ratio=ratio, preferred=_preferred(alg_a, alg_b, ratio), **report)

    sum_alg, norm_alg = (alg_a, alg_b) if alg_a in SUM_FAMILY else (alg_b, alg_a)
    r = sphere_radius(norm_alg, params)
    distance = hyperplane_distance(sum_alg, params)
    cosine = distance / r
    theta_lim = cap_angle(r, r - distance)
    cap_exists = theta_lim is not None

    preferred: Optional[Algorithm] = None
    v_in_cap = None
    if not cap_exists:
        preferred = norm_alg
        v_in_cap = False if angle_v is not None else None
    elif angle_v is not None:
        v_in_cap = angle_v < theta_lim
        preferred = sum_alg if v_in_cap else norm_alg

    return GeometryReport(
        r=r, h=r - distance, r_minus_h=distance, cos_theta_lim=cosine, theta_lim=theta_lim,
        cap_exists=cap_exists, table_condition=table_condition(sum_alg, norm_alg, params),
        ratio=cosine, preferred=preferred, v_in_cap=v_in_cap, **report,
    )
