"""
Sparse left singular vector constructions
"""
import math

import numpy as np

from ..errors import DomainError
from ..models.schemas import USpec, USpecKind


def _explicit(p: int, spec: USpec) -> np.ndarray:
    support = spec.support or []
    if not support:
        raise DomainError("u support must be non-empty")
    if len(set(support)) != len(support):
        raise DomainError("u support has repeated indices")
    if min(support) < 0 or max(support) >= p:
        raise DomainError(f"u support indices must lie in [0, {p - 1}]")
    values = spec.values if spec.values is not None else [1.0] * len(support)
    u = np.zeros(p)
    u[np.asarray(support, dtype=np.intp)] = values
    norm = float(np.linalg.norm(u))
    if norm == 0.0:
        raise DomainError("u values on the support are all zero")
    return u / norm


def _equal(p: int, spec: USpec) -> np.ndarray:
    s = spec.s if spec.s is not None else math.ceil(math.sqrt(p))
    if s > p:
        raise DomainError(f"sparsity s={s} exceeds p={p}")
    u = np.zeros(p)
    u[:s] = 1.0 / math.sqrt(s)
    return u


def _worst_case(p: int, spec: USpec) -> np.ndarray:
    m, r = spec.m, spec.r
    if m + 1 > p:
        raise DomainError(f"worst-case u needs m + 1 <= p, got m={m}, p={p}")
    u = np.zeros(p)
    if r == 0.0:
        u[0] = 1.0
        return u
    if m < 1:
        raise DomainError("worst-case u with r > 0 needs m >= 1")
    u[0] = math.sqrt(1.0 - r * r)
    u[1:m + 1] = r / math.sqrt(m)
    return u


def make_u(p: int, spec: USpec) -> np.ndarray:
    """
    Unit-norm sparse u of length p.

    spike: e_0. equal: s coordinates of 1/sqrt(s), s defaults to ceil(sqrt p).
    worst-case(m, r): u_0 = sqrt(1 - r^2), then m entries r/sqrt(m).
    explicit: given values on the support, normalized.
    """
    if p < 1:
        raise DomainError(f"p must be positive, got {p}")
    if spec.kind == USpecKind.SPIKE:
        u = np.zeros(p)
        u[0] = 1.0
        return u
    if spec.kind == USpecKind.EQUAL:
        return _equal(p, spec)
    if spec.kind == USpecKind.WORST_CASE:
        return _worst_case(p, spec)
    return _explicit(p, spec)
