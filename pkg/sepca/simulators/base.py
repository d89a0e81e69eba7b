"""
Base classes for signal simulation
"""
import logging
from abc import ABC, abstractmethod

import numpy as np

from ..errors import DomainError
from ..models.schemas import UNIT_NORM_TOL, DataMatrix, ProfileVector, SignalModel, VProfileKind

logger = logging.getLogger(__name__)

SEED_LIMIT = 2 ** 64


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; one stream per 64-bit seed"""
    if not 0 <= int(seed) < SEED_LIMIT:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return np.random.Generator(np.random.Philox(int(seed)))


def generate_data(model: SignalModel, seed: int) -> DataMatrix:
    """
    Draw X = theta u v^T + sigma G with G_ij ~ N(0, 1/n).

    The same (model, seed) pair always yields the same matrix.
    """
    for name, vector in (("u", model.u), ("v", model.v)):
        norm = float(np.linalg.norm(vector))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise DomainError(f"{name} must have unit l2 norm, got {norm!r}")

    rng = make_rng(seed)
    noise = rng.standard_normal((model.p, model.n)) / np.sqrt(model.n)
    values = model.theta * np.outer(model.u, model.v) + model.sigma * noise
    return DataMatrix(values=values)


class VectorProfile(ABC):
    """Abstract base class for right singular vector profiles"""

    kind: VProfileKind

    def __init__(self, n: int):
        if n < 1:
            raise DomainError(f"profile length must be positive, got {n}")
        self.n = n

    @property
    def index(self) -> np.ndarray:
        """Positions k = 1..n"""
        return np.arange(1, self.n + 1, dtype=np.float64)

    @abstractmethod
    def raw(self) -> np.ndarray:
        """Un-normalized profile values"""
        pass

    def realize(self) -> ProfileVector:
        """Normalize the raw profile to unit l2 norm"""
        values = np.asarray(self.raw(), dtype=np.float64)
        norm = float(np.linalg.norm(values))
        if not norm > 0 or not np.isfinite(norm):
            raise DomainError(f"{self.kind.value} profile has zero norm")
        return ProfileVector(kind=self.kind, values=values / norm, scale=1.0 / norm)
