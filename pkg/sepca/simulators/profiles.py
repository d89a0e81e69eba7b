"""
Right singular vector profiles
"""
import logging
from typing import Dict, Type

import numpy as np

from ..errors import DomainError
from ..models.schemas import UNIT_NORM_TOL, ProfileVector, VProfile, VProfileKind
from .base import VectorProfile

logger = logging.getLogger(__name__)


class RiseFallProfile(VectorProfile):
    """
    Rise-and-fall profile v_k ~ exp(-5k/n)|sin(4k/n)|
    Mass spread over many coordinates; favours the sum statistic
    """

    kind = VProfileKind.RISE_FALL

    def raw(self) -> np.ndarray:
        k = self.index
        return np.exp(-5.0 * k / self.n) * np.abs(np.sin(4.0 * k / self.n))


class PowerDecayProfile(VectorProfile):
    """
    Power-law decay v_k ~ 1/k^2
    Concentrated near the first column; ||v||_1 stays bounded in n
    """

    kind = VProfileKind.POWER_DECAY

    def raw(self) -> np.ndarray:
        return 1.0 / self.index ** 2


class UniformProfile(VectorProfile):
    """Flat profile v_k = 1/sqrt(n)"""

    kind = VProfileKind.UNIFORM

    def raw(self) -> np.ndarray:
        return np.ones(self.n)


class CustomProfile(VectorProfile):
    """User-supplied vector, rescaled to unit norm with a logged warning"""

    kind = VProfileKind.CUSTOM

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=np.float64)
        super().__init__(values.size)
        self.values = values

    def raw(self) -> np.ndarray:
        return self.values

    def realize(self) -> ProfileVector:
        norm = float(np.linalg.norm(self.values))
        if norm == 0.0:
            raise DomainError("custom v profile has zero norm")
        result = super().realize()
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            logger.warning("custom v profile rescaled by %.17g to unit norm", result.scale)
        return result


PROFILE_CLASSES: Dict[VProfileKind, Type[VectorProfile]] = {
    VProfileKind.RISE_FALL: RiseFallProfile,
    VProfileKind.POWER_DECAY: PowerDecayProfile,
    VProfileKind.UNIFORM: UniformProfile,
}


def create_profile(profile: VProfile) -> VectorProfile:
    """Factory function to create a profile from its description"""
    if profile.kind == VProfileKind.CUSTOM:
        return CustomProfile(profile.values)
    profile_class = PROFILE_CLASSES.get(profile.kind)
    if profile_class is None:
        raise DomainError(f"Unknown v profile: {profile.kind}")
    return profile_class(profile.n)


def make_v(profile: VProfile) -> np.ndarray:
    """Unit-norm right singular vector for a profile"""
    return create_profile(profile).realize().values
