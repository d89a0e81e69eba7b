"""
Unified data schemas for SEPCA
"""
import math
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


UNIT_NORM_TOL = 1e-12


class VProfileKind(str, Enum):
    """Right singular vector profiles"""
    RISE_FALL = "rise-fall"
    POWER_DECAY = "power-decay"
    UNIFORM = "uniform"
    CUSTOM = "custom"


class StatKind(str, Enum):
    """Row test statistics"""
    SUM = "sum"
    ELL1 = "ell1"
    ELL2 = "ell2"


class ThresholdVariant(str, Enum):
    """Threshold flavour for the sum statistic"""
    TABLE_BOUND = "table-bound"
    EXACT_SUM = "exact-sum"


class Algorithm(str, Enum):
    """Estimators known to the selection engine and the harness"""
    SUM = "sum"
    ELL1 = "ell1"
    ELL2 = "ell2"
    HC_SUM = "hc-sum"
    HC_ELL2 = "hc-ell2"
    FDR = "fdr"
    SVD_BASELINE = "svd-baseline"


SEPCA_ALGORITHMS = (
    Algorithm.SUM, Algorithm.ELL1, Algorithm.ELL2,
    Algorithm.HC_SUM, Algorithm.HC_ELL2, Algorithm.FDR,
)
FWER_ALGORITHMS = (Algorithm.SUM, Algorithm.ELL1, Algorithm.ELL2)
HC_ALGORITHMS = (Algorithm.HC_SUM, Algorithm.HC_ELL2)
# Boundaries of these depend on the row sum and need an equisigned v
SUM_FAMILY = (Algorithm.SUM, Algorithm.HC_SUM, Algorithm.FDR)
ELL2_FAMILY = (Algorithm.ELL2, Algorithm.HC_ELL2)


class HCRule(str, Enum):
    """How Higher Criticism turns per-rank values into a selected set"""
    CLOSURE = "closure"
    LITERAL = "literal"


class USpecKind(str, Enum):
    """Sparse left singular vector families"""
    EXPLICIT = "explicit"
    SPIKE = "spike"
    EQUAL = "equal"
    WORST_CASE = "worst-case"


class SigmaMode(str, Enum):
    """Noise scale handling in the harness"""
    KNOWN = "known"
    ESTIMATED = "estimated"


class OutputFormat(str, Enum):
    """Result table formats"""
    CSV = "csv"
    JSONL = "jsonl"


class MatrixFormat(str, Enum):
    """On-disk matrix formats"""
    CSV = "csv"
    BINARY = "binary"


def as_vector(value: Any) -> np.ndarray:
    """Coerce input to a finite, non-empty float64 vector"""
    array = np.asarray(value, dtype=np.float64)
    if array.ndim != 1 or array.size == 0:
        raise ValueError("expected a non-empty one-dimensional vector")
    if not np.all(np.isfinite(array)):
        raise ValueError("vector has non-finite entries")
    return array


def is_equisigned(vector: np.ndarray) -> bool:
    """All entries >= 0 or all entries <= 0"""
    return bool(np.all(vector >= 0) or np.all(vector <= 0))


class SignalModel(BaseModel):
    """Ground truth (theta, u, v, sigma) of X = theta u v^T + sigma G"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    theta: float = Field(..., ge=0)
    u: np.ndarray
    v: np.ndarray
    sigma: float = Field(..., ge=0)
    equisigned: bool = False

    @field_validator("u", "v", mode="before")
    @classmethod
    def _coerce(cls, value):
        return as_vector(value)

    @field_validator("u", "v")
    @classmethod
    def _unit_norm(cls, value: np.ndarray, info):
        norm = float(np.linalg.norm(value))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"{info.field_name} must have unit l2 norm, got {norm!r}")
        return value

    @model_validator(mode="after")
    def _check_equisigned(self):
        if self.equisigned and not is_equisigned(self.v):
            raise ValueError("v is flagged equisigned but has entries of both signs")
        return self

    @property
    def p(self) -> int:
        return int(self.u.size)

    @property
    def n(self) -> int:
        return int(self.v.size)

    @property
    def support(self) -> List[int]:
        """Row indices I where u is non-zero (0-based)"""
        return [int(i) for i in np.flatnonzero(self.u)]

    @property
    def sparsity(self) -> int:
        return len(self.support)


class DataMatrix(BaseModel):
    """Observed p x n matrix X"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _coerce(cls, value):
        array = np.asarray(value, dtype=np.float64)
        if array.ndim != 2 or array.size == 0:
            raise ValueError("data matrix must be two-dimensional and non-empty")
        if not np.all(np.isfinite(array)):
            raise ValueError("data matrix has non-finite entries")
        return array

    @property
    def rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def cols(self) -> int:
        return int(self.values.shape[1])

    def row(self, i: int) -> np.ndarray:
        return self.values[i]

    def restrict(self, indices: List[int]) -> np.ndarray:
        """Sub-matrix of the given rows, in the given order"""
        return self.values[np.asarray(indices, dtype=np.intp)]

    def scaled(self, factor: float) -> "DataMatrix":
        return DataMatrix(values=self.values * factor)


class VProfile(BaseModel):
    """Right singular vector profile of length n"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: VProfileKind
    n: int = Field(..., ge=1)
    values: Optional[np.ndarray] = None

    @field_validator("values", mode="before")
    @classmethod
    def _coerce(cls, value):
        return None if value is None else as_vector(value)

    @model_validator(mode="after")
    def _check_custom(self):
        if self.kind == VProfileKind.CUSTOM:
            if self.values is None:
                raise ValueError("custom profile needs explicit values")
            if self.values.size != self.n:
                raise ValueError(f"custom profile has {self.values.size} values, expected n={self.n}")
        return self


class ProfileVector(BaseModel):
    """Realized unit vector plus the factor that normalized it"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: VProfileKind
    values: np.ndarray
    scale: float = 1.0

    @property
    def equisigned(self) -> bool:
        return is_equisigned(self.values)


class USpec(BaseModel):
    """Recipe for a sparse unit left singular vector"""
    kind: USpecKind = USpecKind.SPIKE
    support: Optional[List[int]] = None  # explicit: 0-based rows
    values: Optional[List[float]] = None
    s: Optional[int] = Field(None, ge=1)  # equal: number of equal coordinates
    m: Optional[int] = Field(None, ge=0)  # worst-case: number of small coordinates
    r: Optional[float] = Field(None, ge=0, lt=1)  # worst-case: mass of the small coordinates

    @model_validator(mode="after")
    def _check_kind(self):
        if self.kind == USpecKind.EXPLICIT:
            if not self.support:
                raise ValueError("explicit u needs a non-empty support")
            if self.values is not None and len(self.values) != len(self.support):
                raise ValueError("explicit u: support and values differ in length")
        if self.kind == USpecKind.WORST_CASE and (self.m is None or self.r is None):
            raise ValueError("worst-case u needs m and r")
        return self


class Rank1SVD(BaseModel):
    """Top singular triplet"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    u_hat: np.ndarray
    v_hat: np.ndarray
    sigma1: float = Field(..., ge=0)
    iterations: int = 0
    degenerate: bool = False  # zero matrix: vectors are arbitrary


class SelectionResult(BaseModel):
    """Estimated support plus the row statistics behind it"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    selected: List[int]
    stats: np.ndarray
    threshold: Optional[float] = None
    algorithm: Algorithm
    pvalues: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return len(self.selected) == 0


class Estimate(BaseModel):
    """Second-stage rank-1 estimate embedded into R^p"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    u_hat: np.ndarray
    v_hat: np.ndarray
    theta_hat: float = Field(..., ge=0)
    selection: SelectionResult
    empty: bool = False  # nothing selected, u_hat is zero
    fallback: bool = False  # empty selection replaced by the full SVD


class HCResult(BaseModel):
    """Higher Criticism values over sorted p-values"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    pvalues: np.ndarray
    sorted_index: np.ndarray
    hc_values: np.ndarray  # NaN outside 1/p <= p_(i) <= 1/2
    selection_values: np.ndarray  # NaN where a rank can never qualify
    hc_max: Optional[float] = None
    threshold: float
    selected: List[int]
    rule: HCRule = HCRule.CLOSURE


class SupportMetrics(BaseModel):
    """Support recovery metrics"""
    hamming: int = Field(..., ge=0)
    tpr: float = Field(..., ge=0, le=1)
    fdr: float = Field(..., ge=0, le=1)
    tpr_undefined: bool = False


class NoiseEstimate(BaseModel):
    """Robust noise-scale estimate"""
    sigma: float = Field(..., ge=0)
    degenerate: bool = False
    coefficients: int = 0


class BoundarySpec(BaseModel):
    """Inputs of a detection boundary beta_crit"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    algorithm: Algorithm
    n: int = Field(..., ge=1)
    p: int = Field(..., ge=2)
    sigma: float = Field(1.0, gt=0)
    v: Optional[np.ndarray] = None
    beta_sparsity: Optional[float] = None
    sparsity: Optional[int] = Field(None, ge=1)
    k_hat: int = Field(1, ge=1)
    zeta: float = Field(1.02, gt=1)
    nu: float = Field(math.e ** 2, ge=math.e)

    @field_validator("v", mode="before")
    @classmethod
    def _coerce(cls, value):
        return None if value is None else as_vector(value)

    @model_validator(mode="after")
    def _check_fields(self):
        if self.algorithm == Algorithm.SVD_BASELINE:
            raise ValueError("svd-baseline has no detection boundary")
        if self.algorithm in HC_ALGORITHMS:
            if self.beta_sparsity is None:
                if self.sparsity is None:
                    raise ValueError(f"{self.algorithm.value} needs beta_sparsity or sparsity")
                self.beta_sparsity = sparsity_index(self.sparsity, self.p)
            elif not 0.5 < self.beta_sparsity < 1.0:
                raise ValueError("beta_sparsity must lie in (1/2, 1)")
        if self.algorithm not in ELL2_FAMILY:
            if self.v is None:
                raise ValueError(f"{self.algorithm.value} boundary depends on v")
            if self.v.size != self.n:
                raise ValueError(f"v has length {self.v.size}, expected n={self.n}")
        if self.algorithm == Algorithm.FDR and self.k_hat > self.p:
            raise ValueError("k_hat cannot exceed p")
        return self


BETA_CLAMP = 1e-6


def sparsity_index(s: int, p: int) -> float:
    """beta = 1 - log s / log p, clamped into (1/2, 1)"""
    beta = 1.0 - math.log(s) / math.log(p)
    return min(max(beta, 0.5 + BETA_CLAMP), 1.0 - BETA_CLAMP)


class GeometryReport(BaseModel):
    """Hyperspherical-cap comparison of two algorithms (sigma = 1)"""
    alg_a: Algorithm
    alg_b: Algorithm
    n: int
    p: int
    r: Optional[float] = None
    h: Optional[float] = None
    r_minus_h: Optional[float] = None
    cos_theta_lim: Optional[float] = None
    theta_lim: Optional[float] = None
    cap_exists: Optional[bool] = None
    table_condition: Optional[bool] = None
    ratio: float
    preferred: Optional[Algorithm] = None
    theta_v: Optional[float] = None
    v_in_cap: Optional[bool] = None


class ExperimentConfig(BaseModel):
    """Monte-Carlo grid over (n, theta)"""
    n_grid: List[int] = Field(..., min_length=1)
    theta_grid: List[float] = Field(..., min_length=1)
    p: int = Field(1000, ge=2)
    sigma: float = Field(1.0, gt=0)
    v_profile: VProfileKind = VProfileKind.RISE_FALL
    u_spec: USpec = Field(default_factory=USpec)
    algorithms: List[Algorithm] = Field(default_factory=lambda: list(SEPCA_ALGORITHMS))
    trials: int = Field(200, ge=1)
    seed: int = Field(0, ge=0)
    output: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV
    sigma_mode: SigmaMode = SigmaMode.KNOWN
    svd_fallback: bool = False
    hc_rule: HCRule = HCRule.CLOSURE
    sum_variant: ThresholdVariant = ThresholdVariant.EXACT_SUM
    zeta: float = Field(1.02, gt=1)
    nu: float = Field(math.e ** 2, ge=math.e)
    threads: Optional[int] = Field(None, ge=1)

    @field_validator("n_grid")
    @classmethod
    def _positive_n(cls, value: List[int]):
        if any(n < 1 for n in value):
            raise ValueError("n grid values must be positive")
        return value

    @field_validator("theta_grid")
    @classmethod
    def _positive_theta(cls, value: List[float]):
        # theta = 0 is the null cell
        if any(not theta >= 0 for theta in value):
            raise ValueError("theta grid values must be non-negative")
        return value

    @field_validator("v_profile")
    @classmethod
    def _builtin_profile(cls, value: VProfileKind):
        if value == VProfileKind.CUSTOM:
            raise ValueError("the harness regenerates v per n; use a built-in profile")
        return value


class ResultRow(BaseModel):
    """Aggregate over all trials of one (algorithm, n, theta) cell"""
    algorithm: Algorithm
    n: int
    theta: float
    trials: int
    mean_loss: float
    median_loss: float
    tpr: float
    fdr: float
    hamming: float
    selected_mean: float
    overlap_mean: float
