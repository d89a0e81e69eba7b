"""
Settings and experiment configuration loading
"""
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError
from .models.schemas import ExperimentConfig, HCRule, ThresholdVariant

logger = logging.getLogger(__name__)


class SepcaSettings(BaseSettings):
    """Process-wide defaults, overridable through SEPCA_* environment variables"""
    model_config = SettingsConfigDict(env_prefix="SEPCA_")

    threads: Optional[int] = Field(None, ge=1)
    log_level: str = "WARNING"
    default_trials: int = Field(200, ge=1)
    zeta: float = Field(1.02, gt=1)
    nu: float = Field(math.e ** 2, ge=math.e)
    hc_rule: HCRule = HCRule.CLOSURE
    sum_variant: ThresholdVariant = ThresholdVariant.EXACT_SUM


def get_settings() -> SepcaSettings:
    try:
        return SepcaSettings()
    except ValidationError as e:
        raise ConfigError(f"invalid SEPCA_* environment settings: {e}") from e


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """The `experiment` section of a YAML file (or the whole file if it has none)"""
    try:
        with open(path) as handle:
            data = yaml.safe_load(handle) or {}
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"config {path} is not valid YAML: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping")
    section = data.get("experiment", data)
    if not isinstance(section, dict):
        raise ConfigError(f"config {path}: experiment section must be a mapping")
    return section


def load_experiment_config(path: Optional[Union[str, Path]] = None,
                           overrides: Optional[Dict[str, Any]] = None,
                           settings: Optional[SepcaSettings] = None) -> ExperimentConfig:
    """Settings defaults, then the file, then non-None overrides"""
    settings = settings or get_settings()
    merged: Dict[str, Any] = {
        "trials": settings.default_trials,
        "zeta": settings.zeta,
        "nu": settings.nu,
        "hc_rule": settings.hc_rule,
        "sum_variant": settings.sum_variant,
        "threads": settings.threads,
    }
    if path is not None:
        merged.update(read_config_file(path))
    merged.update({key: value for key, value in (overrides or {}).items() if value is not None})
    try:
        return ExperimentConfig(**merged)
    except ValidationError as e:
        raise ConfigError(f"invalid experiment configuration: {e}") from e
