"""
Monte-Carlo experiment harness and theory curves
"""
import hashlib
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..errors import MatrixIOError
from ..models.schemas import (
    SEPCA_ALGORITHMS, Algorithm, BoundarySpec, DataMatrix, ExperimentConfig, HC_ALGORITHMS,
    OutputFormat, ResultRow, SigmaMode, SignalModel, USpec, VProfile, VProfileKind,
    sparsity_index,
)
from ..simulators.base import SEED_LIMIT, generate_data
from ..simulators.profiles import make_v
from ..simulators.sparse_u import make_u
from .estimator import TwoStageEstimator
from .fdr import DEFAULT_NU, DEFAULT_ZETA
from .metrics import l2_loss, overlap, support_metrics
from .noise import estimate_sigma
from .theory import beta_crit

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "algorithm", "n", "theta", "trials", "mean_loss", "median_loss",
    "tpr", "fdr", "hamming", "selected_mean",
]
EXTRA_COLUMNS = ["overlap_mean"]


def derive_seed(root: int, cell: int, trial: int) -> int:
    """root XOR a 64-bit hash of (cell, trial)"""
    digest = hashlib.blake2b(f"{cell}:{trial}".encode(), digest_size=8).digest()
    return (int(root) ^ int.from_bytes(digest, "little")) % SEED_LIMIT


class ExperimentRunner:
    """Runs every algorithm on every (n, theta) cell and aggregates the trials"""

    def __init__(self, config: ExperimentConfig, threads: Optional[int] = None):
        self.config = config
        self.threads = config.threads or threads
        self.estimator = TwoStageEstimator(
            variant=config.sum_variant, hc_rule=config.hc_rule, zeta=config.zeta,
            nu=config.nu, svd_fallback=config.svd_fallback,
        )
        self.u = make_u(config.p, config.u_spec)
        self._v_cache: Dict[int, np.ndarray] = {}

    def cells(self) -> List[Tuple[int, int, float]]:
        """(cell index, n, theta) over the grid"""
        grid = [(n, theta) for n in self.config.n_grid for theta in self.config.theta_grid]
        return [(index, n, theta) for index, (n, theta) in enumerate(grid)]

    def v_for(self, n: int) -> np.ndarray:
        if n not in self._v_cache:
            self._v_cache[n] = make_v(VProfile(kind=self.config.v_profile, n=n))
        return self._v_cache[n]

    def run_trial(self, cell: int, n: int, theta: float, trial: int) -> List[Dict[str, Any]]:
        """One data draw, every algorithm on it"""
        config = self.config
        model = SignalModel(theta=theta, u=self.u, v=self.v_for(n), sigma=config.sigma,
                            equisigned=True)
        matrix = generate_data(model, derive_seed(config.seed, cell, trial))
        sigma = self._sigma_for(matrix)
        support = model.support

        records = []
        for algorithm in config.algorithms:
            estimate = self.estimator.estimate(matrix, algorithm, sigma)
            support_stats = support_metrics(support, estimate.selection.selected, config.p)
            records.append({
                "algorithm": algorithm.value,
                "n": n,
                "theta": theta,
                "trial": trial,
                "loss": l2_loss(model.u, estimate.u_hat),
                "overlap": overlap(model.u, estimate.u_hat),
                "tpr": support_stats.tpr,
                "fdr": support_stats.fdr,
                "hamming": support_stats.hamming,
                "selected": len(estimate.selection.selected),
            })
        return records

    def _sigma_for(self, matrix: DataMatrix) -> float:
        if self.config.sigma_mode == SigmaMode.KNOWN:
            return self.config.sigma
        estimate = estimate_sigma(matrix)
        if estimate.degenerate:
            logger.warning("degenerate noise estimate, using the configured sigma")
            return self.config.sigma
        return estimate.sigma

    def run(self) -> pd.DataFrame:
        """Aggregated result table, sorted by (algorithm, n, theta)"""
        records: List[Dict[str, Any]] = []
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            for cell, n, theta in self.cells():
                logger.info("cell %d: n=%d theta=%g (%d trials)", cell, n, theta, self.config.trials)
                trials = range(self.config.trials)
                for batch in pool.map(lambda t: self.run_trial(cell, n, theta, t), trials):
                    records.extend(batch)
        return aggregate(pd.DataFrame(records))


def aggregate(trials: pd.DataFrame) -> pd.DataFrame:
    """Collapse per-trial records into one row per (algorithm, n, theta)"""
    ordered = trials.sort_values(["algorithm", "n", "theta", "trial"], kind="mergesort")
    grouped = ordered.groupby(["algorithm", "n", "theta"], sort=True)
    table = grouped.agg(
        trials=("trial", "size"),
        mean_loss=("loss", "mean"),
        median_loss=("loss", "median"),
        tpr=("tpr", "mean"),
        fdr=("fdr", "mean"),
        hamming=("hamming", "mean"),
        selected_mean=("selected", "mean"),
        overlap_mean=("overlap", "mean"),
    ).reset_index()
    return table[RESULT_COLUMNS + EXTRA_COLUMNS]


def run_experiment(config: ExperimentConfig, threads: Optional[int] = None) -> pd.DataFrame:
    """Run the grid and write the table when config.output is set"""
    table = ExperimentRunner(config, threads).run()
    if config.output:
        write_results(table, config.output, config.format)
    return table


def result_rows(table: pd.DataFrame) -> List[ResultRow]:
    return [ResultRow(**record) for record in table.to_dict(orient="records")]


def _json_value(value: Any) -> Any:
    if isinstance(value, Enum):
        value = value.value
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_results(table: pd.DataFrame, path: Union[str, Path],
                  fmt: OutputFormat = OutputFormat.CSV) -> None:
    """CSV (required columns first) or JSON lines, floats written to round-trip"""
    try:
        if OutputFormat(fmt) == OutputFormat.CSV:
            table.to_csv(path, index=False, float_format="%.17g")
        else:
            with open(path, "w", encoding="utf-8") as f:
                for record in table.to_dict(orient="records"):
                    f.write(json.dumps({key: _json_value(value) for key, value in record.items()}))
                    f.write("\n")
    except OSError as e:
        raise MatrixIOError(str(e), path=str(path)) from e
    logger.info("wrote %d result rows to %s", len(table), path)


def theory_curves(n_grid: Iterable[int], p: int = 1000,
                  profile: VProfileKind = VProfileKind.RISE_FALL,
                  algorithms: Sequence[Algorithm] = SEPCA_ALGORITHMS,
                  sigma: float = 1.0, sparsity: int = 1,
                  beta_sparsity: Optional[float] = None, k_hat: int = 1,
                  zeta: float = DEFAULT_ZETA, nu: float = DEFAULT_NU) -> pd.DataFrame:
    """
    beta_crit per algorithm over an n grid, v regenerated for each n.

    asymptotic marks boundaries whose (1 - o(1)) factor was set to 1.
    """
    if beta_sparsity is None:
        beta_sparsity = sparsity_index(sparsity, p)
    rows = []
    for algorithm in algorithms:
        algorithm = Algorithm(algorithm)
        for n in n_grid:
            v = make_v(VProfile(kind=profile, n=n))
            spec = BoundarySpec(algorithm=algorithm, n=n, p=p, sigma=sigma, v=v,
                                beta_sparsity=beta_sparsity, k_hat=k_hat, zeta=zeta, nu=nu)
            rows.append({
                "algorithm": algorithm.value,
                "n": n,
                "beta_crit": beta_crit(spec),
                "asymptotic": algorithm in HC_ALGORITHMS or algorithm == Algorithm.FDR,
            })
    return pd.DataFrame(rows, columns=["algorithm", "n", "beta_crit", "asymptotic"])


def null_selection_rate(algorithm: Algorithm, p: int, n: int, trials: int, seed: int = 0,
                        sigma: float = 1.0, threads: Optional[int] = None,
                        estimator: Optional[TwoStageEstimator] = None) -> float:
    """Fraction of noise-only draws in which anything is selected"""
    estimator = estimator or TwoStageEstimator()
    algorithm = Algorithm(algorithm)
    model = SignalModel(theta=0.0, u=make_u(p, USpec()),
                        v=np.full(n, 1.0 / math.sqrt(n)), sigma=sigma)

    def selects_any(trial: int) -> bool:
        matrix = generate_data(model, derive_seed(seed, 0, trial))
        return not estimator.select(matrix, algorithm, sigma).empty

    with ThreadPoolExecutor(max_workers=threads) as pool:
        hits = sum(pool.map(selects_any, range(trials)))
    rate = hits / trials
    logger.info("%s null selection rate: %d/%d = %.5f", algorithm.value, hits, trials, rate)
    return rate
