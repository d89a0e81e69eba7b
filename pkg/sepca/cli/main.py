"""
SEPCA command-line interface
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from ..config import get_settings, load_experiment_config
from ..core.bench import null_selection_rate, run_experiment, theory_curves, write_results
from ..core.estimator import TwoStageEstimator
from ..core.geometry import geometry_compare
from ..core.noise import estimate_sigma
from ..core.row_stats import threshold_constants
from ..errors import ConfigError, SepcaError
from ..io.matrix_io import read_matrix, write_matrix
from ..models.schemas import (
    SEPCA_ALGORITHMS, Algorithm, DataMatrix, HCRule, MatrixFormat, OutputFormat, SignalModel,
    ThresholdVariant, USpec, USpecKind, VProfile, VProfileKind,
)
from ..simulators.base import generate_data
from ..simulators.profiles import make_v
from ..simulators.sparse_u import make_u

logger = logging.getLogger("sepca")

EXIT_OK = 0
EXIT_CONFIG = 2


def _choices(enum_class) -> List[str]:
    return [member.value for member in enum_class]


BUILTIN_PROFILES = [kind.value for kind in VProfileKind if kind != VProfileKind.CUSTOM]


def _int_list(text: str) -> List[int]:
    return [int(item) for item in text.split(",") if item.strip()]


def _emit(payload: Any) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def setup_logging(level: str) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("sepca")
    root.handlers[:] = [handler]
    root.setLevel(level.upper())
    root.propagate = False


def _load(path: str, fmt: Optional[str]) -> DataMatrix:
    return read_matrix(path, MatrixFormat(fmt) if fmt else None)


def _sigma(args: argparse.Namespace, matrix: DataMatrix) -> float:
    if args.sigma is not None:
        return args.sigma
    estimate = estimate_sigma(matrix)
    if estimate.degenerate:
        raise ConfigError("noise estimate is degenerate; pass --sigma")
    logger.info("estimated sigma = %.6g", estimate.sigma)
    return estimate.sigma


def _estimator(args: argparse.Namespace) -> TwoStageEstimator:
    return TwoStageEstimator(
        variant=args.variant, hc_rule=args.hc_rule, zeta=args.zeta, nu=args.nu,
        kappa_u=args.kappa_u, svd_fallback=getattr(args, "svd_fallback", False),
    )


def cmd_generate(args: argparse.Namespace) -> int:
    u_spec = USpec(kind=args.u_kind, support=args.support, s=args.s, m=args.m, r=args.r)
    u = make_u(args.p, u_spec)
    v = make_v(VProfile(kind=args.profile, n=args.n))
    model = SignalModel(theta=args.theta, u=u, v=v, sigma=args.sigma, equisigned=True)
    matrix = generate_data(model, args.seed)
    write_matrix(matrix, args.output, MatrixFormat(args.format) if args.format else None)
    _emit({"output": args.output, "p": model.p, "n": model.n, "support": model.support})
    return EXIT_OK


def cmd_select(args: argparse.Namespace) -> int:
    matrix = _load(args.input, args.input_format)
    sigma = _sigma(args, matrix)
    result = _estimator(args).select(matrix, args.algorithm, sigma)
    _emit({
        "algorithm": result.algorithm.value,
        "sigma": sigma,
        "threshold": result.threshold,
        "selected": result.selected,
        "indexing": "0-based",
        "metadata": result.metadata,
    })
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    matrix = _load(args.input, args.input_format)
    sigma = _sigma(args, matrix)
    estimate = _estimator(args).estimate(matrix, args.algorithm, sigma)
    _emit({
        "algorithm": estimate.selection.algorithm.value,
        "sigma": sigma,
        "selected": estimate.selection.selected,
        "indexing": "0-based",
        "theta_hat": estimate.theta_hat,
        "u_hat": estimate.u_hat.tolist(),
        "v_hat": estimate.v_hat.tolist(),
        "empty": estimate.empty,
        "fallback": estimate.fallback,
    })
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    if args.null:
        rate = null_selection_rate(args.null, args.p, args.n, args.trials or 1000,
                                   seed=args.seed or 0, threads=args.threads)
        _emit({"algorithm": args.null, "p": args.p, "n": args.n, "rate": rate})
        return EXIT_OK
    overrides: Dict[str, Any] = {
        "trials": args.trials, "seed": args.seed, "output": args.output,
        "format": args.format, "threads": args.threads,
    }
    if args.sigma_mode:
        overrides["sigma_mode"] = args.sigma_mode
    if args.svd_fallback:
        overrides["svd_fallback"] = True
    config = load_experiment_config(args.config, overrides)
    table = run_experiment(config)
    if not config.output:
        sys.stdout.write(table.to_csv(index=False, float_format="%.17g"))
    return EXIT_OK


def cmd_theory(args: argparse.Namespace) -> int:
    if args.constants:
        _emit(threshold_constants(args.p, args.kappa_u).model_dump())
        return EXIT_OK
    try:
        algorithms = [Algorithm(tag) for tag in args.algorithms]
    except ValueError as e:
        raise ConfigError(str(e)) from e
    table = theory_curves(
        args.n_grid, p=args.p, profile=args.profile, algorithms=algorithms,
        sigma=args.sigma, sparsity=args.sparsity, beta_sparsity=args.beta,
        k_hat=args.k_hat, zeta=args.zeta, nu=args.nu,
    )
    if args.output:
        write_results(table, args.output, args.format)
    else:
        sys.stdout.write(table.to_csv(index=False, float_format="%.17g"))
    return EXIT_OK


def cmd_geometry(args: argparse.Namespace) -> int:
    v = make_v(VProfile(kind=args.profile, n=args.n)) if args.profile else None
    report = geometry_compare(
        args.alg_a, args.alg_b, args.n, args.p, beta_sparsity=args.beta,
        sparsity=args.sparsity, k_hat=args.k_hat, zeta=args.zeta, nu=args.nu, v=v,
    )
    print(report.model_dump_json(indent=2))
    return EXIT_OK


def cmd_sigma(args: argparse.Namespace) -> int:
    estimate = estimate_sigma(_load(args.input, args.input_format))
    print(estimate.model_dump_json(indent=2))
    return EXIT_OK


def _add_penalty_flags(parser: argparse.ArgumentParser, settings) -> None:
    parser.add_argument("--zeta", type=float, default=settings.zeta, help="FDR penalty zeta > 1")
    parser.add_argument("--nu", type=float, default=settings.nu, help="FDR penalty nu >= e")


def _add_selection_flags(parser: argparse.ArgumentParser, settings) -> None:
    parser.add_argument("--input", required=True, help="matrix file (CSV or SEPCA1 binary)")
    parser.add_argument("--input-format", choices=_choices(MatrixFormat))
    parser.add_argument("--algorithm", choices=_choices(Algorithm), default=Algorithm.SUM.value)
    parser.add_argument("--sigma", type=float, help="noise scale; estimated from the data if omitted")
    parser.add_argument("--variant", choices=_choices(ThresholdVariant),
                        default=settings.sum_variant.value)
    parser.add_argument("--kappa-u", type=float)
    parser.add_argument("--hc-rule", choices=_choices(HCRule), default=settings.hc_rule.value)
    _add_penalty_flags(parser, settings)


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="sepca", description="Sparse Equisigned PCA")
    parser.add_argument("--log-level", default=settings.log_level)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="draw a synthetic data matrix")
    gen.add_argument("--p", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--theta", type=float, required=True)
    gen.add_argument("--sigma", type=float, default=1.0)
    gen.add_argument("--profile", choices=BUILTIN_PROFILES, default="rise-fall")
    gen.add_argument("--u-kind", choices=_choices(USpecKind), default=USpecKind.SPIKE.value)
    gen.add_argument("--support", type=_int_list, help="explicit u: comma-separated 0-based rows")
    gen.add_argument("--s", type=int)
    gen.add_argument("--m", type=int)
    gen.add_argument("--r", type=float)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--output", required=True)
    gen.add_argument("--format", choices=_choices(MatrixFormat))
    gen.set_defaults(handler=cmd_generate)

    sel = sub.add_parser("select", help="first-stage coordinate selection")
    _add_selection_flags(sel, settings)
    sel.set_defaults(handler=cmd_select)

    est = sub.add_parser("estimate", help="selection plus rank-1 SVD")
    _add_selection_flags(est, settings)
    est.add_argument("--svd-fallback", action="store_true")
    est.set_defaults(handler=cmd_estimate)

    bench = sub.add_parser("bench", help="Monte-Carlo experiment grid")
    bench.add_argument("--config", help="YAML experiment file")
    bench.add_argument("--trials", type=int)
    bench.add_argument("--seed", type=int)
    bench.add_argument("--output")
    bench.add_argument("--format", choices=_choices(OutputFormat))
    bench.add_argument("--threads", type=int, default=settings.threads)
    bench.add_argument("--sigma-mode", choices=["known", "estimated"])
    bench.add_argument("--svd-fallback", action="store_true")
    bench.add_argument("--null", choices=_choices(Algorithm),
                       help="only measure the noise-only selection rate of one algorithm")
    bench.add_argument("--p", type=int, default=200)
    bench.add_argument("--n", type=int, default=100)
    bench.set_defaults(handler=cmd_bench)

    theory = sub.add_parser("theory", help="detection boundaries over an n grid")
    theory.add_argument("--p", type=int, default=1000)
    theory.add_argument("--n-grid", type=_int_list, default=[100, 200, 500, 1000, 2000, 5000])
    theory.add_argument("--profile", choices=BUILTIN_PROFILES, default="rise-fall")
    theory.add_argument("--algorithms", type=lambda text: text.split(","),
                        default=[alg.value for alg in SEPCA_ALGORITHMS])
    theory.add_argument("--sigma", type=float, default=1.0)
    theory.add_argument("--sparsity", type=int, default=1)
    theory.add_argument("--beta", type=float)
    theory.add_argument("--k-hat", type=int, default=1)
    theory.add_argument("--kappa-u", type=float)
    theory.add_argument("--constants", action="store_true", help="print threshold constants for p")
    theory.add_argument("--output")
    theory.add_argument("--format", choices=_choices(OutputFormat), default="csv")
    _add_penalty_flags(theory, settings)
    theory.set_defaults(handler=cmd_theory)

    geo = sub.add_parser("geometry", help="cap geometry of two algorithms")
    geo.add_argument("--alg-a", choices=_choices(Algorithm), required=True)
    geo.add_argument("--alg-b", choices=_choices(Algorithm), required=True)
    geo.add_argument("--n", type=int, required=True)
    geo.add_argument("--p", type=int, required=True)
    geo.add_argument("--beta", type=float)
    geo.add_argument("--sparsity", type=int)
    geo.add_argument("--k-hat", type=int, default=1)
    geo.add_argument("--profile", choices=BUILTIN_PROFILES,
                     help="compare at this v profile")
    _add_penalty_flags(geo, settings)
    geo.set_defaults(handler=cmd_geometry)

    sig = sub.add_parser("sigma", help="estimate the noise scale of a matrix")
    sig.add_argument("--input", required=True)
    sig.add_argument("--input-format", choices=_choices(MatrixFormat))
    sig.set_defaults(handler=cmd_sigma)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code"""
    try:
        parser = build_parser()
    except SepcaError as e:
        print(f"sepca: {e}", file=sys.stderr)
        return e.exit_code
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    try:
        setup_logging(args.log_level)
    except ValueError:
        print(f"sepca: unknown log level {args.log_level!r}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return args.handler(args)
    except SepcaError as e:
        logger.error("%s", e)
        return e.exit_code
    except ValidationError as e:
        logger.error("invalid input: %s", e)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
