"""Command-line interface of the copula-QAOA toolkit.

Subcommands generate instances, run the classical solvers, scan unit
commitment over the marginal cost, simulate, train and grid-search
copula-QAOA circuits, and recompute reports from saved artifacts.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from copula_qaoa.application.config import (
    KNAPSACK_METHODS,
    SCAN_SOLVERS,
    ExperimentConfig,
    load_experiment_config,
)
from copula_qaoa.application.facades import ExperimentFacade, ExperimentResult
from copula_qaoa.application.metrics import build_metrics_report
from copula_qaoa.domain.errors import CopulaQaoaError, InvalidArgumentError
from copula_qaoa.infrastructure.generators import gen_inverse_strongly_correlated, gen_random_uc
from copula_qaoa.infrastructure.repositories import (
    dump_json,
    load_instance,
    load_samples,
    save_instance,
    save_uc,
)
from copula_qaoa.infrastructure.solvers import STOPPING_RULES, lazy_greedy
from copula_qaoa.infrastructure.unit_commitment import SCAN_MODES

logger = logging.getLogger(__name__)


def _floats(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="root seed of every random draw")
    common.add_argument("--shots", type=int, help="shots of the final measurement")
    common.add_argument("--out", help="output file (gen) or run directory")
    common.add_argument("--instance", dest="instance_path", help="instance file to load")
    common.add_argument("--config", help="JSON experiment config; flags override it")
    common.add_argument("-n", "--n", type=int, help="size of a generated instance")
    common.add_argument("--workers", type=int, help="threads for independent evaluations")
    common.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    return common


def _add_circuit_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=float, help="warm-start steepness")
    parser.add_argument("--theta", type=float, help="copula correlation in [-1, 1]")
    parser.add_argument(
        "--stopping-rule", choices=STOPPING_RULES, help="greedy stopping ratio"
    )
    parser.add_argument("--paired-init", action="store_true", default=None)
    parser.add_argument("--top-k", type=int, help="top-k cutoff of the approximation ratio")


def _add_training_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--depth", type=int, help="layers to train")
    parser.add_argument("--restarts", type=int, help="restarts per layer")
    parser.add_argument(
        "--budget", dest="optimizer_budget", type=int, help="evaluations per restart"
    )
    parser.add_argument("--shots-per-eval", type=int, help="shots per sampled evaluation")
    parser.add_argument("--objective-mode", choices=("auto", "exact", "sampled"))


def build_parser() -> argparse.ArgumentParser:
    """Build the ``copqaoa`` argument parser."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="copqaoa", description="Copula-QAOA knapsack and unit-commitment toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="generate an instance file")
    gen.add_argument("--kind", choices=("isc", "uc"), default="isc")
    gen.add_argument("--load-factor", type=float, default=0.5)

    solve = sub.add_parser("solve", parents=[common], help="solve with a classical method")
    solve.add_argument("--method", choices=KNAPSACK_METHODS + ("random",), default="greedy")
    solve.add_argument("--time-budget", type=float, help="branch-and-bound budget in seconds")

    scan = sub.add_parser("uc-scan", parents=[common], help="unit commitment via D scan")
    scan.add_argument("--points", dest="d_points", type=int, help="marginal-cost grid size")
    scan.add_argument("--solver", dest="scan_solver", choices=SCAN_SOLVERS)
    scan.add_argument("--mode", dest="scan_mode", choices=SCAN_MODES)
    scan.add_argument(
        "--no-refine", dest="scan_refine", action="store_false", default=None,
        help="keep the plain grid minimum",
    )
    scan.add_argument("--load-factor", type=float)
    scan.add_argument("--time-budget", type=float)
    _add_circuit_options(scan)
    _add_training_options(scan)

    run = sub.add_parser("qaoa-run", parents=[common], help="sample fixed-angle circuits")
    _add_circuit_options(run)
    run.add_argument("--gammas", type=_floats, help="comma-separated cost angles")
    run.add_argument("--betas", type=_floats, help="comma-separated mixer angles")

    train = sub.add_parser("qaoa-train", parents=[common], help="layer-wise training")
    _add_circuit_options(train)
    _add_training_options(train)

    grid = sub.add_parser("qaoa-grid", parents=[common], help="depth-1 grid search")
    _add_circuit_options(grid)
    _add_training_options(grid)
    grid.add_argument("--grid-size", type=int)
    grid.add_argument("--grid-shots", type=int, help="shots per cell; exact when omitted")
    grid.add_argument("--gamma-max", type=float)
    grid.add_argument("--beta-max", type=float)
    grid.add_argument("--train", action="store_true", help="train from the grid argmax")

    report = sub.add_parser("report", parents=[common], help="metrics from saved samples")
    report.add_argument("--samples", required=True, help="samples CSV")
    report.add_argument("--c-star", type=float, help="optimal value; defaults to exact")
    report.add_argument("--top-k", type=int)

    replay = sub.add_parser("replay", parents=[common], help="rerun a manifest")
    replay.add_argument("manifest", help="manifest.json of an earlier run")
    return parser


# Argument names that are not ExperimentConfig fields
_NON_CONFIG = {"command", "config", "verbose", "kind", "train", "samples", "c_star", "manifest"}


def _experiment_config(args: argparse.Namespace, method: str) -> ExperimentConfig:
    overrides: Dict[str, Any] = {
        key: value
        for key, value in vars(args).items()
        if key not in _NON_CONFIG and value is not None
    }
    overrides["method"] = method
    for name in ("gammas", "betas"):
        if name in overrides:
            overrides[name] = tuple(overrides[name])
    if args.command == "qaoa-grid":
        overrides["grid"] = True
        if not args.train:
            overrides["depth"] = 0
        elif not args.config:
            overrides.setdefault("depth", 1)
    if args.command == "qaoa-train" and not args.config:
        overrides.setdefault("depth", 1)
    if args.config:
        return load_experiment_config(args.config, overrides)
    return ExperimentConfig.from_dict(overrides)


def _print_result(result: ExperimentResult) -> None:
    print(f"run directory: {result.out}")
    if result.report is not None:
        report = result.report
        print(f"  best value: {report.best_value} ({report.best_bitstring})")
        print(f"  approximation ratio: {report.approximation_ratio:.6f}")
        print(f"  valid ratio: {report.valid_ratio:.6f}")
        for method, ratio in report.best_ratios.items():
            print(f"  best / {method}: {ratio:.6f}")
    else:
        print(dump_json(result.summary), end="")
    for stage, seconds in sorted(result.timings.items()):
        print(f"  {stage}: {seconds:.3f}s")


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.seed is None or args.n is None or args.out is None:
        raise InvalidArgumentError("gen needs --n, --seed and --out")
    target = Path(args.out)
    if args.kind == "uc":
        uc = gen_random_uc(args.n, args.seed, args.load_factor)
        save_uc(uc, target)
        print(f"wrote {uc.instance_id}: {uc.n} units, load {uc.load:.6g} -> {target}")
    else:
        instance = gen_inverse_strongly_correlated(args.n, args.seed)
        save_instance(instance, target)
        print(
            f"wrote {instance.instance_id}: {instance.n} items, "
            f"capacity {instance.capacity:g} -> {target}"
        )
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    if args.instance_path is None:
        raise InvalidArgumentError("report needs --instance")
    instance = load_instance(args.instance_path)
    samples = load_samples(args.samples)
    facade = ExperimentFacade()
    if args.c_star is not None:
        baselines = {"greedy": lazy_greedy(instance).value}
        c_star = args.c_star
    else:
        config = ExperimentConfig(method="greedy", seed=args.seed or 0)
        baselines, c_star = facade.reference_values(instance, config)
    report = build_metrics_report(samples, instance, c_star, baselines, args.top_k)
    print(dump_json(report.to_dict()), end="")
    return 0


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "gen":
        return _cmd_gen(args)
    if args.command == "report":
        return _cmd_report(args)
    facade = ExperimentFacade()
    if args.command == "replay":
        result = facade.replay_manifest(args.manifest, args.out)
    else:
        methods = {
            "uc-scan": "uc-scan",
            "qaoa-run": "copqaoa",
            "qaoa-train": "copqaoa",
            "qaoa-grid": "copqaoa",
        }
        method = args.method if args.command == "solve" else methods[args.command]
        result = facade.run_experiment(_experiment_config(args, method))
    _print_result(result)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return the process exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return _dispatch(args)
    except (CopulaQaoaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
