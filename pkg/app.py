"""
Command-line entry point: verify one case, export matrices, or sweep a grid of cases.

Exit codes: 0 all gates pass, 2 usage or configuration error, 3 gate failure.
"""
from __future__ import annotations
import argparse
import os
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

from algebra.rootdata import RootDataError, Weight, build_root_datum
from catalog.presets import DEFAULT_CATALOG
from catalog.run_config import Gates, RunConfig, RunConfigValidationError
from flagverify.context import FlagVerificationError, context_from_config
from flagverify.operators import k4_minus, x_operator
from flagverify.runner import UnknownSuiteError, run_catalog
from flagverify.suites import registry
from instrumentation import instrumentation, logger
from reports import Report, ReportManager, export_matrices, render_report
from representations.repmod import ModuleConstructionError, build_irrep, generator_matrices
from representations.rmatrix import r_action

load_dotenv()

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_GATE = 3

DEFAULT_WORKERS = int(os.getenv("QFLAG_WORKERS", "1"))

USAGE_ERRORS = (
    RunConfigValidationError,
    RootDataError,
    ModuleConstructionError,
    UnknownSuiteError,
    argparse.ArgumentTypeError,
)


def parse_nodes(text: str) -> List[int]:
    """'1,3' -> [1, 3]; '' -> []."""
    text = text.strip()
    if not text:
        return []
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated node numbers, got {text!r}")


def parse_subset_grid(text: str) -> List[List[int]]:
    """'1;2;1,2' -> [[1], [2], [1, 2]]; an empty group stands for S = {}."""
    if not text.strip():
        raise argparse.ArgumentTypeError("subset grid is empty")
    return [parse_nodes(group) for group in text.split(";")]


def parse_q_grid(text: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated q values, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("q grid is empty")
    return values


def parse_weight(text: str, rank: int) -> Weight:
    coords = parse_nodes(text)
    if len(coords) != rank:
        raise argparse.ArgumentTypeError(f"weight {text!r} needs {rank} coordinates")
    return Weight(tuple(coords))


def _add_case_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON run config; command-line flags are ignored when given")
    parser.add_argument("--type", dest="lie_type", default="A", help="Lie type (A, B, C, D, G)")
    parser.add_argument("--rank", type=int, default=1)
    parser.add_argument("--q", type=float, default=0.5)
    parser.add_argument("--subset", type=parse_nodes, default=[], help="1-based nodes of S, e.g. '1,2'")
    parser.add_argument("--trunc", dest="N", type=int, default=16, help="Fock truncation per leg")
    parser.add_argument("--block", dest="M", type=int, default=8, help="safe block per leg")
    parser.add_argument("--word", type=parse_nodes, default=None, help="reduced word of w, 1-based")
    parser.add_argument("--suites", default=None,
                        help="comma separated suites; available: " + ", ".join(registry.get_available_suites()))
    parser.add_argument("--samples", type=int, default=20)
    parser.add_argument("--battery-depth", dest="battery_depth", type=int, default=4)
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Numerical verification of quantum flag manifold relations.")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run the verification suites on one case")
    _add_case_arguments(verify)
    verify.add_argument("--output", help="also write the rendered report here")
    verify.add_argument("--format", choices=["json", "txt", "markdown"], default="txt")

    matrices = sub.add_parser("matrices", help="export matrices: irrep:1,0  rmatrix:1,0;0,1  kop:1,0  xop:1")
    _add_case_arguments(matrices)
    matrices.add_argument("target")
    matrices.add_argument("--output", help="output JSON path (default matrices_<kind>.json)")

    sweep = sub.add_parser("sweep", help="run a q x S grid or the default catalog")
    _add_case_arguments(sweep)
    sweep.add_argument("--q-grid", dest="q_grid", type=parse_q_grid, default=None)
    sweep.add_argument("--subset-grid", dest="subset_grid", type=parse_subset_grid, default=None)
    sweep.add_argument("--catalog", action="store_true", help="run DEFAULT_CATALOG")
    sweep.add_argument("--include-optional", action="store_true", help="with --catalog, add optional cases")
    sweep.add_argument("--workers", type=int, default=DEFAULT_WORKERS)
    sweep.add_argument("--output", help="also write the rendered report here")
    sweep.add_argument("--format", choices=["json", "txt", "markdown"], default="txt")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config:
        return RunConfig.load_from_file(args.config)
    suites = None if args.suites is None else [s.strip() for s in args.suites.split(",") if s.strip()]
    return RunConfig(
        lie_type=args.lie_type.upper(),
        rank=args.rank,
        q=args.q,
        subset=args.subset,
        N=args.N,
        M=args.M,
        gates=Gates(),
        battery_depth=args.battery_depth,
        samples=args.samples,
        seed=args.seed,
        word=args.word,
        suites=suites,
        q_grid=list(getattr(args, "q_grid", None) or []),
        subset_grid=list(getattr(args, "subset_grid", None) or []),
        output=args.output,
        workers=getattr(args, "workers", 1),
    )


def _finish(report: Report, config: RunConfig, fmt: str) -> int:
    manager = ReportManager()
    path = manager.save_report(report)
    text = render_report(report, fmt)
    print(render_report(report, "txt"))
    if config.output:
        directory = os.path.dirname(config.output)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(config.output, 'w', encoding='utf-8') as f:
            f.write(text)
    logger.info("report %s saved to %s: %s", report.id, path, report.get_summary())
    return EXIT_OK if report.passed else EXIT_GATE


def _system_info() -> dict:
    info = instrumentation.get_system_info()
    return {"platform": info.platform, "python_version": info.python_version, "cpu_count": info.cpu_count}


def cmd_verify(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    cases = run_catalog([config], workers=1)
    report = Report.new(config.to_dict(), cases, _system_info())
    return _finish(report, config, args.format)


def matrices_for(config: RunConfig, target: str) -> Dict[str, np.ndarray]:
    """Named matrices for a ``kind:argument`` target."""
    kind, _, arg = target.partition(":")
    datum = build_root_datum(config.lie_type, config.rank, config.q)
    if kind == "irrep":
        return generator_matrices(build_irrep(datum, parse_weight(arg, datum.rank)))
    if kind == "rmatrix":
        left, sep, right = arg.partition(";")
        if not sep:
            raise argparse.ArgumentTypeError("rmatrix target needs two weights separated by ';'")
        action = r_action(build_irrep(datum, parse_weight(left, datum.rank)),
                          build_irrep(datum, parse_weight(right, datum.rank)))
        return {"R": action.R, "Q": np.diag(action.Q), "Rtilde": action.Rtilde}
    if kind == "kop":
        ctx = context_from_config(config)
        kop = k4_minus(ctx, parse_weight(arg, datum.rank))
        out = {"diagonal": kop.full_diagonal()[None, :], "scale": np.array([[kop.scale]])}
        for k, d in enumerate(kop.diagonals):
            out[f"leg{k + 1}"] = d[None, :]
        return out
    if kind == "xop":
        nodes = parse_nodes(arg)
        if len(nodes) != 1 or not 1 <= nodes[0] <= datum.rank:
            raise argparse.ArgumentTypeError(f"xop target needs one node in 1..{datum.rank}")
        ctx = context_from_config(config)
        x = x_operator(ctx, nodes[0] - 1)
        return {"x_plus": ctx.block.dense(x.plus), "x_minus": ctx.block.dense(x.minus)}
    raise argparse.ArgumentTypeError(f"unknown matrix target {target!r}")


def cmd_matrices(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    matrices = matrices_for(config, args.target)
    path = args.output or f"matrices_{args.target.partition(':')[0]}.json"
    export_matrices(path, matrices)
    print(f"wrote {', '.join(matrices)} to {path}")
    return EXIT_OK


def sweep_configs(args: argparse.Namespace) -> List[RunConfig]:
    base = config_from_args(args)
    if args.catalog:
        presets = [p for p in DEFAULT_CATALOG if args.include_optional or not p.optional]
        configs = []
        for preset in presets:
            for q in base.q_grid or [base.q]:
                configs.append(preset.to_config(
                    q=q, N=base.N, M=base.M, gates=base.gates, battery_depth=base.battery_depth,
                    samples=base.samples, seed=base.seed, suites=base.suites,
                ))
        return configs
    if not base.q_grid and not base.subset_grid:
        raise RunConfigValidationError("sweep needs --q-grid, --subset-grid or --catalog")
    return base.expand_cases()


def cmd_sweep(args: argparse.Namespace) -> int:
    configs = sweep_configs(args)
    workers = args.workers if not args.config else configs[0].workers
    cases = run_catalog(configs, workers=workers)
    summary = configs[0].to_dict()
    summary["cases"] = [c.case_id for c in configs]
    report = Report.new(summary, cases, _system_info())
    return _finish(report, configs[0], args.format)


COMMANDS = {
    "verify": cmd_verify,
    "matrices": cmd_matrices,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except USAGE_ERRORS as e:
        print(f"[error] {e}", file=sys.stderr)
        return EXIT_USAGE
    except FlagVerificationError as e:
        logger.error("verification aborted: %s", e)
        print(f"[error] {e}", file=sys.stderr)
        return EXIT_GATE


if __name__ == "__main__":
    sys.exit(main())
