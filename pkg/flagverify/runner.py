"""
Running suites against cases and collecting reports.
"""
from __future__ import annotations
import time
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence

from catalog.run_config import RunConfig
from instrumentation import instrumentation, log_case_finished, log_check_result, logger
from reports import CaseReport, CheckResult

from .context import FlagContext, context_from_config
from .operators import epsilon_fit
from .suites import registry


class UnknownSuiteError(ValueError):
    pass


def resolve_suites(names: Optional[Sequence[str]] = None) -> List[str]:
    """Registered suite names, in registration order; ``None`` selects all."""
    available = registry.get_available_suites()
    if names is None:
        return available
    unknown = [n for n in names if n not in available]
    if unknown:
        raise UnknownSuiteError(f"unknown suites {unknown}; available: {available}")
    return [n for n in available if n in names]


def _new_case_report(ctx: FlagContext) -> CaseReport:
    info = ctx.summary()
    return CaseReport(
        case_id=info["case_id"],
        lie_type=info["lie_type"],
        rank=info["rank"],
        q=info["q"],
        subset=info["subset"],
        word=info["word"],
        N=info["N"],
        M=info["M"],
        eps_target=info["eps_target"],
    )


def run_suite(ctx: FlagContext, suites: Optional[Sequence[str]] = None) -> CaseReport:
    """Run the named suites on one context. A check that raises is recorded as failed."""
    report = _new_case_report(ctx)
    start = time.time()
    for suite_name in resolve_suites(suites):
        suite = registry.get_suite(suite_name)
        for spec in suite.checks(ctx):
            name = f"{suite_name}.{spec.name}"
            gate = spec.gate_value(ctx)
            check_start = time.time()
            try:
                residual, detail = spec.measure(ctx)
                result = CheckResult.from_residual(name, residual, gate, detail)
                error = None
            except Exception as e:
                logger.exception("check %s failed on %s", name, ctx.case_id)
                result = CheckResult.failure(name, gate, e)
                error = e
            log_check_result(ctx.case_id, name, result.residual, gate, result.passed,
                             time.time() - check_start, error)
            report.add(result)

    for r in ctx.datum.nodes:
        try:
            report.epsilons.append(epsilon_fit(ctx, r)[0])
        except Exception as e:
            logger.warning("no epsilon for node %d on %s: %s", r + 1, ctx.case_id, e)
            report.epsilons.append(float("nan"))

    report.wall_time = time.time() - start
    log_case_finished(ctx.case_id, report.passed, report.wall_time, len(report.failed_checks))
    return report


def _aborted_case_report(config: RunConfig, error: Exception) -> CaseReport:
    """Report for a case whose context could not be built: one failed ``build_context`` check."""
    report = CaseReport(
        case_id=config.case_id,
        lie_type=config.lie_type,
        rank=config.rank,
        q=config.q,
        subset=list(config.subset),
        word=list(config.word or []),
        N=config.N,
        M=config.M,
        eps_target=[],
    )
    report.add(CheckResult.failure("build_context", config.gates.module, error))
    log_check_result(config.case_id, "build_context", float("inf"), config.gates.module, False, error=error)
    log_case_finished(config.case_id, False, 0.0, 1)
    return report


def run_case(config: RunConfig) -> CaseReport:
    """Build the context for a single-case config and run its suites."""
    try:
        with instrumentation.time_operation("build_context", case=config.case_id):
            ctx = context_from_config(config)
    except Exception as e:
        logger.exception("context for %s could not be built", config.case_id)
        return _aborted_case_report(config, e)
    return run_suite(ctx, config.suites)


def run_catalog(configs: Sequence[RunConfig], workers: int = 1) -> List[CaseReport]:
    """Run every case; reports come back in input order whatever the worker count.

    A case whose context cannot be built is reported as failed and the sweep goes on.
    """
    configs = list(configs)
    for config in configs:
        resolve_suites(config.suites)
    if workers <= 1 or len(configs) <= 1:
        return [run_case(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(run_case, c) for c in configs]
        return [f.result() for f in futures]
