"""
Tests for running suites against cases.
"""
import math
from unittest.mock import MagicMock, patch

import pytest

from algebra.rootdata import build_root_datum
from catalog.run_config import RunConfig
from flagverify.context import FlagVerificationError, build_context
from flagverify.runner import UnknownSuiteError, resolve_suites, run_case, run_catalog, run_suite
from flagverify.suites import registry
from reports import CaseReport


@pytest.fixture
def ctx():
    return build_context(build_root_datum("A", 1, 0.5), [], 12, 6)


class TestResolveSuites:

    def test_none_selects_all(self):
        assert resolve_suites() == registry.get_available_suites()

    def test_keeps_registration_order(self):
        assert resolve_suites(["relations", "modules"]) == ["modules", "relations"]

    def test_unknown_suite(self):
        with pytest.raises(UnknownSuiteError, match="bogus"):
            resolve_suites(["modules", "bogus"])


class TestRunSuite:
    """Tests for run_suite on the quantum Podles sphere."""

    def test_checks_are_prefixed(self, ctx):
        report = run_suite(ctx, ["koperators"])
        names = [c.name for c in report.checks]
        assert names[0] == "koperators.k4_routes"
        assert all(n.startswith("koperators.") for n in names)
        assert len(names) == 6
        assert report.case_id == "A1-S"
        assert report.eps_target == [0]
        assert report.wall_time > 0

    def test_raising_check_is_recorded(self, ctx):
        with patch('flagverify.checks.check_projector_form', side_effect=RuntimeError("boom")):
            report = run_suite(ctx, ["koperators"])
        failed = report.failed_checks
        assert "koperators.projector_form" in [c.name for c in failed]
        bad = next(c for c in report.checks if c.name == "koperators.projector_form")
        assert bad.residual == math.inf
        assert bad.detail == "RuntimeError: boom"
        assert not report.passed

    def test_every_check_is_logged(self, ctx):
        with patch('flagverify.runner.log_check_result') as mock_log:
            report = run_suite(ctx, ["koperators"])
        assert mock_log.call_count == len(report.checks)
        args = mock_log.call_args[0]
        assert args[0] == "A1-S"
        assert args[1] == report.checks[-1].name

    def test_epsilons_recorded(self, ctx):
        report = run_suite(ctx, ["koperators"])
        assert len(report.epsilons) == 1
        assert report.epsilons[0] == pytest.approx(0.0, abs=1e-8)

    def test_all_suites_in_order(self, ctx):
        report = run_suite(ctx)
        prefixes = []
        for check in report.checks:
            prefix = check.name.split(".")[0]
            if prefix not in prefixes:
                prefixes.append(prefix)
        assert prefixes == registry.get_available_suites()

    def test_failed_epsilon_is_nan(self, ctx):
        with patch('flagverify.runner.epsilon_fit', side_effect=ValueError("no block")):
            report = run_suite(ctx, ["koperators"])
        assert math.isnan(report.epsilons[0])


class TestRunCatalog:

    def test_run_case_builds_context(self):
        config = RunConfig(lie_type="A", rank=1, N=10, M=4, suites=["pol"])
        fake_ctx = MagicMock()
        with patch('flagverify.runner.context_from_config', return_value=fake_ctx) as mock_ctx, \
                patch('flagverify.runner.run_suite', return_value="report") as mock_run:
            assert run_case(config) == "report"
        mock_ctx.assert_called_once_with(config)
        mock_run.assert_called_once_with(fake_ctx, ["pol"])

    def test_serial_order(self):
        configs = RunConfig(lie_type="A", rank=2, q_grid=[0.3, 0.6], subset_grid=[[1], [2]]).expand_cases()
        with patch('flagverify.runner.run_case', side_effect=lambda c: c.case_id):
            ids = run_catalog(configs, workers=1)
        assert ids == ["A2-S1-q0.3", "A2-S2-q0.3", "A2-S1-q0.6", "A2-S2-q0.6"]

    def test_single_case_skips_pool(self):
        config = RunConfig(lie_type="A", rank=1)
        with patch('flagverify.runner.ProcessPoolExecutor') as mock_pool, \
                patch('flagverify.runner.run_case', return_value="done"):
            assert run_catalog([config], workers=4) == ["done"]
        mock_pool.assert_not_called()

    def test_empty_catalog(self):
        assert run_catalog([], workers=2) == []

    def test_unknown_suite_stops_before_any_case(self):
        configs = [RunConfig(lie_type="A", rank=1), RunConfig(lie_type="A", rank=1, suites=["bogus"])]
        with patch('flagverify.runner.run_case') as mock_run:
            with pytest.raises(UnknownSuiteError):
                run_catalog(configs)
        mock_run.assert_not_called()


class TestFailedContext:
    """A case whose context cannot be built is reported, not raised."""

    def test_failure_recorded(self):
        config = RunConfig(lie_type="A", rank=2, subset=[1], N=10, M=4)
        with patch('flagverify.runner.context_from_config',
                   side_effect=FlagVerificationError("k operator is degenerate")):
            report = run_case(config)
        assert report.case_id == "A2-S1-q0.5"
        assert not report.passed
        assert [c.name for c in report.checks] == ["build_context"]
        assert math.isinf(report.checks[0].residual)
        assert report.checks[0].detail == "FlagVerificationError: k operator is degenerate"

    def test_sweep_keeps_going(self):
        good = RunConfig(lie_type="A", rank=2, subset=[1], N=10, M=4)
        bad = RunConfig(lie_type="A", rank=2, subset=[1], N=10, M=4, word=[1, 2])
        finished = CaseReport(case_id=good.case_id, lie_type="A", rank=2, q=0.5, subset=[1], word=[1, 2],
                              N=10, M=4, eps_target=[0, 1])

        def fake_context(config):
            if config.word is not None:
                raise ValueError("operator routes disagree")
            return MagicMock()

        with patch('flagverify.runner.context_from_config', side_effect=fake_context), \
                patch('flagverify.runner.run_suite', return_value=finished):
            reports = run_catalog([good, bad, good], workers=1)
        assert [r.case_id for r in reports] == ["A2-S1-q0.5", "A2-S1-q0.5-w12", "A2-S1-q0.5"]
        assert [r.passed for r in reports] == [True, False, True]
        assert reports[1].word == [1, 2]
