"""
Tests for verification reports and their storage.
"""
import json
import math

import numpy as np
import pytest

from reports import (
    CaseReport, CheckResult, Report, ReportManager, export_matrices, load_matrices, render_report
)


def make_case(case_id="A1-S", residuals=(1e-12, 3e-10)):
    case = CaseReport(case_id=case_id, lie_type="A", rank=1, q=0.5, subset=[], word=[1],
                      N=12, M=6, eps_target=[0], epsilons=[1e-11])
    for k, residual in enumerate(residuals):
        case.add(CheckResult.from_residual(f"relations.check{k}", residual, 1e-9))
    return case


class TestCheckResult:

    def test_from_residual(self):
        assert CheckResult.from_residual("a", 1e-10, 1e-9).passed
        assert not CheckResult.from_residual("a", 1e-8, 1e-9).passed
        assert CheckResult.from_residual("a", 1e-9, 1e-9).passed

    def test_nan_fails(self):
        assert not CheckResult.from_residual("a", float("nan"), 1e-9).passed

    def test_failure(self):
        result = CheckResult.failure("soibelman.star", 1e-8, ValueError("bad block"))
        assert not result.passed
        assert result.residual == math.inf
        assert result.detail == "ValueError: bad block"

    def test_dict_round_trip(self):
        result = CheckResult.from_residual("pol.star_pairing", 2e-12, 1e-8, "worst at depth 3")
        assert CheckResult.from_dict(result.to_dict()) == result


class TestCaseReport:
    """Tests for CaseReport."""

    def test_passed(self):
        assert make_case().passed
        failing = make_case(residuals=(1e-12, 1e-3))
        assert not failing.passed
        assert [c.name for c in failing.failed_checks] == ["relations.check1"]

    def test_duplicate_check(self):
        case = make_case()
        with pytest.raises(ValueError, match="already recorded"):
            case.add(CheckResult.from_residual("relations.check0", 0.0, 1e-9))

    def test_dict_round_trip(self):
        case = make_case()
        restored = CaseReport.from_dict(json.loads(json.dumps(case.to_dict())))
        assert restored == case


class TestReport:

    def test_summary(self):
        report = Report.new({"lie_type": "A"}, [make_case(), make_case("A1-S1", (1.0,))])
        assert report.get_summary() == "2 cases, 3 checks, 1 failing cases"
        assert not report.passed
        assert report.id.startswith("report_")
        assert report.system == {}

    def test_empty_summary(self):
        assert Report.new({}, []).get_summary() == "Empty report"


class TestReportManager:
    """Tests for ReportManager."""

    def test_save_and_load(self, tmp_path):
        manager = ReportManager(str(tmp_path))
        report = Report.new({"q": 0.5}, [make_case()], {"cpu_count": 4})
        path = manager.save_report(report)
        assert path.endswith(f"{report.id}.json")

        loaded = manager.load_report(report.id)
        assert loaded.to_dict() == report.to_dict()

    def test_load_missing_or_corrupt(self, tmp_path):
        manager = ReportManager(str(tmp_path))
        assert manager.load_report("report_0") is None
        (tmp_path / "report_1.json").write_text("not json")
        assert manager.load_report("report_1") is None

    def test_list_newest_first(self, tmp_path):
        manager = ReportManager(str(tmp_path))
        older = Report(id="report_1", created_at="2024-01-01T00:00:00", config={}, cases=[])
        newer = Report(id="report_2", created_at="2024-06-01T00:00:00", config={}, cases=[])
        manager.save_report(older)
        manager.save_report(newer)
        (tmp_path / "junk.json").write_text("[")
        assert [r.id for r in manager.list_reports()] == ["report_2", "report_1"]

    def test_delete(self, tmp_path):
        manager = ReportManager(str(tmp_path))
        report = Report.new({}, [make_case()])
        manager.save_report(report)
        assert manager.delete_report(report.id)
        assert not manager.delete_report(report.id)

    def test_directory_from_environment(self, tmp_path, monkeypatch):
        target = tmp_path / "env_reports"
        monkeypatch.setenv("QFLAG_REPORT_DIR", str(target))
        manager = ReportManager()
        assert manager.reports_dir == target
        assert target.is_dir()

    def test_export(self, tmp_path):
        manager = ReportManager(str(tmp_path))
        report = Report.new({}, [make_case()])
        manager.save_report(report)
        assert json.loads(manager.export_report(report.id, "json"))["id"] == report.id
        assert manager.export_report("report_0") is None


class TestRender:

    def test_txt(self):
        report = Report.new({}, [make_case(residuals=(1e-12, 1e-3))])
        text = render_report(report, "txt")
        assert "[FAIL] A1-S" in text
        assert "BAD relations.check1" in text

    def test_markdown(self):
        text = render_report(Report.new({}, [make_case()]), "markdown")
        assert "## A1-S (pass)" in text
        assert "| relations.check0 |" in text

    def test_unknown_format(self):
        assert render_report(Report.new({}, []), "pdf") is None


class TestMatrixExport:

    def test_complex_round_trip(self, tmp_path):
        matrices = {"R": np.array([[1.0, 0.5j], [0.0, 2.0 - 1j]]), "scale": np.array(3.0)}
        path = export_matrices(str(tmp_path / "out" / "m.json"), matrices)
        loaded = load_matrices(path)
        np.testing.assert_allclose(loaded["R"], matrices["R"])
        assert loaded["scale"].shape == (1, 1)

    def test_layout(self, tmp_path):
        path = export_matrices(str(tmp_path / "m.json"), {"A": np.array([[1, 2, 3]])})
        payload = json.loads(open(path).read())
        assert payload["A"]["shape"] == [1, 3]
        assert payload["A"]["data"][2] == [3.0, 0.0]
