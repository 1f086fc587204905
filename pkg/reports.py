"""
Verification reports: per-check residuals, per-case summaries and their storage.
"""
from __future__ import annotations
import os
import json
from datetime import datetime
from typing import List, Dict, Any, Optional
from dataclasses import dataclass, asdict, field
from pathlib import Path

import numpy as np


@dataclass
class CheckResult:
    """One named residual compared against its gate."""
    name: str
    residual: float
    gate: float
    passed: bool
    detail: str = ""

    @classmethod
    def from_residual(cls, name: str, residual: float, gate: float, detail: str = "") -> CheckResult:
        residual = float(residual)
        return cls(name=name, residual=residual, gate=float(gate), passed=bool(residual <= gate), detail=detail)

    @classmethod
    def failure(cls, name: str, gate: float, error: Exception) -> CheckResult:
        """A check that could not be evaluated."""
        return cls(name=name, residual=float("inf"), gate=float(gate), passed=False,
                   detail=f"{type(error).__name__}: {error}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> CheckResult:
        return cls(
            name=data["name"],
            residual=data["residual"],
            gate=data["gate"],
            passed=data["passed"],
            detail=data.get("detail", "")
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class CaseReport:
    """All checks run for one (type, rank, q, S) case."""
    case_id: str
    lie_type: str
    rank: int
    q: float
    subset: List[int]
    word: List[int]
    N: int
    M: int
    eps_target: List[int]
    epsilons: List[float] = field(default_factory=list)
    checks: List[CheckResult] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed_checks(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def add(self, result: CheckResult):
        """Append a check; a name may appear only once per case."""
        if any(c.name == result.name for c in self.checks):
            raise ValueError(f"check {result.name!r} already recorded for {self.case_id}")
        self.checks.append(result)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> CaseReport:
        checks = [CheckResult.from_dict(c) for c in data.get("checks", [])]
        return cls(
            case_id=data["case_id"],
            lie_type=data["lie_type"],
            rank=data["rank"],
            q=data["q"],
            subset=list(data["subset"]),
            word=list(data["word"]),
            N=data["N"],
            M=data["M"],
            eps_target=list(data["eps_target"]),
            epsilons=list(data.get("epsilons", [])),
            checks=checks,
            wall_time=data.get("wall_time", 0.0)
        )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["checks"] = [c.to_dict() for c in self.checks]
        return data


@dataclass
class Report:
    """A verification run over one or more cases."""
    id: str
    created_at: str
    config: Dict[str, Any]
    cases: List[CaseReport]
    system: Dict[str, Any] = None

    def __post_init__(self):
        if self.system is None:
            self.system = {}

    @classmethod
    def new(cls, config: Dict[str, Any], cases: List[CaseReport],
            system: Optional[Dict[str, Any]] = None) -> Report:
        now = datetime.now()
        # Use microseconds for unique ID
        report_id = f"report_{int(now.timestamp() * 1000000)}"
        return cls(id=report_id, created_at=now.isoformat(), config=config, cases=cases, system=system)

    @property
    def passed(self) -> bool:
        return all(case.passed for case in self.cases)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> Report:
        return cls(
            id=data["id"],
            created_at=data["created_at"],
            config=data.get("config", {}),
            cases=[CaseReport.from_dict(c) for c in data.get("cases", [])],
            system=data.get("system", {})
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "created_at": self.created_at,
            "config": self.config,
            "cases": [c.to_dict() for c in self.cases],
            "system": self.system,
        }

    def get_summary(self) -> str:
        if not self.cases:
            return "Empty report"
        failed = sum(1 for c in self.cases if not c.passed)
        checks = sum(len(c.checks) for c in self.cases)
        return f"{len(self.cases)} cases, {checks} checks, {failed} failing cases"


class ReportManager:
    """Stores reports as JSON files and renders them as text or markdown."""

    def __init__(self, reports_dir: Optional[str] = None):
        self.reports_dir = Path(reports_dir or os.getenv("QFLAG_REPORT_DIR", "saved_reports"))
        self.reports_dir.mkdir(parents=True, exist_ok=True)

    def save_report(self, report: Report) -> str:
        filepath = self.reports_dir / f"{report.id}.json"
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(report.to_dict(), f, indent=2, ensure_ascii=False)
        return str(filepath)

    def load_report(self, report_id: str) -> Optional[Report]:
        filepath = self.reports_dir / f"{report_id}.json"
        if not filepath.exists():
            return None

        try:
            with open(filepath, 'r', encoding='utf-8') as f:
                data = json.load(f)
            return Report.from_dict(data)
        except Exception:
            return None

    def list_reports(self) -> List[Report]:
        """All saved reports, newest first."""
        reports = []
        for filepath in self.reports_dir.glob("*.json"):
            try:
                with open(filepath, 'r', encoding='utf-8') as f:
                    data = json.load(f)
                reports.append(Report.from_dict(data))
            except Exception:
                continue

        reports.sort(key=lambda r: r.created_at, reverse=True)
        return reports

    def delete_report(self, report_id: str) -> bool:
        filepath = self.reports_dir / f"{report_id}.json"
        if filepath.exists():
            filepath.unlink()
            return True
        return False

    def export_report(self, report_id: str, format: str = "json") -> Optional[str]:
        """Export a saved report as json, txt or markdown."""
        report = self.load_report(report_id)
        if not report:
            return None
        return render_report(report, format)


def render_report(report: Report, format: str = "json") -> Optional[str]:
    if format == "json":
        return json.dumps(report.to_dict(), indent=2, ensure_ascii=False)
    elif format == "txt":
        lines = [f"Report: {report.id}"]
        lines.append(f"Created: {report.created_at}")
        lines.append(f"Summary: {report.get_summary()}")
        lines.append("")
        for case in report.cases:
            status = "PASS" if case.passed else "FAIL"
            lines.append(f"[{status}] {case.case_id}  q={case.q}  S={case.subset}  word={case.word}")
            lines.append(f"  eps target {case.eps_target}, fitted {[round(e, 9) for e in case.epsilons]}")
            lines.append("-" * 50)
            for check in case.checks:
                mark = "ok " if check.passed else "BAD"
                lines.append(f"  {mark} {check.name:<36} {check.residual:.3e} (gate {check.gate:.0e})")
                if check.detail and not check.passed:
                    lines.append(f"      {check.detail}")
            lines.append("")
        return "\n".join(lines)
    elif format == "markdown":
        lines = [f"# Report {report.id}"]
        lines.append("")
        lines.append(f"**Created:** {report.created_at}")
        lines.append(f"**Summary:** {report.get_summary()}")
        lines.append("")
        for case in report.cases:
            status = "pass" if case.passed else "FAIL"
            lines.append(f"## {case.case_id} ({status})")
            lines.append("")
            lines.append(f"q = {case.q}, S = {case.subset}, word = {case.word}, N = {case.N}, M = {case.M}")
            lines.append("")
            lines.append("| check | residual | gate | result |")
            lines.append("|---|---|---|---|")
            for check in case.checks:
                lines.append(f"| {check.name} | {check.residual:.3e} | {check.gate:.0e} | "
                             f"{'pass' if check.passed else 'FAIL'} |")
            lines.append("")
        return "\n".join(lines)

    return None


def export_matrices(path: str, matrices: Dict[str, np.ndarray]) -> str:
    """Write complex matrices as {name: {"shape": [r, c], "data": [[re, im], ...]}}, row-major."""
    payload = {}
    for name, matrix in matrices.items():
        matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
        flat = matrix.reshape(-1)
        payload[name] = {
            "shape": list(matrix.shape),
            "data": [[float(z.real), float(z.imag)] for z in flat],
        }
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(payload, f, indent=2)
    return path


def load_matrices(path: str) -> Dict[str, np.ndarray]:
    """Inverse of export_matrices."""
    with open(path, 'r', encoding='utf-8') as f:
        payload = json.load(f)
    out = {}
    for name, entry in payload.items():
        data = np.array(entry["data"], dtype=float).reshape(-1, 2)
        out[name] = (data[:, 0] + 1j * data[:, 1]).reshape(entry["shape"])
    return out
