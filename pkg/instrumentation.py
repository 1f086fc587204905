"""
Logging, timing and run diagnostics for the verification engine.

Every coarse operation (module construction, R-matrix solves, theta tables,
operator builds, named checks) goes through ``instrumentation`` so that a
sweep leaves behind per-operation timings and a per-check residual summary.
"""

import json
import logging
import os
import platform
import time
from collections import Counter, defaultdict
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional

import numpy as np
import psutil
import scipy

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.FileHandler(os.getenv("QFLAG_LOG_FILE", "qflag.log")),
        logging.StreamHandler()
    ]
)

logger = logging.getLogger(__name__)

_GIB = 1024 ** 3


@dataclass
class PerformanceMetrics:
    """One timed operation."""
    operation: str
    start_time: float
    end_time: float
    duration: float
    success: bool
    error_message: Optional[str] = None
    metadata: Dict[str, Any] = None

    def __post_init__(self):
        if self.metadata is None:
            self.metadata = {}


@dataclass
class SystemInfo:
    platform: str
    python_version: str
    cpu_count: int
    memory_total: str
    memory_available: str
    disk_usage: str
    numpy_version: str = field(default_factory=lambda: np.__version__)
    scipy_version: str = field(default_factory=lambda: scipy.__version__)


class InstrumentationManager:
    """Collects operation timings and failures for one process."""

    def __init__(self):
        self.metrics: List[PerformanceMetrics] = []
        self.errors: List[Dict[str, Any]] = []
        self.start_time = time.time()

    def log_operation(self, operation: str, success: bool, duration: float = None,
                      error: Exception = None, **metadata):
        """Record an operation; failures are also kept for the error summary."""
        duration = duration or 0.0
        now = time.time()
        message = str(error) if error else None
        self.metrics.append(PerformanceMetrics(
            operation=operation,
            start_time=now - duration,
            end_time=now,
            duration=duration,
            success=success,
            error_message=message,
            metadata=metadata,
        ))

        entry = {
            "timestamp": datetime.now().isoformat(),
            "operation": operation,
            "success": success,
            "duration": duration,
            "error": message,
            **metadata
        }
        if success:
            logger.info("%s done in %.3fs %s", operation, duration, _format_metadata(metadata))
        else:
            logger.error("%s failed after %.3fs %s: %s", operation, duration, _format_metadata(metadata), message)
            self.errors.append(entry)

    @contextmanager
    def time_operation(self, operation: str, **metadata):
        """Time the enclosed block; an exception is logged and re-raised."""
        start = time.perf_counter()
        try:
            yield
        except Exception as e:
            self.log_operation(operation, False, time.perf_counter() - start, e, **metadata)
            raise
        self.log_operation(operation, True, time.perf_counter() - start, **metadata)

    def get_recent_metrics(self, limit: int = 50) -> List[PerformanceMetrics]:
        """Newest first."""
        return self.metrics[::-1][:limit]

    def get_error_summary(self) -> Dict[str, Any]:
        total = len(self.metrics)
        return {
            "total_errors": len(self.errors),
            "error_rate": len(self.errors) / total if total else 0.0,
            "error_types": dict(Counter(e.get("operation", "unknown") for e in self.errors)),
            "recent_errors": self.errors[-5:],
        }

    def get_check_summary(self) -> Dict[str, Dict[str, Any]]:
        """Per check name: runs, failures and the worst residual relative to its gate."""
        summary: Dict[str, Dict[str, Any]] = {}
        for metric in self.metrics:
            if metric.operation != "check":
                continue
            name = metric.metadata.get("check", "?")
            stats = summary.setdefault(name, {"runs": 0, "failures": 0, "worst_ratio": 0.0, "worst_case": None})
            stats["runs"] += 1
            if not metric.success:
                stats["failures"] += 1
            residual, gate = metric.metadata.get("residual"), metric.metadata.get("gate")
            if residual is None or not gate:
                continue
            ratio = float(residual) / float(gate)
            if not ratio <= stats["worst_ratio"]:
                stats["worst_ratio"] = ratio
                stats["worst_case"] = metric.metadata.get("case_id")
        return summary

    def get_system_info(self) -> SystemInfo:
        memory = psutil.virtual_memory()
        disk = psutil.disk_usage('/')
        return SystemInfo(
            platform=f"{platform.system()} {platform.release()}",
            python_version=platform.python_version(),
            cpu_count=psutil.cpu_count(),
            memory_total=f"{memory.total / _GIB:.1f} GiB",
            memory_available=f"{memory.available / _GIB:.1f} GiB",
            disk_usage=f"{disk.percent:.1f}%"
        )

    def get_performance_summary(self) -> Dict[str, Any]:
        if not self.metrics:
            return {"total_operations": 0, "avg_duration": 0.0, "success_rate": 0.0}

        total = len(self.metrics)
        op_stats = defaultdict(lambda: {"count": 0, "total_duration": 0.0, "errors": 0})
        for metric in self.metrics:
            stats = op_stats[metric.operation]
            stats["count"] += 1
            stats["total_duration"] += metric.duration
            stats["errors"] += 0 if metric.success else 1

        return {
            "total_operations": total,
            "success_rate": sum(m.success for m in self.metrics) / total,
            "avg_duration": sum(m.duration for m in self.metrics) / total,
            "operation_stats": dict(op_stats),
            "uptime": time.time() - self.start_time
        }


def _format_metadata(metadata: Dict[str, Any]) -> str:
    return " ".join(f"{k}={v}" for k, v in metadata.items())


instrumentation = InstrumentationManager()


def log_check_result(case_id: str, check: str, residual: float, gate: float, passed: bool,
                     duration: float = 0.0, error: Exception = None):
    """Record one named check; a check that raised counts as failed."""
    instrumentation.log_operation(
        "check",
        passed and error is None,
        duration,
        error,
        case_id=case_id,
        check=check,
        residual=residual,
        gate=gate
    )


def log_cache_event(cache: str, key: str, hit: bool):
    logger.debug("cache %s %s: %s", cache, "hit" if hit else "miss", key)


def log_case_finished(case_id: str, passed: bool, duration: float, failed_checks: int = 0):
    instrumentation.log_operation(
        "case",
        True,
        duration,
        case_id=case_id,
        passed=passed,
        failed_checks=failed_checks
    )


def export_diagnostics() -> str:
    """Timings, failures, per-check residual summary and host information as JSON."""
    diagnostics = {
        "timestamp": datetime.now().isoformat(),
        "performance": instrumentation.get_performance_summary(),
        "errors": instrumentation.get_error_summary(),
        "checks": instrumentation.get_check_summary(),
        "system": asdict(instrumentation.get_system_info()),
        "recent_metrics": [asdict(m) for m in instrumentation.get_recent_metrics(100)]
    }
    return json.dumps(diagnostics, indent=2, default=str)
