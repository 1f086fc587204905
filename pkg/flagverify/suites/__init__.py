"""
Verification suites: named groups of checks run against one FlagContext.
"""
from __future__ import annotations
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from ..context import FlagContext


@dataclass(frozen=True)
class CheckSpec:
    """A named measurement and the gate family it is judged against."""
    name: str
    gate: str
    measure: Callable[[FlagContext], Tuple[float, str]]

    def gate_value(self, ctx: FlagContext) -> float:
        return float(getattr(ctx.gates, self.gate))


class VerificationSuite(ABC):
    """Abstract base class for a family of checks."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Suite name as used on the command line (e.g. 'relations')."""
        pass

    @property
    @abstractmethod
    def description(self) -> str:
        pass

    @abstractmethod
    def checks(self, ctx: FlagContext) -> List[CheckSpec]:
        """Checks applicable to this context, in run order."""
        pass


class SuiteRegistry:
    """Registry for verification suites."""

    def __init__(self):
        self._suite_classes: Dict[str, type] = {}
        self._suite_instances: Dict[str, VerificationSuite] = {}

    def register(self, suite_class: type) -> None:
        """Register a suite class under its ``suite_name``."""
        name = getattr(suite_class, 'suite_name', suite_class.__name__.replace('Suite', '').lower())
        self._suite_classes[name] = suite_class

    def get_suite(self, name: str) -> Optional[VerificationSuite]:
        """Get a suite instance by name (lazy instantiation)."""
        if name not in self._suite_instances:
            if name in self._suite_classes:
                self._suite_instances[name] = self._suite_classes[name]()
        return self._suite_instances.get(name)

    def get_available_suites(self) -> List[str]:
        """Registered suite names in registration order."""
        return list(self._suite_classes.keys())


# Global registry instance
registry = SuiteRegistry()

from . import registration
registration.setup_suites(registry)
