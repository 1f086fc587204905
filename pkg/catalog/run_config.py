from __future__ import annotations
from dataclasses import dataclass, asdict, field, replace
import json
import os
from itertools import product
from typing import List, Optional

from algebra.rootdata import (
    SUPPORTED_RANKS,
    RootDataError,
    build_root_datum,
    shortest_coset_rep,
    weyl_from_word,
)

# Smallest M + depth * shift headroom a run can work with.
MIN_SHIFT_BUDGET = 2


class RunConfigValidationError(ValueError):
    """Raised when run configuration is invalid."""
    pass


@dataclass
class Gates:
    """Residual tolerances, one per family of checks."""
    module: float = 1e-9
    rmatrix: float = 1e-8
    pairing: float = 1e-8
    soibelman: float = 1e-8
    relations: float = 1e-7
    epsilon: float = 1e-6
    degeneration: float = 0.1  # absolute error of a log-log slope

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not value > 0:
                raise RunConfigValidationError(f"gate {name} must be a positive number, got {value!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> Gates:
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise RunConfigValidationError(f"unknown gates: {sorted(unknown)}")
        return cls(**data)


@dataclass
class RunConfig:
    lie_type: str
    rank: int
    q: float = 0.5
    subset: List[int] = field(default_factory=list)  # 1-based nodes
    N: int = 16  # Fock truncation per leg
    M: int = 8   # safe block per leg
    gates: Gates = field(default_factory=Gates)
    battery_depth: int = 4
    samples: int = 20
    seed: int = 0
    word: Optional[List[int]] = None  # 1-based reduced word of w, defaults to the canonical one
    suites: Optional[List[str]] = None  # None runs every registered suite
    q_grid: List[float] = field(default_factory=list)
    subset_grid: List[List[int]] = field(default_factory=list)
    output: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        """Validate all fields after initialization."""
        if isinstance(self.gates, dict):
            self.gates = Gates.from_dict(self.gates)
        if self.lie_type not in SUPPORTED_RANKS:
            raise RunConfigValidationError(
                f"lie_type must be one of {sorted(SUPPORTED_RANKS)}, got {self.lie_type!r}"
            )
        self._validate_int("rank", self.rank, min(SUPPORTED_RANKS[self.lie_type]),
                           max(SUPPORTED_RANKS[self.lie_type]))
        if self.rank not in SUPPORTED_RANKS[self.lie_type]:
            raise RunConfigValidationError(f"rank {self.rank} is not supported for type {self.lie_type}")
        self._validate_q("q", self.q)
        self.subset = self._validate_subset("subset", self.subset)
        self._validate_int("N", self.N, 2, 4096)
        self._validate_int("M", self.M, 1, self.N - MIN_SHIFT_BUDGET)
        self._validate_int("battery_depth", self.battery_depth, 0, 8)
        self._validate_int("samples", self.samples, 1, 10000)
        self._validate_int("seed", self.seed, 0, 2 ** 32 - 1)
        self._validate_int("workers", self.workers, 1, 256)
        if self.word is not None:
            for i in self.word:
                self._validate_int("word entry", i, 1, self.rank)
        for value in self.q_grid:
            self._validate_q("q_grid entry", value)
        self.subset_grid = [self._validate_subset("subset_grid entry", s) for s in self.subset_grid]
        # with a subset grid the word is checked per expanded case
        if self.word is not None and not self.subset_grid:
            self._validate_word()

    def _validate_word(self) -> None:
        """The word must be a reduced word of the shortest element of w_0 W_S."""
        datum = build_root_datum(self.lie_type, self.rank, self.q)
        try:
            alt = weyl_from_word(datum, [i - 1 for i in self.word])
        except RootDataError as e:
            raise RunConfigValidationError(f"word {self.word}: {e}")
        w = shortest_coset_rep(datum, frozenset(s - 1 for s in self.subset))
        if alt.action != w.action:
            raise RunConfigValidationError(
                f"word {self.word} does not represent the shortest element of w_0 W_S for S={self.subset}"
            )

    def _validate_int(self, name: str, value: int, min_val: int, max_val: int) -> None:
        if not isinstance(value, int) or isinstance(value, bool):
            raise RunConfigValidationError(f"{name} must be an integer, got {type(value).__name__}")
        if value < min_val or value > max_val:
            raise RunConfigValidationError(f"{name} must be between {min_val} and {max_val}, got {value}")

    def _validate_q(self, name: str, value: float) -> None:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise RunConfigValidationError(f"{name} must be a number, got {type(value).__name__}")
        if not 0 < value < 1:
            raise RunConfigValidationError(f"{name} must lie strictly between 0 and 1, got {value}")

    def _validate_subset(self, name: str, nodes) -> List[int]:
        nodes = list(nodes)
        for s in nodes:
            self._validate_int(name, s, 1, self.rank)
        return sorted(set(nodes))

    @property
    def case_id(self) -> str:
        nodes = "".join(str(s) for s in self.subset) or "0"
        case_id = f"{self.lie_type}{self.rank}-S{nodes}-q{self.q:g}"
        if self.word is not None:
            case_id += "-w" + "".join(str(i) for i in self.word)
        return case_id

    def expand_cases(self) -> List[RunConfig]:
        """The q x subset grid as single-case configs, duplicates removed, in grid order."""
        qs = self.q_grid or [self.q]
        subsets = self.subset_grid or [self.subset]
        out, seen = [], set()
        for q, subset in product(qs, subsets):
            key = (float(q), tuple(subset))
            if key in seen:
                continue
            seen.add(key)
            out.append(replace(self, q=q, subset=list(subset), q_grid=[], subset_grid=[]))
        return out

    def to_dict(self) -> dict:
        """Convert run config to dictionary for JSON serialization."""
        data = asdict(self)
        data["gates"] = self.gates.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise RunConfigValidationError(f"unknown config fields: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as e:
            raise RunConfigValidationError(f"Invalid run config: {e}")

    def save_to_file(self, filepath: str) -> None:
        try:
            directory = os.path.dirname(filepath)
            if directory:
                os.makedirs(directory, exist_ok=True)

            with open(filepath, 'w', encoding='utf-8') as f:
                json.dump(self.to_dict(), f, indent=2, ensure_ascii=False)
        except Exception as e:
            raise RunConfigValidationError(f"Failed to save run config: {e}")

    @classmethod
    def load_from_file(cls, filepath: str) -> RunConfig:
        try:
            with open(filepath, 'r', encoding='utf-8') as f:
                data = json.load(f)
            return cls.from_dict(data)
        except FileNotFoundError:
            raise RunConfigValidationError(f"Run config file not found: {filepath}")
        except json.JSONDecodeError as e:
            raise RunConfigValidationError(f"Invalid JSON in run config file: {e}")
        except RunConfigValidationError:
            raise
        except Exception as e:
            raise RunConfigValidationError(f"Failed to load run config: {e}")
