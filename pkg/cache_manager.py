"""
Cache management for expensive algebraic constructions.
Keeps irreducible modules, tensor products, R-matrix actions and Fock
coefficient tables in synchronized maps, with an optional on-disk store
for module matrices.
"""
from __future__ import annotations
import hashlib
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Hashable, Optional

import numpy as np

from instrumentation import instrumentation, log_cache_event


@dataclass
class CacheStats:
    """Hit/miss counters for one cache."""
    hits: int = 0
    misses: int = 0
    evictions: int = 0

    @property
    def hit_rate(self) -> float:
        total = self.hits + self.misses
        return self.hits / total if total else 0.0


@dataclass
class CacheConfig:
    """Configuration for operator caches."""
    max_entries: int = 4096
    log_events: bool = False
    persist_dir: Optional[str] = None

    @classmethod
    def from_env(cls) -> CacheConfig:
        """Read the on-disk store location from QFLAG_CACHE_DIR."""
        return cls(persist_dir=os.getenv("QFLAG_CACHE_DIR") or None)


class OperatorCache:
    """Thread-safe map from hashable keys to immutable computed values.

    The factory runs outside the lock; when two workers race on the same key
    the first stored value wins and both callers receive it.
    """

    def __init__(self, name: str, config: CacheConfig = None):
        self.name = name
        self.config = config or CacheConfig()
        self._entries: Dict[Hashable, Any] = {}
        self._lock = threading.Lock()
        self.stats = CacheStats()

    def get(self, key: Hashable) -> Optional[Any]:
        with self._lock:
            return self._entries.get(key)

    def __contains__(self, key: Hashable) -> bool:
        with self._lock:
            return key in self._entries

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def get_or_create(self, key: Hashable, factory: Callable[[], Any]) -> Any:
        """Return the cached value for key, computing it with factory on a miss."""
        with self._lock:
            if key in self._entries:
                self.stats.hits += 1
                value = self._entries[key]
                hit = True
            else:
                self.stats.misses += 1
                hit = False
        if self.config.log_events:
            log_cache_event(self.name, str(key), hit)
        if hit:
            return value

        value = factory()
        with self._lock:
            if key not in self._entries:
                self._entries[key] = value
                while len(self._entries) > self.config.max_entries:
                    self._entries.pop(next(iter(self._entries)))
                    self.stats.evictions += 1
            return self._entries[key]

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()
            self.stats = CacheStats()

    def get_cache_stats(self) -> Dict[str, Any]:
        """Get cache statistics."""
        with self._lock:
            size = len(self._entries)
        return {
            "name": self.name,
            "entries": size,
            "hits": self.stats.hits,
            "misses": self.stats.misses,
            "evictions": self.stats.evictions,
            "hit_rate": round(self.stats.hit_rate, 3),
            "max_entries": self.config.max_entries,
        }


class ArrayStore:
    """On-disk store of named numpy arrays, one .npz archive per key."""

    def __init__(self, directory: str):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def path_for(self, key: str) -> Path:
        digest = hashlib.sha1(key.encode("utf-8")).hexdigest()
        return self.directory / f"{digest}.npz"

    def save(self, key: str, arrays: Dict[str, np.ndarray]) -> str:
        """Save arrays under key."""
        path = self.path_for(key)
        with instrumentation.time_operation("array_store_save", key=key):
            np.savez_compressed(path, **arrays)
        return str(path)

    def load(self, key: str) -> Optional[Dict[str, np.ndarray]]:
        """Load arrays stored under key, or None."""
        path = self.path_for(key)
        if not path.exists():
            return None
        try:
            with np.load(path, allow_pickle=False) as data:
                return {name: data[name] for name in data.files}
        except (OSError, ValueError) as e:
            instrumentation.log_operation("array_store_load", False, 0.0, e, key=key)
            return None


def array_store_from_env() -> Optional[ArrayStore]:
    """ArrayStore at QFLAG_CACHE_DIR, or None when unset."""
    config = CacheConfig.from_env()
    if not config.persist_dir:
        return None
    return ArrayStore(config.persist_dir)


# Global caches
module_cache = OperatorCache("modules")
rmatrix_cache = OperatorCache("rmatrix")
su2_cache = OperatorCache("su2", CacheConfig(max_entries=16384))
theta_cache = OperatorCache("theta_tables")


def all_cache_stats() -> Dict[str, Dict[str, Any]]:
    return {c.name: c.get_cache_stats() for c in (module_cache, rmatrix_cache, su2_cache, theta_cache)}
