"""
Tests for the operator caches and the on-disk array store.
"""
import threading
from unittest.mock import patch

import numpy as np
import pytest

from cache_manager import (
    ArrayStore, CacheConfig, CacheStats, OperatorCache, all_cache_stats, array_store_from_env
)


class TestOperatorCache:
    """Tests for OperatorCache."""

    def test_miss_then_hit(self):
        cache = OperatorCache("test")
        calls = []

        def factory():
            calls.append(1)
            return np.eye(2)

        first = cache.get_or_create(("irrep", 1), factory)
        second = cache.get_or_create(("irrep", 1), factory)

        assert first is second
        assert len(calls) == 1
        assert cache.stats.hits == 1
        assert cache.stats.misses == 1
        assert ("irrep", 1) in cache
        assert len(cache) == 1

    def test_factory_error_is_not_cached(self):
        """A failing factory leaves no entry behind."""
        cache = OperatorCache("test")

        def broken():
            raise RuntimeError("boom")

        with pytest.raises(RuntimeError):
            cache.get_or_create("k", broken)

        assert "k" not in cache
        assert cache.get_or_create("k", lambda: 3) == 3

    def test_eviction_drops_oldest(self):
        cache = OperatorCache("small", CacheConfig(max_entries=2))
        for i in range(3):
            cache.get_or_create(i, lambda i=i: i * 10)

        assert len(cache) == 2
        assert 0 not in cache
        assert cache.get(2) == 20
        assert cache.stats.evictions == 1

    def test_clear_resets_stats(self):
        cache = OperatorCache("test")
        cache.get_or_create("a", lambda: 1)
        cache.clear()

        assert len(cache) == 0
        assert cache.stats.misses == 0

    def test_concurrent_workers_share_first_value(self):
        """Racing workers all receive the same stored object."""
        cache = OperatorCache("race")
        barrier = threading.Barrier(4)
        results = []

        def worker():
            barrier.wait()
            results.append(cache.get_or_create("key", lambda: object()))

        threads = [threading.Thread(target=worker) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        assert len(results) == 4
        assert all(r is results[0] for r in results)

    def test_log_events(self):
        """Cache events reach the log only when enabled."""
        cache = OperatorCache("logged", CacheConfig(log_events=True))
        with patch('cache_manager.log_cache_event') as mock_log:
            cache.get_or_create("a", lambda: 1)
            cache.get_or_create("a", lambda: 1)

        assert [c.args[2] for c in mock_log.call_args_list] == [False, True]

    def test_get_cache_stats(self):
        cache = OperatorCache("stats")
        cache.get_or_create("a", lambda: 1)
        cache.get_or_create("a", lambda: 1)

        stats = cache.get_cache_stats()
        assert stats["name"] == "stats"
        assert stats["entries"] == 1
        assert stats["hit_rate"] == 0.5


class TestCacheStats:

    def test_hit_rate_empty(self):
        assert CacheStats().hit_rate == 0.0

    def test_hit_rate(self):
        assert CacheStats(hits=3, misses=1).hit_rate == 0.75


class TestArrayStore:
    """Tests for ArrayStore."""

    def test_save_and_load(self, tmp_path):
        store = ArrayStore(str(tmp_path))
        arrays = {"E": np.arange(8.0).reshape(2, 2, 2), "weights": np.array([[1, 0], [-1, 1]])}

        path = store.save("irrep-A2-(1, 0)", arrays)
        loaded = store.load("irrep-A2-(1, 0)")

        assert path.endswith(".npz")
        np.testing.assert_array_equal(loaded["E"], arrays["E"])
        np.testing.assert_array_equal(loaded["weights"], arrays["weights"])

    def test_missing_key(self, tmp_path):
        assert ArrayStore(str(tmp_path)).load("nothing") is None

    def test_corrupt_file_returns_none(self, tmp_path):
        store = ArrayStore(str(tmp_path))
        store.path_for("bad").write_bytes(b"not an archive")
        assert store.load("bad") is None

    def test_keys_map_to_distinct_files(self, tmp_path):
        store = ArrayStore(str(tmp_path))
        assert store.path_for("a") != store.path_for("b")


class TestArrayStoreFromEnv:

    def test_disabled_without_env(self):
        with patch.dict('os.environ', {}, clear=True):
            assert array_store_from_env() is None

    def test_enabled_with_env(self, tmp_path):
        with patch.dict('os.environ', {"QFLAG_CACHE_DIR": str(tmp_path / "store")}):
            store = array_store_from_env()
        assert isinstance(store, ArrayStore)
        assert store.directory == tmp_path / "store"


def test_all_cache_stats_names():
    assert set(all_cache_stats()) == {"modules", "rmatrix", "su2", "theta_tables"}
