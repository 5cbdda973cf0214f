"""
Centralized memory management utilities.

Counting tables (root-count tables, field tables) live in module-level
caches; long batch runs can release them between jobs.
"""

import gc
import logging
import threading
from typing import Callable, List, Optional


_logger = logging.getLogger(__name__)
_lock = threading.Lock()
_cache_clearers: List[Callable[[], None]] = []


def register_cache(clear: Callable[[], None]) -> None:
    """Register a cache_clear callable to be invoked by free_memory."""
    with _lock:
        if clear not in _cache_clearers:
            _cache_clearers.append(clear)


def free_memory(context: Optional[str] = None) -> None:
    """Release registered caches and run the garbage collector."""
    with _lock:
        for clear in _cache_clearers:
            try:
                clear()
            except Exception as e:
                _logger.debug(f"Cache clear failed: {e}")
        try:
            gc.collect()
        except Exception as e:
            _logger.debug(f"GC error: {e}")
    if context:
        _logger.debug(f"Memory released ({context}), caches: {len(_cache_clearers)}")


def log_process_memory(note: str = "") -> None:
    """Log process memory usage if OS APIs are available (best effort)."""
    try:
        import resource  # Unix only

        usage = resource.getrusage(resource.RUSAGE_SELF)
        rss_kb = getattr(usage, "ru_maxrss", 0)
        rss_mb = rss_kb / 1024.0
        if note:
            _logger.info(f"Memory usage ~{rss_mb:.1f} MB ({note})")
        else:
            _logger.info(f"Memory usage ~{rss_mb:.1f} MB")
    except Exception:
        pass
