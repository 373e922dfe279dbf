"""
Progress reporting for long-running batch operations.
Logs start/finish of operations that take longer than a threshold and counts
completed Monte-Carlo realizations across worker threads.
"""

import threading
import time
from functools import wraps
from typing import Callable, Optional

from utils.logging import info_print, debug_print, error_print


class ProgressMonitor:
    """Thread-safe completion counter for a batch of independent work items"""

    def __init__(self, operation_name: str, total: int, report_every: Optional[int] = None):
        self.operation_name = operation_name
        self.total = max(0, int(total))
        # Roughly ten progress lines per batch
        self.report_every = report_every or max(1, self.total // 10)
        self.completed = 0
        self.failed = 0
        self.start_time = time.perf_counter()
        self._lock = threading.Lock()

    def mark_done(self, success: bool = True) -> int:
        """Record one finished item and log progress at the reporting interval"""
        with self._lock:
            self.completed += 1
            if not success:
                self.failed += 1
            done = self.completed
        if done == self.total or done % self.report_every == 0:
            info_print(f"{self.operation_name}: {done}/{self.total} "
                       f"({self.elapsed():.1f}s elapsed)")
        return done

    def elapsed(self) -> float:
        return time.perf_counter() - self.start_time

    def summary(self) -> str:
        with self._lock:
            return (f"{self.operation_name}: {self.completed}/{self.total} done, "
                    f"{self.failed} failed in {self.elapsed():.2f}s")


def with_progress(operation_name: str, min_duration: float = 1.0):
    """
    Decorator that reports long-running operations.

    Operations finishing faster than ``min_duration`` seconds only leave a
    debug line; slower ones are reported at info level. Failures are logged
    and re-raised.
    """
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            debug_print(f"{operation_name}: started")
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                error_print(f"{operation_name}: failed after "
                            f"{time.perf_counter() - start:.2f}s: {e}")
                raise
            elapsed = time.perf_counter() - start
            if elapsed >= min_duration:
                info_print(f"{operation_name}: finished in {elapsed:.2f}s")
            else:
                debug_print(f"{operation_name}: finished in {elapsed:.3f}s")
            return result
        return wrapper
    return decorator
