"""
Multi-level logging utility for the IRS multicast optimizer.
Provides error, warning, info, debug, and trace logging with global control.

All output goes to stderr so CSV files and stdout summaries stay clean.
"""

import sys
import threading
from datetime import datetime

# Global verbose level - set from main.py
VERBOSE_LEVEL = 0  # 0=errors/warnings only, 1=info, 2=debug, 3=trace

_print_lock = threading.Lock()


def set_verbose_level(level: int):
    """Set global verbose level (0-3)"""
    global VERBOSE_LEVEL
    VERBOSE_LEVEL = max(0, min(3, int(level)))


def get_verbose_level() -> int:
    """Get current verbose level"""
    return VERBOSE_LEVEL


def _get_timestamp():
    return datetime.now().strftime("%H:%M:%S.%f")[:-3]  # HH:MM:SS.mmm


def _prefix(tag: str = "") -> str:
    thread = threading.current_thread()
    parts = [f"[{_get_timestamp()}]"]
    if thread is not threading.main_thread():
        parts.append(f"[{thread.name}]")
    if tag:
        parts.append(f"[{tag}]")
    return " ".join(parts)


def _emit(tag: str, *args, **kwargs):
    kwargs.setdefault("file", sys.stderr)
    with _print_lock:
        print(_prefix(tag), *args, **kwargs)


def error_print(*args, **kwargs):
    """Always print errors regardless of verbose level"""
    _emit("ERROR", *args, **kwargs)


def warning_print(*args, **kwargs):
    """Always print warnings regardless of verbose level"""
    _emit("WARN", *args, **kwargs)


def info_print(*args, **kwargs):
    """Print informational messages at verbose level 1+"""
    if VERBOSE_LEVEL >= 1:
        _emit("", *args, **kwargs)


def debug_print(*args, **kwargs):
    """Print debug messages at verbose level 2+"""
    if VERBOSE_LEVEL >= 2:
        _emit("DEBUG", *args, **kwargs)


def trace_print(*args, **kwargs):
    """Print trace messages at verbose level 3+"""
    if VERBOSE_LEVEL >= 3:
        _emit("TRACE", *args, **kwargs)
