"""Utilities package."""
from .logs import LOGGER_NAME, setup_logging
from .performance import PHASES, PerformanceMonitor, perf_monitor

__all__ = ["LOGGER_NAME", "setup_logging", "PHASES", "PerformanceMonitor", "perf_monitor"]
