"""Phase timing for checker runs."""
import threading
import time
from contextlib import contextmanager
from typing import Dict, List, Optional

from rich.console import Console
from rich.table import Table

# Phases recorded by the checker service, in report order.
PHASES = ("parse", "elaborate", "normalise")


class PerformanceMonitor:
    """Collect wall-clock durations per named phase; safe to share between worker threads."""

    def __init__(self):
        """Initialize performance monitor."""
        self.timings: Dict[str, List[float]] = {}
        self._lock = threading.Lock()

    @contextmanager
    def measure(self, operation: str):
        """
        Context manager to measure operation duration.

        Args:
            operation: Name of the phase being measured

        Example:
            with perf_monitor.measure("parse"):
                module = parse(text)
        """
        start_time = time.perf_counter()
        try:
            yield
        finally:
            duration = time.perf_counter() - start_time
            with self._lock:
                self.timings.setdefault(operation, []).append(duration)

    def get_stats(self, operation: str) -> Optional[Dict[str, float]]:
        """
        Get statistics for an operation.

        Args:
            operation: Name of the phase

        Returns:
            Dictionary with count, min, max, avg and total seconds, or None if no data
        """
        with self._lock:
            timings = list(self.timings.get(operation, ()))
        if not timings:
            return None
        return {
            "count": len(timings),
            "min": min(timings),
            "max": max(timings),
            "avg": sum(timings) / len(timings),
            "total": sum(timings),
        }

    def get_all_stats(self) -> Dict[str, Dict[str, float]]:
        """Statistics for every recorded phase, known phases first."""
        with self._lock:
            recorded = list(self.timings)
        ordered = [phase for phase in PHASES if phase in recorded]
        ordered += sorted(op for op in recorded if op not in PHASES)
        stats = {}
        for operation in ordered:
            entry = self.get_stats(operation)
            if entry is not None:
                stats[operation] = entry
        return stats

    def reset(self):
        """Reset all timing data."""
        with self._lock:
            self.timings.clear()

    def print_report(self, console: Optional[Console] = None):
        """Print the timing table; goes to stderr unless a console is given."""
        console = console or Console(stderr=True)

        stats = self.get_all_stats()
        if not stats:
            console.print("[yellow]No timings collected[/yellow]")
            return

        table = Table(title="Phase Timings", show_header=True)
        table.add_column("Phase", style="cyan")
        table.add_column("Count", justify="right", style="white")
        table.add_column("Avg (s)", justify="right", style="yellow")
        table.add_column("Min (s)", justify="right", style="green")
        table.add_column("Max (s)", justify="right", style="red")
        table.add_column("Total (s)", justify="right", style="magenta")

        for operation, entry in stats.items():
            table.add_row(
                operation,
                str(entry["count"]),
                f"{entry['avg']:.4f}",
                f"{entry['min']:.4f}",
                f"{entry['max']:.4f}",
                f"{entry['total']:.4f}",
            )

        console.print(table)


# Global performance monitor instance
perf_monitor = PerformanceMonitor()
