"""In-process solve metrics.

Counts conic solves by outcome and records their wall-clock durations as
bucket counts and running sums. A bounded window of recent durations is kept so
run manifests can report per-solve timings.
"""

import time
from bisect import bisect_left
from collections import deque
from collections.abc import Generator
from contextlib import contextmanager
from dataclasses import dataclass, field
from itertools import accumulate
from threading import Lock
from typing import Any

LabelKey = tuple[tuple[str, str], ...]


@dataclass
class Counter:
    """A monotonically increasing counter metric."""

    name: str
    description: str
    _value: float = field(default=0.0, init=False)
    _labels: dict[str, str] = field(default_factory=dict, init=False)
    _labeled_values: dict[LabelKey, float] = field(default_factory=dict, init=False)
    _lock: Lock = field(default_factory=Lock, init=False, repr=False)

    @property
    def value(self) -> float:
        """Get the current counter value."""
        if self._labels:
            key = tuple(sorted(self._labels.items()))
            return self._labeled_values.get(key, 0.0)
        return self._value

    def inc(self, amount: float = 1.0) -> None:
        """Increment the counter.

        Args:
            amount: Amount to increment by (default 1).
        """
        with self._lock:
            if self._labels:
                key = tuple(sorted(self._labels.items()))
                self._labeled_values[key] = self._labeled_values.get(key, 0.0) + amount
            else:
                self._value += amount

    def labels(self, **kwargs: str) -> "Counter":
        """Return a labeled view sharing this counter's storage."""
        labeled = Counter(self.name, self.description)
        labeled._labels = kwargs
        labeled._labeled_values = self._labeled_values
        labeled._lock = self._lock
        return labeled

    def to_dict(self) -> dict[str, Any]:
        """Convert counter to dictionary representation."""
        result: dict[str, Any] = {"name": self.name, "type": "counter", "value": self._value}
        if self._labeled_values:
            result["labeled_values"] = {
                ",".join(f"{k}={v}" for k, v in key): value
                for key, value in sorted(self._labeled_values.items())
            }
        return result


DEFAULT_BUCKETS: tuple[float, ...] = (0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 30.0, 60.0)
RECENT_WINDOW = 1000


@dataclass
class _Series:
    """Running totals for one label set."""

    buckets: tuple[float, ...]
    window: int
    count: int = 0
    total: float = 0.0
    bucket_counts: list[int] = field(default_factory=list)
    recent: deque[float] = field(default_factory=deque)

    def __post_init__(self) -> None:
        # last slot is the +Inf bucket
        self.bucket_counts = [0] * (len(self.buckets) + 1)
        self.recent = deque(maxlen=self.window)

    def add(self, value: float) -> None:
        self.count += 1
        self.total += value
        self.bucket_counts[bisect_left(self.buckets, value)] += 1
        self.recent.append(value)


@dataclass
class Histogram:
    """Duration metric with cumulative buckets and a bounded window of recent values."""

    name: str
    description: str
    buckets: tuple[float, ...] = DEFAULT_BUCKETS
    window: int = RECENT_WINDOW
    _labels: dict[str, str] = field(default_factory=dict, init=False)
    _series: dict[LabelKey, _Series] = field(default_factory=dict, init=False)
    _lock: Lock = field(default_factory=Lock, init=False, repr=False)

    def observe(self, value: float) -> None:
        """Observe a value.

        Args:
            value: The value to observe.
        """
        key = tuple(sorted(self._labels.items()))
        with self._lock:
            series = self._series.get(key)
            if series is None:
                series = self._series[key] = _Series(self.buckets, self.window)
            series.add(value)

    @contextmanager
    def time(self) -> Generator[None, None, None]:
        """Time the enclosed block and observe its duration in seconds."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.observe(time.perf_counter() - start)

    def get_stats(self) -> dict[str, float]:
        """Return count and sum for this label set."""
        key = tuple(sorted(self._labels.items()))
        with self._lock:
            series = self._series.get(key)
            if series is None:
                return {"count": 0, "sum": 0.0}
            return {"count": series.count, "sum": series.total}

    def bucket_counts(self) -> dict[str, int]:
        """Cumulative counts per upper bound for this label set."""
        key = tuple(sorted(self._labels.items()))
        with self._lock:
            series = self._series.get(key)
            counts = series.bucket_counts if series else [0] * (len(self.buckets) + 1)
            bounds = [*(f"{b:g}" for b in self.buckets), "+Inf"]
            return dict(zip(bounds, accumulate(counts), strict=True))

    def observations(self) -> dict[str, list[float]]:
        """Return the most recent observations keyed by their rendered label set."""
        with self._lock:
            return {
                _render(key): list(series.recent) for key, series in sorted(self._series.items())
            }

    def labels(self, **kwargs: str) -> "Histogram":
        """Return a labeled view sharing this histogram's storage."""
        labeled = Histogram(self.name, self.description, self.buckets, self.window)
        labeled._labels = kwargs
        labeled._series = self._series
        labeled._lock = self._lock
        return labeled

    def to_dict(self) -> dict[str, Any]:
        """Convert histogram to dictionary representation."""
        with self._lock:
            totals = {
                _render(key): {"count": series.count, "sum": series.total}
                for key, series in sorted(self._series.items())
            }
        return {
            "name": self.name,
            "type": "histogram",
            "totals": totals,
            "observations": self.observations(),
        }


def _render(key: LabelKey) -> str:
    return ",".join(f"{k}={v}" for k, v in key) or "all"


class MetricsRegistry:
    """Registry for all solve metrics."""

    def __init__(self) -> None:
        self._metrics: dict[str, Counter | Histogram] = {}
        self._lock = Lock()

    def counter(self, name: str, description: str) -> Counter:
        """Get or create a counter metric."""
        with self._lock:
            if name not in self._metrics:
                self._metrics[name] = Counter(name, description)
            metric = self._metrics[name]
            if not isinstance(metric, Counter):
                raise TypeError(f"Metric {name} is not a Counter")
            return metric

    def histogram(self, name: str, description: str) -> Histogram:
        """Get or create a histogram metric."""
        with self._lock:
            if name not in self._metrics:
                self._metrics[name] = Histogram(name, description)
            metric = self._metrics[name]
            if not isinstance(metric, Histogram):
                raise TypeError(f"Metric {name} is not a Histogram")
            return metric

    def get_all(self) -> dict[str, Any]:
        """Get all metrics as a dictionary."""
        with self._lock:
            return {name: metric.to_dict() for name, metric in self._metrics.items()}


_metrics_registry: MetricsRegistry | None = None


def get_metrics() -> MetricsRegistry:
    """Get the global metrics registry."""
    global _metrics_registry
    if _metrics_registry is None:
        _metrics_registry = MetricsRegistry()
    return _metrics_registry


def reset_metrics() -> None:
    """Reset the global metrics registry. Used for testing and per-run manifests."""
    global _metrics_registry
    _metrics_registry = None
