"""Tests for metrics module."""

import time

import pytest

from riskverify.metrics import (
    Counter,
    Histogram,
    MetricsRegistry,
    get_metrics,
    reset_metrics,
)


class TestCounter:
    """Tests for Counter metric."""

    def test_initial_value_is_zero(self) -> None:
        """Test that counter starts at zero."""
        counter = Counter("test_counter", "Test counter")
        assert counter.value == 0

    def test_multiple_increments(self) -> None:
        """Test multiple increments accumulate."""
        counter = Counter("test_counter", "Test counter")
        counter.inc()
        counter.inc(3)
        counter.inc()
        assert counter.value == 5

    def test_labels(self) -> None:
        """Test counter with labels."""
        counter = Counter("solves_total", "Solves")
        counter.labels(program="verify", status="optimal").inc()
        counter.labels(program="wc_cvar", status="optimal").inc(2)

        assert counter.labels(program="verify", status="optimal").value == 1
        assert counter.labels(status="optimal", program="wc_cvar").value == 2

    def test_to_dict_lists_labeled_values(self) -> None:
        """Test the rendered label keys."""
        counter = Counter("solves_total", "Solves")
        counter.labels(program="verify").inc()

        data = counter.to_dict()
        assert data["labeled_values"] == {"program=verify": 1.0}


class TestHistogram:
    """Tests for Histogram metric."""

    def test_observe_value(self) -> None:
        """Test observing a value."""
        histogram = Histogram("test_histogram", "Test histogram")
        histogram.observe(0.5)
        histogram.observe(1.5)

        stats = histogram.get_stats()
        assert stats["count"] == 2
        assert stats["sum"] == 2.0

    def test_time_context_manager(self) -> None:
        """Test timing with context manager."""
        histogram = Histogram("test_histogram", "Test histogram")

        with histogram.time():
            time.sleep(0.01)

        stats = histogram.get_stats()
        assert stats["count"] == 1
        assert stats["sum"] >= 0.01

    def test_time_records_on_exception(self) -> None:
        """Test that a failed block still records its duration."""
        histogram = Histogram("test_histogram", "Test histogram")

        with pytest.raises(RuntimeError), histogram.time():
            raise RuntimeError("solver exploded")

        assert histogram.get_stats()["count"] == 1

    def test_observations_keep_every_value(self) -> None:
        """Test that individual observations are kept per label set."""
        histogram = Histogram("solve_seconds", "Seconds")
        histogram.labels(program="verify").observe(0.1)
        histogram.labels(program="verify").observe(0.2)
        histogram.observe(0.3)

        assert histogram.observations() == {"all": [0.3], "program=verify": [0.1, 0.2]}

    def test_long_sweep_keeps_bounded_window(self) -> None:
        """Test that totals stay exact while only the recent window is retained."""
        histogram = Histogram("solve_seconds", "Seconds", window=5)
        verify = histogram.labels(program="verify")
        for i in range(1, 101):
            verify.observe(float(i))

        assert verify.get_stats() == {"count": 100, "sum": 5050.0}
        assert histogram.observations() == {"program=verify": [96.0, 97.0, 98.0, 99.0, 100.0]}
        assert histogram.to_dict()["totals"] == {"program=verify": {"count": 100, "sum": 5050.0}}

    def test_bucket_counts_are_cumulative(self) -> None:
        """Test that values land in the first bucket whose bound they do not exceed."""
        histogram = Histogram("solve_seconds", "Seconds", buckets=(0.1, 1.0))
        for value in (0.05, 0.1, 0.5, 2.0):
            histogram.observe(value)

        assert histogram.bucket_counts() == {"0.1": 2, "1": 3, "+Inf": 4}
        assert histogram.labels(program="other").bucket_counts() == {"0.1": 0, "1": 0, "+Inf": 0}


class TestMetricsRegistry:
    """Tests for MetricsRegistry."""

    def test_register_counter(self) -> None:
        """Test registering a counter."""
        registry = MetricsRegistry()
        counter = registry.counter("my_counter", "My counter")

        assert counter.name == "my_counter"
        assert counter.value == 0

    def test_same_name_returns_same_metric(self) -> None:
        """Test that registering same name returns existing metric."""
        registry = MetricsRegistry()
        counter1 = registry.counter("my_counter", "My counter")
        counter1.inc(5)

        counter2 = registry.counter("my_counter", "My counter")
        assert counter1 is counter2
        assert counter2.value == 5

    def test_kind_clash_raises(self) -> None:
        """Test that a name cannot be reused for another metric kind."""
        registry = MetricsRegistry()
        registry.counter("solve_seconds", "oops")

        with pytest.raises(TypeError):
            registry.histogram("solve_seconds", "Seconds")

    def test_get_all_metrics(self) -> None:
        """Test getting all metrics as dict."""
        registry = MetricsRegistry()
        registry.counter("counter1", "Counter 1").inc(5)
        registry.histogram("hist1", "Histogram 1").observe(1.0)

        metrics = registry.get_all()

        assert metrics["counter1"]["value"] == 5
        assert metrics["hist1"]["observations"] == {"all": [1.0]}


class TestGetMetrics:
    """Tests for global metrics access."""

    def test_get_metrics_is_singleton(self) -> None:
        """Test that get_metrics returns the same instance."""
        assert get_metrics() is get_metrics()

    def test_reset_creates_new_registry(self) -> None:
        """Test that reset_metrics drops recorded values."""
        first = get_metrics()
        first.counter("c", "C").inc()

        reset_metrics()

        assert get_metrics() is not first
        assert get_metrics().counter("c", "C").value == 0
