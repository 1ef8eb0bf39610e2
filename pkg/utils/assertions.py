"""Custom assertions for estimator and signal tests."""

import math

import numpy as np

from models.experiment import SweepRow
from models.signal import SampleTrace


def assert_close(actual: float, expected: float, tolerance: float, error_message: str | None = None) -> None:
    """Assert |actual - expected| <= tolerance."""
    message = error_message or f"Expected {expected} +/- {tolerance}, got {actual}"
    assert math.isfinite(actual), f"{message} (value is not finite)"
    assert abs(actual - expected) <= tolerance, f"{message} (off by {actual - expected:+.4g})"


def assert_traces_close(actual: SampleTrace, expected: SampleTrace, tolerance: float = 1e-9) -> None:
    """Assert equal rate, equal length and max sample error within tolerance."""
    assert actual.sample_rate_hz == expected.sample_rate_hz, (
        f"Sample rate {actual.sample_rate_hz} != {expected.sample_rate_hz}"
    )
    assert len(actual) == len(expected), f"Length {len(actual)} != {len(expected)}"
    worst = float(np.max(np.abs(actual.samples - expected.samples)))
    assert worst <= tolerance, f"Max sample error {worst:.3g} exceeds {tolerance:.3g}"


def assert_sweep_within(rows: list[SweepRow], prefix: str, tolerance: float) -> None:
    """Assert every row succeeded and all estimates starting with ``prefix`` are within tolerance."""
    failed = [row for row in rows if row.error]
    assert not failed, f"{len(failed)} rows failed, first: {failed[0].error if failed else ''}"
    worst = max(row.max_abs_error(prefix) for row in rows)
    assert worst <= tolerance, f"Max |{prefix} error| {worst:.4f} exceeds {tolerance}"
