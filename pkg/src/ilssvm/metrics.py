"""Scalar evaluation metrics and their per-run aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    variance: float  # population (1/n)
    std: float
    per_run: tuple[float, ...]


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise MetricError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise MetricError("empty vectors")
    return a, b


def mse(a, b) -> float:
    a, b = _pair(a, b)
    return float(np.mean((a - b) ** 2))


def ppcc(a, b) -> float:
    """Pearson product-moment correlation, clamped into [-1, 1]."""
    a, b = _pair(a, b)
    if a.size < 2:
        raise MetricError("correlation needs at least 2 points")
    ac = a - a.mean()
    bc = b - b.mean()
    va = float(ac @ ac)
    vb = float(bc @ bc)
    if va == 0.0 or vb == 0.0:
        raise MetricError("correlation undefined for a constant vector")
    r = float(ac @ bc) / math.sqrt(va * vb)
    return min(1.0, max(-1.0, r))


def summarize(values) -> MetricSummary:
    vals = [float(v) for v in values]
    if not vals:
        raise MetricError("summarize needs a non-empty list")
    arr = np.asarray(vals)
    var = float(np.mean((arr - arr.mean()) ** 2))
    return MetricSummary(mean=float(arr.mean()), variance=var, std=math.sqrt(var), per_run=tuple(vals))
