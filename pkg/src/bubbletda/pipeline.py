"""Sliding-window topological signal over a scalar series.

Series -> delay embedding -> overlapping windows of embedded vectors ->
Rips persistence in degree 1 per window -> one landscape norm per
window.  The resulting norm series is the early-warning signal; its
peak location is summarized by ``peak_report``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .embedding import EmbeddingConfig, delay_embed, min_series_length, sliding_windows
from .landscape import (
    l1_norm_from_diagram,
    landscape_from_diagram,
    landscape_norm,
    linf_norm_from_diagram,
)
from .persistence import RipsConfig, pairwise_distances, rips_persistence

__all__ = ["TdaConfig", "SignalSeries", "PeakReport", "norms_over_windows", "peak_report"]


@dataclass(frozen=True)
class TdaConfig:
    """Embedding geometry, landscape norm order ``p`` and Rips settings
    for the windowed signal."""

    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    p: float = 1.0
    rips: RipsConfig = field(default_factory=RipsConfig)

    def __post_init__(self) -> None:
        if not math.isinf(self.p) and self.p < 1.0:
            raise ValueError(f"p must be at least 1 (or inf), got {self.p}")


@dataclass(frozen=True)
class SignalSeries:
    """Norm value per window plus the span of raw series indices each
    window covers (both ends inclusive)."""

    values: np.ndarray
    window_starts: np.ndarray
    window_ends: np.ndarray

    def __post_init__(self) -> None:
        if not (len(self.values) == len(self.window_starts) == len(self.window_ends)):
            raise ValueError("values and window index arrays must align")
        if len(self.values) and np.any(self.values < 0.0):
            raise ValueError("norms cannot be negative")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class PeakReport:
    """Location of the signal maximum: window index, value, and the
    index normalized to [0, 1] over the window range."""

    argmax_index: int
    max_value: float
    position: float


def norms_over_windows(series, config: TdaConfig = TdaConfig()) -> SignalSeries:
    """Landscape norm of the degree-1 diagram of every sliding window.

    Window k covers raw samples k .. k + (window-1) + (dim-1)*delay,
    the full stretch of the series its embedded vectors touch.
    """
    x = np.asarray(series, dtype=float)
    emb = config.embedding
    need = min_series_length(emb)
    if len(x) < need:
        raise ValueError(
            f"series of length {len(x)} too short for dim={emb.dim}, "
            f"delay={emb.delay}, window={emb.window}; need at least {need} samples"
        )
    points = delay_embed(x, emb.dim, emb.delay)
    windows = sliding_windows(points, emb.window)

    values = np.empty(len(windows))
    closed_l1 = config.p == 1.0
    closed_linf = math.isinf(config.p)
    for k, cloud in enumerate(windows):
        dist = pairwise_distances(cloud)
        h1 = rips_persistence(dist, config.rips)[1]
        if closed_l1:
            values[k] = l1_norm_from_diagram(h1)
        elif closed_linf:
            values[k] = linf_norm_from_diagram(h1)
        else:
            values[k] = landscape_norm(landscape_from_diagram(h1), config.p)

    span = (emb.window - 1) + (emb.dim - 1) * emb.delay
    starts = np.arange(len(windows))
    return SignalSeries(values=values, window_starts=starts, window_ends=starts + span)


def peak_report(signal: SignalSeries) -> PeakReport:
    """Argmax of the signal (first index on ties) and its normalized
    position argmax / (K - 1), taken as 0 for a single window."""
    if len(signal) == 0:
        raise ValueError("signal is empty")
    idx = int(np.argmax(signal.values))
    if len(signal) > 1:
        position = idx / (len(signal) - 1)
    else:
        position = 0.0
    return PeakReport(
        argmax_index=idx,
        max_value=float(signal.values[idx]),
        position=position,
    )
