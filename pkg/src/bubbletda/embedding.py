"""Time-delay embedding of scalar series and sliding windows over the
resulting point cloud."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EmbeddingConfig",
    "min_series_length",
    "delay_embed",
    "sliding_windows",
]


@dataclass(frozen=True)
class EmbeddingConfig:
    """Delay-embedding dimension ``dim``, lag ``delay`` and the number
    of consecutive embedded vectors per sliding window ``window``."""

    dim: int = 4
    delay: int = 5
    window: int = 72

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ValueError(f"dim must be at least 2, got {self.dim}")
        if self.delay < 1:
            raise ValueError(f"delay must be at least 1, got {self.delay}")
        if self.window < 2:
            raise ValueError(f"window must be at least 2, got {self.window}")


def min_series_length(config: EmbeddingConfig) -> int:
    """Shortest series that yields at least one full window."""
    return (config.dim - 1) * config.delay + config.window


def delay_embed(series, dim: int, delay: int) -> np.ndarray:
    """Embed a scalar series into R^dim with lag ``delay``.

    Vector t is (x_t, x_{t+delay}, ..., x_{t+(dim-1)*delay}); the
    result has len(series) - (dim-1)*delay rows in series order.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    count = len(x) - (dim - 1) * delay
    if count < 1:
        raise ValueError(
            f"series of length {len(x)} too short for dim={dim}, delay={delay}; "
            f"need at least {(dim - 1) * delay + 1} samples"
        )
    return np.column_stack([x[i * delay : i * delay + count] for i in range(dim)])


def sliding_windows(points: np.ndarray, window: int) -> list[np.ndarray]:
    """All contiguous runs of ``window`` consecutive rows of ``points``.

    Returns len(points) - window + 1 overlapping clouds; window k
    starts at row k.  The clouds are views into ``points``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-d array")
    k = len(pts) - window + 1
    if k < 1:
        raise ValueError(
            f"{len(pts)} points cannot fill a window of {window}; "
            f"need at least {window} points"
        )
    return [pts[t : t + window] for t in range(k)]
