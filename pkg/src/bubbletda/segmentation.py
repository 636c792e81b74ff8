"""Drawdown/drawup segmentation of a price series into alternating
up- and down-trends.

Working on log-prices, a running extremum is tracked from the current
trend origin.  During an up-trend the drawdown at sample i is the gap
between the running maximum and the current value; the trend ends at
the first i where that gap exceeds the tolerance eps_i.  The trend's
peak is then the location of the running maximum, the next (down)
trend starts there, and the roles of maximum and minimum swap.  The
tolerance is either a constant or eps0 times a trailing rolling
volatility of the log-returns.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

__all__ = [
    "UP",
    "DOWN",
    "PEAK",
    "TROUGH",
    "SegmentationConfig",
    "TrendEvent",
    "BubbleSegment",
    "OpenTrend",
    "SegmentationResult",
    "ConsensusExtremum",
    "log_returns",
    "rolling_volatility",
    "largest_deviation",
    "segment",
    "adjust_segments",
    "consensus_segmentation",
]

UP = "up"
DOWN = "down"
PEAK = "peak"
TROUGH = "trough"


@dataclass(frozen=True)
class SegmentationConfig:
    """Tolerance and bookkeeping settings.

    ``tolerance_mode`` is "volatility" (eps_i = eps0 * rolling std of
    log-returns over the trailing ``w0`` samples) or "constant"
    (eps_i = eps0).  ``start_index`` is where scanning begins; by
    default ``w0`` in volatility mode (the first sample with a defined
    tolerance) and 0 in constant mode.
    """

    tolerance_mode: str = "volatility"
    eps0: float = 15.0
    w0: int = 240
    min_segment_len: int = 48
    initial_direction: str = UP
    start_index: int | None = None

    def __post_init__(self) -> None:
        if self.tolerance_mode not in ("volatility", "constant"):
            raise ValueError(
                f"tolerance_mode must be 'volatility' or 'constant', "
                f"got {self.tolerance_mode!r}"
            )
        if self.eps0 <= 0.0:
            raise ValueError(f"eps0 must be positive, got {self.eps0}")
        if self.w0 < 2:
            raise ValueError(f"w0 must be at least 2, got {self.w0}")
        if self.min_segment_len < 0:
            raise ValueError("min_segment_len cannot be negative")
        if self.initial_direction not in (UP, DOWN):
            raise ValueError(
                f"initial_direction must be '{UP}' or '{DOWN}', "
                f"got {self.initial_direction!r}"
            )
        if self.start_index is not None and self.start_index < 0:
            raise ValueError("start_index cannot be negative")


@dataclass(frozen=True)
class TrendEvent:
    """A detected extremum: its kind, location, and the later sample
    whose tolerance crossing confirmed it."""

    kind: str
    extremum_index: int
    crossing_index: int

    def __post_init__(self) -> None:
        if self.kind not in (PEAK, TROUGH):
            raise ValueError(f"kind must be '{PEAK}' or '{TROUGH}', got {self.kind!r}")
        if not self.extremum_index <= self.crossing_index:
            raise ValueError("extremum cannot come after its crossing")


@dataclass(frozen=True)
class BubbleSegment:
    """Half-open-by-convention trend stretch [start, end] of sample
    indices; ``warmup`` marks the first segment, whose start is the
    scan origin rather than a confirmed extremum."""

    start: int
    end: int
    direction: str
    warmup: bool = False

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise ValueError(f"segment ({self.start}, {self.end}) must have start < end")
        if self.direction not in (UP, DOWN):
            raise ValueError(
                f"direction must be '{UP}' or '{DOWN}', got {self.direction!r}"
            )

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class OpenTrend:
    """The trailing trend that never met a tolerance crossing before
    the series ended."""

    start: int
    direction: str


@dataclass(frozen=True)
class SegmentationResult:
    events: tuple[TrendEvent, ...]
    raw_segments: tuple[BubbleSegment, ...]
    open_trend: OpenTrend | None


@dataclass(frozen=True)
class ConsensusExtremum:
    """An extremum location with the number of grid runs that voted
    for it (after merging near-identical indices)."""

    kind: str
    index: int
    count: int


def log_returns(prices) -> np.ndarray:
    """First differences of log-prices; prices must be positive."""
    p = np.asarray(prices, dtype=float)
    if p.ndim != 1 or len(p) < 2:
        raise ValueError("need a 1-d series of at least two prices")
    if np.any(p <= 0.0):
        raise ValueError("prices must be positive")
    return np.diff(np.log(p))


def rolling_volatility(returns, w0: int) -> np.ndarray:
    """Trailing sample standard deviation over windows of ``w0``
    returns.

    Entry k is the std (ddof=1) of returns[k : k + w0].  When
    ``returns`` comes from a price series, entry k is the tolerance
    scale at price index w0 + k: the window then covers the w0 returns
    ending at that sample.
    """
    r = np.asarray(returns, dtype=float)
    if w0 < 2:
        raise ValueError(f"w0 must be at least 2, got {w0}")
    if len(r) < w0:
        raise ValueError(f"need at least w0={w0} returns, got {len(r)}")
    windows = np.lib.stride_tricks.sliding_window_view(r, w0)
    return windows.std(axis=1, ddof=1)


def largest_deviation(cum_returns, i0: int, i: int, direction: str) -> float:
    """Drawdown (up-trend) or drawup (down-trend) at ``i`` measured
    from the running extremum over [i0, i]."""
    c = np.asarray(cum_returns, dtype=float)
    if not 0 <= i0 <= i < len(c):
        raise ValueError(f"need 0 <= i0 <= i < {len(c)}, got i0={i0}, i={i}")
    if direction == UP:
        return float(np.max(c[i0 : i + 1]) - c[i])
    if direction == DOWN:
        return float(c[i] - np.min(c[i0 : i + 1]))
    raise ValueError(f"direction must be '{UP}' or '{DOWN}', got {direction!r}")


def segment(prices, config: SegmentationConfig = SegmentationConfig()) -> SegmentationResult:
    """Scan a price series into alternating trend events and the raw
    segments between them.

    Events alternate peak/trough starting with the initial direction.
    Raw segment k runs from the previous event's crossing (the scan
    origin for k = 0, flagged warm-up) to event k's extremum; a
    degenerate span (extremum not past the previous crossing) emits no
    segment.  The trailing unconfirmed trend comes back as
    ``open_trend``.
    """
    p = np.asarray(prices, dtype=float)
    if p.ndim != 1 or len(p) < 2:
        raise ValueError("need a 1-d series of at least two prices")
    if np.any(p <= 0.0):
        raise ValueError("prices must be positive")
    logp = np.log(p)
    n = len(p)

    if config.tolerance_mode == "volatility":
        if n <= config.w0 + 2:
            raise ValueError(
                f"series of length {n} too short for w0={config.w0}; "
                f"need more than {config.w0 + 2} samples"
            )
        vol = rolling_volatility(np.diff(logp), config.w0)
        tolerance = config.eps0 * vol  # tolerance[k] applies at sample w0 + k
        first_defined = config.w0
    else:
        tolerance = None
        first_defined = 0

    origin = config.start_index if config.start_index is not None else first_defined
    if origin < first_defined:
        raise ValueError(
            f"start_index {origin} precedes the first sample with a defined "
            f"tolerance ({first_defined})"
        )
    if origin >= n - 1:
        raise ValueError(f"start_index {origin} leaves no samples to scan")

    def eps_at(i: int) -> float:
        if tolerance is None:
            return config.eps0
        return float(tolerance[i - config.w0])

    events: list[TrendEvent] = []
    direction = config.initial_direction
    i0 = origin
    open_trend: OpenTrend | None = None
    while True:
        crossing = -1
        if direction == UP:
            run = logp[i0]
            for i in range(i0 + 1, n):
                if logp[i] > run:
                    run = logp[i]
                if run - logp[i] - eps_at(i) > 0.0:
                    crossing = i
                    break
        else:
            run = logp[i0]
            for i in range(i0 + 1, n):
                if logp[i] < run:
                    run = logp[i]
                if logp[i] - run - eps_at(i) > 0.0:
                    crossing = i
                    break
        if crossing < 0:
            open_trend = OpenTrend(start=i0, direction=direction)
            break
        if direction == UP:
            ext = i0 + int(np.argmax(logp[i0 : crossing + 1]))
            events.append(TrendEvent(PEAK, ext, crossing))
            direction = DOWN
        else:
            ext = i0 + int(np.argmin(logp[i0 : crossing + 1]))
            events.append(TrendEvent(TROUGH, ext, crossing))
            direction = UP
        i0 = ext

    segments: list[BubbleSegment] = []
    for k, event in enumerate(events):
        seg_start = origin if k == 0 else events[k - 1].crossing_index
        seg_dir = UP if event.kind == PEAK else DOWN
        if seg_start < event.extremum_index:
            segments.append(
                BubbleSegment(
                    start=seg_start,
                    end=event.extremum_index,
                    direction=seg_dir,
                    warmup=(k == 0),
                )
            )
    return SegmentationResult(
        events=tuple(events),
        raw_segments=tuple(segments),
        open_trend=open_trend,
    )


def adjust_segments(
    raw_segments,
    min_segment_len: int,
    manual_cuts: dict[tuple[int, int], int] | None = None,
) -> tuple[BubbleSegment, ...]:
    """Apply manual start cuts, then drop segments shorter than
    ``min_segment_len``.

    ``manual_cuts`` maps a raw (start, end) to a new start strictly
    inside [start, end); the key must match an input segment exactly.
    """
    segments = list(raw_segments)
    if manual_cuts:
        by_span = {(s.start, s.end): i for i, s in enumerate(segments)}
        for span, cut in manual_cuts.items():
            if span not in by_span:
                raise ValueError(f"no raw segment with span {span}")
            idx = by_span[span]
            seg = segments[idx]
            if not seg.start <= cut < seg.end:
                raise ValueError(
                    f"cut {cut} falls outside segment ({seg.start}, {seg.end})"
                )
            segments[idx] = BubbleSegment(
                start=cut, end=seg.end, direction=seg.direction, warmup=seg.warmup
            )
    return tuple(s for s in segments if s.length >= min_segment_len)


def consensus_segmentation(
    prices,
    eps0_range: tuple[float, float],
    w0_range: tuple[int, int],
    sample_counts: tuple[int, int],
    base_config: SegmentationConfig = SegmentationConfig(),
    merge_distance: int = 2,
) -> list[ConsensusExtremum]:
    """Vote extrema over a grid of (eps0, w0) settings.

    Runs ``segment`` for every grid point, pools the extremum indices
    per kind, greedily clusters indices whose gaps are at most
    ``merge_distance``, and represents each cluster by its modal index
    (smallest on ties).  Results are ranked by vote count, then index.
    """
    n_eps, n_w0 = sample_counts
    if n_eps < 1 or n_w0 < 1:
        raise ValueError("sample_counts must be positive")
    eps_values = np.linspace(eps0_range[0], eps0_range[1], n_eps)
    w0_values = sorted(
        {int(round(v)) for v in np.linspace(w0_range[0], w0_range[1], n_w0)}
    )
    if any(e <= 0 for e in eps_values):
        raise ValueError("eps0 grid must stay positive")

    votes: dict[str, Counter] = {PEAK: Counter(), TROUGH: Counter()}
    for eps0 in eps_values:
        for w0 in w0_values:
            cfg = SegmentationConfig(
                tolerance_mode=base_config.tolerance_mode,
                eps0=float(eps0),
                w0=int(w0),
                min_segment_len=base_config.min_segment_len,
                initial_direction=base_config.initial_direction,
                start_index=base_config.start_index,
            )
            for event in segment(prices, cfg).events:
                votes[event.kind][event.extremum_index] += 1

    ranked: list[ConsensusExtremum] = []
    for kind, counter in votes.items():
        indices = sorted(counter)
        cluster: list[int] = []
        for idx in indices:
            if cluster and idx - cluster[-1] > merge_distance:
                ranked.append(_cluster_vote(kind, cluster, counter))
                cluster = []
            cluster.append(idx)
        if cluster:
            ranked.append(_cluster_vote(kind, cluster, counter))
    ranked.sort(key=lambda c: (-c.count, c.index))
    return ranked


def _cluster_vote(kind: str, cluster: list[int], counter: Counter) -> ConsensusExtremum:
    modal = max(cluster, key=lambda i: (counter[i], -i))
    total = sum(counter[i] for i in cluster)
    return ConsensusExtremum(kind=kind, index=modal, count=total)
