"""Early-warning signals for financial bubbles.

Three cooperating pieces: drawdown/drawup segmentation of a price
series into trends, calibration of a log-periodic power law
singularity model on each trend, and a sliding-window topological
signal (persistence landscape norms of delay-embedded windows) that
spikes as a critical transition approaches.
"""

from .embedding import EmbeddingConfig, delay_embed, sliding_windows
from .fitting import DeConfig, FitBounds, FitResult, fit_segment
from .landscape import (
    PersistenceLandscape,
    landscape_from_diagram,
    landscape_from_pairs,
    landscape_norm,
)
from .lppls import LpplsParams, SyntheticConfig, generate_synthetic, lppls_log_price
from .persistence import (
    BACKEND,
    PersistenceDiagram,
    RipsConfig,
    pairwise_distances,
    rips_persistence,
)
from .pipeline import SignalSeries, TdaConfig, norms_over_windows, peak_report
from .segmentation import (
    BubbleSegment,
    SegmentationConfig,
    TrendEvent,
    adjust_segments,
    consensus_segmentation,
    segment,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BubbleSegment",
    "DeConfig",
    "EmbeddingConfig",
    "FitBounds",
    "FitResult",
    "LpplsParams",
    "PersistenceDiagram",
    "PersistenceLandscape",
    "RipsConfig",
    "SegmentationConfig",
    "SignalSeries",
    "SyntheticConfig",
    "TdaConfig",
    "TrendEvent",
    "adjust_segments",
    "consensus_segmentation",
    "delay_embed",
    "fit_segment",
    "generate_synthetic",
    "landscape_from_diagram",
    "landscape_from_pairs",
    "landscape_norm",
    "lppls_log_price",
    "norms_over_windows",
    "pairwise_distances",
    "peak_report",
    "rips_persistence",
    "segment",
    "sliding_windows",
]
