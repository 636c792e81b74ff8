"""Log-periodic power law singularity (LPPLS) model of log-prices.

The expected log-price is a power-law trend toward a finite-time
singularity at ``tc``, decorated with log-periodic oscillations:

    E[ln p(t)] = A + B (tc - t)^m
                   + C1 (tc - t)^m cos(omega ln(tc - t))
                   + C2 (tc - t)^m sin(omega ln(tc - t))

for t < tc, extended by continuity to the value A at t == tc.  The sign
of B decides the direction of the run-up: B < 0 means the trend rises
into the singularity (a positive bubble), B > 0 means it falls (a
negative bubble).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LpplsParams",
    "SyntheticConfig",
    "lppls_log_price",
    "generate_synthetic",
    "classify_bubble",
]


@dataclass(frozen=True)
class LpplsParams:
    """Parameters of the log-price expectation.

    ``tc`` is the critical time, ``m`` the power-law exponent,
    ``omega`` the angular log-frequency, ``A`` the log-price at the
    singularity, ``B`` the trend amplitude and ``C1``/``C2`` the
    oscillation amplitudes.
    """

    tc: float
    m: float
    omega: float
    A: float
    B: float
    C1: float
    C2: float

    def __post_init__(self) -> None:
        if not 0.0 < self.m < 1.0:
            raise ValueError(f"exponent m must lie in (0, 1), got {self.m}")
        if self.omega <= 0.0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @property
    def C(self) -> float:
        """Combined oscillation amplitude sqrt(C1^2 + C2^2)."""
        return math.hypot(self.C1, self.C2)


@dataclass(frozen=True)
class SyntheticConfig:
    """Sampling grid and noise settings for a synthetic series.

    The series is sampled at t = 0, 1, ..., n_points - 1.  With
    ``sigma`` > 0 an i.i.d. Gaussian term sigma * g_t is added to every
    sample; the g_t stream comes from NumPy's ``default_rng`` (the
    PCG64 generator) seeded with ``seed``, drawn via
    ``standard_normal``.  With ``sigma`` == 0 the output is exactly the
    model expectation and no generator is ever created.
    """

    n_points: int
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_points < 2:
            raise ValueError(f"n_points must be at least 2, got {self.n_points}")
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")


def lppls_log_price(params: LpplsParams, t):
    """Expected log-price at time ``t`` (scalar or array).

    Defined for t <= tc; at t == tc the continuity value ``A`` is
    returned.  Times beyond the critical point raise ``ValueError``.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr > params.tc):
        raise ValueError(f"t must not exceed the critical time tc={params.tc}")
    dt = params.tc - t_arr
    # Mask dt == 0 before taking logs; those entries are overwritten
    # with A below.
    safe = np.where(dt > 0.0, dt, 1.0)
    env = safe**params.m
    phase = params.omega * np.log(safe)
    values = (
        params.A
        + params.B * env
        + params.C1 * env * np.cos(phase)
        + params.C2 * env * np.sin(phase)
    )
    values = np.where(dt > 0.0, values, params.A)
    if t_arr.ndim == 0:
        return float(values)
    return values


def generate_synthetic(params: LpplsParams, config: SyntheticConfig) -> np.ndarray:
    """Sample the model on 0..n_points-1, optionally with Gaussian noise.

    The last sample time must not pass ``tc``.  Identical arguments
    always produce an identical array.
    """
    last = config.n_points - 1
    if last > params.tc:
        raise ValueError(
            f"series of length {config.n_points} extends past tc={params.tc}"
        )
    t = np.arange(config.n_points, dtype=float)
    series = lppls_log_price(params, t)
    if config.sigma > 0.0:
        rng = np.random.default_rng(config.seed)
        series = series + config.sigma * rng.standard_normal(config.n_points)
    return series


def classify_bubble(params: LpplsParams) -> str:
    """Return ``"positive"`` (B < 0), ``"negative"`` (B > 0) or ``"none"``."""
    if params.B < 0.0:
        return "positive"
    if params.B > 0.0:
        return "negative"
    return "none"
