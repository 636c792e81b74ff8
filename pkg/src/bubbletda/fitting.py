"""Calibration of the log-price singularity model to a segment.

The model is linear in (A, B, C1, C2) once (tc, m, omega) are fixed, so
those four are always recovered by least squares on the design matrix
and only the three nonlinear parameters are searched.  The search is
differential evolution (rand/1/bin) with box constraints handled by
reflection, followed by an optional Nelder-Mead polish of the best
point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .lppls import LpplsParams

__all__ = [
    "FitBounds",
    "DeConfig",
    "DeResult",
    "FitResult",
    "design_matrix",
    "linear_subfit",
    "objective",
    "differential_evolution",
    "fit_segment",
]

_COLUMN_NAMES = ("const", "power", "power*cos", "power*sin")


@dataclass(frozen=True)
class FitBounds:
    """Search box for the nonlinear parameters (tc, m, omega)."""

    tc: tuple[float, float]
    m: tuple[float, float] = (0.01, 0.99)
    omega: tuple[float, float] = (2.0, 25.0)

    def __post_init__(self) -> None:
        for name, (lo, hi) in (("tc", self.tc), ("m", self.m), ("omega", self.omega)):
            if not lo < hi:
                raise ValueError(f"{name} bounds ({lo}, {hi}) must have lo < hi")
        if self.m[0] <= 0.0 or self.m[1] >= 1.0:
            raise ValueError(f"m bounds {self.m} must stay inside (0, 1)")
        if self.omega[0] <= 0.0:
            raise ValueError(f"omega bounds {self.omega} must be positive")

    @classmethod
    def for_segment(cls, n_samples: int) -> "FitBounds":
        """Default box for a segment sampled at 0..n_samples-1: tc from
        the last sample to half a segment length past it."""
        last = float(n_samples - 1)
        return cls(tc=(last, last + 0.5 * n_samples))

    def as_array(self) -> np.ndarray:
        return np.array([self.tc, self.m, self.omega], dtype=float)


@dataclass(frozen=True)
class DeConfig:
    """Differential evolution settings (rand/1/bin)."""

    population_size: int = 30
    max_generations: int = 500
    differential_weight: float = 0.8
    crossover_rate: float = 0.9
    seed: int = 0
    local_polish: bool = True

    def __post_init__(self) -> None:
        if self.population_size < 4:
            raise ValueError(
                f"population_size must be at least 4, got {self.population_size}"
            )
        if self.max_generations < 1:
            raise ValueError("max_generations must be positive")
        if not 0.0 < self.differential_weight <= 2.0:
            raise ValueError(
                f"differential_weight must lie in (0, 2], "
                f"got {self.differential_weight}"
            )
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError(
                f"crossover_rate must lie in [0, 1], got {self.crossover_rate}"
            )


@dataclass(frozen=True)
class DeResult:
    best_x: np.ndarray
    best_f: float
    trace: np.ndarray
    n_evaluations: int


@dataclass(frozen=True)
class FitResult:
    """Calibrated parameters and fit diagnostics for one segment."""

    params: LpplsParams
    rss: float
    residuals: np.ndarray
    converged: bool
    trace: np.ndarray

    @property
    def mean_abs_residual(self) -> float:
        return float(np.mean(np.abs(self.residuals)))


def design_matrix(times, tc: float, m: float, omega: float) -> np.ndarray:
    """Rows [1, s^m, s^m cos(omega ln s), s^m sin(omega ln s)] with
    s = tc - t; every time must be strictly before tc."""
    t = np.asarray(times, dtype=float)
    if np.any(t >= tc):
        raise ValueError(f"all times must be strictly less than tc={tc}")
    if not 0.0 < m < 1.0:
        raise ValueError(f"m must lie in (0, 1), got {m}")
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    s = tc - t
    env = s**m
    phase = omega * np.log(s)
    return np.column_stack([np.ones_like(t), env, env * np.cos(phase), env * np.sin(phase)])


def linear_subfit(
    y, times, tc: float, m: float, omega: float
) -> tuple[float, float, float, float, float]:
    """Least-squares (A, B, C1, C2) at fixed (tc, m, omega), plus the
    residual sum of squares.

    A rank-deficient design (degenerate column pair) raises with the
    offending columns named.
    """
    y_arr = np.asarray(y, dtype=float)
    x = design_matrix(times, tc, m, omega)
    if len(y_arr) < 4:
        raise ValueError(f"need at least 4 samples, got {len(y_arr)}")
    coef, _, rank, _ = np.linalg.lstsq(x, y_arr, rcond=None)
    if rank < 4:
        raise ValueError(
            "design matrix is rank deficient "
            f"(rank {rank}): columns {_degenerate_columns(x)} are linearly dependent"
        )
    resid = y_arr - x @ coef
    rss = float(resid @ resid)
    return float(coef[0]), float(coef[1]), float(coef[2]), float(coef[3]), rss


def _degenerate_columns(x: np.ndarray) -> str:
    norms = np.linalg.norm(x, axis=0)
    scaled = x / np.where(norms > 0.0, norms, 1.0)
    gram = np.abs(scaled.T @ scaled)
    np.fill_diagonal(gram, 0.0)
    a, b = np.unravel_index(int(np.argmax(gram)), gram.shape)
    a, b = sorted((int(a), int(b)))
    return f"'{_COLUMN_NAMES[a]}' and '{_COLUMN_NAMES[b]}'"


def objective(params_nl, y, times) -> float:
    """RSS of the linear subfit at (tc, m, omega); infeasible points
    (times past tc, bad exponent, degenerate design) score inf."""
    tc, m, omega = params_nl
    try:
        rss = linear_subfit(y, times, float(tc), float(m), float(omega))[4]
    except ValueError:
        return math.inf
    if not math.isfinite(rss):
        return math.inf
    return rss


def _reflect(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Fold points back into [lo, hi] by reflecting off the walls as
    often as needed (triangle-wave map, period 2(hi - lo))."""
    width = hi - lo
    y = np.mod(x - lo, 2.0 * width)
    y = np.where(y > width, 2.0 * width - y, y)
    return lo + y


def differential_evolution(func, bounds, config: DeConfig = DeConfig()) -> DeResult:
    """Minimize ``func`` over a box with rand/1/bin differential
    evolution.

    Mutants are a + F (b - c) for distinct random members, crossed
    binomially with one forced coordinate; selection is greedy and
    synchronous (all trials of a generation are built, then evaluated,
    then compared against their parents).  Everything is driven by one
    seeded generator, so a fixed seed fixes the run exactly.  The trace
    records the population best after initialization and after every
    generation; it never increases.
    """
    box = np.asarray(bounds, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2:
        raise ValueError("bounds must be a sequence of (lo, hi) pairs")
    lo, hi = box[:, 0].copy(), box[:, 1].copy()
    if np.any(lo >= hi):
        raise ValueError("every bound must have lo < hi")
    dim = len(box)
    pop_size = config.population_size
    rng = np.random.default_rng(config.seed)

    population = lo + rng.random((pop_size, dim)) * (hi - lo)
    fitness = np.array([func(x) for x in population])
    n_evals = pop_size
    trace = [float(np.min(fitness))]

    scale = config.differential_weight
    cr = config.crossover_rate
    for _ in range(config.max_generations):
        trials = np.empty_like(population)
        for i in range(pop_size):
            picks = rng.choice(pop_size - 1, size=3, replace=False)
            picks[picks >= i] += 1
            a, b, c = population[picks]
            mutant = _reflect(a + scale * (b - c), lo, hi)
            cross = rng.random(dim) < cr
            cross[rng.integers(dim)] = True
            trials[i] = np.where(cross, mutant, population[i])
        trial_fitness = np.array([func(x) for x in trials])
        n_evals += pop_size
        better = trial_fitness <= fitness
        population[better] = trials[better]
        fitness[better] = trial_fitness[better]
        trace.append(float(np.min(fitness)))

    best = int(np.argmin(fitness))
    best_x = population[best].copy()
    best_f = float(fitness[best])

    if config.local_polish and math.isfinite(best_f):

        def boxed(x):
            if np.any(x < lo) or np.any(x > hi):
                return math.inf
            return func(x)

        result = minimize(boxed, best_x, method="Nelder-Mead")
        n_evals += result.nfev
        if result.fun < best_f:
            best_x = np.asarray(result.x, dtype=float)
            best_f = float(result.fun)
        trace.append(best_f)

    return DeResult(
        best_x=best_x,
        best_f=best_f,
        trace=np.asarray(trace),
        n_evaluations=n_evals,
    )


def fit_segment(
    series,
    bounds: FitBounds | None = None,
    de_config: DeConfig = DeConfig(),
) -> FitResult:
    """Calibrate the model to a log-price segment sampled at
    0..len(series)-1.

    ``bounds`` defaults to ``FitBounds.for_segment``.  The result's
    ``rss`` equals the sum of squared residuals by construction.
    """
    y = np.asarray(series, dtype=float)
    if y.ndim != 1 or len(y) < 20:
        raise ValueError(f"need a 1-d segment of at least 20 samples, got {len(y)}")
    times = np.arange(len(y), dtype=float)
    if bounds is None:
        bounds = FitBounds.for_segment(len(y))

    de = differential_evolution(
        lambda p: objective(p, y, times), bounds.as_array(), de_config
    )
    if not math.isfinite(de.best_f):
        raise ValueError("no feasible (tc, m, omega) found inside the bounds")
    tc, m, omega = (float(v) for v in de.best_x)
    a, b, c1, c2, rss = linear_subfit(y, times, tc, m, omega)
    x = design_matrix(times, tc, m, omega)
    residuals = y - x @ np.array([a, b, c1, c2])
    params = LpplsParams(tc=tc, m=m, omega=omega, A=a, B=b, C1=c1, C2=c2)
    return FitResult(
        params=params,
        rss=rss,
        residuals=residuals,
        converged=bool(math.isfinite(rss)),
        trace=de.trace,
    )
