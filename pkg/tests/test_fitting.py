import math

import numpy as np
import pytest

from bubbletda.fitting import (
    DeConfig,
    FitBounds,
    _reflect,
    design_matrix,
    differential_evolution,
    fit_segment,
    linear_subfit,
    objective,
)
from bubbletda.lppls import LpplsParams, SyntheticConfig, generate_synthetic

# Reference design row at t=0 for (tc=637, m=0.3003, omega=6.889),
# computed independently at 50-digit precision.
DESIGN_ROW_T0 = [1.0, 6.951572740465461, 6.105940151536314, 3.322929194526899]


class TestDesignMatrix:
    def test_reference_row(self):
        x = design_matrix([0.0], tc=637.0, m=0.3003, omega=6.889)
        np.testing.assert_allclose(x[0], DESIGN_ROW_T0, rtol=1e-12)

    def test_shape(self):
        x = design_matrix(np.arange(50.0), tc=60.0, m=0.5, omega=8.0)
        assert x.shape == (50, 4)
        assert np.all(x[:, 0] == 1.0)

    def test_time_at_tc_rejected(self):
        with pytest.raises(ValueError, match="strictly less"):
            design_matrix([0.0, 10.0], tc=10.0, m=0.5, omega=8.0)

    def test_bad_exponent_and_frequency(self):
        with pytest.raises(ValueError, match="m must"):
            design_matrix([0.0], tc=10.0, m=1.5, omega=8.0)
        with pytest.raises(ValueError, match="omega"):
            design_matrix([0.0], tc=10.0, m=0.5, omega=-1.0)


class TestLinearSubfit:
    def test_exact_recovery(self):
        times = np.arange(100.0)
        truth = np.array([11.0, -3e-4, 4.4e-5, -3.4e-5])
        x = design_matrix(times, tc=120.0, m=0.4, omega=7.0)
        y = x @ truth
        a, b, c1, c2, rss = linear_subfit(y, times, 120.0, 0.4, 7.0)
        np.testing.assert_allclose([a, b, c1, c2], truth, rtol=1e-8)
        assert rss < 1e-16

    def test_rss_matches_residuals(self):
        rng = np.random.default_rng(0)
        times = np.arange(80.0)
        y = 10.0 + 0.01 * rng.standard_normal(80)
        a, b, c1, c2, rss = linear_subfit(y, times, 100.0, 0.5, 6.0)
        x = design_matrix(times, 100.0, 0.5, 6.0)
        resid = y - x @ np.array([a, b, c1, c2])
        assert rss == pytest.approx(float(resid @ resid), rel=1e-12)

    def test_degenerate_design_names_columns(self):
        # identical sample times make every regressor constant
        times = np.full(6, 3.0)
        with pytest.raises(ValueError, match="'const' and 'power'"):
            linear_subfit(np.ones(6), times, 10.0, 0.5, 6.0)

    def test_needs_four_samples(self):
        with pytest.raises(ValueError, match="at least 4"):
            linear_subfit(np.ones(3), np.arange(3.0), 10.0, 0.5, 6.0)


class TestObjective:
    def test_finite_on_feasible_point(self):
        y = np.linspace(10.0, 11.0, 50)
        value = objective((60.0, 0.5, 7.0), y, np.arange(50.0))
        assert math.isfinite(value) and value >= 0.0

    def test_inf_on_infeasible_points(self):
        y = np.ones(50)
        times = np.arange(50.0)
        assert objective((40.0, 0.5, 7.0), y, times) == math.inf  # tc inside data
        assert objective((60.0, 1.2, 7.0), y, times) == math.inf
        assert objective((60.0, 0.5, -2.0), y, times) == math.inf


class TestReflection:
    def test_folds_back_into_box(self):
        lo = np.array([0.0])
        hi = np.array([10.0])
        assert _reflect(np.array([-3.0]), lo, hi)[0] == pytest.approx(3.0)
        assert _reflect(np.array([12.0]), lo, hi)[0] == pytest.approx(8.0)
        assert _reflect(np.array([23.0]), lo, hi)[0] == pytest.approx(3.0)
        assert _reflect(np.array([7.0]), lo, hi)[0] == 7.0

    def test_random_points_always_inside(self):
        rng = np.random.default_rng(3)
        lo = np.array([-1.0, 0.0, 5.0])
        hi = np.array([1.0, 0.5, 9.0])
        x = rng.uniform(-50.0, 50.0, (200, 3))
        for row in x:
            folded = _reflect(row, lo, hi)
            assert np.all(folded >= lo) and np.all(folded <= hi)


def sphere(x):
    center = np.array([1.0, -2.0, 3.0])
    return float(np.sum((x - center) ** 2))


SPHERE_BOUNDS = [(-5.0, 5.0)] * 3


class TestDifferentialEvolution:
    def test_minimizes_sphere(self):
        cfg = DeConfig(population_size=20, max_generations=120, seed=1)
        result = differential_evolution(sphere, SPHERE_BOUNDS, cfg)
        np.testing.assert_allclose(result.best_x, [1.0, -2.0, 3.0], atol=1e-5)
        assert result.best_f < 1e-9

    def test_trace_never_increases(self):
        cfg = DeConfig(population_size=12, max_generations=60, seed=5)
        result = differential_evolution(sphere, SPHERE_BOUNDS, cfg)
        assert np.all(np.diff(result.trace) <= 0.0)

    def test_trace_length_contract(self):
        cfg = DeConfig(population_size=8, max_generations=25, seed=0,
                       local_polish=False)
        result = differential_evolution(sphere, SPHERE_BOUNDS, cfg)
        assert len(result.trace) == 26  # initial best + one per generation
        polished = differential_evolution(
            sphere, SPHERE_BOUNDS,
            DeConfig(population_size=8, max_generations=25, seed=0),
        )
        assert len(polished.trace) == 27

    def test_same_seed_identical_runs(self):
        cfg = DeConfig(population_size=10, max_generations=40, seed=9)
        a = differential_evolution(sphere, SPHERE_BOUNDS, cfg)
        b = differential_evolution(sphere, SPHERE_BOUNDS, cfg)
        assert np.array_equal(a.best_x, b.best_x)
        assert np.array_equal(a.trace, b.trace)
        assert a.n_evaluations == b.n_evaluations

    def test_different_seeds_differ(self):
        a = differential_evolution(
            sphere, SPHERE_BOUNDS,
            DeConfig(population_size=10, max_generations=10, seed=0,
                     local_polish=False))
        b = differential_evolution(
            sphere, SPHERE_BOUNDS,
            DeConfig(population_size=10, max_generations=10, seed=1,
                     local_polish=False))
        assert not np.array_equal(a.trace, b.trace)

    def test_result_stays_in_box(self):
        bounds = [(0.0, 0.3), (10.0, 10.5)]

        def shifted(x):
            return float((x[0] - 5.0) ** 2 + (x[1] + 2.0) ** 2)

        result = differential_evolution(
            shifted, bounds, DeConfig(population_size=8, max_generations=30, seed=2)
        )
        lo, hi = np.array(bounds).T
        assert np.all(result.best_x >= lo) and np.all(result.best_x <= hi)

    def test_bad_bounds_rejected(self):
        with pytest.raises(ValueError, match="lo < hi"):
            differential_evolution(sphere, [(0.0, 0.0)] * 3, DeConfig())


BASE_PARAMS = LpplsParams(
    tc=200.0, m=0.3, omega=6.7, A=11.0, B=-3e-4, C1=4.4e-5, C2=-3.4e-5
)


class TestFitSegment:
    def fast_config(self, seed=0):
        return DeConfig(population_size=20, max_generations=150, seed=seed)

    def test_noiseless_round_trip(self):
        series = generate_synthetic(BASE_PARAMS, SyntheticConfig(n_points=200))
        fit = fit_segment(series, de_config=self.fast_config())
        assert abs(fit.params.tc - 200.0) <= 2.0
        assert abs(fit.params.m - 0.3) <= 0.05
        assert abs(fit.params.omega - 6.7) <= 0.3
        assert fit.rss < 1e-10
        assert fit.converged

    def test_rss_consistent_with_residuals(self):
        series = generate_synthetic(BASE_PARAMS, SyntheticConfig(n_points=200))
        fit = fit_segment(series, de_config=self.fast_config())
        assert fit.rss == pytest.approx(float(fit.residuals @ fit.residuals),
                                        rel=1e-12)
        assert fit.mean_abs_residual >= 0.0

    def test_deterministic_given_seed(self):
        series = generate_synthetic(
            BASE_PARAMS, SyntheticConfig(n_points=200, sigma=1e-4, seed=3)
        )
        a = fit_segment(series, de_config=self.fast_config(seed=11))
        b = fit_segment(series, de_config=self.fast_config(seed=11))
        assert a.params == b.params
        assert a.rss == b.rss

    def test_short_segment_rejected(self):
        with pytest.raises(ValueError, match="at least 20"):
            fit_segment(np.ones(19))

    def test_default_bounds(self):
        bounds = FitBounds.for_segment(100)
        assert bounds.tc == (99.0, 149.0)
        assert bounds.m == (0.01, 0.99)
        assert bounds.omega == (2.0, 25.0)


class TestConfigValidation:
    def test_de_config(self):
        with pytest.raises(ValueError):
            DeConfig(population_size=3)
        with pytest.raises(ValueError):
            DeConfig(differential_weight=0.0)
        with pytest.raises(ValueError):
            DeConfig(crossover_rate=1.5)
        with pytest.raises(ValueError):
            DeConfig(max_generations=0)

    def test_fit_bounds(self):
        with pytest.raises(ValueError):
            FitBounds(tc=(10.0, 5.0))
        with pytest.raises(ValueError):
            FitBounds(tc=(10.0, 20.0), m=(0.0, 0.5))
        with pytest.raises(ValueError):
            FitBounds(tc=(10.0, 20.0), omega=(-1.0, 5.0))
