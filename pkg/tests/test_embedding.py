import numpy as np
import pytest

from bubbletda.embedding import (
    EmbeddingConfig,
    delay_embed,
    min_series_length,
    sliding_windows,
)


class TestDelayEmbed:
    def test_vector_count(self):
        x = np.arange(100.0)
        assert delay_embed(x, dim=4, delay=5).shape == (85, 4)
        assert delay_embed(x, dim=3, delay=1).shape == (98, 3)

    def test_coordinates_are_lagged_samples(self):
        x = np.arange(30.0) ** 2
        z = delay_embed(x, dim=3, delay=4)
        for t in range(len(z)):
            assert z[t, 0] == x[t]
            assert z[t, 1] == x[t + 4]
            assert z[t, 2] == x[t + 8]

    def test_exact_minimum_length(self):
        x = np.arange(11.0)  # (dim-1)*delay + 1 = 11
        z = delay_embed(x, dim=3, delay=5)
        assert len(z) == 1
        assert np.array_equal(z[0], [0.0, 5.0, 10.0])

    def test_too_short_reports_requirement(self):
        with pytest.raises(ValueError, match="at least 11"):
            delay_embed(np.arange(10.0), dim=3, delay=5)

    def test_rejects_2d_input(self):
        with pytest.raises(ValueError, match="one-dimensional"):
            delay_embed(np.zeros((5, 2)), dim=2, delay=1)


class TestSlidingWindows:
    def test_window_count_and_content(self):
        pts = np.arange(20.0).reshape(10, 2)
        wins = sliding_windows(pts, window=4)
        assert len(wins) == 7
        assert np.array_equal(wins[0], pts[0:4])
        assert np.array_equal(wins[6], pts[6:10])

    def test_single_window(self):
        pts = np.zeros((5, 3))
        assert len(sliding_windows(pts, window=5)) == 1

    def test_not_enough_points(self):
        with pytest.raises(ValueError, match="at least 6"):
            sliding_windows(np.zeros((5, 2)), window=6)


class TestConfig:
    def test_defaults(self):
        cfg = EmbeddingConfig()
        assert (cfg.dim, cfg.delay, cfg.window) == (4, 5, 72)

    def test_min_series_length(self):
        assert min_series_length(EmbeddingConfig()) == 87
        assert min_series_length(EmbeddingConfig(dim=3, delay=5, window=48)) == 58

    def test_validation(self):
        with pytest.raises(ValueError):
            EmbeddingConfig(dim=1)
        with pytest.raises(ValueError):
            EmbeddingConfig(delay=0)
        with pytest.raises(ValueError):
            EmbeddingConfig(window=1)
