import json

import numpy as np
import pytest

from bubbletda import io
from bubbletda.cli import main
from bubbletda.lppls import LpplsParams, SyntheticConfig, generate_synthetic

from test_segmentation import sawtooth_prices


def write_prices(path, prices):
    with open(path, "w") as fh:
        fh.write("timestamp,price\n")
        for i, p in enumerate(prices):
            fh.write(f"{i},{float(p)!r}\n")


@pytest.fixture
def sawtooth_csv(tmp_path):
    path = tmp_path / "saw.csv"
    write_prices(path, sawtooth_prices())
    return path


class TestSynth:
    def test_default_row_count(self, tmp_path, capsys):
        out = tmp_path / "series.csv"
        assert main(["synth", "--out", str(out)]) == 0
        series = io.read_series_csv(out)
        assert len(series) == 637
        assert "637 rows" in capsys.readouterr().out

    def test_default_params_match_library(self, tmp_path):
        out = tmp_path / "series.csv"
        main(["synth", "--out", str(out)])
        expected = generate_synthetic(
            LpplsParams(tc=637.0, m=0.3003, omega=6.889, A=11.11,
                        B=-2.937e-4, C1=4.372e-5, C2=-3.362e-5),
            SyntheticConfig(n_points=637),
        )
        assert np.array_equal(io.read_series_csv(out), expected)

    def test_sigma_zero_twice_identical(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        main(["synth", "--n-points", "50", "--out", str(a)])
        main(["synth", "--n-points", "50", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_seeded_noise_reproducible(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        args = ["synth", "--n-points", "50", "--sigma", "0.01", "--seed", "5"]
        main(args + ["--out", str(a)])
        main(args + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_zero_points_is_usage_error(self, tmp_path, capsys):
        code = main(["synth", "--n-points", "0", "--out", str(tmp_path / "x.csv")])
        assert code == 2
        assert "error:" in capsys.readouterr().err


class TestSegment:
    def test_sawtooth_events(self, sawtooth_csv, tmp_path, capsys):
        out = tmp_path / "seg"
        code = main([
            "segment", "--input", str(sawtooth_csv),
            "--mode", "constant", "--eps0", "0.1", "--min-len", "0",
            "--out-dir", str(out),
        ])
        assert code == 0
        events = (out / "events.csv").read_text().splitlines()
        assert events == [
            "kind,extremum_index,crossing_index",
            "peak,5,8",
            "trough,10,13",
            "peak,15,18",
            "trough,20,23",
            "peak,25,28",
        ]
        segments = (out / "segments.csv").read_text().splitlines()
        assert segments[0] == "start,end,direction"
        assert "8,10,down" in segments
        # the warm-up segment is reported, not listed
        stdout = capsys.readouterr().out
        assert "warm-up" in stdout and "unterminated" in stdout

    def test_min_len_filters(self, sawtooth_csv, tmp_path):
        out = tmp_path / "seg"
        main([
            "segment", "--input", str(sawtooth_csv),
            "--mode", "constant", "--eps0", "0.1", "--min-len", "10",
            "--out-dir", str(out),
        ])
        assert (out / "segments.csv").read_text().splitlines() == [
            "start,end,direction"
        ]

    def test_manual_cut(self, sawtooth_csv, tmp_path):
        out = tmp_path / "seg"
        main([
            "segment", "--input", str(sawtooth_csv),
            "--mode", "constant", "--eps0", "0.1", "--min-len", "0",
            "--cut", "8:10:9", "--out-dir", str(out),
        ])
        assert "9,10,down" in (out / "segments.csv").read_text()

    def test_empty_input_error_exit(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        code = main(["segment", "--input", str(empty), "--out-dir", str(tmp_path)])
        assert code == 2
        assert "empty" in capsys.readouterr().err

    def test_missing_input_error_exit(self, tmp_path):
        code = main([
            "segment", "--input", str(tmp_path / "nope.csv"),
            "--out-dir", str(tmp_path),
        ])
        assert code == 2


@pytest.fixture
def sine_csv(tmp_path):
    path = tmp_path / "sine.csv"
    io.write_series_csv(path, np.sin(0.3 * np.arange(160.0)))
    return path


class TestTda:
    def test_single_window_norms(self, sine_csv, tmp_path):
        out = tmp_path / "tda"
        code = main([
            "tda", "--input", str(sine_csv), "--window", "48",
            "--delay", "5", "--dim", "3", "--out-dir", str(out),
        ])
        assert code == 0
        lines = (out / "norms.csv").read_text().splitlines()
        assert lines[0] == "window_start,window_end,norm"
        # 160 samples, dim 3/delay 5 -> 150 vectors -> 103 windows
        assert len(lines) == 104

    def test_sweep_mode_aligned_columns(self, sine_csv, tmp_path):
        out = tmp_path / "tda"
        code = main([
            "tda", "--input", str(sine_csv), "--window", "72,60,48",
            "--delay", "5", "--dim", "3", "--out-dir", str(out),
        ])
        assert code == 0
        lines = (out / "norms_sweep.csv").read_text().splitlines()
        assert lines[0] == "window_start,norm_w72,norm_w60,norm_w48"
        # short windows have more rows; long-window cells drain to blanks
        last = lines[-1].split(",")
        assert last[1] == "" and last[3] != ""

    def test_window_larger_than_data_reports_requirement(self, sine_csv, tmp_path, capsys):
        code = main([
            "tda", "--input", str(sine_csv), "--window", "200",
            "--delay", "5", "--dim", "3", "--out-dir", str(tmp_path),
        ])
        assert code == 2
        assert "need at least 210" in capsys.readouterr().err

    def test_diagram_dump(self, sine_csv, tmp_path):
        out = tmp_path / "tda"
        main([
            "tda", "--input", str(sine_csv), "--window", "48",
            "--delay", "5", "--dim", "3", "--dump-window", "0",
            "--out-dir", str(out),
        ])
        dump = (out / "diagrams_window_0.csv").read_text().splitlines()
        assert dump[0] == "dim,birth,death,multiplicity"
        assert any(row.endswith(",inf,1") for row in dump[1:])

    def test_per_segment_mode(self, tmp_path):
        series_path = tmp_path / "series.csv"
        io.write_series_csv(series_path, np.sin(0.3 * np.arange(400.0)))
        seg_path = tmp_path / "segments.csv"
        seg_path.write_text("start,end,direction\n0,199,up\n200,399,down\n")
        out = tmp_path / "tda"
        code = main([
            "tda", "--input", str(series_path), "--segments", str(seg_path),
            "--window", "48", "--delay", "5", "--dim", "3",
            "--out-dir", str(out),
        ])
        assert code == 0
        assert (out / "norms_seg_0_199.csv").exists()
        assert (out / "norms_seg_200_399.csv").exists()


class TestFit:
    BASE = LpplsParams(tc=200.0, m=0.3, omega=6.7, A=11.0,
                       B=-3e-4, C1=4.4e-5, C2=-3.4e-5)

    @pytest.fixture
    def synthetic_csv(self, tmp_path):
        path = tmp_path / "lppls.csv"
        io.write_series_csv(
            path, generate_synthetic(self.BASE, SyntheticConfig(n_points=200))
        )
        return path

    def fit_args(self, csv_path, out):
        return [
            "fit", "--input", str(csv_path), "--out-dir", str(out),
            "--pop", "20", "--generations", "120", "--seed", "0",
        ]

    def test_round_trip_json(self, synthetic_csv, tmp_path):
        out = tmp_path / "fit"
        assert main(self.fit_args(synthetic_csv, out)) == 0
        payload = json.loads((out / "fit.json").read_text())
        assert set(payload) == {
            "tc", "m", "omega", "A", "B", "C1", "C2", "rss", "n", "converged"
        }
        assert payload["n"] == 200
        assert abs(payload["tc"] - 200.0) <= 2.0
        assert payload["converged"] is True
        residuals = (out / "residuals.csv").read_text().splitlines()
        assert len(residuals) == 201

    def test_fixed_seed_identical_json(self, synthetic_csv, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        main(self.fit_args(synthetic_csv, out_a))
        main(self.fit_args(synthetic_csv, out_b))
        assert (out_a / "fit.json").read_bytes() == (out_b / "fit.json").read_bytes()

    def test_segment_bounds(self, synthetic_csv, tmp_path):
        out = tmp_path / "fit"
        code = main(self.fit_args(synthetic_csv, out) + ["--start", "100", "--end", "199"])
        assert code == 0
        assert json.loads((out / "fit.json").read_text())["n"] == 100

    def test_bad_bounds_error(self, synthetic_csv, tmp_path, capsys):
        code = main(self.fit_args(synthetic_csv, tmp_path) + ["--start", "50", "--end", "20"])
        assert code == 2
        assert "bounds" in capsys.readouterr().err

    def test_malformed_row_names_line(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("t,log_price\n0,1.0\n1,bogus\n")
        code = main(["fit", "--input", str(path), "--out-dir", str(tmp_path)])
        assert code == 2
        assert "line 3" in capsys.readouterr().err


class TestConfigFile:
    def test_precedence_flag_over_file_over_default(self, sawtooth_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("mode = constant\neps0 = 0.1\nmin_len = 0\n")
        out_file = tmp_path / "from_file"
        main(["segment", "--input", str(sawtooth_csv), "--config", str(cfg),
              "--out-dir", str(out_file)])
        # eps0 from the file finds the 0.1-tolerance events
        events = (out_file / "events.csv").read_text()
        assert "peak,5,8" in events

        out_flag = tmp_path / "from_flag"
        main(["segment", "--input", str(sawtooth_csv), "--config", str(cfg),
              "--eps0", "0.03", "--out-dir", str(out_flag)])
        # the flag overrides the file tolerance
        assert "peak,5,6" in (out_flag / "events.csv").read_text()

    def test_bad_config_line(self, sawtooth_csv, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("this line has no equals sign\n")
        code = main(["segment", "--input", str(sawtooth_csv),
                     "--config", str(cfg), "--out-dir", str(tmp_path)])
        assert code == 2
        assert "key = value" in capsys.readouterr().err


class TestReport:
    def test_bundle_layout(self, tmp_path):
        # slow drift plus a dominant oscillation: several long trends
        # worth fitting and scanning
        t = np.arange(900.0)
        logp = 0.0005 * t + 0.2 * np.sin(2.0 * np.pi * t / 300.0)
        series_path = tmp_path / "series.csv"
        io.write_series_csv(series_path, logp)
        out = tmp_path / "report"
        code = main([
            "report", "--input", str(series_path),
            "--mode", "constant", "--eps0", "0.04", "--min-len", "48",
            "--window", "48", "--delay", "5", "--dim", "3",
            "--pop", "15", "--generations", "60", "--seed", "0",
            "--out-dir", str(out),
        ])
        assert code == 0
        assert (out / "events.csv").exists()
        assert (out / "segments.csv").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["segments"], "expected at least one reported segment"
        for entry in summary["segments"]:
            seg_dir = out / f"segment_{entry['start']}_{entry['end']}"
            if "rss" in entry:
                assert (seg_dir / "fit.json").exists()
            if "peak_position" in entry:
                assert (seg_dir / "norms.csv").exists()
                assert (seg_dir / "peak.json").exists()
