"""Command-line front-end.

Subcommands: synth, segment, tda, fit, report.  Every flag may also be
given in a config file (``--config``) of flat ``key = value`` lines,
with keys equal to the long flag names (dashes as underscores); CLI
flags override the file, which overrides built-in defaults.  Exit code
0 means all requested outputs were written; usage and data errors exit
with 2 and a message on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .embedding import EmbeddingConfig, delay_embed, min_series_length, sliding_windows
from .fitting import DeConfig, FitBounds, fit_segment
from .lppls import LpplsParams, SyntheticConfig, generate_synthetic
from .persistence import RipsConfig, pairwise_distances, rips_persistence
from .pipeline import TdaConfig, norms_over_windows, peak_report
from .segmentation import SegmentationConfig, adjust_segments, segment

# Built-in parameter set of the default synthetic series.
_SYNTH_DEFAULTS = {
    "tc": 637.0,
    "m": 0.3003,
    "omega": 6.889,
    "A": 11.11,
    "B": -2.937e-4,
    "C1": 4.372e-5,
    "C2": -3.362e-5,
}


class CliError(Exception):
    pass


def _read_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    cfg: dict[str, str] = {}
    p = Path(path)
    if not p.is_file():
        raise CliError(f"config file not found: {path}")
    for lineno, line in enumerate(p.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise CliError(f"{path}: line {lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def _resolve(args: argparse.Namespace, config: dict[str, str], key: str, default, cast):
    """CLI flag beats config file beats default."""
    flag_value = getattr(args, key)
    if flag_value is not None:
        return flag_value
    if key in config:
        try:
            return cast(config[key])
        except ValueError:
            raise CliError(f"config key {key!r}: cannot parse {config[key]!r}") from None
    return default


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_window_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise CliError(f"--window expects integers like '72' or '72,60,48', got {text!r}") from None
    if not values:
        raise CliError("--window got an empty list")
    return values


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _add_config_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value file of flag defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bubbletda",
        description="Bubble early-warning toolkit: trend segmentation, "
        "singularity-model fits, and windowed topological signals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic log-price series")
    _add_config_flag(p)
    for name in ("tc", "m", "omega", "A", "B", "C1", "C2"):
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--n-points", type=int, default=None, dest="n_points")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="synthetic.csv")

    p = sub.add_parser("segment", help="split a price series into trends")
    _add_config_flag(p)
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=["volatility", "constant"], default=None)
    p.add_argument("--eps0", type=float, default=None)
    p.add_argument("--w0", type=int, default=None)
    p.add_argument("--min-len", type=int, default=None, dest="min_len")
    p.add_argument("--initial-direction", choices=["up", "down"], default=None,
                   dest="initial_direction")
    p.add_argument("--start-index", type=int, default=None, dest="start_index")
    p.add_argument("--cut", action="append", default=None, metavar="START:END:NEW",
                   help="move the start of raw segment (START, END) to NEW; repeatable")
    p.add_argument("--out-dir", default=".", dest="out_dir")

    p = sub.add_parser("tda", help="windowed landscape-norm signal")
    _add_config_flag(p)
    p.add_argument("--input", required=True)
    p.add_argument("--window", default=None,
                   help="window size, or comma list like 72,60,48 for a sweep")
    p.add_argument("--delay", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--p", type=float, default=None,
                   help="landscape norm order (inf allowed)")
    p.add_argument("--max-filtration", type=float, default=None, dest="max_filtration")
    p.add_argument("--segments", default=None,
                   help="segments CSV; emit one norm series per segment")
    p.add_argument("--dump-window", type=int, default=None, dest="dump_window",
                   help="also dump the persistence diagrams of this window index")
    p.add_argument("--out-dir", default=".", dest="out_dir")

    p = sub.add_parser("fit", help="calibrate the singularity model to a segment")
    _add_config_flag(p)
    p.add_argument("--input", required=True)
    p.add_argument("--start", type=int, default=None, help="first row of the segment")
    p.add_argument("--end", type=int, default=None, help="last row (inclusive)")
    p.add_argument("--tc-lo", type=float, default=None, dest="tc_lo")
    p.add_argument("--tc-hi", type=float, default=None, dest="tc_hi")
    p.add_argument("--m-lo", type=float, default=None, dest="m_lo")
    p.add_argument("--m-hi", type=float, default=None, dest="m_hi")
    p.add_argument("--omega-lo", type=float, default=None, dest="omega_lo")
    p.add_argument("--omega-hi", type=float, default=None, dest="omega_hi")
    p.add_argument("--pop", type=int, default=None)
    p.add_argument("--generations", type=int, default=None)
    p.add_argument("--F", type=float, default=None, dest="F")
    p.add_argument("--CR", type=float, default=None, dest="CR")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-polish", action="store_true", dest="no_polish")
    p.add_argument("--out-dir", default=".", dest="out_dir")

    p = sub.add_parser("report", help="segment, fit and signal in one pass")
    _add_config_flag(p)
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=["volatility", "constant"], default=None)
    p.add_argument("--eps0", type=float, default=None)
    p.add_argument("--w0", type=int, default=None)
    p.add_argument("--min-len", type=int, default=None, dest="min_len")
    p.add_argument("--initial-direction", choices=["up", "down"], default=None,
                   dest="initial_direction")
    p.add_argument("--start-index", type=int, default=None, dest="start_index")
    p.add_argument("--window", default=None)
    p.add_argument("--delay", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--pop", type=int, default=None)
    p.add_argument("--generations", type=int, default=None)
    p.add_argument("--F", type=float, default=None, dest="F")
    p.add_argument("--CR", type=float, default=None, dest="CR")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-polish", action="store_true", dest="no_polish")
    p.add_argument("--out-dir", default=".", dest="out_dir")
    return parser


def _cmd_synth(args: argparse.Namespace) -> None:
    cfg = _read_config(args.config)
    values = {
        name: _resolve(args, cfg, name, default, float)
        for name, default in _SYNTH_DEFAULTS.items()
    }
    n_points = _resolve(args, cfg, "n_points", 637, int)
    sigma = _resolve(args, cfg, "sigma", 0.0, float)
    seed = _resolve(args, cfg, "seed", 0, int)
    params = LpplsParams(**values)
    series = generate_synthetic(params, SyntheticConfig(n_points, sigma, seed))
    io.write_series_csv(args.out, series)
    print(f"wrote {args.out} ({len(series)} rows)")


def _segmentation_config(args, cfg) -> SegmentationConfig:
    return SegmentationConfig(
        tolerance_mode=_resolve(args, cfg, "mode", "volatility", str),
        eps0=_resolve(args, cfg, "eps0", 15.0, float),
        w0=_resolve(args, cfg, "w0", 240, int),
        min_segment_len=_resolve(args, cfg, "min_len", 48, int),
        initial_direction=_resolve(args, cfg, "initial_direction", "up", str),
        start_index=_resolve(args, cfg, "start_index", None, int),
    )


def _parse_cuts(cut_args) -> dict[tuple[int, int], int]:
    cuts: dict[tuple[int, int], int] = {}
    for raw in cut_args or []:
        parts = raw.split(":")
        if len(parts) != 3:
            raise CliError(f"--cut expects START:END:NEW, got {raw!r}")
        try:
            start, end, new = (int(x) for x in parts)
        except ValueError:
            raise CliError(f"--cut expects integers, got {raw!r}") from None
        cuts[(start, end)] = new
    return cuts


def _cmd_segment(args: argparse.Namespace) -> None:
    cfg = _read_config(args.config)
    seg_cfg = _segmentation_config(args, cfg)
    logp = io.read_series_csv(args.input)
    result = segment(np.exp(logp), seg_cfg)
    adjusted = adjust_segments(
        result.raw_segments, seg_cfg.min_segment_len, _parse_cuts(args.cut)
    )
    out = _out_dir(args.out_dir)
    io.write_events_csv(out / "events.csv", result.events)
    io.write_segments_csv(out / "segments.csv", [s for s in adjusted if not s.warmup])
    kept = sum(1 for s in adjusted if not s.warmup)
    msg = f"wrote {out / 'events.csv'} ({len(result.events)} events), " \
          f"{out / 'segments.csv'} ({kept} segments)"
    warm = [s for s in adjusted if s.warmup]
    if warm:
        msg += f"; warm-up segment ({warm[0].start}, {warm[0].end}) not listed"
    if result.open_trend is not None:
        msg += (
            f"; open {result.open_trend.direction}-trend from "
            f"{result.open_trend.start} left unterminated"
        )
    print(msg)


def _tda_config(args, cfg, window: int) -> TdaConfig:
    p_raw = _resolve(args, cfg, "p", 1.0, float)
    if hasattr(args, "max_filtration"):
        max_filt = _resolve(args, cfg, "max_filtration", None, float)
    elif "max_filtration" in cfg:
        max_filt = float(cfg["max_filtration"])
    else:
        max_filt = None
    return TdaConfig(
        embedding=EmbeddingConfig(
            dim=_resolve(args, cfg, "dim", 4, int),
            delay=_resolve(args, cfg, "delay", 5, int),
            window=window,
        ),
        p=p_raw,
        rips=RipsConfig(max_filtration=max_filt),
    )


def _cmd_tda(args: argparse.Namespace) -> None:
    cfg = _read_config(args.config)
    window_text = args.window if args.window is not None else cfg.get("window", "72")
    windows = _parse_window_list(str(window_text))
    logp = io.read_series_csv(args.input)
    out = _out_dir(args.out_dir)

    targets: list[tuple[str, np.ndarray]] = [("", logp)]
    if args.segments is not None:
        targets = []
        for seg in io.read_segments_csv(args.segments):
            targets.append((f"_seg_{seg.start}_{seg.end}", logp[seg.start : seg.end + 1]))

    written = []
    for suffix, series in targets:
        if len(windows) == 1:
            tda_cfg = _tda_config(args, cfg, windows[0])
            signal = norms_over_windows(series, tda_cfg)
            path = out / f"norms{suffix}.csv"
            io.write_norms_csv(path, signal)
            written.append(str(path))
            if args.dump_window is not None:
                _dump_window_diagrams(series, tda_cfg, args.dump_window, out, suffix)
        else:
            signals = {}
            for w in windows:
                tda_cfg = _tda_config(args, cfg, w)
                signals[w] = norms_over_windows(series, tda_cfg)
            path = out / f"norms_sweep{suffix}.csv"
            io.write_norms_sweep_csv(path, signals)
            written.append(str(path))
    print(f"wrote {', '.join(written)}")


def _dump_window_diagrams(series, tda_cfg: TdaConfig, index: int, out: Path, suffix: str) -> None:
    emb = tda_cfg.embedding
    points = delay_embed(series, emb.dim, emb.delay)
    clouds = sliding_windows(points, emb.window)
    if not 0 <= index < len(clouds):
        raise CliError(f"--dump-window {index} out of range (have {len(clouds)} windows)")
    diagrams = rips_persistence(pairwise_distances(clouds[index]), tda_cfg.rips)
    io.write_diagrams_csv(out / f"diagrams{suffix}_window_{index}.csv", diagrams)


def _fit_bounds(args, cfg, n: int) -> FitBounds:
    default = FitBounds.for_segment(n)
    return FitBounds(
        tc=(
            _resolve(args, cfg, "tc_lo", default.tc[0], float),
            _resolve(args, cfg, "tc_hi", default.tc[1], float),
        ),
        m=(
            _resolve(args, cfg, "m_lo", default.m[0], float),
            _resolve(args, cfg, "m_hi", default.m[1], float),
        ),
        omega=(
            _resolve(args, cfg, "omega_lo", default.omega[0], float),
            _resolve(args, cfg, "omega_hi", default.omega[1], float),
        ),
    )


def _de_config(args, cfg) -> DeConfig:
    if args.no_polish:
        polish = False
    else:
        polish = not _parse_bool(cfg.get("no_polish", "false"))
    return DeConfig(
        population_size=_resolve(args, cfg, "pop", 30, int),
        max_generations=_resolve(args, cfg, "generations", 500, int),
        differential_weight=_resolve(args, cfg, "F", 0.8, float),
        crossover_rate=_resolve(args, cfg, "CR", 0.9, float),
        seed=_resolve(args, cfg, "seed", 0, int),
        local_polish=polish,
    )


def _cmd_fit(args: argparse.Namespace) -> None:
    cfg = _read_config(args.config)
    logp = io.read_series_csv(args.input)
    start = _resolve(args, cfg, "start", 0, int)
    end = _resolve(args, cfg, "end", len(logp) - 1, int)
    if not 0 <= start < end < len(logp):
        raise CliError(
            f"segment bounds ({start}, {end}) invalid for {len(logp)} rows"
        )
    series = logp[start : end + 1]
    fit = fit_segment(series, _fit_bounds(args, cfg, len(series)), _de_config(args, cfg))
    out = _out_dir(args.out_dir)
    io.write_fit_json(out / "fit.json", fit)
    io.write_residuals_csv(out / "residuals.csv", fit.residuals)
    print(
        f"wrote {out / 'fit.json'}, {out / 'residuals.csv'} "
        f"(rss={fit.rss:.6g}, tc={fit.params.tc:.3f})"
    )


def _cmd_report(args: argparse.Namespace) -> None:
    cfg = _read_config(args.config)
    logp = io.read_series_csv(args.input)
    seg_cfg = _segmentation_config(args, cfg)
    result = segment(np.exp(logp), seg_cfg)
    adjusted = adjust_segments(result.raw_segments, seg_cfg.min_segment_len)
    out = _out_dir(args.out_dir)
    io.write_events_csv(out / "events.csv", result.events)
    segments = [s for s in adjusted if not s.warmup]
    io.write_segments_csv(out / "segments.csv", segments)

    window_text = args.window if args.window is not None else cfg.get("window", "72")
    window = _parse_window_list(str(window_text))[0]
    tda_cfg = _tda_config(args, cfg, window)
    de_cfg = _de_config(args, cfg)

    summary: dict = {
        "n_samples": len(logp),
        "n_events": len(result.events),
        "segments": [],
        "warmup": None,
        "open_trend": None,
    }
    warm = [s for s in adjusted if s.warmup]
    if warm:
        summary["warmup"] = {"start": warm[0].start, "end": warm[0].end}
    if result.open_trend is not None:
        summary["open_trend"] = {
            "start": result.open_trend.start,
            "direction": result.open_trend.direction,
        }

    need = min_series_length(tda_cfg.embedding)
    for seg in segments:
        series = logp[seg.start : seg.end + 1]
        seg_dir = _out_dir(out / f"segment_{seg.start}_{seg.end}")
        entry: dict = {
            "start": seg.start,
            "end": seg.end,
            "direction": seg.direction,
            "n": len(series),
        }
        if len(series) >= 20:
            fit = fit_segment(series, de_config=de_cfg)
            io.write_fit_json(seg_dir / "fit.json", fit)
            io.write_residuals_csv(seg_dir / "residuals.csv", fit.residuals)
            entry["rss"] = fit.rss
        else:
            entry["fit_skipped"] = f"need 20 samples, have {len(series)}"
        if len(series) >= need:
            signal = norms_over_windows(series, tda_cfg)
            io.write_norms_csv(seg_dir / "norms.csv", signal)
            peak = peak_report(signal)
            io.write_peak_json(seg_dir / "peak.json", peak)
            entry["peak_position"] = peak.position
        else:
            entry["tda_skipped"] = f"need {need} samples, have {len(series)}"
        summary["segments"].append(entry)

    with (out / "summary.json").open("w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"wrote report under {out} ({len(segments)} segments)")


_DISPATCH = {
    "synth": _cmd_synth,
    "segment": _cmd_segment,
    "tda": _cmd_tda,
    "fit": _cmd_fit,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _DISPATCH[args.command](args)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
