"""Command-line surface: image filtering, stream rank finding, per-cycle
trace export, and frame-rate benchmarking.

Exit codes: 0 on success, 1 for validation or I/O problems, 2 when a
``--check`` cross-verification against the sort oracle fails.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import imaging, oracle, pgm
from .core import run_stream, stream_cycles
from .ensembles import CADENCE, Ensemble9753, sliding_cycles
from .imaging import Border, Rect, frame_rate, percentile_to_rank
from .multichannel import mc_stream_cycles
from .params import ConfigError, FilterParams, FramingError, McParams, padded_bits

DEFAULT_CLOCK_HZ = 275e6


class CheckFailure(Exception):
    """A --check cross-verification against the oracle found a mismatch."""


def _read_values(path: str | None) -> list[int]:
    if path is None:
        text = sys.stdin.read()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    values = []
    for token in text.split():
        try:
            values.append(int(token))
        except ValueError:
            raise ConfigError(f"non-integer token {token!r} in the input stream")
    return values


def _infer_bits(values, override: int | None) -> int:
    if override is not None:
        return override
    peak = max(values, default=0)
    if peak < 0:
        raise ConfigError("samples must be non-negative")
    return max(2, padded_bits(peak.bit_length()))


def _resolve_rank(args, n: int) -> int:
    if (args.rank is None) == (args.percentile is None):
        raise ConfigError("give exactly one of --rank and --percentile")
    if args.rank is not None:
        return args.rank
    return percentile_to_rank(args.percentile, n)


def _parse_dims(text: str) -> tuple[int, int]:
    w, _, h = text.partition("x")
    try:
        dims = int(w), int(h)
    except ValueError as exc:
        raise ConfigError(f"bad dimensions {text!r}") from exc
    if dims[0] < 1 or dims[1] < 1:
        raise ConfigError(f"dimensions must be positive, got {text!r}")
    return dims


def _add_rank_args(parser):
    parser.add_argument("--rank", type=int, default=None,
                        help="rank M: 1 = maximum, N = minimum")
    parser.add_argument("--percentile", type=float, default=None,
                        help="percentile in (0, 1]; 0.5 selects the median")


def cmd_filter(args) -> int:
    image, maxval = pgm.read_pgm(args.input)
    shape = imaging.parse_window(args.window)
    n = imaging.window_size(shape)
    rank = _resolve_rank(args, n)
    border = Border(args.border)
    if args.engine == "9753":
        raise ConfigError(
            "the 9753 ensemble is a trace/bench engine, not an image filter; "
            "use --engine single, multichannel, or sliding"
        )
    report = imaging.run_filter(
        image, shape, rank, engine=args.engine, border=border,
        data_bits=pgm.bits_for_maxval(maxval), threads=args.threads)
    binary = not args.ascii
    pgm.write_pgm(args.output, report.image, maxval, binary=binary)
    height, width = image.shape
    fps = frame_rate(args.clock, width, height, n)
    print(f"window: {imaging.format_window(shape)}  N={n}  M={rank}")
    print(f"engine: {report.engine}  border: {border.value}  "
          f"data-bits: {report.data_bits}")
    print(f"cycles: {report.cycles} simulated "
          f"({report.cycles_per_result:.3f} per result)")
    print(f"frame rate: {fps:.2f} fps at {args.clock / 1e6:.1f} MHz "
          f"(single-core formula)")
    return 0


def cmd_rank(args) -> int:
    values = _read_values(args.input)
    if args.set_size < 1:
        raise ConfigError("--set-size must be positive")
    rank = _resolve_rank(args, args.set_size)
    if len(values) % args.set_size:
        raise ConfigError(
            f"{len(values)} values is not a multiple of the set size "
            f"{args.set_size}"
        )
    bits = _infer_bits(values, args.data_bits)
    params = FilterParams(data_bits=bits, set_size=args.set_size, rank=rank)
    results = run_stream(params, values)
    for value in results:
        print(int(value))
    if args.check:
        for i, value in enumerate(results):
            group = values[i * args.set_size:(i + 1) * args.set_size]
            expected = oracle.select_desc(group, rank)
            if int(value) != expected:
                raise CheckFailure(
                    f"set {i}: engine said {int(value)}, oracle says {expected}"
                )
    return 0


def _reshape_columns(values, channels: int) -> np.ndarray:
    if channels < 1:
        raise ConfigError("channel count must be positive")
    if len(values) % channels:
        raise ConfigError(
            f"{len(values)} values is not a multiple of {channels} channels"
        )
    return np.asarray(values, dtype=np.int64).reshape(-1, channels)


def _write_trace(path, header, rows) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _trace_stream(trace, channels: int, extra_header=(), extra_rows=None):
    total = len(trace.d1st)
    din = trace.din.reshape(total, -1)
    dout = trace.dout.reshape(total, -1)
    header = (["cycle", "d1st"] + [f"din{k}" for k in range(channels)]
              + ["dv"] + [f"dout{k}" for k in range(channels)] + ["result"]
              + list(extra_header))
    rows = []
    for t in range(total):
        row = [t, int(trace.d1st[t])]
        row += [int(v) for v in din[t]]
        row.append(int(trace.dv[t]))
        row += [int(v) for v in dout[t]]
        row.append(int(trace.result[t]) if trace.dv[t] else "")
        if extra_rows is not None:
            row += extra_rows[t]
        rows.append(row)
    return header, rows


def _trace_9753(cols, ranks) -> tuple[list, list]:
    ens = Ensemble9753(ranks)
    n = cols.shape[0]
    zero = np.zeros(CADENCE, dtype=np.int64)
    d1st_log, en_log, quads = [], [], []
    for t in range(n + ens.drain_columns):
        col = cols[t] if t < n else zero
        d1st = t < n and t % CADENCE == 0 and t + CADENCE <= n
        quad = ens.clock(col, d1st=d1st)
        d1st_log.append(int(d1st))
        en_log.append(tuple(int(flag) for flag in ens.enable_flags()))
        quads.append(quad)
    total = len(quads)
    dv_cycles = [t for t, quad in enumerate(quads) if quad is not None]
    first_anchor = 0 if n >= CADENCE else None
    delay = dv_cycles[0] - first_anchor if dv_cycles and first_anchor == 0 else 0
    header = (["cycle", "d1st"] + [f"din{k}" for k in range(CADENCE)]
              + ["dv"] + [f"dout{k}" for k in range(CADENCE)]
              + ["result9", "result7", "result5", "result3",
                 "en7", "en5", "en3"])
    rows = []
    for t in range(total):
        col = cols[t] if t < n else zero
        dcol = cols[t - delay] if delay and 0 <= t - delay < n else zero
        quad = quads[t]
        row = [t, d1st_log[t]]
        row += [int(v) for v in col]
        row.append(int(quad is not None))
        row += [int(v) for v in dcol]
        row += ([int(v) for v in quad] if quad is not None else ["", "", "", ""])
        row += list(en_log[t])
        rows.append(row)
    return header, rows


def cmd_trace(args) -> int:
    values = _read_values(args.input)
    bits = _infer_bits(values, args.data_bits)
    if args.engine == "single":
        if args.set_size is None:
            raise ConfigError("--set-size is required for single-engine traces")
        rank = _resolve_rank(args, args.set_size)
        if len(values) % args.set_size:
            raise ConfigError(
                f"{len(values)} values is not a multiple of the set size "
                f"{args.set_size}"
            )
        params = FilterParams(data_bits=bits, set_size=args.set_size, rank=rank)
        trace = stream_cycles(params, values)
        header, rows = _trace_stream(trace, 1)
    elif args.engine == "multichannel":
        if args.window is None:
            raise ConfigError("--window WxH is required for multichannel traces")
        shape = imaging.parse_window(args.window)
        if not isinstance(shape, Rect):
            raise ConfigError("multichannel traces need a rectangular window")
        rank = _resolve_rank(args, shape.width * shape.height)
        cols = _reshape_columns(values, shape.height)
        params = McParams(channels=shape.height, columns=shape.width,
                          rank=rank, data_bits=bits)
        trace = mc_stream_cycles(params, cols)
        header, rows = _trace_stream(trace, shape.height)
    elif args.engine == "sliding":
        if args.window is None:
            raise ConfigError("--window WxW is required for sliding traces")
        shape = imaging.parse_window(args.window)
        if not isinstance(shape, Rect) or shape.width != shape.height:
            raise ConfigError("sliding traces need a square window")
        rank = _resolve_rank(args, shape.width * shape.height)
        cols = _reshape_columns(values, shape.height)
        trace = sliding_cycles(shape.width, rank, cols, data_bits=bits)
        header, rows = _trace_stream(trace, shape.height)
    else:  # 9753
        ranks = tuple(int(r) for r in args.ranks.split(","))
        if len(ranks) != 4:
            raise ConfigError("--ranks must list four values m9,m7,m5,m3")
        cols = _reshape_columns(values, CADENCE)
        header, rows = _trace_9753(cols, ranks)
    _write_trace(args.output, header, rows)
    print(f"wrote {len(rows)} cycles to {args.output}")
    return 0


_STANDARD_WINDOWS = ("3x3", "5x5", "3x5", "3x7", "diamond5", "diamond7")


def _formula_cycles_per_result(shape, engine: str) -> int:
    if engine == "single":
        return imaging.window_size(shape)
    if engine == "multichannel":
        if not isinstance(shape, Rect):
            raise ConfigError("the multi-channel engine needs a rectangle")
        return shape.width
    if engine == "sliding":
        if not isinstance(shape, Rect) or shape.width != shape.height:
            raise ConfigError("the sliding ensemble needs a square window")
        return 1
    raise ConfigError(f"no cycle formula for engine {engine!r}")


def cmd_bench(args) -> int:
    width, height = _parse_dims(args.image_dims)
    specs = args.window or list(_STANDARD_WINDOWS)
    sim_w, sim_h = _parse_dims(args.sim_dims)
    print(f"operating frequency: {args.clock / 1e6:.1f} MHz")
    print(f"image size: {width} x {height}")
    print(f"engine: {args.engine}")
    header = f"{'window':<10} {'N':>4} {'cyc/res':>8} {'fps':>9}"
    if args.simulate:
        header += f" {'measured':>10} {'fps(meas)':>10}"
    print(header)
    for spec in specs:
        shape = imaging.parse_window(spec)
        n = imaging.window_size(shape)
        cpr = _formula_cycles_per_result(shape, args.engine)
        fps = args.clock / (width * height * cpr)
        line = (f"{imaging.format_window(shape):<10} {n:>4} {cpr:>8} "
                f"{fps:>9.2f}")
        if args.simulate:
            rng = np.random.default_rng(0)
            image = rng.integers(0, 256, size=(sim_h, sim_w), dtype=np.int64)
            rank = percentile_to_rank(0.5, n)
            report = imaging.run_filter(image, shape, rank,
                                        engine=args.engine, data_bits=8)
            measured = report.cycles_per_result
            line += (f" {measured:>10.3f} "
                     f"{args.clock / (width * height * measured):>10.2f}")
        print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankpipe",
        description="Streaming rank/percentile filtering with cycle-accurate "
                    "engine simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_filter = sub.add_parser("filter", help="rank-filter a PGM image")
    p_filter.add_argument("input")
    p_filter.add_argument("output")
    p_filter.add_argument("--window", required=True,
                          help="WxH, diamondD, or custom=FILE")
    _add_rank_args(p_filter)
    p_filter.add_argument("--engine", default="single",
                          choices=["single", "multichannel", "sliding", "9753"])
    p_filter.add_argument("--border", default="clamp",
                          choices=[b.value for b in Border])
    p_filter.add_argument("--clock", type=float, default=DEFAULT_CLOCK_HZ,
                          help="reference clock in Hz for frame-rate reporting")
    p_filter.add_argument("--threads", type=int, default=1)
    p_filter.add_argument("--ascii", action="store_true",
                          help="write ASCII (P2) output instead of binary (P5)")
    p_filter.set_defaults(func=cmd_filter)

    p_rank = sub.add_parser("rank", help="rank-filter a whitespace-separated "
                                         "integer stream")
    p_rank.add_argument("input", nargs="?", default=None,
                        help="input file; stdin when omitted")
    p_rank.add_argument("--set-size", type=int, required=True)
    _add_rank_args(p_rank)
    p_rank.add_argument("--data-bits", type=int, default=None)
    p_rank.add_argument("--check", action="store_true",
                        help="cross-verify every result against the sort oracle")
    p_rank.set_defaults(func=cmd_rank)

    p_trace = sub.add_parser("trace", help="export a per-clock CSV trace")
    p_trace.add_argument("input", nargs="?", default=None)
    p_trace.add_argument("-o", "--output", required=True)
    p_trace.add_argument("--engine", default="single",
                         choices=["single", "multichannel", "sliding", "9753"])
    p_trace.add_argument("--set-size", type=int, default=None)
    _add_rank_args(p_trace)
    p_trace.add_argument("--window", default=None,
                         help="WxH for multichannel, WxW for sliding")
    p_trace.add_argument("--ranks", default="41,25,13,5",
                         help="9753 per-chain ranks m9,m7,m5,m3")
    p_trace.add_argument("--data-bits", type=int, default=None)
    p_trace.set_defaults(func=cmd_trace)

    p_bench = sub.add_parser("bench", help="frame-rate table and simulation "
                                           "benchmarks")
    p_bench.add_argument("--image-dims", default="1024x768")
    p_bench.add_argument("--window", action="append", default=None,
                         help="window spec; repeatable (default: the standard "
                              "shape table)")
    p_bench.add_argument("--clock", type=float, default=DEFAULT_CLOCK_HZ)
    p_bench.add_argument("--engine", default="single",
                         choices=["single", "multichannel", "sliding"])
    p_bench.add_argument("--simulate", action="store_true",
                         help="measure cycles/result on a scaled image")
    p_bench.add_argument("--sim-dims", default="64x48")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, FramingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
