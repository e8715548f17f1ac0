"""Window geometry, strip feeding, and image-level filter drivers.

Images are plain 2-D numpy arrays of non-negative ints (row-major, shape
``(height, width)``).  A window shape turns into a list of (dx, dy) offsets
around each anchor pixel; the engines never see geometry, only sample
streams, so every engine choice must produce bit-identical output.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import stream_cycles
from .ensembles import sliding_cycles
from .multichannel import mc_stream_cycles
from .params import ConfigError, FilterParams, McParams, padded_bits


@dataclass(frozen=True)
class Rect:
    """Rectangular window, ``width`` columns by ``height`` rows."""

    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ConfigError("rectangle sides must be positive")


@dataclass(frozen=True)
class Diamond:
    """Diamond window of odd ``diameter``: |dx| + |dy| <= (diameter-1)/2."""

    diameter: int

    def __post_init__(self):
        if self.diameter < 1 or self.diameter % 2 == 0:
            raise ConfigError("diamond diameter must be odd and positive")


@dataclass(frozen=True)
class Custom:
    """Explicit offset list; offsets must be distinct."""

    offsets: tuple

    def __post_init__(self):
        offs = tuple((int(dx), int(dy)) for dx, dy in self.offsets)
        if not offs:
            raise ConfigError("custom windows need at least one offset")
        if len(set(offs)) != len(offs):
            raise ConfigError("custom window offsets must be distinct")
        object.__setattr__(self, "offsets", offs)


WindowShape = Rect | Diamond | Custom


class Border(enum.Enum):
    """Edge handling: replicate edge pixels, or emit interior anchors only."""

    CLAMP = "clamp"
    VALID = "valid"


def _axis_offsets(size: int) -> range:
    # floor-centered: even sizes take the extra cell on the low side
    return range(-(size // 2), size - size // 2)


def window_offsets(shape: WindowShape) -> list[tuple[int, int]]:
    """(dx, dy) offsets of a shape in row-major order (by dy, then dx).

    The order is a documented, stable scan order for reproducible traces;
    rank results do not depend on it.
    """
    if isinstance(shape, Rect):
        return [(dx, dy) for dy in _axis_offsets(shape.height)
                for dx in _axis_offsets(shape.width)]
    if isinstance(shape, Diamond):
        r = (shape.diameter - 1) // 2
        return [(dx, dy) for dy in range(-r, r + 1)
                for dx in range(-r, r + 1) if abs(dx) + abs(dy) <= r]
    if isinstance(shape, Custom):
        return sorted(shape.offsets, key=lambda o: (o[1], o[0]))
    raise ConfigError(f"unknown window shape {shape!r}")


def window_size(shape: WindowShape) -> int:
    return len(window_offsets(shape))


def parse_window(text: str) -> WindowShape:
    """Parse a CLI window spec: ``WxH``, ``diamondD``, or ``custom=FILE``."""
    text = text.strip().lower()
    if text.startswith("custom="):
        path = text[len("custom="):]
        offsets = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise ConfigError(
                        f"custom window lines must be 'dx dy', got {line!r}"
                    )
                offsets.append((int(parts[0]), int(parts[1])))
        return Custom(tuple(offsets))
    if text.startswith("diamond"):
        try:
            return Diamond(int(text[len("diamond"):]))
        except ValueError as exc:
            raise ConfigError(f"bad diamond spec {text!r}") from exc
    if "x" in text:
        w, _, h = text.partition("x")
        try:
            return Rect(int(w), int(h))
        except ValueError as exc:
            raise ConfigError(f"bad window spec {text!r}") from exc
    raise ConfigError(f"bad window spec {text!r}")


def format_window(shape: WindowShape) -> str:
    if isinstance(shape, Rect):
        return f"{shape.width}x{shape.height}"
    if isinstance(shape, Diamond):
        return f"diamond{shape.diameter}"
    return f"custom({len(shape.offsets)} offsets)"


def percentile_to_rank(p: float, n: int) -> int:
    """Rank M = ceil(p * N) clamped to [1, N]; p = 0.5 selects the median."""
    if not 0 < p <= 1:
        raise ConfigError(f"percentile must lie in (0, 1], got {p}")
    if n < 1:
        raise ConfigError("set size must be positive")
    return min(max(math.ceil(p * n - 1e-9), 1), n)


def frame_rate(freq_hz: float, img_w: int, img_h: int, n: int) -> float:
    """Single-core frames per second: one sample per clock, N clocks per pixel."""
    if freq_hz <= 0 or img_w <= 0 or img_h <= 0 or n <= 0:
        raise ConfigError("frame-rate arguments must be positive")
    return freq_hz / (img_w * img_h * n)


class StripBuffer:
    """Row buffers over a horizontal image strip, read one column per clock."""

    def __init__(self, image, top: int, rows: int, border: Border = Border.CLAMP):
        image = np.asarray(image)
        if image.ndim != 2:
            raise ConfigError("images must be 2-D arrays")
        height, width = image.shape
        if rows < 1:
            raise ConfigError("strips need at least one row")
        if border is Border.VALID and not (0 <= top and top + rows <= height):
            raise ConfigError(
                f"strip rows [{top}, {top + rows}) fall outside the image"
            )
        row_idx = np.clip(np.arange(top, top + rows), 0, height - 1)
        self._rows = image[row_idx, :]
        self._border = border
        self.width = width
        self.rows = rows

    def column(self, x: int) -> np.ndarray:
        """One strip column; the clamp policy replicates edge columns."""
        if self._border is Border.VALID and not 0 <= x < self.width:
            raise ConfigError(f"column {x} outside the strip")
        return self._rows[:, min(max(x, 0), self.width - 1)]


def strip_feed(image, top: int, rows: int, border: Border = Border.CLAMP,
               pad_left: int = 0, pad_right: int = 0):
    """Yield strip columns left-to-right, one per clock.

    ``pad_left``/``pad_right`` extend the sweep past the image edges, where
    the clamp policy replicates the first/last columns (disallowed under
    the valid-only policy).
    """
    if border is Border.VALID and (pad_left or pad_right):
        raise ConfigError("valid-only strips cannot be padded")
    buf = StripBuffer(image, top, rows, border)
    for x in range(-pad_left, buf.width + pad_right):
        yield buf.column(x)


@dataclass(frozen=True)
class FilterReport:
    """Filtered image plus the simulation accounting behind it."""

    image: np.ndarray
    set_size: int
    rank: int
    engine: str
    border: Border
    data_bits: int
    cycles: int
    comparisons: int

    @property
    def cycles_per_result(self) -> float:
        return self.cycles / self.image.size


def infer_data_bits(image) -> int:
    """Smallest even sample width holding every pixel (at least 2 bits)."""
    peak = int(np.asarray(image).max(initial=0))
    return max(2, padded_bits(peak.bit_length()))


def _anchor_bounds(n: int, offsets, axis: int, border: Border) -> tuple[int, int]:
    """Inclusive anchor range along one axis (0 = x, 1 = y)."""
    if border is Border.CLAMP:
        return 0, n - 1
    deltas = [o[axis] for o in offsets]
    lo = max(0, -min(deltas))
    hi = min(n - 1, n - 1 - max(max(deltas), 0))
    if lo > hi:
        raise ConfigError("window does not fit inside the image")
    return lo, hi


def _bands(lo: int, hi: int, parts: int):
    """Split the inclusive anchor-row range into contiguous bands."""
    count = hi - lo + 1
    parts = max(1, min(parts, count))
    step = -(-count // parts)
    return [(lo + i, min(lo + i + step - 1, hi)) for i in range(0, count, step)]


def _run_bands(worker, bands, threads: int):
    if threads <= 1 or len(bands) <= 1:
        return [worker(band) for band in bands]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, bands))


def _filter_single(image, offsets, rank, border, bits, counter_bits,
                   pipe_latency, threads):
    height, width = image.shape
    n = len(offsets)
    x_lo, x_hi = _anchor_bounds(width, offsets, 0, border)
    y_lo, y_hi = _anchor_bounds(height, offsets, 1, border)
    params = FilterParams(data_bits=bits, set_size=n, rank=rank,
                          counter_bits=counter_bits, pipe_latency=pipe_latency)
    xs = np.arange(x_lo, x_hi + 1)

    def worker(band):
        y0, y1 = band
        ys = np.arange(y0, y1 + 1)
        gathered = np.empty((len(ys), len(xs), n), dtype=np.int64)
        for i, (dx, dy) in enumerate(offsets):
            yy = np.clip(ys + dy, 0, height - 1)
            xx = np.clip(xs + dx, 0, width - 1)
            gathered[:, :, i] = image[yy[:, None], xx[None, :]]
        trace = stream_cycles(params, gathered.reshape(-1))
        return trace.results.reshape(len(ys), len(xs)), trace.cycles, \
            trace.comparisons

    outs = _run_bands(worker, _bands(y_lo, y_hi, threads), threads)
    out = np.concatenate([o[0] for o in outs], axis=0)
    return out, sum(o[1] for o in outs), sum(o[2] for o in outs)


def _filter_multichannel(image, shape, rank, border, bits, counter_bits,
                         pipe_latency, threads):
    if not isinstance(shape, Rect):
        raise ConfigError("the multi-channel engine needs a rectangular window")
    offsets = window_offsets(shape)
    height, width = image.shape
    x_lo, x_hi = _anchor_bounds(width, offsets, 0, border)
    y_lo, y_hi = _anchor_bounds(height, offsets, 1, border)
    params = McParams(channels=shape.height, columns=shape.width, rank=rank,
                      data_bits=bits, counter_bits=counter_bits,
                      pipe_latency=pipe_latency)
    dys = np.fromiter(_axis_offsets(shape.height), dtype=np.int64)
    dxs = np.fromiter(_axis_offsets(shape.width), dtype=np.int64)
    xs = np.arange(x_lo, x_hi + 1)
    col_idx = np.clip(xs[:, None] + dxs[None, :], 0, width - 1).reshape(-1)

    def worker(band):
        y0, y1 = band
        streams = []
        for y in range(y0, y1 + 1):
            strip = image[np.clip(y + dys, 0, height - 1), :]
            streams.append(strip[:, col_idx].T)  # (n_x * Cw, K)
        trace = mc_stream_cycles(params, np.concatenate(streams, axis=0))
        rows_out = trace.results.reshape(y1 - y0 + 1, len(xs))
        return rows_out, trace.cycles, trace.comparisons

    outs = _run_bands(worker, _bands(y_lo, y_hi, threads), threads)
    out = np.concatenate([o[0] for o in outs], axis=0)
    return out, sum(o[1] for o in outs), sum(o[2] for o in outs)


def _filter_sliding(image, shape, rank, border, bits, counter_bits,
                    pipe_latency, threads):
    if not (isinstance(shape, Rect) and shape.width == shape.height):
        raise ConfigError("the sliding ensemble needs a square window")
    side = shape.width
    if side % 2 == 0:
        raise ConfigError("sliding ensembles support odd window sides only")
    offsets = window_offsets(shape)
    height, width = image.shape
    x_lo, x_hi = _anchor_bounds(width, offsets, 0, border)
    y_lo, y_hi = _anchor_bounds(height, offsets, 1, border)
    dys = np.fromiter(_axis_offsets(side), dtype=np.int64)
    pad = side // 2 if border is Border.CLAMP else 0
    n_starts = x_hi - x_lo + 1

    def worker(band):
        y0, y1 = band
        rows_out = []
        cycles = 0
        comparisons = 0
        for y in range(y0, y1 + 1):
            strip = image[np.clip(y + dys, 0, height - 1), :]
            col_idx = np.clip(np.arange(-pad, width + pad), 0, width - 1)
            cols = strip[:, col_idx].T  # (width + 2*pad, side)
            trace = sliding_cycles(side, rank, cols, data_bits=bits,
                                   counter_bits=counter_bits,
                                   pipe_latency=pipe_latency)
            rows_out.append(trace.window_results(n_starts))
            cycles += len(trace.din)
            comparisons += trace.comparisons
        return np.stack(rows_out), cycles, comparisons

    outs = _run_bands(worker, _bands(y_lo, y_hi, threads), threads)
    out = np.concatenate([o[0] for o in outs], axis=0)
    return out, sum(o[1] for o in outs), sum(o[2] for o in outs)


_ENGINES = {
    "single": _filter_single,
    "multichannel": _filter_multichannel,
    "sliding": _filter_sliding,
}


def engines_for(shape: WindowShape) -> list[str]:
    """Engine choices capable of a shape; all must agree bit for bit."""
    names = ["single"]
    if isinstance(shape, Rect):
        names.append("multichannel")
        if shape.width == shape.height and shape.width % 2 == 1:
            names.append("sliding")
    return names


def run_filter(image, shape: WindowShape, rank: int, engine: str = "single",
               border: Border = Border.CLAMP, *, data_bits: int | None = None,
               counter_bits: int = 8, pipe_latency: int = 5,
               threads: int = 1) -> FilterReport:
    """Rank-filter an image and report the simulated cycle accounting.

    Output pixel (x, y) is the rank-th largest of the window anchored
    there; under the clamp policy coordinates are clipped to the image, so
    the output matches the input size.  The engine choice changes only the
    simulated datapath, never the pixels.
    """
    image = np.asarray(image)
    if image.ndim != 2 or image.size == 0:
        raise ConfigError("images must be non-empty 2-D arrays")
    image = image.astype(np.int64)
    if image.min() < 0:
        raise ConfigError("images must be non-negative")
    bits = data_bits if data_bits is not None else infer_data_bits(image)
    offsets = window_offsets(shape)
    n = len(offsets)
    if not 1 <= rank <= n:
        raise ConfigError(f"rank must satisfy 1 <= M <= {n}, got {rank}")
    if engine not in _ENGINES:
        raise ConfigError(
            f"unknown engine {engine!r}; image filtering supports "
            f"{sorted(_ENGINES)}"
        )
    if engine == "single":
        out, cycles, comparisons = _filter_single(
            image, offsets, rank, border, bits, counter_bits, pipe_latency,
            threads)
    else:
        out, cycles, comparisons = _ENGINES[engine](
            image, shape, rank, border, bits, counter_bits, pipe_latency,
            threads)
    return FilterReport(image=out, set_size=n, rank=rank, engine=engine,
                        border=border, data_bits=bits, cycles=cycles,
                        comparisons=comparisons)


def filter_image(image, shape: WindowShape, rank: int, engine: str = "single",
                 border: Border = Border.CLAMP, **kwargs) -> np.ndarray:
    """The filtered image alone; see :func:`run_filter` for the accounting."""
    return run_filter(image, shape, rank, engine, border, **kwargs).image
