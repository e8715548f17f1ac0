"""Configuration and domain types shared by all engine variants.

Samples are plain non-negative ints that must fit the configured data width;
there is no wrapper type.  All engines treat rank M = 1 as "find the maximum"
and M = N as "find the minimum".
"""

from __future__ import annotations

from dataclasses import dataclass

MAX_DATA_BITS = 16


class ConfigError(ValueError):
    """Invalid engine, window, or filter configuration."""


class FramingError(RuntimeError):
    """A first-data marker arrived where the stream framing forbids one."""


def padded_bits(bits: int) -> int:
    """Round an odd sample width up to the even width the 2-bit stages need."""
    return bits + 1 if bits % 2 else bits


@dataclass(frozen=True)
class FilterParams:
    """Static configuration of a single-channel engine.

    ``data_bits`` is the sample width; odd widths are zero-padded up to the
    next even value.  ``set_size`` (N) counts samples per data set and
    ``rank`` (M) selects the M-th largest.  ``counter_bits`` (C) is the
    accumulator width, ``pipe_latency`` (L) the per-stage internal pipeline
    depth, and ``pipe_capacity`` the physical circular-buffer bound.
    """

    data_bits: int
    set_size: int
    rank: int
    counter_bits: int = 8
    pipe_latency: int = 5
    pipe_capacity: int = 255

    def __post_init__(self):
        if not 2 <= self.data_bits <= MAX_DATA_BITS:
            raise ConfigError(
                f"data_bits must be in [2, {MAX_DATA_BITS}], got {self.data_bits}"
            )
        object.__setattr__(self, "data_bits", padded_bits(self.data_bits))
        if self.counter_bits < 2:
            raise ConfigError("counter_bits must be at least 2")
        if self.pipe_latency < 0:
            raise ConfigError("pipe_latency must be non-negative")
        if self.set_size < 1:
            raise ConfigError("set_size must be at least 1")
        if not 1 <= self.rank <= self.set_size:
            raise ConfigError(
                f"rank must satisfy 1 <= M <= N, got M={self.rank} N={self.set_size}"
            )
        if self.set_size > self.pipe_capacity - self.pipe_latency:
            raise ConfigError(
                f"set_size {self.set_size} exceeds pipe capacity "
                f"{self.pipe_capacity} - latency {self.pipe_latency}"
            )
        half = 1 << (self.counter_bits - 1)
        if self.rank > half or self.set_size - self.rank > half - 1:
            raise ConfigError(
                f"{self.counter_bits}-bit accumulators would wrap: need "
                f"M <= {half} and N - M <= {half - 1}"
            )

    @property
    def stages(self) -> int:
        """Number of 2-bit refinement stages (B/2)."""
        return self.data_bits // 2

    @property
    def pipe_delay(self) -> int:
        """Per-stage data delay N + L."""
        return self.set_size + self.pipe_latency

    @property
    def alignment(self) -> int:
        """Cycles from a set's first sample to its result (and dv) pulse."""
        return self.stages * self.pipe_delay - 1

    @property
    def drain_cycles(self) -> int:
        """Idle clocks after the last sample that flush the final result."""
        return (self.stages - 1) * self.pipe_delay + self.pipe_latency

    @property
    def max_value(self) -> int:
        return (1 << self.data_bits) - 1


@dataclass(frozen=True)
class McParams:
    """Configuration of a K-channel engine consuming one column per clock.

    A window spans ``columns`` (Cw) clock cycles of ``channels`` (K) samples
    each; the effective set size is N = K * Cw and must satisfy every
    single-channel invariant.
    """

    channels: int
    columns: int
    rank: int
    data_bits: int = 8
    counter_bits: int = 8
    pipe_latency: int = 5
    pipe_capacity: int = 255

    def __post_init__(self):
        if self.channels < 1:
            raise ConfigError("channels must be at least 1")
        if self.columns < 1:
            raise ConfigError("columns must be at least 1")
        base = FilterParams(
            data_bits=self.data_bits,
            set_size=self.channels * self.columns,
            rank=self.rank,
            counter_bits=self.counter_bits,
            pipe_latency=self.pipe_latency,
            pipe_capacity=self.pipe_capacity,
        )
        object.__setattr__(self, "data_bits", base.data_bits)

    @property
    def set_size(self) -> int:
        return self.channels * self.columns

    @property
    def stages(self) -> int:
        return self.data_bits // 2

    @property
    def pipe_delay(self) -> int:
        """Per-stage column delay Cw + L."""
        return self.columns + self.pipe_latency

    @property
    def alignment(self) -> int:
        return self.stages * self.pipe_delay - 1

    @property
    def drain_cycles(self) -> int:
        return (self.stages - 1) * self.pipe_delay + self.pipe_latency

    @property
    def max_value(self) -> int:
        return (1 << self.data_bits) - 1


@dataclass(frozen=True)
class PartialMedian:
    """Resolved high-bit prefix of the eventual result.

    Stands for the surviving value range
    ``[prefix, prefix + 2**(B - bits_resolved) - 1]``; the unresolved low
    bits of ``prefix`` are zero.  ``PartialMedian()`` is the root token
    covering the full range.
    """

    prefix: int = 0
    bits_resolved: int = 0

    def __post_init__(self):
        if self.bits_resolved < 0 or self.bits_resolved % 2:
            raise ConfigError("bits_resolved must be a non-negative even count")
        if self.prefix < 0:
            raise ConfigError("prefix must be non-negative")

    def validate(self, data_bits: int) -> None:
        """Check the prefix-alignment invariant for a given data width."""
        if self.bits_resolved > data_bits:
            raise ConfigError("more bits resolved than the data width holds")
        if self.prefix % (1 << (data_bits - self.bits_resolved)):
            raise ConfigError("unresolved low bits of the prefix must be zero")
        if self.prefix >= 1 << data_bits:
            raise ConfigError("prefix exceeds the data range")

    def range_width(self, data_bits: int) -> int:
        return 1 << (data_bits - self.bits_resolved)

    def contains(self, value: int, data_bits: int) -> bool:
        return self.prefix <= value < self.prefix + self.range_width(data_bits)

    def refined(self, quarter: int, data_bits: int) -> "PartialMedian":
        """Narrow to one of the four quarters (0..3) of this range."""
        q = 1 << (data_bits - self.bits_resolved - 2)
        return PartialMedian(self.prefix + quarter * q, self.bits_resolved + 2)


@dataclass(frozen=True)
class CycleOutput:
    """Per-clock engine output: ``result`` is meaningful only when ``dv``.

    ``dout`` is the raw input delayed to alignment with results: on a dv
    cycle it carries the first sample (or column) of the set that result
    belongs to.
    """

    dv: bool
    dout: object
    result: int
