import pytest

from rankpipe import ConfigError, FilterParams, McParams, PartialMedian


def test_defaults_match_reference_build():
    p = FilterParams(data_bits=8, set_size=25, rank=13)
    assert p.counter_bits == 8
    assert p.pipe_latency == 5
    assert p.pipe_capacity == 255
    assert p.stages == 4
    assert p.pipe_delay == 30
    assert p.alignment == 4 * 30 - 1
    assert p.drain_cycles == 3 * 30 + 5


def test_odd_width_is_padded_up():
    assert FilterParams(data_bits=9, set_size=4, rank=2).data_bits == 10
    assert FilterParams(data_bits=15, set_size=4, rank=2).data_bits == 16


@pytest.mark.parametrize("bits", [0, 1, 17, 18])
def test_width_bounds(bits):
    with pytest.raises(ConfigError):
        FilterParams(data_bits=bits, set_size=4, rank=2)


def test_rank_bounds():
    with pytest.raises(ConfigError):
        FilterParams(data_bits=8, set_size=9, rank=0)
    with pytest.raises(ConfigError):
        FilterParams(data_bits=8, set_size=9, rank=10)


def test_max_set_size_with_default_pipe():
    FilterParams(data_bits=8, set_size=250, rank=125)
    with pytest.raises(ConfigError):
        FilterParams(data_bits=8, set_size=251, rank=125)


def test_counter_width_rejects_wrapping_configs():
    # N=250, M=1 would wrap an 8-bit preset counter
    with pytest.raises(ConfigError):
        FilterParams(data_bits=8, set_size=250, rank=1)
    with pytest.raises(ConfigError):
        FilterParams(data_bits=8, set_size=200, rank=150)
    FilterParams(data_bits=8, set_size=250, rank=123)
    FilterParams(data_bits=8, set_size=250, rank=128)
    # a wider counter admits the same shape
    FilterParams(data_bits=8, set_size=250, rank=1, counter_bits=10)


def test_mc_params_inherit_every_invariant():
    p = McParams(channels=9, columns=11, rank=31)
    assert p.set_size == 99
    assert p.pipe_delay == 16
    with pytest.raises(ConfigError):
        McParams(channels=9, columns=30, rank=135)  # N = 270 > capacity - L
    with pytest.raises(ConfigError):
        McParams(channels=0, columns=5, rank=1)
    with pytest.raises(ConfigError):
        McParams(channels=3, columns=0, rank=1)


def test_partial_median_invariants():
    pm = PartialMedian(128, 2)
    pm.validate(8)
    assert pm.range_width(8) == 64
    assert pm.contains(128, 8) and pm.contains(191, 8)
    assert not pm.contains(192, 8)
    assert pm.refined(2, 8) == PartialMedian(160, 4)
    with pytest.raises(ConfigError):
        PartialMedian(128, 3)  # odd resolution count
    with pytest.raises(ConfigError):
        PartialMedian(130, 2).validate(8)  # unresolved low bits set
