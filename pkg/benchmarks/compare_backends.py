"""Compare the numba-compiled kernels against the interpreted fallback.

The fallback is the exact same code run as plain Python/numpy (the path
``RANKPIPE_NO_NUMBA=1`` selects); here both are invoked side by side via
the kernels' ``py_func`` handle, on the same workloads:

* a stream of back-to-back sets through the single-channel chain
* a sliding 9x9 ensemble over an image strip

Usage: python benchmarks/compare_backends.py [--sets 400] [--cols 2000]
"""

import argparse
import contextlib
import time

import numpy as np

from rankpipe import _kernels
from rankpipe._accel import NUMBA_ENABLED
from rankpipe.params import FilterParams, McParams


def time_call(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


@contextlib.contextmanager
def interpreted_inner_loop():
    """Swap the per-cycle helper for its plain-Python form.

    The batch kernels' ``py_func`` resolves ``_chain_cycle`` through the
    module namespace, so without this swap the "interpreted" run would
    still call compiled code for the inner loop.
    """
    compiled = _kernels._chain_cycle
    _kernels._chain_cycle = getattr(compiled, "py_func", compiled)
    try:
        yield
    finally:
        _kernels._chain_cycle = compiled


def bench_chain(n_sets: int):
    p = FilterParams(data_bits=8, set_size=25, rank=13)
    rng = np.random.default_rng(0)
    total = 25 * n_sets + p.drain_cycles
    din = np.zeros((total, 1), dtype=np.int64)
    din[:25 * n_sets, 0] = rng.integers(0, 256, size=25 * n_sets)
    d1st = np.zeros(total, dtype=np.uint8)
    d1st[0:25 * n_sets:25] = 1

    def run(kernel):
        dv = np.zeros(total, dtype=np.uint8)
        res = np.zeros(total, dtype=np.int64)
        err, _ = kernel(din, d1st, p.data_bits, p.set_size, p.rank,
                        p.counter_bits, p.pipe_latency, _kernels.MODE_SCALAR,
                        dv, res)
        assert err == -1
        return res[dv.astype(bool)]

    run(_kernels.chain_run)  # compile before timing
    fast = time_call(run, _kernels.chain_run)
    reference = run(_kernels.chain_run)
    with interpreted_inner_loop():
        slow = time_call(run, _kernels.chain_run.py_func, repeat=1)
        assert (reference == run(_kernels.chain_run.py_func)).all()
    return total, fast, slow


def bench_sliding(n_cols: int):
    p = McParams(channels=9, columns=9, rank=41)
    rng = np.random.default_rng(1)
    total = n_cols + p.stages * p.pipe_delay
    cols = np.zeros((total, 9), dtype=np.int64)
    cols[:n_cols] = rng.integers(0, 256, size=(n_cols, 9))
    d1st = np.zeros(total, dtype=np.uint8)
    d1st[0:n_cols:9] = 1

    def run(kernel):
        dv = np.zeros(total, dtype=np.uint8)
        res = np.zeros(total, dtype=np.int64)
        chain = np.full(total, -1, dtype=np.int64)
        err, _ = kernel(cols, d1st, p.data_bits, p.rank, p.counter_bits,
                        p.pipe_latency, dv, res, chain)
        assert err == -1
        return res[dv.astype(bool)]

    run(_kernels.sliding_run)
    fast = time_call(run, _kernels.sliding_run)
    reference = run(_kernels.sliding_run)
    with interpreted_inner_loop():
        slow = time_call(run, _kernels.sliding_run.py_func, repeat=1)
        assert (reference == run(_kernels.sliding_run.py_func)).all()
    return total, fast, slow


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sets", type=int, default=400,
                        help="back-to-back 25-sample sets for the chain run")
    parser.add_argument("--cols", type=int, default=2000,
                        help="strip columns for the sliding 9x9 run")
    args = parser.parse_args()
    if not NUMBA_ENABLED:
        print("numba is disabled (RANKPIPE_NO_NUMBA); both paths are "
              "interpreted, expect a ~1x ratio")
    cycles, fast, slow = bench_chain(args.sets)
    print(f"chain_run   {cycles:>7} cycles: numba {fast:8.4f}s   "
          f"numpy {slow:8.4f}s   speedup {slow / fast:6.1f}x")
    cycles, fast, slow = bench_sliding(args.cols)
    print(f"sliding_run {cycles:>7} cycles: numba {fast:8.4f}s   "
          f"numpy {slow:8.4f}s   speedup {slow / fast:6.1f}x")


if __name__ == "__main__":
    main()
