"""Time the compiled kernels against the numpy/scipy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from aperiodic import _pykernels

try:
    from aperiodic import _ckernels
except ImportError:
    _ckernels = None


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _cases():
    rng = np.random.default_rng(7)
    for n in (2000, 20000):
        pos = rng.uniform(0, np.sqrt(n), size=(n, 2))
        yield f"close_pairs n={n}", "close_pairs", (pos, 1.0)
    for size in (128, 512):
        masks = (rng.random((2, size, size)) < 0.5).astype(np.uint8)
        q = np.array([[1.6, 0.3], [-0.2, 1.5]])
        args = (
            masks,
            np.array([-1.0, -1.0]),
            2.0 / size,
            q,
            np.array([0, 0, 1, 1], dtype=np.int64),
            np.array([0, 1, 0, 1], dtype=np.int64),
            np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, 0.5]]),
            0.5,
        )
        yield f"raster_pullback {size}x{size}", "raster_pullback", args


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'case':<28}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for label, name, fargs in _cases():
        tp = _best(lambda: getattr(_pykernels, name)(*fargs), args.repeat)
        if _ckernels is None:
            print(f"{label:<28}{tp:>12.4f}{'n/a':>12}{'':>10}")
            continue
        ref = getattr(_pykernels, name)(*fargs)
        got = getattr(_ckernels, name)(*fargs)
        if not np.array_equal(np.asarray(ref), np.asarray(got)):
            raise SystemExit(f"{label}: backends disagree")
        tc = _best(lambda: getattr(_ckernels, name)(*fargs), args.repeat)
        print(f"{label:<28}{tp:>12.4f}{tc:>12.4f}{tp / tc:>10.1f}")


if __name__ == "__main__":
    main()
