"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 200000] [--repeat 5]

Prints one line per kernel with the best-of-``repeat`` time for each backend
and the speed-up. Both backends are checked for identical output first.
"""

import argparse
import timeit

import numpy as np

from uwb_vptl import _kernels_py
from uwb_vptl.geometry import CLAMP_REL


def cases(n, rng):
    d = rng.uniform(2.0, 60.0, n)
    r1 = d + rng.normal(0, 0.03, n)
    r2 = d + rng.normal(0, 0.03, n)
    track = rng.normal(0, 1, n)
    return {
        "triangulate_batch": lambda k: k.triangulate_batch(r1, r2, 0.925, CLAMP_REL),
        "moving_average(w=9)": lambda k: k.moving_average(track, 9),
        "rolling_mean_std(w=10)": lambda k: k.rolling_mean_std(track, 10),
        "rolling_mean_std(w=200)": lambda k: k.rolling_mean_std(track[:20000], 200),
    }


def _tuple(out):
    return out if isinstance(out, tuple) else (out,)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    try:
        from uwb_vptl import _kernels
    except ImportError:
        raise SystemExit("compiled extension not built; run `pip install -e .` first")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<26}{'cython ms':>12}{'python ms':>12}{'speed-up':>10}")
    for name, fn in cases(args.n, rng).items():
        for a, b in zip(_tuple(fn(_kernels)), _tuple(fn(_kernels_py))):
            np.testing.assert_array_equal(a, b)
        t = {}
        for label, mod in (("cython", _kernels), ("python", _kernels_py)):
            t[label] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<26}{t['cython']:>12.3f}{t['python']:>12.3f}{t['python'] / t['cython']:>9.1f}x")


if __name__ == "__main__":
    main()
