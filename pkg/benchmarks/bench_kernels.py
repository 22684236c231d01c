"""Compare the compiled membership kernels with the numpy fallback.

Run from the repository root after building the extension::

    python3 benchmarks/bench_kernels.py [--points 1000000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from zetainf import _pykernels

try:
    from zetainf import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None


def workloads(n, rng):
    x_line = 1.0 + rng.pareto(0.6, n)
    x_plane = 1.0 + rng.pareto(0.8, n)
    y_cantor = rng.random(n) / 7.0
    y_stack = rng.random(n) * np.log(2.0)
    return {
        "interval_chain": ("interval_chain_contains", (x_line, 2.0, 3.0, 2)),
        "cantor_drum": ("cantor_contains", (x_plane, y_cantor, 1.0 / 3.0, 2.0)),
        "stacked_power": ("stacked_power_contains", (x_plane, y_stack)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<16}{'numpy [ms]':>12}{'cython [ms]':>13}{'speedup':>9}  agree")
    for name, (fn, call_args) in workloads(args.points, rng).items():
        py = getattr(_pykernels, fn)
        t_py = min(timeit.repeat(lambda: py(*call_args), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:<16}{1e3 * t_py:>12.1f}{'n/a':>13}{'':>9}")
            continue
        cy = getattr(_ckernels, fn)
        t_cy = min(timeit.repeat(lambda: cy(*call_args), number=1, repeat=args.repeat))
        agree = bool(np.array_equal(np.asarray(py(*call_args)), np.asarray(cy(*call_args))))
        print(f"{name:<16}{1e3 * t_py:>12.1f}{1e3 * t_cy:>13.1f}{t_py / t_cy:>8.1f}x  {agree}")


if __name__ == "__main__":
    main()
