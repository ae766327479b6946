"""Compare the compiled kernels with the pure numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.
"""
import argparse
import timeit

import numpy as np

from tubetop import _kernels_py
from tubetop.shilov import haar_unitary

try:
    from tubetop import _kernels as _compiled
except ImportError:
    _compiled = None


def cases(rng):
    u = haar_unitary(2, rng, 4096)
    a = rng.standard_normal((24, 24)) + 1j * rng.standard_normal((24, 24))
    z = np.exp(1j * np.linspace(0, 40 * np.pi, 200_001)) * (1.5 + np.cos(np.arange(200_001)))
    return {
        "sympow_matrices(B=4096, d=2)": ("sympow_matrices", (u, 2)),
        "sympow_matrices(B=4096, d=6)": ("sympow_matrices", (u, 6)),
        "pfaffian_ltl(24x24)": ("pfaffian_ltl", (a - a.T,)),
        "phase_increments(n=200001)": ("phase_increments", (z,)),
    }


def best_time(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    opts = ap.parse_args(argv)
    if _compiled is None:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':<32}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for label, (name, args) in cases(np.random.default_rng(0)).items():
        tp = best_time(getattr(_kernels_py, name), args, opts.repeat) * 1e3
        if _compiled is None:
            print(f"{label:<32}{tp:>14.3f}{'-':>14}{'-':>10}")
            continue
        tc = best_time(getattr(_compiled, name), args, opts.repeat) * 1e3
        print(f"{label:<32}{tp:>14.3f}{tc:>14.3f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
