"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--reps N]

Each kernel runs on 4x4 inputs drawn once up front; the numba column excludes
compilation (one warm-up call per kernel).
"""

import argparse
import timeit

import numpy as np

from lie4moduli import _kernels
from lie4moduli.catalog import default_algebra
from lie4moduli.metric import random_inner_product


def cases(rng):
    c = default_algebra("A4_12").c.copy()
    g = random_inner_product(rng)
    ginv = np.linalg.inv(g)
    M = rng.normal(size=(4, 4))
    return {
        "gram_schmidt": lambda k: k.gram_schmidt(g),
        "rq": lambda k: k.rq(M),
        "aut_residual": lambda k: k.aut_residual(c, M),
        "jacobi_residual": lambda k: k.jacobi_residual(c),
        "connection_ricci": lambda k: k.connection_ricci(c, g, ginv),
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=20000)
    args = ap.parse_args()

    backends = [_kernels.backend("numpy")]
    if _kernels.HAVE_NUMBA:
        backends.append(_kernels.backend("numba"))
    work = cases(np.random.default_rng(0))

    print(f"{'kernel':<18}" + "".join(f"{b.name + ' us':>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in work.items():
        times = []
        for b in backends:
            fn(b)
            times.append(timeit.timeit(lambda: fn(b), number=args.reps) / args.reps * 1e6)
        speed = f"{times[0] / times[1]:>9.1f}x" if len(times) == 2 else ""
        print(f"{name:<18}" + "".join(f"{t:>12.2f}" for t in times) + speed)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
