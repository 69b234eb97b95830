"""Compare the compiled and numpy Jacobi kernels on batches of small symmetric matrices.

    python3 benchmarks/bench_jacobi.py --batch 20000 --sizes 3 4 8
"""

import argparse
import timeit

import numpy as np

from symqubit.linalg import MAX_SWEEPS, OFF_TOL
from symqubit.linalg._backend import KERNELS


def random_batch(rng, batch, n):
    a = rng.standard_normal((batch, n, n))
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=20000)
    ap.add_argument("--sizes", type=int, nargs="+", default=[3, 4, 6, 8])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"backends available: {', '.join(sorted(KERNELS))}")
    print(f"{'n':>3} {'backend':>8} {'vectors':>8} {'best s':>10} {'us/matrix':>10} {'max |w - eigh|':>15}")
    for n in args.sizes:
        a = random_batch(rng, args.batch, n)
        ref = np.linalg.eigvalsh(a)
        for want in (False, True):
            for name, kernel in sorted(KERNELS.items()):
                def run():
                    return kernel(a, OFF_TOL, MAX_SWEEPS, want)
                best = min(timeit.repeat(run, number=1, repeat=args.repeat))
                w = np.sort(run()[0], axis=-1)
                err = np.max(np.abs(w - ref))
                print(f"{n:>3} {name:>8} {str(want):>8} {best:>10.4f} "
                      f"{1e6 * best / args.batch:>10.2f} {err:>15.2e}")


if __name__ == "__main__":
    main()
