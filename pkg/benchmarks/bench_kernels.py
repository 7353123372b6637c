"""Compiled vs numpy polynomial evaluation.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the three kernels on the workloads the library actually runs: the
weighted evaluation matrix of a truncated basis (restriction) and
value/gradient batches of a generator (sampling, assumption checks).
"""

import argparse
import timeit

import numpy as np

from tvlab import _kernels_py
from tvlab.polyring import Polynomial, graded_monomials

try:
    from tvlab import _kernels
except ImportError:
    _kernels = None


def workloads(rng):
    out = []
    for m, d, n in ((3, 8, 16000), (4, 6, 16000), (5, 5, 4096)):
        exps = np.array(graded_monomials(m, d), dtype=np.int64)
        pts = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / (2 * np.sqrt(m))
        out.append((f"monomial_matrix m={m} d={d} n={n}", "monomial_matrix", (pts, exps)))
    p = Polynomial.parse("z1^2 + z2^2 + z3^2 + z4^3 + z5^5")
    e, c = p.as_arrays()
    pts = (rng.standard_normal((200000, 5)) + 1j * rng.standard_normal((200000, 5))) / 4
    out.append(("poly_eval brieskorn n=200000", "poly_eval", (pts, e, c)))
    out.append(("poly_grad brieskorn n=200000", "poly_grad", (pts, e, c)))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'workload':42s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s} {'max diff':>10s}")
    for label, name, a in workloads(rng):
        fpy = getattr(_kernels_py, name)
        tpy = min(timeit.repeat(lambda: fpy(*a), number=1, repeat=args.repeat))
        if _kernels is None:
            print(f"{label:42s} {1e3 * tpy:12.2f} {'n/a':>12s}")
            continue
        fcy = getattr(_kernels, name)
        tcy = min(timeit.repeat(lambda: fcy(*a), number=1, repeat=args.repeat))
        diff = np.max(np.abs(np.asarray(fpy(*a)) - np.asarray(fcy(*a))))
        print(f"{label:42s} {1e3 * tpy:12.2f} {1e3 * tcy:12.2f} {tpy / tcy:8.2f} {diff:10.2e}")


if __name__ == "__main__":
    main()
