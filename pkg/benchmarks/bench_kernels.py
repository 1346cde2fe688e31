"""Benchmark the compiled zeta kernel against the pure-Python fallback.

Runs the tester's inner loop (sign substitution + small Hermitian
eigendecomposition + negative-part accumulation) on workloads shaped
like real tester invocations, and a realistic end-to-end positivity
test through each backend.

Usage:  python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from noisygames import tester
from noisygames._kernels import pyref
from noisygames.basis import build_standard_basis
from noisygames.operators import FourierOperator

try:
    from noisygames._kernels import _zeta_cy
except ImportError:
    _zeta_cy = None


def synthetic_workload(rng, records, dim, patterns, coords):
    kb = rng.standard_normal((records, dim, dim)) + 1j * rng.standard_normal(
        (records, dim, dim)
    )
    kb = np.ascontiguousarray((kb + kb.conj().transpose(0, 2, 1)) / 2)
    coeff = rng.standard_normal(records)
    lens = rng.integers(0, 4, records)
    ptr = np.concatenate([[0], np.cumsum(lens)]).astype(np.int64)
    idx = rng.integers(0, coords, int(ptr[-1])).astype(np.int64)
    pats = rng.choice([-1, 1], size=(patterns, coords)).astype(np.int8)
    weights = np.full(patterns, 1.0 / patterns)
    return kb, coeff, ptr, idx, pats, weights


def timeit(fn, repeats):
    best = float("inf")
    value = None
    for _ in range(repeats):
        start = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - start)
    return best, value


def bench_kernel(repeats):
    rng = np.random.default_rng(0)
    cases = [
        ("small matrices, many patterns", dict(records=8, dim=2, patterns=65536, coords=9)),
        ("medium matrices", dict(records=16, dim=8, patterns=8192, coords=12)),
        ("large matrices", dict(records=24, dim=32, patterns=1024, coords=12)),
    ]
    print(f"{'case':36} {'python':>12} {'cython':>12} {'speedup':>9}")
    for label, shape in cases:
        args = synthetic_workload(rng, **shape)
        t_py, v_py = timeit(lambda: pyref.mean_zeta(*args), repeats)
        if _zeta_cy is None:
            print(f"{label:36} {t_py * 1e3:10.1f}ms {'(not built)':>12}")
            continue
        t_cy, v_cy = timeit(lambda: _zeta_cy.mean_zeta(*args), repeats)
        assert abs(v_py - v_cy) < 1e-9 * max(1.0, abs(v_py))
        print(
            f"{label:36} {t_py * 1e3:10.1f}ms {t_cy * 1e3:10.1f}ms {t_py / t_cy:8.1f}x"
        )


def bench_tester(repeats):
    import os

    basis = build_standard_basis(2)
    op = FourierOperator(
        2,
        4,
        {
            (3, 1, 0, 0): 0.35,
            (0, 2, 1, 0): 0.3,
            (1, 0, 0, 3): 0.25,
            (0, 1, 0, 2): 0.2,
            (2, 0, 3, 0): 0.2,
            (0, 0, 0, 0): -0.35,
        },
        basis.tag,
    )
    params = tester.TesterParams(
        beta=0.5, delta=0.2, d=2, m=2, tau_override=0.45, collapse_limit=1 << 23
    )

    def run():
        return tester.run_tester(op, params, basis).estimate

    backend = os.environ.get("NGA_KERNEL", "auto")
    t, value = timeit(run, repeats)
    print(f"full tester run (backend={backend}): {t * 1e3:.1f}ms, estimate={value:.6f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    print("kernel microbenchmarks (best of", args.repeats, "runs)")
    bench_kernel(args.repeats)
    print()
    bench_tester(args.repeats)


if __name__ == "__main__":
    main()
