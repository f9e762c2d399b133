"""Compare the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--quick]
"""
import argparse
import time

import numpy as np

from catsampler import _fallback

try:
    from catsampler import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def gamma_inputs(m, n_sigs, rng):
    from catsampler.optics_core import haar_random_unitary
    from catsampler.states import even_cat, make_register

    reg = make_register([even_cat(0.6)] * m)
    alphas, weights = reg.padded_arrays()
    tcount = np.array(reg.term_counts, dtype=np.intp)
    sigs = np.ascontiguousarray(rng.integers(0, 3, size=(n_sigs, m)), dtype=np.intp)
    u = np.ascontiguousarray(haar_random_unitary(m, m).entries)
    return u, alphas, weights, tcount, sigs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="smaller sizes")
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = [("python", _fallback)] + ([("cython", _kernels)] if _kernels else [])
    if _kernels is None:
        print("compiled kernels not built; timing the fallback only")

    print("permanent (Ryser), seconds")
    sizes = (8, 12, 16) if args.quick else (8, 12, 16, 20)
    print(f"{'n':>4}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for n in sizes:
        a = np.ascontiguousarray(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        ts = [best_of(lambda: mod.ryser_permanent(a), 3) for _, mod in backends]
        ratio = f"{ts[0] / ts[-1]:>10.1f}" if len(ts) > 1 else ""
        print(f"{n:>4}" + "".join(f"{t:>12.4g}" for t in ts) + ratio)

    print("\ngamma batch (t=2 per mode, 64 signatures), seconds")
    modes = (4, 8, 10) if args.quick else (4, 8, 12, 14)
    print(f"{'m':>4}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for m in modes:
        inputs = gamma_inputs(m, 64, rng)
        ts = [best_of(lambda: mod.gamma_batch(*inputs), 3) for _, mod in backends]
        ratio = f"{ts[0] / ts[-1]:>10.1f}" if len(ts) > 1 else ""
        print(f"{m:>4}" + "".join(f"{t:>12.4g}" for t in ts) + ratio)


if __name__ == "__main__":
    main()
