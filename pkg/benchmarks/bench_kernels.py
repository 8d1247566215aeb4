"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one line per workload with the best wall time of each backend and
the speedup. Outputs of the two backends are checked to agree first.
"""
import argparse
import time

import numpy as np

from mdrf import kernels


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(rng):
    gammas = rng.uniform(0, 5, 4)
    rates = rng.uniform(0, 2, (200_000, 4))
    yield "gaussian_mdrf_batch N=200000 L=4", "gaussian_mdrf_batch", (gammas, rates)
    for L, n in ((3, 20_000), (12, 200), (20, 4)):
        q = rng.uniform(0.01, 0.5, (n, L))
        yield f"llr_masses_batch N={n} L={L}", "llr_masses_batch", (q, 0.6, 1e-12)
    q = np.full((2_000, 6), 0.3)
    yield "llr_masses_batch N=2000 L=6 (all ties)", "llr_masses_batch", (q, 0.0, 1e-12)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    py = kernels.get_backend("python")
    try:
        cy = kernels.get_backend("cython")
    except ImportError:
        print("compiled kernels not built; nothing to compare")
        return

    print(f"{'workload':42s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for label, name, fn_args in workloads(np.random.default_rng(args.seed)):
        f_py, f_cy = getattr(py, name), getattr(cy, name)
        np.testing.assert_allclose(np.asarray(f_cy(*fn_args)), np.asarray(f_py(*fn_args)),
                                   rtol=0, atol=1e-12)
        t_py = best_time(lambda: f_py(*fn_args), args.repeat)
        t_cy = best_time(lambda: f_cy(*fn_args), args.repeat)
        print(f"{label:42s} {t_py * 1e3:9.2f}ms {t_cy * 1e3:9.2f}ms {t_py / t_cy:7.1f}x")


if __name__ == "__main__":
    main()
