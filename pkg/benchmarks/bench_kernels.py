"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from motivated_belief import kernels


def cases(rng):
    n = 2
    log_prior = np.log(rng.dirichlet(np.ones(n)))
    coeffs = rng.normal(size=n)
    loglik = np.log(rng.uniform(0.01, 1, n))
    m = 200_000
    alphas = rng.uniform(0, 10, m)
    lambdas = np.exp(rng.uniform(-3, 5, m))
    grid = np.linspace(0, 1, 10_001)
    return {
        f"tempered_posterior_batch ({m} pairs, {n} states)":
            lambda k: k.tempered_posterior_batch(log_prior, coeffs, loglik, alphas, lambdas),
        "tempered_posterior_batch (1 pair, called 1000x)":
            lambda k: [k.tempered_posterior_batch(log_prior, coeffs, loglik, alphas[:1], lambdas[:1])
                       for _ in range(1000)],
        f"linear_objective_grid2 ({grid.size} points)":
            lambda k: k.linear_objective_grid2(grid, log_prior, coeffs, loglik, 2.0, 1.5),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    found = kernels.backends()
    print(f"backends: {', '.join(sorted(found))} (active: {kernels.BACKEND})")
    for name, fn in cases(np.random.default_rng(0)).items():
        times = {b: min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) for b, mod in found.items()}
        line = "  ".join(f"{b}: {t * 1e3:9.2f} ms" for b, t in sorted(times.items()))
        speedup = f"  speedup x{times['python'] / times['cython']:.1f}" if "cython" in times else ""
        print(f"{name:55s} {line}{speedup}")


if __name__ == "__main__":
    main()
