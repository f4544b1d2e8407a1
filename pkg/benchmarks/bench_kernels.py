"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scatterers 10000]

Prints one line per kernel with the best-of-``repeat`` time of each backend,
the speedup and the largest output difference relative to the largest
output magnitude.
"""

import argparse
import timeit

import numpy as np

from driftmimo import kernels


def cases(n_scat, n_freq, rng):
    w = (rng.normal(size=n_scat) + 1j * rng.normal(size=n_scat)) / np.sqrt(n_scat)
    ph = rng.uniform(0, 2 * np.pi, n_scat)
    dl = rng.exponential(30e-9, n_scat)
    uniform = np.linspace(-1e8, 1e8, n_freq)
    scattered = np.sort(rng.uniform(-1e8, 1e8, n_freq))
    u = rng.random((3 * n_scat, 3))
    z = rng.uniform(-20, 20, 2000) + 1j * rng.uniform(-20, 20, 2000)
    v = rng.normal(size=50 * n_scat)
    hw = rng.random(v.size)
    return {
        "sinusoid_sum uniform grid": ("sinusoid_sum", (w, ph, dl, uniform)),
        "sinusoid_sum scattered grid": ("sinusoid_sum", (w, ph, dl, scattered)),
        "vonmises_accept kappa=5": ("vonmises_accept", (5.0, u)),
        "bessel_series order 0": ("bessel_series", (0, z)),
        "bessel_trapezoid order 1": ("bessel_trapezoid", (1, z, 96, True)),
        "histogram_uniform": ("histogram_uniform", (v, hw, -4.0, 0.01, 800)),
    }


def max_diff(a, b):
    if isinstance(a, tuple):
        return max(max_diff(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    if not a.size:
        return 0.0
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--scatterers", type=int, default=10_000)
    parser.add_argument("--freqs", type=int, default=201)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if kernels.compiled_backend is None:
        parser.exit(1, "compiled extension not built; nothing to compare\n")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':30s} {'cython (ms)':>12s} {'python (ms)':>12s} {'speedup':>8s} {'rel diff':>10s}")
    for label, (name, fargs) in cases(args.scatterers, args.freqs, rng).items():
        fast = getattr(kernels.compiled_backend, name)
        slow = getattr(kernels.python_backend, name)
        t_fast = min(timeit.repeat(lambda: fast(*fargs), number=1, repeat=args.repeat))
        t_slow = min(timeit.repeat(lambda: slow(*fargs), number=1, repeat=args.repeat))
        diff = max_diff(fast(*fargs), slow(*fargs))
        print(f"{label:30s} {1e3 * t_fast:12.3f} {1e3 * t_slow:12.3f} {t_slow / t_fast:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
