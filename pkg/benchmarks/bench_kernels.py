"""Compare the numba and numpy implementations of the hot kernels.

    python3 benchmarks/bench_kernels.py            # per-kernel timings
    python3 benchmarks/bench_kernels.py --e2e      # plus an end-to-end sweep in both modes

Per-kernel numbers call ``_kernels.JIT`` and ``_kernels.NUMPY`` directly
(after one warm-up call, so compilation is excluded). The end-to-end run
starts a fresh interpreter per mode with ``PERIODIC_BUMPS_DISABLE_NUMBA``
set accordingly.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from periodic_bumps import _accel, _kernels

AMPS = np.array([4.0, -1.5])
RATES = np.array([2.0, 1.0])

E2E = """
import time
from periodic_bumps import WizardHat, sweep
t0 = time.perf_counter()
sweep(WizardHat(4.0, 2.0, 1.5, 1.0), 0.4, 1.5, 7.0, 24, n_theta=4096)
print(time.perf_counter() - t0)
"""


def cases(n):
    rng = np.random.default_rng(0)
    x = rng.uniform(-10.0, 10.0, n)
    th = np.linspace(0.0, np.pi, n)
    ks = np.arange(-200, 201, dtype=float)
    coeffs = rng.normal(size=ks.size).astype(np.complex128)
    blocks = rng.normal(size=(100, 2, 2))
    return {
        "exp_periodized": (x, 3.2, AMPS, RATES),
        "exp_antiderivative": (x, 3.2, AMPS, RATES),
        "exp_symbol": (th, 0.97, 3.2, AMPS, RATES),
        "fourier_sum": (coeffs, ks, th[: n // 8]),
        "osc_periodized": (x, 3.2, 0.5, 40),
        "osc_antiderivative": (x, 3.2, 0.5, 40, 1.6),
        "block_circulant": (blocks,),
    }


def best_of(fn, args, repeat):
    fn(*args)  # warm-up / compile
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("-n", type=int, default=20_000, help="array length")
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--e2e", action="store_true", help="also time an end-to-end sweep in both modes")
    args = p.parse_args()

    if not _accel.NUMBA_AVAILABLE:
        sys.exit("numba is not installed; nothing to compare")

    print(f"{'kernel':<20} {'numba [ms]':>11} {'numpy [ms]':>11} {'speed-up':>9}")
    for name, a in cases(args.n).items():
        t_jit = best_of(_kernels.JIT[name], a, args.repeat)
        t_np = best_of(_kernels.NUMPY[name], a, args.repeat)
        print(f"{name:<20} {1e3 * t_jit:>11.3f} {1e3 * t_np:>11.3f} {t_np / t_jit:>8.1f}x")

    if args.e2e:
        print("\nend-to-end sweep (24 periods, n_theta=4096)")
        for label, flag in (("numba", "0"), ("numpy", "1")):
            env = dict(os.environ, PERIODIC_BUMPS_DISABLE_NUMBA=flag)
            subprocess.run([sys.executable, "-c", E2E], env=env, check=True, capture_output=True)  # warm cache
            out = subprocess.run([sys.executable, "-c", E2E], env=env, check=True, capture_output=True, text=True)
            print(f"  {label:<6} {float(out.stdout):.3f} s")


if __name__ == "__main__":
    main()
