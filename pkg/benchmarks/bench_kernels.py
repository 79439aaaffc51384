"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on the same inputs through both implementations; the
end-to-end rows run the CLI in a subprocess with and without
WINDLINE_DISABLE_NUMBA.
"""

import argparse
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from windline import _kernels


def kernel_cases(rng):
    fv = rng.normal(size=(2000, 15)) + 1j * rng.normal(size=(2000, 15))
    theta = np.linspace(0, 2 * np.pi, 200_001)
    x, y = np.cos(theta) * (1 + 0.3 * np.cos(5 * theta)), np.sin(theta) * (1 + 0.3 * np.cos(5 * theta))
    d2 = rng.uniform(size=200_000)
    pts = [rng.normal(size=200_000) for _ in range(4)]
    return {
        "gk15_reduce (2000 x 15)": lambda impl: impl.gk15_reduce(fv),
        "polyline_winding (200k vertices)": lambda impl: impl.polyline_winding(x, y, 0.1, 0.05),
        "local_minima (200k samples)": lambda impl: impl.local_minima(d2),
        "bounded_integrand (200k points)": lambda impl: impl.bounded_integrand(*pts),
    }


def end_to_end(argv, disable):
    env = dict(os.environ, WINDLINE_DISABLE_NUMBA="1" if disable else "0")
    start = time.perf_counter()
    subprocess.run([sys.executable, "-m", "windline.cli", *argv], env=env, check=True, capture_output=True)
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if _kernels.numba_impl is None:
        print("numba is not installed; only the numpy path can be timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':36s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for name, run in kernel_cases(rng).items():
        t_np = min(timeit.repeat(lambda: run(_kernels.numpy_impl), number=1, repeat=args.repeat))
        if _kernels.numba_impl is None:
            print(f"{name:36s} {t_np * 1e3:10.2f} {'-':>10s} {'-':>8s}")
            continue
        run(_kernels.numba_impl)  # compile outside the timing
        t_nb = min(timeit.repeat(lambda: run(_kernels.numba_impl), number=1, repeat=args.repeat))
        print(f"{name:36s} {t_np * 1e3:10.2f} {t_nb * 1e3:10.2f} {t_np / t_nb:7.1f}x")

    print()
    print(f"{'command (wall, incl. startup)':36s} {'numpy s':>10s} {'numba s':>10s}")
    for argv in (["winding", "--fixture", "zeppelin"], ["verify", "--fixture", "sinc-sinh"]):
        t_np = end_to_end(argv, disable=True)
        t_nb = end_to_end(argv, disable=False)
        print(f"{' '.join(argv):36s} {t_np:10.2f} {t_nb:10.2f}")


if __name__ == "__main__":
    main()
