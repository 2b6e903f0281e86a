"""Compare the Cython kernels with the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Reports best-of-N wall time per call and the max deviation between backends.
"""

import argparse
import math
import timeit

import numpy as np

from cavity_hardy._kernels import _fallback

try:
    from cavity_hardy._kernels import _ckernels
except ImportError:
    _ckernels = None

R = 624e-9
SIMPSON_ARGS = (161.0, 10 * R, 1 / R, math.pi / R, 2 * 10 * R / 161.0)


def rotation_case(dim, seed=0):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    perm = rng.permutation(dim).astype(np.int64)
    half = dim // 2
    ia, ib = np.ascontiguousarray(perm[:half]), np.ascontiguousarray(perm[half : 2 * half])
    angles = rng.uniform(0, 2 * np.pi, size=half)
    return psi, ia, ib, np.cos(angles), np.sin(angles)


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = {"numpy": _fallback}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled kernels not built; timing the NumPy fallback only")

    print(f"{'kernel':<28} {'backend':<8} {'time/call':>12}")
    for n in (2**12, 2**16, 2**20):
        results = {}
        for name, mod in backends.items():
            t = best(lambda: mod.simpson_profile_sum(*SIMPSON_ARGS, n), args.repeat, 3)
            results[name] = mod.simpson_profile_sum(*SIMPSON_ARGS, n)
            print(f"{'simpson n=' + str(n):<28} {name:<8} {t * 1e3:>10.3f}ms")
        if len(results) == 2:
            print(f"{'':<28} {'|diff|':<8} {abs(results['numpy'] - results['cython']):>12.3e}")

    for dim in (648, 1296, 2**16):
        outs = {}
        for name, mod in backends.items():
            psi, ia, ib, c, s = rotation_case(dim)
            t = best(lambda: mod.rotate_pairs(psi, ia, ib, c, s), args.repeat, 50)
            psi, ia, ib, c, s = rotation_case(dim)
            mod.rotate_pairs(psi, ia, ib, c, s)
            outs[name] = psi
            print(f"{'rotate_pairs dim=' + str(dim):<28} {name:<8} {t * 1e6:>10.2f}us")
        if len(outs) == 2:
            print(f"{'':<28} {'|diff|':<8} {np.max(np.abs(outs['numpy'] - outs['cython'])):>12.3e}")


if __name__ == "__main__":
    main()
