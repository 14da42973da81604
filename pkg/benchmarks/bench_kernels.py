"""Compare the compiled and pure-Python polynomial kernels.

Micro benchmarks time ``mul`` and ``divmod_exact`` on random integer
polynomials.  The end-to-end benchmark builds one linear form in a fresh
interpreter per backend, so module caches do not leak between runs.

    python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

from qzeta import _pykernels as py

try:
    from qzeta import _ckernels as cy
except ImportError:
    cy = None


def _poly(rng, n, bits):
    p = [rng.randrange(-(1 << bits), 1 << bits) for _ in range(n)]
    p[-1] = p[-1] or 1
    return p


def micro(rng, sizes, bits, repeat):
    rows = []
    for n in sizes:
        a, b = _poly(rng, n, bits), _poly(rng, n, bits)
        prod = py.mul(a, b)
        for name, mod in (("python", py), ("cython", cy)):
            if mod is None:
                continue
            t_mul = min(timeit.repeat(lambda: mod.mul(a, b), number=5, repeat=repeat)) / 5
            t_div = min(timeit.repeat(lambda: mod.divmod_exact(prod, b), number=5, repeat=repeat)) / 5
            rows.append((n, bits, name, t_mul, t_div))
    return rows


_E2E = (
    "import time; from qzeta import BACKEND; from qzeta.linear_forms import FormParams, build_linear_form;"
    "t = time.perf_counter(); build_linear_form(FormParams({A}, {r}, {n})); print(BACKEND, time.perf_counter() - t)"
)


def end_to_end(A, r, n):
    out = []
    for pure in ("1", "0"):
        env = dict(os.environ, QZETA_PURE_PYTHON=pure)
        res = subprocess.run(
            [sys.executable, "-c", _E2E.format(A=A, r=r, n=n)], env=env, capture_output=True, text=True, check=True
        )
        backend, secs = res.stdout.split()
        out.append((backend, float(secs)))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="smaller sizes, fewer repeats")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    sizes = (16, 64, 256) if args.quick else (16, 64, 256, 1024)
    repeat = 3 if args.quick else 5
    print(f"{'len':>6} {'bits':>5} {'backend':>8} {'mul (s)':>12} {'divmod (s)':>12}")
    for n, bits, name, tm, td in micro(rng, sizes, 64, repeat):
        print(f"{n:>6} {bits:>5} {name:>8} {tm:12.3e} {td:12.3e}")
    case = (4, 1, 3) if args.quick else (6, 2, 4)
    print(f"\nbuild_linear_form{case}:")
    for backend, secs in end_to_end(*case):
        print(f"  {backend:>10}: {secs:.3f} s")
    if cy is None:
        print("compiled extension not importable; only the fallback was timed")


if __name__ == "__main__":
    main()
