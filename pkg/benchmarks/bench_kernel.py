"""Compiled vs pure-Python polynomial kernel.

    python benchmarks/bench_kernel.py [--repeat 5]

Times the kernel primitives on seeded random polynomials, then one
end-to-end check (the G2 strange formulas) under each backend in a
subprocess, since the backend is fixed at import.
"""
import argparse
import os
import random
import subprocess
import sys
import timeit

from gmpy2 import mpq

from dialg import _kernel_py as P

try:
    from dialg import _kernel_c as C
except ImportError:
    C = None


def rand_poly(rng, n, nvars=4, span=4):
    out = {}
    for _ in range(n):
        k = sum(rng.randint(-span, span) << (P.SHIFT * pos) for pos in range(nvars))
        out[k] = out.get(k, mpq(0)) + mpq(rng.randint(-99, 99), rng.randint(1, 9))
    return {k: c for k, c in out.items() if c}


def primitives(mod, repeat):
    rng = random.Random(0xD1A)
    a, b = rand_poly(rng, 120), rand_poly(rng, 120)
    vals = [mpq(rng.randint(1, 50), rng.randint(1, 50)) for _ in range(4)]
    sa = [mpq(k, 7) for k in range(1, 40)]
    jobs = {
        "poly_mul 120x120": lambda: mod.poly_mul(a, b),
        "poly_add": lambda: mod.poly_add(a, b, -1),
        "poly_subst": lambda: mod.poly_subst(a, 1, mpq(3, 2), 1 << P.SHIFT),
        "poly_eval": lambda: mod.poly_eval(a, vals),
        "series_mul N=38": lambda: mod.series_mul(sa, sa, 38),
    }
    return {name: min(timeit.repeat(fn, number=20, repeat=repeat)) / 20 for name, fn in jobs.items()}


def end_to_end(pure):
    env = dict(os.environ, DIALG_PURE="1" if pure else "0")
    code = ("import time; from dialg.checks import CheckPlan, build_registry, run_check;"
            "p = CheckPlan('G2', checks=('strange',), trials=8);"
            "t = time.perf_counter();"
            "[run_check(c, p) for c in build_registry(p) if c.id.startswith('strange.')];"
            "print(time.perf_counter() - t)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    py = primitives(P, args.repeat)
    c = primitives(C, args.repeat) if C else {}
    print(f"{'primitive':<20}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for name, t in py.items():
        if name in c:
            print(f"{name:<20}{t * 1e3:>14.3f}{c[name] * 1e3:>14.3f}{t / c[name]:>9.1f}x")
        else:
            print(f"{name:<20}{t * 1e3:>14.3f}{'n/a':>14}")
    tp = end_to_end(True)
    line = f"{'G2 strange (s)':<20}{tp:>14.2f}"
    if C:
        tc = end_to_end(False)
        line += f"{tc:>14.2f}{tp / tc:>9.1f}x"
    print(line)


if __name__ == "__main__":
    main()
