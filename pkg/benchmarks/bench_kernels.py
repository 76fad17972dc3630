"""Compare the compiled kernels with the pure-Python fallback.

Micro-benchmarks call both kernel modules directly on the same inputs; the
end-to-end run re-executes a morphism verification in a subprocess once per
backend (BVINF_PURE_PYTHON selects the fallback).

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import os
import subprocess
import sys
import time
import timeit

from bvinf import _pykernels
from bvinf.fixtures import build_a1
from bvinf.mc import random_probes

try:
    from bvinf import _ckernels
except ImportError:
    _ckernels = None

E2E = """
import time
from bvinf import BACKEND
from bvinf.fixtures import build_a1
from bvinf.morphisms import verify_morphism
t0 = time.perf_counter()
f = build_a1().f
rep = verify_morphism(f, n_max=5, tuple_cutoff=10)
assert rep.ok
print(BACKEND, time.perf_counter() - t0)
"""


def micro_cases():
    A = build_a1().source
    ring = A.ring
    xs = random_probes(ring, 2, seed=3, max_poly=6, max_hbar=3, terms=8)
    a, b = xs[0].terms, xs[1].terms
    mul_args = (a, b, ring.odd, ring.caps, ring.np, ring.nu, ring.hbar_cap)
    e1, e2 = next(iter(a))[1], next(iter(b))[1]
    perm = (3, 0, 5, 1, 4, 2, 7, 6)
    par = (1, 0, 1, 1, 0, 1, 0, 1)
    return {
        "mono_mul": lambda m: m.mono_mul(e1, e2, ring.odd, ring.caps),
        "mul_terms (8x8 terms)": lambda m: m.mul_terms(*mul_args),
        "koszul_sign (n=8)": lambda m: m.koszul_sign(perm, par),
        "set_partitions (n=7)": lambda m: list(m.set_partitions(7)),
    }


def run_micro(repeat):
    print(f"{'kernel':<24}{'python us':>12}{'cython us':>12}{'speedup':>10}")
    for name, fn in micro_cases().items():
        row = []
        for mod in (_pykernels, _ckernels):
            if mod is None:
                row.append(None)
                continue
            t = timeit.Timer(lambda: fn(mod))
            n, _ = t.autorange()
            row.append(min(t.repeat(repeat, n)) / n * 1e6)
        py, cy = row
        if cy is None:
            print(f"{name:<24}{py:>12.2f}{'n/a':>12}{'':>10}")
        else:
            print(f"{name:<24}{py:>12.2f}{cy:>12.2f}{py / cy:>9.1f}x")


def run_e2e():
    times = {}
    for pure in ("1", "0"):
        env = dict(os.environ, BVINF_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        times[out[0]] = float(out[1])
    print("\nverify_morphism(A1 -> B, n_max=5, tuple_cutoff=10)")
    for k, v in times.items():
        print(f"  {k:<8}{v:8.2f} s")
    if "cython" in times:
        print(f"  speedup {times['python'] / times['cython']:.2f}x")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--skip-e2e", action="store_true")
    args = p.parse_args()
    t0 = time.perf_counter()
    run_micro(args.repeat)
    if not args.skip_e2e:
        run_e2e()
    print(f"\ntotal {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
