"""Compiled kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--n 20000]
"""
import argparse
import timeit

import numpy as np

from bialg import _pykernels
from bialg.lattice import TauSpec
from bialg.weierstrass import PrecisionCfg, as_lattice, weierstrass_for


def cases(n, rng):
    eng = weierstrass_for(as_lattice(TauSpec.geodesic(1, 1, 0, "1.9"), 40), PrecisionCfg(40))
    eng.batch(np.zeros(1, dtype=np.complex128))  # builds the double precision table
    coeffs = eng._coeffs_c128
    zs = rng.uniform(-4, 4, n) + 1j * rng.uniform(-4, 4, n)
    wp_args = (zs, complex(eng.reduced.omega1), complex(eng.reduced.omega2), complex(eng.g2), coeffs,
               float(eng.radius), float(eng.pole_radius))
    pts = rng.normal(size=(n // 10, 2))
    a, b = rng.uniform(-50, 50, n), rng.uniform(-50, 50, n)
    return {
        "wp_batch": lambda mod: mod.wp_batch(*wp_args),
        "monomial_matrix(deg 8)": lambda mod: mod.monomial_matrix(pts, 8, True),
        "torus_cells(k 16)": lambda mod: mod.torus_cells(a, b, 16),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=20000)
    args = ap.parse_args()
    try:
        from bialg import _ckernels
    except ImportError:
        raise SystemExit("compiled kernels are not built; run: pip install -e . --no-build-isolation")
    rng = np.random.default_rng(0)
    print(f"{'kernel':24} {'cython ms':>10} {'python ms':>10} {'speedup':>8}")
    for name, fn in cases(args.n, rng).items():
        tc = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat)) * 1e3
        tp = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:24} {tc:10.2f} {tp:10.2f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
