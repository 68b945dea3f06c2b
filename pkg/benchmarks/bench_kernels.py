"""Compare the numba kernels against the numpy fallbacks.

Part 1 times each kernel in-process on the argument sizes the pipeline
actually uses (dimension 7).  Part 2 runs an end-to-end analysis and a short
flow in a subprocess per backend, because the backend is fixed at import.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import os
import subprocess
import sys
import timeit
from math import comb

import numpy as np

from g2soliton import _kernels
from g2soliton.exterior import _gl_table, _interior_table, _wedge_table, basis_array

END_TO_END = """
import time
from g2soliton import _kernels
from g2soliton.catalog import catalog
from g2soliton.flow import integrate
from g2soliton.soliton import analyze
h = catalog("h")
analyze(h.algebra, h.phi)  # warm-up (jit compile, table caches)
t0 = time.perf_counter()
for _ in range(20):
    analyze(h.algebra, h.phi)
t1 = time.perf_counter()
tr = integrate(h.phi, h.algebra, 0.5)
t2 = time.perf_counter()
print(_kernels.BACKEND, (t1 - t0) / 20, t2 - t1, tr.steps)
"""


def kernel_cases():
    rng = np.random.default_rng(0)
    phi = rng.standard_normal(35)
    two = rng.standard_normal(21)
    v = rng.standard_normal(7)
    m = rng.standard_normal((7, 7))
    c = rng.standard_normal((7, 7, 7))
    c = c - np.swapaxes(c, 1, 2)
    return {
        "scatter_product (2^3 wedge)": ("scatter_product", (two, phi, *_wedge_table(7, 2, 3), comb(7, 5))),
        "operator (interior on 3-forms)": ("operator", (v, *_interior_table(7, 3), comb(7, 2), comb(7, 3))),
        "compound (3rd, 35x35)": ("compound", (m, basis_array(7, 3))),
        "koszul_ricci": ("koszul_ricci", (c,)),
        "gl_operator (3-forms)": ("gl_operator", (m, *_gl_table(7, 3), comb(7, 3))),
    }


def bench_kernels(repeat: int) -> None:
    if not _kernels.HAS_NUMBA:
        print("numba not installed; nothing to compare")
        return
    print(f"{'kernel':34s} {'numpy [us]':>12s} {'numba [us]':>12s} {'speedup':>8s}")
    for label, (name, args) in kernel_cases().items():
        fnp, fnb = _kernels.NUMPY_KERNELS[name], _kernels.NUMBA_KERNELS[name]
        assert np.allclose(fnp(*args), fnb(*args), atol=1e-10), name
        tnp = min(timeit.repeat(lambda: fnp(*args), number=repeat, repeat=5)) / repeat
        tnb = min(timeit.repeat(lambda: fnb(*args), number=repeat, repeat=5)) / repeat
        print(f"{label:34s} {tnp * 1e6:12.2f} {tnb * 1e6:12.2f} {tnp / tnb:8.2f}")


def bench_end_to_end() -> None:
    print()
    print(f"{'backend':8s} {'analyze(h) [ms]':>16s} {'flow h [0,0.5] [s]':>19s} {'steps':>6s}")
    for flag in ("1", "0"):
        env = dict(os.environ, G2SOLITON_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
        backend, t_an, t_flow, steps = out.stdout.split()
        print(f"{backend:8s} {float(t_an) * 1e3:16.2f} {float(t_flow):19.3f} {steps:>6s}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200, help="calls per timing sample")
    args = ap.parse_args()
    bench_kernels(args.repeat)
    bench_end_to_end()


if __name__ == "__main__":
    main()
