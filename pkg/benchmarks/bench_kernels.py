"""Time the compiled kernels against the pure-Python fallback.

Usage: ``python3 benchmarks/bench_kernels.py [--repeat N]``
"""

import argparse
import timeit

import numpy as np

from krylov_or._kernels import available_backends


def _cases(rng, backends):
    a, b = rng.standard_normal(200), rng.standard_normal(199)
    M = rng.standard_normal((20, 20))
    M = M + M.T
    k, q = 2000, 4
    bands = np.zeros((q + 1, k))
    bands[0] = 10.0 + rng.random(k)
    bands[1:] = 0.5 * rng.standard_normal((q, k))
    rhs = rng.standard_normal(k)
    factors = {mod: mod.banded_ldl(bands) for mod in backends.values()}
    return {
        "tridiag_eigh n=200": lambda m: m.tridiag_eigh(a, b),
        "jacobi_eigh n=20": lambda m: m.jacobi_eigh(M),
        "banded_ldl k=2000 q=4": lambda m: m.banded_ldl(bands),
        "banded_ldl_solve k=2000 q=4": lambda m: m.banded_ldl_solve(*factors[m], rhs),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    backends = available_backends()
    cases = _cases(np.random.default_rng(0), backends)
    names = sorted(backends)
    print(f"{'kernel':30s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases.items():
        times = {}
        for name in names:
            mod = backends[name]
            fn(mod)  # warm up
            times[name] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        row = f"{label:30s}" + "".join(f"{times[n] * 1e3:10.2f}ms" for n in names)
        if "cython" in times:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
