"""Random rational-function instances shared by several test modules."""

from typing import NamedTuple

import numpy as np

from krylov_or import DiagonalOperator, RationalFunctionSpec, SpectrumInterval, lanczos, stabilize
from krylov_or.rational import StabilizedPair

from conftest import random_spectrum


class RationalCase(NamedTuple):
    lam: np.ndarray
    b: np.ndarray
    rec: object
    pair: StabilizedPair
    exact: np.ndarray
    h: np.ndarray


def h_error(x, exact, h):
    e = np.asarray(x) - exact
    return float(np.sqrt(np.sum(h * e * e)))


def _gap_root(rng, lam):
    """A point between two adjacent eigenvalues, away from both."""
    i = int(rng.integers(0, lam.shape[0] - 1))
    return float(lam[i] + rng.uniform(0.3, 0.7) * (lam[i + 1] - lam[i]))


def random_rational_spec(rng, lam, smooth=False):
    """A random ``M/N`` with ``deg N~ <= 4`` and no pole on the spectrum.

    ``smooth`` keeps every pole off the spectrum interval.
    """
    lo, hi = float(lam[0]), float(lam[-1])
    kinds = ("pair", "outside+pair") if smooth else ("inverse", "pair", "gap", "outside+pair", "gap+pair")
    kind = kinds[int(rng.integers(len(kinds)))]
    pair = (complex(rng.uniform(-3, 3), rng.uniform(0.2, 3.0)), 1)
    outside = (lo - rng.uniform(0.5, 3.0), 1) if rng.random() < 0.5 else (hi + rng.uniform(0.5, 3.0), 1)
    if kind == "inverse":
        if np.any(lam == 0):
            kind = "pair"
        else:
            return RationalFunctionSpec.inverse()
    if kind == "pair":
        real, pairs = (), (pair,)
    elif kind == "gap":
        real, pairs = ((_gap_root(rng, lam), 1),), ()
    elif kind == "outside+pair":
        real, pairs = (outside,), (pair,)
    else:
        real, pairs = ((_gap_root(rng, lam), 1),), (pair,)
    deg = sum(m for _, m in real) + 2 * len(pairs)
    num = rng.standard_normal(int(rng.integers(1, deg + 2)))
    return RationalFunctionSpec(num, real, pairs)


def random_rational_case(rng, smooth=False, k_max=12):
    n = int(rng.integers(8, 41))
    lam = random_spectrum(rng, n, definite=bool(rng.random() < 0.3))
    pair = stabilize(random_rational_spec(rng, lam, smooth), SpectrumInterval.from_eigenvalues(lam))
    b = rng.standard_normal(n)
    h = pair.H(lam)
    exact = pair.spec(lam) * b
    s = h_error(exact, 0.0, h)
    b, exact = b / s, exact / s
    rec = lanczos(DiagonalOperator(lam), b, min(n, k_max + 2), reorthogonalize=True)
    return RationalCase(lam, b, rec, pair, exact, h)
