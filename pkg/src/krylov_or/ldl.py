"""Banded LDL^T factorization (reference, non-streaming form)."""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .linalg import BandedSymmetricMatrix

__all__ = ["LDLFactorization", "dense_ldl", "PIVOT_RTOL"]

# A pivot is rejected when it is at most this fraction of the largest |N| entry seen so far.
PIVOT_RTOL = 1e-14


@dataclass(frozen=True)
class LDLFactorization:
    """``N = L D L^T`` with unit-lower banded ``L``.

    ``L_bands[m - 1, j]`` holds ``L[j + m, j]`` for ``m = 1..q``.
    """

    L_bands: np.ndarray
    d: np.ndarray

    @property
    def order(self):
        return self.d.shape[0]

    @property
    def half_bandwidth(self):
        return self.L_bands.shape[0]

    def L_dense(self):
        k = self.order
        L = np.eye(k)
        for m in range(1, self.half_bandwidth + 1):
            if m >= k:
                break
            L[np.arange(m, k), np.arange(k - m)] = self.L_bands[m - 1, : k - m]
        return L

    def reconstruct(self):
        L = self.L_dense()
        return (L * self.d) @ L.T

    def solve(self, rhs):
        return _kernels.banded_ldl_solve(self.L_bands, self.d, np.asarray(rhs, dtype=float))


def dense_ldl(N, definite=True, scale=0.0):
    """Factor a banded symmetric matrix column by column.

    Parameters
    ----------
    N : BandedSymmetricMatrix
    definite : bool
        If true, any pivot ``<= PIVOT_RTOL * max|N|`` raises ``PivotError``
        (the matrix is not positive definite). Otherwise only pivots that
        small in magnitude are rejected.
    scale : float
        Lower bound for the magnitude the pivot tolerance is relative to,
        e.g. a norm estimate of the operator ``N`` was derived from.
    """
    if not isinstance(N, BandedSymmetricMatrix):
        N = BandedSymmetricMatrix(N)
    Lb, d = _kernels.banded_ldl(N.bands, definite, PIVOT_RTOL, scale)
    return LDLFactorization(np.asarray(Lb), np.asarray(d))
