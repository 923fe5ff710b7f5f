"""Constant-memory Lanczos-OR and Lanczos-FA.

The processors here are single-owner state machines driven one Lanczos step
at a time (``read_stream``), closed with ``finish_up`` and queried with
``get_output``. Together they compute ``Q N^{-1} m`` for the banded window
``N = [N~(T_hat)]_{:k,:k}`` and ``m = [M~(T_hat)]_{:k,0}`` while holding only
``q + 1`` length-``n`` vectors besides those of the Lanczos recurrence.

With ``N = L D L^T`` and ``X = Q L^{-T}``, ``y = L^{-1} m`` the result is
``sum_j (y_j / d_j) X[:, j]``. Column ``j`` of ``X`` is final once column
``j`` of ``L`` is known; at that point it is folded into the next ``q``
columns, which are the only ones kept.
"""

import numpy as np
from scipy.linalg.blas import daxpy, dscal

from . import _kernels
from .lanczos import BufferAudit, lanczos
from .ldl import PIVOT_RTOL, LDLFactorization, dense_ldl
from .linalg import aslinearoperator, as_vector
from .rational import StabilizedPair
from .tridiag import StreamingTridiagonalSquare, get_poly, poly_degree

__all__ = [
    "LDLFactorization",
    "dense_ldl",
    "StreamingLDL",
    "StreamingBandedProduct",
    "StreamingBandedInverse",
    "BandedRationalProcessor",
    "BufferAudit",
    "lanczos_or_lm",
    "lanczos_fa_lm",
]

_NO_AUDIT = BufferAudit()


class StreamingLDL:
    """LDL^T of a banded matrix fed one column ``[N]_{j:j+q+1, j}`` at a time.

    Attributes
    ----------
    L : ndarray, shape (q, k)
        ``L[m - 1, j]`` is entry ``(j + m, j)`` of the unit-lower factor.
    d : ndarray, shape (k,)
    j : int
        Number of columns consumed.
    """

    def __init__(self, q, k, definite=True):
        if q < 0 or k < 1:
            raise ValueError("need q >= 0 and k >= 1")
        self.q = int(q)
        self.k = int(k)
        self.definite = definite
        self.L = np.zeros((self.q, self.k))
        self.d = np.zeros(self.k)
        self.j = 0
        self._running = 0.0

    def read_stream(self, ncol):
        j = self.j
        if j >= self.k:
            raise ValueError(f"streaming LDL already consumed all {self.k} columns")
        col = np.zeros(self.q + 1)
        ncol = np.asarray(ncol, dtype=float)
        m = min(ncol.shape[0], self.q + 1, self.k - j)
        col[:m] = ncol[:m]
        self._running = max(self._running, float(np.max(np.abs(col))))
        _kernels.ldl_column(self.L, self.d, col, j, self.k, PIVOT_RTOL * self._running, self.definite)
        self.j = j + 1

    def truncate(self, k):
        """Shrink the order to ``k`` (no column at or past ``k`` may have been consumed)."""
        if k < self.j:
            raise ValueError("cannot truncate below the consumed columns")
        self.k = int(k)
        self.L = self.L[:, : self.k].copy()
        self.d = self.d[: self.k].copy()

    def factorization(self):
        if self.j != self.k:
            raise ValueError(f"only {self.j} of {self.k} columns consumed")
        return LDLFactorization(self.L.copy(), self.d.copy())


class StreamingBandedProduct:
    """Accumulates ``X D^{-1} y`` from ``L`` columns and basis vectors.

    ``W`` holds the partially updated columns ``X[:, j:j+q]``; ``ybar`` holds
    ``y[j:j+q+1]``. Prime with the first ``q`` basis vectors, set ``y0`` to the
    first ``q + 1`` entries of ``m``, then call ``read_stream`` once per column
    ``j`` with ``L[j+1:j+q+1, j]``, ``d_j`` and the basis vector ``q_{j+q}``
    (``None`` past the end).
    """

    def __init__(self, n, k, q, audit=None):
        if q < 1:
            raise ValueError("streaming banded product needs q >= 1")
        self.n, self.k, self.q = int(n), int(k), int(q)
        self.audit = audit if audit is not None else _NO_AUDIT
        self.W = []
        self.ybar = None
        self.out = None
        self.j = 0
        self.y_final = np.zeros(self.k)

    @property
    def primed(self):
        return len(self.W) == self.q

    def prime(self, v):
        if self.primed or self.j:
            raise ValueError("product window already primed")
        self.W.append(np.array(v, dtype=float))
        self.audit.acquire()

    def set_y0(self, m):
        m = np.asarray(m, dtype=float)
        y = np.zeros(self.q + 1)
        cnt = min(m.shape[0], self.q + 1, self.k)
        y[:cnt] = m[:cnt]
        self.ybar = y

    def read_stream(self, v, l, d):
        j = self.j
        q = self.q
        if j >= self.k:
            raise ValueError("product already consumed all columns")
        if not self.primed or self.ybar is None:
            raise ValueError("product must be primed and given y0 before streaming")
        l = np.asarray(l, dtype=float)
        W0 = self.W[0]
        if W0 is None:
            raise ValueError(f"column {j} of the basis window is missing")
        if self.out is None:
            self.out = np.zeros(self.n)
            self.audit.acquire()
        y0 = self.ybar[0]
        self.y_final[j] = y0
        self.out = daxpy(W0, self.out, a=y0 / d)
        for m in range(q - 1):
            if self.W[m + 1] is not None:
                self.W[m + 1] = daxpy(W0, self.W[m + 1], a=-l[m])
        if v is None:
            self.W[0] = None
            self.audit.release()
        else:
            W0 = dscal(-l[q - 1], W0)
            self.W[0] = daxpy(np.asarray(v, dtype=float), W0, a=1.0)
        self.W.append(self.W.pop(0))
        ybar = np.empty(q + 1)
        ybar[:q] = self.ybar[1:] - y0 * l
        ybar[q] = 0.0
        self.ybar = ybar
        self.j = j + 1


class StreamingBandedInverse:
    """``Q N^{-1} m`` from a stream of basis vectors and columns of ``N``.

    Vectors and columns may arrive interleaved in any order that keeps
    ``L`` column ``j`` available by the time ``q_{j+q}`` arrives; each
    product step runs as soon as its inputs exist.
    """

    def __init__(self, n, k, q, definite=True, audit=None):
        self.n, self.k, self.q = int(n), int(k), int(q)
        self.ldl = StreamingLDL(self.q, self.k, definite=definite)
        self.prod = StreamingBandedProduct(self.n, self.k, self.q, audit=audit)
        self.vectors_seen = 0
        self.ended = False
        self.trailing_reads = 0

    def set_y0(self, m):
        self.prod.set_y0(m)

    def read_column(self, ncol):
        self.ldl.read_stream(ncol)

    def _step_ready(self):
        j = self.prod.j
        return (
            j < self.k
            and j < self.ldl.j
            and self.prod.ybar is not None
            and (j + self.q < self.vectors_seen or self.ended)
        )

    def read_vector(self, v):
        idx = self.vectors_seen
        if idx < self.q:
            self.prod.prime(v)
            self.vectors_seen += 1
            return
        self.vectors_seen += 1
        j = self.prod.j
        if not self._step_ready() or j + self.q != idx:
            raise RuntimeError(f"basis vector {idx} arrived before column {idx - self.q} of L")
        self._step(v)

    def _step(self, v):
        j = self.prod.j
        l = self.ldl.L[:, j] if self.q else np.zeros(0)
        self.prod.read_stream(v, l, self.ldl.d[j])

    def truncate(self, k):
        """Shrink the order after early exhaustion of the Krylov space."""
        self.ldl.truncate(k)
        self.k = self.prod.k = int(k)
        self.prod.y_final = self.prod.y_final[: self.k]

    def finish_up(self):
        """Run the trailing product steps, one per missing basis vector."""
        if self.ldl.j != self.k:
            raise ValueError(f"only {self.ldl.j} of {self.k} columns of N were streamed")
        self.ended = True
        while len(self.prod.W) < self.q:
            # fewer than q basis vectors exist; the missing columns are padding
            self.prod.W.append(None)
        while self.prod.j < self.k:
            if not self._step_ready():
                raise RuntimeError("streaming inverse stalled before completion")
            self._step(None)
            self.trailing_reads += 1
        for m, w in enumerate(self.prod.W):
            if w is not None:
                self.prod.W[m] = None
                self.prod.audit.release()

    def get_output(self):
        return self.prod.out


class BandedRationalProcessor:
    """Streams ``(q_j, alpha_j, beta_j)`` into ``Q [N~(T_hat)]^{-1} [M~(T_hat)]_{:k,0}``.

    Polynomials must have degree at most 2. Column ``j`` of ``N~(T_hat)``
    is complete after read ``j + 1``; the last column is completed by
    ``finish_up``.
    """

    def __init__(self, n, k, Mtilde, Ntilde, definite=True, audit=None):
        self.degree = max(poly_degree(Mtilde), poly_degree(Ntilde))
        if self.degree > 2:
            raise ValueError("streaming path supports numerator and denominator degree <= 2")
        self.q = max(self.degree, 1)
        self.k = int(k)
        self.Mtilde = np.asarray(Mtilde, dtype=float)
        self.Ntilde = np.asarray(Ntilde, dtype=float)
        self.sq = StreamingTridiagonalSquare(self.k)
        self.inv = StreamingBandedInverse(n, self.k, self.q, definite=definite, audit=audit)
        self.j = 0
        self.finished = False

    def read_stream(self, v, alpha, beta):
        j = self.j
        if j >= self.k or self.finished:
            raise ValueError(f"processor already consumed {self.j} Lanczos steps")
        self.sq.read_stream(alpha, beta)
        if j >= 1:
            self.inv.read_column(get_poly(self.Ntilde, self.sq, j - 1))
        if j == 1:
            self.inv.set_y0(get_poly(self.Mtilde, self.sq, 0))
        self.inv.read_vector(v)
        self.j = j + 1

    def finish_up(self):
        """Complete the last column of ``N`` and run the trailing product reads."""
        if self.finished:
            raise ValueError("finish_up already called")
        k_eff = self.j
        if k_eff == 0:
            raise ValueError("no Lanczos steps were streamed")
        self.sq.close()
        if k_eff < self.k:
            self.inv.truncate(k_eff)
        self.inv.read_column(get_poly(self.Ntilde, self.sq, k_eff - 1))
        if k_eff == 1:
            self.inv.set_y0(get_poly(self.Mtilde, self.sq, 0))
        self.inv.finish_up()
        self.finished = True

    @property
    def trailing_reads(self):
        return self.inv.trailing_reads

    def get_output(self):
        if not self.finished:
            raise ValueError("call finish_up first")
        return self.inv.get_output()


def _run_lm(A, b, k, pair, zero_last_beta, audit, definite=True):
    A = aslinearoperator(A)
    b = as_vector(b, "b")
    n = A.dimension
    if k < 1 or k > n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if isinstance(pair, StabilizedPair):
        Mt, Nt = pair.Mtilde, pair.Ntilde
    else:
        Mt, Nt = pair
    audit = audit if audit is not None else BufferAudit()
    proc = BandedRationalProcessor(n, k, Mt, Nt, definite=definite, audit=audit)
    steps = {"j": 0}

    def observer(q, alpha, beta):
        j = steps["j"]
        if zero_last_beta and j == k - 1:
            beta = 0.0
        proc.read_stream(q, alpha, beta)
        steps["j"] = j + 1

    rec = lanczos(A, b, k, store_basis=False, observer=observer, audit=audit)
    proc.finish_up()
    out = proc.get_output()
    out = dscal(rec.b_norm, out)
    audit.release()
    return out


def lanczos_or_lm(A, b, k, pair, audit: BufferAudit = None):
    """Lanczos-OR with ``k`` matrix-vector products and ``O(n q)`` storage.

    ``pair`` is a :class:`StabilizedPair` (or ``(Mtilde, Ntilde)``) with both
    degrees at most 2. If the Krylov space is exhausted after ``K < k``
    steps, the exact iterate at ``K`` is returned.
    """
    return _run_lm(A, b, k, pair, zero_last_beta=False, audit=audit)


def lanczos_fa_lm(A, b, k, pair, audit: BufferAudit = None):
    """Lanczos-FA for ``M~/N~`` via the streaming path, with ``beta_{k-1}`` replaced by 0.

    The window is then ``N~(T)``; a nonpositive pivot raises ``PivotError``.
    """
    return _run_lm(A, b, k, pair, zero_last_beta=True, audit=audit)
