"""The Lanczos recurrence, storing the basis or streaming it to an observer."""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.linalg.blas import daxpy

from .linalg import aslinearoperator, as_vector

__all__ = ["LanczosRecurrence", "lanczos", "shift_recurrence", "BufferAudit", "BREAKDOWN_RTOL"]

BREAKDOWN_RTOL = 1e-14


class BufferAudit:
    """Counts simultaneously live length-``n`` work vectors.

    Owners call :meth:`acquire` when a new vector comes to life and
    :meth:`release` when its storage is dropped or recycled.
    """

    def __init__(self):
        self.live = 0
        self.peak = 0
        self.acquisitions = 0

    def acquire(self, count=1):
        self.live += count
        self.acquisitions += count
        self.peak = max(self.peak, self.live)

    def release(self, count=1):
        if count > self.live:
            raise RuntimeError("buffer audit released more vectors than were acquired")
        self.live -= count


class _NullAudit:
    def acquire(self, count=1):
        pass

    def release(self, count=1):
        pass


_NULL_AUDIT = _NullAudit()


@dataclass(frozen=True)
class LanczosRecurrence:
    """Output of :func:`lanczos`.

    Attributes
    ----------
    alphas, betas : ndarray
        Length-``k`` coefficient arrays. ``betas[k-1]`` is the norm of the
        unnormalized next vector and is 0 when the recurrence is exhausted.
    basis : ndarray or None
        ``n x k`` matrix ``Q`` when the basis was stored.
    next_vector : ndarray or None
        ``q_k`` when stored and the recurrence is not exhausted.
    exhausted : bool
        True if the Krylov space was exhausted (``betas[-1] == 0``).
    b_norm : float
        Euclidean norm of the starting vector.
    """

    alphas: np.ndarray
    betas: np.ndarray
    basis: Optional[np.ndarray] = None
    next_vector: Optional[np.ndarray] = None
    exhausted: bool = False
    b_norm: float = 1.0

    @property
    def length(self):
        return self.alphas.shape[0]

    @property
    def norm_estimate(self):
        """``max|alpha| + 2 max beta``, a lower-order estimate of ``||A||`` on the Krylov space."""
        return float(np.abs(self.alphas).max() + 2.0 * np.abs(self.betas).max())

    def tridiagonal(self, k=None):
        """``(alphas, off-diagonal betas)`` of the leading ``k x k`` block of ``T``."""
        k = self.length if k is None else k
        if k > self.length:
            raise ValueError(f"recurrence has length {self.length}, requested {k}")
        return self.alphas[:k].copy(), self.betas[: k - 1].copy()

    def tridiagonal_dense(self, k=None):
        a, b = self.tridiagonal(k)
        return np.diag(a) + np.diag(b, 1) + np.diag(b, -1)

    def basis_columns(self, k):
        if self.basis is None:
            raise ValueError("recurrence was computed without storing the basis")
        if k > self.length:
            raise ValueError(f"recurrence has length {self.length}, requested {k}")
        return self.basis[:, :k]


def lanczos(
    A,
    b,
    k,
    reorthogonalize=False,
    store_basis=True,
    observer: Optional[Callable] = None,
    audit: Optional[BufferAudit] = None,
):
    """Run ``k`` steps of the Lanczos recurrence on ``(A, b)``.

    Parameters
    ----------
    A : SymmetricLinearOperator or array
    b : array_like
        Nonzero starting vector; normalized internally.
    k : int
        Number of iterations, ``1 <= k <= n``.
    reorthogonalize : bool
        Full two-pass classical Gram-Schmidt against all stored columns.
        Requires ``store_basis``.
    store_basis : bool
        Keep ``Q`` and ``q_k`` in the result.
    observer : callable, optional
        Called as ``observer(q_j, alpha_j, beta_j)`` once per iteration.
        ``q_j`` must not be modified and is only valid during the call.
    audit : BufferAudit, optional
        Receives acquire/release events for the three working vectors.

    Returns
    -------
    LanczosRecurrence
        Of length ``k``, or shorter if the Krylov space is exhausted.
    """
    A = aslinearoperator(A)
    b = as_vector(b, "b")
    n = A.dimension
    if b.shape[0] != n:
        raise ValueError(f"b has length {b.shape[0]}, operator has dimension {n}")
    k = int(k)
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise ValueError(f"k = {k} exceeds the dimension n = {n}")
    if reorthogonalize and not store_basis:
        raise ValueError("reorthogonalization requires store_basis=True")
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        raise ValueError("starting vector is zero")
    audit = audit if audit is not None else _NULL_AUDIT

    alphas = np.zeros(k)
    betas = np.zeros(k)
    Q = np.zeros((n, k)) if store_basis else None
    q_cur = b / b_norm
    audit.acquire()
    q_prev = None
    beta_prev = 0.0
    max_alpha = 0.0
    max_beta = 0.0
    exhausted = False
    steps = k
    for j in range(k):
        if Q is not None:
            Q[:, j] = q_cur
        w = np.array(A.apply(q_cur), dtype=float)
        audit.acquire()
        if q_prev is not None:
            w = daxpy(q_prev, w, a=-beta_prev)
        alpha = float(np.dot(w, q_cur))
        w = daxpy(q_cur, w, a=-alpha)
        if reorthogonalize:
            basis = Q[:, : j + 1]
            for _ in range(2):
                w -= basis @ (basis.T @ w)
        beta = float(np.linalg.norm(w))
        max_alpha = max(max_alpha, abs(alpha))
        max_beta = max(max_beta, beta)
        if beta <= BREAKDOWN_RTOL * (max_alpha + 2.0 * max_beta):
            beta = 0.0
            exhausted = True
        alphas[j] = alpha
        betas[j] = beta
        if observer is not None:
            observer(q_cur, alpha, beta)
        if q_prev is not None:
            audit.release()
        if exhausted:
            steps = j + 1
            audit.release(2)
            break
        w /= beta
        q_prev, q_cur = q_cur, w
        beta_prev = beta
    else:
        audit.release(2)

    next_vector = None
    if store_basis and not exhausted:
        next_vector = q_cur.copy()
    return LanczosRecurrence(
        alphas=alphas[:steps].copy(),
        betas=betas[:steps].copy(),
        basis=None if Q is None else Q[:, :steps].copy(),
        next_vector=next_vector,
        exhausted=exhausted,
        b_norm=b_norm,
    )


def shift_recurrence(rec: LanczosRecurrence, z: float) -> LanczosRecurrence:
    """Recurrence of ``(A - z I, b)``: alphas shifted by ``-z``, all else unchanged."""
    return replace(rec, alphas=rec.alphas - float(z))
