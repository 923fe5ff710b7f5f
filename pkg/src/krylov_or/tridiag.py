"""Polynomials of the extended tridiagonal matrix, windowed to the leading block."""

import numpy as np

from .errors import FunctionDomainError
from .lanczos import LanczosRecurrence
from .linalg import ZERO_EIGENVALUE_RTOL, BandedSymmetricMatrix, tridiag_eigendecomposition

__all__ = [
    "poly_degree",
    "required_length",
    "truncated_poly_of_extended",
    "truncated_poly_first_column",
    "StreamingTridiagonalSquare",
    "get_poly",
    "tridiag_function_apply",
]


def _coefficients(p):
    c = np.atleast_1d(np.asarray(p, dtype=float))
    if c.ndim != 1 or c.shape[0] == 0:
        raise ValueError("polynomial coefficients must be a non-empty 1-d sequence")
    return c


def poly_degree(p):
    """Index of the last nonzero ascending-power coefficient (0 for the zero polynomial)."""
    nz = np.flatnonzero(_coefficients(p))
    return int(nz[-1]) if nz.size else 0


def required_length(k, degree):
    """Recurrence length needed for the ``k x k`` window of a degree-``degree`` polynomial."""
    return k + (degree - 1) // 2 if degree > 0 else k


def _band_get(bands, offset, cols):
    """Entries ``S[cols + offset, cols]`` of a symmetric banded ``S``, zero outside."""
    n = bands.shape[1]
    q = bands.shape[0] - 1
    cols = np.asarray(cols)
    out = np.zeros(cols.shape)
    if abs(offset) > q:
        return out
    rows = cols + offset
    ok = (cols >= 0) & (cols < n) & (rows >= 0) & (rows < n)
    if offset >= 0:
        out[ok] = bands[offset, cols[ok]]
    else:
        out[ok] = bands[-offset, rows[ok]]
    return out


def _times_tridiagonal(S, alphas, betas):
    """Banded storage of ``S T`` for symmetric banded ``S`` commuting with tridiagonal ``T``."""
    q = S.shape[0] - 1
    n = S.shape[1]
    out = np.zeros((q + 2, n))
    beta_ext = np.zeros(n + 1)
    beta_ext[1:n] = betas[: n - 1]
    for dd in range(min(q + 1, n - 1) + 1):
        j = np.arange(n - dd)
        # S[i, j-1] beta_{j-1} + S[i, j] alpha_j + S[i, j+1] beta_j with i = j + dd
        out[dd, : n - dd] = (
            _band_get(S, dd + 1, j - 1) * beta_ext[j]
            + _band_get(S, dd, j) * alphas[j]
            + _band_get(S, dd - 1, j + 1) * beta_ext[j + 1]
        )
    return out


def _window_recurrence(rec, k, degree):
    need = required_length(k, degree)
    L = rec.length
    if k < 1:
        raise ValueError("k must be at least 1")
    if L < need and not (rec.exhausted and k <= L):
        raise ValueError(
            f"window of order {k} for degree {degree} needs a recurrence of length "
            f">= {need}, got {L}"
        )
    size = k + degree // 2
    alphas = np.zeros(size)
    betas = np.zeros(size)
    m = min(size, L)
    alphas[:m] = rec.alphas[:m]
    betas[:m] = rec.betas[:m]
    # entries past the recurrence never reach the window
    return alphas, betas, size


def _horner_bands(alphas, betas, coeffs):
    size = alphas.shape[0]
    d = coeffs.shape[0] - 1
    S = np.zeros((1, size))
    S[0, :] = coeffs[d]
    for i in range(d - 1, -1, -1):
        S = _times_tridiagonal(S, alphas, betas)
        S[0, :] += coeffs[i]
    return S


def truncated_poly_of_extended(rec: LanczosRecurrence, p, k):
    """``[p(T_hat)]_{:k,:k}`` as a banded matrix of half-bandwidth ``deg p``.

    Only ``k + floor((deg p - 1) / 2)`` Lanczos steps are required. A recurrence
    flagged as exhausted represents all of ``T_hat`` and is zero-padded.

    Parameters
    ----------
    rec : LanczosRecurrence
    p : array_like
        Ascending-power coefficients.
    k : int
        Window order.
    """
    coeffs = _coefficients(p)
    degree = poly_degree(coeffs)
    coeffs = coeffs[: degree + 1]
    alphas, betas, _ = _window_recurrence(rec, k, degree)
    S = _horner_bands(alphas, betas, coeffs)
    return BandedSymmetricMatrix(S[:, :k])


def truncated_poly_first_column(rec: LanczosRecurrence, p, k):
    """``[p(T_hat)]_{:k,0}`` as a dense length-``k`` vector."""
    B = truncated_poly_of_extended(rec, p, k)
    col = np.zeros(k)
    m = min(B.half_bandwidth + 1, k)
    col[:m] = B.bands[:m, 0]
    return col


class StreamingTridiagonalSquare:
    """Builds the columns of ``T_hat^2`` from a stream of ``(alpha_j, beta_j)``.

    After read ``j`` the diagonal entry ``j`` is known and column ``j - 1`` is
    complete. The full ``O(k)`` history of ``T`` and ``T^2`` is retained.

    Attributes
    ----------
    T : ndarray, shape (2, k)
        ``T[0]`` diagonal, ``T[1]`` first subdiagonal.
    Tp2 : ndarray, shape (3, k)
        ``Tp2[d, j]`` is entry ``(j + d, j)`` of ``T_hat^2``.
    """

    def __init__(self, k):
        if k < 1:
            raise ValueError("k must be at least 1")
        self.k = int(k)
        self.T = np.zeros((2, self.k))
        self.Tp2 = np.zeros((3, self.k))
        self.j = 0
        self.closed = False

    def read_stream(self, alpha, beta):
        j = self.j
        if j >= self.k or self.closed:
            raise ValueError(f"already consumed {self.j} coefficient pairs")
        alpha = float(alpha)
        beta = float(beta)
        self.T[0, j] = alpha
        self.T[1, j] = beta
        if j == 0:
            self.Tp2[0, j] = alpha * alpha + beta * beta
        else:
            b_prev = self.T[1, j - 1]
            self.Tp2[0, j] = alpha * alpha + beta * beta + b_prev * b_prev
            self.Tp2[1, j - 1] = (self.T[0, j - 1] + alpha) * b_prev
            self.Tp2[2, j - 1] = b_prev * beta
        self.j = j + 1

    def close(self):
        """Mark the stream finished; the last column is then complete within the window."""
        self.closed = True

    def is_complete(self, j):
        """Whether column ``j`` of ``T_hat^2`` (and of ``T_hat``) is fully known."""
        return 0 <= j < (self.j if self.closed else self.j - 1)

    def column(self, j):
        """``(T^2_{j,j}, T^2_{j+1,j}, T^2_{j+2,j})``."""
        if not self.is_complete(j):
            raise ValueError(f"column {j} not yet available after {self.j} reads")
        return self.Tp2[:, j].copy()


def get_poly(P, sq: StreamingTridiagonalSquare, j):
    """Column ``j`` of ``c0 I + c1 T + c2 T^2`` in banded layout (length 3)."""
    coeffs = _coefficients(P)
    if poly_degree(coeffs) > 2:
        raise ValueError("get_poly supports degree at most 2")
    c = np.zeros(3)
    m = min(coeffs.shape[0], 3)
    c[:m] = coeffs[:m]
    if not sq.is_complete(j):
        raise ValueError(f"column {j} has not been streamed yet")
    out = c[2] * sq.Tp2[:, j]
    out[:2] += c[1] * sq.T[:, j]
    out[0] += c[0]
    return out


def tridiag_function_apply(rec: LanczosRecurrence, f, k):
    """``f(T) e_0`` for the leading ``k x k`` tridiagonal block.

    ``f`` must be vectorized. Ritz values below ``1e-13`` times the norm
    estimate of the recurrence are treated as zero; a non-finite ``f`` value
    raises :class:`FunctionDomainError`.
    """
    alphas, betas = rec.tridiagonal(k)
    w, V = tridiag_eigendecomposition(alphas, betas)
    radius = max(np.abs(w).max(), rec.norm_estimate)
    w = np.where(np.abs(w) <= ZERO_EIGENVALUE_RTOL * radius, 0.0, w)
    with np.errstate(all="ignore"):
        fw = np.broadcast_to(np.asarray(f(w), dtype=float), w.shape)
    if not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)][0]
        raise FunctionDomainError(f"function undefined at Ritz value {bad!r}")
    return V @ (fw * V[0, :])
