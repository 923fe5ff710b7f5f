"""CG, MINRES and shifted QMR as projections from a Lanczos recurrence."""

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .lanczos import LanczosRecurrence, lanczos
from .ldl import dense_ldl
from .linalg import BandedSymmetricMatrix, aslinearoperator, as_vector
from .tridiag import truncated_poly_of_extended

__all__ = [
    "cg_iterate",
    "minres_iterate",
    "qmr_shifted_iterate",
    "hnorm_projection_oracle",
    "restarted_cg",
    "RestartedCGHistory",
]


def _check_k(rec, k):
    if k < 1 or k > rec.length:
        raise ValueError(f"k must be in [1, {rec.length}], got {k}")


def _tridiagonal_solve(rec, k, rhs):
    alphas, betas = rec.tridiagonal(k)
    fact = dense_ldl(BandedSymmetricMatrix.tridiagonal(alphas, betas), definite=False,
                     scale=rec.norm_estimate)
    return fact.solve(rhs)


def _squared_window(rec, k, linear=0.0, shift=0.0):
    W = truncated_poly_of_extended(rec, [shift, linear, 1.0], k)
    return dense_ldl(W, definite=True)


def _t_e0(rec, k):
    v = np.zeros(k)
    v[0] = rec.alphas[0]
    if k > 1:
        v[1] = rec.betas[0]
    return v


def cg_iterate(rec: LanczosRecurrence, k):
    """``||b|| Q T^{-1} e_0``.

    Raises ``PivotError`` when ``T`` is numerically singular.
    """
    _check_k(rec, k)
    e0 = np.zeros(k)
    e0[0] = 1.0
    y = _tridiagonal_solve(rec, k, e0)
    return rec.b_norm * (rec.basis_columns(k) @ y)


def minres_iterate(rec: LanczosRecurrence, k):
    """``||b|| Q ([T_hat^2]_{:k,:k})^{-1} T e_0``; needs ``beta_{k-1}``."""
    _check_k(rec, k)
    y = _squared_window(rec, k).solve(_t_e0(rec, k))
    return rec.b_norm * (rec.basis_columns(k) @ y)


def qmr_shifted_iterate(rec: LanczosRecurrence, k, z):
    """Approximation to ``(A - z I)^{-1} b`` optimal in the ``|A - z I|^2`` norm.

    Computes ``||b|| Q ([T_hat^2 - 2 Re(z) T_hat]_{:k,:k} + |z|^2 I)^{-1} (T - conj(z) I) e_0``,
    which for purely imaginary ``z`` is ``Q ([T_hat^2]_{:k,:k} + |z|^2 I)^{-1} (T - conj(z) I) e_0``
    and for real ``z`` is MINRES applied to ``A - z I``.

    The system matrix is real, so the real and imaginary parts of the
    right-hand side are solved separately and the complex result assembled.
    """
    _check_k(rec, k)
    z = complex(z)
    fact = _squared_window(rec, k, linear=-2.0 * z.real, shift=abs(z) ** 2)
    rhs_re = _t_e0(rec, k)
    rhs_re[0] -= z.real
    rhs_im = np.zeros(k)
    rhs_im[0] = z.imag
    Q = rec.basis_columns(k)
    y_re = fact.solve(rhs_re)
    y_im = fact.solve(rhs_im)
    return rec.b_norm * (Q @ y_re + 1j * (Q @ y_im))


def hnorm_projection_oracle(H, Q, target):
    """``Q (Q^T H Q)^{-1} Q^T H f``, the ``H``-norm closest point of ``span(Q)``.

    ``H`` may be an operator, a dense matrix, or a callable on vectors.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.ndim == 1:
        Q = Q[:, None]
    f = np.asarray(target, dtype=float)
    apply = H if callable(H) and not hasattr(H, "apply") else aslinearoperator(H).apply
    HQ = np.column_stack([apply(Q[:, i]) for i in range(Q.shape[1])])
    G = Q.T @ HQ
    G = 0.5 * (G + G.T)
    if np.linalg.cond(G) > 1e14:
        raise NumericalError("hnorm projection: Gram matrix Q^T H Q is numerically singular")
    coef = np.linalg.solve(G, HQ.T @ f)
    return Q @ coef


@dataclass
class RestartedCGHistory:
    """Iterates of restarted CG, one per matrix-vector product."""

    restart_length: int
    matvecs: list = field(default_factory=list)
    iterates: list = field(default_factory=list)

    def errors(self, x_true, relative=True):
        """Two-norm error of each iterate, optionally relative to ``||x_true||``."""
        x_true = np.asarray(x_true, dtype=float)
        scale = np.linalg.norm(x_true) if relative else 1.0
        return np.array([np.linalg.norm(x - x_true) / scale for x in self.iterates])


def restarted_cg(A, b, restart_length, max_matvecs, reorthogonalize=True):
    """CG restarted every ``restart_length`` iterations.

    Each cycle runs Lanczos (with full reorthogonalization by default) on the
    current residual and adds the CG correction. The residual is updated from
    the Lanczos relation ``A Q = Q T + beta q e^T`` without extra products.
    ``restart_length=None`` never restarts.
    """
    A = aslinearoperator(A)
    b = as_vector(b, "b")
    n = A.dimension
    m = max_matvecs if restart_length is None else int(restart_length)
    if m < 1 or max_matvecs < 1:
        raise ValueError("restart_length and max_matvecs must be positive")
    hist = RestartedCGHistory(restart_length=m)
    x = np.zeros(n)
    r = b.copy()
    used = 0
    while used < max_matvecs:
        steps = min(m, max_matvecs - used, n)
        rec = lanczos(A, r, steps, reorthogonalize=reorthogonalize, store_basis=True)
        steps = rec.length
        Q = rec.basis
        y = None
        for j in range(1, steps + 1):
            e0 = np.zeros(j)
            e0[0] = rec.b_norm
            y = _tridiagonal_solve(rec, j, e0)
            hist.matvecs.append(used + j)
            hist.iterates.append(x + Q[:, :j] @ y)
        used += steps
        x = hist.iterates[-1].copy()
        if rec.exhausted or rec.next_vector is None:
            break
        r = -rec.betas[steps - 1] * y[-1] * rec.next_vector
        if not np.any(r):
            break
    return hist
