"""Sign-function and spectrum-CDF methods built on Lanczos-OR."""

from dataclasses import dataclass

import numpy as np

from .errors import FunctionDomainError, NumericalError, PivotError
from .lanczos import LanczosRecurrence, shift_recurrence
from .linalg import ZERO_EIGENVALUE_RTOL, dense_sym_eigendecomposition, tridiag_eigendecomposition
from .rational import PartialFractionTerm, SpectrumInterval, lanczos_or_iterate, stabilize
from .tridiag import truncated_poly_of_extended

__all__ = [
    "QuadratureRule",
    "build_sign_quadrature",
    "sign_or_iterate",
    "sign_or_coefficients",
    "sign_fa_coefficients",
    "sign_coalescence_gap",
    "harmonic_ritz_values",
    "sign_harmonic_iterate",
    "rational_termwise_or",
    "spectrum_cdf",
    "spectrum_cdf_fa",
    "spectrum_cdf_harmonic",
    "strict_sign",
    "HARMONIC_NODE_RTOL",
]

HARMONIC_NODE_RTOL = 1e-10


def strict_sign(x):
    """``sign(x)`` that is undefined (``nan``) at zero, for use as a Lanczos-FA ``f``."""
    x = np.asarray(x, dtype=float)
    return np.where(x == 0.0, np.nan, np.sign(x))


def _check_k(rec, k):
    if k < 1 or k > rec.length:
        raise ValueError(f"k must be in [1, {rec.length}], got {k}")


def _t_e0(rec, k):
    v = np.zeros(k)
    v[0] = rec.alphas[0]
    if k > 1:
        v[1] = rec.betas[0]
    return v


def _squared_window_eig(rec, k):
    W = truncated_poly_of_extended(rec, [0.0, 0.0, 1.0], k).to_dense()
    w, V = dense_sym_eigendecomposition(W)
    if not w[0] > ZERO_EIGENVALUE_RTOL * w[-1]:
        raise PivotError(
            f"window [T_hat^2]_{{:{k},:{k}}} is singular (smallest eigenvalue {w[0]:.3e})"
        )
    return w, V


def sign_or_coefficients(rec: LanczosRecurrence, k, c=0.0):
    """``([T_hat_c^2]_{:k,:k})^{-1/2} T_c e_0`` with ``T_c = T - c I``."""
    _check_k(rec, k)
    rc = shift_recurrence(rec, c) if c else rec
    w, V = _squared_window_eig(rc, k)
    return V @ ((V.T @ _t_e0(rc, k)) / np.sqrt(w))


def sign_or_iterate(rec: LanczosRecurrence, k, c=0.0):
    """Lanczos-OR induced approximation to ``sign(A - c I) b``.

    Needs a recurrence of length at least ``k``; raises ``PivotError`` when
    the squared window is singular.
    """
    y = sign_or_coefficients(rec, k, c)
    return rec.b_norm * (rec.basis_columns(k) @ y)


def sign_fa_coefficients(rec: LanczosRecurrence, k, c=0.0):
    """``sign(T - c I) e_0``; raises ``FunctionDomainError`` at a zero Ritz value."""
    _check_k(rec, k)
    a, b = rec.tridiagonal(k)
    w, V = tridiag_eigendecomposition(a - c, b)
    radius = max(np.abs(w).max(), rec.norm_estimate)
    if np.any(np.abs(w) <= ZERO_EIGENVALUE_RTOL * radius) or radius == 0.0:
        raise FunctionDomainError("sign undefined: T - cI has a zero Ritz value")
    return V @ (np.sign(w) * V[0, :])


def sign_coalescence_gap(rec: LanczosRecurrence, k, c=0.0):
    """Distance between Lanczos-FA and sign-OR, and its a priori bound.

    Both are measured for unit ``b``. Returns ``(gap, bound)`` with
    ``bound = beta_{k-1}^2 sigma_max(T) / (2 sigma_min(T)^3)``; ``(0, 0)`` when
    ``beta_{k-1} = 0`` and ``(inf, inf)`` when ``T`` is singular.
    """
    _check_k(rec, k)
    beta = float(rec.betas[k - 1])
    if beta == 0.0:
        return 0.0, 0.0
    a, b = rec.tridiagonal(k)
    sig = np.abs(tridiag_eigendecomposition(a - c, b)[0])
    if sig.min() <= ZERO_EIGENVALUE_RTOL * max(sig.max(), rec.norm_estimate):
        return np.inf, np.inf
    bound = beta * beta * sig.max() / (2.0 * sig.min() ** 3)
    diff = sign_fa_coefficients(rec, k, c) - sign_or_coefficients(rec, k, c)
    if rec.basis is not None:
        gap = float(np.linalg.norm(rec.basis_columns(k) @ diff))
    else:
        gap = float(np.linalg.norm(diff))
    return gap, float(bound)


def _harmonic_pencil(rec, k, c):
    """Eigen-data of ``S = W^{-1/2} T_c W^{-1/2}`` with ``W = [T_hat_c^2]_{:k,:k}``."""
    _check_k(rec, k)
    rc = shift_recurrence(rec, c) if c else rec
    w, V = _squared_window_eig(rc, k)
    W_inv_half = (V / np.sqrt(w)) @ V.T
    W_half = (V * np.sqrt(w)) @ V.T
    S = W_inv_half @ rc.tridiagonal_dense(k) @ W_inv_half
    mu, U = dense_sym_eigendecomposition(0.5 * (S + S.T))
    # S scales like 1/||T||, so compare against norm_estimate / ||W||
    ref = max(np.abs(mu).max(), rc.norm_estimate / w[-1])
    if np.any(np.abs(mu) <= ZERO_EIGENVALUE_RTOL * ref):
        raise NumericalError("harmonic Ritz values: T is singular")
    return mu, U, W_inv_half, W_half


def harmonic_ritz_values(rec: LanczosRecurrence, k, c=0.0):
    """Solutions ``theta`` of ``[T_hat^2]_{:k,:k} y = theta T y``, ascending.

    Computed as reciprocals of the eigenvalues of the symmetric matrix
    ``W^{-1/2} T W^{-1/2}``.
    """
    mu = _harmonic_pencil(rec, k, c)[0]
    return np.sort(1.0 / mu)


def sign_harmonic_iterate(rec: LanczosRecurrence, k, c=0.0):
    """``Q p(T) e_0`` with ``p`` interpolating ``sign(x)`` at the harmonic Ritz values of ``T - cI``.

    Uses that ``p(T) e_0 = p(H) e_0`` for ``deg p < k`` with ``H = T^{-1} W``, whose
    eigenvalues are the interpolation nodes, so ``p(H) = sign(H)`` is applied
    through the symmetric eigenproblem instead of forming ``p``.
    Raises ``NumericalError`` if two nodes coincide to relative gap ``1e-10``.
    """
    return rec.b_norm * (rec.basis_columns(k) @ _harmonic_sign_coefficients(rec, k, c))


def _harmonic_sign_coefficients(rec, k, c):
    mu, U, W_inv_half, W_half = _harmonic_pencil(rec, k, c)
    theta = 1.0 / mu
    srt = np.sort(theta)
    if k > 1:
        gaps = np.abs(np.diff(srt))
        if np.any(gaps <= HARMONIC_NODE_RTOL * np.abs(srt).max()):
            raise NumericalError("harmonic Ritz values coincide; interpolant is not unique")
    e0 = np.zeros(k)
    e0[0] = 1.0
    return W_inv_half @ (U @ (np.sign(theta) * (U.T @ (W_half @ e0))))


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights with ``sign(x) ~ sum_i w_i x / (x^2 + z_i^2)``."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def count(self):
        return self.nodes.shape[0]

    def proxy(self, x):
        """The scalar rational proxy ``r_q(x)``."""
        x = np.asarray(x, dtype=float)
        z2 = self.nodes**2
        return np.sum(self.weights * x[..., None] / (x[..., None] ** 2 + z2), axis=-1)

    def integral_of_one(self):
        """``sum_i w_i / (1 + z_i^2)``, which approximates ``(2/pi) int_0^inf dz / (1 + z^2) = 1``."""
        return float(np.sum(self.weights / (1.0 + self.nodes**2)))

    def terms(self):
        return [PartialFractionTerm(0.0, float(w), 0.0, 1.0, 0.0, float(z * z))
                for z, w in zip(self.nodes, self.weights)]

    def sup_error(self, eigenvalues):
        """``max |sign(lambda) - r_q(lambda)|`` over the given points."""
        lam = np.asarray(eigenvalues, dtype=float)
        return float(np.max(np.abs(np.sign(lam) - self.proxy(lam))))


def build_sign_quadrature(m, scale=1.0):
    """Gauss-Legendre rule for ``sign(x) = (2/pi) int_0^inf x / (x^2 + z^2) dz``.

    Substitutes ``z = scale * tan(theta)`` and uses ``m`` points on
    ``(0, pi/2)``. ``scale`` near the geometric mean of ``|lambda|`` balances
    the error across a spectrum spanning several decades.
    """
    if int(m) < 1:
        raise ValueError("m must be at least 1")
    if not scale > 0:
        raise ValueError("scale must be positive")
    x, w = np.polynomial.legendre.leggauss(int(m))
    theta = 0.25 * np.pi * (x + 1.0)
    wtheta = 0.25 * np.pi * w
    nodes = scale * np.tan(theta)
    weights = (2.0 / np.pi) * wtheta * scale / np.cos(theta) ** 2
    return QuadratureRule(nodes, weights)


def rational_termwise_or(rec: LanczosRecurrence, k, terms, interval: SpectrumInterval):
    """Sum of per-term Lanczos-OR iterates sharing one recurrence."""
    out = None
    for i, term in enumerate(terms):
        pair = stabilize(term.to_spec(), interval)
        try:
            x = lanczos_or_iterate(rec, k, pair)
        except PivotError as exc:
            raise PivotError(f"partial-fraction term {i} ({term}): {exc}", index=exc.index) from exc
        out = x if out is None else out + x
    return out


def spectrum_cdf(rec: LanczosRecurrence, k, thresholds):
    """Estimates of ``b^T 1[A <= c] b / ||b||^2`` from the induced sign approximation.

    Values are ``(1 - e_0^T ([T_hat_c^2]_{:k,:k})^{-1/2} T_c e_0) / 2``. A threshold
    where the shifted window is singular is reported as ``nan``.
    """
    out = np.empty(len(thresholds))
    for i, c in enumerate(thresholds):
        try:
            out[i] = 0.5 * (1.0 - sign_or_coefficients(rec, k, float(c))[0])
        except NumericalError:
            out[i] = np.nan
    return out


def spectrum_cdf_fa(rec: LanczosRecurrence, k, thresholds):
    """Gauss-quadrature (Lanczos-FA) estimate ``(1 - e_0^T sign(T - c I) e_0) / 2``.

    Piecewise constant in ``c`` with jumps at the Ritz values; ``nan`` within
    ``1e-13`` (relative to the recurrence norm estimate) of a Ritz value.
    """
    a, b = rec.tridiagonal(k)
    w, V = tridiag_eigendecomposition(a, b)
    tau = V[0, :] ** 2
    tol = ZERO_EIGENVALUE_RTOL * max(np.abs(w).max(), rec.norm_estimate)
    out = np.empty(len(thresholds))
    for i, c in enumerate(thresholds):
        d = w - c
        if np.any(np.abs(d) <= tol):
            out[i] = np.nan
        else:
            out[i] = 0.5 * (1.0 - float(np.sum(tau * np.sign(d))))
    return out


def spectrum_cdf_harmonic(rec: LanczosRecurrence, k, thresholds):
    """CDF estimate from interpolating the sign function at harmonic Ritz values of ``T - c I``."""
    out = np.empty(len(thresholds))
    for i, c in enumerate(thresholds):
        try:
            out[i] = 0.5 * (1.0 - _harmonic_sign_coefficients(rec, k, float(c))[0])
        except NumericalError:
            out[i] = np.nan
    return out
