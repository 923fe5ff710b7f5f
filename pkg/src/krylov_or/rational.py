"""Rational functions r = M/N, their stabilization, and the Lanczos-OR / Lanczos-FA iterates."""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.linalg.blas import daxpy

from .lanczos import BufferAudit, LanczosRecurrence, lanczos
from .ldl import dense_ldl
from .linalg import as_vector, aslinearoperator
from .tridiag import (
    poly_degree,
    required_length,
    tridiag_function_apply,
    truncated_poly_first_column,
    truncated_poly_of_extended,
)

__all__ = [
    "RationalFunctionSpec",
    "SpectrumInterval",
    "StabilizedPair",
    "PartialFractionTerm",
    "stabilize",
    "lanczos_or_iterate",
    "lanczos_fa_iterate",
    "two_pass_lanczos_fa",
    "polynomial_bound_certificate",
    "combine_basis",
]

ENDPOINT_RTOL = 1e-12


def _trim(c):
    c = np.atleast_1d(np.asarray(c, dtype=float))
    return c[: poly_degree(c) + 1].copy()


def _expand(real_roots, complex_pairs):
    coeffs = np.array([1.0])
    for z, mult in real_roots:
        for _ in range(mult):
            coeffs = P.polymul(coeffs, [-z, 1.0])
    for w, mult in complex_pairs:
        quad = [abs(w) ** 2, -2.0 * w.real, 1.0]
        for _ in range(mult):
            coeffs = P.polymul(coeffs, quad)
    return coeffs


@dataclass(frozen=True)
class SpectrumInterval:
    """Closed interval ``[lower, upper]`` containing the spectrum."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise ValueError("interval endpoints must be finite")
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")

    @property
    def width(self):
        return self.upper - self.lower

    @classmethod
    def from_eigenvalues(cls, eigenvalues):
        lam = np.asarray(eigenvalues, dtype=float)
        return cls(float(lam.min()), float(lam.max()))


@dataclass(frozen=True)
class RationalFunctionSpec:
    """``r = M / N`` with monic ``N`` given by its roots.

    Parameters
    ----------
    numerator : array_like
        Ascending-power coefficients of ``M``.
    real_roots : sequence of (float, int)
        Real roots of ``N`` with multiplicities; roots must be distinct.
    complex_pairs : sequence of (complex, int)
        Roots with positive imaginary part; each contributes
        ``(x - w)(x - conj w)`` raised to its multiplicity.
    """

    numerator: np.ndarray
    real_roots: Tuple[Tuple[float, int], ...] = ()
    complex_pairs: Tuple[Tuple[complex, int], ...] = ()

    def __post_init__(self):
        num = _trim(self.numerator)
        real = tuple((float(z), int(m)) for z, m in self.real_roots)
        pairs = tuple((complex(w), int(m)) for w, m in self.complex_pairs)
        zs = [z for z, _ in real]
        if len(set(zs)) != len(zs):
            raise ValueError("real roots must be distinct; use multiplicities")
        for z, m in real:
            if not np.isfinite(z) or m < 1:
                raise ValueError(f"invalid real root {z} with multiplicity {m}")
        for w, m in pairs:
            if not w.imag > 0 or m < 1:
                raise ValueError(f"complex root {w} must have positive imaginary part")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "real_roots", real)
        object.__setattr__(self, "complex_pairs", pairs)
        if poly_degree(num) > self.denominator_degree:
            raise ValueError("numerator degree exceeds denominator degree")

    @property
    def denominator_degree(self):
        return sum(m for _, m in self.real_roots) + 2 * sum(m for _, m in self.complex_pairs)

    def denominator(self):
        return _expand(self.real_roots, self.complex_pairs)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return P.polyval(x, self.numerator) / P.polyval(x, self.denominator())

    @classmethod
    def inverse(cls):
        """``1/x``."""
        return cls([1.0], real_roots=((0.0, 1),))

    @classmethod
    def from_denominator_roots(cls, numerator, roots):
        """Group a flat list of (possibly complex) roots into the factored form."""
        real, pairs = {}, {}
        for z in roots:
            z = complex(z)
            if z.imag == 0.0:
                real[z.real] = real.get(z.real, 0) + 1
            elif z.imag > 0:
                pairs[z] = pairs.get(z, 0) + 1
        return cls(numerator, tuple(real.items()), tuple(pairs.items()))


@dataclass(frozen=True)
class PartialFractionTerm:
    """``(A x^2 + B x + C) / (a x^2 + b x + c)``."""

    A: float
    B: float
    C: float
    a: float
    b: float
    c: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return (self.A * x * x + self.B * x + self.C) / (self.a * x * x + self.b * x + self.c)

    def to_spec(self):
        """The same function with a monic factored denominator."""
        a, b, c = self.a, self.b, self.c
        num = np.array([self.C, self.B, self.A])
        if a != 0.0:
            disc = b * b - 4.0 * a * c
            if disc > 0:
                s = np.sqrt(disc)
                # stable quadratic roots
                t = -0.5 * (b + np.copysign(s, b))
                r1, r2 = t / a, c / t
                roots = ((r1, 1), (r2, 1)) if r1 != r2 else ((r1, 2),)
                return RationalFunctionSpec(num / a, real_roots=roots)
            if disc == 0:
                return RationalFunctionSpec(num / a, real_roots=((-b / (2 * a), 2),))
            w = complex(-b / (2 * a), np.sqrt(-disc) / (2 * abs(a)))
            return RationalFunctionSpec(num / a, complex_pairs=((w, 1),))
        if b != 0.0:
            return RationalFunctionSpec(num / b, real_roots=((-c / b, 1),))
        if c == 0.0:
            raise ValueError("denominator is identically zero")
        return RationalFunctionSpec(num / c)


@dataclass(frozen=True)
class StabilizedPair:
    """``(M~, N~) = (xi R M, xi R N)`` with ``N~ >= 0`` on the interval.

    ``real_roots`` / ``complex_pairs`` factor ``N~ / xi``.
    """

    Mtilde: np.ndarray
    Ntilde: np.ndarray
    xi: int
    R: np.ndarray
    interval: SpectrumInterval
    real_roots: Tuple[Tuple[float, int], ...] = ()
    complex_pairs: Tuple[Tuple[complex, int], ...] = ()
    spec: RationalFunctionSpec = field(default=None, compare=False)

    @property
    def degree(self):
        return max(poly_degree(self.Mtilde), poly_degree(self.Ntilde))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return P.polyval(x, self.Mtilde) / P.polyval(x, self.Ntilde)

    def H(self, eigenvalues):
        """Diagonal of ``N~(A)`` for a diagonal ``A``."""
        return P.polyval(np.asarray(eigenvalues, dtype=float), self.Ntilde)

    def as_spec(self):
        """``M~ / N~`` rewritten with a monic factored denominator."""
        return RationalFunctionSpec(self.xi * self.Mtilde, self.real_roots, self.complex_pairs)


def stabilize(spec: RationalFunctionSpec, interval: SpectrumInterval) -> StabilizedPair:
    """Multiply ``M`` and ``N`` by ``R = xi prod (x - z_i)``.

    The product runs over real roots strictly inside the interval with odd
    multiplicity, so ``N~ = R N`` has no sign change there; ``xi`` makes
    ``N~(lower) >= 0``. Roots within ``1e-12 * width`` of an endpoint are
    rejected.
    """
    lo, hi = interval.lower, interval.upper
    tol = ENDPOINT_RTOL * (interval.width if interval.width > 0 else max(abs(lo), 1.0))
    R = np.array([1.0])
    roots = []
    for z, m in spec.real_roots:
        if abs(z - lo) <= tol or abs(z - hi) <= tol:
            raise ValueError(
                f"denominator root {z!r} lies on the boundary of [{lo!r}, {hi!r}]"
            )
        inside = lo < z < hi
        if inside and m % 2 == 1:
            R = P.polymul(R, [-z, 1.0])
            roots.append((z, m + 1))
        else:
            roots.append((z, m))
    N = spec.denominator()
    Ntilde = P.polymul(R, N)
    xi = 1 if P.polyval(lo, Ntilde) >= 0 else -1
    R = xi * R
    return StabilizedPair(
        Mtilde=_trim(P.polymul(R, spec.numerator)),
        Ntilde=_trim(xi * Ntilde),
        xi=xi,
        R=R,
        interval=interval,
        real_roots=tuple(roots),
        complex_pairs=spec.complex_pairs,
        spec=spec,
    )


def combine_basis(Q, coef, scale=1.0, out=None, audit=None):
    """``out += scale * sum_j coef[j] Q[:, j]``, accumulated column by column.

    Shared by the stored-basis and two-pass paths so that both perform the
    same floating-point operations in the same order.
    """
    if out is None:
        out = np.zeros(Q.shape[0])
        if audit is not None:
            audit.acquire()
    for j in range(Q.shape[1]):
        out = daxpy(np.ascontiguousarray(Q[:, j]), out, a=scale * coef[j])
    return out


def lanczos_or_iterate(rec: LanczosRecurrence, k, pair: StabilizedPair):
    """``||b|| Q ([N~(T_hat)]_{:k,:k})^{-1} [M~(T_hat)]_{:k,0}``.

    Raises ``PivotError`` if the window is not positive definite.
    """
    dN = poly_degree(pair.Ntilde)
    dM = poly_degree(pair.Mtilde)
    need = max(required_length(k, dN), required_length(k, dM))
    if rec.length < need and not (rec.exhausted and k <= rec.length):
        raise ValueError(f"Lanczos-OR at k={k} needs {need} Lanczos steps, got {rec.length}")
    fact = dense_ldl(truncated_poly_of_extended(rec, pair.Ntilde, k), definite=True)
    y = fact.solve(truncated_poly_first_column(rec, pair.Mtilde, k))
    return rec.b_norm * (rec.basis_columns(k) @ y)


def lanczos_fa_iterate(rec: LanczosRecurrence, k, f):
    """``||b|| Q f(T) e_0``; ``f`` must be vectorized."""
    if k < 1 or k > rec.length:
        raise ValueError(f"k must be in [1, {rec.length}], got {k}")
    y = tridiag_function_apply(rec, f, k)
    return combine_basis(rec.basis_columns(k), y, scale=rec.b_norm)


def two_pass_lanczos_fa(A, b, k, f, audit: BufferAudit = None):
    """Lanczos-FA without storing the basis, by running Lanczos twice.

    The first pass yields ``T`` and ``f(T) e_0``; the second regenerates each
    ``q_j`` and accumulates ``||b|| [f(T) e_0]_j q_j``.
    """
    A = aslinearoperator(A)
    b = as_vector(b, "b")
    first = lanczos(A, b, k, store_basis=False, audit=audit)
    k_eff = first.length
    y = tridiag_function_apply(first, f, k_eff)
    state = {"j": 0, "out": None}

    def accumulate(q, alpha, beta):
        j = state["j"]
        if j < k_eff:
            state["out"] = combine_basis(q[:, None], y[j : j + 1], scale=first.b_norm,
                                         out=state["out"], audit=audit)
        state["j"] = j + 1

    lanczos(A, b, k_eff, store_basis=False, observer=accumulate, audit=audit)
    if audit is not None:
        audit.release()
    return state["out"]


def polynomial_bound_certificate(pair: StabilizedPair, rec: LanczosRecurrence, k, p, eigenvalues):
    """Both sides of the a priori polynomial error bound.

    ``A`` is ``diag(eigenvalues)`` and ``b = ||b|| q_0`` is recovered from the
    recurrence. Returns ``(lhs, rhs)`` with
    ``lhs = ||lan-OR_k - r(A) b||_H / ||b||_H`` and
    ``rhs = max_lambda |r(lambda) - p(lambda)|``.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    b = rec.b_norm * rec.basis[:, 0]
    h = pair.H(lam)
    exact = pair(lam) * b
    err = lanczos_or_iterate(rec, k, pair) - exact
    lhs = np.sqrt(np.sum(h * err * err)) / np.sqrt(np.sum(h * b * b))
    rhs = float(np.max(np.abs(pair(lam) - P.polyval(lam, np.atleast_1d(p)))))
    return float(lhs), rhs
