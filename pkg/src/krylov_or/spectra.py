"""Synthetic spectra, exact matrix functions and error norms."""

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .linalg import DiagonalOperator, as_vector, read_eigenvalues

__all__ = [
    "model_spectrum",
    "interval_spectrum",
    "parse_intervals",
    "composite_sign_spectrum",
    "chi2_spectrum",
    "SpectrumSpec",
    "exact_matrix_function",
    "weighted_error",
    "uniform_weight_vector",
]


def model_spectrum(n, kappa, rho, lambda1=1.0):
    """Eigenvalues ``lambda_i = lambda_1 + ((i-1)/(n-1)) (kappa-1) rho^(n-i)``.

    The endpoints ``lambda_1`` and ``lambda_n = kappa`` are set exactly.

    Examples
    --------
    >>> model_spectrum(4, 10.0, 0.5).tolist()
    [1.0, 1.75, 4.0, 10.0]
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"model spectrum needs n >= 2, got {n}")
    if not kappa > 1:
        raise ValueError(f"model spectrum needs kappa > 1, got {kappa}")
    if not 0 < rho <= 1:
        raise ValueError(f"model spectrum needs 0 < rho <= 1, got {rho}")
    i = np.arange(1, n + 1, dtype=float)
    lam = lambda1 + ((i - 1) / (n - 1)) * (kappa - 1) * rho ** (n - i)
    lam[0] = lambda1
    lam[-1] = kappa
    return np.sort(lam)


def interval_spectrum(intervals, step=None, counts=None):
    """Uniformly spaced points on a union of closed intervals.

    Give either a common ``step`` or per-interval point ``counts``.
    """
    blocks = []
    for idx, (lo, hi) in enumerate(intervals):
        lo, hi = float(lo), float(hi)
        if not hi > lo:
            raise ValueError(f"interval {idx} is empty: [{lo}, {hi}]")
        if counts is not None:
            m = int(counts[idx])
        elif step is not None:
            m = int(round((hi - lo) / step)) + 1
        else:
            raise ValueError("give step or counts")
        if m < 2:
            raise ValueError(f"interval {idx} needs at least 2 points")
        blocks.append(np.linspace(lo, hi, m))
    lam = np.sort(np.concatenate(blocks))
    if np.any(np.diff(lam) == 0):
        raise ValueError("intervals overlap")
    return lam


def parse_intervals(text):
    """Parse ``"[-10,-1]u[1,10]"`` (``u``, ``U`` or ``+`` separated) into pairs."""
    out = []
    cleaned = text.replace(" ", "").replace("U", "u").replace("+", "u").replace("∪", "u")
    for part in cleaned.split("u"):
        if not part:
            continue
        if not (part.startswith("[") and part.endswith("]")):
            raise ValueError(f"bad interval {part!r}; expected [lo,hi]")
        try:
            lo, hi = (float(v) for v in part[1:-1].split(","))
        except ValueError:
            raise ValueError(f"bad interval {part!r}; expected [lo,hi]") from None
        out.append((lo, hi))
    if not out:
        raise ValueError(f"no intervals in {text!r}")
    return out


def composite_sign_spectrum():
    """100 negated ``model(1e2, 0.9)`` points together with 300 ``model(1e3, 0.8)`` points."""
    neg = -model_spectrum(100, 1e2, 0.9)
    pos = model_spectrum(300, 1e3, 0.8)
    return np.sort(np.concatenate([neg, pos]))


def chi2_spectrum():
    """Bundled 1000-point spectrum: chi-squared (10 degrees of freedom) quantiles."""
    ref = resources.files("krylov_or").joinpath("data/chi2_quantiles_1000.txt")
    with resources.as_file(ref) as path:
        return read_eigenvalues(path)


@dataclass
class SpectrumSpec:
    """Recipe for a diagonal test spectrum.

    ``kind`` is ``"model"``, ``"intervals"``, ``"file"``, ``"composite"`` or
    ``"chi2"``.
    """

    kind: str = "model"
    n: int = 1000
    kappa: float = 5e3
    rho: float = 0.8
    lambda1: float = 1.0
    intervals: list = field(default_factory=list)
    step: float = 0.005
    path: str = ""
    negate: bool = False

    def eigenvalues(self):
        if self.kind == "model":
            lam = model_spectrum(self.n, self.kappa, self.rho, self.lambda1)
        elif self.kind == "intervals":
            lam = interval_spectrum(self.intervals, step=self.step)
        elif self.kind == "file":
            lam = read_eigenvalues(self.path)
        elif self.kind == "composite":
            lam = composite_sign_spectrum()
        elif self.kind == "chi2":
            lam = chi2_spectrum()
        else:
            raise ValueError(f"unknown spectrum kind {self.kind!r}")
        return np.sort(-lam) if self.negate else lam

    def operator(self):
        return DiagonalOperator(self.eigenvalues())


def uniform_weight_vector(n):
    """Unit vector with equal weight on every eigencomponent."""
    return np.full(int(n), 1.0 / np.sqrt(n))


def exact_matrix_function(A: DiagonalOperator, f, b):
    """Ground truth ``f(A) b`` for a diagonal operator.

    Raises ``FunctionDomainError`` if ``f`` is not finite at some eigenvalue.
    """
    if not isinstance(A, DiagonalOperator):
        A = DiagonalOperator(A)
    return A.function_apply(f, as_vector(b, "b"))


def weighted_error(x, exact, eigenvalues=None, h=None):
    """``sqrt(e^T H e)`` with ``e = x - exact`` and ``H = diag(h(eigenvalues))``.

    ``h=None`` gives the Euclidean norm.

    Examples
    --------
    >>> float(weighted_error([1.0, 1.0], [0.0, 0.0], [1.0, -2.0], lambda x: x**2))**2
    5.0
    """
    e = np.asarray(x, dtype=float) - np.asarray(exact, dtype=float)
    if h is None:
        return float(np.linalg.norm(e))
    w = np.asarray(h(np.asarray(eigenvalues, dtype=float)), dtype=float)
    if np.any(w < 0):
        raise ValueError("weight must be nonnegative on the spectrum")
    return float(np.sqrt(np.sum(w * e * e)))
