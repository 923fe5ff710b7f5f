"""Numerical experiments comparing Lanczos-OR with Lanczos-FA, CG and restarting."""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import NumericalError
from .lanczos import lanczos
from .linalg import DiagonalOperator, SymmetricLinearOperator
from .matfun import (
    build_sign_quadrature,
    rational_termwise_or,
    sign_fa_coefficients,
    sign_harmonic_iterate,
    sign_or_iterate,
    spectrum_cdf,
    spectrum_cdf_fa,
    spectrum_cdf_harmonic,
)
from .rational import (
    RationalFunctionSpec,
    SpectrumInterval,
    lanczos_fa_iterate,
    lanczos_or_iterate,
    stabilize,
)
from .report import ExperimentReport
from .solvers import cg_iterate, hnorm_projection_oracle, restarted_cg
from .spectra import SpectrumSpec, exact_matrix_function, weighted_error

__all__ = ["ExperimentConfig", "ExperimentResult", "EXPERIMENTS", "run_experiment"]


@dataclass
class ExperimentConfig:
    """Settings shared by all experiments; ``None`` selects the experiment default."""

    spectrum: Optional[SpectrumSpec] = None
    k_max: Optional[int] = None
    c: Optional[float] = None
    quad_points: int = 20
    restart_lengths: Sequence[Optional[int]] = (10, 20, 30, 38, 43, None)
    reorth: Optional[bool] = None
    rhs: str = "uniform"
    seed: int = 0


@dataclass
class ExperimentResult:
    name: str
    reports: list
    eigenvalues: np.ndarray
    extras: dict = field(default_factory=dict)


def _rhs(config, n):
    if config.rhs == "uniform":
        return np.full(n, 1.0 / np.sqrt(n))
    if config.rhs == "random":
        b = np.random.default_rng(config.seed).standard_normal(n)
        return b / np.linalg.norm(b)
    raise ValueError(f"unknown right-hand side {config.rhs!r}")


def _setup(config, default_spec, default_k, default_reorth):
    spec = config.spectrum or default_spec
    lam = spec.eigenvalues()
    k_max = int(default_k if config.k_max is None else config.k_max)
    if k_max < 1:
        raise ValueError("k_max must be positive")
    k_max = min(k_max, lam.shape[0])
    reorth = default_reorth if config.reorth is None else bool(config.reorth)
    return lam, DiagonalOperator(lam), _rhs(config, lam.shape[0]), k_max, reorth


def _append_or_inf(rep, k, mv, compute):
    try:
        rep.append(k, mv, compute())
    except NumericalError:
        rep.append(k, mv, np.inf)


def sign_compare(config: ExperimentConfig) -> ExperimentResult:
    """A^2-norm errors for ``sign(A - cI) b``: OR-induced, FA, harmonic Ritz and optimal."""
    lam, A, b, k_max, reorth = _setup(config, SpectrumSpec(kind="composite"), 60, True)
    c = float(config.c or 0.0)
    shifted = lam - c
    exact = exact_matrix_function(DiagonalOperator(shifted), np.sign, b)
    h = lambda x: (x - c) ** 2
    nb = weighted_error(b, 0.0 * b, lam, h)
    rec = lanczos(A, b, min(k_max + 1, lam.shape[0]), reorthogonalize=reorth)
    k_max = min(k_max, rec.length)
    reps = {m: ExperimentReport(m, "A^2") for m in ("lanczos-or", "lanczos-fa", "harmonic-ritz", "optimal")}
    for k in range(1, k_max + 1):
        Q = rec.basis_columns(k)
        _append_or_inf(reps["lanczos-or"], k, k,
                       lambda: weighted_error(sign_or_iterate(rec, k, c), exact, lam, h) / nb)
        _append_or_inf(reps["lanczos-fa"], k, k, lambda: weighted_error(
            rec.b_norm * (Q @ sign_fa_coefficients(rec, k, c)), exact, lam, h) / nb)
        _append_or_inf(reps["harmonic-ritz"], k, k,
                       lambda: weighted_error(sign_harmonic_iterate(rec, k, c), exact, lam, h) / nb)
        _append_or_inf(reps["optimal"], k, k, lambda: weighted_error(
            hnorm_projection_oracle(lambda v: shifted**2 * v, Q, exact), exact, lam, h) / nb)
    return ExperimentResult("sign-compare", list(reps.values()), lam, {"c": c})


def spectrum_cdf_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Mean absolute deviation of CDF estimates from the empirical spectral CDF, per k."""
    lam, A, b, k_max, reorth = _setup(config, SpectrumSpec(kind="chi2"), 10, True)
    rec = lanczos(A, b, min(k_max + 1, lam.shape[0]), reorthogonalize=reorth)
    k_max = min(k_max, rec.length)
    grid = np.linspace(lam[0], lam[-1], 100)
    weights = b * b / np.dot(b, b)
    empirical = np.array([weights[lam <= t].sum() for t in grid])
    methods = {"lanczos-or": spectrum_cdf, "lanczos-fa": spectrum_cdf_fa, "harmonic-ritz": spectrum_cdf_harmonic}
    reps = {m: ExperimentReport(m, "cdf-mad") for m in methods}
    curves = {}
    for k in range(1, k_max + 1):
        for name, fn in methods.items():
            est = fn(rec, k, grid)
            dev = np.abs(est - empirical)
            reps[name].append(k, k, float(np.mean(dev)) if np.all(np.isfinite(dev)) else np.inf)
            if k == k_max:
                curves[name] = est
    return ExperimentResult("spectrum-cdf", list(reps.values()), lam,
                            {"grid": grid, "empirical": empirical, "curves": curves, "k": k_max})


def proxy_rational(config: ExperimentConfig) -> ExperimentResult:
    """Termwise Lanczos-OR on a quadrature proxy for sign, measured against sign and the proxy."""
    lam, A, b, k_max, reorth = _setup(config, SpectrumSpec(kind="composite"), 120, True)
    scale = float(np.sqrt(np.abs(lam).min() * np.abs(lam).max()))
    if scale == 0.0:
        raise ValueError("spectrum contains zero; sign is undefined")
    rule = build_sign_quadrature(config.quad_points, scale)
    terms = rule.terms()
    floor = rule.sup_error(lam)
    exact_sign = exact_matrix_function(A, np.sign, b)
    exact_proxy = exact_matrix_function(A, rule.proxy, b)
    h = lambda x: x**2
    nb = weighted_error(b, 0.0 * b, lam, h)
    interval = SpectrumInterval.from_eigenvalues(lam)
    rec = lanczos(A, b, min(k_max + 1, lam.shape[0]), reorthogonalize=reorth)
    k_max = min(k_max, rec.length)
    to_sign = ExperimentReport("lanczos-or:sign", "A^2")
    to_proxy = ExperimentReport("lanczos-or:proxy", "A^2")
    inf_floor = ExperimentReport("proxy-floor", "inf")
    for k in range(1, k_max + 1):
        x = rational_termwise_or(rec, k, terms, interval)
        to_sign.append(k, k, weighted_error(x, exact_sign, lam, h) / nb)
        to_proxy.append(k, k, weighted_error(x, exact_proxy, lam, h) / nb)
        inf_floor.append(k, k, floor)
    vector_floor = weighted_error(exact_proxy, exact_sign, lam, h) / nb
    return ExperimentResult("proxy-rational", [to_sign, to_proxy, inf_floor], lam,
                            {"floor": floor, "vector_floor": vector_floor, "scale": scale})


def squared_system(config: ExperimentConfig) -> ExperimentResult:
    """``(A^2 + cI)^{-1} b``: Lanczos-OR and Lanczos-FA on ``A`` against CG on ``A^2 + cI``."""
    default = SpectrumSpec(kind="intervals", intervals=[(1.0, 10.0)], step=0.005)
    lam, A, b, k_max, reorth = _setup(config, default, 80, False)
    c = 0.05 if config.c is None else float(config.c)
    if c < 0:
        raise ValueError("c must be nonnegative")
    if c > 0:
        spec = RationalFunctionSpec([1.0], (), ((1j * np.sqrt(c), 1),))
    else:
        spec = RationalFunctionSpec([1.0], ((0.0, 2),), ())
    f = lambda x: 1.0 / (x * x + c)
    exact = exact_matrix_function(A, f, b)
    h = lambda x: x * x + c
    nb = weighted_error(b, 0.0 * b, lam, h)
    pair = stabilize(spec, SpectrumInterval.from_eigenvalues(lam))
    rec = lanczos(A, b, min(k_max + 1, lam.shape[0]), reorthogonalize=reorth)
    k_max = min(k_max, rec.length)
    norm = f"A^2+{c:g}I" if c else "A^2"
    rep_or = ExperimentReport("lanczos-or", norm)
    rep_fa = ExperimentReport("lanczos-fa", norm)
    for k in range(1, k_max + 1):
        _append_or_inf(rep_or, k, k, lambda: weighted_error(lanczos_or_iterate(rec, k, pair), exact, lam, h) / nb)
        _append_or_inf(rep_fa, k, k, lambda: weighted_error(lanczos_fa_iterate(rec, k, f), exact, lam, h) / nb)
    sq = SymmetricLinearOperator(lam.shape[0], lambda v: lam * (lam * v) + c * v)
    rec_sq = lanczos(sq, b, max(1, k_max // 2), reorthogonalize=reorth)
    rep_cg = ExperimentReport("cg-squared", norm)
    for j in range(1, rec_sq.length + 1):
        _append_or_inf(rep_cg, j, 2 * j, lambda: weighted_error(cg_iterate(rec_sq, j), exact, lam, h) / nb)
    return ExperimentResult("squared-system", [rep_or, rep_fa, rep_cg], lam, {"c": c})


def restart_compare(config: ExperimentConfig) -> ExperimentResult:
    """Relative 2-norm errors of CG without reorthogonalization and restarted CG, for ``A^{-1} b``."""
    default = SpectrumSpec(kind="model", n=1000, kappa=5e3, rho=0.8)
    lam, A, b, budget, reorth = _setup(config, default, 150, True)
    if np.any(lam == 0):
        raise ValueError("spectrum contains zero; A is singular")
    exact = exact_matrix_function(A, lambda x: 1.0 / x, b)
    scale = float(np.linalg.norm(exact))
    reports = []
    rec = lanczos(A, b, budget, reorthogonalize=False)
    plain = ExperimentReport("lanczos-or", "l2")
    for k in range(1, rec.length + 1):
        _append_or_inf(plain, k, k, lambda: float(np.linalg.norm(cg_iterate(rec, k) - exact)) / scale)
    reports.append(plain)
    for m in config.restart_lengths:
        hist = restarted_cg(A, b, m, budget, reorthogonalize=reorth)
        label = "inf" if m is None else str(int(m))
        rep = ExperimentReport(f"restarted-cg:m={label}", "l2")
        for mv, e in zip(hist.matvecs, hist.errors(exact)):
            rep.append(mv, mv, e)
        reports.append(rep)
    return ExperimentResult("restart-compare", reports, lam, {"budget": budget})


EXPERIMENTS = {
    "sign-compare": sign_compare,
    "spectrum-cdf": spectrum_cdf_experiment,
    "proxy-rational": proxy_rational,
    "squared-system": squared_system,
    "restart-compare": restart_compare,
}


def run_experiment(name, config: ExperimentConfig = None) -> ExperimentResult:
    """Run a named experiment; raises ``ValueError`` for an unknown name or bad config."""
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    return EXPERIMENTS[name](config or ExperimentConfig())
