import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import sqrtm

from krylov_or import (
    DiagonalOperator,
    NumericalError,
    PivotError,
    RationalFunctionSpec,
    SpectrumInterval,
    build_sign_quadrature,
    harmonic_ritz_values,
    lanczos,
    lanczos_or_iterate,
    minres_iterate,
    qmr_shifted_iterate,
    rational_termwise_or,
    sign_coalescence_gap,
    sign_harmonic_iterate,
    sign_or_iterate,
    spectrum_cdf,
    spectrum_cdf_fa,
    spectrum_cdf_harmonic,
    stabilize,
)
from krylov_or.rational import PartialFractionTerm
from krylov_or.spectra import chi2_spectrum, uniform_weight_vector

from conftest import random_spectrum


def a2_norm(v, lam):
    return float(np.sqrt(np.sum(lam**2 * v * v)))


def explicit_interpolant_apply(rec, k, nodes, values):
    """``||b|| Q p(T) e_0`` with ``p`` from a Vandermonde solve, for small k only."""
    V = np.vander(nodes, k, increasing=True)
    coef = np.linalg.solve(V, values)
    T = rec.tridiagonal_dense(k)
    v = np.zeros(k)
    v[0] = 1.0
    acc = np.zeros(k)
    for c in coef:
        acc += c * v
        v = T @ v
    return rec.b_norm * (rec.basis[:, :k] @ acc)


def two_point():
    b = np.ones(2) / np.sqrt(2.0)
    return b, lanczos(DiagonalOperator([1.0, -2.0]), b, 2)


def test_sign_or_examples(backend):
    b = np.array([0.3, -1.0, 2.0])
    rec = lanczos(DiagonalOperator(np.ones(3)), b, 1)
    np.testing.assert_allclose(sign_or_iterate(rec, 1), b, rtol=1e-15)
    b, rec = two_point()
    np.testing.assert_allclose(sign_or_iterate(rec, 1), -0.5 / np.sqrt(2.5) * b, rtol=1e-14)


def test_sign_or_shift_example():
    # sign(A - 3I) on diag(1, 2, 4, 5) is the sign pattern itself once k = n
    lam = np.array([1.0, 2.0, 4.0, 5.0])
    b = np.array([1.0, 2.0, -1.0, 0.5])
    rec = lanczos(DiagonalOperator(lam), b, 4, reorthogonalize=True)
    np.testing.assert_allclose(sign_or_iterate(rec, 4, 3.0), np.sign(lam - 3.0) * b, atol=1e-12)


def test_sign_or_large_k_accuracy(rng):
    lam = random_spectrum(rng, 40)
    b = rng.standard_normal(40)
    rec = lanczos(DiagonalOperator(lam), b, 40, reorthogonalize=True)
    x = sign_or_iterate(rec, rec.length)
    assert a2_norm(x - np.sign(lam) * b, lam) <= 1e-6


@pytest.mark.parametrize("seed", range(4))
def test_sign_or_matches_dense_square_root(seed):
    r = np.random.default_rng(seed)
    lam = random_spectrum(r, 30, definite=bool(seed % 2))
    b = r.standard_normal(30)
    rec = lanczos(DiagonalOperator(lam), b, 20, reorthogonalize=True)
    errs = []
    for k in range(1, 21):
        Q = rec.basis[:, :k]
        W = Q.T @ (lam[:, None] ** 2 * Q)
        T = Q.T @ (lam[:, None] * Q)
        ref = np.linalg.norm(b) * Q @ np.linalg.solve(sqrtm(W).real, T[:, 0])
        x = sign_or_iterate(rec, k)
        assert np.linalg.norm(x - ref) <= 1e-8 * np.linalg.norm(b)
        errs.append(a2_norm(x - np.sign(lam) * b, lam))
    # decays overall, though not monotonically at every step
    assert errs[-1] <= 0.1 * errs[0]


def test_sign_or_singular_window():
    rec = lanczos(DiagonalOperator([0.0, 0.0, 1.0]), np.array([1.0, 1.0, 0.0]), 1)
    with pytest.raises(PivotError):
        sign_or_iterate(rec, 1)


def test_gap_examples():
    b, rec = two_point()
    gap, bound = sign_coalescence_gap(rec, 1)
    assert gap == pytest.approx(1.0 - 0.5 / np.sqrt(2.5), rel=1e-13)
    assert bound == pytest.approx(2.25 * 0.5 / (2 * 0.125), rel=1e-13)
    rec = lanczos(DiagonalOperator([1.0, -2.0]), np.array([1.0, 0.0]), 2)
    assert rec.exhausted and sign_coalescence_gap(rec, 1) == (0.0, 0.0)


def test_gap_singular_T():
    lam = np.concatenate([-np.arange(1.0, 6.0), np.arange(1.0, 6.0)])
    rec = lanczos(DiagonalOperator(lam), np.ones(10), 3)
    assert sign_coalescence_gap(rec, 1) == (np.inf, np.inf)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.booleans())
def test_gap_below_bound(seed, reorth):
    r = np.random.default_rng(seed)
    n = int(r.integers(6, 40))
    lam = random_spectrum(r, n)
    rec = lanczos(DiagonalOperator(lam), r.standard_normal(n), n, reorthogonalize=reorth)
    for k in range(1, rec.length + 1):
        gap, bound = sign_coalescence_gap(rec, k)
        assert gap <= bound + 1e-12


def test_harmonic_examples():
    b, rec = two_point()
    theta = harmonic_ritz_values(rec, 1)
    assert theta[0] == pytest.approx((0.25 + 2.25) / -0.5, rel=1e-14)
    np.testing.assert_allclose(sign_harmonic_iterate(rec, 1), -b, rtol=1e-14)


def test_harmonic_spd_positive_and_constant_interpolant(rng):
    lam = random_spectrum(rng, 25, definite=True)
    b = rng.standard_normal(25)
    rec = lanczos(DiagonalOperator(lam), b, 10, reorthogonalize=True)
    for k in range(1, 9):
        assert np.all(harmonic_ritz_values(rec, k) > 0)
        np.testing.assert_allclose(sign_harmonic_iterate(rec, k), b, rtol=1e-9, atol=1e-9 * np.linalg.norm(b))


@pytest.mark.parametrize("seed", range(5))
def test_harmonic_interpolation_oracles(seed):
    r = np.random.default_rng(50 + seed)
    lam = random_spectrum(r, 30)
    rec = lanczos(DiagonalOperator(lam), r.standard_normal(30), 10, reorthogonalize=True)
    for k in range(1, 9):
        theta = harmonic_ritz_values(rec, k)
        y = explicit_interpolant_apply(rec, k, theta, 1.0 / theta)
        m = minres_iterate(rec, k)
        assert np.linalg.norm(y - m) <= 1e-8 * np.linalg.norm(m)
        s = explicit_interpolant_apply(rec, k, theta, np.sign(theta))
        h = sign_harmonic_iterate(rec, k)
        assert np.linalg.norm(s - h) <= 1e-8 * np.linalg.norm(s)


def test_harmonic_singular_T():
    lam = np.concatenate([-np.arange(1.0, 6.0), np.arange(1.0, 6.0)])
    rec = lanczos(DiagonalOperator(lam), np.ones(10), 3)
    with pytest.raises(NumericalError):
        harmonic_ritz_values(rec, 1)


def test_quadrature_examples():
    rule = build_sign_quadrature(40)
    assert np.all(rule.nodes > 0) and np.all(rule.weights > 0) and rule.count == 40
    assert abs(rule.integral_of_one() - 1.0) <= 1e-12
    assert abs(rule.proxy(5.0) - 1.0) <= 1e-6
    x = np.linspace(0.01, 30.0, 200)
    np.testing.assert_array_equal(rule.proxy(-x), -rule.proxy(x))


@pytest.mark.parametrize("m", [0, -3])
def test_quadrature_rejects_count(m):
    with pytest.raises(ValueError):
        build_sign_quadrature(m)


def test_quadrature_scale_balances_range():
    lam = np.concatenate([-np.geomspace(1.0, 100.0, 50), np.geomspace(1.0, 1000.0, 50)])
    plain = build_sign_quadrature(20).sup_error(lam)
    scaled = build_sign_quadrature(20, np.sqrt(1000.0)).sup_error(lam)
    assert scaled < plain


def _composite_like(rng, n=60):
    lam = np.concatenate([-np.geomspace(1.0, 50.0, n // 3), np.geomspace(0.8, 200.0, n - n // 3)])
    return np.sort(lam), rng.standard_normal(n)


def test_termwise_single_term_and_sum(rng):
    lam, b = _composite_like(rng)
    rec = lanczos(DiagonalOperator(lam), b, 15, reorthogonalize=True)
    interval = SpectrumInterval.from_eigenvalues(lam)
    rule = build_sign_quadrature(6, 10.0)
    terms = rule.terms()
    for k in range(1, 11):
        per_term = [lanczos_or_iterate(rec, k, stabilize(t.to_spec(), interval)) for t in terms]
        np.testing.assert_allclose(rational_termwise_or(rec, k, [terms[2]], interval), per_term[2], rtol=1e-14)
        total = sum(per_term)
        x = rational_termwise_or(rec, k, terms, interval)
        assert np.linalg.norm(x - total) <= 1e-12 * np.linalg.norm(total)


@pytest.mark.parametrize("z", [0.3, 1.0, 4.0])
def test_termwise_inverse_quadratic_is_qmr_combination(rng, z):
    lam, b = _composite_like(rng)
    rec = lanczos(DiagonalOperator(lam), b, 12, reorthogonalize=True)
    interval = SpectrumInterval.from_eigenvalues(lam)
    term = PartialFractionTerm(0.0, 0.0, 1.0, 1.0, 0.0, z * z)
    for k in range(1, 11):
        comb = (qmr_shifted_iterate(rec, k, 1j * z) - qmr_shifted_iterate(rec, k, -1j * z)) / (2j * z)
        x = rational_termwise_or(rec, k, [term], interval)
        assert np.linalg.norm(comb.real - x) <= 1e-10 * np.linalg.norm(x)


@pytest.mark.parametrize("m", [8, 20])
def test_triangle_inequality_split(rng, m):
    lam, b = _composite_like(rng)
    rec = lanczos(DiagonalOperator(lam), b, 40, reorthogonalize=True)
    interval = SpectrumInterval.from_eigenvalues(lam)
    rule = build_sign_quadrature(m, float(np.sqrt(np.abs(lam).min() * np.abs(lam).max())))
    floor = rule.sup_error(lam)
    nb = a2_norm(b, lam)
    exact, proxy = np.sign(lam) * b, rule.proxy(lam) * b
    for k in range(1, 41):
        x = rational_termwise_or(rec, k, rule.terms(), interval)
        lhs = a2_norm(exact - x, lam) / nb
        assert lhs <= floor + a2_norm(proxy - x, lam) / nb + 1e-10


def test_quadrature_refinement_consistency(rng):
    lam, b = _composite_like(rng, 40)
    rec = lanczos(DiagonalOperator(lam), b, 40, reorthogonalize=True)
    interval = SpectrumInterval.from_eigenvalues(lam)
    s = float(np.sqrt(np.abs(lam).min() * np.abs(lam).max()))
    coarse, fine = build_sign_quadrature(10, s), build_sign_quadrature(20, s)
    improvement = float(np.max(np.abs(coarse.proxy(lam) - fine.proxy(lam))))
    k = rec.length
    diff = rational_termwise_or(rec, k, coarse.terms(), interval) - rational_termwise_or(rec, k, fine.terms(), interval)
    assert a2_norm(diff, lam) <= improvement * a2_norm(b, lam) * (1 + 1e-8)


def test_termwise_pivot_error_names_term():
    lam = np.array([-1.0, 2.0, 3.0])
    rec = lanczos(DiagonalOperator(lam), np.array([1.0, 0.1, 0.1]), 3)
    terms = [PartialFractionTerm(0, 0, 1, 1, 0, 1), PartialFractionTerm(0, 0, 1, 0, 1, 0)]
    with pytest.raises(PivotError, match="partial-fraction term 1"):
        rational_termwise_or(rec, 1, terms, SpectrumInterval(0.5, 3.0))


@pytest.fixture(scope="module")
def chi2_recurrence():
    lam = chi2_spectrum()
    rec = lanczos(DiagonalOperator(lam), uniform_weight_vector(lam.shape[0]), 11, reorthogonalize=True)
    return lam, rec


def test_cdf_tails(chi2_recurrence):
    lam, rec = chi2_recurrence
    lo, hi = spectrum_cdf(rec, 10, [lam[0] - 1.0, lam[-1] + 1.0])
    assert abs(lo) <= 0.02 and abs(hi - 1.0) <= 0.02


def test_cdf_monotone_trend(chi2_recurrence):
    lam, rec = chi2_recurrence
    est = spectrum_cdf(rec, 10, np.linspace(lam[0], lam[-1], 100))
    assert np.all(np.isfinite(est))
    assert np.all(np.diff(est) >= -0.05)


def test_cdf_fa_piecewise_constant(chi2_recurrence):
    lam, rec = chi2_recurrence
    grid = np.linspace(lam[0], lam[-1], 100)
    fa = spectrum_cdf_fa(rec, 10, grid)
    assert len(np.unique(fa)) <= 11
    assert np.count_nonzero(np.diff(fa)) <= 10
    assert np.all(np.isfinite(spectrum_cdf_harmonic(rec, 10, grid)))


def test_cdf_fa_at_ritz_value_is_missing(chi2_recurrence):
    lam, rec = chi2_recurrence
    ritz = np.linalg.eigvalsh(rec.tridiagonal_dense(4))
    assert np.isnan(spectrum_cdf_fa(rec, 4, [ritz[1]])[0])
