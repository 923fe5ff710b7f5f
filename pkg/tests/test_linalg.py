import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from krylov_or import (
    BandedSymmetricMatrix,
    DiagonalOperator,
    FunctionDomainError,
    MatrixOperator,
    SparseSymmetricOperator,
    apply_matrix_function_small,
    banded_to_dense,
    dense_sym_eigendecomposition,
    dot,
    read_eigenvalues,
    tridiag_eigendecomposition,
)
from krylov_or.linalg import symmetry_defect


@pytest.mark.parametrize("u, v, expected", [((1, 0), (0, 1), 0.0), ((1, 1), (1, 1), 2.0), ((3, 4), (3, 4), 25.0)])
def test_dot(u, v, expected):
    assert dot(u, v) == expected


def test_dot_dimension_mismatch():
    with pytest.raises(ValueError):
        dot([1.0, 2.0], [1.0])


@pytest.mark.parametrize(
    "alphas, betas, expected",
    [
        ([2.0], [], [2.0]),
        ([0.0, 0.0], [1.0], [-1.0, 1.0]),
        ([1.0, 3.0], [1.0], [2.0 - np.sqrt(2.0), 2.0 + np.sqrt(2.0)]),
    ],
)
def test_tridiag_eigen_examples(backend, alphas, betas, expected):
    w, V = tridiag_eigendecomposition(alphas, betas)
    np.testing.assert_allclose(w, expected, atol=1e-14)
    np.testing.assert_allclose(V.T @ V, np.eye(len(w)), atol=1e-14)


def test_tridiag_one_by_one_vector(backend):
    w, V = tridiag_eigendecomposition([2.0], [])
    assert w.tolist() == [2.0] and abs(V[0, 0]) == 1.0


def test_tridiag_bad_lengths():
    with pytest.raises(ValueError):
        tridiag_eigendecomposition([1.0, 2.0], [1.0, 1.0])


@pytest.mark.parametrize("k", [1, 5, 30, 120])
def test_tridiag_eigen_against_lapack(backend, rng, k):
    a, b = rng.standard_normal(k), rng.standard_normal(k - 1)
    T = np.diag(a) + np.diag(b, 1) + np.diag(b, -1)
    w, V = tridiag_eigendecomposition(a, b)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(T), atol=1e-12 * max(1.0, np.abs(w).max()))
    assert np.all(np.diff(w) >= 0)
    assert np.abs(T @ V - V * w).max() <= 1e-12 * np.linalg.norm(T, 2) * 10
    assert np.abs(V.T @ V - np.eye(k)).max() <= 1e-12 * 10


def test_tridiag_graded_and_zero_offdiagonals(backend):
    a = np.array([1e8, 1.0, 1e-8, 3.0])
    b = np.array([0.0, 1e-3, 0.0])
    w, _ = tridiag_eigendecomposition(a, b)
    T = np.diag(a) + np.diag(b, 1) + np.diag(b, -1)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(T), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize(
    "M, expected",
    [(np.eye(3), [1.0, 1.0, 1.0]), (np.diag([5.0, 2.0]), [2.0, 5.0]), (np.array([[0.0, 1.0], [1.0, 0.0]]), [-1.0, 1.0])],
)
def test_dense_eigen_examples(backend, M, expected):
    w, _ = dense_sym_eigendecomposition(M)
    np.testing.assert_allclose(w, expected, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 50), seed=st.integers(0, 2**31 - 1))
def test_dense_eigen_round_trip(n, seed):
    r = np.random.default_rng(seed)
    G = r.standard_normal((n, n))
    M = G + G.T
    w, V = dense_sym_eigendecomposition(M)
    scale = np.linalg.norm(M, 2)
    assert np.abs(M @ V - V * w).max() <= 1e-10 * scale
    assert np.abs(M - (V * w) @ V.T).max() <= 1e-10 * scale


def test_dense_eigen_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        dense_sym_eigendecomposition(np.array([[1.0, 2.0], [0.0, 1.0]]))


@pytest.mark.parametrize(
    "M, f, v, expected",
    [
        (np.diag([4.0, 9.0]), np.sqrt, [1.0, 1.0], [2.0, 3.0]),
        (np.eye(3), np.exp, [1.0, -2.0, 0.5], np.e * np.array([1.0, -2.0, 0.5])),
        (np.array([[2.0, 1.0], [1.0, 2.0]]), lambda x: 1.0 / x, [1.0, 0.0], [2.0 / 3.0, -1.0 / 3.0]),
    ],
)
def test_apply_matrix_function_examples(backend, M, f, v, expected):
    np.testing.assert_allclose(apply_matrix_function_small(M, f, v), expected, rtol=1e-13, atol=1e-15)


def test_apply_matrix_function_identity(rng):
    G = rng.standard_normal((12, 12))
    M = G + G.T
    v = rng.standard_normal(12)
    out = apply_matrix_function_small(M, lambda x: x, v)
    assert np.linalg.norm(out - M @ v) <= 1e-12 * np.linalg.norm(M @ v)


def test_apply_matrix_function_undefined():
    with pytest.raises(FunctionDomainError):
        apply_matrix_function_small(np.array([[1.0, 1.0], [1.0, 1.0]]), lambda x: 1.0 / x, [1.0, 0.0])


@pytest.mark.parametrize(
    "bands, expected",
    [
        ([[1.0, 2.0]], np.diag([1.0, 2.0])),
        ([[1.0, 1.0], [2.0, 0.0]], [[1.0, 2.0], [2.0, 1.0]]),
        ([[1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0]], np.ones((3, 3))),
    ],
)
def test_banded_to_dense(bands, expected):
    np.testing.assert_array_equal(banded_to_dense(BandedSymmetricMatrix(np.array(bands))), expected)


def test_banded_padding_is_zeroed_and_read_only():
    B = BandedSymmetricMatrix(np.ones((3, 3)))
    assert B.bands[1, 2] == 0.0 and B.bands[2, 1] == 0.0
    with pytest.raises(ValueError):
        B.bands[0, 0] = 5.0


def test_banded_entries_outside_band_are_zero(rng):
    M = rng.standard_normal((6, 6))
    M = M + M.T
    B = BandedSymmetricMatrix.from_dense(M, 2)
    D = B.to_dense()
    for i in range(6):
        for j in range(6):
            assert D[i, j] == (M[i, j] if abs(i - j) <= 2 else 0.0) == B.entry(i, j)
    v = rng.standard_normal(6)
    np.testing.assert_allclose(B.matvec(v), D @ v, rtol=1e-14)


def test_diagonal_operator(rng):
    lam = np.array([1.0, -2.0, 3.0])
    A = DiagonalOperator(lam)
    v = rng.standard_normal(3)
    np.testing.assert_array_equal(A @ v, lam * v)
    np.testing.assert_array_equal(A.function_apply(np.exp, v), np.exp(lam) * v)
    with pytest.raises(FunctionDomainError):
        DiagonalOperator([0.0, 1.0]).function_apply(lambda x: 1.0 / x, [1.0, 1.0])


def test_operator_validation():
    with pytest.raises(ValueError):
        MatrixOperator(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        DiagonalOperator([1.0, np.nan])
    with pytest.raises(ValueError):
        DiagonalOperator(np.ones(3)) @ np.ones(2)


def _random_lower_triplets(r, n, density=0.2):
    rows, cols, vals = [], [], []
    for i in range(n):
        for j in range(i + 1):
            if i == j or r.random() < density:
                rows.append(i)
                cols.append(j)
                vals.append(r.standard_normal())
    return np.array(rows), np.array(cols), np.array(vals)


@pytest.mark.parametrize("n", [1, 7, 50])
def test_sparse_operator_matches_dense(rng, n):
    rows, cols, vals = _random_lower_triplets(rng, n)
    S = SparseSymmetricOperator(n, rows, cols, vals)
    D = np.zeros((n, n))
    for i, j, v in zip(rows, cols, vals):
        D[i, j] += v
        if i != j:
            D[j, i] += v
    v = rng.standard_normal(n)
    np.testing.assert_allclose(S @ v, D @ v, rtol=1e-13, atol=1e-13)
    assert symmetry_defect(S, rng=rng) <= 1e-12


def test_sparse_operator_rejects_upper_entries():
    with pytest.raises(ValueError):
        SparseSymmetricOperator(2, [0], [1], [1.0])


def test_symmetry_probe_on_operators(rng):
    G = rng.standard_normal((20, 20))
    for A in (MatrixOperator(G + G.T), DiagonalOperator(rng.standard_normal(20)), MatrixOperator(sp.csr_matrix(G + G.T))):
        assert symmetry_defect(A, rng=rng) <= 1e-12


def test_matrix_market_round_trip(tmp_path, rng):
    n = 9
    rows, cols, vals = _random_lower_triplets(rng, n, 0.3)
    path = tmp_path / "a.mtx"
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real symmetric\n% comment\n")
        fh.write(f"{n} {n} {len(vals)}\n")
        for i, j, v in zip(rows, cols, vals):
            fh.write(f"{i + 1} {j + 1} {float(v)!r}\n")
    A = SparseSymmetricOperator.from_matrix_market(path)
    B = SparseSymmetricOperator(n, rows, cols, vals)
    v = rng.standard_normal(n)
    np.testing.assert_allclose(A @ v, B @ v, rtol=1e-14)


def test_matrix_market_rejects_general(tmp_path):
    path = tmp_path / "g.mtx"
    path.write_text("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 1.0\n")
    with pytest.raises(ValueError):
        SparseSymmetricOperator.from_matrix_market(path)


def test_read_eigenvalues(tmp_path):
    path = tmp_path / "eigs.txt"
    path.write_text("# spectrum\n3.0\n-1.5  # inline\n\n2\n")
    np.testing.assert_array_equal(read_eigenvalues(path), [-1.5, 2.0, 3.0])
    path.write_text("1.0\nnope\n")
    with pytest.raises(ValueError):
        read_eigenvalues(path)
