"""Vectors, symmetric operators, banded storage and small eigensolvers."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

from . import _kernels
from .errors import FunctionDomainError

__all__ = [
    "dot",
    "as_vector",
    "SymmetricLinearOperator",
    "MatrixOperator",
    "DiagonalOperator",
    "SparseSymmetricOperator",
    "aslinearoperator",
    "symmetry_defect",
    "BandedSymmetricMatrix",
    "banded_to_dense",
    "tridiag_eigendecomposition",
    "dense_sym_eigendecomposition",
    "apply_matrix_function_small",
    "read_eigenvalues",
]

# Eigenvalues of magnitude below this fraction of the spectral radius are
# treated as exact zeros when a scalar function is applied.
ZERO_EIGENVALUE_RTOL = 1e-13


def as_vector(v, name="vector"):
    """Return ``v`` as a finite, non-empty 1-d float array."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty 1-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def dot(u, v):
    """Euclidean inner product of two equal-length vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(np.dot(u, v))


class SymmetricLinearOperator:
    """A symmetric linear map given only through its action on vectors.

    Parameters
    ----------
    dimension : int
        Size ``n`` of the (square) operator.
    apply : callable
        Maps a length-``n`` array to a new length-``n`` array.
    norm_estimate : float, optional
        Upper estimate of the spectral norm, if known.
    """

    def __init__(self, dimension, apply, norm_estimate=None):
        if int(dimension) <= 0:
            raise ValueError("dimension must be positive")
        self._dimension = int(dimension)
        self._apply = apply
        self._norm = norm_estimate

    @property
    def dimension(self):
        return self._dimension

    @property
    def shape(self):
        return (self._dimension, self._dimension)

    @property
    def norm_estimate(self):
        return self._norm

    def apply(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self._dimension,):
            raise ValueError(f"expected a vector of length {self._dimension}, got {v.shape}")
        return np.asarray(self._apply(v), dtype=float)

    __call__ = apply

    def __matmul__(self, v):
        return self.apply(v)

    def shifted(self, z):
        """The operator ``A - z I``."""
        return SymmetricLinearOperator(self._dimension, lambda v: self._apply(v) - z * v)


class MatrixOperator(SymmetricLinearOperator):
    """Symmetric operator backed by an explicit dense or sparse matrix."""

    def __init__(self, matrix):
        if scipy.sparse.issparse(matrix):
            mat = scipy.sparse.csr_matrix(matrix, dtype=float)
            norm = float(abs(mat).sum(axis=1).max())
        else:
            mat = np.asarray(matrix, dtype=float)
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
                raise ValueError("matrix must be square")
            if not np.allclose(mat, mat.T, rtol=1e-12, atol=1e-14 * np.abs(mat).max()):
                raise ValueError("matrix is not symmetric")
            norm = float(np.abs(mat).sum(axis=1).max())
        self.matrix = mat
        super().__init__(mat.shape[0], mat.dot, norm_estimate=norm)


class DiagonalOperator(SymmetricLinearOperator):
    """``diag(eigenvalues)``; exact matrix functions are available."""

    def __init__(self, eigenvalues):
        lam = as_vector(eigenvalues, "eigenvalues")
        self.eigenvalues = lam
        super().__init__(lam.shape[0], lambda v: lam * v, norm_estimate=float(np.abs(lam).max()))

    def function_apply(self, f, b):
        """Exact ``f(A) b`` computed entrywise."""
        b = np.asarray(b, dtype=float)
        with np.errstate(all="ignore"):
            fl = np.asarray(f(self.eigenvalues), dtype=float)
        fl = np.broadcast_to(fl, self.eigenvalues.shape)
        if not np.all(np.isfinite(fl)):
            bad = self.eigenvalues[~np.isfinite(fl)][0]
            raise FunctionDomainError(f"function undefined at eigenvalue {bad!r}")
        return fl * b


class SparseSymmetricOperator(MatrixOperator):
    """Sparse symmetric operator built from lower-triangle coordinate triplets.

    Off-diagonal triplets are mirrored into the upper triangle; duplicate
    entries are summed as in the MatrixMarket convention.
    """

    def __init__(self, dimension, rows, cols, values):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=float)
        if np.any(rows < cols):
            raise ValueError("triplets must lie in the lower triangle (row >= col)")
        if rows.size and (rows.max() >= dimension or cols.min() < 0):
            raise ValueError("triplet index out of range")
        off = rows != cols
        r = np.concatenate([rows, cols[off]])
        c = np.concatenate([cols, rows[off]])
        v = np.concatenate([values, values[off]])
        self.triplets = (rows, cols, values)
        super().__init__(scipy.sparse.coo_matrix((v, (r, c)), shape=(dimension, dimension)))

    @classmethod
    def from_matrix_market(cls, path):
        """Read a ``matrix coordinate real symmetric`` MatrixMarket file."""
        path = Path(path)
        with open(path) as fh:
            header = fh.readline().strip().lower().split()
        if header[:2] != ["%%matrixmarket", "matrix"] or header[2:5] != ["coordinate", "real", "symmetric"]:
            raise ValueError(
                f"{path}: expected '%%MatrixMarket matrix coordinate real symmetric' header"
            )
        coo = scipy.sparse.coo_matrix(scipy.io.mmread(str(path)))
        lower = coo.row >= coo.col
        return cls(coo.shape[0], coo.row[lower], coo.col[lower], coo.data[lower])


def aslinearoperator(A):
    """Coerce arrays, sparse matrices and callables-with-dimension to an operator."""
    if isinstance(A, SymmetricLinearOperator):
        return A
    if scipy.sparse.issparse(A) or isinstance(A, np.ndarray):
        return MatrixOperator(A)
    raise TypeError(f"cannot interpret {type(A).__name__} as a symmetric linear operator")


def symmetry_defect(A, trials=20, rng=None):
    """Largest ``|<Av, w> - <v, Aw>| / (||Av|| ||w||)`` over random pairs."""
    A = aslinearoperator(A)
    rng = np.random.default_rng(rng)
    worst = 0.0
    for _ in range(trials):
        v = rng.standard_normal(A.dimension)
        w = rng.standard_normal(A.dimension)
        Av = A.apply(v)
        scale = np.linalg.norm(Av) * np.linalg.norm(w)
        if scale == 0.0:
            continue
        worst = max(worst, abs(np.dot(Av, w) - np.dot(v, A.apply(w))) / scale)
    return worst


@dataclass(frozen=True)
class BandedSymmetricMatrix:
    """Symmetric matrix of half-bandwidth ``q`` stored diagonal-major.

    ``bands[d, j]`` is the entry ``(j + d, j)``; entries with ``j + d >= k``
    are padding and kept at zero.
    """

    bands: np.ndarray

    def __post_init__(self):
        bands = np.array(self.bands, dtype=float, ndmin=2)
        if bands.ndim != 2:
            raise ValueError("bands must be a 2-d array")
        k = bands.shape[1]
        for dd in range(1, bands.shape[0]):
            bands[dd, max(k - dd, 0):] = 0.0
        bands.setflags(write=False)
        object.__setattr__(self, "bands", bands)

    @property
    def order(self):
        return self.bands.shape[1]

    @property
    def half_bandwidth(self):
        return self.bands.shape[0] - 1

    def entry(self, i, j):
        if i < j:
            i, j = j, i
        if i - j > self.half_bandwidth:
            return 0.0
        return float(self.bands[i - j, j])

    def column(self, j):
        """Entries ``(j, j), (j + 1, j), ..., (j + q, j)``."""
        return self.bands[:, j].copy()

    def to_dense(self):
        k = self.order
        out = np.zeros((k, k))
        for dd in range(self.half_bandwidth + 1):
            if dd >= k:
                break
            diag = self.bands[dd, : k - dd]
            out[np.arange(dd, k), np.arange(k - dd)] = diag
            out[np.arange(k - dd), np.arange(dd, k)] = diag
        return out

    @classmethod
    def from_dense(cls, matrix, q):
        matrix = np.asarray(matrix, dtype=float)
        k = matrix.shape[0]
        bands = np.zeros((q + 1, k))
        for dd in range(min(q, k - 1) + 1):
            bands[dd, : k - dd] = np.diagonal(matrix, -dd)
        return cls(bands)

    @classmethod
    def tridiagonal(cls, alphas, betas):
        alphas = np.asarray(alphas, dtype=float)
        k = alphas.shape[0]
        bands = np.zeros((2, k))
        bands[0] = alphas
        bands[1, : k - 1] = np.asarray(betas, dtype=float)[: k - 1]
        return cls(bands)

    def matvec(self, v):
        v = np.asarray(v, dtype=float)
        out = self.bands[0] * v
        k = self.order
        for dd in range(1, self.half_bandwidth + 1):
            if dd >= k:
                break
            diag = self.bands[dd, : k - dd]
            out[dd:] += diag * v[: k - dd]
            out[: k - dd] += diag * v[dd:]
        return out


def banded_to_dense(B):
    """Dense form of a :class:`BandedSymmetricMatrix`."""
    return B.to_dense()


def tridiag_eigendecomposition(alphas, betas):
    """Eigen-decomposition of the symmetric tridiagonal ``tridiag(betas, alphas, betas)``.

    Uses implicit-shift QL with a Wilkinson-type shift. Returns ascending
    eigenvalues and a matrix whose columns are orthonormal eigenvectors.
    """
    alphas = np.asarray(alphas, dtype=float)
    betas = np.asarray(betas, dtype=float)
    if alphas.ndim != 1 or alphas.shape[0] == 0:
        raise ValueError("alphas must be a non-empty 1-d array")
    if betas.shape != (alphas.shape[0] - 1,):
        raise ValueError(
            f"betas must have length len(alphas) - 1 = {alphas.shape[0] - 1}, got {betas.shape}"
        )
    return _kernels.tridiag_eigh(alphas, betas)


def dense_sym_eigendecomposition(M):
    """Eigen-decomposition of a small dense symmetric matrix by cyclic Jacobi."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    scale = np.abs(M).max() if M.size else 0.0
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-12 * max(scale, 1e-300)):
        raise ValueError("matrix is not symmetric")
    return _kernels.jacobi_eigh(0.5 * (M + M.T))


def _apply_function_to_eigenpairs(w, V, f, v):
    radius = np.abs(w).max() if w.size else 0.0
    w = np.where(np.abs(w) <= ZERO_EIGENVALUE_RTOL * radius, 0.0, w)
    with np.errstate(all="ignore"):
        fw = np.broadcast_to(np.asarray(f(w), dtype=float), w.shape)
    if not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)][0]
        raise FunctionDomainError(f"function undefined at eigenvalue {bad!r}")
    return V @ (fw * (V.T @ v))


def apply_matrix_function_small(M, f, v):
    """``f(M) v = V f(Lambda) V^T v`` for a small symmetric ``M``.

    ``f`` must be vectorized over NumPy arrays. Eigenvalues smaller than
    ``1e-13`` times the spectral radius are treated as exact zeros, so a
    numerically singular ``M`` is reported through ``FunctionDomainError``
    for functions such as ``1/x`` or ``x/|x|``.
    """
    if isinstance(M, BandedSymmetricMatrix):
        M = M.to_dense()
    w, V = dense_sym_eigendecomposition(M)
    return _apply_function_to_eigenpairs(w, V, f, np.asarray(v, dtype=float))


def read_eigenvalues(path):
    """Read eigenvalues from a text file, one value per line (``#`` comments allowed)."""
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from None
    if not values:
        raise ValueError(f"{path}: no eigenvalues found")
    return np.sort(np.array(values))
