"""Pure-Python/NumPy versions of the compiled kernels.

Same algorithms, signatures and error behaviour as ``_compiled.pyx``; used
when the extension is not built or ``KRYLOV_OR_PURE_PYTHON=1`` is set.
"""

import math

import numpy as np

from ..errors import ConvergenceError, PivotError

EPS = np.finfo(float).eps


def tridiag_eigh(alphas, betas, max_iter_factor=30):
    """Implicit-shift QL on a symmetric tridiagonal matrix.

    Returns ascending eigenvalues and the matrix whose columns are the
    corresponding orthonormal eigenvectors.
    """
    d = np.array(alphas, dtype=float)
    n = d.shape[0]
    e = np.zeros(n)
    e[: n - 1] = betas
    z = np.eye(n)
    cap = max_iter_factor * n
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > cap:
                raise ConvergenceError(
                    f"tridiagonal QL did not converge for eigenvalue {l} "
                    f"after {cap} iterations"
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = z[:, i].copy()
                zi1 = z[:, i + 1]
                z[:, i] = c * zi - s * zi1
                z[:, i + 1] = s * zi + c * zi1
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    order = np.argsort(d, kind="stable")
    return d[order], z[:, order]


def jacobi_eigh(matrix, rel_tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi eigensolver for a small dense symmetric matrix."""
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    fro = math.sqrt(float(np.sum(a * a)))
    target = rel_tol * fro
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum((a - np.diag(np.diag(a))) ** 2)))
        if off <= target:
            idx = np.argsort(np.diag(a), kind="stable")
            return np.diag(a)[idx].copy(), v[:, idx]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                app = a[p, p] - t * apq
                aqq = a[q, q] + t * apq
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp - s * colq
                a[:, q] = s * colp + c * colq
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app
                a[q, q] = aqq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    raise ConvergenceError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def ldl_column(Lb, d, ncol, j, k, pivot_floor, definite):
    """Consume column ``j`` of a banded matrix, filling ``d[j]`` and ``Lb[:, j]``.

    ``ncol[m]`` holds entry ``(j + m, j)``; ``Lb[m - 1, j]`` receives
    ``L[j + m, j]``. Rows at or beyond ``k`` are ignored.
    """
    q = Lb.shape[0]
    dj = ncol[0]
    for l in range(max(0, j - q), j):
        ljl = Lb[j - l - 1, l]
        dj -= ljl * ljl * d[l]
    if definite:
        if not dj > pivot_floor:
            raise PivotError(
                f"nonpositive pivot {dj:.3e} at index {j} (matrix not positive definite)",
                index=j,
            )
    elif not abs(dj) > pivot_floor:
        raise PivotError(f"zero pivot {dj:.3e} at index {j} (matrix singular)", index=j)
    d[j] = dj
    for i in range(j + 1, min(j + q, k - 1) + 1):
        s = ncol[i - j]
        for l in range(max(0, i - q), j):
            s -= Lb[i - l - 1, l] * Lb[j - l - 1, l] * d[l]
        Lb[i - j - 1, j] = s / dj


def banded_ldl(bands, definite=True, rel_tol=1e-14, scale=0.0):
    """LDL^T factorization of a banded symmetric matrix stored by diagonals.

    Pivots are compared with ``rel_tol`` times the larger of ``scale`` and the
    largest entry seen so far.
    """
    bands = np.asarray(bands, dtype=float)
    q = bands.shape[0] - 1
    k = bands.shape[1]
    Lb = np.zeros((q, k))
    d = np.zeros(k)
    running = float(scale)
    for j in range(k):
        col = bands[:, j]
        running = max(running, float(np.max(np.abs(col))))
        ldl_column(Lb, d, col, j, k, rel_tol * running, definite)
    return Lb, d


def banded_ldl_solve(Lb, d, rhs):
    """Solve ``L D L^T x = rhs`` with banded unit-lower ``L``."""
    q = Lb.shape[0]
    k = d.shape[0]
    x = np.array(rhs, dtype=float)
    for i in range(k):
        s = x[i]
        for l in range(max(0, i - q), i):
            s -= Lb[i - l - 1, l] * x[l]
        x[i] = s
    for i in range(k):
        x[i] /= d[i]
    for i in range(k - 1, -1, -1):
        s = x[i]
        for m in range(i + 1, min(i + q, k - 1) + 1):
            s -= Lb[m - i - 1, i] * x[m]
        x[i] = s
    return x
