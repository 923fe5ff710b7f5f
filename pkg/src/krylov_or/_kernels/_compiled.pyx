# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: tridiagonal QL, cyclic Jacobi and banded LDL."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, hypot, copysign

from ..errors import ConvergenceError, PivotError

cnp.import_array()

cdef double EPS = np.finfo(float).eps


def tridiag_eigh(alphas, betas, int max_iter_factor=30):
    cdef cnp.ndarray[double, ndim=1] d_arr = np.array(alphas, dtype=float)
    cdef Py_ssize_t n = d_arr.shape[0]
    cdef cnp.ndarray[double, ndim=1] e_arr = np.zeros(n)
    if n > 1:
        e_arr[: n - 1] = betas
    cdef cnp.ndarray[double, ndim=2] z_arr = np.eye(n)
    cdef double[::1] d = d_arr
    cdef double[::1] e = e_arr
    cdef double[:, ::1] z = z_arr
    cdef Py_ssize_t l, m, i, row
    cdef long it, cap = max_iter_factor * n
    cdef double dd, g, r, s, c, p, f, b, zi, zi1
    cdef bint deflated
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(e[m]) <= EPS * dd:
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
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
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
                for row in range(n):
                    zi = z[row, i]
                    zi1 = z[row, i + 1]
                    z[row, i] = c * zi - s * zi1
                    z[row, i + 1] = s * zi + c * zi1
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    order = np.argsort(d_arr, kind="stable")
    return d_arr[order], z_arr[:, order]


def jacobi_eigh(matrix, double rel_tol=1e-14, int max_sweeps=100):
    cdef cnp.ndarray[double, ndim=2] a_arr = np.array(matrix, dtype=float, order="C")
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef cnp.ndarray[double, ndim=2] v_arr = np.eye(n)
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, r
    cdef int sweep
    cdef double fro = 0.0, off, target, apq, theta, t, c, s, app, aqq, gp, gq
    for p in range(n):
        for q in range(n):
            fro += a[p, q] * a[p, q]
    fro = sqrt(fro)
    target = rel_tol * fro
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += a[p, q] * a[p, q]
        off = sqrt(off)
        if off <= target:
            diag = np.diag(a_arr)
            idx = np.argsort(diag, kind="stable")
            return diag[idx].copy(), v_arr[:, idx]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = copysign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                app = a[p, p] - t * apq
                aqq = a[q, q] + t * apq
                for r in range(n):
                    gp = a[r, p]
                    gq = a[r, q]
                    a[r, p] = c * gp - s * gq
                    a[r, q] = s * gp + c * gq
                for r in range(n):
                    a[p, r] = a[r, p]
                    a[q, r] = a[r, q]
                a[p, p] = app
                a[q, q] = aqq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(n):
                    gp = v[r, p]
                    gq = v[r, q]
                    v[r, p] = c * gp - s * gq
                    v[r, q] = s * gp + c * gq
    raise ConvergenceError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


cdef int _ldl_column(double[:, ::1] Lb, double[::1] d, const double[::1] ncol,
                     Py_ssize_t j, Py_ssize_t k, double pivot_floor,
                     bint definite) except -1:
    cdef Py_ssize_t q = Lb.shape[0]
    cdef Py_ssize_t i, l, lo
    cdef double dj = ncol[0], ljl, s
    lo = j - q if j > q else 0
    for l in range(lo, j):
        ljl = Lb[j - l - 1, l]
        dj -= ljl * ljl * d[l]
    if definite:
        if not dj > pivot_floor:
            raise PivotError(
                f"nonpositive pivot {dj:.3e} at index {j} (matrix not positive definite)",
                index=j,
            )
    elif not fabs(dj) > pivot_floor:
        raise PivotError(f"zero pivot {dj:.3e} at index {j} (matrix singular)", index=j)
    d[j] = dj
    for i in range(j + 1, min(j + q, k - 1) + 1):
        s = ncol[i - j]
        lo = i - q if i > q else 0
        for l in range(lo, j):
            s -= Lb[i - l - 1, l] * Lb[j - l - 1, l] * d[l]
        Lb[i - j - 1, j] = s / dj
    return 0


def ldl_column(Lb, d, ncol, Py_ssize_t j, Py_ssize_t k, double pivot_floor, bint definite):
    cdef const double[::1] col = np.ascontiguousarray(ncol, dtype=float)
    _ldl_column(Lb, d, col, j, k, pivot_floor, definite)


def banded_ldl(bands, bint definite=True, double rel_tol=1e-14, double scale=0.0):
    b_arr = np.ascontiguousarray(bands, dtype=float)
    cdef Py_ssize_t q = b_arr.shape[0] - 1
    cdef Py_ssize_t k = b_arr.shape[1]
    cdef cnp.ndarray[double, ndim=2] Lb_arr = np.zeros((q, k))
    cdef cnp.ndarray[double, ndim=1] d_arr = np.zeros(k)
    cdef const double[:, ::1] bv = b_arr
    cdef double[::1] col = np.zeros(q + 1)
    cdef Py_ssize_t j, m
    cdef double running = scale
    for j in range(k):
        for m in range(q + 1):
            col[m] = bv[m, j]
            if fabs(col[m]) > running:
                running = fabs(col[m])
        _ldl_column(Lb_arr, d_arr, col, j, k, rel_tol * running, definite)
    return Lb_arr, d_arr


def banded_ldl_solve(Lb_in, d_in, rhs):
    cdef const double[:, ::1] Lb = np.ascontiguousarray(Lb_in, dtype=float)
    cdef const double[::1] d = np.ascontiguousarray(d_in, dtype=float)
    cdef cnp.ndarray[double, ndim=1] x_arr = np.array(rhs, dtype=float)
    cdef double[::1] x = x_arr
    cdef Py_ssize_t q = Lb.shape[0]
    cdef Py_ssize_t k = d.shape[0]
    cdef Py_ssize_t i, l, m, lo
    cdef double s
    for i in range(k):
        s = x[i]
        lo = i - q if i > q else 0
        for l in range(lo, i):
            s -= Lb[i - l - 1, l] * x[l]
        x[i] = s
    for i in range(k):
        x[i] /= d[i]
    for i in range(k - 1, -1, -1):
        s = x[i]
        for m in range(i + 1, min(i + q, k - 1) + 1):
            s -= Lb[m - i - 1, i] * x[m]
        x[i] = s
    return x_arr
