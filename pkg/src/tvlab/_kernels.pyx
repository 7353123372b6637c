# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch evaluators for sparse polynomials.

Every routine walks points independently and multiplies factors in the same
order as the numpy fallback (variables left to right), so the two backends
agree to rounding.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef void _power_table(const double complex[:, :] pts, Py_ssize_t p,
                       Py_ssize_t emax, double complex[:, :] pw) noexcept nogil:
    cdef Py_ssize_t j, e
    cdef Py_ssize_t m = pts.shape[1]
    for j in range(m):
        pw[j, 0] = 1.0
        for e in range(1, emax + 1):
            pw[j, e] = pw[j, e - 1] * pts[p, j]


def monomial_matrix(points, exps):
    """Values of every monomial in ``exps`` (N, m) at ``points`` (n, m)."""
    cdef const double complex[:, :] pts = np.ascontiguousarray(points, dtype=np.complex128)
    cdef const cnp.int64_t[:, :] ex = np.ascontiguousarray(exps, dtype=np.int64)
    cdef Py_ssize_t n = pts.shape[0], m = pts.shape[1], N = ex.shape[0]
    cdef Py_ssize_t emax = int(np.max(exps)) if N else 0
    out = np.empty((n, N), dtype=np.complex128)
    cdef double complex[:, :] o = out
    cdef double complex[:, :] pw = np.empty((m, emax + 1), dtype=np.complex128)
    cdef Py_ssize_t p, a, j
    cdef double complex acc
    with nogil:
        for p in range(n):
            _power_table(pts, p, emax, pw)
            for a in range(N):
                acc = 1.0
                for j in range(m):
                    acc = acc * pw[j, ex[a, j]]
                o[p, a] = acc
    return out


def poly_eval(points, exps, coeffs):
    """Sum of ``coeffs[a] * z**exps[a]`` at each point; shape (n,)."""
    cdef const double complex[:, :] pts = np.ascontiguousarray(points, dtype=np.complex128)
    cdef const cnp.int64_t[:, :] ex = np.ascontiguousarray(exps, dtype=np.int64)
    cdef const double complex[:] cf = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef Py_ssize_t n = pts.shape[0], m = pts.shape[1], N = ex.shape[0]
    cdef Py_ssize_t emax = int(np.max(exps)) if N else 0
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[:] o = out
    cdef double complex[:, :] pw = np.empty((m, emax + 1), dtype=np.complex128)
    cdef Py_ssize_t p, a, j
    cdef double complex acc, tot
    with nogil:
        for p in range(n):
            _power_table(pts, p, emax, pw)
            tot = 0.0
            for a in range(N):
                acc = cf[a]
                for j in range(m):
                    acc = acc * pw[j, ex[a, j]]
                tot = tot + acc
            o[p] = tot
    return out


def poly_grad(points, exps, coeffs):
    """Holomorphic gradient of one polynomial at each point; shape (n, m)."""
    cdef const double complex[:, :] pts = np.ascontiguousarray(points, dtype=np.complex128)
    cdef const cnp.int64_t[:, :] ex = np.ascontiguousarray(exps, dtype=np.int64)
    cdef const double complex[:] cf = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef Py_ssize_t n = pts.shape[0], m = pts.shape[1], N = ex.shape[0]
    cdef Py_ssize_t emax = int(np.max(exps)) if N else 0
    out = np.zeros((n, m), dtype=np.complex128)
    cdef double complex[:, :] o = out
    cdef double complex[:, :] pw = np.empty((m, emax + 1), dtype=np.complex128)
    cdef Py_ssize_t p, a, j, l
    cdef double complex acc
    with nogil:
        for p in range(n):
            _power_table(pts, p, emax, pw)
            for l in range(m):
                for a in range(N):
                    if ex[a, l] == 0:
                        continue
                    acc = cf[a] * ex[a, l]
                    for j in range(m):
                        if j == l:
                            acc = acc * pw[j, ex[a, j] - 1]
                        else:
                            acc = acc * pw[j, ex[a, j]]
                    o[p, l] = o[p, l] + acc
    return out
