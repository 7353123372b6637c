"""Pure-numpy fallback for the compiled polynomial evaluators."""

import numpy as np


def _power_table(points, emax):
    n, m = points.shape
    pw = np.empty((n, m, emax + 1), dtype=np.complex128)
    pw[:, :, 0] = 1.0
    for e in range(1, emax + 1):
        pw[:, :, e] = pw[:, :, e - 1] * points
    return pw


def monomial_matrix(points, exps):
    points = np.ascontiguousarray(points, dtype=np.complex128)
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    n, m = points.shape
    if exps.shape[0] == 0:
        return np.empty((n, 0), dtype=np.complex128)
    pw = _power_table(points, int(exps.max()))
    out = np.ones((n, exps.shape[0]), dtype=np.complex128)
    for j in range(m):
        out = out * pw[:, j, exps[:, j]]
    return out


def poly_eval(points, exps, coeffs):
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    vals = monomial_matrix(points, exps) * coeffs
    # left-to-right accumulation, matching the compiled loop
    out = np.zeros(vals.shape[0], dtype=np.complex128)
    for a in range(vals.shape[1]):
        out = out + vals[:, a]
    return out


def poly_grad(points, exps, coeffs):
    points = np.ascontiguousarray(points, dtype=np.complex128)
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    n, m = points.shape
    out = np.zeros((n, m), dtype=np.complex128)
    if exps.shape[0] == 0:
        return out
    pw = _power_table(points, int(exps.max()))
    for l in range(m):
        active = np.nonzero(exps[:, l])[0]
        for a in active:
            acc = np.full(n, coeffs[a] * exps[a, l], dtype=np.complex128)
            for j in range(m):
                e = exps[a, j] - 1 if j == l else exps[a, j]
                acc = acc * pw[:, j, e]
            out[:, l] = out[:, l] + acc
    return out
