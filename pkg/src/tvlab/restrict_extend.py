"""Restriction to the variety, its kernel, the minimal-norm extension, dilations and jets.

``R`` sends ambient coordinates to an orthonormal coordinate system of the
sampled variety space: if ``V`` holds ``sqrt(w_j / W) e_a(z_j)`` and
``V = U Sigma W^H`` then ``R = Sigma_r W_r^H``, so ``|R f|`` is the quadrature
norm of ``f`` on the variety.  The extension is the Moore-Penrose right
inverse ``E = W_r Sigma_r^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from tvlab.ball_space import OperatorMatrix, TruncatedSpace
from tvlab.linalg import RANK_TOL, ConditioningError, RankDecision, decide_rank, warn_if_ambiguous
from tvlab.modules import TruncatedModule
from tvlab.polyring import Polynomial
from tvlab.variety import SamplingError, VarietySample

KERNEL_TOL = 1e-6


class SamplingResolutionError(SamplingError):
    """Too few quadrature points to resolve the restricted span."""


@dataclass(eq=False)
class RestrictionMatrix:
    R: OperatorMatrix
    singular_values: np.ndarray  # all singular values of the weighted evaluation matrix
    right_vectors: np.ndarray  # (dim, dim) columns = right singular vectors
    decision: RankDecision
    space: TruncatedSpace
    meta: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.decision.rank

    @property
    def norm(self) -> float:
        return float(self.singular_values[0])


@dataclass(eq=False)
class ExtensionMatrix:
    E: OperatorMatrix
    condition: float

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.E.matrix, 2))


def restriction_matrix(space: TruncatedSpace, samples: VarietySample, tol: float = RANK_TOL) -> RestrictionMatrix:
    """Restriction of the truncated ambient space to the sampled variety."""
    V = samples.weighted_evaluation(space)
    n_pts, dim = V.shape
    _, sv, Wh = scipy.linalg.svd(V, full_matrices=n_pts < dim, lapack_driver="gesdd")
    full_sv = np.zeros(dim)
    full_sv[: sv.size] = sv
    dec = decide_rank(full_sv, tol)
    if dec.rank >= n_pts:
        raise SamplingResolutionError(f"{n_pts} points cannot resolve a restricted span of rank >= {dec.rank}")
    W = Wh.conj().T
    r = dec.rank
    R = full_sv[:r, None] * W[:, :r].conj().T
    meta = dict(samples.meta)
    meta["n_points"] = n_pts
    return RestrictionMatrix(OperatorMatrix(R, f"P<={space.d}", "L2(Omega)"), full_sv, W, dec, space, meta)


def kernel_of_R(Rm: RestrictionMatrix, tol: float = KERNEL_TOL) -> TruncatedModule:
    """Orthonormal basis of ``{f : |R f| <= tol |R| |f|}``."""
    dec = decide_rank(Rm.singular_values, tol)
    warns = warn_if_ambiguous(dec, "kernel of R")
    frame = Rm.right_vectors[:, dec.rank :]
    return TruncatedModule(Rm.space, frame, "kernel", None, None, "filtered", warns, {"kernel": dec})


def extension_pinv(Rm: RestrictionMatrix, max_condition: float = 1e12) -> ExtensionMatrix:
    """Minimal-norm right inverse of ``R`` on its numerical range."""
    r = Rm.rank
    if r == 0:
        raise ConditioningError("R vanishes identically")
    sv = Rm.singular_values[:r]
    cond = float(sv[0] / sv[-1])
    if cond > max_condition:
        raise ConditioningError(f"R R* has condition {cond**2:.3e}")
    E = Rm.right_vectors[:, :r] / sv[None, :]
    return ExtensionMatrix(OperatorMatrix(E, "L2(Omega)", Rm.R.domain), cond)


def extension_defects(Rm: RestrictionMatrix, Em: ExtensionMatrix) -> dict:
    R, E = Rm.R.matrix, Em.E.matrix
    RE = R @ E
    P = E @ R
    return {
        "RE_minus_I": float(np.linalg.norm(RE - np.eye(RE.shape[0]), 2)),
        "ER_hermitian": float(np.linalg.norm(P - P.conj().T, 2)),
        "ER_idempotent": float(np.linalg.norm(P @ P - P, 2)),
        "E_norm": Em.norm,
        "R_norm": Rm.norm,
    }


def variety_module(Rm: RestrictionMatrix, Em: ExtensionMatrix, quotient: TruncatedModule):
    """The sampled variety space as a module, seen from the quotient.

    Returns ``(X, cod_actions, cod_degrees)`` where ``X`` is the restriction
    from quotient coordinates to orthonormal variety coordinates obtained by
    Gram-Schmidt in degree order, and ``cod_actions[i]`` is ``R T_i E`` in
    those coordinates.
    """
    R, E = Rm.R.matrix, Em.E.matrix
    order = np.argsort(quotient.col_degrees, kind="stable")
    XR = R @ quotient.frame[:, order]
    Qc, Rc = np.linalg.qr(XR)
    X = np.zeros((Qc.shape[1], quotient.dim), dtype=complex)
    X[:, order] = Rc
    cod_deg = quotient.col_degrees[order][: Qc.shape[1]]
    acts = tuple(Qc.conj().T @ (R @ (T @ (E @ Qc))) for T in Rm.space.shifts)
    return X, acts, cod_deg


def dilation(coords, r: float, space: TruncatedSpace) -> np.ndarray:
    """Coordinates of ``f(r z)``: ``c_a -> c_a r^{|a|}``."""
    if not 0 < r < 1:
        raise ValueError("dilation radius must lie in (0, 1)")
    return np.asarray(coords) * r ** space.degrees


def dilation_gap_closed_form(coords, r: float, space: TruncatedSpace) -> float:
    """``|f - f_r|`` from ``sum |c_a|^2 (1 - r^{|a|})^2`` (orthonormal coordinates)."""
    c = np.asarray(coords)
    return float(np.sqrt(np.sum(np.abs(c) ** 2 * (1 - r ** space.degrees) ** 2)))


def jet_restriction(f: Polynomial, var: int = 0, order: int = 2) -> tuple[Polynomial, ...]:
    """``(f, d f/d z_v, ..., d^{order-1} f / d z_v^{order-1})`` restricted to ``z_v = 0``.

    ``var`` is zero-based; results stay in the ambient ring and do not involve
    ``z_v``.  Default: ``(f|_{z_1=0}, df/dz_1|_{z_1=0})``.
    """
    out = []
    g = f
    for _ in range(order):
        out.append(g.substitute_zero(var))
        g = g.derivative(var)
    return tuple(out)


def jet_matrix(space: TruncatedSpace, var: int = 0, order: int = 2) -> np.ndarray:
    """Linear map from ambient coordinates to the stacked monomial coefficients of the jets."""
    cols = []
    target: dict = {}
    for a in space.basis:
        jets = jet_restriction(Polynomial.monomial(a), var, order)
        col = {}
        for q, jp in enumerate(jets):
            for mono, c in jp.terms.items():
                key = (q, mono)
                target.setdefault(key, len(target))
                col[target[key]] = c
        cols.append(col)
    A = np.zeros((max(len(target), 1), space.dim), dtype=complex)
    for j, col in enumerate(cols):
        for row, c in col.items():
            A[row, j] = c / space.norms[j]
    return A


def jet_kernel(space: TruncatedSpace, var: int = 0, order: int = 2, tol: float = KERNEL_TOL) -> TruncatedModule:
    A = jet_matrix(space, var, order)
    _, sv, Wh = scipy.linalg.svd(A, full_matrices=True)
    full_sv = np.zeros(space.dim)
    full_sv[: sv.size] = sv
    dec = decide_rank(full_sv, tol)
    return TruncatedModule(space, Wh.conj().T[:, dec.rank :], "kernel", None, None, "filtered", [], {"kernel": dec})
