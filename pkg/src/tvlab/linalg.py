"""Rank decisions, subspace comparison and decay fitting shared by the modules."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

RANK_TOL = 1e-10


class ConditioningError(RuntimeError):
    """A numerical rank could not be decided with the required spectral gap."""


class RankWarning(UserWarning):
    """Singular values fall close to the rank threshold."""


@dataclass(frozen=True)
class RankDecision:
    rank: int
    threshold: float
    gap: float  # sigma_r / sigma_{r+1}; inf when nothing is dropped or kept
    ambiguous: bool


def decide_rank(sv: np.ndarray, tol: float = RANK_TOL, *, scale: float | None = None) -> RankDecision:
    """Numerical rank of a descending singular-value list at ``tol`` relative to ``scale``.

    ``scale`` defaults to the largest singular value.  The decision is
    ambiguous when any value lies within a factor 10 of the threshold.
    """
    sv = np.asarray(sv, dtype=float)
    if sv.size == 0 or sv[0] == 0:
        return RankDecision(0, 0.0, np.inf, False)
    scale = sv[0] if scale is None else scale
    thr = tol * scale
    r = int(np.sum(sv > thr))
    above = sv[r - 1] if r > 0 else np.inf
    below = sv[r] if r < sv.size else 0.0
    gap = above / below if below > 0 else np.inf
    ambiguous = bool(np.any((sv > thr / 10) & (sv < thr * 10)))
    return RankDecision(r, thr, gap, ambiguous)


def warn_if_ambiguous(decision: RankDecision, what: str) -> list[str]:
    if decision.ambiguous:
        msg = f"{what}: singular values within 10x of threshold {decision.threshold:.3e}"
        warnings.warn(msg, RankWarning, stacklevel=3)
        return [msg]
    return []


def orthonormal_range(A: np.ndarray, tol: float = RANK_TOL) -> tuple[np.ndarray, np.ndarray, RankDecision]:
    """``(range_basis, complement_basis, decision)`` from a full SVD of ``A``."""
    n = A.shape[0]
    if A.shape[1] == 0:
        return np.zeros((n, 0), dtype=complex), np.eye(n, dtype=complex), RankDecision(0, 0.0, np.inf, False)
    U, sv, _ = scipy.linalg.svd(A, full_matrices=True, lapack_driver="gesvd")
    dec = decide_rank(sv, tol)
    return U[:, : dec.rank], U[:, dec.rank :], dec


def principal_angles(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Principal angles (radians, descending) between the column spans of ``A`` and ``B``."""
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros(0)
    return scipy.linalg.subspace_angles(A, B)


def max_principal_angle(A: np.ndarray, B: np.ndarray) -> float:
    if A.shape[1] != B.shape[1]:
        return float(np.pi / 2)
    ang = principal_angles(A, B)
    return float(ang.max()) if ang.size else 0.0


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0)
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)[0])


def hermitian_defect(A: np.ndarray) -> float:
    return float(np.linalg.norm(A - A.conj().T, 2))


def idempotent_defect(A: np.ndarray) -> float:
    return float(np.linalg.norm(A @ A - A, 2))
