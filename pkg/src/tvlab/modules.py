"""Truncated Hilbert modules over the polynomial ring.

A :class:`TruncatedModule` is an orthonormal frame (columns in ambient
coordinates) for the degree-<=d slice of the ideal closure, its orthogonal
complement (the quotient), or the whole space.  Homogeneous ideals are
handled degree by degree so every frame column has a definite degree; other
ideals use the total-degree filtration and are tagged ``filtered``.

Commutators use the convention ``C_ij = S_j* S_i - S_i S_j*``, which is
``-[S_i, S_j*]``; singular values are unaffected and the diagonal entries of
``C_ii`` on the full ball are the positive numbers
``(a_i + 1)/(|a| + m + s + 1) - a_i/(|a| + m + s)``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from tvlab.ball_space import OperatorMatrix, ParameterError, TruncatedSpace
from tvlab.linalg import (
    RANK_TOL,
    RankDecision,
    decide_rank,
    loglog_slope,
    orthonormal_range,
    warn_if_ambiguous,
)
from tvlab.polyring import Ideal, Polynomial, graded_monomials, monomials_of_degree


class PreconditionError(ValueError):
    """An operator fails the precondition of a check (with the measured defect)."""

    def __init__(self, msg: str, defect: float):
        super().__init__(f"{msg} (defect {defect:.3e})")
        self.defect = defect


class InsufficientDataError(ValueError):
    pass


@dataclass(eq=False)
class TruncatedModule:
    ambient: TruncatedSpace
    frame: np.ndarray  # (dim ambient, dim module), orthonormal columns
    kind: str  # "ideal" | "quotient" | "full"
    col_degrees: np.ndarray | None = None  # per-column degree for graded modules
    ideal: Ideal | None = None
    tag: str = "graded"
    warnings: list[str] = field(default_factory=list)
    rank_decisions: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    @property
    def graded(self) -> bool:
        return self.col_degrees is not None

    def graded_dims(self) -> list[int]:
        if not self.graded:
            raise ValueError("graded dimensions are only defined for graded modules")
        return [int(np.sum(self.col_degrees == n)) for n in range(self.ambient.d + 1)]

    def projection(self) -> np.ndarray:
        return self.frame @ self.frame.conj().T

    def toeplitz(self, i: int) -> OperatorMatrix:
        return toeplitz_on(self, i)

    @property
    def actions(self) -> tuple[np.ndarray, ...]:
        if not hasattr(self, "_actions"):
            self._actions = tuple(toeplitz_on(self, i).matrix for i in range(1, self.ambient.m + 1))
        return self._actions


def full_module(space: TruncatedSpace) -> TruncatedModule:
    return TruncatedModule(space, np.eye(space.dim, dtype=complex), "full", space.degrees.copy())


def _multiples(I: Ideal, space: TruncatedSpace, degree: int | None = None):
    """Coordinates of ``g * z^b`` with total degree <= d (or == degree)."""
    cols = []
    for g in I.generators:
        gd = g.degree
        if degree is None:
            shifts = graded_monomials(space.m, space.d - gd) if gd <= space.d else []
        else:
            shifts = monomials_of_degree(space.m, degree - gd) if degree >= gd else []
        for b in shifts:
            cols.append(space.coords(g * Polynomial.monomial(b)))
    if not cols:
        return np.zeros((space.dim, 0), dtype=complex)
    return np.array(cols).T


def _graded_frames(I: Ideal, space: TruncatedSpace, tol: float):
    ideal_cols, quot_cols, ideal_deg, quot_deg = [], [], [], []
    decisions, warns = {}, []
    for n in range(space.d + 1):
        sl = space.degree_slice(n)
        block = _multiples(I, space, n)[sl]
        rng_basis, comp, dec = orthonormal_range(block, tol)
        decisions[n] = dec
        warns += warn_if_ambiguous(dec, f"ideal slice degree {n}")
        for basis, store, dstore in ((rng_basis, ideal_cols, ideal_deg), (comp, quot_cols, quot_deg)):
            full = np.zeros((space.dim, basis.shape[1]), dtype=complex)
            full[sl] = basis
            store.append(full)
            dstore += [n] * basis.shape[1]
    F_ideal = np.hstack(ideal_cols) if ideal_cols else np.zeros((space.dim, 0), complex)
    F_quot = np.hstack(quot_cols)
    return F_ideal, np.array(ideal_deg, dtype=int), F_quot, np.array(quot_deg, dtype=int), decisions, warns


def _filtered_frames(I: Ideal, space: TruncatedSpace, tol: float):
    A = _multiples(I, space)
    rng_basis, comp, dec = orthonormal_range(A, tol)
    warns = warn_if_ambiguous(dec, "ideal span")
    return rng_basis, comp, {"all": dec}, warns


def _build(I: Ideal, space: TruncatedSpace, tol: float):
    if I.m != space.m:
        raise ParameterError("ideal and space have different ambient dimension")
    if I.homogeneous:
        Fi, di, Fq, dq, decs, warns = _graded_frames(I, space, tol)
        return (
            TruncatedModule(space, Fi, "ideal", di, I, "graded", list(warns), decs),
            TruncatedModule(space, Fq, "quotient", dq, I, "graded", list(warns), decs),
        )
    Fi, Fq, decs, warns = _filtered_frames(I, space, tol)
    return (
        TruncatedModule(space, Fi, "ideal", None, I, "filtered", list(warns), decs),
        TruncatedModule(space, Fq, "quotient", None, I, "filtered", list(warns), decs),
    )


def ideal_truncation(I: Ideal, space: TruncatedSpace, tol: float = RANK_TOL) -> TruncatedModule:
    """Orthonormal frame of ``span{g z^b : deg <= d}``.  Generators above ``d`` contribute nothing."""
    return _build(I, space, tol)[0]


def quotient_module(I: Ideal, space: TruncatedSpace, tol: float = RANK_TOL) -> TruncatedModule:
    """Orthogonal complement of :func:`ideal_truncation` in the truncated space."""
    return _build(I, space, tol)[1]


def ideal_and_quotient(I: Ideal, space: TruncatedSpace, tol: float = RANK_TOL):
    return _build(I, space, tol)


def toeplitz_on(module: TruncatedModule, i: int) -> OperatorMatrix:
    """Compression ``F* T_i F`` of the ambient shift to the module."""
    if not 1 <= i <= module.ambient.m:
        raise ParameterError(f"coordinate index {i} outside 1..{module.ambient.m}")
    T = module.ambient.shifts[i - 1]
    F = module.frame
    return OperatorMatrix(F.conj().T @ (T @ F), module.kind, module.kind)


def commutator(module: TruncatedModule, i: int, j: int) -> np.ndarray:
    """``S_j* S_i - S_i S_j*`` in module coordinates (1-based indices)."""
    Si = module.actions[i - 1]
    Sj = module.actions[j - 1]
    return Sj.conj().T @ Si - Si @ Sj.conj().T


@dataclass
class SpectrumReport:
    pair: tuple[int, int]
    band: tuple[int, int]
    singular_values: np.ndarray
    schatten_sums: dict
    d: int
    kind: str
    tag: str = "graded"

    @property
    def top(self) -> float:
        return float(self.singular_values[0]) if self.singular_values.size else 0.0

    def csv_rows(self):
        i, j = self.pair
        band = f"{self.band[0]}-{self.band[1]}"
        for k, sv in enumerate(self.singular_values, start=1):
            yield f"{self.d},{band},{i},{j},{k},{sv:.17g}"

    def summary(self) -> dict:
        return {
            "pair": list(self.pair),
            "band": list(self.band),
            "d": self.d,
            "kind": self.kind,
            "tag": self.tag,
            "count": int(self.singular_values.size),
            "sigma_max": self.top,
            "schatten_sums": {str(p): float(v) for p, v in sorted(self.schatten_sums.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)


CSV_HEADER = "d,band,i,j,k,sigma"


def _band_rows(module: TruncatedModule, band) -> np.ndarray:
    lo, hi = band
    return module.frame[module.ambient.band_mask(lo, hi)]


def commutator_spectrum(
    module: TruncatedModule, i: int, j: int, band=None, ps=(1, 2, 3, 4)
) -> SpectrumReport:
    """Singular values of ``P_band [S_i, S_j*] P_band`` with band degrees ``[d0, d1]``.

    ``d1`` defaults to ``d - 2``, the largest interior degree.
    """
    d = module.ambient.d
    if band is None:
        band = (0, d - 2)
    lo, hi = band
    if hi > d - 2 or lo < 0 or lo > hi:
        raise ParameterError(f"band {band} must lie inside [0, d-2] = [0, {d - 2}]")
    return _spectrum_from(module, commutator(module, i, j), (i, j), (lo, hi), ps)


def _spectrum_from(module: TruncatedModule, C: np.ndarray, pair, band, ps) -> SpectrumReport:
    Fb = _band_rows(module, band)
    if Fb.size == 0:
        sv = np.zeros(0)
    else:
        sv = np.linalg.svd(Fb @ C @ Fb.conj().T, compute_uv=False)
    sv = np.sort(np.clip(sv, 0.0, None))[::-1]
    sums = {p: float(np.sum(sv[sv > 0] ** p)) for p in ps}
    return SpectrumReport(tuple(pair), tuple(band), sv, sums, module.ambient.d, module.kind, module.tag)


def all_spectra(module: TruncatedModule, band=None, ps=(1, 2, 3, 4), jobs: int = 1) -> list[SpectrumReport]:
    m = module.ambient.m
    pairs = [(i, j) for i in range(1, m + 1) for j in range(1, m + 1)]
    fn = lambda ij: commutator_spectrum(module, ij[0], ij[1], band, ps)  # noqa: E731
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            return list(ex.map(fn, pairs))
    return [fn(ij) for ij in pairs]


def effective_degree(space: TruncatedSpace, n) -> np.ndarray:
    """Shifted degree ``n + m + s + 1`` appearing in the Gamma-ratio norms."""
    return np.asarray(n, dtype=float) + space.m + space.s + 1


@dataclass
class DecayFit:
    pair: tuple[int, int]
    degrees: list[int]
    sigma_max: list[float]
    slope: float  # against log(n + m + s + 1)
    raw_slope: float  # against log(n)

    def to_dict(self):
        return {
            "pair": list(self.pair),
            "degrees": self.degrees,
            "sigma_max": self.sigma_max,
            "slope": self.slope,
            "raw_slope": self.raw_slope,
        }


def band_decay(module: TruncatedModule, i: int, j: int, degrees) -> DecayFit:
    """Top singular value of the commutator on each single-degree band, with fitted log-log slopes."""
    degrees = [int(n) for n in degrees]
    if degrees and (min(degrees) < 0 or max(degrees) > module.ambient.d - 2):
        raise ParameterError(f"decay degrees must lie inside [0, d-2] = [0, {module.ambient.d - 2}]")
    C = commutator(module, i, j)
    tops = [_spectrum_from(module, C, (i, j), (n, n), ()).top for n in degrees]
    slope = loglog_slope(effective_degree(module.ambient, degrees), tops)
    raw = loglog_slope(degrees, tops)
    return DecayFit((i, j), degrees, tops, slope, raw)


@dataclass
class SchattenTrend:
    p: float
    degrees: list[int]
    partial_sums: list[float]
    relative_changes: list[float]
    growth_exponent: float

    def to_dict(self):
        return {
            "p": self.p,
            "d": self.degrees,
            "partial_sums": self.partial_sums,
            "relative_changes": self.relative_changes,
            "growth_exponent": self.growth_exponent,
        }


def schatten_tail(reports: list[SpectrumReport], p: float) -> SchattenTrend:
    """Partial sums ``sum sigma^p`` across truncation degrees and their fitted growth exponent."""
    if p <= 0:
        raise ParameterError("p must be positive")
    if len(reports) < 3:
        raise InsufficientDataError("at least three truncation levels are needed")
    reports = sorted(reports, key=lambda r: r.d)
    ds = [r.d for r in reports]
    sums = []
    for r in reports:
        sv = r.singular_values
        sums.append(float(np.sum(sv[sv > 0] ** p)))
    rel = [sums[k + 1] / sums[k] - 1 if sums[k] > 0 else float("inf") for k in range(len(sums) - 1)]
    return SchattenTrend(p, ds, sums, rel, loglog_slope(ds, sums))


# --------------------------------------------------------------------------
# two-of-three


@dataclass
class TwoOfThreeReport:
    defects: tuple[float, float, float]
    intertwining_defect: float
    base_scale: float
    tol: float
    C: float
    band: tuple[int, int]
    consistent: bool
    small: tuple[bool, bool, bool]

    def to_dict(self):
        return {
            "defects": list(self.defects),
            "intertwining_defect": self.intertwining_defect,
            "base_scale": self.base_scale,
            "tol": self.tol,
            "C": self.C,
            "band": list(self.band),
            "consistent": self.consistent,
            "small": list(self.small),
        }


def _band_op_norm(A: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> float:
    sub = A[np.ix_(rows, cols)]
    return float(np.linalg.norm(sub, 2)) if sub.size else 0.0


def _max_commutator_norm(actions, band_idx) -> float:
    out = 0.0
    for Si in actions:
        for Sj in actions:
            C = Sj.conj().T @ Si - Si @ Sj.conj().T
            out = max(out, _band_op_norm(C, band_idx, band_idx))
    return out


def equivalence_check(
    X,
    dom_actions,
    cod_actions,
    dom_band_idx,
    cod_band_idx,
    tol: float,
    C: float = 10.0,
    band=(0, 0),
    intertwine_tol: float | None = None,
) -> TwoOfThreeReport:
    """Numerical form of the two-of-three rule for an intertwiner ``X: dom -> cod``.

    ``dom_band_idx`` / ``cod_band_idx`` select the coordinates of the band in
    each module.  Defects: (1) max commutator norm on the domain, (2) on the
    codomain, (3) ``max_i ||[X* X, S_i]||`` on the domain band.  If two are
    ``<= tol`` the third has to be ``<= C * tol``.
    """
    X = np.asarray(X)
    dom_band_idx = np.asarray(dom_band_idx)
    cod_band_idx = np.asarray(cod_band_idx)
    inter = 0.0
    for Sd, Sc in zip(dom_actions, cod_actions):
        D = Sc @ X - X @ Sd
        inter = max(inter, _band_op_norm(D, cod_band_idx, dom_band_idx))
    itol = tol if intertwine_tol is None else intertwine_tol
    if inter > itol:
        raise PreconditionError("X does not intertwine the module actions on the band", inter)
    d1 = _max_commutator_norm(dom_actions, dom_band_idx)
    d2 = _max_commutator_norm(cod_actions, cod_band_idx)
    G = X.conj().T @ X
    d3 = max(_band_op_norm(G @ S - S @ G, dom_band_idx, dom_band_idx) for S in dom_actions)
    defects = (d1, d2, d3)
    small = tuple(x <= tol for x in defects)
    consistent = True
    for k in range(3):
        others = [small[q] for q in range(3) if q != k]
        if all(others) and defects[k] > C * tol:
            consistent = False
    return TwoOfThreeReport(defects, inter, d1, tol, C, tuple(band), consistent, small)


def module_equivalence_check(X, dom: TruncatedModule, cod: TruncatedModule, band, tol: float, C: float = 10.0):
    """:func:`equivalence_check` for two truncated modules of the same ambient type."""
    lo, hi = band
    if hi > min(dom.ambient.d, cod.ambient.d) - 2:
        raise ParameterError("band must stay inside the interior degrees")
    di = np.nonzero((dom.col_degrees >= lo) & (dom.col_degrees <= hi))[0]
    ci = np.nonzero((cod.col_degrees >= lo) & (cod.col_degrees <= hi))[0]
    return equivalence_check(X, dom.actions, cod.actions, di, ci, tol, C, band)


def multiplication_operator(space: TruncatedSpace, symbol: Polynomial) -> np.ndarray:
    """Compressed multiplication by a polynomial symbol on the full truncated space."""
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for mono, c in symbol.terms.items():
        term = np.eye(space.dim, dtype=complex)
        for i, a in enumerate(mono):
            for _ in range(a):
                term = space.shifts[i] @ term
        out += c * term
    return out
