"""Zero varieties inside the ball: Assumption checks, sampling and quadrature.

Two samplers are provided.

``slice`` (default)
    Cut ``Z_I`` with random affine planes of complex dimension ``M``.  The
    plane direction is the last ``M`` columns of a Haar unitary and its
    offset is uniform in the ``k``-ball of radius ``eps``.  Every
    intersection point inside the ball carries the same weight
    ``C(m, M) vol(B^k_eps) / n`` (complex Crofton identity), so
    ``sum_j w_j f(z_j)`` is an unbiased estimate of ``int f dV_I``.  Hypersurface
    slices are solved exactly through a companion matrix, linear ideals by a
    linear solve, and other complete intersections by multi-start Newton.

``project``
    Project random ball points onto ``Z_I`` with damped minimum-norm
    Gauss-Newton and weight them by an inverse k-nearest-neighbour density
    estimate (k = 8) in the ``2k`` real tangent dimensions.  Kept for
    comparison; it is biased near the boundary of ``Omega_I``.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb, factorial, pi

import numpy as np
import scipy.spatial

from tvlab.polyring import Ideal, Polynomial, eval_many

log = logging.getLogger(__name__)

SOLVE_TOL = 1e-10
SINGULAR_SV = 1e-6
CHUNK = 2048


class SamplingError(RuntimeError):
    """The sampler could not produce points on the variety."""


class AssumptionError(RuntimeError):
    """The ideal does not satisfy the Assumption and no override was given."""


@dataclass(frozen=True)
class VarietyConfig:
    ideal: Ideal
    radius: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class SamplePoint:
    z: np.ndarray
    weight: float
    residual: float
    on_boundary: bool


@dataclass(frozen=True, eq=False)
class VarietySample:
    """Column storage for a set of quadrature points."""

    points: np.ndarray  # (n, m) complex
    weights: np.ndarray  # (n,) raw weights; sum approximates int (-rho)^s dV_I
    residuals: np.ndarray
    on_boundary: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.points.shape[0]

    def __iter__(self):
        for j in range(len(self)):
            yield SamplePoint(self.points[j], float(self.weights[j]), float(self.residuals[j]), bool(self.on_boundary[j]))

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @property
    def normalized_weights(self) -> np.ndarray:
        return self.weights / self.weights.sum()

    def weighted_evaluation(self, space) -> np.ndarray:
        """Rows ``sqrt(w_j / W) e_a(z_j)`` for the orthonormal basis of ``space``."""
        return np.sqrt(self.normalized_weights)[:, None] * space.evaluate_basis(self.points)


@dataclass
class AssumptionReport:
    codim_ok: bool
    min_jacobian_sv: float
    transversality_margin: float
    verdict: str  # "pass" | "fail" | "empty"
    reasons: list[str]
    n_boundary: int
    jacobian_rank_min: int
    thresholds: dict

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "codim_ok": self.codim_ok,
            "min_jacobian_sv": self.min_jacobian_sv,
            "transversality_margin": self.transversality_margin,
            "verdict": self.verdict,
            "reasons": list(self.reasons),
            "n_boundary": self.n_boundary,
            "jacobian_rank_min": self.jacobian_rank_min,
            "thresholds": dict(self.thresholds),
        }


# --------------------------------------------------------------------------
# helpers


def _complex_normal(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def haar_unitary(rng, m: int, batch: int) -> np.ndarray:
    Z = _complex_normal(rng, (batch, m, m))
    Q, R = np.linalg.qr(Z)
    ph = np.diagonal(R, axis1=1, axis2=2)
    ph = ph / np.abs(ph)
    return Q * ph[:, None, :]


def uniform_complex_ball(rng, k: int, batch: int, radius: float) -> np.ndarray:
    g = _complex_normal(rng, (batch, k))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(batch) ** (1.0 / (2 * k))
    return g * r[:, None]


def ball_volume(real_dim: int, radius: float = 1.0) -> float:
    """Lebesgue volume of a real ``real_dim``-ball; ``real_dim`` must be even."""
    k = real_dim // 2
    return pi**k * radius ** (2 * k) / factorial(k)


def _max_abs(I: Ideal, pts) -> np.ndarray:
    if len(pts) == 0:
        return np.zeros(0)
    return np.abs(I.values(pts)).max(axis=1)


def _min_sv(J: np.ndarray) -> np.ndarray:
    if J.shape[0] == 0:
        return np.zeros(0)
    return np.linalg.svd(J, compute_uv=False)[:, -1]


def tangent_margin(J: np.ndarray, z: np.ndarray, rank_tol: float = 1e-8) -> np.ndarray:
    """``|P_{ker J} z|`` for each point: norm of the position vector's tangent component."""
    out = np.empty(len(z))
    for p in range(len(z)):
        _, sv, Vh = np.linalg.svd(J[p])
        r = int(np.sum(sv > rank_tol * max(sv[0], 1e-300))) if sv.size else 0
        N = Vh[r:].conj().T  # null-space basis
        out[p] = np.linalg.norm(N.conj().T @ z[p])
    return out


# --------------------------------------------------------------------------
# boundary points and the Assumption


def sample_boundary(cfg: VarietyConfig, n: int, rng, tol: float = SOLVE_TOL, max_iter: int = 100, max_rounds: int = 4):
    """Points of ``Z_I`` on the sphere of radius ``eps`` by real Gauss-Newton from random seeds."""
    I, eps = cfg.ideal, cfg.radius
    m, M = I.m, I.M
    found = []
    for _ in range(max_rounds):
        z = _complex_normal(rng, (2 * n, m))
        z *= eps / np.linalg.norm(z, axis=1, keepdims=True)
        for _ in range(max_iter):
            F = I.values(z)
            J = I.jacobians(z)
            sph = (np.sum(np.abs(z) ** 2, axis=1) - eps**2) / eps
            res = np.concatenate([F.real, F.imag, sph[:, None]], axis=1)
            Jr = np.zeros((len(z), 2 * M + 1, 2 * m))
            Jr[:, :M, :m] = J.real
            Jr[:, :M, m:] = -J.imag
            Jr[:, M : 2 * M, :m] = J.imag
            Jr[:, M : 2 * M, m:] = J.real
            Jr[:, 2 * M, :m] = 2 * z.real / eps
            Jr[:, 2 * M, m:] = 2 * z.imag / eps
            step = np.einsum("pij,pj->pi", np.linalg.pinv(Jr, rcond=1e-12), res)
            z = z - (step[:, :m] + 1j * step[:, m:])
            if np.all(np.abs(res).max(axis=1) < tol * 1e-2):
                break
        ok = (_max_abs(I, z) <= tol) & (np.abs(np.linalg.norm(z, axis=1) - eps) <= tol * max(eps, 1))
        ok &= np.all(np.isfinite(z), axis=1)
        found.extend(z[ok])
        if len(found) >= n:
            break
    return np.array(found[:n] if len(found) >= n else found).reshape(-1, m)


def check_assumption(
    cfg: VarietyConfig,
    n_boundary_samples: int = 64,
    tol: float = SOLVE_TOL,
    *,
    jac_tol: float = 1e-6,
    margin_tol: float = 1e-6,
) -> AssumptionReport:
    """Codimension, Jacobian rank and transversality on ``Z_I`` meets the sphere."""
    I = cfg.ideal
    m, M = I.m, I.M
    codim_ok = M <= m - 2
    reasons = []
    if not codim_ok:
        reasons.append(f"codimension: M={M} > m-2={m - 2}")
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0xB0]))
    pts = sample_boundary(cfg, n_boundary_samples, rng, tol)
    thresholds = {"jac_tol": jac_tol, "margin_tol": margin_tol, "solve_tol": tol}
    if len(pts) == 0:
        reasons.append("empty link: no boundary points found")
        return AssumptionReport(codim_ok, float("nan"), float("nan"), "empty", reasons, 0, 0, thresholds)
    J = I.jacobians(pts)
    sv = np.linalg.svd(J, compute_uv=False)
    full = min(M, m)
    min_sv = float(sv[:, full - 1].min())
    ranks = (sv > 1e-8 * np.maximum(sv[:, :1], 1e-300)).sum(axis=1)
    margin = float(tangent_margin(J, pts).min())
    if min_sv <= jac_tol:
        reasons.append(f"rank: Jacobian rank {int(ranks.min())} < {full} on the boundary (min singular value {min_sv:.3e})")
    if margin <= margin_tol:
        reasons.append(f"transversality: margin {margin:.3e} <= {margin_tol:.1e}")
    verdict = "pass" if not reasons else "fail"
    return AssumptionReport(codim_ok, min_sv, margin, verdict, reasons, len(pts), int(ranks.min()), thresholds)


# --------------------------------------------------------------------------
# interior sampling


def _linear_parts(I: Ideal):
    m = I.m
    A = np.zeros((I.M, m), dtype=complex)
    c = np.zeros(I.M, dtype=complex)
    for r, g in enumerate(I.generators):
        for mono, coef in g.terms.items():
            if sum(mono) == 0:
                c[r] += coef
            else:
                A[r, mono.index(1)] += coef
    return A, c


def _slice_linear(I, b, V):
    A, c = _linear_parts(I)
    AV = np.einsum("ij,pjk->pik", A, V)
    rhs = -(b @ A.T + c)
    ok = np.abs(np.linalg.det(AV)) > 1e-12
    v = np.zeros((len(b), I.M), dtype=complex)
    v[ok] = np.linalg.solve(AV[ok], rhs[ok][..., None])[..., 0]
    z = b + np.einsum("pjk,pk->pj", V, v)
    return z[ok], np.nonzero(ok)[0], int((~ok).sum())


def _slice_hypersurface(I, b, V, eps, tol):
    p = I.generators[0]
    D = p.degree
    n_dir = V[:, :, 0]
    L = D + 1
    t_nodes = eps * np.exp(2j * np.pi * np.arange(L) / L)
    z_nodes = b[:, None, :] + t_nodes[None, :, None] * n_dir[:, None, :]
    q = eval_many(p, z_nodes.reshape(-1, I.m)).reshape(len(b), L)
    coef = np.fft.fft(q, axis=1) / L / eps ** np.arange(L)  # coef[:, j] multiplies t^j
    lead = coef[:, D]
    ok = np.abs(lead) > 1e-13 * np.abs(coef).max(axis=1)
    roots = np.full((len(b), D), np.nan + 0j)
    if D == 1:
        roots[ok, 0] = -coef[ok, 0] / lead[ok]
    elif ok.any():
        C = np.zeros((ok.sum(), D, D), dtype=complex)
        C[:, 0, :] = -coef[ok, D - 1 :: -1][:, :D] / lead[ok, None]
        C[:, np.arange(1, D), np.arange(D - 1)] = 1.0
        roots[ok] = np.linalg.eigvals(C)
    owner = np.repeat(np.arange(len(b)), D)
    t = roots.reshape(-1)
    keep = np.isfinite(t)
    t, owner = t[keep], owner[keep]
    z = b[owner] + t[:, None] * n_dir[owner]
    for _ in range(4):
        val = eval_many(p, z)
        grad = I.jacobians(z)[:, 0, :]
        dq = np.einsum("pj,pj->p", grad, n_dir[owner])
        good = np.abs(dq) > 1e-300
        t = t - np.where(good, val / np.where(good, dq, 1), 0)
        z = b[owner] + t[:, None] * n_dir[owner]
    res = np.abs(eval_many(p, z))
    failed_slices = np.unique(owner[~(res <= tol)])
    n_fail = int((~ok).sum()) + len(failed_slices)
    conv = res <= tol
    return z[conv], owner[conv], n_fail


def _slice_newton(I, b, V, eps, tol, rng, max_iter=50):
    M = I.M
    n_starts = 2 * int(np.prod(I.degrees))
    B = len(b)
    owner = np.repeat(np.arange(B), n_starts)
    v = _complex_normal(rng, (B * n_starts, M)) * eps
    bb, VV = b[owner], V[owner]
    for _ in range(max_iter):
        z = bb + np.einsum("pjk,pk->pj", VV, v)
        F = I.values(z)
        Jv = np.einsum("pij,pjk->pik", I.jacobians(z), VV)
        step = np.einsum("pij,pj->pi", np.linalg.pinv(Jv, rcond=1e-12), F)
        v = v - step
        bad = ~np.all(np.isfinite(v), axis=1) | (np.linalg.norm(v, axis=1) > 1e6 * eps)
        v[bad] = 0
    z = bb + np.einsum("pjk,pk->pj", VV, v)
    conv = _max_abs(I, z) <= tol
    z, owner = z[conv], owner[conv]
    keep_z, keep_o = [], []
    for s_idx in np.unique(owner):
        pts = z[owner == s_idx]
        uniq = []
        for q in pts:
            if all(np.linalg.norm(q - u) > 1e-7 * max(eps, 1) for u in uniq):
                uniq.append(q)
        keep_z.extend(uniq)
        keep_o.extend([s_idx] * len(uniq))
    n_fail = B - len(np.unique(owner))
    return np.array(keep_z).reshape(-1, I.m), np.array(keep_o, dtype=int), n_fail


def _slice_chunk(I: Ideal, eps: float, batch: int, seed_seq, tol: float):
    rng = np.random.default_rng(seed_seq)
    m, M, k = I.m, I.M, I.k
    U = haar_unitary(rng, m, batch)
    u = uniform_complex_ball(rng, k, batch, eps)
    b = np.einsum("pjk,pk->pj", U[:, :, :k], u)
    V = U[:, :, k:]
    if I.is_linear():
        z, owner, n_fail = _slice_linear(I, b, V)
    elif M == 1:
        z, owner, n_fail = _slice_hypersurface(I, b, V, eps, tol)
    else:
        z, owner, n_fail = _slice_newton(I, b, V, eps, tol, rng)
    return z, n_fail


def _project_chunk(I: Ideal, eps: float, batch: int, seed_seq, tol: float, max_iter: int = 50):
    rng = np.random.default_rng(seed_seq)
    z = uniform_complex_ball(rng, I.m, batch, eps)
    for _ in range(max_iter):
        F = I.values(z)
        if np.all(np.abs(F).max(axis=1) < tol * 1e-2):
            break
        J = I.jacobians(z)
        step = np.einsum("pij,pj->pi", np.linalg.pinv(J, rcond=1e-12), F)
        # damping: cap the step length at eps / 2
        sn = np.linalg.norm(step, axis=1, keepdims=True)
        step *= np.minimum(1.0, 0.5 * eps / np.maximum(sn, 1e-300))
        z = z - step
        z[~np.all(np.isfinite(z), axis=1)] = 0
    conv = _max_abs(I, z) <= tol
    return z[conv], int((~conv).sum())


def sample_variety(
    cfg: VarietyConfig,
    n: int,
    s: float,
    *,
    method: str = "slice",
    tol: float = SOLVE_TOL,
    require_assumption: bool = True,
    jobs: int = 1,
    knn: int = 8,
) -> VarietySample:
    """Quadrature points on ``Omega_I`` for the weight ``(1 - |z|^2 / eps^2)^s``.

    ``n`` is the number of slices (``slice``) or seed points (``project``).
    Raw weights sum to an estimate of ``int (-rho)^s dV_I``.
    """
    I, eps = cfg.ideal, cfg.radius
    if s <= -1:
        raise ValueError("weight s must exceed -1")
    if require_assumption:
        rep = check_assumption(cfg, tol=tol)
        if rep.verdict == "empty":
            raise SamplingError("empty link: the variety does not meet the sphere")
        if not rep.passed:
            raise AssumptionError("; ".join(rep.reasons))
    if I.k < 1:
        raise SamplingError("the variety has non-positive expected dimension")
    sizes = [CHUNK] * (n // CHUNK) + ([n % CHUNK] if n % CHUNK else [])
    seqs = np.random.SeedSequence([cfg.seed, 0x5A]).spawn(len(sizes))
    worker = _slice_chunk if method == "slice" else _project_chunk
    if method not in ("slice", "project"):
        raise ValueError(f"unknown sampling method {method!r}")
    args = [(I, eps, sz, sq, tol) for sz, sq in zip(sizes, seqs)]
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            results = list(ex.map(lambda a: worker(*a), args))
    else:
        results = [worker(*a) for a in args]
    z = np.concatenate([r[0] for r in results]) if results else np.zeros((0, I.m), complex)
    n_fail = sum(r[1] for r in results)
    if n and n_fail / n > 0.5:
        raise SamplingError(f"solver failed on {n_fail} of {n} attempts")

    r2 = np.sum(np.abs(z) ** 2, axis=1)
    inside = r2 < eps**2 * (1 - 1e-14)
    z = z[inside]
    if len(z):
        sv = _min_sv(I.jacobians(z))
        z = z[sv >= SINGULAR_SV]
    if len(z) == 0:
        raise SamplingError("no sample points inside the ball")
    r2 = np.sum(np.abs(z) ** 2, axis=1)
    defining = 1 - r2 / eps**2
    k = I.k
    if method == "slice":
        base = np.full(len(z), comb(I.m, I.M) * ball_volume(2 * k, eps) / n)
    else:
        if len(z) <= knn:
            raise SamplingError("too few projected points for the density estimate")
        X = np.concatenate([z.real, z.imag], axis=1)
        dist, _ = scipy.spatial.cKDTree(X).query(X, k=knn + 1)
        rk = dist[:, -1]
        density = knn / ((len(z) - 1) * ball_volume(2 * k, 1.0) * rk ** (2 * k))
        base = 1.0 / (len(z) * density)
    weights = defining**s * base
    residuals = _max_abs(I, z)
    meta = {
        "ideal": str(I),
        "ideal_key": I.key(),
        "radius": eps,
        "s": s,
        "n": n,
        "seed": cfg.seed,
        "method": method,
        "failures": n_fail,
    }
    return VarietySample(z, weights, residuals, np.zeros(len(z), dtype=bool), meta)


def gram_on_variety(samples: VarietySample, functions: list[Polynomial]) -> np.ndarray:
    """Quadrature Gram matrix with the constant function normalized to 1."""
    if len(samples) == 0:
        raise SamplingError("empty sample set")
    W = samples.normalized_weights
    vals = np.stack([eval_many(f, samples.points) for f in functions], axis=1)
    G = (vals * W[:, None]).T @ vals.conj()
    return 0.5 * (G + G.conj().T)
