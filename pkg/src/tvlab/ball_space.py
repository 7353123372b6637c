"""Weighted Bergman space on the unit ball, truncated at total degree ``d``.

The measure is ``(1 - |z|^2)^s dV`` scaled to total mass one, so the monomials
are orthogonal with

    ||z^a||^2 = a! Gamma(m + s + 1) / Gamma(|a| + m + s + 1).

Coordinates throughout the package are taken in the orthonormal basis
``e_a = z^a / ||z^a||`` ordered graded-lex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import comb, lgamma

import numpy as np

from tvlab.polyring import Monomial, Polynomial, graded_monomials


class ParameterError(ValueError):
    """Parameters outside the supported range."""


class DomainError(ValueError):
    """Point outside the open ball."""


@dataclass(frozen=True)
class OperatorMatrix:
    """A matrix together with labels for its domain and codomain bases."""

    matrix: np.ndarray
    domain: str
    codomain: str

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def H(self) -> OperatorMatrix:
        return OperatorMatrix(self.matrix.conj().T, self.codomain, self.domain)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.matrix @ other.matrix, other.domain, self.codomain)
        return self.matrix @ other

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def log_monomial_norm2(alpha: Monomial, m: int, s: float) -> float:
    if s <= -1:
        raise ParameterError(f"weight s={s} must exceed -1")
    n = sum(alpha)
    return sum(lgamma(a + 1) for a in alpha) + lgamma(m + s + 1) - lgamma(n + m + s + 1)


def monomial_norm2(alpha: Monomial, m: int, s: float) -> float:
    """Squared norm of ``z^alpha`` in the normalized weighted space on B^m."""
    if len(alpha) != m:
        raise ParameterError("exponent length does not match m")
    return float(np.exp(log_monomial_norm2(alpha, m, s)))


@dataclass(frozen=True)
class WeightedBall:
    m: int
    s: float = 0.0

    def __post_init__(self):
        if self.m < 1:
            raise ParameterError("m must be at least 1")
        if self.s <= -1:
            raise ParameterError(f"weight s={self.s} must exceed -1 (s = -1 is the Hardy limit)")

    def kernel(self, z, w) -> complex:
        return kernel_eval(self, z, w)


@dataclass(frozen=True, eq=False)
class TruncatedSpace:
    """Polynomials of degree <= d with the orthonormal monomial basis."""

    ball: WeightedBall
    d: int
    basis: tuple[Monomial, ...] = field(init=False)

    def __post_init__(self):
        if self.d < 0:
            raise ParameterError("truncation degree must be non-negative")
        object.__setattr__(self, "basis", tuple(graded_monomials(self.ball.m, self.d)))

    @classmethod
    def make(cls, m: int, d: int, s: float = 0.0) -> TruncatedSpace:
        return cls(WeightedBall(m, s), d)

    @property
    def m(self) -> int:
        return self.ball.m

    @property
    def s(self) -> float:
        return self.ball.s

    @property
    def dim(self) -> int:
        return comb(self.d + self.m, self.m)

    @cached_property
    def exps(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64).reshape(len(self.basis), self.m)

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.exps.sum(axis=1)

    @cached_property
    def index(self) -> dict[Monomial, int]:
        return {a: i for i, a in enumerate(self.basis)}

    @cached_property
    def norms(self) -> np.ndarray:
        """``||z^a||`` for every basis monomial."""
        return np.exp(0.5 * np.array([log_monomial_norm2(a, self.m, self.s) for a in self.basis]))

    def degree_slice(self, n: int) -> slice:
        lo = comb(n - 1 + self.m, self.m) if n > 0 else 0
        return slice(lo, comb(n + self.m, self.m))

    def band_mask(self, lo: int, hi: int) -> np.ndarray:
        return (self.degrees >= lo) & (self.degrees <= hi)

    def coords(self, p: Polynomial) -> np.ndarray:
        """Orthonormal coordinates of ``p``; raises if ``deg p > d``."""
        if p.ambient_dim != self.m:
            raise ParameterError("polynomial dimension does not match the space")
        v = np.zeros(self.dim, dtype=np.complex128)
        for a, c in p.terms.items():
            i = self.index.get(a)
            if i is None:
                raise ParameterError(f"monomial {a} exceeds truncation degree {self.d}")
            v[i] = c * self.norms[i]
        return v

    def polynomial(self, v) -> Polynomial:
        v = np.asarray(v)
        return Polynomial({a: v[i] / self.norms[i] for i, a in enumerate(self.basis) if v[i] != 0}, self.m)

    def evaluate_basis(self, points) -> np.ndarray:
        """Matrix of ``e_a(z_j)``; shape (n_points, dim)."""
        from tvlab import kernels

        points = np.atleast_2d(np.asarray(points, dtype=np.complex128))
        return kernels.monomial_matrix(points, self.exps) / self.norms

    def shift(self, i: int) -> OperatorMatrix:
        return shift_matrix(self, i)

    @cached_property
    def shifts(self) -> tuple[np.ndarray, ...]:
        return tuple(shift_matrix(self, i).matrix for i in range(1, self.m + 1))


def shift_matrix(space: TruncatedSpace, i: int) -> OperatorMatrix:
    """Compressed multiplication by ``z_i`` (1-based) on the orthonormal basis.

    ``e_a -> sqrt((a_i + 1) / (|a| + m + s + 1)) e_{a + e_i}``; images above
    degree ``d`` are dropped.
    """
    m, s = space.m, space.s
    if not 1 <= i <= m:
        raise ParameterError(f"coordinate index {i} outside 1..{m}")
    T = np.zeros((space.dim, space.dim))
    for col, a in enumerate(space.basis):
        n = sum(a)
        if n == space.d:
            continue
        b = list(a)
        b[i - 1] += 1
        row = space.index[tuple(b)]
        T[row, col] = np.sqrt((a[i - 1] + 1) / (n + m + s + 1))
    return OperatorMatrix(T, f"P<={space.d}", f"P<={space.d}")


def diagonal_self_commutator(alpha: Monomial, i: int, m: int, s: float) -> float:
    """``<(T_i* T_i - T_i T_i*) e_a, e_a>`` on the untruncated space (1-based ``i``)."""
    n = sum(alpha)
    a = alpha[i - 1]
    up = (a + 1) / (n + m + s + 1)
    down = a / (n + m + s) if n > 0 else 0.0
    return up - down


def kernel_eval(ball: WeightedBall, z, w) -> complex:
    """Reproducing kernel ``(1 - <z, w>)^-(m + 1 + s)`` of the normalized space."""
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    if z.shape != (ball.m,) or w.shape != (ball.m,):
        raise ParameterError("points must have length m")
    if np.vdot(z, z).real >= 1 or np.vdot(w, w).real >= 1:
        raise DomainError("kernel points must lie in the open unit ball")
    inner = np.sum(z * np.conj(w))
    return complex((1 - inner) ** (-(ball.m + 1 + ball.s)))


def truncated_kernel(space: TruncatedSpace, z, w) -> complex:
    """``sum_{|a| <= d} e_a(z) conj(e_a(w))``."""
    ez = space.evaluate_basis(np.asarray(z)[None, :])[0]
    ew = space.evaluate_basis(np.asarray(w)[None, :])[0]
    return complex(np.sum(ez * np.conj(ew)))
