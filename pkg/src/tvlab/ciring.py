"""Graded invariants of homogeneous complete intersections.

All comparisons here are exact integers.  The Hilbert polynomial of
``A / (p_1, ..., p_M)`` with degrees ``d_i`` is

    HP(n) = sum_{S subset gens} (-1)^{|S|} binom(n - d_S + m - 1, m - 1)

read as a polynomial in ``n``; it matches the Hilbert function for
``n > sum d_i - m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
import scipy.linalg

from tvlab.ball_space import ParameterError, TruncatedSpace
from tvlab.linalg import RANK_TOL, ConditioningError, decide_rank
from tvlab.polyring import Ideal, Polynomial, monomials_of_degree

MIN_GAP = 1e3


def hilbert_series_ci(m: int, degrees, up_to: int) -> list[int]:
    """Coefficients of ``prod(1 - t^{d_i}) / (1 - t)^m`` for ``t^0 .. t^up_to``."""
    if any(dg < 1 for dg in degrees):
        raise ParameterError("generator degrees must be positive")
    num = [1] + [0] * up_to
    for dg in degrees:
        nxt = num[:]
        for n in range(dg, up_to + 1):
            nxt[n] -= num[n - dg]
        num = nxt
    base = [comb(n + m - 1, m - 1) for n in range(up_to + 1)]
    return [sum(num[j] * base[n - j] for j in range(n + 1)) for n in range(up_to + 1)]


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _binomial_poly(shift: int, r: int) -> list[Fraction]:
    """Coefficients (ascending in n) of ``binom(n + shift, r)``."""
    out = [Fraction(1)]
    for j in range(r):
        out = _poly_mul(out, [Fraction(shift - j), Fraction(1)])
    f = Fraction(1)
    for j in range(1, r + 1):
        f *= j
    return [c / f for c in out]


def hilbert_polynomial(m: int, degrees) -> list[Fraction]:
    """Ascending coefficients in ``n`` of the complete-intersection Hilbert polynomial."""
    total = [Fraction(0)] * m
    for size in range(len(degrees) + 1):
        for S in combinations(degrees, size):
            term = _binomial_poly(m - 1 - sum(S), m - 1)
            sign = -1 if size % 2 else 1
            for i, c in enumerate(term):
                total[i] += sign * c
    while len(total) > 1 and total[-1] == 0:
        total.pop()
    return total


def eval_fraction_poly(coeffs, n: int) -> Fraction:
    return sum((c * n**i for i, c in enumerate(coeffs)), Fraction(0))


@dataclass
class HilbertData:
    m: int
    degrees: tuple[int, ...]
    series: list[int]
    polynomial: list[Fraction]
    regularity: int

    def polynomial_value(self, n: int) -> Fraction:
        return eval_fraction_poly(self.polynomial, n)


def hilbert_data(m: int, degrees, up_to: int) -> HilbertData:
    degrees = tuple(int(x) for x in degrees)
    horizon = max(up_to, sum(degrees) + 1)
    series = hilbert_series_ci(m, degrees, horizon)
    poly = hilbert_polynomial(m, degrees)
    reg = 0
    for n in range(horizon + 1):
        if eval_fraction_poly(poly, n) != series[n]:
            reg = n + 1
    return HilbertData(m, degrees, series[: up_to + 1], poly, reg)


def hilbert_function_numeric(I: Ideal, n: int, tol: float = RANK_TOL) -> int:
    """``dim (A/I)_n`` from the numerical rank of the degree-``n`` multiples."""
    if not I.homogeneous:
        raise ParameterError("the Hilbert function is only defined here for homogeneous ideals")
    space = TruncatedSpace.make(I.m, n)
    sl = space.degree_slice(n)
    cols = []
    for g in I.generators:
        if g.degree <= n:
            for b in monomials_of_degree(I.m, n - g.degree):
                cols.append(space.coords(g * Polynomial.monomial(b))[sl])
    total = comb(n + I.m - 1, I.m - 1)
    if not cols:
        return total
    sv = scipy.linalg.svdvals(np.array(cols).T)
    full = np.zeros(max(len(sv), 1))
    full[: len(sv)] = sv
    dec = decide_rank(full, tol)
    if dec.gap <= MIN_GAP:
        raise ConditioningError(f"degree {n}: spectral gap {dec.gap:.3e} at the rank threshold is below {MIN_GAP:g}")
    return total - dec.rank


@dataclass
class ProxyRow:
    n: int
    quotient_dim: int
    series: int
    polynomial: Fraction

    def as_tuple(self):
        p = self.polynomial
        return (self.n, self.quotient_dim, self.series, int(p) if p.denominator == 1 else str(p))


@dataclass
class ProxyReport:
    ideal: str
    degrees: tuple[int, ...]
    rows: list[ProxyRow]
    regularity: int
    passed: bool
    polynomial: list[Fraction]

    def csv(self) -> str:
        lines = ["n,quotient_dim,series,polynomial"]
        for r in self.rows:
            lines.append(",".join(str(x) for x in r.as_tuple()))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "ideal": self.ideal,
            "degrees": list(self.degrees),
            "rows": [list(r.as_tuple()) for r in self.rows],
            "regularity": self.regularity,
            "passed": self.passed,
            "polynomial": [str(c) for c in self.polynomial],
        }


def euler_proxy_check(I: Ideal, degrees=None, n_range=range(0, 7), d: int | None = None) -> ProxyReport:
    """Graded dims of the truncated quotient against the CI series and Hilbert polynomial."""
    from tvlab.modules import quotient_module

    if not I.homogeneous:
        raise ParameterError("the index proxy needs a homogeneous ideal")
    n_range = list(n_range)
    degrees = tuple(I.degrees if degrees is None else degrees)
    top = max(n_range)
    d = top if d is None else d
    if d < top:
        raise ParameterError(f"truncation d={d} below the requested degree {top}")
    Q = quotient_module(I, TruncatedSpace.make(I.m, d))
    for n, dec in sorted(Q.rank_decisions.items()):
        if dec.gap <= MIN_GAP:
            raise ConditioningError(f"degree {n}: spectral gap {dec.gap:.3e} at the rank threshold is below {MIN_GAP:g}")
    dims = Q.graded_dims()
    data = hilbert_data(I.m, degrees, top)
    rows = [ProxyRow(n, dims[n], data.series[n], data.polynomial_value(n)) for n in n_range]
    passed = all(r.quotient_dim == r.series for r in rows) and all(
        r.series == r.polynomial for r in rows if r.n >= data.regularity
    )
    return ProxyReport(str(I), degrees, rows, data.regularity, passed, data.polynomial)
