"""Sparse multivariate complex polynomials and ideals.

Monomials are exponent tuples ``(a_1, ..., a_m)``.  A :class:`Polynomial` maps
monomials to nonzero complex coefficients; an :class:`Ideal` is a generator
list with the bookkeeping the rest of the package needs (degrees,
homogeneity, codimension ``M``).

Text syntax: ``3*z1^2*z3 - (0+1i)*z2``.  Variables are ``z1 .. zm``, ``i`` is
the imaginary unit and ``str(parse(s))`` re-parses to the same polynomial.
"""

from __future__ import annotations

import hashlib
import itertools
import re
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from tvlab import kernels

Monomial = tuple[int, ...]


class PolynomialError(ValueError):
    """Malformed polynomial input or dimension mismatch."""


def total_degree(alpha: Monomial) -> int:
    return sum(alpha)


def monomials_of_degree(m: int, n: int) -> list[Monomial]:
    """All exponent tuples of total degree ``n`` in graded-lex order (z1 > z2 > ...)."""
    out = []
    for combo in itertools.combinations_with_replacement(range(m), n):
        e = [0] * m
        for j in combo:
            e[j] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


def graded_monomials(m: int, d: int) -> list[Monomial]:
    """Monomials of total degree <= d; degree ascending, lex descending inside a degree."""
    out: list[Monomial] = []
    for n in range(d + 1):
        out.extend(monomials_of_degree(m, n))
    assert len(out) == comb(d + m, m)
    return out


def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _fmt_coeff(c: complex) -> str:
    if c.imag == 0:
        return _fmt_real(c.real)
    im = _fmt_real(c.imag)
    sign = "" if im.startswith("-") else "+"
    return f"({_fmt_real(c.real)}{sign}{im}i)"


@dataclass(frozen=True)
class Polynomial:
    """Immutable sparse polynomial in ``ambient_dim`` variables."""

    terms: Mapping[Monomial, complex]
    ambient_dim: int
    _arrays: tuple = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        clean = {}
        for mono, c in self.terms.items():
            mono = tuple(int(a) for a in mono)
            if len(mono) != self.ambient_dim or any(a < 0 for a in mono):
                raise PolynomialError(f"monomial {mono} does not fit C^{self.ambient_dim}")
            c = complex(c)
            if c != 0:
                clean[mono] = clean.get(mono, 0j) + c
        clean = {k: v for k, v in clean.items() if v != 0}
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)))

    # construction helpers
    @classmethod
    def zero(cls, m: int) -> Polynomial:
        return cls({}, m)

    @classmethod
    def constant(cls, c: complex, m: int) -> Polynomial:
        return cls({(0,) * m: c}, m)

    @classmethod
    def variable(cls, j: int, m: int) -> Polynomial:
        """The coordinate ``z_{j+1}`` (``j`` is zero-based)."""
        e = [0] * m
        e[j] = 1
        return cls({tuple(e): 1.0}, m)

    @classmethod
    def monomial(cls, alpha: Sequence[int], c: complex = 1.0) -> Polynomial:
        return cls({tuple(alpha): c}, len(alpha))

    @classmethod
    def parse(cls, text: str, m: int | None = None) -> Polynomial:
        return parse_polynomial(text, m)

    # algebra
    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.ambient_dim != self.ambient_dim:
                raise PolynomialError("ambient dimensions differ")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return Polynomial.constant(complex(other), self.ambient_dim)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0j) + v
        return Polynomial(terms, self.ambient_dim)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({k: -v for k, v in self.terms.items()}, self.ambient_dim)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict[Monomial, complex] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                k = tuple(x + y for x, y in zip(a, b))
                terms[k] = terms.get(k, 0j) + ca * cb
        return Polynomial(terms, self.ambient_dim)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Polynomial.constant(1.0, self.ambient_dim)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.ambient_dim, tuple(self.terms.items())))

    # properties
    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(k) for k in self.terms), default=-1)

    @property
    def min_degree(self) -> int:
        return min((sum(k) for k in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        return len({sum(k) for k in self.terms}) <= 1

    def derivative(self, j: int) -> Polynomial:
        """Holomorphic partial in ``z_{j+1}``."""
        terms = {}
        for k, c in self.terms.items():
            if k[j]:
                e = list(k)
                e[j] -= 1
                terms[tuple(e)] = c * k[j]
        return Polynomial(terms, self.ambient_dim)

    def substitute_zero(self, j: int) -> Polynomial:
        """Set ``z_{j+1} = 0`` (the variable stays in the ambient ring)."""
        return Polynomial({k: c for k, c in self.terms.items() if k[j] == 0}, self.ambient_dim)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(exps, coeffs)`` arrays for the batch kernels."""
        if self._arrays is None:
            if self.terms:
                exps = np.array(list(self.terms), dtype=np.int64)
            else:
                exps = np.zeros((0, self.ambient_dim), dtype=np.int64)
            coeffs = np.array(list(self.terms.values()), dtype=np.complex128)
            object.__setattr__(self, "_arrays", (exps, coeffs))
        return self._arrays

    def __call__(self, z):
        return eval_poly(self, z)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, c in self.terms.items():
            factors = []
            for j, a in enumerate(k):
                if a == 1:
                    factors.append(f"z{j + 1}")
                elif a > 1:
                    factors.append(f"z{j + 1}^{a}")
            neg = c.imag == 0 and c.real < 0
            mag = -c if neg else c
            if factors and mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([_fmt_coeff(mag)] + factors)
            parts.append(("-" if neg else "+", body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Polynomial({str(self)!r}, m={self.ambient_dim})"


def eval_poly(p: Polynomial, z) -> complex:
    """Exact term-by-term evaluation at a single point."""
    z = [complex(x) for x in z]
    if len(z) != p.ambient_dim:
        raise PolynomialError(f"point has length {len(z)}, expected {p.ambient_dim}")
    total = 0j
    for k, c in p.terms.items():
        v = c
        for zj, a in zip(z, k):
            if a:
                v *= zj**a
        total += v
    return total


def eval_many(p: Polynomial, points) -> np.ndarray:
    """Batch evaluation at ``points`` of shape (n, m)."""
    points = np.atleast_2d(np.asarray(points, dtype=np.complex128))
    if points.shape[1] != p.ambient_dim:
        raise PolynomialError(f"points have dimension {points.shape[1]}, expected {p.ambient_dim}")
    exps, coeffs = p.as_arrays()
    return kernels.poly_eval(points, exps, coeffs)


def homogeneous_parts(p: Polynomial) -> dict[int, Polynomial]:
    parts: dict[int, dict] = {}
    for k, c in p.terms.items():
        parts.setdefault(sum(k), {})[k] = c
    return {n: Polynomial(t, p.ambient_dim) for n, t in sorted(parts.items())}


@dataclass(frozen=True)
class Ideal:
    """Ideal given by generators ``p_1 .. p_M``."""

    generators: tuple[Polynomial, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise PolynomialError("an ideal needs at least one generator")
        if len({g.ambient_dim for g in gens}) != 1:
            raise PolynomialError("generators live in different ambient dimensions")
        if any(g.is_zero() for g in gens):
            raise PolynomialError("zero generator")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def parse(cls, texts: Iterable[str], m: int | None = None) -> Ideal:
        texts = list(texts)
        if m is None:
            m = max(_max_var_index(t) for t in texts)
        return cls(tuple(parse_polynomial(t, m) for t in texts))

    @property
    def m(self) -> int:
        return self.generators[0].ambient_dim

    @property
    def M(self) -> int:
        return len(self.generators)

    @property
    def k(self) -> int:
        """Expected complex dimension ``m - M`` of the zero variety."""
        return self.m - self.M

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(g.degree for g in self.generators)

    @property
    def homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.generators)

    def is_linear(self) -> bool:
        return all(g.degree <= 1 for g in self.generators)

    def values(self, points) -> np.ndarray:
        """Generator values at ``points``; shape (n, M)."""
        return np.stack([eval_many(g, points) for g in self.generators], axis=1)

    def jacobians(self, points) -> np.ndarray:
        """Holomorphic Jacobians at ``points``; shape (n, M, m)."""
        points = np.atleast_2d(np.asarray(points, dtype=np.complex128))
        return np.stack([kernels.poly_grad(points, *g.as_arrays()) for g in self.generators], axis=1)

    def key(self) -> str:
        """Stable hash of the generator texts (used for cache keys)."""
        text = ";".join(str(g) for g in self.generators) + f"|m={self.m}"
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def __str__(self):
        return "<" + ", ".join(str(g) for g in self.generators) + ">"


def jacobian(I: Ideal, z) -> np.ndarray:
    """M x m matrix of holomorphic partials at the point ``z``."""
    z = list(z)
    if len(z) != I.m:
        raise PolynomialError(f"point has length {len(z)}, expected {I.m}")
    return np.array([[eval_poly(g.derivative(j), z) for j in range(I.m)] for g in I.generators])


# --------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>i(?![a-zA-Z0-9_]))?"
    r"|(?P<var>z(?P<idx>\d+))|(?P<unit>i(?![a-zA-Z0-9_]))|(?P<op>[-+*^()]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise PolynomialError(f"cannot parse {text[pos:]!r}")
        pos = mt.end()
        if mt.group("num"):
            v = float(mt.group("num"))
            out.append(("num", complex(0, v) if mt.group("imag") else complex(v)))
        elif mt.group("var"):
            out.append(("var", int(mt.group("idx"))))
        elif mt.group("unit"):
            out.append(("num", 1j))
        else:
            out.append(("op", mt.group("op")))
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


def _max_var_index(text: str) -> int:
    idx = [int(x) for x in re.findall(r"z(\d+)", text)]
    return max(idx, default=1)


class _Parser:
    def __init__(self, tokens, m):
        self.toks = tokens
        self.pos = 0
        self.m = m

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expr(self) -> Polynomial:
        kind, val = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        out = self.term() * sign
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                out = out + t if val == "+" else out - t
            else:
                return out

    def term(self) -> Polynomial:
        out = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                out = out * self.factor()
            else:
                return out

    def factor(self) -> Polynomial:
        base = self.base()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            k2, exp = self.take()
            if k2 != "num" or exp.imag != 0 or exp.real != int(exp.real) or exp.real < 0:
                raise PolynomialError("exponent must be a non-negative integer")
            return base ** int(exp.real)
        return base

    def base(self) -> Polynomial:
        kind, val = self.take()
        if kind == "num":
            return Polynomial.constant(val, self.m)
        if kind == "var":
            if not 1 <= val <= self.m:
                raise PolynomialError(f"variable z{val} outside C^{self.m}")
            return Polynomial.variable(val - 1, self.m)
        if kind == "op" and val == "(":
            inner = self.expr()
            k2, v2 = self.take()
            if (k2, v2) != ("op", ")"):
                raise PolynomialError("unbalanced parenthesis")
            return inner
        if kind == "op" and val == "-":
            return -self.base()
        raise PolynomialError(f"unexpected token {val!r}")


def parse_polynomial(text: str, m: int | None = None) -> Polynomial:
    """Parse the text syntax; ``m`` defaults to the largest variable index used."""
    if m is None:
        m = _max_var_index(text)
    parser = _Parser(_tokenize(text), m)
    out = parser.expr()
    if parser.pos != len(parser.toks):
        raise PolynomialError(f"trailing input in {text!r}")
    return out
