import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tvlab.polyring import (
    Ideal,
    Polynomial,
    PolynomialError,
    eval_many,
    eval_poly,
    graded_monomials,
    homogeneous_parts,
    jacobian,
    monomials_of_degree,
)

from cases import BRIESKORN, CONE, PRODUCT

M = 3

coef = st.complex_numbers(min_magnitude=0, max_magnitude=4, allow_nan=False, allow_infinity=False).map(
    lambda c: complex(round(c.real, 3), round(c.imag, 3))
)
mono = st.tuples(*[st.integers(0, 3)] * M)
polys = st.dictionaries(mono, coef, max_size=5).map(lambda t: Polynomial(t, M))
points = st.lists(
    st.complex_numbers(max_magnitude=1.2, allow_nan=False, allow_infinity=False), min_size=M, max_size=M
)


def test_eval_examples():
    p = Polynomial.parse(CONE)
    assert eval_poly(p, (1, 0, 0)) == 1
    assert eval_poly(p, (1, 1j, 0)) == 0
    assert eval_poly(Polynomial.parse(BRIESKORN), (0, 0, 0, 0, 1)) == 1


def test_eval_dimension_mismatch():
    with pytest.raises(PolynomialError):
        eval_poly(Polynomial.parse(CONE), (1, 0))
    with pytest.raises(PolynomialError):
        eval_many(Polynomial.parse(CONE), np.zeros((2, 4)))


def test_jacobian_examples():
    lin = Ideal.parse(["z1", "z2"], 4)
    np.testing.assert_array_equal(jacobian(lin, (0.3, 1, 2j, 0)), [[1, 0, 0, 0], [0, 1, 0, 0]])

    prod = Ideal.parse(PRODUCT)
    a, b = 0.6, -0.2 + 0.5j
    J = jacobian(prod, (0, 0, a, b))
    np.testing.assert_allclose(J, [[a, 0, 0, 0], [b, 0, 0, 0], [0, a, 0, 0], [0, b, 0, 0]])
    assert np.linalg.matrix_rank(J) == 2

    z = np.array([1, 1j, 0]) / np.sqrt(2)
    J = jacobian(Ideal.parse([CONE]), z)
    np.testing.assert_allclose(J, [[np.sqrt(2), np.sqrt(2) * 1j, 0]])
    assert np.linalg.matrix_rank(J) == 1


def test_batched_jacobian_matches_pointwise(rng):
    I = Ideal.parse([BRIESKORN, "z1*z5 - 2*z3"])
    pts = rng.standard_normal((6, 5)) + 1j * rng.standard_normal((6, 5))
    Jb = I.jacobians(pts)
    for q in range(6):
        np.testing.assert_allclose(Jb[q], jacobian(I, pts[q]), rtol=1e-13, atol=1e-13)


def test_homogeneous_parts_examples():
    assert homogeneous_parts(Polynomial.parse("1 + z1")) == {
        0: Polynomial.parse("1", 1),
        1: Polynomial.parse("z1"),
    }
    p = Polynomial.parse(CONE)
    assert homogeneous_parts(p) == {2: p}
    b = Polynomial.parse(BRIESKORN)
    parts = homogeneous_parts(b)
    assert parts == {
        2: Polynomial.parse("z1^2 + z2^2 + z3^2", 5),
        3: Polynomial.parse("z4^3", 5),
        5: Polynomial.parse("z5^5", 5),
    }


def test_graded_lex_order():
    assert monomials_of_degree(2, 2) == [(2, 0), (1, 1), (0, 2)]
    basis = graded_monomials(3, 3)
    assert len(basis) == 20
    assert [sum(a) for a in basis] == sorted(sum(a) for a in basis)


def test_no_zero_coefficients_stored():
    p = Polynomial.parse("z1 + z2") - Polynomial.parse("z1", 2)
    assert p.terms == {(0, 1): 1.0}
    assert (p - p).is_zero()


def test_ideal_bookkeeping():
    I = Ideal.parse(PRODUCT)
    assert (I.m, I.M, I.k, I.degrees, I.homogeneous) == (4, 4, 0, (2, 2, 2, 2), True)
    assert not Ideal.parse(["z1 - 2"], 3).homogeneous
    with pytest.raises(PolynomialError):
        Ideal(())
    with pytest.raises(PolynomialError):
        Ideal((Polynomial.parse("z1", 1), Polynomial.parse("z2")))


def test_imaginary_literals():
    p = Polynomial.parse("3*z1^2*z3 - (0+1i)*z2")
    assert p.terms == {(2, 0, 1): 3, (0, 1, 0): -1j}
    assert Polynomial.parse("i*z1") == Polynomial.parse("1i*z1")


@settings(max_examples=60, deadline=None)
@given(polys, polys, points, coef)
def test_eval_linear_and_multiplicative(p, q, z, c):
    pz, qz = eval_poly(p, z), eval_poly(q, z)
    scale = 1 + abs(pz) + abs(qz)
    assert abs(eval_poly(p + q * c, z) - (pz + c * qz)) <= 1e-12 * scale * (1 + abs(c))
    assert abs(eval_poly(p * q, z) - pz * qz) <= 1e-12 * (1 + abs(pz)) * (1 + abs(qz)) * 10


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.sampled_from(monomials_of_degree(M, 3)), coef, min_size=1, max_size=6), points)
def test_euler_identity(terms, z):
    p = Polynomial(terms, M)
    if p.is_zero():
        return
    J = jacobian(Ideal((p,)), z)[0]
    lhs = np.dot(z, J)
    rhs = 3 * eval_poly(p, z)
    assert abs(lhs - rhs) <= 1e-12 * (1 + sum(abs(c) for c in p.terms.values()) * 10)


@settings(max_examples=80, deadline=None)
@given(polys)
def test_parser_round_trip(p):
    assert Polynomial.parse(str(p), M) == p


@settings(max_examples=40, deadline=None)
@given(polys)
def test_homogeneous_parts_reassemble(p):
    total = Polynomial.zero(M)
    for n, part in homogeneous_parts(p).items():
        assert part.is_homogeneous() and part.degree == n
        total = total + part
    assert total == p


@settings(max_examples=30, deadline=None)
@given(polys, st.lists(points, min_size=1, max_size=4))
def test_batch_eval_matches_exact(p, pts):
    pts = np.array(pts)
    exact = np.array([eval_poly(p, z) for z in pts])
    np.testing.assert_allclose(eval_many(p, pts), exact, rtol=1e-12, atol=1e-12)
