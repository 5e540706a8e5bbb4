from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gaudin.diffops import DiffPolyOperator, ScalarDiffOp, diffop_coefficient, diffop_mul, scalar_diffop_mul
from gaudin.rational import ONE, ZERO, U, RationalFunction, rf_arith, rf_derivative

from conftest import rational_functions

D = ScalarDiffOp.d()


def pole(z, k=1):
    return RationalFunction.pole(z, k)


def test_rf_examples():
    assert rf_arith(pole(1), pole(-1), "add") == RationalFunction.from_poly([0, 2], [-1, 0, 1])
    assert rf_arith(pole(3), ZERO, "mul").is_zero()
    assert RationalFunction.from_poly([-1, 0, 1], [-1, 1]) == U + 1


def test_rf_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        rf_arith(U, ZERO, "div")


def test_rf_derivative_examples():
    assert rf_derivative(pole(Fraction(2, 3))) == -pole(Fraction(2, 3), 2)
    assert rf_derivative(RationalFunction.const(7)).is_zero()
    assert rf_derivative(U / (U - 1)) == -pole(1, 2)


@given(rational_functions())
def test_self_subtraction_and_monic(f):
    assert rf_arith(f, f, "sub").is_zero()
    assert f.den[-1] == 1


@given(rational_functions(), rational_functions(), rational_functions())
def test_field_axioms(f, g, h):
    assert (f + g) * h == f * h + g * h
    assert (f * g) * h == f * (g * h)
    if not g.is_zero():
        assert (f / g) * g == f
    for r in (f + g, f * g, f - h):
        assert r.den[-1] == 1


@given(rational_functions(), rational_functions())
def test_derivative_rules(f, g):
    assert (f * g).derivative() == f.derivative() * g + f * g.derivative()
    assert (f + g).derivative() == f.derivative() + g.derivative()


def test_leibniz_examples():
    f = pole(5)
    assert D * ScalarDiffOp({0: f}) == ScalarDiffOp({1: f, 0: -pole(5, 2)})
    assert scalar_diffop_mul(D, D) == ScalarDiffOp.d(2)


@given(rational_functions(), rational_functions())
def test_first_order_products(f, g):
    prod = ScalarDiffOp.first_order(f) * ScalarDiffOp.first_order(g)
    assert prod == ScalarDiffOp({2: ONE, 1: f + g, 0: g.derivative() + f * g})
    assert diffop_coefficient(prod, 0) == g.derivative() + f * g
    minus = ScalarDiffOp.first_order(-f) * ScalarDiffOp.first_order(f)
    assert minus == ScalarDiffOp({2: ONE, 0: f.derivative() - f * f})


@given(rational_functions())
def test_commutator_with_function(f):
    F = ScalarDiffOp({0: f})
    assert D * F - ScalarDiffOp({1: f}) == ScalarDiffOp({0: f.derivative()})


def test_coefficient_examples():
    op = ScalarDiffOp({2: ONE, 1: RationalFunction.const(3), 0: U})
    assert diffop_coefficient(op, 1) == RationalFunction.const(3)
    assert diffop_coefficient(ScalarDiffOp.d(2), 0).is_zero()


@st.composite
def small_ops(draw):
    coeffs = {}
    for k in range(draw(st.integers(0, 2)) + 1):
        coeffs[k] = draw(rational_functions(1))
    return ScalarDiffOp(coeffs)


@settings(max_examples=40)
@given(small_ops(), small_ops(), small_ops())
def test_scalar_associativity(a, b, c):
    assert (a * b) * c == a * (b * c)


@st.composite
def word_ops(draw):
    letters = [((1, 2), 1), ((2, 1), 2), ((1, 1), 1)]
    out = DiffPolyOperator({}, 2)
    for _ in range(draw(st.integers(1, 3))):
        k = draw(st.integers(0, 2))
        coeff = draw(rational_functions(1))
        op = DiffPolyOperator.scalar(coeff, 2) * DiffPolyOperator.d(k, sites=2) if k else DiffPolyOperator.scalar(coeff, 2)
        if draw(st.booleans()):
            b, s = draw(st.sampled_from(letters))
            op = DiffPolyOperator.letter(b, s, sites=2) * op
        out = out + op
    return out


@settings(max_examples=40)
@given(word_ops(), word_ops(), word_ops())
def test_word_associativity(a, b, c):
    assert diffop_mul(diffop_mul(a, b), c) == diffop_mul(a, diffop_mul(b, c))


def test_words_concatenate_without_reordering():
    a = DiffPolyOperator.letter((1, 2), 1, RationalFunction.const(2))
    b = DiffPolyOperator.letter((2, 1), 1, RationalFunction.const(3))
    ab = (a * b).terms()
    assert ab == {((((1, 2), 1), ((2, 1), 1)), 0): RationalFunction.const(6)}


def test_site_mismatch():
    with pytest.raises(ValueError):
        DiffPolyOperator.d(sites=2) * DiffPolyOperator.d(sites=3)


@given(word_ops())
def test_normal_order_idempotent(a):
    again = DiffPolyOperator.from_terms(a.terms(), a.sites)
    assert again == a
    assert DiffPolyOperator.scalar(ONE, 2) * a == a
