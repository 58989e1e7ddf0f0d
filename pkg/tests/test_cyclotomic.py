import cmath
from fractions import Fraction

import pytest

from pseudocurve.cyclotomic import (CyclotomicField, CycElem,
                                    cyclotomic_polynomial)
from pseudocurve.exact import QQi, qqi
from pseudocurve.series import TruncatedSeries, ps_compose, ps_mul
from oracles import rng_for


def test_cyclotomic_polynomials_against_sympy():
    sympy = pytest.importorskip("sympy")
    x = sympy.Symbol("x")
    for m in list(range(1, 31)) + [36, 60, 105]:
        expect = sympy.Poly(sympy.cyclotomic_poly(m, x), x).all_coeffs()
        got = list(reversed([int(c) for c in cyclotomic_polynomial(m)]))
        assert got == expect, m


def test_cyclotomic_polynomial_frozen_small():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(8) == (1, 0, 0, 0, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)


def test_zeta_is_primitive():
    for m in (4, 8, 12, 20, 24):
        F = CyclotomicField(m)
        z = F.zeta()
        p = F.one()
        for k in range(1, m):
            p = p * z
            assert p != F.one(), (m, k)
        assert p * z == F.one()


def test_minimal_polynomial_annihilates():
    for m in (4, 12, 16, 24):
        F = CyclotomicField(m)
        z = F.zeta()
        acc = F.zero()
        for c in reversed(F.modulus):
            acc = acc * z + F.from_rational(c)
        assert not acc


def test_field_axioms_and_inverse_randomized():
    rng = rng_for("cyclotomic-inverse")
    for m in (4, 12, 20, 24):
        F = CyclotomicField(m)
        for _ in range(10):
            a = F.element([Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                           for _ in range(F.degree)])
            b = F.element([rng.randint(-2, 2) for _ in range(F.degree)])
            assert (a + b) * (a + b) == a * a + a * b * 2 + b * b
            if a:
                assert a * a.inverse() == F.one()
                assert (F.one() / a) * a == F.one()
    with pytest.raises(ZeroDivisionError):
        CyclotomicField(12).zero().inverse()


def test_embedding_matches_complex_evaluation():
    rng = rng_for("cyclotomic-embed")
    for m in (4, 12, 24):
        F = CyclotomicField(m)
        for _ in range(10):
            a = F.element([rng.randint(-3, 3) for _ in range(F.degree)])
            b = F.element([rng.randint(-3, 3) for _ in range(F.degree)])
            lhs = (a * b).to_complex()
            rhs = a.to_complex() * b.to_complex()
            assert abs(lhs - rhs) < 1e-9
        z = F.zeta().to_complex()
        assert abs(z - cmath.exp(2j * cmath.pi / m)) < 1e-12


def test_imaginary_unit_and_conjugation():
    F = CyclotomicField(12)
    i = F.imaginary_unit()
    assert i * i == F.from_rational(-1)
    assert i.conj() == -i
    z = F.zeta()
    assert z * z.conj() == F.one()
    w = F.from_qqi(qqi(Fraction(2, 3), Fraction(-1, 5)))
    assert abs(w.to_complex() - complex(2 / 3, -1 / 5)) < 1e-12
    assert w.conj().conj() == w
    with pytest.raises(ValueError):
        CyclotomicField(6).imaginary_unit()


def test_unit_root_orders():
    F = CyclotomicField(24)
    eta = F.unit_root(6)
    acc = F.one()
    for _ in range(6):
        acc = acc * eta
    assert acc == F.one()
    assert eta ** 3 == F.from_rational(-1)
    with pytest.raises(ValueError):
        F.unit_root(5)


def test_resonance_denominators_nonzero():
    # eta - eta^k is invertible exactly when k != 1 (mod d): the divisions
    # performed by the symmetrizer never hit zero off the excluded residues
    import math
    for d in (2, 3, 4, 6, 8, 12):
        F = CyclotomicField(math.lcm(4, d))
        eta = F.unit_root(d)
        for k in range(2, 3 * d + 2):
            delta = eta - eta ** k
            if k % d == 1:
                assert not delta
            else:
                assert delta
                assert delta * delta.inverse() == F.one()


def test_rational_part():
    F = CyclotomicField(8)
    assert F.from_rational(Fraction(7, 3)).rational_part() == Fraction(7, 3)
    assert F.zeta().rational_part() is None


def test_series_over_cyclotomic_field():
    F = CyclotomicField(12)
    eta = F.unit_root(3)
    one = F.one()
    f = TruncatedSeries({1: one, 2: eta}, 5)
    g = TruncatedSeries({1: eta}, 5)
    # f(g) = eta z + eta^3 z^2 = eta z + z^2
    comp = ps_compose(f, g)
    assert comp.coefficient(1) == eta
    assert comp.coefficient(2) == one
    sq = ps_mul(g, g)
    assert sq.coefficient(2) == eta * eta
    mixed = f.scale(QQi(2))  # QQi scalars embed on contact
    assert mixed.coefficient(2) == eta * 2
