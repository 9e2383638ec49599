import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from stonezr.field import (
    FieldElem,
    GlobalField,
    Place,
    enumerate_places,
    fresh_place,
    in_max_ideal,
    in_ring,
    is_irreducible,
    monic_irreducibles,
    parse_elem,
    parse_place,
    poles,
    poly_factors,
    random_elem,
    sum_over_places,
    uniformizer,
    valuation,
    zeros,
)

QQ = GlobalField.rationals()
F2 = GlobalField.function_field(2)
F3 = GlobalField.function_field(3)
F5 = GlobalField.function_field(5)
T = sympy.Symbol("t")


def q(text):
    return parse_elem(QQ, text)


def f2(text):
    return parse_elem(F2, text)


def rationals():
    return st.builds(
        lambda n, d: QQ.elem(Fraction(n, d)),
        st.integers(-500, 500).filter(bool),
        st.integers(1, 500),
    )


def function_elems(k):
    coeffs = st.lists(st.integers(0, k.q - 1), min_size=1, max_size=5)
    return st.builds(lambda n, d: k.from_polys(n, d), coeffs.filter(any), coeffs.filter(any))


def sympy_poly(coeffs, qq):
    return sympy.Poly(list(reversed(coeffs)), T, modulus=qq)


class TestArithmetic:
    def test_examples(self):
        assert q("1/2") + q("1/3") == q("5/6")
        assert f2("t+1") * f2("t+1") == f2("t^2+1")
        a = f2("(t^2+t+1)/t")
        assert a * a.inverse() == F2.one()

    def test_normal_form_is_unique(self):
        assert f2("t^2/(t^2+t)") == f2("t/(t+1)")
        assert parse_elem(F3, "2t/2") == parse_elem(F3, "t")

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            F2.one() / F2.zero()

    def test_non_prime_q_rejected(self):
        with pytest.raises(ValueError):
            GlobalField.function_field(4)

    @given(function_elems(F3), function_elems(F3), function_elems(F3))
    def test_field_laws(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert a - a == F3.zero()
        assert a * a.inverse() == F3.one()

    @given(function_elems(F5))
    def test_arithmetic_against_sympy(self, a):
        b = a * a + a
        num, den = sympy_poly(b.num, 5), sympy_poly(b.den, 5)
        an, ad = sympy_poly(a.num, 5), sympy_poly(a.den, 5)
        # b·den = (a² + a)·den, cleared of denominators
        assert num * ad * ad == den * (an * an + an * ad)


class TestValuations:
    def test_examples(self):
        assert valuation(Place.prime(2), q("3/4")) == -2
        assert valuation(Place.inf(), f2("(t^2+1)/t^3")) == 1
        assert valuation(parse_place(F2, "t"), f2("t^2/(t+1)")) == 2

    def test_rings(self):
        assert in_ring(Place.prime(5), q("1/6"))
        assert in_max_ideal(parse_place(F2, "t"), f2("t"))
        assert all(in_ring(Place.trivial(), a) for a in (q("1/6"), q("7"), q("-2/9")))

    def test_zero_has_no_valuation(self):
        with pytest.raises(ValueError):
            valuation(Place.prime(2), QQ.zero())

    @given(rationals(), rationals())
    def test_valuation_laws_over_q(self, a, b):
        for v in enumerate_places(QQ, 13, include_trivial=False):
            assert valuation(v, a * b) == valuation(v, a) + valuation(v, b)
            if not (a + b).is_zero():
                assert valuation(v, a + b) >= min(valuation(v, a), valuation(v, b))

    @given(rationals())
    def test_p_adic_valuation_against_sympy(self, a):
        fr = Fraction(a.num, a.den)
        for p in (2, 3, 5, 7):
            expected = sympy.multiplicity(p, abs(fr.numerator)) - sympy.multiplicity(p, fr.denominator)
            assert valuation(Place.prime(p), a) == expected

    @given(function_elems(F3), function_elems(F3))
    def test_valuation_laws_over_f3(self, a, b):
        for v in enumerate_places(F3, 2, include_trivial=False):
            assert valuation(v, a * b) == valuation(v, a) + valuation(v, b)
            if not (a + b).is_zero():
                assert valuation(v, a + b) >= min(valuation(v, a), valuation(v, b))

    def test_product_formula(self):
        rng = random.Random(7)
        for k in (F2, F3):
            for _ in range(100):
                assert sum_over_places(random_elem(k, rng, 4)) == 0

    def test_uniformizers(self):
        for k, bound in ((QQ, 20), (F2, 3)):
            for v in enumerate_places(k, bound, include_trivial=False):
                assert valuation(v, uniformizer(k, v)) == 1


class TestPoles:
    def test_examples(self):
        assert poles([q("1/6")]) == {Place.prime(2), Place.prime(3)}
        assert poles([f2("t")]) == {Place.inf()}
        assert poles([f2("t"), f2("1/(t+1)")]) == {Place.inf(), parse_place(F2, "t+1")}

    @given(function_elems(F2))
    def test_poles_are_where_membership_fails(self, a):
        places = enumerate_places(F2, 5, include_trivial=False)
        # every pole of a degree-4 fraction has degree at most 4
        assert poles([a]) == {v for v in places if not in_ring(v, a)}

    @given(rationals())
    def test_zeros_are_poles_of_inverse(self, a):
        assert zeros(a) == poles([a.inverse()])


class TestPlaces:
    def test_examples(self):
        labels = [v.label() for v in enumerate_places(QQ, 10)]
        assert labels == ["2", "3", "5", "7", "trivial"]
        labels = [v.label() for v in enumerate_places(F2, 2)]
        assert labels == ["t", "t+1", "inf", "t^2+t+1", "trivial"]

    @pytest.mark.parametrize("qq,d", [(2, 3), (2, 4), (3, 2), (3, 3), (5, 2)])
    def test_irreducible_count_matches_necklace_formula(self, qq, d):
        necklace = sum(sympy.mobius(d // e) * qq**e for e in sympy.divisors(d)) // d
        assert len(monic_irreducibles(qq, d)) == necklace

    @pytest.mark.parametrize("qq,d", [(2, 4), (3, 3)])
    def test_irreducibility_against_sympy(self, qq, d):
        irreducible = set(monic_irreducibles(qq, d))
        for pi in irreducible:
            assert sympy_poly(pi, qq).is_irreducible
            assert is_irreducible(pi, qq)

    @given(st.lists(st.integers(0, 2), min_size=2, max_size=6).filter(lambda c: c[-1] != 0))
    def test_factors_against_sympy(self, coeffs):
        ours = {tuple(f) for f in poly_factors(tuple(coeffs), 3)}
        _, factors = sympy_poly(coeffs, 3).factor_list()
        theirs = set()
        for f, _ in factors:
            cs = [int(c) % 3 for c in reversed(f.all_coeffs())]
            lead = cs[-1]
            inv = pow(lead, -1, 3)
            theirs.add(tuple((c * inv) % 3 for c in cs))
        assert ours == theirs

    def test_fresh_place_avoids_data(self):
        taken = enumerate_places(QQ, 30, include_trivial=False)
        v = fresh_place(QQ, taken)
        assert v not in taken and not v.is_trivial

    def test_place_validation(self):
        with pytest.raises(ValueError):
            parse_place(QQ, "4")
        with pytest.raises(ValueError):
            Place.poly([1, 0, 1], 2)  # (t+1)^2 is reducible


class TestParsing:
    @given(function_elems(F3))
    def test_roundtrip_f3(self, a):
        assert parse_elem(F3, str(a)) == a

    @given(rationals())
    def test_roundtrip_q(self, a):
        assert parse_elem(QQ, str(a)) == a

    def test_implicit_multiplication(self):
        assert f2("t(t+1)") == f2("t^2+t")

    @pytest.mark.parametrize("bad", ["", "1/", "t^", "(t+1", "x"])
    def test_malformed(self, bad):
        with pytest.raises(ValueError):
            parse_elem(F2, bad)

    def test_random_elements_are_nonzero(self):
        rng = random.Random(0)
        assert all(isinstance(random_elem(F2, rng), FieldElem) and not random_elem(F2, rng).is_zero() for _ in range(50))


def test_valuation_rings_of_q_are_maximal():
    # no pair of places gives nested rings on the sample: each Z_(p) is maximal
    rng = random.Random(3)
    sample = [random_elem(QQ, rng, 40) for _ in range(200)]
    places = enumerate_places(QQ, 30, include_trivial=False)
    for v in places:
        for w in places:
            if v != w:
                assert any(in_ring(v, a) and not in_ring(w, a) for a in sample)
