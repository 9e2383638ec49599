import itertools
from functools import lru_cache

import pytest
from hypothesis import given
from hypothesis import strategies as st
from posets import POINT, SIERPINSKI, V, posets

from stonezr.lattice import (
    Lattice,
    LatticeHom,
    OwnerMismatch,
    all_homs,
    birkhoff_map,
    classify_poly_primes,
    close,
    fiber_product,
    homs_by_search,
    image_factor,
    is_epic_cat,
    is_injective,
    is_lattice_iso,
    is_monic_cat,
    is_surjective,
    lattice_from_poset,
    localize,
    poly_prime_candidates,
    poly_t,
    primes_in_image,
    product,
    spec,
)
from stonezr.topology import (
    FinitePoset,
    SpaceMap,
    coproduct,
    identity_map,
    is_monic_space,
    is_surjective_space,
    isomorphism,
    posets_up_to,
)

SMALL = posets_up_to(4)


def all_small_homs(posets):
    for p, q in itertools.product(posets, repeat=2):
        yield from all_homs(lattice_from_poset(p), lattice_from_poset(q))


@lru_cache(maxsize=None)
def homs_up_to_four() -> tuple[LatticeHom, ...]:
    return tuple(all_small_homs(SMALL))


def order_embedding(f: SpaceMap) -> bool:
    src, tgt = f.source, f.target
    return all(
        src.leq(x, y) == tgt.leq(tgt.points[f.images[i]], tgt.points[f.images[j]])
        for i, x in enumerate(src.points)
        for j, y in enumerate(src.points)
    )


class TestConstruction:
    def test_sizes(self):
        assert len(lattice_from_poset(POINT)) == 2
        assert len(lattice_from_poset(SIERPINSKI)) == 3
        assert len(lattice_from_poset(V)) == 5

    def test_conventions(self):
        l = lattice_from_poset(V)
        assert l.zero.ids() == ["g", "x", "y"]
        assert l.one.ids() == []
        assert l.zero <= l.one
        x, y = l.elem(["x"]), l.elem(["y"])
        assert (x + y) == l.one
        assert (x * y).ids() == ["x", "y"]
        assert x + x == x
        assert l.zero * x == l.zero

    def test_elements_must_be_closed(self):
        with pytest.raises(ValueError):
            lattice_from_poset(V).elem(["g"])

    def test_owner_mismatch(self):
        a = lattice_from_poset(V).one
        b = lattice_from_poset(SIERPINSKI).one
        with pytest.raises(OwnerMismatch):
            a + b


@given(posets(), st.data())
def test_semiring_laws(p, data):
    l = lattice_from_poset(p)
    elems = list(l)
    a, b, c = (data.draw(st.sampled_from(elems)) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a and a * b == b * a
    assert a + a == a
    assert (a + b) * c == a * c + b * c
    assert l.zero * a == l.zero
    assert l.one + a == l.one
    assert (a <= b) == (a + b == b)


class TestSpec:
    def test_examples(self):
        assert len(spec(lattice_from_poset(POINT))) == 1
        three_chain = lattice_from_poset(SIERPINSKI)
        assert isomorphism(spec(three_chain), SIERPINSKI) is not None
        assert isomorphism(spec(lattice_from_poset(V)), V) is not None

    @given(posets())
    def test_roundtrip(self, p):
        l = lattice_from_poset(p)
        assert isomorphism(spec(l), p) is not None
        l2 = lattice_from_poset(spec(l))
        assert is_lattice_iso(l, l2, birkhoff_map(l))


class TestHoms:
    def test_injective_surjective_examples(self):
        ident = LatticeHom.identity(lattice_from_poset(V))
        assert is_injective(ident) and is_surjective(ident)
        incl = LatticeHom.from_space_map(SpaceMap.from_dict(POINT, SIERPINSKI, {"p": "c"}))
        assert is_surjective(incl) and not is_injective(incl)
        proj = LatticeHom.from_space_map(SpaceMap.from_dict(SIERPINSKI, POINT, {"c": "p", "g": "p"}))
        assert is_injective(proj) and not is_surjective(proj)

    def test_enumeration_agrees_with_search(self):
        for p, q in itertools.product(posets_up_to(3), repeat=2):
            a, b = lattice_from_poset(p), lattice_from_poset(q)
            if len(b) ** len(a) <= 100_000:
                assert set(all_homs(a, b)) == set(homs_by_search(a, b))

    def test_duality_of_maps_and_homs(self):
        for p, q in itertools.product(posets_up_to(3), repeat=2):
            for h in all_homs(lattice_from_poset(p), lattice_from_poset(q)):
                assert LatticeHom.from_space_map(h.dual()) == h

    def test_monic_epic_identity(self):
        ident = LatticeHom.identity(lattice_from_poset(V))
        assert is_monic_cat(ident) and is_epic_cat(ident)

    def test_categorical_monic_and_epic_exhaustively(self):
        # monic ⇔ injective; epic ⇔ the dual point map is injective
        for h in homs_up_to_four():
            assert is_monic_cat(h, 4) == is_injective(h)
            assert is_epic_cat(h, 4) == is_monic_space(h.dual())

    def test_epic_is_not_injectivity(self):
        # the fold of two points onto one: dual injective on points fails,
        # yet C(point) -> C(two points) is injective and not epic
        two = FinitePoset.discrete(("a", "b"))
        h = LatticeHom.from_space_map(SpaceMap.from_dict(two, POINT, {"a": "p", "b": "p"}))
        assert is_injective(h)
        assert not is_epic_cat(h, 3)
        mismatches = [h for h in all_small_homs(posets_up_to(3)) if is_epic_cat(h, 3) != is_injective(h)]
        assert mismatches

    def test_epic_does_not_force_surjective_dual(self):
        # closed point into Sierpinski: dual injective (so epic) but not surjective
        h = LatticeHom.from_space_map(SpaceMap.from_dict(POINT, SIERPINSKI, {"p": "c"}))
        assert is_epic_cat(h, 3)
        assert not is_surjective_space(h.dual())

    def test_injective_hom_has_surjective_dual(self):
        for h in homs_up_to_four():
            if is_injective(h):
                assert is_surjective_space(h.dual())


class TestPrimesInImage:
    def test_examples(self):
        assert primes_in_image(LatticeHom.identity(lattice_from_poset(V)))
        two = FinitePoset.discrete(("a", "b"))
        fold = LatticeHom.from_space_map(SpaceMap.from_dict(two, POINT, {"a": "p", "b": "p"}))
        assert not primes_in_image(fold)
        open_incl = LatticeHom.from_space_map(SpaceMap.from_dict(POINT, SIERPINSKI, {"p": "g"}))
        assert primes_in_image(open_incl)

    def test_equivalent_to_order_embedding(self):
        for h in homs_up_to_four():
            assert primes_in_image(h) == order_embedding(h.dual())

    def test_injective_dual_is_not_enough(self):
        two = FinitePoset.discrete(("a", "b"))
        bij = SpaceMap.from_dict(two, SIERPINSKI, {"a": "c", "b": "g"})
        assert is_monic_space(bij)
        assert not primes_in_image(LatticeHom.from_space_map(bij))


class TestLocalizeClose:
    def test_localize(self):
        l = lattice_from_poset(V)
        assert localize(l, l.zero)[0].degenerate
        assert len(localize(l, l.one)[0]) == len(l)
        sub, h = localize(l, l.elem(["x"]))
        assert isomorphism(sub.base_poset, SIERPINSKI) is not None
        assert h(l.elem(["x"])) == sub.one
        assert h.is_valid()

    def test_close(self):
        l = lattice_from_poset(V)
        assert close(l, l.one)[0].degenerate
        assert len(close(l, l.zero)[0]) == len(l)
        sub, h = close(l, l.elem(["x", "y"]))
        assert sub.base_poset.relations() == [] and len(sub.base_poset) == 2
        assert h.is_valid() and is_surjective(h)


class TestProducts:
    def test_two_points(self):
        one = lattice_from_poset(POINT)
        sp = spec(product(one, one))
        assert len(sp) == 2 and sp.relations() == []

    def test_spec_of_product_is_coproduct(self):
        for p, q in itertools.product(posets_up_to(3), repeat=2):
            sp = spec(product(lattice_from_poset(p), lattice_from_poset(q)))
            assert isomorphism(sp, coproduct([p, q])) is not None

    def test_fiber_over_degenerate_target_is_product(self):
        a, b = lattice_from_poset(SIERPINSKI), lattice_from_poset(V)
        deg = localize(a, a.zero)[0]
        (h1,), (h2,) = all_homs(a, deg), all_homs(b, deg)
        fp, abstract = fiber_product(h1, h2)
        assert len(abstract) == len(a) * len(b)
        assert isomorphism(spec(fp), coproduct([SIERPINSKI, V])) is not None

    def test_two_chains_over_the_open_point(self):
        c = lattice_from_poset(SIERPINSKI)
        _, h = localize(c, c.elem(["c"]))
        fp, _ = fiber_product(h, h)
        assert isomorphism(spec(fp), V) is not None


class TestPolyT:
    def test_f1(self):
        f1 = lattice_from_poset(POINT)
        a = poly_t(f1)
        assert len(a) == 3
        assert isomorphism(a.spec(), SIERPINSKI) is not None

    def test_size_and_classification(self):
        for p in posets_up_to(3):
            l = lattice_from_poset(p)
            a = poly_t(l)
            assert len(a) == sum(1 for x in l for y in l if x <= y)
            brute = {(x.points, y.points) for x, y in a.prime_elements()}
            assert brute == {(x.points, y.points) for x, y in classify_poly_primes(l)}

    def test_shape_list_overcounts(self):
        l = lattice_from_poset(SIERPINSKI)
        primes = {(x.points, y.points) for x, y in poly_t(l).prime_elements()}
        shapes = {(x.points, y.points) for x, y in poly_prime_candidates(l)}
        assert primes < shapes


class TestImageFactor:
    def test_identity(self):
        l = lattice_from_poset(V)
        fac = image_factor(LatticeHom.identity(l))
        assert len(fac.middle) == len(l)

    def test_generic_point_of_sierpinski(self):
        h = LatticeHom.from_space_map(SpaceMap.from_dict(POINT, SIERPINSKI, {"p": "g"}))
        fac = image_factor(h)
        assert len(fac.middle) == 2
        assert len(spec(fac.middle)) == 1

    def test_recomposition(self):
        for h in all_small_homs(posets_up_to(3)):
            fac = image_factor(h)
            assert fac.surjection.compose(fac.injection) == h or fac.injection.compose(fac.surjection) == h
            assert is_surjective(fac.surjection) and is_injective(fac.injection)
            assert is_surjective_space(fac.injection.dual())
