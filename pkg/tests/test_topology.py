import itertools

import pytest
from hypothesis import given
from posets import POINT, SIERPINSKI, V, posets

from stonezr.lattice import image_factor, LatticeHom, spec
from stonezr.topology import (
    FilterLatticeDescriptor,
    FinitePoset,
    SizeLimitError,
    SpaceMap,
    all_filters,
    all_maps,
    closure,
    coproduct,
    enumerate_posets,
    identity_map,
    image_poset,
    is_dominant,
    is_epic_space,
    is_monic_space,
    is_surjective_space,
    isomorphism,
    patch,
    posets_up_to,
    spec_boolean,
    ultrafilters,
)

SMALL = posets_up_to(4)


def test_poset_counts_match_known_sequence():
    # unlabeled posets on n points: 1, 1, 2, 5, 16, 63
    assert [len(enumerate_posets(n)) for n in range(6)] == [1, 1, 2, 5, 16, 63]


def test_enumeration_is_up_to_isomorphism():
    ps = enumerate_posets(4)
    for p, q in itertools.combinations(ps, 2):
        assert isomorphism(p, q) is None


def test_orientation_closed_sets_are_down_closed():
    assert SIERPINSKI.leq("c", "g")
    assert closure(SIERPINSKI, ["g"]) == {"c", "g"}
    assert closure(SIERPINSKI, ["c"]) == {"c"}


def test_antisymmetry_enforced():
    with pytest.raises(ValueError):
        FinitePoset.from_relations(["a", "b"], [("a", "b"), ("b", "a")])


def test_closure_examples():
    assert closure(V, []) == set()
    assert closure(V, ["g"]) == {"x", "y", "g"}


def test_closure_of_image_is_specialization_closure():
    for p, q in itertools.product(SMALL, repeat=2):
        for f in all_maps(p, q):
            img = {q.points[i] for i in f.images}
            brute = {y for y in q.points if any(q.leq(y, z) for z in img)}
            assert closure(q, img) == brute


def test_dominance_examples():
    assert is_dominant(identity_map(V))
    closed_pt = SpaceMap.from_dict(POINT, SIERPINSKI, {"p": "c"})
    generic_pt = SpaceMap.from_dict(POINT, SIERPINSKI, {"p": "g"})
    assert not is_dominant(closed_pt)
    assert is_dominant(generic_pt)
    assert "g" in {SIERPINSKI.points[i] for i in generic_pt.images}


def test_dominant_maps_hit_every_maximal_point():
    for p, q in itertools.product(SMALL, repeat=2):
        for f in all_maps(p, q):
            if is_dominant(f):
                assert q.maximal() & ~f.image_mask() == 0


def test_epic_monic_examples():
    ident = identity_map(V)
    assert is_epic_space(ident) and is_monic_space(ident)
    two = FinitePoset.discrete(("a", "b"))
    fold = SpaceMap.from_dict(two, POINT, {"a": "p", "b": "p"})
    assert is_epic_space(fold) and not is_monic_space(fold)


def test_epic_implies_surjective_exhaustively():
    bad = [
        f
        for p, q in itertools.product(SMALL, repeat=2)
        for f in all_maps(p, q)
        if is_epic_space(f) and not is_surjective_space(f)
    ]
    assert bad == []


def test_non_monotone_map_rejected():
    with pytest.raises(ValueError):
        SpaceMap.from_dict(SIERPINSKI, SIERPINSKI, {"c": "g", "g": "c"})


def test_image_poset_is_dual_of_image_factor_middle():
    for p, q in itertools.product(posets_up_to(3), repeat=2):
        for f in all_maps(p, q):
            middle = image_factor(LatticeHom.from_space_map(f)).middle
            assert isomorphism(spec(middle), image_poset(f)) is not None


def test_coproduct_and_patch():
    assert len(coproduct([SIERPINSKI, V])) == 5
    glued_nothing = patch(SIERPINSKI, SIERPINSKI, {})
    assert isomorphism(glued_nothing, coproduct([SIERPINSKI, SIERPINSKI])) is not None
    # two Sierpinski spaces sharing the generic point: the V
    shared = patch(SIERPINSKI, SIERPINSKI, {"g": "g"})
    assert len(shared) == 3
    assert isomorphism(shared, V) is not None


def test_patch_rejects_non_open_glue():
    with pytest.raises(ValueError):
        patch(SIERPINSKI, SIERPINSKI, {"c": "c"})


def test_ultrafilter_examples():
    assert len(ultrafilters(["a"])) == 1
    d = FilterLatticeDescriptor(("a", "b", "c"))
    assert set(ultrafilters(["a", "b", "c"])) == {d.principal(x) for x in "abc"}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_prime_filters_are_ultrafilters(n):
    s = tuple(f"s{i}" for i in range(n))
    d = FilterLatticeDescriptor(s)
    filters = all_filters(s)
    prime = {f for f in filters if d.is_prime_filter(f)}
    maximal = {f for f in filters if not any(f < g for g in filters)}
    assert prime == maximal == set(ultrafilters(s))
    assert len(prime) == n


def test_filter_enumeration_size_limit():
    with pytest.raises(SizeLimitError):
        all_filters(list("abcde"))


def test_spec_of_boolean_lattice_is_discrete():
    sp = spec_boolean(["a", "b", "c"])
    assert sp.relations() == []
    assert len(sp) == 3


@given(posets())
def test_canonical_form_is_relabeling_invariant(p):
    shuffled = p.relabel({x: f"q_{x}" for x in p.points})
    assert p.canonical_form() == shuffled.canonical_form()
    assert isomorphism(p, shuffled) is not None


@given(posets(), posets(max_points=3))
def test_coproduct_size_and_order(p, q):
    c = coproduct([p, q])
    assert len(c) == len(p) + len(q)
    assert len(c.relations()) == len(p.relations()) + len(q.relations())


def test_map_enumeration_size_limit():
    twelve = FinitePoset.discrete([f"p{i}" for i in range(12)])
    with pytest.raises(SizeLimitError):
        next(all_maps(twelve, twelve))
