import json
import random

import pytest
from posets import POINT, SIERPINSKI, V, posets
from hypothesis import given

from stonezr import catalog
from stonezr import serialize as S
from stonezr.catalog import F2T, QQ
from stonezr.dot import export_dot
from stonezr.field import enumerate_places, random_elem
from stonezr.lattice import lattice_from_poset
from stonezr.model import model_isomorphism
from stonezr.zr import random_zr_elem, zr_space


def roundtrip(obj):
    return json.loads(S.dumps(obj))


@pytest.mark.parametrize("name", catalog.all_names())
def test_catalog_models_roundtrip(name):
    m = catalog.load(name)
    assert S.model_from_json(roundtrip(S.model_to_json(m))) == m


@pytest.mark.parametrize("name", catalog.catalog_names())
def test_catalog_homs_roundtrip(name):
    f = catalog.scenario(name)
    assert S.hom_from_json(roundtrip(S.hom_to_json(f))).same_as(f)


@given(posets())
def test_posets_roundtrip(p):
    assert S.poset_from_json(roundtrip(S.poset_to_json(p))) == p


def test_field_elements_and_places_roundtrip():
    rng = random.Random(4)
    for k in (QQ, F2T):
        for _ in range(50):
            a = random_elem(k, rng, 4)
            assert S.elem_from_json(k, roundtrip(S.elem_to_json(a))) == a
        for v in enumerate_places(k, 3):
            assert S.place_from_json(k, roundtrip(S.place_to_json(v))) == v


@pytest.mark.parametrize("name", ["specz", "a1fq", "doubled-line", "specfq-point"])
def test_zr_elements_roundtrip(name):
    m = catalog.load(name)
    rng = random.Random(9)
    for _ in range(30):
        a = random_zr_elem(m, rng)
        assert S.zr_elem_from_json(m, roundtrip(S.zr_elem_to_json(a))) == a


def test_lenient_words():
    m = catalog.load("specz")
    a = S.zr_elem_from_json(m, S.loads_lenient('[[empty,["2"]], [whole, ["1/3"]]]'))
    assert len(a.terms) == 2


def test_dumps_is_stable():
    m = catalog.load("semilocal")
    assert S.dumps(S.model_to_json(m)) == S.dumps(S.model_to_json(catalog.load("semilocal")))


@pytest.mark.parametrize(
    "text,where",
    [
        ('{"field": {"kind": "Q"}, "closed": {"mode": "list", "points": [{"id": "a", "place": 4}]}}', "$.closed.points[0].place"),
        ('{"field": {"kind": "Fq", "q": 4}, "mode": "constant"}', "$.field"),
        ('{"field": {"kind": "Q"}, "closed": {"mode": "sideways"}}', "$.closed.mode"),
        ('{"closed": {"mode": "list"}}', "$"),
    ],
)
def test_model_errors_name_the_path(text, where):
    with pytest.raises(S.SerializationError) as info:
        S.model_from_json(json.loads(text))
    assert info.value.path.startswith(where)


def test_zr_element_errors():
    m = catalog.load("specz")
    with pytest.raises(S.SerializationError):
        S.zr_elem_from_json(m, [["empty", []]])
    with pytest.raises(S.SerializationError):
        S.zr_elem_from_json(m, [[["4"], ["2"]]])
    with pytest.raises(S.SerializationError):
        S.zr_elem_from_json(m, {"terms": 3})


def nodes(dot):
    return [l for l in dot.splitlines() if l.strip().endswith(";") and "->" not in l and "rankdir" not in l]


def edges(dot):
    return [l for l in dot.splitlines() if "->" in l]


class TestDot:
    def test_one_point(self):
        dot = export_dot(POINT)
        assert len(nodes(dot)) == 1 and edges(dot) == []

    def test_sierpinski(self):
        dot = export_dot(SIERPINSKI)
        assert len(nodes(dot)) == 2
        assert edges(dot) == ['  "g" -> "c";']

    def test_lattice_hasse_diagram(self):
        dot = export_dot(lattice_from_poset(V))
        assert len(nodes(dot)) == 5 and len(edges(dot)) == 5

    def test_zr_space_of_the_point(self):
        dot = export_dot(zr_space(catalog.load("specfq-point")), bound=2)
        placed = [l for l in nodes(dot) if "label=" in l and "…" not in l]
        # four closed places of height at most two, and the generic point
        assert len(placed) == 5
        assert any("trivial" in l for l in placed)
        assert any("…" in l for l in nodes(dot))
        assert len(edges(dot)) == 4

    def test_finite_model_is_not_truncated(self):
        dot = export_dot(catalog.load("semilocal"))
        assert "…" not in dot

    def test_deterministic(self):
        m = catalog.load("doubled-line")
        assert export_dot(m) == export_dot(catalog.load("doubled-line"))

    def test_unknown_object(self):
        with pytest.raises(TypeError):
            export_dot(3)


def test_parsed_models_keep_their_isomorphism_class():
    for name in catalog.all_names():
        m = catalog.load(name)
        assert model_isomorphism(S.model_from_json(roundtrip(S.model_to_json(m))), m) is not None
