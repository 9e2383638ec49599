"""JSON encodings of posets, field data, models, homs and M^S elements."""

from __future__ import annotations

import json
import re
from typing import Any

from .field import FieldElem, GlobalField, Place, check_place, parse_elem, parse_place, ptrim
from .lattice import Lattice, LatticeElem
from .model import ALL_EXCEPT, LIST, ClosedSet, DedekindModel, ModelError, ModelHom
from .topology import FinitePoset
from .zr import ZRElem, ZRTerm


class SerializationError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SerializationError(path, message)


def _get(obj: Any, key: str, path: str) -> Any:
    _expect(isinstance(obj, dict), path, "expected an object")
    _expect(key in obj, path, f"missing key {key!r}")
    return obj[key]


# posets and lattice elements ------------------------------------------------------


def poset_to_json(p: FinitePoset) -> dict:
    return {"points": [{"id": x} for x in p.points], "specializes": [list(r) for r in p.relations()]}


def poset_from_json(obj: Any, path: str = "$") -> FinitePoset:
    pts = _get(obj, "points", path)
    _expect(isinstance(pts, list), f"{path}.points", "expected an array")
    ids = []
    for i, p in enumerate(pts):
        pid = _get(p, "id", f"{path}.points[{i}]")
        _expect(isinstance(pid, str), f"{path}.points[{i}].id", "expected a string")
        ids.append(pid)
    rels = obj.get("specializes", [])
    _expect(isinstance(rels, list), f"{path}.specializes", "expected an array")
    pairs = []
    for i, r in enumerate(rels):
        _expect(isinstance(r, list) and len(r) == 2, f"{path}.specializes[{i}]", "expected [idA, idB]")
        pairs.append((r[0], r[1]))
    try:
        return FinitePoset.from_relations(ids, pairs)
    except ValueError as exc:
        raise SerializationError(path, str(exc)) from exc


def lattice_elem_to_json(a: LatticeElem) -> list[str]:
    return a.ids()


def lattice_elem_from_json(l: Lattice, obj: Any, path: str = "$") -> LatticeElem:
    _expect(isinstance(obj, list), path, "expected an array of point ids")
    try:
        return l.elem(obj)
    except (KeyError, ValueError) as exc:
        raise SerializationError(path, str(exc)) from exc


# fields --------------------------------------------------------------------------


def field_to_json(k: GlobalField) -> dict:
    if k.is_rational:
        return {"kind": "Q"}
    return {"kind": "Fq", "q": k.q, "var": k.var}


def field_from_json(obj: Any, path: str = "$") -> GlobalField:
    if obj == "Q":
        return GlobalField.rationals()
    kind = _get(obj, "kind", path)
    try:
        if kind == "Q":
            return GlobalField.rationals()
        if kind == "Fq":
            return GlobalField.function_field(_get(obj, "q", path), obj.get("var", "t"))
    except (TypeError, ValueError) as exc:
        raise SerializationError(path, str(exc)) from exc
    raise SerializationError(path, f"unknown field kind {kind!r}")


def elem_to_json(a: FieldElem) -> Any:
    if a.field.is_rational:
        return f"{a.num}/{a.den}"
    return {"q": a.field.q, "num": list(a.num), "den": list(a.den)}


def elem_from_json(k: GlobalField, obj: Any, path: str = "$") -> FieldElem:
    try:
        if isinstance(obj, bool):
            raise ValueError("booleans are not field elements")
        if isinstance(obj, int):
            return k.elem(obj)
        if isinstance(obj, str):
            return parse_elem(k, obj)
        if isinstance(obj, dict):
            _expect(not k.is_rational, path, "coefficient arrays need a function field")
            _expect(obj.get("q", k.q) == k.q, path, f"element over F_{obj.get('q')} in F_{k.q}(t)")
            num, den = _get(obj, "num", path), obj.get("den", [1])
            _expect(all(isinstance(c, int) for c in num + den), path, "coefficients must be integers")
            return k.from_polys(num, den)
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, SerializationError):
            raise
        raise SerializationError(path, str(exc)) from exc
    raise SerializationError(path, "expected a field element")


def place_to_json(v: Place) -> dict:
    if v.kind == "prime":
        return {"kind": "prime", "p": v.p}
    if v.kind == "poly":
        return {"kind": "poly", "pi": list(v.pi)}
    return {"kind": v.kind}


def place_from_json(k: GlobalField, obj: Any, path: str = "$") -> Place:
    try:
        if isinstance(obj, str):
            return parse_place(k, obj)
        kind = _get(obj, "kind", path)
        if kind == "prime":
            v = Place.prime(_get(obj, "p", path))
        elif kind == "poly":
            _expect(not k.is_rational, path, "poly places need a function field")
            v = Place.poly(ptrim(_get(obj, "pi", path), k.q), k.q)
        elif kind == "inf":
            v = Place.inf()
        elif kind == "trivial":
            v = Place.trivial()
        else:
            raise SerializationError(path, f"unknown place kind {kind!r}")
        return check_place(k, v)
    except SerializationError:
        raise
    except (TypeError, ValueError) as exc:
        raise SerializationError(path, str(exc)) from exc


# models ----------------------------------------------------------------------------


def model_to_json(m: DedekindModel) -> dict:
    out: dict[str, Any] = {"field": field_to_json(m.field), "generic": m.generic}
    if m.label:
        out["label"] = m.label
    if m.mode == ALL_EXCEPT:
        closed: dict[str, Any] = {
            "mode": "all_except",
            "exceptions": [place_to_json(v) for v in sorted(m.exceptions, key=Place.sort_key)],
        }
        if m.extra:
            closed["extra"] = [{"id": p, "place": place_to_json(v)} for p, v in m.extra]
    elif m.mode == LIST:
        closed = {"mode": "list", "points": [{"id": p, "place": place_to_json(v)} for p, v in m.points]}
    else:
        closed = {"mode": "constant"}
    out["closed"] = closed
    return out


def _placed_points(k: GlobalField, arr: Any, path: str) -> list[tuple[str, Place]]:
    _expect(isinstance(arr, list), path, "expected an array")
    out = []
    for i, item in enumerate(arr):
        pid = _get(item, "id", f"{path}[{i}]")
        _expect(isinstance(pid, str), f"{path}[{i}].id", "expected a string")
        out.append((pid, place_from_json(k, _get(item, "place", f"{path}[{i}]"), f"{path}[{i}].place")))
    return out


def model_from_json(obj: Any, path: str = "$") -> DedekindModel:
    k = field_from_json(_get(obj, "field", path), f"{path}.field")
    generic = obj.get("generic", "xi")
    label = obj.get("label", "")
    closed = _get(obj, "closed", path)
    mode = _get(closed, "mode", f"{path}.closed")
    try:
        if mode == "all_except":
            exc_arr = closed.get("exceptions", [])
            _expect(isinstance(exc_arr, list), f"{path}.closed.exceptions", "expected an array")
            exc = [place_from_json(k, v, f"{path}.closed.exceptions[{i}]") for i, v in enumerate(exc_arr)]
            extra = _placed_points(k, closed.get("extra", []), f"{path}.closed.extra")
            return DedekindModel.all_except(k, exc, extra, label=label, generic=generic)
        if mode == "list":
            pts = _placed_points(k, _get(closed, "points", f"{path}.closed"), f"{path}.closed.points")
            return DedekindModel.from_list(k, pts, label=label, generic=generic)
        if mode == "constant":
            return DedekindModel.constant_base(k, label=label, generic=obj.get("generic", "pt"))
    except ModelError as exc:
        raise SerializationError(f"{path}.closed", str(exc)) from exc
    raise SerializationError(f"{path}.closed.mode", f"unknown mode {mode!r}")


def hom_to_json(f: ModelHom) -> dict:
    return {"source": model_to_json(f.source), "target": model_to_json(f.target), "map": dict(f.mapping)}


def hom_from_json(obj: Any, path: str = "$") -> ModelHom:
    s = model_from_json(_get(obj, "source", path), f"{path}.source")
    t = model_from_json(_get(obj, "target", path), f"{path}.target")
    mapping = obj.get("map", {})
    _expect(isinstance(mapping, dict), f"{path}.map", "expected an object")
    return ModelHom.make(s, t, mapping)


# M^S --------------------------------------------------------------------------------


def closed_set_to_json(z: ClosedSet) -> dict:
    if z.is_whole:
        return {"kind": "whole"}
    return {"kind": "finite", "points": sorted(z.points)}


def closed_set_from_json(m: DedekindModel, obj: Any, path: str = "$") -> ClosedSet:
    if obj in ("whole", "Whole"):
        z = ClosedSet.whole()
    elif obj in ("empty", "one", "1"):
        z = ClosedSet.finite()
    elif isinstance(obj, list):
        z = ClosedSet.finite(obj)
    else:
        kind = _get(obj, "kind", path)
        if kind == "whole":
            z = ClosedSet.whole()
        elif kind == "finite":
            z = ClosedSet.finite(_get(obj, "points", path))
        else:
            raise SerializationError(path, f"unknown closed set kind {kind!r}")
    try:
        return m.check_closed_set(z)
    except ModelError as exc:
        raise SerializationError(path, str(exc)) from exc


def term_to_json(t: ZRTerm) -> dict:
    return {"z": closed_set_to_json(t.z), "alpha": [elem_to_json(a) for a in sorted(t.alpha, key=str)]}


def term_from_json(m: DedekindModel, obj: Any, path: str = "$") -> ZRTerm:
    if isinstance(obj, list):
        _expect(len(obj) == 2, path, "expected [z, [elements]]")
        z_obj, alpha_obj = obj
    else:
        z_obj, alpha_obj = _get(obj, "z", path), _get(obj, "alpha", path)
    z = closed_set_from_json(m, z_obj, f"{path}.z")
    _expect(isinstance(alpha_obj, list) and alpha_obj, f"{path}.alpha", "expected a non-empty array")
    alpha = [elem_from_json(m.field, a, f"{path}.alpha[{i}]") for i, a in enumerate(alpha_obj)]
    try:
        return ZRTerm.make(z, alpha)
    except ValueError as exc:
        raise SerializationError(path, str(exc)) from exc


def zr_elem_to_json(a: ZRElem) -> list:
    return [term_to_json(t) for t in sorted(a.terms, key=str)]


def zr_elem_from_json(m: DedekindModel, obj: Any, path: str = "$") -> ZRElem:
    _expect(isinstance(obj, list), path, "expected an array of terms")
    terms = [term_from_json(m, t, f"{path}[{i}]") for i, t in enumerate(obj)]
    try:
        return ZRElem.make(m, terms)
    except ValueError as exc:
        raise SerializationError(path, str(exc)) from exc


_BARE = re.compile(r'("(?:[^"\\]|\\.)*")|\b(empty|whole|Whole)\b')


def loads_lenient(text: str) -> Any:
    """``json.loads`` that also accepts the bare words ``empty`` and ``whole``."""
    quoted = _BARE.sub(lambda mt: mt.group(1) or f'"{mt.group(2)}"', text)
    return json.loads(quoted)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)
