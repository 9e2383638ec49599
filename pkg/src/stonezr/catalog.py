"""Named builtin models and their default bases."""

from __future__ import annotations

from .field import GlobalField, Place, parse_place
from .model import DedekindModel, ModelError, ModelHom, tester_from_place

QQ = GlobalField.rationals()
F2T = GlobalField.function_field(2)

T = Place.poly((0, 1), 2)
INF = Place.inf()


def _specz() -> DedekindModel:
    return DedekindModel.all_except(QQ, label="Spec Z")


def _a1() -> DedekindModel:
    return DedekindModel.all_except(F2T, [INF], label="A1 over F2")


def _p1() -> DedekindModel:
    return DedekindModel.all_except(F2T, label="P1 over F2")


def _doubled() -> DedekindModel:
    return DedekindModel.all_except(F2T, [INF], [("t'", T)], label="A1 with doubled origin")


def _semilocal() -> DedekindModel:
    return DedekindModel.from_list(QQ, [("2", Place.prime(2)), ("3", Place.prime(3))], label="Spec Z_(2)∩Z_(3)")


def _point() -> DedekindModel:
    return DedekindModel.constant_base(F2T, label="Spec F2")


def _specq() -> DedekindModel:
    return DedekindModel.generic_only(QQ, label="Spec Q")


def _speck() -> DedekindModel:
    return DedekindModel.generic_only(F2T, label="Spec F2(t)")


def _doubled_local() -> DedekindModel:
    return DedekindModel.from_list(F2T, [("t", T), ("t'", T)], label="local ring at t, doubled")


def _local_t() -> DedekindModel:
    return DedekindModel.from_list(F2T, [("t", T)], label="local ring at t")


def _semilocal_t() -> DedekindModel:
    t1 = Place.poly((1, 1), 2)
    return DedekindModel.from_list(F2T, [("t", T), ("t+1", t1)], label="semilocal ring at t, t+1")


CATALOG = {
    "specz": _specz,
    "a1fq": _a1,
    "p1fq": _p1,
    "doubled-line": _doubled,
    "semilocal": _semilocal,
}

EXTRA = {
    "specfq-point": _point,
    "specq": _specq,
    "speck": _speck,
    "doubled-local": _doubled_local,
    "local-t": _local_t,
    "semilocal-t": _semilocal_t,
}

DEFAULT_BASE = {
    "specz": "specz",
    "a1fq": "specfq-point",
    "p1fq": "specfq-point",
    "doubled-line": "specfq-point",
    "semilocal": "specz",
}

TESTER_PLACES = ("tester:2", "tester:3", "tester:t", "tester:inf")


def catalog_names() -> list[str]:
    return list(CATALOG)


def all_names() -> list[str]:
    return list(CATALOG) + list(EXTRA) + list(TESTER_PLACES)


def load(name: str) -> DedekindModel:
    """A builtin model by name; ``tester:<place>`` builds the two-point tester."""
    if name in CATALOG:
        return CATALOG[name]()
    if name in EXTRA:
        return EXTRA[name]()
    if name.startswith("tester:"):
        label = name.split(":", 1)[1]
        k = QQ if label.isdigit() else F2T
        return tester_from_place(k, parse_place(k, label)).model
    raise ModelError(f"unknown builtin {name!r}")


def list_builtins() -> list[str]:
    """Builtins with finitely many points, where homs can be enumerated."""
    return [n for n in all_names() if load(n).is_finite and not load(n).is_constant]


def default_base(name: str) -> str:
    if name in DEFAULT_BASE:
        return DEFAULT_BASE[name]
    m = load(name)
    return "specz" if m.field.is_rational else "specfq-point"


def scenario(name: str, base: str | None = None) -> ModelHom:
    """The structure map of a builtin over its base."""
    return ModelHom.make(load(name), load(base or default_base(name)), {})
