"""Dedekind models: integral 𝒜-schemes over a global field K with valuation-ring stalks.

A model is a generic point ξ with stalk K plus closed points, each labelled
by a non-trivial place ``v`` and carrying the stalk ``R_v``.  Closed points
come in one of three shapes:

``all_except``
    one implicit point per place outside a finite exception set (its id is
    the place label), plus finitely many ``extra`` points repeating places;
    repeats model non-separated doublings such as the line with two origins.
``list``
    a finite list of ``(id, place)`` pairs.
``constant``
    no closed points at all; the single point is ``Spec F_q`` and its stalk
    is the constant field.  It is the base over which ℙ¹ is proper.

The quasi-compact-complement closed sets are the whole space and the finite
sets of closed points, so ``C(S)_cpt`` is handled exactly by
:class:`ClosedSet` without enumerating anything infinite.
"""

from __future__ import annotations

import itertools
import os
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

from .field import (
    FieldElem,
    GlobalField,
    Place,
    check_place,
    enumerate_places,
    fresh_place,
    in_max_ideal,
    in_ring,
    parse_place,
    poles,
    random_elem,
    valuation,
    zeros,
)
from .lattice import Lattice
from .topology import FinitePoset

ALL_EXCEPT = "all_except"
LIST = "list"
CONSTANT = "constant"

DEFAULT_PRIME_BOUND = 50
DEFAULT_DEGREE_BOUND = 4


class ModelError(ValueError):
    pass


# closed sets -------------------------------------------------------------------


@dataclass(frozen=True)
class ClosedSet:
    """``Whole`` (``points is None``) or a finite set of closed point ids."""

    points: Optional[frozenset[str]] = None

    @classmethod
    def whole(cls) -> "ClosedSet":
        return cls(None)

    @classmethod
    def finite(cls, ids: Iterable[str] = ()) -> "ClosedSet":
        return cls(frozenset(ids))

    @property
    def is_whole(self) -> bool:
        return self.points is None

    def __contains__(self, point: str) -> bool:
        return self.points is None or point in self.points

    def contains_closed(self, point: str) -> bool:
        return point in self

    def __add__(self, other: "ClosedSet") -> "ClosedSet":
        if self.is_whole:
            return other
        if other.is_whole:
            return self
        return ClosedSet(self.points & other.points)

    def __mul__(self, other: "ClosedSet") -> "ClosedSet":
        if self.is_whole or other.is_whole:
            return ClosedSet.whole()
        return ClosedSet(self.points | other.points)

    def __le__(self, other: "ClosedSet") -> bool:
        """Lattice order: ``self <= other`` iff ``other ⊆ self`` as point sets."""
        if self.is_whole:
            return True
        if other.is_whole:
            return False
        return other.points <= self.points

    def __str__(self) -> str:
        if self.is_whole:
            return "Whole"
        return "{" + ",".join(sorted(self.points)) + "}"


EMPTY = ClosedSet.finite()
WHOLE = ClosedSet.whole()


# models ------------------------------------------------------------------------


@dataclass(frozen=True)
class DedekindModel:
    field: GlobalField
    mode: str = ALL_EXCEPT
    exceptions: frozenset[Place] = frozenset()
    extra: tuple[tuple[str, Place], ...] = ()
    points: tuple[tuple[str, Place], ...] = ()
    generic: str = "xi"
    label: str = ""

    def __post_init__(self) -> None:
        k = self.field
        if self.mode not in (ALL_EXCEPT, LIST, CONSTANT):
            raise ModelError(f"unknown mode {self.mode!r}")
        if self.mode == CONSTANT:
            if k.is_rational:
                raise ModelError("the constant base exists only for F_q(t)")
            if self.exceptions or self.extra or self.points:
                raise ModelError("the constant base has no closed points")
        if self.mode != ALL_EXCEPT and (self.exceptions or self.extra):
            raise ModelError("exceptions/extra belong to all_except mode")
        if self.mode != LIST and self.points:
            raise ModelError("explicit points belong to list mode")
        for v in self.exceptions:
            check_place(k, v)
            if v.is_trivial:
                raise ModelError("the trivial place is not a closed point")
        seen = {self.generic}
        for pid, v in self.extra + self.points:
            check_place(k, v)
            if v.is_trivial:
                raise ModelError(f"closed point {pid!r} carries the trivial place")
            if pid in seen:
                raise ModelError(f"duplicate point id {pid!r}")
            seen.add(pid)
            if self.mode == ALL_EXCEPT and self._implicit_place(pid) is not None:
                raise ModelError(f"extra point id {pid!r} clashes with a place label")

    # construction helpers
    @classmethod
    def all_except(cls, k: GlobalField, exceptions: Iterable[Place] = (), extra=(), label: str = "", generic: str = "xi"):
        return cls(k, ALL_EXCEPT, frozenset(exceptions), tuple(extra), (), generic, label)

    @classmethod
    def from_list(cls, k: GlobalField, points: Iterable[tuple[str, Place]], label: str = "", generic: str = "xi"):
        return cls(k, LIST, points=tuple(points), generic=generic, label=label)

    @classmethod
    def constant_base(cls, k: GlobalField, label: str = "", generic: str = "pt"):
        return cls(k, CONSTANT, generic=generic, label=label or f"Spec F{k.q}")

    @classmethod
    def generic_only(cls, k: GlobalField, label: str = "Spec K"):
        return cls.from_list(k, (), label=label)

    def __str__(self) -> str:
        return self.label or f"{self.mode} model over {self.field}"

    # points
    @property
    def is_constant(self) -> bool:
        return self.mode == CONSTANT

    @property
    def is_finite(self) -> bool:
        return self.mode != ALL_EXCEPT

    def _implicit_place(self, pid: str) -> Optional[Place]:
        try:
            v = parse_place(self.field, pid)
        except ValueError:
            return None
        if v.is_trivial or v.label(self.field.var) != pid:
            return None
        return v

    def place_of(self, pid: str) -> Place:
        if pid == self.generic:
            return Place.trivial()
        for q, v in self.extra + self.points:
            if q == pid:
                return v
        if self.mode == ALL_EXCEPT:
            v = self._implicit_place(pid)
            if v is not None and v not in self.exceptions:
                return v
        raise ModelError(f"{pid!r} is not a point of {self}")

    def has_point(self, pid: str) -> bool:
        try:
            self.place_of(pid)
        except ModelError:
            return False
        return True

    def closed_points(self) -> list[tuple[str, Place]]:
        """The closed points of a finite model."""
        if self.mode == ALL_EXCEPT:
            raise ModelError("infinitely many closed points; use points_with_place")
        return list(self.points)

    def points_with_place(self, v: Place) -> list[str]:
        """Closed points carrying ``v``, implicit point first."""
        if v.is_trivial or self.is_constant:
            return []
        out = []
        if self.mode == ALL_EXCEPT and v not in self.exceptions:
            out.append(v.label(self.field.var))
        out.extend(pid for pid, w in self.extra + self.points if w == v)
        return out

    def centers(self, v: Place) -> list[str]:
        """Points whose local ring is dominated by ``R_v``."""
        if self.is_constant:
            return [self.generic]
        if v.is_trivial:
            return [self.generic]
        return self.points_with_place(v)

    def mentioned_places(self) -> frozenset[Place]:
        return frozenset(self.exceptions) | {v for _, v in self.extra + self.points}

    def listed_points(self) -> list[tuple[str, Place]]:
        """Closed points named explicitly (extras or list entries)."""
        return list(self.extra + self.points)

    def points_over(self, places: Iterable[Place]) -> list[str]:
        out: list[str] = []
        for v in places:
            out.extend(p for p in self.points_with_place(v) if p not in out)
        return out

    def in_stalk(self, pid: str, a: FieldElem) -> bool:
        if self.is_constant:
            return a.is_constant()
        v = self.place_of(pid)
        return in_ring(v, a)

    def in_stalk_max_ideal(self, pid: str, a: FieldElem) -> bool:
        if self.is_constant:
            return a.is_zero()
        v = self.place_of(pid)
        if v.is_trivial:
            return a.is_zero()
        return in_max_ideal(v, a)

    def check_closed_set(self, z: ClosedSet) -> ClosedSet:
        if z.is_whole:
            return z
        for pid in z.points:
            if pid == self.generic or not self.has_point(pid):
                raise ModelError(f"{pid!r} is not a closed point of {self}")
        return z

    def closed_set(self, ids: Optional[Iterable[str]]) -> ClosedSet:
        return self.check_closed_set(WHOLE if ids is None else ClosedSet.finite(ids))

    def residue_label(self, pid: str) -> str:
        return self.place_of(pid).residue_field(self.field)

    def poset(self) -> FinitePoset:
        """Underlying finite space (list and constant modes)."""
        if self.mode == ALL_EXCEPT:
            raise ModelError("infinite space")
        ids = [self.generic] + [pid for pid, _ in self.points]
        return FinitePoset.from_relations(ids, [(pid, self.generic) for pid, _ in self.points])


def witness_places(k: GlobalField, bound: Optional[int] = None, extra: Iterable[Place] = ()) -> list[Place]:
    """Default testers: places up to the height bound, places from the data, and a fresh place."""
    if bound is None:
        env = os.environ.get("STONEZR_BOUND")
        bound = int(env) if env else DEFAULT_PRIME_BOUND if k.is_rational else DEFAULT_DEGREE_BOUND
    out = enumerate_places(k, bound, include_trivial=False)
    have = set(out)
    for v in sorted(set(extra), key=Place.sort_key):
        if not v.is_trivial and v not in have:
            out.append(v)
            have.add(v)
    out.append(fresh_place(k, have))
    return out


# lattice handle ---------------------------------------------------------------


@dataclass(frozen=True)
class ModelLattice:
    """``C(S)_cpt`` of a model: ``Whole`` and finite sets of closed points."""

    model: DedekindModel

    @property
    def zero(self) -> ClosedSet:
        return WHOLE

    @property
    def one(self) -> ClosedSet:
        return EMPTY

    def elem(self, ids: Optional[Iterable[str]]) -> ClosedSet:
        return self.model.closed_set(ids)

    def add(self, a: ClosedSet, b: ClosedSet) -> ClosedSet:
        return a + b

    def mul(self, a: ClosedSet, b: ClosedSet) -> ClosedSet:
        return a * b

    def leq(self, a: ClosedSet, b: ClosedSet) -> bool:
        return a <= b

    def elements(self) -> list[ClosedSet]:
        m = self.model
        if m.mode == ALL_EXCEPT:
            raise ModelError("infinitely many closed sets")
        ids = [pid for pid, _ in m.points]
        subsets = (ClosedSet.finite(c) for r in range(len(ids) + 1) for c in itertools.combinations(ids, r))
        return [WHOLE, *subsets]

    def to_lattice(self) -> tuple[Lattice, dict[ClosedSet, int]]:
        """The :class:`Lattice` on the finite underlying space and the element correspondence."""
        p = self.model.poset()
        lat = Lattice(p)
        table = {}
        for z in self.elements():
            table[z] = p.full if z.is_whole else p.mask(z.points)
        return lat, table


def lattice_of(m: DedekindModel) -> ModelLattice:
    return ModelLattice(m)


# sections and supports ---------------------------------------------------------


def _pole_points(m: DedekindModel, a: FieldElem) -> list[str]:
    if a.is_zero() or m.is_constant:
        return []
    return m.points_over(poles([a]))


def is_section(m: DedekindModel, a: FieldElem, z: ClosedSet = EMPTY) -> bool:
    """Is ``a`` a section over the open complement of ``z``?"""
    m.check_closed_set(z)
    if a.is_zero() or z.is_whole:
        return True
    if m.is_constant:
        return a.is_constant()
    return all(p in z for p in _pole_points(m, a))


def support_of(m: DedekindModel, a: FieldElem, z: ClosedSet = EMPTY) -> ClosedSet:
    """``βα₂(a)`` for a section over the complement of ``z``: the closed points outside ``z`` where ``a`` vanishes."""
    if not is_section(m, a, z):
        raise ModelError(f"{a} is not a section off {z}")
    if a.is_zero() or z.is_whole:
        return WHOLE
    if m.is_constant:
        return EMPTY
    return ClosedSet.finite(p for p in m.points_over(zeros(a)) if p not in z)


def support_of_ideal(m: DedekindModel, gens: Iterable[FieldElem], z: ClosedSet = EMPTY) -> ClosedSet:
    """Support of the ideal generated by ``gens``: the lattice sum of generator supports."""
    out = WHOLE
    for g in gens:
        out = out + support_of(m, g, z)
    return out


# axioms ----------------------------------------------------------------------


@dataclass
class AxiomReport:
    model: str
    results: list[tuple[str, str, bool]] = field(default_factory=list)

    def record(self, axiom: str, sample: str, ok: bool) -> None:
        self.results.append((axiom, sample, ok))

    @property
    def ok(self) -> bool:
        return all(r[2] for r in self.results)

    def failures(self) -> list[tuple[str, str, bool]]:
        return [r for r in self.results if not r[2]]

    def summary(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for axiom, _, ok in self.results:
            row = out.setdefault(axiom, {"pass": 0, "fail": 0})
            row["pass" if ok else "fail"] += 1
        return out


def _sample_closed_points(m: DedekindModel, rng: random.Random, around: Iterable[str] = ()) -> list[str]:
    pool = list(dict.fromkeys(around))
    if m.is_finite:
        pool += [p for p, _ in m.points if p not in pool]
    else:
        pool += [p for p, _ in m.extra if p not in pool]
        for v in witness_places(m.field, 5 if m.field.is_rational else 2):
            pool += [p for p in m.points_with_place(v) if p not in pool]
    return pool


def sample_sections(m: DedekindModel, rng: random.Random, n: int, z: ClosedSet = EMPTY) -> list[FieldElem]:
    """Random sections over the complement of ``z`` (rejection sampling, with fallbacks)."""
    k = m.field
    out = []
    tries = 0
    while len(out) < n and tries < 50 * n:
        tries += 1
        a = random_elem(k, rng, height=2)
        if is_section(m, a, z):
            out.append(a)
    while len(out) < n:
        out.append(k.elem(rng.randint(1, 5)) if k.is_rational else k.elem(rng.randrange(1, k.q)))
    return out


def check_axioms(
    m: DedekindModel,
    samples: int = 40,
    seed: int = 0,
    support: Optional[Callable[[DedekindModel, FieldElem, ClosedSet], ClosedSet]] = None,
) -> AxiomReport:
    """Sampled verification of the 𝒜-scheme axioms for a model.

    ``support`` replaces :func:`support_of`; it exists so that a corrupted
    support table can be fed in as a negative control.
    """
    beta = support or support_of
    rng = random.Random(seed)
    rep = AxiomReport(str(m))
    k = m.field
    if m.is_constant:
        elems = sample_sections(m, rng, samples)
    else:
        elems = [random_elem(k, rng, height=2) for _ in range(samples)]
    globals_ = sample_sections(m, rng, samples)

    for a in elems:
        # sections of the complement of the pole locus; restriction reflects localization
        z = ClosedSet.finite(_pole_points(m, a))
        if not is_section(m, a, z):
            rep.record("sections", str(a), False)
            continue
        s = beta(m, a, z)
        if s.is_whole:
            rep.record("reflects_localization", str(a), a.is_zero())
            continue
        widen = z * s
        extra = _sample_closed_points(m, rng, widen.points or ())[: 3]
        for bigger in (widen, widen * ClosedSet.finite(extra)):
            rep.record("reflects_localization", f"{a} off {bigger}", is_section(m, a.inverse(), bigger))
        # converse: an invertible section has empty support
        inv_z = z * ClosedSet.finite(_pole_points(m, a.inverse()))
        rep.record("units_have_empty_support", str(a), beta(m, a, inv_z) == EMPTY)

    for a, b in zip(globals_, globals_[1:]):
        sa, sb = beta(m, a, EMPTY), beta(m, b, EMPTY)
        rep.record("support_multiplicative", f"{a}, {b}", beta(m, a * b, EMPTY) == sa * sb)
        s_sum = beta(m, a + b, EMPTY)
        rep.record("support_subadditive", f"{a}, {b}", s_sum <= sa + sb)
        rep.record("support_monotone", f"{a} | {a * b}", beta(m, a * b, EMPTY) <= sa)
        rep.record("integral", f"{a}, {b}", not (a * b).is_zero())

    for a in elems:
        for pid in _sample_closed_points(m, rng, _pole_points(m, a) + list(m.points_over(zeros(a)) if not m.is_constant else []))[:4]:
            in_stalk = m.in_stalk(pid, a)
            v = m.place_of(pid)
            rep.record("stalk_is_valuation_ring", f"{a} at {pid}", in_stalk == in_ring(v, a))
            if in_stalk:
                off = ClosedSet.finite(p for p in _pole_points(m, a) if p != pid)
                rep.record(
                    "stalk_maximal_ideal",
                    f"{a} at {pid}",
                    (pid in beta(m, a, off)) == m.in_stalk_max_ideal(pid, a),
                )
        rep.record("generic_stalk_is_K", str(a), m.is_constant or m.in_stalk(m.generic, a))

    if m.is_finite and m.points:
        ids = [p for p, _ in m.points]
        for a in elems:
            z1 = ClosedSet.finite(rng.sample(ids, rng.randint(0, len(ids))))
            z2 = ClosedSet.finite(i for i in ids if i not in z1.points and rng.random() < 0.5)
            if is_section(m, a, z1) and is_section(m, a, z2):
                rep.record("gluing", f"{a} on {z1}, {z2}", is_section(m, a, z1 + z2))
    return rep


# homomorphisms ------------------------------------------------------------------


@dataclass(frozen=True)
class ModelHom:
    """A point map; listed entries override the default 'same place' rule.

    By default a closed point goes to the canonical target point carrying
    its place (the implicit point of an ``all_except`` target, otherwise
    the first listed one), or to the single point of a constant target.
    """

    source: DedekindModel
    target: DedekindModel
    mapping: tuple[tuple[str, str], ...] = ()

    @classmethod
    def make(cls, source: DedekindModel, target: DedekindModel, mapping: Optional[Mapping[str, str]] = None) -> "ModelHom":
        return cls(source, target, tuple(sorted((mapping or {}).items())))

    def explicit(self) -> dict[str, str]:
        return dict(self.mapping)

    def __call__(self, pid: str) -> str:
        s, t = self.source, self.target
        if pid == s.generic:
            return t.generic
        table = self.explicit()
        if pid in table:
            return table[pid]
        if t.is_constant:
            return t.generic
        v = s.place_of(pid)
        over = t.points_with_place(v)
        return over[0] if over else t.generic

    def critical_places(self) -> frozenset[Place]:
        s, t = self.source, self.target
        out = set(s.mentioned_places()) | set(t.mentioned_places())
        for a, b in self.mapping:
            if s.has_point(a):
                out.add(s.place_of(a))
            if t.has_point(b):
                out.add(t.place_of(b))
        return frozenset(v for v in out if not v.is_trivial)

    def critical_source_points(self) -> list[str]:
        s = self.source
        if s.is_finite:
            return [p for p, _ in s.points]
        pts = s.points_over(sorted(self.critical_places(), key=Place.sort_key))
        return pts + [p for p, _ in s.extra if p not in pts]

    def preimage(self, z: ClosedSet) -> ClosedSet:
        """``|f|⁻¹`` on closed sets."""
        self.target.check_closed_set(z)
        if z.is_whole:
            return WHOLE
        s = self.source
        out = set()
        for y in z.points:
            cands = set(self.critical_source_points())
            cands.update(s.points_with_place(self.target.place_of(y)))
            out.update(x for x in cands if self(x) == y)
        return ClosedSet.finite(out)

    def compose(self, other: "ModelHom") -> "ModelHom":
        """``other ∘ self``."""
        if other.source != self.target:
            raise ModelError("homs are not composable")
        keys = dict.fromkeys(self.critical_source_points())
        keys.update(dict.fromkeys(self.explicit()))
        table = {x: other(self(x)) for x in keys}
        out = ModelHom.make(self.source, other.target, table)
        return out

    def same_as(self, other: "ModelHom") -> bool:
        """Equality as point maps, decided on critical points and one fresh place."""
        if (self.source, self.target) != (other.source, other.target):
            return False
        pts = set(self.critical_source_points()) | set(other.critical_source_points())
        if not self.source.is_finite:
            crit = self.critical_places() | other.critical_places()
            pts.update(self.source.points_with_place(fresh_place(self.source.field, crit)))
        return all(self(x) == other(x) for x in pts)


def identity_hom(m: DedekindModel) -> ModelHom:
    return ModelHom.make(m, m, {p: p for p, _ in m.listed_points()})


def hom_check(f: ModelHom, samples: int = 20, seed: int = 0) -> bool:
    return not hom_violations(f, samples, seed)


def hom_violations(f: ModelHom, samples: int = 20, seed: int = 0) -> list[str]:
    """Continuity, place compatibility (dominant local stalk maps) and the support square."""
    s, t = f.source, f.target
    out = []
    if s.field != t.field:
        return ["source and target have different fields"]
    if s.is_constant and not t.is_constant:
        return ["a constant base only maps to a constant base"]
    for a, b in f.mapping:
        if not s.has_point(a) or a == s.generic:
            out.append(f"{a!r} is not a closed source point")
        elif not t.has_point(b):
            out.append(f"{b!r} is not a target point")
    if out:
        return out
    for x in f.critical_source_points():
        y = f(x)
        if t.is_constant:
            continue
        if y == t.generic:
            out.append(f"{x} ↦ generic: K is not inside the stalk R_{s.place_of(x)}")
        elif t.place_of(y) != s.place_of(x):
            out.append(f"{x} ↦ {y}: stalk map is not a dominant local inclusion")
    if not s.is_finite and not t.is_constant:
        fresh = fresh_place(s.field, f.critical_places())
        for x in s.points_with_place(fresh):
            if f(x) == t.generic:
                out.append(f"{x} ↦ generic")
    if out:
        return out
    # support square: |f|^{-1} β_Y(b) = β_X(f^# b)
    rng = random.Random(seed)
    for b in sample_sections(t, rng, samples):
        lhs = f.preimage(support_of(t, b))
        if not is_section(s, b):
            out.append(f"global section {b} does not pull back")
            continue
        rhs = support_of(s, b)
        if lhs != rhs:
            out.append(f"support square fails on {b}: {lhs} vs {rhs}")
    for x in f.critical_source_points()[:6]:
        y = f(x)
        for a in (random_elem(s.field, rng, 2) for _ in range(samples)):
            if t.in_stalk(y, a) and not s.in_stalk(x, a):
                out.append(f"stalk at {y} is not inside stalk at {x} ({a})")
            if t.in_stalk(y, a) and t.in_stalk_max_ideal(y, a) != s.in_stalk_max_ideal(x, a):
                out.append(f"stalk map at {x} is not local ({a})")
    return out


def all_model_homs(source: DedekindModel, target: DedekindModel) -> list[ModelHom]:
    """Every hom between finite models: each closed point picks a target point over its place."""
    if not (source.is_finite and target.is_finite) or source.is_constant or target.is_constant:
        raise ModelError("homs are enumerated only between list-mode models")
    if source.field != target.field:
        return []
    ids = [x for x, _ in source.points]
    choices = [target.points_with_place(v) for _, v in source.points]
    return [ModelHom.make(source, target, dict(zip(ids, pick))) for pick in itertools.product(*choices)]


def model_isomorphism(m1: DedekindModel, m2: DedekindModel) -> Optional[ModelHom]:
    """An isomorphism ``m1 → m2`` if one exists.

    Dedekind models over the same field are determined up to isomorphism by
    the multiset of places carried by their closed points, so matching those
    multisets decides the question exactly.
    """
    if m1.field != m2.field or m1.is_constant != m2.is_constant:
        return None
    if m1.is_constant:
        return ModelHom.make(m1, m2, {})
    if m1.is_finite != m2.is_finite:
        return None
    if not m1.is_finite and m1.exceptions != m2.exceptions:
        return None
    pts1, pts2 = m1.listed_points(), m2.listed_points()
    if Counter(v for _, v in pts1) != Counter(v for _, v in pts2):
        return None
    pool: dict[Place, list[str]] = {}
    for y, v in pts2:
        pool.setdefault(v, []).append(y)
    mapping = {x: pool[v].pop(0) for x, v in pts1}
    return ModelHom.make(m1, m2, mapping)


def structure_map(m: DedekindModel, base: DedekindModel) -> ModelHom:
    """The default-rule map ``m -> base``."""
    return ModelHom.make(m, base, {})


# P and Q ------------------------------------------------------------------------


def _missed_target_points(f: ModelHom) -> list[str]:
    """Closed target points outside the image; ``["…"]`` marks infinitely many."""
    s, t = f.source, f.target
    if t.is_constant:
        return []
    image = {f(x) for x in f.critical_source_points()}
    if t.is_finite:
        return [y for y, _ in t.points if y not in image]
    if s.is_finite:
        return ["…"]
    crit = sorted(f.critical_places(), key=Place.sort_key)
    return [y for y in t.points_over(crit) + [p for p, _ in t.extra] if y not in image]


def is_P_morphism(f: ModelHom) -> bool:
    """Dual lattice map injective, i.e. every closed target point has a preimage.

    Section maps are inclusions of subrings of K and therefore injective; the
    pull-back of sampled global sections is still verified.
    """
    if not hom_check(f, samples=8):
        return False
    if f.target.is_constant:
        return True
    return not _missed_target_points(f)


def is_Q_morphism(f: ModelHom) -> bool:
    """Dual lattice map surjective and stalks equal as subrings of K."""
    s, t = f.source, f.target
    if not hom_check(f, samples=8):
        return False
    if t.is_constant:
        return s.is_constant
    images = [f(x) for x in f.critical_source_points()]
    return len(images) == len(set(images))


def is_isomorphism(f: ModelHom) -> bool:
    return is_P_morphism(f) and is_Q_morphism(f)


@dataclass(frozen=True)
class PQDecomposition:
    p: ModelHom
    middle: DedekindModel
    q: ModelHom


def image_model(f: ModelHom) -> DedekindModel:
    """Generic point plus the closed image points, with the target's stalks."""
    s, t = f.source, f.target
    if t.is_constant:
        return t
    label = f"im({s} → {t})"
    if t.is_finite or s.is_finite:
        image = {f(x) for x in f.critical_source_points()}
        if t.is_finite:
            pts = [(y, v) for y, v in t.points if y in image]
        else:
            pts = sorted(((y, t.place_of(y)) for y in image), key=lambda yv: (yv[1].sort_key(), yv[0]))
        return DedekindModel.from_list(t.field, pts, label=label, generic=t.generic)
    missed = set(_missed_target_points(f))
    exc = set(t.exceptions)
    for y in missed:
        v = t.place_of(y)
        if y == v.label(t.field.var):
            exc.add(v)
    extra = [(y, v) for y, v in t.extra if y not in missed]
    return DedekindModel.all_except(t.field, exc, extra, label=label, generic=t.generic)


def pq_decompose(f: ModelHom) -> PQDecomposition:
    """``f = q ∘ p`` with ``p`` a P-morphism onto the image and ``q`` a Q-morphism."""
    middle = image_model(f)
    if middle is f.target:
        return PQDecomposition(f, middle, identity_hom(middle))
    keys = dict.fromkeys(f.critical_source_points())
    keys.update(dict.fromkeys(f.explicit()))
    p = ModelHom.make(f.source, middle, {x: f(x) for x in keys})
    q = ModelHom.make(middle, f.target, {y: y for y, _ in middle.listed_points()})
    return PQDecomposition(p, middle, q)


def pq_alternatives(f: ModelHom) -> list[frozenset[str]]:
    """Every closed subset ``W`` of a finite target through which ``f`` factors as P then Q.

    A Q-morphism into the target is injective and place preserving, so any
    middle model is isomorphic to the sub-model on its image ``W``; running
    over all ``W`` therefore covers every factorization up to isomorphism.
    """
    t = f.target
    if not t.is_finite or t.is_constant:
        raise ModelError("alternatives are enumerated only for list-mode targets")
    ids = [y for y, _ in t.points]
    if len(ids) > 12:
        raise ModelError("too many target points to enumerate")
    out = []
    images = {x: f(x) for x in f.critical_source_points()}
    for r in range(len(ids) + 1):
        for w in itertools.combinations(ids, r):
            if not set(images.values()) <= set(w):
                continue
            mid = DedekindModel.from_list(t.field, [(y, v) for y, v in t.points if y in w], generic=t.generic)
            p = ModelHom.make(f.source, mid, images)
            q = ModelHom.make(mid, t, {y: y for y in w})
            if is_P_morphism(p) and is_Q_morphism(q) and p.compose(q).same_as(f):
                out.append(frozenset(w))
    return out


# patching -----------------------------------------------------------------------


def _places_multiset(m: DedekindModel, z: ClosedSet, places: Iterable[Place]) -> dict[Place, list[str]]:
    return {v: [p for p in m.points_with_place(v) if p not in z] for v in places}


def patch(
    m1: DedekindModel,
    m2: DedekindModel,
    z1: ClosedSet,
    z2: ClosedSet,
    ident: Optional[Mapping[str, str]] = None,
    label: str = "",
) -> DedekindModel:
    """Glue ``m1`` and ``m2`` along the opens ``m1∖z1 ≅ m2∖z2``.

    ``ident`` sends the closed points of ``m2∖z2`` to those of ``m1∖z1``;
    by default points are matched place by place in listing order.  The
    points of ``z2`` are added to ``m1``; an id already used in ``m1`` is
    primed.
    """
    if m1.field != m2.field:
        raise ModelError("models over different fields")
    if m1.is_constant or m2.is_constant:
        raise ModelError("the constant base has no proper opens to glue along")
    if z1.is_whole or z2.is_whole:
        raise ModelError("the glue must be a non-empty open (finite closed complements)")
    m1.check_closed_set(z1)
    m2.check_closed_set(z2)
    crit = m1.mentioned_places() | m2.mentioned_places()
    crit |= {m1.place_of(p) for p in z1.points} | {m2.place_of(p) for p in z2.points}
    ident = dict(ident or {})
    for a, b in ident.items():
        if m2.place_of(a) != m1.place_of(b):
            raise ModelError(f"glue sends {a} to a point of another place")
        crit |= {m2.place_of(a)}
    u1 = _places_multiset(m1, z1, crit)
    u2 = _places_multiset(m2, z2, crit)
    for v in crit:
        if len(u1[v]) != len(u2[v]):
            raise ModelError(f"glue is not a bijection over place {v}")
        pairs = ident.items()
        explicit2 = {a for a, _ in pairs if a in u2[v]}
        explicit1 = {b for a, b in pairs if a in u2[v]}
        if len(explicit1) != len(explicit2):
            raise ModelError("glue is not injective")
    if m1.is_finite != m2.is_finite:
        raise ModelError("a finite open cannot be glued to a cofinite one")

    new_pts: list[tuple[str, Place]] = []
    used = {m1.generic} | {p for p, _ in m1.listed_points()}
    for pid in sorted(z2.points):
        v = m2.place_of(pid)
        new_pts.append((pid, v))
    if m1.is_finite:
        pts = list(m1.points)
        for pid, v in new_pts:
            while pid in used:
                pid += "'"
            used.add(pid)
            pts.append((pid, v))
        return DedekindModel.from_list(m1.field, pts, label=label, generic=m1.generic)
    exc = set(m1.exceptions)
    extra = list(m1.extra)
    var = m1.field.var
    for pid, v in new_pts:
        if pid == v.label(var) and v in exc:
            exc.discard(v)
            continue
        pid = pid if pid != v.label(var) else pid + "'"
        while pid in used or (pid == v.label(var)):
            pid += "'"
        used.add(pid)
        extra.append((pid, v))
    return DedekindModel.all_except(m1.field, exc, extra, label=label, generic=m1.generic)


# closed subspaces -----------------------------------------------------------------


@dataclass(frozen=True)
class ClosedSubspace:
    model: DedekindModel
    z: ClosedSet
    residues: tuple[tuple[str, str], ...]

    def poset(self) -> FinitePoset:
        if self.z.is_whole:
            return self.model.poset()
        return FinitePoset.discrete([p for p, _ in self.residues])


def reduced_closed_submodel(m: DedekindModel, z: ClosedSet) -> ClosedSubspace:
    """The space of ``z`` with residue-field labels at its closed points."""
    m.check_closed_set(z)
    if z.is_whole:
        if m.is_finite and not m.is_constant:
            labels = [(m.generic, str(m.field))] + [(p, m.residue_label(p)) for p, _ in m.points]
        elif m.is_constant:
            labels = [(m.generic, f"F{m.field.q}")]
        else:
            labels = [(m.generic, str(m.field))]
        return ClosedSubspace(m, z, tuple(labels))
    return ClosedSubspace(m, z, tuple((p, m.residue_label(p)) for p in sorted(z.points)))


# testers and lifting -------------------------------------------------------------


@dataclass(frozen=True)
class Tester:
    """``V = {ξ, η}`` with ``Γ(V) = R_v`` and the generic inclusion ``Spec K → V``."""

    model: DedekindModel
    place: Place

    @property
    def closed_point(self) -> str:
        return "eta"

    @property
    def generic_model(self) -> DedekindModel:
        return DedekindModel.generic_only(self.model.field)

    @property
    def generic_inclusion(self) -> ModelHom:
        return ModelHom.make(self.generic_model, self.model, {})

    def beta(self, gens: Sequence[FieldElem]) -> ClosedSet:
        """Whole ideal ↦ ∅ (the unit 1), non-zero ideal in the maximal ideal ↦ {η}, zero ↦ Whole."""
        return support_of_ideal(self.model, gens)

    def global_sections_contain(self, a: FieldElem) -> bool:
        return is_section(self.model, a)


def tester_from_place(k: GlobalField, v: Place) -> Tester:
    if v.is_trivial:
        raise ModelError("testers need a non-trivial place")
    check_place(k, v)
    m = DedekindModel.from_list(k, [("eta", v)], label=f"tester:{v.label(k.var)}")
    return Tester(m, v)


@dataclass(frozen=True)
class LiftingSquare:
    """``Spec K → X`` over ``V → S``: the data of the valuative criteria."""

    tester: Tester
    x_to_s: ModelHom
    v_to_s: ModelHom

    def check(self) -> None:
        if self.v_to_s.source != self.tester.model or self.v_to_s.target != self.x_to_s.target:
            raise ModelError("square legs do not match")
        if not hom_check(self.v_to_s, samples=4) or not hom_check(self.x_to_s, samples=4):
            raise ModelError("square contains an invalid hom")


def lift_solutions(square: LiftingSquare) -> list[ModelHom]:
    """All diagonal fillers ``V → X``; the upper triangle commutes automatically (ξ ↦ ξ)."""
    square.check()
    g = square.x_to_s
    x_model = g.source
    v = square.tester.place
    s = square.v_to_s(square.tester.closed_point)
    out = []
    for x in x_model.centers(v):
        if g(x) != s:
            continue
        h = ModelHom.make(square.tester.model, x_model, {square.tester.closed_point: x})
        if hom_check(h, samples=4):
            out.append(h)
    return out


def lifting_counts(g: ModelHom, bound: Optional[int] = None) -> dict[tuple[str, str], int]:
    """Filler counts for every witness tester and every center of its place on the base."""
    x, s = g.source, g.target
    places = witness_places(s.field, bound, g.critical_places() | x.mentioned_places() | s.mentioned_places())
    out = {}
    for v in places:
        tester = tester_from_place(s.field, v)
        for center in s.centers(v):
            leg = ModelHom.make(tester.model, s, {"eta": center} if not s.is_constant else {})
            out[(v.label(s.field.var), center)] = len(lift_solutions(LiftingSquare(tester, g, leg)))
    return out


def separated_by_lifting(g: ModelHom, bound: Optional[int] = None) -> bool:
    return all(c <= 1 for c in lifting_counts(g, bound).values())


def universally_closed_by_lifting(g: ModelHom, bound: Optional[int] = None) -> bool:
    return all(c >= 1 for c in lifting_counts(g, bound).values())
