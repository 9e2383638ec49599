"""The classical Zariski-Riemann space of a Dedekind model and the semiring M^S.

Elements of ``M^S`` are finite sets of terms ``(Z, α)`` with ``Z`` a closed
set of the base and ``α`` a finite set of non-zero elements of K.  A term
cuts out the basis open ``U(Z, α) = {(s, R) : s ∉ Z, α ⊆ R}`` of the
Zariski-Riemann space, and an element the union of its terms' opens.

Points of ``ZR^f(K, S)`` are pairs ``(s, R)`` with ``R`` dominating the
local ring at ``s``.  Over a model with closed points the only such pairs
are ``(s, O_s)``; over the constant base ``Spec F_q`` every valuation
ring of K appears, giving the all-places model (ℙ¹ for ``F_q(t)``).

Two decision procedures for ≺ are provided.  :func:`prec` compares the
opens at finitely many critical points, which is exact for rank-one
bases.  :func:`prec_definitional` evaluates the two defining clauses
verbatim, enumerating choice maps σ and testing unit-ideal generation in
``O_{S,s}[α_i][σ⁻¹]``; it is the reference the fast path is tested against.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .field import (
    FieldElem,
    GlobalField,
    Place,
    fresh_place,
    in_ring,
    poles,
    random_elem,
    uniformizer,
    valuation,
    zeros,
)
from .model import (
    EMPTY,
    WHOLE,
    ClosedSet,
    DedekindModel,
    ModelError,
    ModelHom,
    _pole_points,
    is_P_morphism,
    is_Q_morphism,
    is_section,
    witness_places,
)


class BaseMismatch(ValueError):
    pass


# M^S -----------------------------------------------------------------------------


@dataclass(frozen=True)
class ZRTerm:
    z: ClosedSet
    alpha: frozenset[FieldElem]

    def __post_init__(self) -> None:
        if not self.alpha:
            raise ValueError("α must be non-empty")
        if any(a.is_zero() for a in self.alpha):
            raise ValueError("α must not contain 0")

    @classmethod
    def make(cls, z: ClosedSet, alpha: Iterable[FieldElem]) -> "ZRTerm":
        return cls(z, frozenset(alpha))

    def __str__(self) -> str:
        return f"({self.z}, {{{', '.join(sorted(map(str, self.alpha)))}}})"


@dataclass(frozen=True)
class ZRElem:
    base: DedekindModel
    terms: frozenset[ZRTerm] = frozenset()

    def __post_init__(self) -> None:
        for t in self.terms:
            self.base.check_closed_set(t.z)
            if any(a.field != self.base.field for a in t.alpha):
                raise BaseMismatch("term elements live in another field")

    @classmethod
    def make(cls, base: DedekindModel, terms: Iterable[ZRTerm | tuple]) -> "ZRElem":
        out = []
        for t in terms:
            out.append(t if isinstance(t, ZRTerm) else ZRTerm.make(*t))
        return cls(base, frozenset(out))

    def __add__(self, other: "ZRElem") -> "ZRElem":
        return ms_add(self, other)

    def __mul__(self, other: "ZRElem") -> "ZRElem":
        return ms_mul(self, other)

    def __str__(self) -> str:
        return "{" + ", ".join(sorted(map(str, self.terms))) + "}"


def ms_zero(base: DedekindModel) -> ZRElem:
    return ZRElem(base)


def ms_one(base: DedekindModel) -> ZRElem:
    return ZRElem.make(base, [(EMPTY, [base.field.one()])])


def _same_base(a: ZRElem, b: ZRElem) -> None:
    if a.base != b.base:
        raise BaseMismatch("elements over different bases")


def ms_add(a: ZRElem, b: ZRElem) -> ZRElem:
    _same_base(a, b)
    return ZRElem(a.base, a.terms | b.terms)


def ms_mul(a: ZRElem, b: ZRElem) -> ZRElem:
    _same_base(a, b)
    return ZRElem(a.base, frozenset(ZRTerm(s.z * t.z, s.alpha | t.alpha) for s in a.terms for t in b.terms))


def locus(m: DedekindModel, term: ZRTerm) -> ClosedSet:
    """``Z[α]``: ``Z`` together with the closed points where some member of α has a pole."""
    m.check_closed_set(term.z)
    if term.z.is_whole:
        return WHOLE
    if m.is_constant:
        return term.z
    return term.z * ClosedSet.finite(m.points_over(poles(term.alpha)))


def locus_by_ideal(m: DedekindModel, term: ZRTerm, pid: str) -> bool:
    """Membership ``s ∈ Z[α]`` from the definition: ``s ∈ Z`` or ``𝔐_s·O_s[α]`` is the unit ideal.

    For a discrete valuation ring ``R_v`` the ring ``R_v[α]`` is ``R_v``
    when ``α ⊆ R_v`` and K otherwise, so the maximal ideal dies exactly
    when some member has negative valuation.  At the generic point the
    maximal ideal is zero and never generates the unit ideal.
    """
    if pid in term.z:
        return True
    if pid == m.generic or m.is_constant:
        return False
    v = m.place_of(pid)
    ring_is_field = any(valuation(v, a) < 0 for a in term.alpha)
    return ring_is_field


# points ------------------------------------------------------------------------


@dataclass(frozen=True)
class ZRPoint:
    """``(s, R)``: a center on the base and the valuation ring, given by its place."""

    center: str
    place: Place

    def __str__(self) -> str:
        return f"({self.center}, {self.place})"


def valid_point(m: DedekindModel, pt: ZRPoint) -> bool:
    if not m.has_point(pt.center):
        return False
    if m.is_constant:
        return True
    return m.place_of(pt.center) == pt.place


def in_basis_open(pt: ZRPoint, term: ZRTerm) -> bool:
    """``pt ∈ U(Z, α)`` iff ``Z ⋠ s`` and ``α ⊆ R``."""
    if pt.center in term.z:
        return False
    return all(in_ring(pt.place, a) for a in term.alpha)


def in_open(pt: ZRPoint, a: ZRElem) -> bool:
    return any(in_basis_open(pt, t) for t in a.terms)


def zr_points_over(m: DedekindModel, v: Place) -> list[ZRPoint]:
    return [ZRPoint(c, v) for c in m.centers(v)]


def _critical_places(m: DedekindModel, elems: Iterable[ZRElem] = (), extra: Iterable[Place] = ()) -> set[Place]:
    out = set(m.mentioned_places()) | set(extra)
    for e in elems:
        for t in e.terms:
            out |= poles(t.alpha)
            if not t.z.is_whole:
                out.update(m.place_of(p) for p in t.z.points)
    return {v for v in out if not v.is_trivial}


def critical_points(m: DedekindModel, elems: Iterable[ZRElem] = (), extra: Iterable[Place] = ()) -> list[ZRPoint]:
    """ZR points where open membership can differ, plus one representative of the rest.

    Away from the places named by the data every closed point lies in every
    basis open with finite ``Z`` and in none with ``Z = Whole``, so one
    fresh place stands in for all of them.
    """
    crit = _critical_places(m, elems, extra)
    places = sorted(crit, key=Place.sort_key) + [fresh_place(m.field, crit), Place.trivial()]
    out = []
    for v in places:
        out.extend(zr_points_over(m, v))
    return out


def witness_points(m: DedekindModel, bound: Optional[int] = None, elems: Iterable[ZRElem] = ()) -> list[ZRPoint]:
    """ZR points over the witness places, the places in the data, and the generic point."""
    places = witness_places(m.field, bound, _critical_places(m, elems))
    out = []
    for v in places + [Place.trivial()]:
        out.extend(zr_points_over(m, v))
    return out


# the relation ≺ -------------------------------------------------------------------


def prec(a: ZRElem, b: ZRElem) -> bool:
    """``a ≺ b`` by comparing ``U(a) ⊆ U(b)`` at the critical points."""
    _same_base(a, b)
    return all(in_open(p, b) for p in critical_points(a.base, (a, b)) if in_open(p, a))


def ms_equal(a: ZRElem, b: ZRElem) -> bool:
    return prec(a, b) and prec(b, a)


def _unit_ideal_dvr(v: Place, gens: Sequence[FieldElem], alpha: Iterable[FieldElem]) -> bool:
    """Do ``gens`` generate the unit ideal of ``R_v[α][gens]``?"""
    ring_is_field = any(valuation(v, x) < 0 for x in list(alpha) + list(gens))
    if ring_is_field:
        return len(gens) > 0
    return any(valuation(v, g) == 0 for g in gens)


def _unit_ideal_constant(gens: Sequence[FieldElem], alpha: Iterable[FieldElem]) -> bool:
    """Do ``gens`` generate the unit ideal of ``F_q[α][gens]``?

    A proper ideal containing every generator lies in a prime, and that
    prime is the center of a valuation ring containing the ring.  So the
    ideal is proper iff some place ``v`` has ``α ⊆ R_v`` and every
    generator in ``𝔐_v``; with ``gens`` non-empty such ``v`` must be a zero
    of ``gens[0]``, a finite search.
    """
    if not gens:
        return False
    alpha = list(alpha)
    for v in zeros(gens[0]):
        if all(in_ring(v, x) for x in alpha) and all(valuation(v, g) > 0 for g in gens):
            return False
    return True


def prec_definitional(a: ZRElem, b: ZRElem, bound: Optional[int] = None) -> bool:
    """``a ≺ b`` by the two defining clauses, checked point by point.

    Clause (a) compares the closed sets ``∩ Z_i[α_i] ⊇ ∩ W_j[β_j]`` exactly.
    Clause (b) runs over the base points over the witness places, the
    places named by the data and a fresh place, and over every choice map
    ``σ: J_s → ∪ β_j``.
    """
    _same_base(a, b)
    m = a.base
    lhs, rhs = WHOLE, WHOLE
    for t in a.terms:
        lhs = lhs + locus(m, t)
    for t in b.terms:
        rhs = rhs + locus(m, t)
    if not lhs <= rhs:
        return False
    pts = [m.generic]
    if not m.is_constant:
        for p in witness_points(m, bound, (a, b)) + critical_points(m, (a, b)):
            if p.center not in pts:
                pts.append(p.center)
    for i in a.terms:
        for s in pts:
            if locus_by_ideal(m, i, s):
                continue
            js = [j for j in b.terms if not locus_by_ideal(m, j, s)]
            for sigma in itertools.product(*[sorted(j.alpha, key=str) for j in js]) if js else [()]:
                gens = [x.inverse() for x in sigma]
                if m.is_constant:
                    ok = _unit_ideal_constant(gens, i.alpha)
                elif s == m.generic:
                    ok = len(gens) > 0
                else:
                    ok = _unit_ideal_dvr(m.place_of(s), gens, i.alpha)
                if not ok:
                    return False
    return True


# primes --------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeOracle:
    """``ψ(pt)``: the prime of M^S of elements whose open misses ``pt``."""

    base: DedekindModel
    _point: ZRPoint

    def member(self, x: ZRTerm | ZRElem) -> bool:
        if isinstance(x, ZRTerm):
            return not in_basis_open(self._point, x)
        if x.base != self.base:
            raise BaseMismatch("element over another base")
        return not in_open(self._point, x)


def psi(m: DedekindModel, pt: ZRPoint) -> PrimeOracle:
    if not valid_point(m, pt):
        raise ModelError(f"{pt} is not a point of ZR({m})")
    return PrimeOracle(m, pt)


def member(x: ZRTerm | ZRElem, p: PrimeOracle) -> bool:
    return p.member(x)


def phi(p: PrimeOracle, candidates: Optional[Sequence[Place]] = None) -> ZRPoint:
    """Recover ``(s, R_p)`` from membership queries alone.

    The center is the closed point ``x`` with ``({x}, {1}) ∈ p`` (the generic
    point if there is none); the place is the ``v`` with ``(∅, {1/π_v}) ∈ p``
    (trivial if there is none), searched over ``candidates``.
    """
    m = p.base
    one = m.field.one()
    places = list(candidates) if candidates is not None else witness_places(m.field)
    center = m.generic
    if not m.is_constant:
        hits = []
        for v in places:
            for x in m.points_with_place(v):
                if p.member(ZRTerm.make(ClosedSet.finite([x]), [one])):
                    hits.append(x)
        if len(hits) > 1:
            raise ModelError("oracle is not of the form ψ(pt)")
        center = hits[0] if hits else m.generic
    found = [v for v in places if not v.is_trivial and p.member(ZRTerm.make(EMPTY, [uniformizer(m.field, v).inverse()]))]
    if len(found) > 1:
        raise ModelError("oracle is not of the form ψ(pt)")
    place = found[0] if found else Place.trivial()
    pt = ZRPoint(center, place)
    if not valid_point(m, pt):
        raise ModelError("oracle is not of the form ψ(pt)")
    return pt


# the space ------------------------------------------------------------------------


@dataclass(frozen=True)
class ZRSpace:
    """``ZR^f(K, S)`` as a Dedekind model together with its point description."""

    base: DedekindModel
    model: DedekindModel

    def point(self, pid: str) -> ZRPoint:
        if self.base.is_constant:
            return ZRPoint(self.base.generic, self.model.place_of(pid))
        return ZRPoint(pid, self.model.place_of(pid))

    def pid(self, pt: ZRPoint) -> str:
        if not valid_point(self.base, pt):
            raise ModelError(f"{pt} is not a point of ZR({self.base})")
        if self.base.is_constant:
            if pt.place.is_trivial:
                return self.model.generic
            return pt.place.label(self.model.field.var)
        return pt.center


def zr_space(m: DedekindModel) -> ZRSpace:
    label = f"ZR({m})"
    if m.is_constant:
        model = DedekindModel.all_except(m.field, label=label)
    else:
        model = DedekindModel(m.field, m.mode, m.exceptions, m.extra, m.points, m.generic, label)
    return ZRSpace(m, model)


def pi_morphism(m: DedekindModel) -> ModelHom:
    """``π: (s, R) ↦ s``."""
    z = zr_space(m)
    if m.is_constant:
        return ModelHom.make(z.model, m, {})
    return ModelHom.make(z.model, m, {p: p for p, _ in m.listed_points()})


def is_zr_section(a: FieldElem, opens: Sequence[ZRTerm], base: DedekindModel) -> bool:
    """Is ``a`` in ``R`` at every point of ``∪ U(Z, α)``?  Only poles of ``a`` can fail."""
    if a.is_zero():
        return True
    for v in poles([a]):
        for pt in zr_points_over(base, v):
            if any(in_basis_open(pt, t) for t in opens):
                return False
    return True


def zr_support(base: DedekindModel, gens: Sequence[FieldElem]) -> ZRElem:
    """``β((f_i)_i) = {(∅, {1/f_i})}_i``."""
    if any(g.is_zero() for g in gens):
        raise ValueError("zero generator")
    return ZRElem.make(base, [(EMPTY, [g.inverse()]) for g in gens])


# functoriality and the predicates -----------------------------------------------------


def _ftilde_image(f: ModelHom, pt: ZRPoint) -> ZRPoint:
    return ZRPoint(f(pt.center), pt.place)


def zr_functor(f: ModelHom) -> ModelHom:
    """``f̃: (x, R) ↦ (f(x), R)`` as a hom between Zariski-Riemann spaces."""
    zx, zy = zr_space(f.source), zr_space(f.target)
    if f.source.is_constant:
        return ModelHom.make(zx.model, zy.model, {})
    table = {}
    for x in f.critical_source_points():
        pt = zx.point(x)
        table[x] = zy.pid(_ftilde_image(f, pt))
    for x, _ in f.source.listed_points():
        table.setdefault(x, zy.pid(_ftilde_image(f, zx.point(x))))
    return ModelHom.make(zx.model, zy.model, table)


def _ftilde_fibres(f: ModelHom) -> list[tuple[Place, list[ZRPoint], list[ZRPoint]]]:
    """Per critical place (plus a fresh one and the trivial place): ``f̃``-images and target points."""
    x, y = f.source, f.target
    crit = set(f.critical_places())
    places = sorted(crit, key=Place.sort_key) + [fresh_place(x.field, crit), Place.trivial()]
    out = []
    for v in places:
        images = [_ftilde_image(f, p) for p in zr_points_over(x, v)]
        out.append((v, images, zr_points_over(y, v)))
    return out


def is_separated(f: ModelHom) -> bool:
    """``f̃`` injective."""
    return all(len(im) == len(set(im)) for _, im, _ in _ftilde_fibres(f))


def is_universally_closed(f: ModelHom) -> bool:
    """``f̃`` surjective."""
    return all(set(tg) <= set(im) for _, im, tg in _ftilde_fibres(f))


def is_proper(f: ModelHom) -> bool:
    return is_separated(f) and is_universally_closed(f)


def missing_points(f: ModelHom) -> Optional[list[ZRPoint]]:
    """ZR points of the target outside the image of ``f̃``; ``None`` if infinitely many."""
    x, y = f.source, f.target
    zx = zr_space(x).model
    if zx.is_finite and not zr_space(y).model.is_finite:
        return None
    out = []
    for _, im, tg in _ftilde_fibres(f):
        out.extend(p for p in tg if p not in im)
    return out


def is_profinite(f: ModelHom) -> bool:
    """``f̃`` is a Q-morphism."""
    return is_Q_morphism(zr_functor(f))


@dataclass(frozen=True)
class ProfiniteCertificate:
    """``f̃`` identifies ``ZR(X)`` with the basis open ``U(term)`` of ``ZR(S)``."""

    term: ZRTerm

    def __str__(self) -> str:
        return f"U{self.term}"


def strongly_profinite_certificate(f: ModelHom) -> Optional[ProfiniteCertificate]:
    """A basis open equal to the image of ``f̃``, when ``f`` is profinite and one exists."""
    if not is_profinite(f):
        return None
    missing = missing_points(f)
    if missing is None:
        return None
    s = f.target
    k = s.field
    by_place: dict[Place, list[ZRPoint]] = {}
    for p in missing:
        by_place.setdefault(p.place, []).append(p)
    alpha, z = [], []
    for v, pts in sorted(by_place.items(), key=lambda kv: kv[0].sort_key()):
        if len(pts) == len(zr_points_over(s, v)):
            alpha.append(uniformizer(k, v).inverse())
        elif not s.is_constant:
            z.extend(p.center for p in pts)
        else:
            return None
    term = ZRTerm.make(ClosedSet.finite(z), alpha or [k.one()])
    cert = ProfiniteCertificate(term)
    image_ok = all(
        in_basis_open(p, term) == (p not in missing)
        for p in critical_points(s, (ZRElem.make(s, [term]),), f.critical_places())
    )
    return cert if image_ok else None


def is_strongly_profinite(f: ModelHom) -> bool:
    return strongly_profinite_certificate(f) is not None


# relative compactification ------------------------------------------------------------


@dataclass(frozen=True)
class Compactification:
    model: DedekindModel
    embedding: ModelHom
    structure: ModelHom


def zr_relative(t: DedekindModel, s: DedekindModel, f: ModelHom) -> Compactification:
    """The pushout ``T ⊔_{ZR(K,T)} ZR(K,S)`` with the embedding of ``T``.

    Each point of ``ZR(K,T)`` is identified with its center in ``T`` and with
    its ``f̃``-image in ``ZR(K,S)``.  Over a model with closed points ``π_T``
    is bijective, so every class contains exactly one point of ``ZR(K,S)``
    and the pushout is ``ZR(K,S)`` itself; ``T`` maps in by ``f̃ ∘ π_T⁻¹``.
    Over the constant base ``π_T`` collapses everything to one point and the
    pushout is ``T``.
    """
    if f.source != t or f.target != s:
        raise ModelError("f must be a hom T → S")
    if t.is_constant:
        return Compactification(t, ModelHom.make(t, t, {}), f)
    zs = zr_space(s)
    model = DedekindModel(
        zs.model.field, zs.model.mode, zs.model.exceptions, zs.model.extra, zs.model.points, zs.model.generic, f"ZR^f({t}, {s})"
    )
    ft = zr_functor(f)
    emb = ModelHom.make(t, model, dict(ft.mapping))
    structure = pi_morphism(s)
    structure = ModelHom.make(model, s, dict(structure.mapping))
    return Compactification(model, emb, structure)


def is_strict_q(f: ModelHom, samples: int = 30, seed: int = 0) -> bool:
    """Every sampled ``(U, a)`` on the source is ``f⁻¹(V)`` with ``a`` a section on ``V``.

    For ``U`` the complement of ``Z``, the only candidate is ``V`` the
    complement of ``W = f(Z) ∪ {poles of a outside the image}``; this is a
    bounded check over the sampled sections.
    """
    if not is_Q_morphism(f):
        raise ModelError("strictness is defined for Q-morphisms")
    x, y = f.source, f.target
    rng = random.Random(seed)
    pool = f.critical_source_points()[:6]
    for _ in range(samples):
        a = random_elem(x.field, rng, 2)
        z = ClosedSet.finite(_pole_points(x, a) + rng.sample(pool, min(len(pool), rng.randint(0, 2))))
        if not is_section(x, a, z):
            continue
        if y.is_constant:
            w = z
        else:
            unhit = [q for q in _pole_points(y, a) if f.preimage(ClosedSet.finite([q])) == EMPTY]
            w = ClosedSet.finite({f(p) for p in z.points} | set(unhit))
        if f.preimage(w) != z or not is_section(y, a, w):
            return False
    return True


def zr_idempotent_check(m: DedekindModel) -> bool:
    """``π: ZR(ZR(m)) → ZR(m)`` is an isomorphism."""
    z = zr_space(m).model
    pi = pi_morphism(z)
    return is_P_morphism(pi) and is_Q_morphism(pi)


# sampling ----------------------------------------------------------------------------


def random_term(m: DedekindModel, rng: random.Random, pool: Sequence[str]) -> ZRTerm:
    k = m.field
    if rng.random() < 0.1:
        z = WHOLE
    else:
        z = ClosedSet.finite(rng.sample(list(pool), rng.randint(0, min(2, len(pool)))))
    alpha = [random_elem(k, rng, 2) for _ in range(rng.randint(1, 2))]
    if rng.random() < 0.2:
        alpha.append(k.one())
    return ZRTerm.make(z, alpha)


def term_pool(m: DedekindModel) -> list[str]:
    if m.is_constant:
        return []
    if m.is_finite:
        return [p for p, _ in m.points]
    places = witness_places(m.field, 5 if m.field.is_rational else 2)
    return m.points_over(places[:6]) + [p for p, _ in m.extra if p not in m.points_over(places[:6])]


def random_zr_elem(m: DedekindModel, rng: random.Random, max_terms: int = 3) -> ZRElem:
    pool = term_pool(m)
    return ZRElem.make(m, [random_term(m, rng, pool) for _ in range(rng.randint(0, max_terms))])
