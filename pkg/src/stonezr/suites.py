"""Acceptance suites: each runs one criterion and reports counts, failures and runtime."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

from . import catalog
from .field import GlobalField, enumerate_places, is_irreducible, monic_irreducibles, random_elem
from .lattice import (
    LatticeHom,
    birkhoff_map,
    classify_poly_primes,
    is_injective,
    is_lattice_iso,
    lattice_from_poset,
    poly_t,
    spec,
)
from .model import (
    EMPTY,
    ModelHom,
    all_model_homs,
    identity_hom,
    is_isomorphism,
    is_P_morphism,
    is_Q_morphism,
    model_isomorphism,
    pq_alternatives,
    pq_decompose,
    separated_by_lifting,
    universally_closed_by_lifting,
    witness_places,
)
from .topology import FilterLatticeDescriptor, FinitePoset, all_filters, all_maps, isomorphism, is_surjective_space, posets_up_to, ultrafilters
from .zr import (
    ZRTerm,
    is_separated,
    is_universally_closed,
    is_zr_section,
    ms_equal,
    ms_one,
    phi,
    pi_morphism,
    prec,
    prec_definitional,
    psi,
    random_zr_elem,
    zr_idempotent_check,
    zr_points_over,
    zr_relative,
    zr_space,
)

LAW_BASES = ("specz", "a1fq", "p1fq", "doubled-line", "semilocal", "specfq-point")


@dataclass
class CriterionResult:
    criterion: int
    name: str
    passed: bool = True
    counts: dict[str, int] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    runtime: float = 0.0
    method: str = "exact"
    bound: int | None = None

    def bump(self, key: str, n: int = 1) -> None:
        self.counts[key] = self.counts.get(key, 0) + n

    def fail(self, message: str) -> None:
        self.passed = False
        if len(self.failures) < 20:
            self.failures.append(message)

    def check(self, cond: bool, message: str) -> bool:
        if not cond:
            self.fail(message)
        return cond

    def as_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "name": self.name,
            "verdict": "pass" if self.passed else "fail",
            "counts": dict(sorted(self.counts.items())),
            "failures": self.failures,
            "method": self.method,
            "bound": self.bound,
            "runtime_s": round(self.runtime, 3),
        }


def duality(seed: int = 0) -> CriterionResult:
    r = CriterionResult(1, "Stone duality round trip on posets up to 5 points")
    for p in posets_up_to(5):
        r.bump("posets")
        l = lattice_from_poset(p)
        r.check(isomorphism(spec(l), p) is not None, f"spec(C(P)) ≇ P for {p.relations()}")
        l2 = lattice_from_poset(spec(l))
        table = birkhoff_map(l)
        r.check(len(l2) == len(l) and is_lattice_iso(l, l2, table), f"C(spec L) ≇ L for {p.relations()}")
    return r


def episurj(seed: int = 0) -> CriterionResult:
    r = CriterionResult(2, "maps with injective dual hom are surjective (posets up to 4 points)")
    posets = posets_up_to(4)
    for p in posets:
        for q in posets:
            for f in all_maps(p, q):
                r.bump("maps")
                if is_injective(LatticeHom.from_space_map(f)):
                    r.bump("injective_duals")
                    if not is_surjective_space(f):
                        r.bump("counterexamples")
                        r.fail(f"{f.as_dict()} has injective dual but is not surjective")
    r.counts.setdefault("counterexamples", 0)
    return r


def polyt(seed: int = 0) -> CriterionResult:
    r = CriterionResult(3, "structure of L[t] for lattices of posets up to 4 points")
    for p in posets_up_to(4):
        l = lattice_from_poset(p)
        a = poly_t(l)
        r.bump("lattices")
        pairs = sum(1 for x in l for y in l if x <= y)
        r.check(len(a) == pairs, f"|L[t]| = {len(a)} but #(a <= b) = {pairs}")
        brute = {(x.points, y.points) for x, y in a.prime_elements()}
        listed = {(x.points, y.points) for x, y in classify_poly_primes(l)}
        r.check(brute == listed, f"prime classification differs on {p.relations()}")
    f1 = lattice_from_poset(FinitePoset.discrete(("p",)))
    n = len(spec(poly_t(f1)))
    r.counts["spec_F1_t_points"] = n
    r.check(n == 2, f"spec(F1[t]) has {n} points")
    return r


def ultrafilter_suite(seed: int = 0) -> CriterionResult:
    r = CriterionResult(4, "prime filters = ultrafilters = principal on sets up to 4")
    for n in range(1, 5):
        s = tuple(f"s{i}" for i in range(n))
        d = FilterLatticeDescriptor(s)
        filters = all_filters(s)
        r.bump("filters", len(filters))
        prime = {f for f in filters if d.is_prime_filter(f)}
        maximal = {f for f in filters if not any(f < g for g in filters)}
        principal = {d.principal(x) for x in s}
        r.check(prime == maximal == principal == set(ultrafilters(s)), f"filter classes differ for |S| = {n}")
        r.check(len(prime) == n, f"{len(prime)} prime filters on {n} points")
    return r


def zr_q(seed: int = 0) -> CriterionResult:
    r = CriterionResult(5, "ZR of Q over Spec Z", bound=50)
    m = catalog.load("specz")
    pi = pi_morphism(m)
    r.check(is_P_morphism(pi) and is_Q_morphism(pi), "π is not bijective")
    places = witness_places(m.field, 50)[:-1] + [enumerate_places(m.field, 1, include_trivial=True)[-1]]
    for v in places:
        for pt in zr_points_over(m, v):
            r.bump("points")
            try:
                back = phi(psi(m, pt), places)
            except ValueError as exc:
                r.fail(f"φ(ψ({pt})) raised {exc}")
                continue
            r.check(back == pt, f"φ(ψ({pt})) = {back}")
    return r


def zr_f2(seed: int = 0) -> CriterionResult:
    r = CriterionResult(6, "ZR of F2(t) over Spec F2", method="bounded", bound=3)
    k = GlobalField.function_field(2)
    places = enumerate_places(k, 3, include_trivial=False)
    r.counts["places_deg_le_3"] = len(places)
    cubics = monic_irreducibles(2, 3)
    necklace = (2**3 - 2) // 3
    r.counts["irreducible_cubics"] = len(cubics)
    r.check(len(places) == 6, f"{len(places)} places of degree <= 3")
    r.check(len(cubics) == necklace and all(is_irreducible(c, 2) for c in cubics), "cubic count off")
    base = catalog.load("specfq-point")
    whole = [ZRTerm.make(EMPTY, [k.one()])]
    rng = random.Random(seed)
    for i in range(50):
        a = random_elem(k, rng, 2) if i % 5 else k.elem(i % 2)
        r.bump("samples")
        passes = is_zr_section(a, whole, base)
        r.bump("global_sections", passes)
        r.check(passes == a.is_constant(), f"{a}: section test {passes}")
    return r


VALUATIVE = (
    ("a1fq", "specfq-point", True, False),
    ("p1fq", "specfq-point", True, True),
    ("doubled-line", "specfq-point", False, False),
    ("specz", "specz", True, True),
    ("semilocal", "specz", True, False),
)


def valuative(seed: int = 0) -> CriterionResult:
    r = CriterionResult(7, "valuative criteria against the ZR map", method="bounded")
    for name, base, sep, uc in VALUATIVE:
        f = catalog.scenario(name, base)
        r.bump("scenarios")
        got = (is_separated(f), is_universally_closed(f))
        lift = (separated_by_lifting(f), universally_closed_by_lifting(f))
        r.check(got == lift, f"{name}: ZR map says {got}, lifting says {lift}")
        r.check(got == (sep, uc), f"{name}: expected {(sep, uc)}, got {got}")
    return r


def nagata(seed: int = 0) -> CriterionResult:
    r = CriterionResult(8, "relative ZR compactification")
    a1, pt, p1 = catalog.load("a1fq"), catalog.load("specfq-point"), catalog.load("p1fq")
    c = zr_relative(a1, pt, catalog.scenario("a1fq"))
    iso = model_isomorphism(c.model, p1)
    r.check(iso is not None and is_isomorphism(iso), "ZR^f(A1, pt) is not P1")
    chart = ModelHom.make(a1, c.model, {})
    r.check(c.embedding.same_as(chart), "embedding is not the chart inclusion")
    r.check(is_Q_morphism(c.embedding) and not is_P_morphism(c.embedding), "chart is not a proper open immersion")
    for name in catalog.catalog_names():
        s = catalog.load(name)
        r.bump("builtins")
        rel = zr_relative(s, s, identity_hom(s))
        iso = model_isomorphism(rel.model, zr_space(s).model)
        r.check(iso is not None and is_isomorphism(iso), f"ZR^f({name}, {name}) ≇ ZR({name})")
        r.check(zr_idempotent_check(s), f"ZR(ZR({name})) → ZR({name}) is not an isomorphism")
    return r


def zr_laws(seed: int = 0, n: int = 200, oracle_pairs: int = 20) -> CriterionResult:
    r = CriterionResult(9, "laws of ≺ on M^S", method="bounded")
    rng = random.Random(seed)
    for name in LAW_BASES:
        m = catalog.load(name)
        one = ms_one(m)
        elems = [random_zr_elem(m, rng) for _ in range(n)]
        for i, a in enumerate(elems):
            b, c = elems[(i * 7 + 1) % n], elems[(i * 13 + 5) % n]
            r.bump("elements")
            r.check(ms_equal(a * one, a), f"{name}: 1 is not a unit for {a}")
            r.check(ms_equal(a, a * a), f"{name}: {a} ≉ its square")
            if prec(a, b):
                r.bump("prec_pairs")
                r.check(prec(a + c, b + c), f"{name}: ≺ not additive on {a}, {b}, {c}")
                r.check(prec(a * c, b * c), f"{name}: ≺ not multiplicative on {a}, {b}, {c}")
            # triples built so both premises can hold
            x, y = a * b, a + c
            r.bump("triples")
            if prec(x, a) and prec(a, y):
                r.bump("transitive_premises")
                r.check(prec(x, y), f"{name}: transitivity fails on {x}, {a}, {y}")
            if prec(a, b) and prec(b, c):
                r.bump("transitive_premises")
                r.check(prec(a, c), f"{name}: transitivity fails on {a}, {b}, {c}")
        for _ in range(oracle_pairs):
            a, b = rng.choice(elems), rng.choice(elems)
            if rng.random() < 0.3:
                b = a + b
            r.bump("oracle_pairs")
            r.check(prec(a, b) == prec_definitional(a, b), f"{name}: fast ≺ differs from the oracle on {a}, {b}")
    return r


def pq(seed: int = 0) -> CriterionResult:
    r = CriterionResult(10, "PQ decomposition among list-mode builtins")
    names = catalog.list_builtins()
    for s in names:
        for t in names:
            for f in all_model_homs(catalog.load(s), catalog.load(t)):
                r.bump("homs")
                d = pq_decompose(f)
                r.check(d.p.compose(d.q).same_as(f), f"{s}→{t}: q∘p ≠ f")
                r.check(is_P_morphism(d.p), f"{s}→{t}: p is not P")
                r.check(is_Q_morphism(d.q), f"{s}→{t}: q is not Q")
                alts = pq_alternatives(f)
                r.check(len(alts) == 1, f"{s}→{t}: {len(alts)} factorizations")
    return r


SUITES: dict[str, Callable[..., CriterionResult]] = {
    "duality": duality,
    "episurj": episurj,
    "polyt": polyt,
    "ultrafilters": ultrafilter_suite,
    "zr-q": zr_q,
    "zr-f2": zr_f2,
    "valuative": valuative,
    "nagata": nagata,
    "zr-laws": zr_laws,
    "pq": pq,
}


def run_suite(name: str, seed: int = 0) -> CriterionResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    start = time.perf_counter()
    result = SUITES[name](seed=seed)
    result.runtime = time.perf_counter() - start
    return result


def run_all(seed: int = 0) -> list[CriterionResult]:
    return [run_suite(name, seed) for name in SUITES]
