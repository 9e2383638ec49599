"""Finite distributive lattices (II-rings) presented by their spectra.

An element is the closed, i.e. down-closed, point set it names in the base
poset, stored as a bit mask.  The operations follow the closed-set
convention:

* ``a + b`` is the intersection of point sets and ``a * b`` the union;
* ``0`` is the whole space and ``1`` the empty set;
* ``a <= b`` iff ``a + b == b`` iff the points of ``b`` are contained in
  those of ``a``.

Lattices built some other way (products, fibre products, images, the
polynomial extension) are first described by an explicit carrier, see
:class:`AbstractLattice`, and then converted to the spatial form by
computing prime elements.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from operator import itemgetter
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .topology import (
    MAX_POINTS,
    FinitePoset,
    SizeLimitError,
    SpaceMap,
    all_maps,
    bits,
    coproduct,
    posets_up_to,
)

MAX_CATEGORICAL_BOUND = 5


class OwnerMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Lattice:
    base_poset: FinitePoset

    def __post_init__(self) -> None:
        if len(self.base_poset) > MAX_POINTS:
            raise SizeLimitError(f"{len(self.base_poset)} points exceeds the limit of {MAX_POINTS}")

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(self.base_poset.closed_sets())

    @cached_property
    def _mask_set(self) -> frozenset[int]:
        return frozenset(self.masks)

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self) -> Iterator["LatticeElem"]:
        return (LatticeElem(self, m) for m in self.masks)

    @property
    def degenerate(self) -> bool:
        """True for the one-element lattice where ``0 == 1``."""
        return len(self.base_poset) == 0

    @property
    def zero(self) -> "LatticeElem":
        return LatticeElem(self, self.base_poset.full)

    @property
    def one(self) -> "LatticeElem":
        return LatticeElem(self, 0)

    def elem(self, ids: Iterable[str]) -> "LatticeElem":
        m = self.base_poset.mask(ids)
        if m not in self._mask_set:
            raise ValueError(f"{sorted(ids)} is not closed under specialization")
        return LatticeElem(self, m)

    def from_mask(self, mask: int) -> "LatticeElem":
        if mask not in self._mask_set:
            raise ValueError("mask is not closed under specialization")
        return LatticeElem(self, mask)

    def point_closure(self, point: str) -> "LatticeElem":
        i = self.base_poset.index(point)
        return LatticeElem(self, self.base_poset.closures[i])

    def prime_elements(self) -> list["LatticeElem"]:
        return [LatticeElem(self, m) for m in _prime_masks(self.base_poset)]


@dataclass(frozen=True)
class LatticeElem:
    owner: Lattice
    points: int

    def _check(self, other: "LatticeElem") -> None:
        if not isinstance(other, LatticeElem):
            raise TypeError("lattice element expected")
        if other.owner != self.owner:
            raise OwnerMismatch("elements belong to different lattices")

    def __add__(self, other: "LatticeElem") -> "LatticeElem":
        self._check(other)
        return LatticeElem(self.owner, self.points & other.points)

    def __mul__(self, other: "LatticeElem") -> "LatticeElem":
        self._check(other)
        return LatticeElem(self.owner, self.points | other.points)

    def __le__(self, other: "LatticeElem") -> bool:
        self._check(other)
        return other.points & ~self.points == 0

    def __lt__(self, other: "LatticeElem") -> bool:
        return self <= other and self != other

    def ids(self) -> list[str]:
        return sorted(self.owner.base_poset.ids(self.points))

    def __str__(self) -> str:
        return "{" + ",".join(self.ids()) + "}"


def add(a: LatticeElem, b: LatticeElem) -> LatticeElem:
    return a + b


def mul(a: LatticeElem, b: LatticeElem) -> LatticeElem:
    return a * b


def leq(a: LatticeElem, b: LatticeElem) -> bool:
    return a <= b


def lattice_from_poset(p: FinitePoset) -> Lattice:
    """All specialization-closed subsets of ``p`` with the closed-set operations."""
    return Lattice(p)


def _prime_elements(elements: Sequence, leq_: Callable, mul_: Callable, one) -> list:
    """Prime elements straight from the definition.

    ``p`` is prime when ``p != 1`` and ``x * y <= p`` forces ``x <= p`` or
    ``y <= p``.  In a finite lattice every ideal is principal, so these are
    exactly the generators of the prime ideals.
    """
    out = []
    for p in elements:
        if p == one:
            continue
        outside = [x for x in elements if not leq_(x, p)]
        if all(not leq_(mul_(x, y), p) for x, y in itertools.combinations_with_replacement(outside, 2)):
            out.append(p)
    return out


@lru_cache(maxsize=4096)
def _prime_masks(p: FinitePoset) -> tuple[int, ...]:
    l = Lattice(p)
    return tuple(e.points for e in _prime_elements(list(l), lambda a, b: a <= b, lambda a, b: a * b, l.one))


def _prime_ideals_by_subsets(elements: Sequence, leq_, add_, mul_, one) -> list[frozenset]:
    """Prime ideals by enumerating every subset of the carrier (tiny carriers only)."""
    n = len(elements)
    if n > 12:
        raise SizeLimitError("subset enumeration of ideals is limited to 12 elements")
    out = []
    for code in range(1, 1 << n):
        ideal = frozenset(elements[i] for i in range(n) if code >> i & 1)
        if one in ideal:
            continue
        if any(add_(a, b) not in ideal for a in ideal for b in ideal):
            continue
        if any(leq_(x, a) and x not in ideal for a in ideal for x in elements):
            continue
        if any(mul_(x, y) in ideal and x not in ideal and y not in ideal for x in elements for y in elements):
            continue
        out.append(ideal)
    return out


def spec(l: "Lattice | AbstractLattice") -> FinitePoset:
    """The prime spectrum, ordered so that larger prime ideals are specializations.

    For a spatial lattice each prime element is the closure of exactly one
    base point and the spectrum point carries that id, which makes the
    natural isomorphism ``spec(lattice_from_poset(P)) ≅ P`` an equality
    whenever it holds.
    """
    if isinstance(l, AbstractLattice):
        return l.spec()
    primes = l.prime_elements()
    names = []
    base = l.base_poset
    for p in primes:
        owners = [base.points[i] for i in range(len(base)) if base.closures[i] == p.points]
        names.append(owners[0] if len(owners) == 1 else f"p{len(names)}")
    return _order_primes(primes, names, lambda a, b: a <= b)


def _order_primes(primes: Sequence, names: Sequence[str], leq_: Callable) -> FinitePoset:
    # x ⊑ y  iff  ideal(y) ⊆ ideal(x)  iff  p_y <= p_x
    pairs = [
        (names[i], names[j])
        for i, j in itertools.permutations(range(len(primes)), 2)
        if leq_(primes[j], primes[i])
    ]
    return FinitePoset.from_relations(names, pairs)


# homomorphisms ------------------------------------------------------------


@dataclass(frozen=True)
class LatticeHom:
    source: Lattice
    target: Lattice
    table: Mapping[int, int] = field(hash=False)

    def __post_init__(self) -> None:
        if set(self.table) != set(self.source.masks):
            raise ValueError("hom table must be total on the source")
        for v in self.table.values():
            if v not in self.target._mask_set:
                raise ValueError("hom table leaves the target")

    def __call__(self, a: LatticeElem) -> LatticeElem:
        if a.owner != self.source:
            raise OwnerMismatch("element is not in the source lattice")
        return LatticeElem(self.target, self.table[a.points])

    def key(self) -> tuple[int, ...]:
        return tuple(self.table[m] for m in self.source.masks)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, LatticeHom)
            and self.source == other.source
            and self.target == other.target
            and self.key() == other.key()
        )

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.key()))

    def is_valid(self) -> bool:
        """Preservation of 0, 1, + and ·, checked on every pair."""
        s, t = self.source, self.target
        if self.table[s.zero.points] != t.zero.points or self.table[s.one.points] != t.one.points:
            return False
        for a, b in itertools.combinations_with_replacement(s.masks, 2):
            if self.table[a & b] != self.table[a] & self.table[b]:
                return False
            if self.table[a | b] != self.table[a] | self.table[b]:
                return False
        return True

    def compose(self, other: "LatticeHom") -> "LatticeHom":
        """``other ∘ self``."""
        if other.source != self.target:
            raise OwnerMismatch("homs are not composable")
        return LatticeHom(self.source, other.target, {m: other.table[v] for m, v in self.table.items()})

    @classmethod
    def from_space_map(cls, f: SpaceMap) -> "LatticeHom":
        """Preimage hom ``C(Y) -> C(X)`` of a map ``f: X -> Y``."""
        src, tgt = Lattice(f.target), Lattice(f.source)
        return cls(src, tgt, {z: f.preimage_mask(z) for z in src.masks})

    @classmethod
    def identity(cls, l: Lattice) -> "LatticeHom":
        return cls(l, l, {m: m for m in l.masks})

    def dual(self) -> SpaceMap:
        """The point map ``spec(target) -> spec(source)``, ``p ↦ h⁻¹(p)``."""
        if not self.is_valid():
            raise ValueError("not a lattice homomorphism")
        s, t = self.source, self.target
        images = []
        for x in range(len(t.base_poset)):
            # h^{-1}(p_x) = {b : x ∈ h(b)}; its largest element is the lattice sum
            gen = s.base_poset.full
            for b in s.masks:
                if self.table[b] >> x & 1:
                    gen &= b
            owners = [y for y in range(len(s.base_poset)) if s.base_poset.closures[y] == gen]
            if len(owners) != 1:
                raise ValueError("preimage of a prime is not a point closure")
            images.append(owners[0])
        return SpaceMap(t.base_poset, s.base_poset, tuple(images))


def is_injective(h: LatticeHom) -> bool:
    return len(set(h.table.values())) == len(h.table)


def is_surjective(h: LatticeHom) -> bool:
    return set(h.table.values()) == set(h.target.masks)


def all_homs(a: Lattice, b: Lattice) -> list[LatticeHom]:
    """Every hom ``a -> b``, obtained as preimage maps of ``spec b -> spec a``."""
    return [LatticeHom.from_space_map(f) for f in all_maps(b.base_poset, a.base_poset)]


def homs_by_search(a: Lattice, b: Lattice) -> list[LatticeHom]:
    """Every hom ``a -> b`` by trying all functions on the carriers."""
    if len(b) ** len(a) > 2_000_000:
        raise SizeLimitError("function search space too large")
    out = []
    src = a.masks
    for values in itertools.product(b.masks, repeat=len(src)):
        h = LatticeHom(a, b, dict(zip(src, values)))
        if h.is_valid():
            out.append(h)
    return out


@lru_cache(maxsize=None)
def _family(bound: int) -> list[Lattice]:
    if bound > MAX_CATEGORICAL_BOUND:
        raise SizeLimitError(f"test family bound {bound} exceeds {MAX_CATEGORICAL_BOUND}")
    return [Lattice(p) for p in posets_up_to(bound)]


@lru_cache(maxsize=4096)
def _hom_keys(a: Lattice, b: Lattice) -> tuple[tuple[int, ...], ...]:
    """Tables of all homs ``a -> b`` as tuples of target masks, in ``a.masks`` order."""
    return tuple(h.key() for h in all_homs(a, b))


def is_monic_cat(h: LatticeHom, bound: int = 4) -> bool:
    """Left-cancellable against every hom from a lattice of a poset with ≤ ``bound`` points."""
    apply = h.table.__getitem__
    for c in _family(bound):
        keys = _hom_keys(c, h.source)
        if len({tuple(map(apply, k)) for k in keys}) != len(keys):
            return False
    return True


def is_epic_cat(h: LatticeHom, bound: int = 4) -> bool:
    """Right-cancellable against every hom into a lattice of a poset with ≤ ``bound`` points."""
    where = {m: i for i, m in enumerate(h.target.masks)}
    pick = itemgetter(*(where[h.table[m]] for m in h.source.masks))
    for c in _family(bound):
        keys = _hom_keys(h.target, c)
        if len(set(map(pick, keys))) != len(keys):
            return False
    return True


def primes_in_image(h: LatticeHom) -> bool:
    """Every prime element of the target lies in the image of ``h``."""
    image = set(h.table.values())
    return all(p.points in image for p in h.target.prime_elements())


# constructions ------------------------------------------------------------


def localize(l: Lattice, z: LatticeElem) -> tuple[Lattice, LatticeHom]:
    """Lattice of the open complement of ``z`` and the restriction hom (``z ↦ 1``)."""
    if z.owner != l:
        raise OwnerMismatch("element is not in the lattice")
    keep = l.base_poset.full & ~z.points
    sub = Lattice(l.base_poset.restrict(keep))
    return sub, LatticeHom(l, sub, {m: _compress(m, keep) for m in l.masks})


def close(l: Lattice, z: LatticeElem) -> tuple[Lattice, LatticeHom]:
    """Lattice of the closed subspace ``z`` (the interval ``[z, 1]``) and the quotient hom."""
    if z.owner != l:
        raise OwnerMismatch("element is not in the lattice")
    sub = Lattice(l.base_poset.restrict(z.points))
    return sub, LatticeHom(l, sub, {m: _compress(m, z.points) for m in l.masks})


def _compress(mask: int, keep: int) -> int:
    out = 0
    for new, old in enumerate(bits(keep)):
        if mask >> old & 1:
            out |= 1 << new
    return out


@dataclass(frozen=True)
class AbstractLattice:
    """A finite lattice given by an explicit carrier and operation callables.

    ``add`` is the join for the order ``a <= b iff a + b == b``; ``mul`` the
    meet.  :meth:`spatial` converts to a :class:`Lattice` and checks that the
    representation map is an isomorphism, which fails unless the carrier is
    a distributive lattice.
    """

    elements: tuple[Hashable, ...]
    add: Callable[[Hashable, Hashable], Hashable] = field(compare=False)
    mul: Callable[[Hashable, Hashable], Hashable] = field(compare=False)
    zero: Hashable
    one: Hashable
    label: Callable[[Hashable], str] = field(default=str, compare=False)

    def leq(self, a, b) -> bool:
        return self.add(a, b) == b

    def __len__(self) -> int:
        return len(self.elements)

    def prime_elements(self) -> list:
        return _prime_elements(self.elements, self.leq, self.mul, self.one)

    def spec(self) -> FinitePoset:
        primes = self.prime_elements()
        return _order_primes(primes, [self.label(p) for p in primes], self.leq)

    @cached_property
    def _spatial(self) -> tuple[Lattice, dict]:
        primes = self.prime_elements()
        base = _order_primes(primes, [self.label(p) for p in primes], self.leq)
        lat = Lattice(base)
        encode = {}
        for a in self.elements:
            m = 0
            for i, p in enumerate(primes):
                if self.leq(a, p):
                    m |= 1 << base.index(self.label(p))
            encode[a] = LatticeElem(lat, m)
        if len(set(encode.values())) != len(self.elements) or len(lat) != len(self.elements):
            raise ValueError("carrier is not a finite distributive lattice")
        for a, b in itertools.product(self.elements, repeat=2):
            if encode[self.add(a, b)] != encode[a] + encode[b] or encode[self.mul(a, b)] != encode[a] * encode[b]:
                raise ValueError("carrier is not a finite distributive lattice")
        return lat, encode

    def spatial(self) -> tuple[Lattice, dict]:
        """``(lattice, encode)`` with ``encode`` an isomorphism onto the spatial form."""
        return self._spatial


def birkhoff_map(l: Lattice) -> dict[int, int]:
    """``a ↦ {primes p : a <= p}`` as a map from ``l`` into ``lattice_from_poset(spec(l))``."""
    primes = l.prime_elements()
    sp = spec(l)
    names = sp.points
    out = {}
    for a in l:
        m = 0
        for idx, p in enumerate(primes):
            if a <= p:
                m |= 1 << sp.index(names[idx])
        out[a.points] = m
    return out


def is_lattice_iso(l1: Lattice, l2: Lattice, table: Mapping[int, int]) -> bool:
    h = LatticeHom(l1, l2, dict(table))
    return h.is_valid() and is_injective(h) and is_surjective(h)


def product(l1: Lattice, l2: Lattice) -> Lattice:
    """Componentwise product; its spectrum is the disjoint union ``"0:x"``, ``"1:y"``."""
    return Lattice(coproduct([l1.base_poset, l2.base_poset]))


def product_pair(l1: Lattice, l2: Lattice, a: LatticeElem, b: LatticeElem) -> LatticeElem:
    """The element ``(a, b)`` of :func:`product`."""
    return LatticeElem(product(l1, l2), a.points | (b.points << len(l1.base_poset)))


def product_abstract(l1: Lattice, l2: Lattice) -> AbstractLattice:
    """The product as an explicit carrier of pairs, for comparison against :func:`product`."""
    pairs = tuple(itertools.product(l1, l2))
    return AbstractLattice(
        pairs,
        lambda x, y: (x[0] + y[0], x[1] + y[1]),
        lambda x, y: (x[0] * y[0], x[1] * y[1]),
        (l1.zero, l2.zero),
        (l1.one, l2.one),
        label=lambda x: f"({x[0]}|{x[1]})",
    )


def fiber_product(h1: LatticeHom, h2: LatticeHom) -> tuple[Lattice, AbstractLattice]:
    """Pairs ``(a, b)`` with ``h1(a) == h2(b)``, in spatial and explicit form."""
    if h1.target != h2.target:
        raise OwnerMismatch("fibre product needs a common target")
    pairs = tuple(
        (a, b) for a in h1.source for b in h2.source if h1(a) == h2(b)
    )
    abstract = AbstractLattice(
        pairs,
        lambda x, y: (x[0] + y[0], x[1] + y[1]),
        lambda x, y: (x[0] * y[0], x[1] * y[1]),
        (h1.source.zero, h2.source.zero),
        (h1.source.one, h2.source.one),
        label=lambda x: f"({x[0]}|{x[1]})",
    )
    return abstract.spatial()[0], abstract


def poly_t(l: Lattice) -> AbstractLattice:
    """``l[t]`` with ``t`` idempotent: pairs ``(a, b)`` standing for ``a + b t`` with ``a <= b``."""
    pairs = tuple((a, b) for a in l for b in l if a <= b)
    return AbstractLattice(
        pairs,
        lambda x, y: (x[0] + y[0], x[1] + y[1]),
        lambda x, y: (x[0] * y[0], x[0] * y[1] + y[0] * x[1] + x[1] * y[1]),
        (l.zero, l.zero),
        (l.one, l.one),
        label=lambda x: f"{x[0]}+{x[1]}t",
    )


def classify_poly_primes(l: Lattice) -> list[tuple[LatticeElem, LatticeElem]]:
    """Prime elements of ``l[t]``: ``p + p t`` and ``p + t`` for each prime ``p`` of ``l``."""
    primes = l.prime_elements()
    return [(p, p) for p in primes] + [(p, l.one) for p in primes]


def poly_prime_candidates(l: Lattice) -> list[tuple[LatticeElem, LatticeElem]]:
    """The coarser shape list ``a + b t`` (``a <= b`` both prime) and ``a + t``.

    Every prime of ``l[t]`` has one of these shapes; not every such element
    is prime (``a < b`` both prime never is).
    """
    primes = l.prime_elements()
    out = [(a, b) for a in primes for b in primes if a <= b]
    return out + [(a, l.one) for a in primes]


@dataclass(frozen=True)
class ImageFactorization:
    surjection: LatticeHom
    injection: LatticeHom
    middle: Lattice


def image_factor(h: LatticeHom) -> ImageFactorization:
    """``h = injection ∘ surjection`` through the image sub-lattice."""
    image = tuple(sorted(set(h.table.values())))
    t = h.target
    abstract = AbstractLattice(
        image,
        lambda a, b: a & b,
        lambda a, b: a | b,
        t.zero.points,
        t.one.points,
        label=lambda m: str(LatticeElem(t, m)),
    )
    middle, encode = abstract.spatial()
    decode = {e.points: m for m, e in encode.items()}
    surj = LatticeHom(h.source, middle, {m: encode[v].points for m, v in h.table.items()})
    inj = LatticeHom(middle, t, decode)
    return ImageFactorization(surj, inj, middle)
