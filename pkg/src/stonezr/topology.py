"""Finite coherent spaces presented as posets under specialization.

Orientation is fixed once for the whole package: ``x ⊑ y`` means ``x`` lies
in the closure of ``{y}`` (``x`` is a specialization of ``y``).  Closed sets
are therefore the down-closed sets, and the generic points of irreducible
components are the maximal elements.

Point sets are passed around as ``int`` bit masks over the point indices;
the public helpers accept and return ids wherever a caller is likely to
write them by hand.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

MAX_POINTS = 16
MAX_FILTER_SET = 12
MAX_MAP_SEARCH = 10**7


class SizeLimitError(ValueError):
    """Raised when an exhaustive operation is asked to exceed its bound."""


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class FinitePoset:
    """A finite T0 space recorded through its specialization order.

    ``closures[i]`` is the bit mask of all points ``j`` with ``j ⊑ i``
    (the closure of the point ``i``, including ``i`` itself).
    """

    points: tuple[str, ...]
    closures: tuple[int, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if len(set(self.points)) != len(self.points):
            raise ValueError("duplicate point ids")
        if len(self.closures) != len(self.points):
            raise ValueError("one closure mask per point required")
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.points)})
        n = len(self.points)
        for i, c in enumerate(self.closures):
            if not c >> i & 1:
                raise ValueError("order is not reflexive")
            if c >> n:
                raise ValueError("closure mask out of range")
            for j in bits(c):
                if self.closures[j] & ~c:
                    raise ValueError("order is not transitive")
                if j != i and self.closures[j] >> i & 1:
                    raise ValueError("order is not antisymmetric")

    # construction -----------------------------------------------------

    @classmethod
    def from_relations(
        cls, points: Sequence[str], specializes: Iterable[tuple[str, str]] = ()
    ) -> "FinitePoset":
        """Build from generating pairs ``(a, b)`` meaning ``a ⊑ b``.

        The transitive closure is taken; cycles raise ``ValueError``.
        """
        pts = tuple(points)
        idx = {p: i for i, p in enumerate(pts)}
        down = [1 << i for i in range(len(pts))]
        for a, b in specializes:
            if a not in idx or b not in idx:
                raise ValueError(f"unknown point in relation ({a!r}, {b!r})")
            down[idx[b]] |= 1 << idx[a]
        changed = True
        while changed:
            changed = False
            for i in range(len(pts)):
                acc = down[i]
                for j in bits(down[i]):
                    acc |= down[j]
                if acc != down[i]:
                    down[i] = acc
                    changed = True
        return cls(pts, tuple(down))

    @classmethod
    def discrete(cls, points: Sequence[str]) -> "FinitePoset":
        return cls(tuple(points), tuple(1 << i for i in range(len(points))))

    @classmethod
    def chain(cls, points: Sequence[str]) -> "FinitePoset":
        """Chain with ``points[0]`` the closed point and ``points[-1]`` generic."""
        return cls(tuple(points), tuple((1 << (i + 1)) - 1 for i in range(len(points))))

    # queries ----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    def index(self, point: str) -> int:
        try:
            return self._index[point]
        except KeyError:
            raise KeyError(f"no point {point!r}") from None

    def mask(self, ids: Iterable[str]) -> int:
        m = 0
        for p in ids:
            m |= 1 << self.index(p)
        return m

    def ids(self, mask: int) -> list[str]:
        return [self.points[i] for i in bits(mask)]

    def leq(self, x: str, y: str) -> bool:
        """``x ⊑ y``: x is a specialization of y."""
        return bool(self.closures[self.index(y)] >> self.index(x) & 1)

    def closure_mask(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.closures[i]
        return out

    def is_closed(self, mask: int) -> bool:
        return self.closure_mask(mask) == mask

    def is_open(self, mask: int) -> bool:
        return self.is_closed(self.full & ~mask)

    def maximal(self) -> int:
        """Mask of the generic points of the irreducible components."""
        out = 0
        for i in range(len(self.points)):
            if not any(j != i and self.closures[j] >> i & 1 for j in range(len(self.points))):
                out |= 1 << i
        return out

    def relations(self) -> list[tuple[str, str]]:
        """Covering pairs ``(a, b)`` with ``a ⊏ b`` and nothing strictly between."""
        out = []
        for b, cb in enumerate(self.closures):
            strict = cb & ~(1 << b)
            for a in bits(strict):
                between = strict & ~(1 << a)
                if not any(self.closures[c] >> a & 1 for c in bits(between)):
                    out.append((self.points[a], self.points[b]))
        return out

    def closed_sets(self) -> list[int]:
        """All down-closed masks, in increasing numeric order."""
        n = len(self.points)
        if n > MAX_POINTS:
            raise SizeLimitError(f"{n} points exceeds the limit of {MAX_POINTS}")
        return [m for m in range(1 << n) if self.closure_mask(m) == m]

    def restrict(self, mask: int) -> "FinitePoset":
        """Sub-poset on the points of ``mask`` with the induced order."""
        keep = list(bits(mask))
        pos = {old: new for new, old in enumerate(keep)}
        closures = []
        for old in keep:
            c = 0
            for j in bits(self.closures[old] & mask):
                c |= 1 << pos[j]
            closures.append(c)
        return FinitePoset(tuple(self.points[i] for i in keep), tuple(closures))

    def relabel(self, mapping: Mapping[str, str]) -> "FinitePoset":
        return FinitePoset(tuple(mapping[p] for p in self.points), self.closures)

    def canonical_form(self) -> tuple[int, ...]:
        """Isomorphism invariant: lexicographically least relabelled closure table."""
        n = len(self.points)
        best = None
        for perm in itertools.permutations(range(n)):
            table = []
            for new in range(n):
                old = perm[new]
                c = 0
                for new_j in range(n):
                    if self.closures[old] >> perm[new_j] & 1:
                        c |= 1 << new_j
                table.append(c)
            t = tuple(table)
            if best is None or t < best:
                best = t
        return best if best is not None else ()


def isomorphism(p: FinitePoset, q: FinitePoset) -> dict[str, str] | None:
    """An order isomorphism ``p -> q`` as an id mapping, or ``None``."""
    if len(p) != len(q):
        return None
    n = len(p)
    deg_p = [bin(c).count("1") for c in p.closures]
    deg_q = [bin(c).count("1") for c in q.closures]
    if sorted(deg_p) != sorted(deg_q):
        return None
    for perm in itertools.permutations(range(n)):
        if any(deg_p[i] != deg_q[perm[i]] for i in range(n)):
            continue
        ok = all(
            bool(p.closures[i] >> j & 1) == bool(q.closures[perm[i]] >> perm[j] & 1)
            for i in range(n)
            for j in range(n)
        )
        if ok:
            return {p.points[i]: q.points[perm[i]] for i in range(n)}
    return None


def enumerate_posets(n: int) -> list[FinitePoset]:
    """All posets on ``n`` points up to isomorphism, with ids ``"0".."n-1"``.

    Labelled posets are grown one point at a time (the new point gets a
    down-closed set below it and an up-closed set above it) and then
    deduplicated by canonical form.
    """
    if n > 6:
        raise SizeLimitError("poset enumeration is limited to 6 points")
    labelled: list[tuple[int, ...]] = [()]
    for k in range(n):
        grown = []
        for closures in labelled:
            # down-closed D and up-closed U with every d in D below every u in U
            for d in range(1 << k):
                if any(closures[i] & ~d for i in bits(d)):
                    continue
                for u in range(1 << k):
                    if u & d:
                        continue
                    up_closed = all(
                        (closures[j] >> i & 1) == 0 or (u >> j & 1)
                        for i in bits(u)
                        for j in range(k)
                    )
                    if not up_closed:
                        continue
                    if any(not (closures[uu] >> dd & 1) for uu in bits(u) for dd in bits(d)):
                        continue
                    new = list(closures)
                    for uu in bits(u):
                        new[uu] |= d | (1 << k)
                    new.append(d | (1 << k))
                    grown.append(tuple(new))
        labelled = grown
    seen: dict[tuple[int, ...], FinitePoset] = {}
    for closures in labelled:
        p = FinitePoset(tuple(str(i) for i in range(n)), closures)
        key = p.canonical_form()
        if key not in seen:
            seen[key] = FinitePoset(tuple(str(i) for i in range(n)), key)
    return list(seen.values())


def posets_up_to(n: int) -> list[FinitePoset]:
    out = []
    for k in range(n + 1):
        out.extend(enumerate_posets(k))
    return out


@dataclass(frozen=True)
class SpaceMap:
    """A continuous map between finite spaces: ``images[i]`` is the target index."""

    source: FinitePoset
    target: FinitePoset
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.images) != len(self.source):
            raise ValueError("map must be total on the source")
        for i, c in enumerate(self.source.closures):
            for j in bits(c):
                if not self.target.closures[self.images[i]] >> self.images[j] & 1:
                    raise ValueError("map does not preserve specialization")

    @classmethod
    def from_dict(cls, source: FinitePoset, target: FinitePoset, mapping: Mapping[str, str]) -> "SpaceMap":
        return cls(source, target, tuple(target.index(mapping[p]) for p in source.points))

    def as_dict(self) -> dict[str, str]:
        return {p: self.target.points[self.images[i]] for i, p in enumerate(self.source.points)}

    def image_mask(self, mask: int | None = None) -> int:
        src = self.source.full if mask is None else mask
        out = 0
        for i in bits(src):
            out |= 1 << self.images[i]
        return out

    def preimage_mask(self, mask: int) -> int:
        out = 0
        for i, j in enumerate(self.images):
            if mask >> j & 1:
                out |= 1 << i
        return out

    def compose(self, other: "SpaceMap") -> "SpaceMap":
        """``other ∘ self``."""
        return SpaceMap(self.source, other.target, tuple(other.images[j] for j in self.images))


def all_maps(p: FinitePoset, q: FinitePoset) -> Iterator[SpaceMap]:
    """Every continuous map ``p -> q``."""
    n = len(p)
    if len(q) ** n > MAX_MAP_SEARCH:
        raise SizeLimitError(f"{len(q)}^{n} candidate maps exceeds the limit of {MAX_MAP_SEARCH}")
    for images in itertools.product(range(len(q)), repeat=n):
        ok = True
        for i, c in enumerate(p.closures):
            for j in bits(c):
                if not q.closures[images[i]] >> images[j] & 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            yield SpaceMap(p, q, images)


def identity_map(p: FinitePoset) -> SpaceMap:
    return SpaceMap(p, p, tuple(range(len(p))))


# point-level theorems -------------------------------------------------------


def closure(p: FinitePoset, subset: Iterable[str]) -> set[str]:
    """Topological closure, i.e. the set of all specializations of ``subset``."""
    return set(p.ids(p.closure_mask(p.mask(subset))))


def is_dominant(f: SpaceMap) -> bool:
    """Whether the image is dense; a dense image must contain every generic point."""
    dense = f.target.closure_mask(f.image_mask()) == f.target.full
    if dense:
        generic = f.target.maximal()
        assert generic & ~f.image_mask() == 0, "dominant map misses a generic point"
    return dense


def is_epic_space(f: SpaceMap) -> bool:
    """Every closed ``z`` of the target is the closure of ``image ∩ z``."""
    img = f.image_mask()
    return all(f.target.closure_mask(img & z) == z for z in f.target.closed_sets())


def is_monic_space(f: SpaceMap) -> bool:
    return len(set(f.images)) == len(f.images)


def is_surjective_space(f: SpaceMap) -> bool:
    return f.image_mask() == f.target.full


def image_poset(f: SpaceMap) -> FinitePoset:
    """The image with its induced order."""
    return f.target.restrict(f.image_mask())


# gluing -----------------------------------------------------------------------


def coproduct(ps: Sequence[FinitePoset]) -> FinitePoset:
    """Disjoint union; point ``x`` of the ``k``-th summand becomes ``"k:x"``."""
    points: list[str] = []
    closures: list[int] = []
    offset = 0
    for k, p in enumerate(ps):
        points.extend(f"{k}:{x}" for x in p.points)
        closures.extend(c << offset for c in p.closures)
        offset += len(p)
    return FinitePoset(tuple(points), tuple(closures))


def patch(p1: FinitePoset, p2: FinitePoset, glue: Mapping[str, str]) -> FinitePoset:
    """Pushout of ``p1`` and ``p2`` along an isomorphism of open sub-posets.

    ``glue`` maps the open piece of ``p1`` onto the open piece of ``p2``.
    Glued points keep their ``p1`` id; the other ``p2`` points keep theirs,
    primed if the id is already taken.
    """
    dom = p1.mask(glue.keys())
    cod = p2.mask(glue.values())
    if len(set(glue.values())) != len(glue):
        raise ValueError("glue is not injective")
    if not p1.is_open(dom) or not p2.is_open(cod):
        raise ValueError("glue must identify open sub-posets")
    sub1, sub2 = p1.restrict(dom), p2.restrict(cod)
    for a in glue:
        for b in glue:
            if sub1.leq(a, b) != sub2.leq(glue[a], glue[b]):
                raise ValueError("glue is not an order isomorphism")
    back = {v: k for k, v in glue.items()}
    names = list(p1.points)
    rename2: dict[str, str] = {}
    for x in p2.points:
        if x in back:
            rename2[x] = back[x]
        else:
            new = x
            while new in names:
                new += "'"
            names.append(new)
            rename2[x] = new
    pairs = [(a, b) for a, b in p1.relations()]
    pairs += [(rename2[a], rename2[b]) for a, b in p2.relations()]
    return FinitePoset.from_relations(names, pairs)


# filters on a finite index set --------------------------------------------


@dataclass(frozen=True)
class FilterLatticeDescriptor:
    """The Boolean algebra of subsets of a finite index set, viewed as an II-ring."""

    index_set: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.index_set)

    def subsets(self) -> range:
        return range(1 << self.size)

    def is_filter(self, family: frozenset[int]) -> bool:
        if not family or 0 in family:
            return False
        full = (1 << self.size) - 1
        for a in family:
            # upward closure
            sup = full & ~a
            for extra in _submasks(sup):
                if a | extra not in family:
                    return False
            for b in family:
                if a & b not in family:
                    return False
        return True

    def is_prime_filter(self, family: frozenset[int]) -> bool:
        if not self.is_filter(family):
            return False
        for a in self.subsets():
            for b in self.subsets():
                if a | b in family and a not in family and b not in family:
                    return False
        return True

    def principal(self, s: str) -> frozenset[int]:
        i = self.index_set.index(s)
        return frozenset(a for a in self.subsets() if a >> i & 1)


def _submasks(mask: int) -> Iterator[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def all_filters(s: Sequence[str]) -> list[frozenset[int]]:
    """Every filter on ``s`` by exhaustive search over families of subsets."""
    d = FilterLatticeDescriptor(tuple(s))
    if d.size > 4:
        raise SizeLimitError("exhaustive filter enumeration is limited to 4 points")
    n_sub = 1 << d.size
    out = []
    for code in range(1, 1 << n_sub):
        family = frozenset(a for a in range(n_sub) if code >> a & 1)
        if d.is_filter(family):
            out.append(family)
    return out


def ultrafilters(s: Sequence[str]) -> list[frozenset[int]]:
    """All ultrafilters on a finite set.

    On a finite set every filter is generated by its smallest member (the
    intersection of all members), so a filter is maximal exactly when that
    member is a singleton.
    """
    if len(s) > MAX_FILTER_SET:
        raise SizeLimitError(f"{len(s)} points exceeds the limit of {MAX_FILTER_SET}")
    d = FilterLatticeDescriptor(tuple(s))
    return [d.principal(x) for x in d.index_set]


def maximal_filters(families: Sequence[frozenset[int]]) -> list[frozenset[int]]:
    return [f for f in families if not any(f < g for g in families)]


def spec_boolean(s: Sequence[str]) -> FinitePoset:
    """Spectrum of the Boolean II-ring ``2^s``: the discrete space on ``s``."""
    from .lattice import lattice_from_poset, spec

    return spec(lattice_from_poset(FinitePoset.discrete(tuple(s))))
