"""Exact arithmetic in ℚ and F_q(t), places and discrete valuations.

Polynomials over F_q are plain tuples of coefficients in ``range(q)``,
little-endian, with no trailing zeros (the zero polynomial is ``()``).
They hash cheaply and compare structurally, which matters because the
Zariski-Riemann code evaluates valuations in tight loops.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Union

Poly = tuple[int, ...]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def primes_up_to(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if _is_prime(p)]


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``|n|`` by trial division."""
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# polynomials over F_q ------------------------------------------------------


def ptrim(a: Iterable[int], q: int) -> Poly:
    c = [x % q for x in a]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def pdeg(a: Poly) -> int:
    return len(a) - 1  # -1 for the zero polynomial


def padd(a: Poly, b: Poly, q: int) -> Poly:
    n = max(len(a), len(b))
    return ptrim(((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)), q)


def pneg(a: Poly, q: int) -> Poly:
    return ptrim((-x for x in a), q)


def psub(a: Poly, b: Poly, q: int) -> Poly:
    return padd(a, pneg(b, q), q)


def pmul(a: Poly, b: Poly, q: int) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return ptrim(out, q)


def pscale(a: Poly, c: int, q: int) -> Poly:
    return ptrim((x * c for x in a), q)


def pdivmod(a: Poly, b: Poly, q: int) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, q)
    r = list(a)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    db = len(b) - 1
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i] * inv % q
        if c:
            quot[i - db] = c
            for j, y in enumerate(b):
                r[i - db + j] = (r[i - db + j] - c * y) % q
    return ptrim(quot, q), ptrim(r[:db] if db > 0 else [], q)


def pmonic(a: Poly, q: int) -> tuple[int, Poly]:
    """``(lead, a / lead)``."""
    if not a:
        raise ZeroDivisionError("zero polynomial has no leading coefficient")
    lead = a[-1]
    return lead, pscale(a, pow(lead, -1, q), q)


def pgcd(a: Poly, b: Poly, q: int) -> Poly:
    while b:
        a, b = b, pdivmod(a, b, q)[1]
    return pmonic(a, q)[1] if a else ()


def ppow(a: Poly, n: int, q: int) -> Poly:
    out: Poly = (1,)
    for _ in range(n):
        out = pmul(out, a, q)
    return out


def pstr(a: Poly, var: str = "t") -> str:
    if not a:
        return "0"
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(terms)


@lru_cache(maxsize=None)
def monic_irreducibles(q: int, degree: int) -> tuple[Poly, ...]:
    """Monic irreducibles of the given degree, by sieving out products of lower ones."""
    if degree < 1:
        return ()
    monics = [tuple(rest) + (1,) for rest in product(range(q), repeat=degree)]
    if degree == 1:
        out = monics
    else:
        reducible = set()
        for d in range(1, degree // 2 + 1):
            for f in monic_irreducibles(q, d):
                for g in _monics(q, degree - d):
                    reducible.add(pmul(f, g, q))
        out = [m for m in monics if m not in reducible]
    return tuple(sorted(out, key=lambda m: tuple(reversed(m))))


def _monics(q: int, degree: int) -> Iterator[Poly]:
    for rest in product(range(q), repeat=degree):
        yield tuple(rest) + (1,)


def is_irreducible(a: Poly, q: int) -> bool:
    if pdeg(a) < 1:
        return False
    _, m = pmonic(a, q)
    return m in monic_irreducibles(q, pdeg(m)) if pdeg(m) <= 8 else _irreducible_by_division(m, q)


def _irreducible_by_division(m: Poly, q: int) -> bool:
    for d in range(1, pdeg(m) // 2 + 1):
        for f in _monics(q, d):
            if not pdivmod(m, f, q)[1]:
                return False
    return True


def poly_factors(a: Poly, q: int) -> list[Poly]:
    """Distinct monic irreducible factors by trial division."""
    if not a:
        raise ValueError("zero polynomial")
    _, m = pmonic(a, q)
    out = []
    d = 1
    while pdeg(m) >= 2 * d:
        for f in monic_irreducibles(q, d):
            quot, rem = pdivmod(m, f, q)
            if not rem:
                out.append(f)
                m = quot
                while True:
                    quot, rem = pdivmod(m, f, q)
                    if rem:
                        break
                    m = quot
        d += 1
    if pdeg(m) >= 1:
        out.append(m)
    return sorted(set(out), key=lambda f: (pdeg(f), tuple(reversed(f))))


# fields and elements --------------------------------------------------------


@dataclass(frozen=True)
class GlobalField:
    kind: str  # "Q" or "Fq"
    q: int = 0
    var: str = "t"

    def __post_init__(self) -> None:
        if self.kind == "Q":
            if self.q:
                raise ValueError("ℚ takes no characteristic")
        elif self.kind == "Fq":
            if not (2 <= self.q <= 97 and _is_prime(self.q)):
                raise ValueError(f"q must be a prime in [2, 97], got {self.q}")
            if not re.fullmatch(r"[a-z]", self.var):
                raise ValueError("variable must be one lowercase letter")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls) -> "GlobalField":
        return cls("Q")

    @classmethod
    def function_field(cls, q: int, var: str = "t") -> "GlobalField":
        return cls("Fq", q, var)

    @property
    def is_rational(self) -> bool:
        return self.kind == "Q"

    def __str__(self) -> str:
        return "Q" if self.is_rational else f"F{self.q}({self.var})"

    def zero(self) -> "FieldElem":
        return self.elem(0)

    def one(self) -> "FieldElem":
        return self.elem(1)

    def gen(self) -> "FieldElem":
        if self.is_rational:
            raise ValueError("ℚ has no variable")
        return FieldElem(self, (0, 1), (1,))

    def elem(self, value: Union[int, Fraction, str, "FieldElem"]) -> "FieldElem":
        if isinstance(value, FieldElem):
            if value.field != self:
                raise ValueError("element from a different field")
            return value
        if isinstance(value, str):
            return parse_elem(self, value)
        if self.is_rational:
            f = Fraction(value)
            return FieldElem(self, f.numerator, f.denominator)
        if isinstance(value, Fraction):
            return self.elem(value.numerator) / self.elem(value.denominator)
        return FieldElem(self, ptrim([value], self.q), (1,))

    def from_polys(self, num: Iterable[int], den: Iterable[int] = (1,)) -> "FieldElem":
        return FieldElem.make(self, ptrim(num, self.q), ptrim(den, self.q))


@dataclass(frozen=True)
class FieldElem:
    """Reduced fraction; ``num``/``den`` are ints for ℚ and coefficient tuples for F_q(t)."""

    field: GlobalField
    num: Union[int, Poly]
    den: Union[int, Poly]

    @classmethod
    def make(cls, k: GlobalField, num, den) -> "FieldElem":
        if k.is_rational:
            f = Fraction(num, den)
            return cls(k, f.numerator, f.denominator)
        q = k.q
        if not den:
            raise ZeroDivisionError("division by zero")
        if not num:
            return cls(k, (), (1,))
        g = pgcd(num, den, q)
        num, den = pdivmod(num, g, q)[0], pdivmod(den, g, q)[0]
        lead, den = pmonic(den, q)
        num = pscale(num, pow(lead, -1, q), q)
        return cls(k, num, den)

    def _other(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        return self.field.elem(other)

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other) -> "FieldElem":
        o = self._other(other)
        k = self.field
        if k.is_rational:
            return FieldElem.make(k, self.num * o.den + o.num * self.den, self.den * o.den)
        q = k.q
        return FieldElem.make(
            k, padd(pmul(self.num, o.den, q), pmul(o.num, self.den, q), q), pmul(self.den, o.den, q)
        )

    __radd__ = __add__

    def __neg__(self) -> "FieldElem":
        if self.field.is_rational:
            return FieldElem(self.field, -self.num, self.den)
        return FieldElem(self.field, pneg(self.num, self.field.q), self.den)

    def __sub__(self, other) -> "FieldElem":
        return self + (-self._other(other))

    def __rsub__(self, other) -> "FieldElem":
        return self._other(other) - self

    def __mul__(self, other) -> "FieldElem":
        o = self._other(other)
        k = self.field
        if k.is_rational:
            return FieldElem.make(k, self.num * o.num, self.den * o.den)
        return FieldElem.make(k, pmul(self.num, o.num, k.q), pmul(self.den, o.den, k.q))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse")
        return FieldElem.make(self.field, self.den, self.num)

    def __truediv__(self, other) -> "FieldElem":
        return self * self._other(other).inverse()

    def __rtruediv__(self, other) -> "FieldElem":
        return self._other(other) * self.inverse()

    def __pow__(self, n: int) -> "FieldElem":
        base = self if n >= 0 else self.inverse()
        out = self.field.one()
        for _ in range(abs(n)):
            out = out * base
        return out

    def is_constant(self) -> bool:
        if self.field.is_rational:
            return True
        return pdeg(self.num) <= 0 and pdeg(self.den) == 0

    def __str__(self) -> str:
        if self.field.is_rational:
            return str(self.num) if self.den == 1 else f"{self.num}/{self.den}"
        v = self.field.var
        n = pstr(self.num, v)
        if self.den == (1,):
            return n
        wrap = lambda s: f"({s})" if "+" in s else s
        return f"{wrap(n)}/{wrap(pstr(self.den, v))}"

    def __repr__(self) -> str:
        return f"FieldElem({self.field}, {self})"


# places ---------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Place:
    kind: str  # "prime" | "poly" | "inf" | "trivial"
    p: int = 0
    pi: Poly = ()

    @classmethod
    def prime(cls, p: int) -> "Place":
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        return cls("prime", p=p)

    @classmethod
    def poly(cls, pi: Iterable[int], q: int) -> "Place":
        pi = ptrim(pi, q)
        if not pi or pi[-1] != 1 or not is_irreducible(pi, q):
            raise ValueError(f"{pi} is not a monic irreducible over F_{q}")
        return cls("poly", pi=pi)

    @classmethod
    def inf(cls) -> "Place":
        return cls("inf")

    @classmethod
    def trivial(cls) -> "Place":
        return cls("trivial")

    @property
    def is_trivial(self) -> bool:
        return self.kind == "trivial"

    @property
    def degree(self) -> int:
        if self.kind == "poly":
            return pdeg(self.pi)
        return 0 if self.is_trivial else 1

    def label(self, var: str = "t") -> str:
        if self.kind == "prime":
            return str(self.p)
        if self.kind == "poly":
            return pstr(self.pi, var)
        return self.kind

    def __str__(self) -> str:
        return self.label()

    def sort_key(self) -> tuple:
        """Enumeration order: by degree, ∞ right after the degree-one places, trivial last."""
        if self.kind == "prime":
            return (1, 0, (self.p,))
        if self.kind == "poly":
            return (self.degree, 0, tuple(reversed(self.pi)))
        if self.kind == "inf":
            return (1, 1, ())
        return (math.inf, 0, ())

    def residue_field(self, k: GlobalField) -> str:
        if self.kind == "prime":
            return f"F{self.p}"
        if self.kind == "inf":
            return f"F{k.q}"
        if self.kind == "poly":
            return f"F{k.q}" if self.degree == 1 else f"F{k.q}[{k.var}]/({self.label(k.var)})"
        return str(k)


def place_sort_key(v: Place) -> tuple:
    return v.sort_key()


def check_place(k: GlobalField, v: Place) -> Place:
    if v.kind == "prime" and not k.is_rational:
        raise ValueError("prime places belong to ℚ")
    if v.kind in ("poly", "inf") and k.is_rational:
        raise ValueError(f"{v.kind} places belong to function fields")
    if v.kind == "poly":
        Place.poly(v.pi, k.q)
    return v


def valuation(v: Place, a: FieldElem) -> int:
    if a.is_zero():
        raise ValueError("valuation of zero")
    if v.is_trivial:
        return 0
    k = a.field
    if v.kind == "prime":
        return _int_mult(a.num, v.p) - _int_mult(a.den, v.p)
    if v.kind == "inf":
        return pdeg(a.den) - pdeg(a.num)
    return _poly_mult(a.num, v.pi, k.q) - _poly_mult(a.den, v.pi, k.q)


def _int_mult(n: int, p: int) -> int:
    n = abs(n)
    c = 0
    while n % p == 0:
        n //= p
        c += 1
    return c


def _poly_mult(a: Poly, pi: Poly, q: int) -> int:
    c = 0
    while True:
        quot, rem = pdivmod(a, pi, q)
        if rem:
            return c
        a = quot
        c += 1


def in_ring(v: Place, a: FieldElem) -> bool:
    return a.is_zero() or valuation(v, a) >= 0


def in_max_ideal(v: Place, a: FieldElem) -> bool:
    if a.is_zero():
        return True
    return valuation(v, a) > 0


def _finite_divisor_places(k: GlobalField, x) -> list[Place]:
    if k.is_rational:
        return [Place("prime", p=p) for p in prime_factors(x)]
    if pdeg(x) < 1:
        return []
    return [Place("poly", pi=f) for f in poly_factors(x, k.q)]


def poles(alpha: Iterable[FieldElem]) -> frozenset[Place]:
    """Non-trivial places where some member has negative valuation."""
    out: set[Place] = set()
    for a in alpha:
        if a.is_zero():
            raise ValueError("zero element has no pole set")
        out.update(_finite_divisor_places(a.field, a.den))
        if not a.field.is_rational and pdeg(a.num) > pdeg(a.den):
            out.add(Place.inf())
    return frozenset(out)


def zeros(a: FieldElem) -> frozenset[Place]:
    if a.is_zero():
        raise ValueError("zero vanishes everywhere")
    out = set(_finite_divisor_places(a.field, a.num))
    if not a.field.is_rational and pdeg(a.num) < pdeg(a.den):
        out.add(Place.inf())
    return frozenset(out)


def divisor_support(a: FieldElem) -> frozenset[Place]:
    return poles([a]) | zeros(a)


def enumerate_places(k: GlobalField, bound: int, include_trivial: bool = True) -> list[Place]:
    """ℚ: primes up to ``bound``.  F_q(t): monic irreducibles of degree up to ``bound`` and ∞."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    if k.is_rational:
        out = [Place("prime", p=p) for p in primes_up_to(bound)]
    else:
        out = [Place("poly", pi=f) for f in monic_irreducibles(k.q, 1)]
        out.append(Place.inf())
        for d in range(2, bound + 1):
            out.extend(Place("poly", pi=f) for f in monic_irreducibles(k.q, d))
    if include_trivial:
        out.append(Place.trivial())
    return out


def fresh_place(k: GlobalField, avoid: Iterable[Place]) -> Place:
    """The first finite place, in enumeration order, not in ``avoid``."""
    avoid = set(avoid)
    if k.is_rational:
        p = 2
        while True:
            if _is_prime(p) and Place("prime", p=p) not in avoid:
                return Place("prime", p=p)
            p += 1
    d = 1
    while True:
        for f in monic_irreducibles(k.q, d):
            v = Place("poly", pi=f)
            if v not in avoid:
                return v
        d += 1


def uniformizer(k: GlobalField, v: Place) -> FieldElem:
    if v.kind == "prime":
        return k.elem(v.p)
    if v.kind == "poly":
        return FieldElem(k, v.pi, (1,))
    if v.kind == "inf":
        return FieldElem(k, (1,), (0, 1))
    raise ValueError("the trivial place has no uniformizer")


def sum_over_places(a: FieldElem) -> int:
    """``Σ deg(v)·v(a)`` over every place where ``v(a) ≠ 0``; zero on F_q(t)."""
    return sum(v.degree * valuation(v, a) for v in divisor_support(a))


# parsing and sampling ---------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([a-z])|(.))")


def parse_elem(k: GlobalField, text: str) -> FieldElem:
    """Parse ``"3/4"``, ``"-2"``, ``"t/(t+1)"``, ``"t^2+1"``, ``"1/t"`` and the like."""
    if k.is_rational:
        try:
            return k.elem(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse rational {text!r}") from exc
    tokens = []
    for num, var, sym in _TOKEN.findall(text):
        if num:
            tokens.append(("n", int(num)))
        elif var:
            if var != k.var:
                raise ValueError(f"unknown variable {var!r} in {text!r}")
            tokens.append(("v", None))
        elif sym.strip():
            if sym not in "+-*/^()":
                raise ValueError(f"unexpected {sym!r} in {text!r}")
            tokens.append(("s", sym))
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take():
        nonlocal pos
        pos += 1
        return tokens[pos - 1]

    def expr() -> FieldElem:
        sign = 1
        if peek() == ("s", "-"):
            take()
            sign = -1
        out = term() * sign
        while peek() in (("s", "+"), ("s", "-")):
            op = take()[1]
            rhs = term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term() -> FieldElem:
        out = factor()
        while True:
            nxt = peek()
            if nxt in (("s", "*"), ("s", "/")):
                op = take()[1]
                rhs = factor()
                out = out * rhs if op == "*" else out / rhs
            elif nxt[0] in ("n", "v") or nxt == ("s", "("):
                out = out * factor()  # implicit product such as 2t
            else:
                return out

    def factor() -> FieldElem:
        base = atom()
        if peek() == ("s", "^"):
            take()
            kind, n = take()
            if kind != "n":
                raise ValueError(f"bad exponent in {text!r}")
            base = base ** n
        return base

    def atom() -> FieldElem:
        kind, val = take() if pos < len(tokens) else (None, None)
        if kind == "n":
            return k.elem(val)
        if kind == "v":
            return k.gen()
        if (kind, val) == ("s", "("):
            out = expr()
            if take() != ("s", ")"):
                raise ValueError(f"unbalanced parentheses in {text!r}")
            return out
        raise ValueError(f"cannot parse {text!r}")

    try:
        out = expr()
    except (IndexError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse {text!r}") from exc
    if pos != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    return out


def parse_place(k: GlobalField, text: str) -> Place:
    text = text.strip()
    if text in ("inf", "∞"):
        return check_place(k, Place.inf())
    if text == "trivial":
        return Place.trivial()
    if k.is_rational:
        if not text.isdigit():
            raise ValueError(f"not a place of ℚ: {text!r}")
        return Place.prime(int(text))
    e = parse_elem(k, text)
    if e.den != (1,):
        raise ValueError(f"not a polynomial: {text!r}")
    return Place.poly(e.num, k.q)


def random_elem(k: GlobalField, rng: random.Random, height: int = 3, nonzero: bool = True) -> FieldElem:
    """A small random element; ``height`` bounds |num|, |den| for ℚ and degrees for F_q(t)."""
    while True:
        if k.is_rational:
            hi = max(2, 6 * height)
            a = k.elem(Fraction(rng.randint(-hi, hi), rng.randint(1, hi)))
        else:
            num = [rng.randrange(k.q) for _ in range(rng.randint(0, height) + 1)]
            den = [rng.randrange(k.q) for _ in range(rng.randint(0, height))] + [1]
            a = k.from_polys(num, den)
        if a or not nonzero:
            return a
