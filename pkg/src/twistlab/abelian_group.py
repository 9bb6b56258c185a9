"""Finite abelian groups, their characters and 2-cocycles.

Elements and characters are both exponent tuples.  An element ``g`` of
Z_{n_1} x ... x Z_{n_k} is ``(g_1, ..., g_k)`` and the character with
exponents ``c`` evaluates to ``exp(2 pi i sum_i c_i g_i / n_i)``.

Phases are exact rationals modulo 1, so ``Fraction(1, 4)`` stands for ``i``.

>>> G = FiniteAbelianGroup((2, 2))
>>> alpha = canonical_z22_cocycle()
>>> str(alpha(G.element("a"), G.element("b")))
'1/4'
>>> slant_product(alpha, (1, 0))
(0, 1)
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Sequence

Element = tuple
Irrep = tuple


class CocycleError(ValueError):
    """Raised when a phase table fails the 2-cocycle checks."""


@dataclass(frozen=True, order=True)
class Phase:
    """A root of unity exp(2 pi i value), stored with value in [0, 1)."""

    value: Fraction

    def __init__(self, value=0):
        object.__setattr__(self, "value", Fraction(value) % 1)

    @classmethod
    def parse(cls, text: str) -> "Phase":
        return cls(Fraction(text))

    def __add__(self, other: "Phase") -> "Phase":
        return Phase(self.value + Phase(getattr(other, "value", other)).value)

    def __sub__(self, other: "Phase") -> "Phase":
        return Phase(self.value - Phase(getattr(other, "value", other)).value)

    def __neg__(self) -> "Phase":
        return Phase(-self.value)

    def __bool__(self) -> bool:
        return self.value != 0

    def __str__(self) -> str:
        return f"{self.value.numerator}/{self.value.denominator}"

    def __repr__(self) -> str:
        return f"Phase({self})"

    def to_complex(self) -> complex:
        return complex(math.cos(2 * math.pi * self.value), math.sin(2 * math.pi * self.value))

    def as_int(self, modulus: int) -> int:
        scaled = self.value * modulus
        if scaled.denominator != 1:
            raise ValueError(f"phase {self} is not a multiple of 1/{modulus}")
        return int(scaled) % modulus


_Z22_NAMES = {"e": (0, 0), "a": (1, 0), "b": (0, 1), "ab": (1, 1)}


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Z_{n_1} x ... x Z_{n_k}; elements ordered with the first factor fastest."""

    factors: tuple

    def __post_init__(self):
        factors = tuple(int(n) for n in self.factors)
        if not factors or any(n < 1 for n in factors):
            raise ValueError(f"invalid cyclic factors {self.factors!r}")
        object.__setattr__(self, "factors", factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @cached_property
    def order(self) -> int:
        return math.prod(self.factors)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.factors)

    @cached_property
    def modulus(self) -> int:
        """Common denominator N of every phase the models produce."""
        return math.lcm(self.exponent ** 2, 4)

    @cached_property
    def elements(self) -> tuple:
        ranges = [range(n) for n in reversed(self.factors)]
        return tuple(tuple(reversed(p)) for p in itertools.product(*ranges))

    @cached_property
    def _index(self) -> dict:
        return {g: i for i, g in enumerate(self.elements)}

    @cached_property
    def add_table(self) -> tuple:
        """add_table[i][j] is the index of elements[i] + elements[j]."""
        els = self.elements
        return tuple(tuple(self._index[self.add(g, h)] for h in els) for g in els)

    @property
    def identity(self) -> Element:
        return (0,) * self.rank

    def generators(self) -> list:
        """Unit vectors of the cyclic factors (trivial factors skipped)."""
        gens = []
        for i, n in enumerate(self.factors):
            if n > 1:
                gens.append(tuple(1 if j == i else 0 for j in range(self.rank)))
        return gens

    def index(self, g: Sequence[int]) -> int:
        return self._index[self.reduce(g)]

    def reduce(self, g: Sequence[int]) -> Element:
        if len(g) != self.rank:
            raise ValueError(f"element {g!r} does not match factors {self.factors}")
        return tuple(int(x) % n for x, n in zip(g, self.factors))

    def add(self, g: Sequence[int], h: Sequence[int]) -> Element:
        return tuple((x + y) % n for x, y, n in zip(g, h, self.factors))

    def neg(self, g: Sequence[int]) -> Element:
        return tuple((-x) % n for x, n in zip(g, self.factors))

    def sub(self, g: Sequence[int], h: Sequence[int]) -> Element:
        return tuple((x - y) % n for x, y, n in zip(g, h, self.factors))

    def scale(self, k: int, g: Sequence[int]) -> Element:
        return tuple((k * x) % n for x, n in zip(g, self.factors))

    def element_order(self, g: Sequence[int]) -> int:
        return math.lcm(*(n // math.gcd(x, n) for x, n in zip(g, self.factors)))

    def element(self, name) -> Element:
        """Accept exponent tuples, or the names e, a, b, ab for Z2 x Z2."""
        if isinstance(name, str):
            if self.factors != (2, 2) or name not in _Z22_NAMES:
                raise ValueError(f"unknown element name {name!r}")
            return _Z22_NAMES[name]
        return self.reduce(name)

    def name(self, g: Sequence[int]) -> str:
        if self.factors == (2, 2):
            return {v: k for k, v in _Z22_NAMES.items()}[tuple(g)]
        return "(" + ",".join(str(x) for x in g) + ")"

    def character(self, chi: Sequence[int], g: Sequence[int]) -> Fraction:
        """Phase of chi(g) as a fraction modulo 1."""
        return sum((Fraction(c * x, n) for c, x, n in zip(chi, g, self.factors)), Fraction(0)) % 1

    def character_int(self, chi: Sequence[int], g: Sequence[int]) -> int:
        N = self.modulus
        return sum(c * x * (N // n) for c, x, n in zip(chi, g, self.factors)) % N

    def is_subgroup(self, subset: Iterable[Sequence[int]]) -> bool:
        s = {self.reduce(g) for g in subset}
        return self.identity in s and all(self.add(g, h) in s for g in s for h in s)

    def generated_subgroup(self, gens: Iterable[Sequence[int]]) -> frozenset:
        out = {self.identity}
        frontier = [self.identity]
        gens = [self.reduce(g) for g in gens]
        while frontier:
            g = frontier.pop()
            for h in gens:
                k = self.add(g, h)
                if k not in out:
                    out.add(k)
                    frontier.append(k)
        return frozenset(out)

    def annihilator(self, subset: Iterable[Sequence[int]]) -> frozenset:
        """Characters trivial on every element of ``subset``."""
        subset = list(subset)
        return frozenset(chi for chi in self.elements
                         if all(self.character(chi, g) == 0 for g in subset))

    def subgroups(self) -> list:
        """All subgroups, each as a frozenset, smallest first."""
        found = set()
        for r in range(self.rank + 1):
            for gens in itertools.combinations(self.elements, r):
                found.add(self.generated_subgroup(gens))
        return sorted(found, key=lambda s: (len(s), sorted(s)))


@dataclass(frozen=True)
class Cocycle:
    """A normalized phase table alpha(g, h) on a finite abelian group."""

    group: FiniteAbelianGroup
    table: tuple = field(repr=False)

    def __post_init__(self):
        n = self.group.order
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise CocycleError(f"table must be {n}x{n}")
        rows = tuple(tuple(Fraction(v) % 1 for v in row) for row in self.table)
        object.__setattr__(self, "table", rows)

    def __call__(self, g: Sequence[int], h: Sequence[int]) -> Fraction:
        G = self.group
        return self.table[G.index(g)][G.index(h)]

    @cached_property
    def int_table(self) -> tuple:
        N = self.group.modulus
        out = []
        for row in self.table:
            out.append(tuple(Phase(v).as_int(N) for v in row))
        return tuple(out)

    def value_int(self, g: Sequence[int], h: Sequence[int]) -> int:
        G = self.group
        return self.int_table[G.index(g)][G.index(h)]

    @property
    def is_trivial(self) -> bool:
        return all(v == 0 for row in self.table for v in row)

    def conjugate(self) -> "Cocycle":
        return Cocycle(self.group, tuple(tuple(-v for v in row) for row in self.table))

    def restrict(self, subgroup: Iterable[Sequence[int]]) -> dict:
        """Restriction to a subgroup, as a dict keyed by element pairs."""
        sub = sorted(self.group.reduce(g) for g in subgroup)
        return {(g, h): self(g, h) for g in sub for h in sub}

    def to_json(self) -> list:
        return [[str(Phase(v)) for v in row] for row in self.table]

    @classmethod
    def from_json(cls, group: FiniteAbelianGroup, rows: list) -> "Cocycle":
        return cls(group, tuple(tuple(Fraction(v) for v in row) for row in rows))

    def gauge(self, epsilon: Callable[[Element], Fraction]) -> "Cocycle":
        """alpha'(g,h) = alpha(g,h) eps(g) eps(h) / eps(gh)."""
        G = self.group
        if epsilon(G.identity) % 1 != 0:
            raise CocycleError("gauge function must be trivial at the identity")
        rows = []
        for g in G.elements:
            rows.append(tuple(self(g, h) + epsilon(g) + epsilon(h) - epsilon(G.add(g, h))
                              for h in G.elements))
        return Cocycle(G, tuple(rows))


def validate_cocycle(c: Cocycle) -> bool:
    """True iff c is normalized and satisfies the 2-cocycle condition."""
    G = c.group
    els = G.elements
    for g in els:
        if c(G.identity, g) != 0 or c(g, G.identity) != 0:
            return False
    for g, h, k in itertools.product(els, repeat=3):
        lhs = c(G.add(g, h), k) + c(g, h)
        rhs = c(g, G.add(h, k)) + c(h, k)
        if (lhs - rhs) % 1 != 0:
            return False
    return True


def _require_valid(c: Cocycle) -> None:
    if not validate_cocycle(c):
        raise CocycleError("table is not a normalized 2-cocycle")


def trivial_cocycle(group: FiniteAbelianGroup) -> Cocycle:
    n = group.order
    return Cocycle(group, tuple((Fraction(0),) * n for _ in range(n)))


def canonical_z22_cocycle() -> Cocycle:
    """The standard nontrivial cocycle on Z2 x Z2 (rows/columns e, a, b, ab)."""
    q = Fraction(1, 4)
    table = (
        (0, 0, 0, 0),
        (0, 0, q, -q),
        (0, -q, 0, q),
        (0, q, -q, 0),
    )
    return Cocycle(FiniteAbelianGroup((2, 2)), table)


def pairing_cocycle(group: FiniteAbelianGroup, matrix: Sequence[Sequence[int]]) -> Cocycle:
    """alpha(g,h) = exp(2 pi i sum_{i<j} M_ij g_i h_j / n_j).

    Only the strictly upper triangle of ``matrix`` is used.  The result is
    checked, since the formula needs n_j | n_i M_ij to be well defined.
    """
    n = group.factors
    k = group.rank
    rows = []
    for g in group.elements:
        row = []
        for h in group.elements:
            v = Fraction(0)
            for i in range(k):
                for j in range(i + 1, k):
                    v += Fraction(matrix[i][j] * g[i] * h[j], n[j])
            row.append(v)
        rows.append(tuple(row))
    c = Cocycle(group, tuple(rows))
    _require_valid(c)
    return c


def slant_product(c: Cocycle, g: Sequence[int]) -> Irrep:
    """The character h -> alpha(g,h)/alpha(h,g), returned as exponents."""
    G = c.group
    g = G.reduce(g)
    values = {h: (c(g, h) - c(h, g)) % 1 for h in G.elements}
    exps = []
    for i, n in enumerate(G.factors):
        unit = tuple(1 if j == i else 0 for j in range(G.rank))
        v = values[unit] * n
        if v.denominator != 1:
            raise CocycleError(f"slant product of {g} is not a character")
        exps.append(int(v) % n)
    chi = tuple(exps)
    for h in G.elements:
        if G.character(chi, h) != values[h]:
            raise CocycleError(f"slant product of {g} is not multiplicative")
    return chi


def kernel_subgroup(c: Cocycle) -> frozenset:
    """K_alpha: the elements whose slant character is trivial."""
    G = c.group
    K = frozenset(g for g in G.elements if slant_product(c, g) == G.identity)
    if not G.is_subgroup(K):
        raise CocycleError("slant kernel is not a subgroup")
    return K


def image_subgroup(c: Cocycle) -> frozenset:
    G = c.group
    image = frozenset(slant_product(c, g) for g in G.elements)
    if image != G.annihilator(kernel_subgroup(c)):
        raise CocycleError("slant image differs from the annihilator of the kernel")
    return image


def default_duality(c: Cocycle) -> dict:
    """Isomorphism phi from characters to elements.

    When the slant map is a bijection (as for the canonical Z2 x Z2
    cocycle) phi is its inverse, so phi(g^) = g with g^ the nontrivial
    character trivial on g.  Otherwise the exponent identity is used.
    """
    G = c.group
    slant = {g: slant_product(c, g) for g in G.elements}
    if len(set(slant.values())) == G.order:
        return {chi: g for g, chi in slant.items()}
    return {g: g for g in G.elements}


def check_duality(group: FiniteAbelianGroup, iso: dict) -> None:
    if sorted(iso) != sorted(group.elements) or sorted(iso.values()) != sorted(group.elements):
        raise ValueError("duality map is not a bijection of the group")
    for x in group.elements:
        for y in group.elements:
            if iso[group.add(x, y)] != group.add(iso[x], iso[y]):
                raise ValueError("duality map is not multiplicative")


def dual_cocycle(c: Cocycle, iso: dict | None = None) -> Cocycle:
    """beta(chi, chi') = alpha(phi(chi), phi(chi')) on the dual group."""
    G = c.group
    iso = default_duality(c) if iso is None else {G.reduce(k): G.reduce(v) for k, v in iso.items()}
    check_duality(G, iso)
    rows = tuple(tuple(c(iso[x], iso[y]) for y in G.elements) for x in G.elements)
    beta = Cocycle(G, rows)
    _require_valid(beta)
    return beta


def hat(c: Cocycle, g: Sequence[int]) -> Irrep:
    """Character labelling used alongside ``c``: the inverse of default_duality."""
    iso = default_duality(c)
    inv = {v: k for k, v in iso.items()}
    return inv[c.group.reduce(g)]
