"""Exact sums of N-th roots of unity.

A ``RootSum`` is an element of the group ring Z[Z_N]: ``counts[k]`` is the
integer multiplying exp(2 pi i k / N).  Equality as complex numbers is
decided by reducing modulo the N-th cyclotomic polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


def _poly_divmod(num: list, den: list) -> tuple:
    """Integer polynomial division by a monic divisor (lowest degree first)."""
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        coef = num[i + len(den) - 1]
        if coef:
            q[i] = coef
            for j, d in enumerate(den):
                num[i + j] -= coef * d
    rem = num[: len(den) - 1]
    return q, rem


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple:
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_poly(d)))
            assert not any(rem)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


@dataclass(frozen=True)
class RootSum:
    modulus: int
    counts: tuple

    @classmethod
    def zero(cls, N: int) -> "RootSum":
        return cls(N, (0,) * N)

    @classmethod
    def integer(cls, N: int, value: int) -> "RootSum":
        return cls(N, (value,) + (0,) * (N - 1))

    @classmethod
    def root(cls, N: int, k: int) -> "RootSum":
        c = [0] * N
        c[k % N] = 1
        return cls(N, tuple(c))

    @classmethod
    def from_phases(cls, N: int, phases) -> "RootSum":
        c = [0] * N
        for k in phases:
            c[k % N] += 1
        return cls(N, tuple(c))

    def __add__(self, other: "RootSum") -> "RootSum":
        return RootSum(self.modulus, tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __mul__(self, other: "RootSum") -> "RootSum":
        N = self.modulus
        out = [0] * N
        for i, a in enumerate(self.counts):
            if a:
                for j, b in enumerate(other.counts):
                    if b:
                        out[(i + j) % N] += a * b
        return RootSum(N, tuple(out))

    def shift(self, k: int) -> "RootSum":
        """Multiply by exp(2 pi i k / N)."""
        N = self.modulus
        return RootSum(N, tuple(self.counts[(i - k) % N] for i in range(N)))

    def reduced(self) -> tuple:
        """Canonical coefficients in the basis 1, z, ..., z^(phi(N)-1)."""
        phi = list(cyclotomic_poly(self.modulus))
        _, rem = _poly_divmod(list(self.counts), phi)
        rem = rem + [0] * (len(phi) - 1 - len(rem))
        return tuple(rem)

    def as_integer(self):
        """The integer value, or None if the sum is not a rational integer."""
        r = self.reduced()
        if any(r[1:]):
            return None
        return r[0] if r else 0

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.as_integer() == other
        if not isinstance(other, RootSum):
            return NotImplemented
        return self.modulus == other.modulus and self.reduced() == other.reduced()

    def __hash__(self) -> int:
        return hash((self.modulus, self.reduced()))

    def to_complex(self) -> complex:
        import cmath
        N = self.modulus
        return sum(c * cmath.exp(2j * cmath.pi * k / N) for k, c in enumerate(self.counts))
