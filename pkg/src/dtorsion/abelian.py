"""Finitely generated abelian groups by their invariant factors."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import gcd, prod

from sympy import factorint

from .errors import NotASummand


def primary_parts(orders) -> Counter:
    """Multiset of prime powers ``(p, j)`` for a list of cyclic orders."""
    out = Counter()
    for d in orders:
        if d > 1:
            for p, j in factorint(int(d)).items():
                out[(p, j)] += 1
    return out


def _from_primary(parts: Counter) -> tuple:
    by_prime = {}
    for (p, j), cnt in parts.items():
        by_prime.setdefault(p, []).extend([p ** j] * cnt)
    if not by_prime:
        return ()
    length = max(len(v) for v in by_prime.values())
    factors = [1] * length
    for powers in by_prime.values():
        powers.sort()
        pad = [1] * (length - len(powers)) + powers
        for i, q in enumerate(pad):
            factors[i] *= q
    return tuple(f for f in factors if f > 1)


@dataclass(frozen=True)
class AbelianInvariants:
    """``Z/d_1 + ... + Z/d_t + Z^free_rank`` with ``d_i >= 2`` and ``d_i | d_{i+1}``."""

    torsion: tuple = ()
    free_rank: int = 0

    @classmethod
    def from_orders(cls, orders, free_rank: int = 0) -> "AbelianInvariants":
        """Canonicalize any list of cyclic orders (1s dropped, 0 counts as Z)."""
        orders = list(orders)
        free_rank += sum(1 for d in orders if d == 0)
        return cls(_from_primary(primary_parts(abs(d) for d in orders if d != 0)), free_rank)

    @property
    def order(self) -> int:
        """Group order; 0 when infinite."""
        return 0 if self.free_rank else prod(self.torsion)

    @property
    def exponent(self) -> int:
        return self.torsion[-1] if self.torsion else 1

    def is_trivial(self) -> bool:
        return not self.torsion and not self.free_rank

    def primary(self) -> Counter:
        return primary_parts(self.torsion)

    def ext(self, m: int) -> "AbelianInvariants":
        """Ext^1(self, Z/m) = sum of Z/gcd(d_i, m); free summands contribute nothing."""
        return AbelianInvariants.from_orders(gcd(d, m) for d in self.torsion)

    def subtract(self, other: "AbelianInvariants") -> "AbelianInvariants":
        """Remove the direct summand ``other`` (multiset removal of primary parts)."""
        if other.free_rank > self.free_rank:
            raise NotASummand(f"{other} is not a summand of {self}")
        left = self.primary()
        for key, cnt in other.primary().items():
            if left[key] < cnt:
                raise NotASummand(f"{other} is not a summand of {self}")
            left[key] -= cnt
        return AbelianInvariants(_from_primary(+left), self.free_rank - other.free_rank)

    def divides(self, other: "AbelianInvariants") -> bool:
        if self.free_rank or other.free_rank:
            return False
        return other.order % self.order == 0

    def to_json(self) -> dict:
        return {"torsion": list(self.torsion), "free_rank": self.free_rank}

    def __str__(self):
        parts = [f"Z/{d}" for d in self.torsion] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"
