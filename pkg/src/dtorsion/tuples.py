"""Commuting n-tuples and their orbits under diagonal conjugation.

A commuting n-tuple is the holonomy of a flat bundle on the n-torus; orbits
under simultaneous conjugation are the gauge classes.  Enumeration descends
through centralizers: g_1 ranges over class representatives, g_2 over
representatives of C(g_1)-orbits inside C(g_1), and so on.  Taking the
minimal id in every orbit at every level yields the lexicographically minimal
tuple of each G-orbit, so no global deduplication is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .errors import BudgetExceeded
from .groups import FiniteGroup

DEFAULT_ORBIT_CAP = 10 ** 7


@dataclass(frozen=True)
class TupleOrbit:
    rep: tuple
    stabilizer_order: int
    orbit_size: int

    def to_json(self) -> dict:
        return {"rep": list(self.rep), "stab": self.stabilizer_order, "orbit": self.orbit_size}


def _conj_images(g: FiniteGroup, x: int, acting: np.ndarray) -> np.ndarray:
    t = g.table_array
    return t[t[acting, x], np.asarray(g.inv)[acting]]


def _orbits_in(g: FiniteGroup, acting: np.ndarray, domain: np.ndarray):
    """Yield ``(rep, stabilizer)`` for the conjugation orbits of ``acting`` on ``domain``."""
    seen = set()
    comm = g.commute
    for x in domain.tolist():
        if x in seen:
            continue
        imgs = _conj_images(g, x, acting)
        seen.update(imgs.tolist())
        yield x, acting[comm[x, acting]]


def commuting_tuple_count(g: FiniteGroup, n: int, cap: int | None = None) -> int:
    """|X_n(G)| via |X_n(H)| = sum over H-classes of |class| * |X_{n-1}(C_H(x))|."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    memo = {}
    comm = g.commute

    def count(members: np.ndarray, k: int) -> int:
        if k == 0:
            return 1
        size = len(members)
        if k == 1:
            return size
        if comm[np.ix_(members, members)].all():
            return size ** k
        key = (members.tobytes(), k)
        if key in memo:
            return memo[key]
        total = 0
        for x, stab in _orbits_in(g, members, members):
            total += (size // len(stab)) * count(stab, k - 1)
        memo[key] = total
        return total

    return count(np.arange(g.order), n)


def orbit_representatives(g: FiniteGroup, n: int, cap: int = DEFAULT_ORBIT_CAP) -> list:
    """Lex-minimal representatives of X_n(G)/G, sorted, with stabilizer orders."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if g.table is None:
        raise BudgetExceeded(f"{g.name}: tuple enumeration needs a Cayley table")
    order = g.order
    if g.is_abelian:
        projected = order ** n
    else:
        # orbit count is at most the tuple count
        projected = None
    if projected is not None and projected > cap:
        raise BudgetExceeded(f"{projected} orbits exceed cap {cap}")
    out = []

    def descend(prefix: tuple, acting: np.ndarray, domain: np.ndarray):
        if len(prefix) == n:
            stab = len(acting)
            out.append(TupleOrbit(prefix, stab, order // stab))
            if len(out) > cap:
                raise BudgetExceeded(f"more than {cap} tuple orbits")
            return
        comm = g.commute
        for x, stab in _orbits_in(g, acting, domain):
            descend(prefix + (x,), stab, domain[comm[x, domain]])

    full = np.arange(order)
    descend((), full, full)
    out.sort(key=lambda o: o.rep)
    return out


def commuting_tuples(g: FiniteGroup, n: int):
    """Every commuting n-tuple, by the centralizer recursion (no orbit reduction)."""
    comm = g.commute

    def rec(prefix, domain):
        if len(prefix) == n:
            yield prefix
            return
        for x in domain.tolist():
            yield from rec(prefix + (x,), domain[comm[x, domain]])

    yield from rec((), np.arange(g.order))


def canonical_form(g: FiniteGroup, tup) -> tuple:
    """Lex-minimal tuple in the conjugation orbit of ``tup``."""
    best = None
    for k in range(g.order):
        c = tuple(g.conj(k, x) for x in tup)
        if best is None or c < best:
            best = c
    return best


def tuple_stabilizer_order(g: FiniteGroup, tup) -> int:
    comm = g.commute
    mask = np.ones(g.order, dtype=bool)
    for x in tup:
        mask &= comm[x]
    return int(mask.sum())
