"""Concrete finite groups.

Groups are built from permutation generators and stored as an indexed element
list with id 0 the identity.  Up to ``TABLE_LIMIT`` elements the full Cayley
table is materialized; larger groups multiply by composing permutations.

Permutations are tuples of 0-based images and compose left to right:
``(a * b)[i] == b[a[i]]``.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidPermutation, OrderCapExceeded, ParseError, UnknownFamily

TABLE_LIMIT = 2048
DEFAULT_ORDER_CAP = 20000

Perm = tuple


def compose(a: Perm, b: Perm) -> Perm:
    return tuple(b[i] for i in a)


def perm_inverse(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def check_perm(images: Sequence[int], degree: int) -> Perm:
    p = tuple(images)
    if len(p) != degree or sorted(p) != list(range(degree)):
        raise InvalidPermutation(f"not a permutation of {degree} points: {list(images)}")
    return p


def cycle_perm(degree: int, *cycles: Sequence[int]) -> Perm:
    img = list(range(degree))
    for cyc in cycles:
        for k, x in enumerate(cyc):
            img[x] = cyc[(k + 1) % len(cyc)]
    return tuple(img)


class FiniteGroup:
    """A finite group on ids ``0..order-1`` with ``0`` the identity.

    ``perms[i]`` is a faithful permutation for element ``i``.  The element
    order is fixed at construction, so every derived matrix is reproducible.
    """

    def __init__(self, perms: Sequence[Perm], generators: Sequence[int], name: str = "G",
                 table_limit: int = TABLE_LIMIT):
        self.perms = list(perms)
        self.name = name
        self.generators = list(generators)
        self.order = len(self.perms)
        self.index = {p: i for i, p in enumerate(self.perms)}
        if len(self.index) != self.order:
            raise ValueError("duplicate elements")
        ident = tuple(range(len(self.perms[0])))
        if self.perms[0] != ident:
            raise ValueError("element 0 must be the identity")
        self.elements = list(range(self.order))
        self.table = None
        if self.order <= table_limit:
            idx = self.index
            pm = self.perms
            self.table = [[idx[compose(a, b)] for b in pm] for a in pm]
            self.inv = [row.index(0) for row in self.table]
        else:
            self.inv = [self.index[perm_inverse(p)] for p in self.perms]

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"

    def __len__(self):
        return self.order

    def mult(self, a: int, b: int) -> int:
        if self.table is not None:
            return self.table[a][b]
        return self.index[compose(self.perms[a], self.perms[b])]

    def conj(self, k: int, x: int) -> int:
        """k x k^-1"""
        return self.mult(self.mult(k, x), self.inv[k])

    @cached_property
    def table_array(self) -> np.ndarray:
        if self.table is None:
            raise ValueError("group too large for a Cayley table")
        return np.array(self.table, dtype=np.int32)

    @cached_property
    def commute(self) -> np.ndarray:
        """Boolean matrix ``commute[a, b] == (ab == ba)``."""
        if self.table is not None:
            t = self.table_array
            return t == t.T
        n = self.order
        out = np.zeros((n, n), dtype=bool)
        for a in range(n):
            for b in range(n):
                out[a, b] = self.mult(a, b) == self.mult(b, a)
        return out

    @cached_property
    def is_abelian(self) -> bool:
        return bool(self.commute.all())

    @cached_property
    def fingerprint(self) -> str:
        """Content hash of the Cayley table (independent of the spec string)."""
        h = hashlib.sha256()
        h.update(str(self.order).encode())
        if self.table is not None:
            h.update(self.table_array.astype("<i4").tobytes())
        else:
            for p in self.perms:
                h.update(json.dumps(p).encode())
        return h.hexdigest()

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != 0:
            y = self.mult(y, x)
            k += 1
        return k


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup = field(repr=False, compare=False, hash=False)
    member_ids: tuple

    @property
    def order(self) -> int:
        return len(self.member_ids)

    def __len__(self):
        return len(self.member_ids)

    def __contains__(self, x):
        return x in self._members

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(self.member_ids)

    def is_abelian(self) -> bool:
        c = self.parent.commute
        ids = np.array(self.member_ids)
        return bool(c[np.ix_(ids, ids)].all())

    def as_group(self, name: str | None = None) -> FiniteGroup:
        """Re-index as a stand-alone group; ``embedding[i]`` is the parent id of local id ``i``."""
        g = self.parent
        ids = self.member_ids
        gens = []
        span = {0}
        for x in ids:
            if x not in span:
                gens.append(x)
                span = set(_closure(g, gens))
        local = {x: i for i, x in enumerate(ids)}
        sub = FiniteGroup([g.perms[x] for x in ids], [local[x] for x in gens],
                          name or f"{g.name}<{len(ids)}>")
        sub.embedding = list(ids)
        return sub


def _closure(g: FiniteGroup, gens: Iterable[int]) -> list:
    gens = list(gens)
    seen = {0}
    order = [0]
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = g.mult(x, s)
            if y not in seen:
                seen.add(y)
                order.append(y)
                queue.append(y)
    return order


def generated_subgroup(g: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    return Subgroup(g, tuple(sorted(_closure(g, gens))))


def group_from_permutations(degree: int, gens: Sequence[Sequence[int]], name: str = "G",
                            order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Breadth-first closure of permutation generators.

    Elements are numbered in discovery order; generators are tried in the
    order given, so the numbering is deterministic.
    """
    gens = [check_perm(p, degree) for p in gens]
    ident = tuple(range(degree))
    elems = [ident]
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = compose(x, s)
            if y not in seen:
                seen.add(y)
                elems.append(y)
                queue.append(y)
                if len(elems) > order_cap:
                    raise OrderCapExceeded(f"{name}: order exceeds cap {order_cap}")
    index = {p: i for i, p in enumerate(elems)}
    gen_ids = []
    for s in gens:
        if index[s] != 0 and index[s] not in gen_ids:
            gen_ids.append(index[s])
    return FiniteGroup(elems, gen_ids, name)


def cyclic(n: int, **kw) -> FiniteGroup:
    if n < 1:
        raise ParseError("cyclic group needs n >= 1")
    return group_from_permutations(n, [cycle_perm(n, list(range(n)))], f"C{n}", **kw)


def dihedral(k: int, **kw) -> FiniteGroup:
    """Dihedral group of order ``k``."""
    if k < 2 or k % 2:
        raise ParseError(f"D{k}: dihedral order must be even")
    m = k // 2
    if m == 1:
        gens = [cycle_perm(2, [0, 1])]
        deg = 2
    elif m == 2:
        deg = 4
        gens = [cycle_perm(4, [0, 1], [2, 3]), cycle_perm(4, [0, 2], [1, 3])]
    else:
        deg = m
        rot = cycle_perm(m, list(range(m)))
        ref = tuple((-i) % m for i in range(m))
        gens = [rot, ref]
    return group_from_permutations(deg, gens, f"D{k}", **kw)


def symmetric(n: int, **kw) -> FiniteGroup:
    if n < 1:
        raise ParseError("symmetric group needs n >= 1")
    if n == 1:
        return group_from_permutations(1, [], "S1", **kw)
    gens = [cycle_perm(n, [0, 1])]
    if n > 2:
        gens.append(cycle_perm(n, list(range(n))))
    return group_from_permutations(n, gens, f"S{n}", **kw)


def alternating(n: int, **kw) -> FiniteGroup:
    if n < 1:
        raise ParseError("alternating group needs n >= 1")
    gens = [cycle_perm(n, [0, 1, i]) for i in range(2, n)]
    return group_from_permutations(max(n, 1), gens, f"A{n}", **kw)


def dicyclic(k: int, **kw) -> FiniteGroup:
    """Dicyclic group of order ``k`` (``Q8`` is the quaternion group).

    Presentation <a, x | a^(2t), x^2 = a^t, x a x^-1 = a^-1> with k = 4t,
    realized by its regular representation.
    """
    if k < 8 or k % 4:
        raise ParseError(f"Q{k}: order must be a multiple of 4 and at least 8")
    t = k // 4
    n2 = 2 * t
    elems = [(i, j) for j in range(2) for i in range(n2)]
    pos = {e: p for p, e in enumerate(elems)}

    def mul(u, v):
        (i, j), (r, s) = u, v
        if j == 0:
            return ((i + r) % n2, s)
        # a^i x a^r x^s = a^(i-r) x x^s
        if s == 0:
            return ((i - r) % n2, 1)
        return ((i - r + t) % n2, 0)

    def right_perm(g):
        return tuple(pos[mul(e, g)] for e in elems)

    gens = [right_perm((1, 0)), right_perm((0, 1))]
    return group_from_permutations(k, gens, f"Q{k}", **kw)


def direct_product(a: FiniteGroup, b: FiniteGroup, order_cap: int = DEFAULT_ORDER_CAP,
                   name: str | None = None) -> FiniteGroup:
    """Componentwise product; the pair ``(i, j)`` gets id ``i * |b| + j``."""
    if a.order * b.order > order_cap:
        raise OrderCapExceeded(f"|{a.name} x {b.name}| exceeds cap {order_cap}")
    da = len(a.perms[0])
    perms = []
    for pa in a.perms:
        for pb in b.perms:
            perms.append(pa + tuple(da + x for x in pb))
    gens = [x * b.order for x in a.generators] + list(b.generators)
    return FiniteGroup(perms, gens, name or f"{a.name}x{b.name}")


_FAMILY = re.compile(r"^([CDSAQ])(\d+)$")


def _parse_factor(tok: str, order_cap: int) -> FiniteGroup:
    m = _FAMILY.match(tok)
    if not m:
        raise UnknownFamily(f"unknown group family: {tok!r}")
    fam, k = m.group(1), int(m.group(2))
    if fam == "S" and k > 7 or fam == "A" and k > 8:
        if math.factorial(k) // (2 if fam == "A" else 1) > order_cap:
            raise OrderCapExceeded(f"{tok} exceeds order cap {order_cap}")
    if k > order_cap:
        raise OrderCapExceeded(f"{tok} exceeds order cap {order_cap}")
    build = {"C": cyclic, "D": dihedral, "S": symmetric, "A": alternating, "Q": dicyclic}[fam]
    return build(k, order_cap=order_cap)


def group_from_spec(spec, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Build a group from text (``C6``, ``D8``, ``S4``, ``C2xC2xC2``) or a perm spec.

    A perm spec is a dict or JSON string
    ``{"kind": "perm", "degree": d, "generators": [[...1-based images...], ...]}``.
    """
    if isinstance(spec, str):
        s = spec.strip()
        if s.startswith("{"):
            try:
                spec = json.loads(s)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad JSON group spec: {exc}") from None
        else:
            factors = [f for f in s.split("x")]
            if not s or any(not f for f in factors):
                raise UnknownFamily(f"cannot parse group spec {spec!r}")
            g = _parse_factor(factors[0], order_cap)
            for f in factors[1:]:
                g = direct_product(g, _parse_factor(f, order_cap), order_cap=order_cap)
            g.name = s
            return g
    if not isinstance(spec, dict) or spec.get("kind") != "perm":
        raise UnknownFamily(f"unsupported group spec: {spec!r}")
    try:
        degree = int(spec["degree"])
        gens = [[int(x) - 1 for x in p] for p in spec["generators"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad perm spec: {exc}") from None
    return group_from_permutations(degree, gens, spec.get("name", "perm"), order_cap=order_cap)


def centralizer(g: FiniteGroup, ids: Sequence[int]) -> Subgroup:
    ids = list(ids)
    if not ids:
        raise ValueError("centralizer needs at least one element")
    for x in ids:
        if not 0 <= x < g.order:
            raise ValueError(f"invalid element id {x}")
    c = g.commute
    mask = np.logical_and.reduce([c[x] for x in ids])
    return Subgroup(g, tuple(int(i) for i in np.flatnonzero(mask)))


def conjugacy_classes(g: FiniteGroup) -> list:
    """``[(rep, size), ...]`` with rep the minimal id of its class, ordered by rep."""
    seen = np.zeros(g.order, dtype=bool)
    out = []
    for x in range(g.order):
        if seen[x]:
            continue
        cls = conjugacy_class(g, x)
        seen[list(cls)] = True
        out.append((x, len(cls)))
    return out


def conjugacy_class(g: FiniteGroup, x: int) -> set:
    if g.table is not None:
        t = g.table_array
        ks = np.arange(g.order)
        return set(int(v) for v in t[t[ks, x], np.array(g.inv)])
    return {g.conj(k, x) for k in range(g.order)}


def maximal_abelian_subgroups(g: FiniteGroup) -> list:
    """All maximal abelian subgroups, sorted by (order descending, members).

    An abelian subgroup A is maximal exactly when C_G(A) = A; non-maximal ones
    are extended by elements of C_G(A) \\ A.  Memoized on member sets.
    """
    if g.is_abelian:
        return [Subgroup(g, tuple(range(g.order)))]
    found = set()
    visited = set()
    c = g.commute

    def extend(members: frozenset):
        if members in visited:
            return
        visited.add(members)
        mask = np.logical_and.reduce([c[x] for x in members])
        cent = [int(i) for i in np.flatnonzero(mask)]
        if len(cent) == len(members):
            found.add(tuple(sorted(members)))
            return
        for y in cent:
            if y in members:
                continue
            new = set(members)
            frontier = list(members)
            power = y
            while power not in members:
                for a in frontier:
                    new.add(g.mult(a, power))
                power = g.mult(power, y)
            extend(frozenset(new))

    extend(frozenset([0]))
    subs = [Subgroup(g, m) for m in found]
    subs.sort(key=lambda s: (-s.order, s.member_ids))
    return subs
