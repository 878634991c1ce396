"""Normalized bar complex of a finite group and its homology invariants.

Basis tuples ``[g_1|...|g_n]`` use nonidentity ids only and are numbered in
base ``|G|-1``: ``index = sum((g_i - 1) * (|G|-1)**(n-i))``.  Degree 0 has a
single basis element (the empty tuple).
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product

from .abelian import AbelianInvariants
from .errors import SizeBudgetExceeded
from .groups import FiniteGroup, maximal_abelian_subgroups
from .zmatrix import IntMatrix, elementary_divisors, kernel_basis, kernel_coordinates, \
    quotient_invariants, smith_normal_form

log = logging.getLogger(__name__)

DEFAULT_BAR_BUDGET = 300_000


@lru_cache(maxsize=None)
def signed_permutations(n: int) -> tuple:
    """``((perm, sign), ...)`` for all of S_n, perm as a tuple of positions."""
    out = []
    for p in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        out.append((p, -1 if inv % 2 else 1))
    return tuple(out)


@dataclass(frozen=True)
class BarBasis:
    degree: int
    group_order: int

    @property
    def base(self) -> int:
        return self.group_order - 1

    @property
    def size(self) -> int:
        return self.base ** self.degree

    def index(self, tup) -> int:
        b = self.base
        k = 0
        for x in tup:
            if x == 0:
                raise ValueError("normalized bar basis excludes the identity")
            k = k * b + (x - 1)
        return k

    def tuple(self, k: int) -> tuple:
        b = self.base
        out = []
        for _ in range(self.degree):
            k, r = divmod(k, b)
            out.append(r + 1)
        return tuple(reversed(out))

    def tuples(self):
        """All basis tuples in index order."""
        return product(range(1, self.group_order), repeat=self.degree)


def check_budget(g: FiniteGroup, n: int, budget: int = DEFAULT_BAR_BUDGET):
    size = (g.order - 1) ** n
    if size > budget:
        raise SizeBudgetExceeded(
            f"{g.name}: bar complex degree {n} has {size} basis tuples (budget {budget})")


def boundary_matrix(g: FiniteGroup, n: int, budget: int = DEFAULT_BAR_BUDGET,
                    first=None) -> IntMatrix:
    """Matrix of d_n : C_n -> C_{n-1}; faces containing the identity are dropped.

    With ``first`` given, only the columns ``[g_1|...]`` with ``g_1`` in
    ``first`` are built (in that order).
    """
    if n < 1:
        raise ValueError("boundary_matrix needs n >= 1")
    b = g.order - 1
    rows = b ** (n - 1)
    if first is None:
        check_budget(g, n, budget)
        first = range(1, g.order)
    else:
        first = [x for x in first if x != 0]
        if len(first) * rows > budget:
            raise SizeBudgetExceeded(
                f"{g.name}: {len(first) * rows} boundary columns in degree {n} (budget {budget})")
    if b == 0:
        return IntMatrix(rows, 0)
    mult = g.mult
    cols = []
    sign_last = -1 if n % 2 else 1
    for t in product(first, *[range(1, g.order)] * (n - 1)):
        col = {}
        # face 0: drop g_1
        k = 0
        for x in t[1:]:
            k = k * b + x - 1
        col[k] = 1
        # middle faces
        for i in range(n - 1):
            p = mult(t[i], t[i + 1])
            if p == 0:
                continue
            k = 0
            for x in t[:i]:
                k = k * b + x - 1
            k = k * b + p - 1
            for x in t[i + 2:]:
                k = k * b + x - 1
            s = -1 if i % 2 == 0 else 1  # (-1)^(i+1)
            col[k] = col.get(k, 0) + s
        k = 0
        for x in t[:-1]:
            k = k * b + x - 1
        col[k] = col.get(k, 0) + sign_last
        cols.append({r: v for r, v in col.items() if v})
    return IntMatrix(rows, len(cols), cols)


def boundary_generators(g: FiniteGroup, n: int, budget: int = DEFAULT_BAR_BUDGET) -> IntMatrix:
    """Columns spanning the same lattice B_{n-1} as :func:`boundary_matrix`.

    Expanding d d [a|b|t] = 0 gives d[ab|t] = d[b|t] + (terms d[a|...]), so
    columns whose first entry is a generator of G already span the image.
    """
    gens = sorted({x for x in g.generators if x != 0})
    if len(gens) >= g.order - 1:
        return boundary_matrix(g, n, budget)
    check_budget(g, n - 1, budget)
    return boundary_matrix(g, n, budget, first=gens)


def alternating_word(g: FiniteGroup, tup) -> dict:
    """Sum over S_n of sgn(s) [g_s(1)|...|g_s(n)] as a sparse chain vector."""
    n = len(tup)
    if any(x == 0 for x in tup):
        return {}
    basis = BarBasis(n, g.order)
    out = {}
    for p, s in signed_permutations(n):
        k = basis.index(tuple(tup[i] for i in p))
        out[k] = out.get(k, 0) + s
    return {k: v for k, v in out.items() if v}


def z0n_generators(g: FiniteGroup, n: int, orbits=None, all_tuples: bool = False) -> list:
    """Alternating words on commuting tuples (orbit representatives by default)."""
    from .tuples import commuting_tuples, orbit_representatives

    if all_tuples:
        reps = commuting_tuples(g, n)
    else:
        reps = (o.rep for o in (orbits if orbits is not None else orbit_representatives(g, n)))
    out = []
    for t in reps:
        w = alternating_word(g, t)
        if w:
            out.append(w)
    return out


class _Timer:
    def __init__(self):
        self.ms = {}

    def __call__(self, key):
        timer = self

        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.ms[key] = timer.ms.get(key, 0.0) + 1000 * (time.perf_counter() - self.t0)

        return _Ctx()


def _boundary_image(g, n, budget, full):
    return boundary_matrix(g, n, budget) if full else boundary_generators(g, n, budget)


def _rank_of_boundary(g, n, budget, cache, full=False):
    if n == 1:
        return 0
    key = ("rank", n)
    if key not in cache:
        cache[key] = len(elementary_divisors(_boundary_image(g, n, budget, full)))
    return cache[key]


def homology(g: FiniteGroup, n: int, budget: int = DEFAULT_BAR_BUDGET, timings: dict | None = None,
             _cache: dict | None = None, full: bool = False) -> AbelianInvariants:
    """H_n(G, Z): torsion from the Smith divisors of d_{n+1}, free rank from ranks.

    ``full=True`` uses every column of d_{n+1} instead of the generator columns.
    """
    if n == 0:
        return AbelianInvariants((), 1)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    return quotient_of_cycles(g, n, [], budget, timings, _cache, full)


def quotient_of_cycles(g: FiniteGroup, n: int, extra: list, budget: int = DEFAULT_BAR_BUDGET,
                       timings: dict | None = None, _cache: dict | None = None,
                       full: bool = False) -> AbelianInvariants:
    """Z_n / (B_n + <extra>) for cycles ``extra``.

    Since C_n / Z_n embeds in C_{n-1} it is free, so the torsion of
    Z_n / L equals the torsion of C_n / L and the Smith divisors of the
    generator matrix of L give the answer directly.
    """
    check_budget(g, n, budget)
    cache = {} if _cache is None else _cache
    tm = _Timer()
    with tm("boundary"):
        d_next = _boundary_image(g, n + 1, budget, full)
    with tm("snf"):
        divs = elementary_divisors(d_next.hstack(extra) if extra else d_next)
        zn_rank = (g.order - 1) ** n - _rank_of_boundary(g, n, budget, cache, full)
    if timings is not None:
        timings.update(tm.ms)
    return AbelianInvariants.from_orders([d for d in divs if d > 1], zn_rank - len(divs))


def h0n(g: FiniteGroup, n: int, budget: int = DEFAULT_BAR_BUDGET, paranoid: bool = False,
        timings: dict | None = None, orbits=None, full: bool = False) -> AbelianInvariants:
    """H_{0n}(G, Z) = Z_n / (Z_{0n} + B_n)."""
    if n < 1:
        raise ValueError("h0n is defined for n >= 1")
    check_budget(g, n, budget)
    t0 = time.perf_counter()
    gens = z0n_generators(g, n, orbits=orbits, all_tuples=paranoid)
    t_gen = 1000 * (time.perf_counter() - t0)
    out = quotient_of_cycles(g, n, gens, budget, timings, full=full)
    if timings is not None:
        timings["z0n"] = t_gen
    return out


def embedded_cycles(g: FiniteGroup, sub: FiniteGroup, n: int, budget: int = DEFAULT_BAR_BUDGET) -> list:
    """A Z-basis of Z_n(sub), pushed into C_n(G) along tuple inclusion."""
    check_budget(sub, n, budget)
    if sub.order == 1:
        return []
    emb = sub.embedding
    sb = BarBasis(n, sub.order)
    gb = BarBasis(n, g.order)
    if n == 1:
        basis = [{k: 1} for k in range(sb.size)]
    else:
        basis = kernel_basis(boundary_matrix(sub, n, budget))
    out = []
    for z in basis:
        v = {}
        for k, x in z.items():
            v[gb.index(tuple(emb[y] for y in sb.tuple(k)))] = x
        out.append(v)
    return out


def abelian_subgroup_cycles(g: FiniteGroup, n: int, budget: int = DEFAULT_BAR_BUDGET) -> list:
    """Cycles of all maximal abelian subgroups, embedded in C_n(G)."""
    extra = []
    for sub in maximal_abelian_subgroups(g):
        extra.extend(embedded_cycles(g, sub.as_group(), n, budget))
    return extra


def sha_n(g: FiniteGroup, n: int, budget: int = DEFAULT_BAR_BUDGET,
          timings: dict | None = None, full: bool = False) -> AbelianInvariants:
    """H_n(G) modulo the images of H_n(B) over maximal abelian subgroups B."""
    if n < 1:
        raise ValueError("sha_n is defined for n >= 1")
    check_budget(g, n, budget)
    if g.is_abelian:
        return AbelianInvariants()
    t0 = time.perf_counter()
    extra = abelian_subgroup_cycles(g, n, budget)
    t_sub = 1000 * (time.perf_counter() - t0)
    out = quotient_of_cycles(g, n, extra, budget, timings, full=full)
    if timings is not None:
        timings["subgroups"] = t_sub
    return out


def quotient_via_kernel_coordinates(g: FiniteGroup, n: int, extra: list = (),
                                    budget: int = DEFAULT_BAR_BUDGET) -> AbelianInvariants:
    """Z_n / (B_n + <extra>) by kernel coordinates of the relations.

    Smith form of d_n with transforms gives a basis of Z_n; every relation is
    rewritten in that basis and the relation lattice is diagonalized.  Slower
    than :func:`quotient_of_cycles`; used as an independent check.
    """
    check_budget(g, n + 1, budget)
    size = (g.order - 1) ** n
    if n == 1:
        sf = smith_normal_form(IntMatrix(1, size))
    else:
        sf = smith_normal_form(boundary_matrix(g, n, budget))
    k = size - sf.rank
    d_next = boundary_matrix(g, n + 1, budget)
    rel_cols = [dict((i, x) for i, x in enumerate(kernel_coordinates(col, sf)) if x)
                for col in list(d_next.columns) + list(extra)]
    return quotient_invariants(k, IntMatrix(k, len(rel_cols), rel_cols))
