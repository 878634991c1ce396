"""Linear algebra over Z/m: Howell forms, nullspaces and module quotients.

Z/m is not a field when m is composite, so echelon forms need the Howell
normalization (pivots dividing m, plus the rows ``(m/d) * row`` fed back in)
to give unique representatives and decidable membership.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .abelian import AbelianInvariants
from .errors import NotSubmodule
from .zmatrix import IntMatrix, _Eliminator, smith_normal_form


def _unit_normalizer(a: int, m: int) -> int:
    """A unit c mod m with c * a = gcd(a, m) (mod m)."""
    d = gcd(a, m)
    mp = m // d
    if mp == 1:
        return 1
    c = pow((a // d) % mp, -1, mp)
    while gcd(c, m) != 1:
        c += mp
    return c


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def howell_form(rows, m: int):
    """Howell form of the row span of ``rows`` over Z/m.

    Returns ``(H, pivots)``: H an int64 array whose rows are in echelon form
    with pivot entries dividing m and entries above each pivot reduced modulo
    it; ``pivots[i]`` is the pivot column of row i.  The form depends only on
    the span.
    """
    if m < 2:
        raise ValueError("modulus must be >= 2")
    if m >= 2 ** 31:
        raise ValueError("modulus too large for int64 arithmetic")
    a = np.array(rows, dtype=np.int64) % m
    if a.ndim == 1:
        a = a.reshape(0 if a.size == 0 else 1, -1)
    ncols = a.shape[1] if a.ndim == 2 else 0
    work = [r for r in a if r.any()]
    out, pivots = [], []
    for j in range(ncols):
        if not work:
            break
        cand = [r for r in work if r[j]]
        if not cand:
            continue
        rest = [r for r in work if not r[j]]
        # gather the column gcd into one row with unimodular 2x2 steps
        piv = cand[0]
        others = []
        for r in cand[1:]:
            x, y = int(piv[j]), int(r[j])
            if y % gcd(x, m) == 0:
                others.append(r)
                continue
            g, s, t = _xgcd(x, y)
            new_piv = (s * piv + t * r) % m
            new_r = ((-(y // g)) * piv + (x // g) * r) % m
            piv = new_piv
            if new_r.any():
                others.append(new_r)
        piv = (piv * _unit_normalizer(int(piv[j]), m)) % m
        d = int(piv[j])
        for r in others:
            q = int(r[j]) // d
            r2 = (r - q * piv) % m
            if r2.any():
                rest.append(r2)
        extra = (piv * (m // d)) % m
        if extra.any():
            rest.append(extra)
        out.append(piv)
        pivots.append(j)
        work = rest
    for i in range(len(out)):
        j, d = pivots[i], int(out[i][pivots[i]])
        for k in range(i):
            q = int(out[k][j]) // d
            if q:
                out[k] = (out[k] - q * out[i]) % m
    H = np.array(out, dtype=np.int64).reshape(len(out), ncols)
    return H, pivots


def reduce_mod(h: np.ndarray, pivots: list, vec, m: int):
    """Coordinates ``q`` and remainder of ``vec`` against a Howell basis."""
    v = np.array(vec, dtype=np.int64) % m
    q = []
    for i, j in enumerate(pivots):
        d = int(h[i, j])
        c = int(v[j]) // d
        if c * d != int(v[j]):
            q.append(0)
            continue
        q.append(c)
        if c:
            v = (v - c * h[i]) % m
    return q, v


def in_span(h, pivots, vec, m) -> bool:
    return not reduce_mod(h, pivots, vec, m)[1].any()


def nullspace_mod_m(a: IntMatrix, m: int) -> np.ndarray:
    """Howell basis of ``{x : a x = 0 (mod m)}``, one generator per row.

    Unit pivots are eliminated sparsely; the small residual system is solved
    through the Howell form of ``[R^T | I]`` and the eliminated variables are
    recovered by back-substitution.
    """
    if m < 2:
        raise ValueError("modulus must be >= 2")
    n = a.cols
    el = _Eliminator(a.rows, a.cols, a.columns, modulus=m, record=True).run()
    row_ids, col_ids, dense = el.residual()
    pivot_cols = {c for _, c, _, _ in el.pivots}
    free = [c for c in range(n) if c not in pivot_cols and c not in set(col_ids)]
    gens = []
    if col_ids:
        k = len(col_ids)
        r = np.array(dense, dtype=np.int64).reshape(len(row_ids), k) % m
        aug = np.hstack([r.T, np.eye(k, dtype=np.int64)])
        h, piv = howell_form(aug, m)
        split = len(row_ids)
        for i, j in enumerate(piv):
            if j >= split:
                x = np.zeros(n, dtype=np.int64)
                x[col_ids] = h[i, split:]
                gens.append(x)
    for f in free:
        x = np.zeros(n, dtype=np.int64)
        x[f] = 1
        gens.append(x)
    if not gens:
        return np.zeros((0, n), dtype=np.int64)
    X = np.array(gens, dtype=np.int64)
    for _, c, u, prow in reversed(el.pivots):
        uinv = pow(int(u), -1, m)
        idx = [j for j in prow if j != c]
        if idx:
            vals = np.array([prow[j] for j in idx], dtype=np.int64)
            X[:, c] = (-uinv * ((X[:, idx] @ vals) % m)) % m
        else:
            X[:, c] = 0
    return howell_form(X, m)[0]


def column_space_mod_m(a: IntMatrix, m: int) -> np.ndarray:
    """Howell basis of the span of the columns of ``a`` mod m."""
    rows = np.zeros((a.cols, a.rows), dtype=np.int64)
    for c, col in enumerate(a.columns):
        for r, v in col.items():
            rows[c, r] = v % m
    return howell_form(rows, m)[0]


@dataclass
class ModuleQuotient:
    """Quotient S/T of submodules of (Z/m)^N given by generating rows.

    ``invariants`` is the isomorphism type; ``generators[i]`` is a vector of
    S whose class generates the cyclic factor ``Z/invariants.torsion[i]``, and
    :meth:`project` maps a vector of S to its coordinates in that basis.
    """

    m: int
    invariants: AbelianInvariants
    generators: np.ndarray
    orders: list
    _h: np.ndarray = field(repr=False)
    _pivots: list = field(repr=False)
    _u: list = field(repr=False)
    _slots: list = field(repr=False)

    def coords_in_space(self, vec) -> list:
        q, rem = reduce_mod(self._h, self._pivots, vec, self.m)
        if rem.any():
            raise NotSubmodule("vector is not in the ambient module")
        return q

    def project(self, vec) -> tuple:
        q = self.coords_in_space(vec)
        out = []
        for slot, d in zip(self._slots, self.orders):
            row = self._u[slot]
            out.append(sum(int(row[j]) * q[j] for j in range(len(q))) % d)
        return tuple(out)

    def lift(self, coords) -> np.ndarray:
        if len(coords) != len(self.orders):
            raise ValueError(f"expected {len(self.orders)} coordinates")
        v = np.zeros(self._h.shape[1], dtype=np.int64)
        for c, g in zip(coords, self.generators):
            v = (v + int(c) * g) % self.m
        return v


def module_quotient_mod_m(space, subspace, m: int) -> ModuleQuotient:
    """Invariants, generators and projection for span(space) / span(subspace)."""
    space = np.asarray(space, dtype=np.int64)
    h, piv = howell_form(space, m) if space.size else (np.zeros((0, space.shape[-1]), np.int64), [])
    a = len(piv)
    rel_cols = []
    for i, j in enumerate(piv):
        d = int(h[i, j])
        if d == m:
            continue
        mult = m // d
        q, rem = reduce_mod(h, piv, (mult * h[i]) % m, m)
        col = {k: -x for k, x in enumerate(q) if x}
        col[i] = col.get(i, 0) + mult
        rel_cols.append({k: x for k, x in col.items() if x})
    sub = np.asarray(subspace, dtype=np.int64)
    sub = sub.reshape(-1, h.shape[1]) if h.shape[1] else np.zeros((0, 0), np.int64)
    for t in sub:
        q, rem = reduce_mod(h, piv, t, m)
        if rem.any():
            raise NotSubmodule("subspace generator lies outside the space")
        rel_cols.append({k: x for k, x in enumerate(q) if x})
    rel = IntMatrix(a, len(rel_cols), rel_cols)
    sf = smith_normal_form(rel)
    divs = sf.divisors + [0] * (a - sf.rank)
    if 0 in divs:
        raise ValueError("quotient of Z/m-modules must be finite")
    slots = [i for i, d in enumerate(divs) if d > 1]
    orders = [divs[i] for i in slots]
    u = sf.u.to_dense()
    uinv = sf.u_inv.to_dense()
    gens = []
    for i in slots:
        v = np.zeros(h.shape[1], dtype=np.int64)
        for j in range(a):
            c = uinv[j][i] % m
            if c:
                v = (v + c * h[j]) % m
        gens.append(v)
    gens = np.array(gens, dtype=np.int64).reshape(len(gens), h.shape[1])
    inv = AbelianInvariants.from_orders(orders)
    return ModuleQuotient(m, inv, gens, orders, h, piv, u, slots)
