"""Exact sparse integer matrices and Smith normal form.

The workhorse is :class:`_Eliminator`, a sparse Gaussian eliminator that only
pivots on units (``+-1`` over Z, residues coprime to m over Z/m).  Unit pivots
never change elementary divisors, so the matrix left over once no unit entry
remains is handed to a dense Smith form.  Boundary matrices of bar complexes
are overwhelmingly reduced by the sparse phase.
"""

from __future__ import annotations

import heapq
import io
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

from .abelian import AbelianInvariants
from .errors import NotInKernel


class IntMatrix:
    """Sparse integer matrix stored by columns (``columns[c] = {row: value}``)."""

    __slots__ = ("rows", "cols", "columns")

    def __init__(self, rows: int, cols: int, columns: Sequence[dict] | None = None):
        self.rows = rows
        self.cols = cols
        if columns is None:
            columns = [{} for _ in range(cols)]
        if len(columns) != cols:
            raise ValueError("column count mismatch")
        clean = []
        for col in columns:
            d = {}
            for r, v in col.items():
                if not 0 <= r < rows:
                    raise IndexError(f"row index {r} out of range")
                if v:
                    d[r] = int(v)
            clean.append(d)
        self.columns = clean

    @classmethod
    def from_dense(cls, a: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = len(a)
        if cols is None:
            cols = len(a[0]) if rows else 0
        columns = [{} for _ in range(cols)]
        for i, row in enumerate(a):
            for j, v in enumerate(row):
                if v:
                    columns[j][i] = int(v)
        return cls(rows, cols, columns)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: dict) -> "IntMatrix":
        columns = [{} for _ in range(cols)]
        for (r, c), v in entries.items():
            if v:
                columns[c][r] = v
        return cls(rows, cols, columns)

    @classmethod
    def identity(cls, k: int) -> "IntMatrix":
        return cls(k, k, [{i: 1} for i in range(k)])

    @property
    def entries(self) -> dict:
        return {(r, c): v for c, col in enumerate(self.columns) for r, v in col.items()}

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    def __getitem__(self, rc):
        r, c = rc
        return self.columns[c].get(r, 0)

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.columns == other.columns)

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    def to_dense(self) -> list:
        out = [[0] * self.cols for _ in range(self.rows)]
        for c, col in enumerate(self.columns):
            for r, v in col.items():
                out[r][c] = v
        return out

    def transpose(self) -> "IntMatrix":
        cols = [{} for _ in range(self.rows)]
        for c, col in enumerate(self.columns):
            for r, v in col.items():
                cols[r][c] = v
        return IntMatrix(self.cols, self.rows, cols)

    def row_dicts(self) -> list:
        rows = [{} for _ in range(self.rows)]
        for c, col in enumerate(self.columns):
            for r, v in col.items():
                rows[r][c] = v
        return rows

    def apply(self, vec) -> dict:
        """Matrix times a vector given as a dict or a dense sequence; returns a dict."""
        items = vec.items() if isinstance(vec, dict) else enumerate(vec)
        out = {}
        for c, x in items:
            if x:
                for r, v in self.columns[c].items():
                    out[r] = out.get(r, 0) + v * x
        return {r: v for r, v in out.items() if v}

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        return IntMatrix(self.rows, other.cols, [self.apply(col) for col in other.columns])

    def hstack(self, extra: Iterable[dict]) -> "IntMatrix":
        cols = list(self.columns) + [dict(c) for c in extra]
        return IntMatrix(self.rows, len(cols), cols)

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)

    def dump(self, fh=None) -> str | None:
        """Text dump: header ``rows cols nnz`` then one ``r c v`` triple per line."""
        buf = io.StringIO()
        buf.write(f"{self.rows} {self.cols} {self.nnz}\n")
        for c, col in enumerate(self.columns):
            for r in sorted(col):
                buf.write(f"{r} {c} {col[r]}\n")
        if fh is None:
            return buf.getvalue()
        fh.write(buf.getvalue())
        return None

    @classmethod
    def load(cls, text_or_fh) -> "IntMatrix":
        text = text_or_fh if isinstance(text_or_fh, str) else text_or_fh.read()
        lines = [ln for ln in text.splitlines() if ln.strip()]
        rows, cols, nnz = map(int, lines[0].split())
        entries = {}
        for ln in lines[1:]:
            r, c, v = map(int, ln.split())
            entries[(r, c)] = v
        if len(entries) != nnz:
            raise ValueError(f"expected {nnz} entries, got {len(entries)}")
        return cls.from_entries(rows, cols, entries)


@dataclass
class SmithForm:
    """``u @ a @ v == diag(divisors + [0, ...])`` with ``v_inv`` the inverse of ``v``.

    ``u``, ``v`` and ``v_inv`` are ``None`` when transforms were not requested.
    """

    rows: int
    cols: int
    divisors: list
    u: IntMatrix | None = None
    v: IntMatrix | None = None
    v_inv: IntMatrix | None = None
    u_inv: IntMatrix | None = None
    _vinv_cols: list | None = field(default=None, repr=False)

    @property
    def rank(self) -> int:
        return len(self.divisors)

    def diagonal_matrix(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols,
                         [{i: self.divisors[i]} if i < self.rank else {} for i in range(self.cols)])


# -- dense Smith form -------------------------------------------------------------


def _dense_snf(a: list, track: bool):
    """Smith form of a small dense matrix (list of row lists, modified in place).

    Returns ``(diag, U, V, Vinv, Uinv)`` as dense lists (transforms None unless tracked).
    """
    nr = len(a)
    nc = len(a[0]) if nr else 0
    U = [[int(i == j) for j in range(nr)] for i in range(nr)] if track else None
    V = [[int(i == j) for j in range(nc)] for i in range(nc)] if track else None
    W = [[int(i == j) for j in range(nc)] for i in range(nc)] if track else None
    X = [[int(i == j) for j in range(nr)] for i in range(nr)] if track else None  # U^-1

    def row_add(i, j, q):  # row_i += q row_j
        ai, aj = a[i], a[j]
        for k in range(nc):
            if aj[k]:
                ai[k] += q * aj[k]
        if track:
            ui, uj = U[i], U[j]
            for k in range(nr):
                if uj[k]:
                    ui[k] += q * uj[k]
            for row in X:  # inverse: col_j -= q col_i
                if row[i]:
                    row[j] -= q * row[i]

    def col_add(i, j, q):  # col_i += q col_j
        for row in a:
            if row[j]:
                row[i] += q * row[j]
        if track:
            for row in V:
                if row[j]:
                    row[i] += q * row[j]
            wj, wi = W[j], W[i]  # inverse: row_j -= q row_i
            for k in range(nc):
                if wi[k]:
                    wj[k] -= q * wi[k]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        if track:
            U[i], U[j] = U[j], U[i]
            for row in X:
                row[i], row[j] = row[j], row[i]

    def col_swap(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        if track:
            for row in V:
                row[i], row[j] = row[j], row[i]
            W[i], W[j] = W[j], W[i]

    diag = []
    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            row = a[i]
            for j in range(t, nc):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        row_swap(t, i)
        col_swap(t, j)
        while True:
            p = a[t][t]
            moved = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    row_add(i, t, -(a[i][t] // p))
                    if a[i][t]:
                        moved = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    col_add(j, t, -(a[t][j] // p))
                    if a[t][j]:
                        moved = True
            if moved:
                best = None
                for i in range(t, nr):
                    if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                        best = (abs(a[i][t]), i, t)
                for j in range(t, nc):
                    if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                        best = (abs(a[t][j]), t, j)
                _, i, j = best
                row_swap(t, i)
                col_swap(t, j)
                continue
            bad = None
            for i in range(t + 1, nr):
                row = a[i]
                for j in range(t + 1, nc):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if track:
                U[t] = [-x for x in U[t]]
                for row in X:
                    row[t] = -row[t]
        diag.append(a[t][t])
        t += 1
    return diag, U, V, W, X


# -- sparse unit-pivot elimination ----------------------------------------------------


class _Eliminator:
    """Sparse elimination on unit pivots, over Z (``modulus=0``) or Z/m.

    After :meth:`run`, ``pivots`` lists ``(row, col, unit, pivot_row_copy)``
    and ``rows`` holds what is left.  With ``track=True`` (Z only) the
    unimodular transforms are accumulated sparsely.
    """

    def __init__(self, nrows: int, ncols: int, columns: Sequence[dict], modulus: int = 0,
                 track: bool = False, record: bool = False):
        self.nrows = nrows
        self.ncols = ncols
        self.m = modulus
        self.track = track
        self.record = record or track
        rows = [dict() for _ in range(nrows)]
        colrows = [set() for _ in range(ncols)]
        m = modulus
        for c, col in enumerate(columns):
            for r, v in col.items():
                if m:
                    v %= m
                if v:
                    rows[r][c] = v
                    colrows[c].add(r)
        self.rows = rows
        self.colrows = colrows
        self.col_done = [False] * ncols
        self.row_done = [False] * nrows
        self.pivots = []
        if track:
            self.U = [{i: 1} for i in range(nrows)]
            self.V = [{j: 1} for j in range(ncols)]
            self.W = [{j: 1} for j in range(ncols)]  # V^-1, by rows
            self.X = [{i: 1} for i in range(nrows)]  # U^-1, by columns

    def _unit(self, v: int) -> bool:
        if self.m:
            return gcd(v, self.m) == 1
        return v == 1 or v == -1

    def _inv(self, v: int) -> int:
        if self.m:
            return pow(v, -1, self.m)
        return v

    def run(self):
        rows, colrows = self.rows, self.colrows
        heap = [(len(colrows[c]), c) for c in range(self.ncols) if colrows[c]]
        heapq.heapify(heap)
        while True:
            while heap:
                k, c = heapq.heappop(heap)
                if self.col_done[c] or len(colrows[c]) != k or not k:
                    continue
                best = None
                bestlen = 0
                for r in colrows[c]:
                    if self._unit(rows[r][c]):
                        ln = len(rows[r])
                        if best is None or ln < bestlen:
                            best, bestlen = r, ln
                            if ln == 1:
                                break
                if best is None:
                    continue
                for j in self._pivot(best, c):
                    heapq.heappush(heap, (len(colrows[j]), j))
            # values can turn into units without a change in column length
            heap = [(len(colrows[c]), c) for c in range(self.ncols)
                    if not self.col_done[c] and colrows[c]
                    and any(self._unit(rows[r][c]) for r in colrows[c])]
            if not heap:
                break
            heapq.heapify(heap)
        return self

    def _pivot(self, r: int, c: int):
        rows, colrows, m = self.rows, self.colrows, self.m
        prow = rows[r]
        u = prow[c]
        uinv = self._inv(u)
        changed = set()
        track = self.track
        for i in list(colrows[c]):
            if i == r:
                continue
            ri = rows[i]
            q = ri[c] * uinv
            if m:
                q %= m
            for j, v in prow.items():
                nv = ri.get(j, 0) - q * v
                if m:
                    nv %= m
                if nv:
                    if j not in ri:
                        colrows[j].add(i)
                        changed.add(j)
                    ri[j] = nv
                elif j in ri:
                    del ri[j]
                    colrows[j].discard(i)
                    changed.add(j)
            if track:
                _sparse_axpy(self.U[i], self.U[r], -q)
                _sparse_axpy(self.X[r], self.X[i], q)
        if track:
            vc = self.V[c]
            wc = self.W[c]
            for j, v in prow.items():
                if j == c:
                    continue
                t = v * uinv
                _sparse_axpy(self.V[j], vc, -t)
                _sparse_axpy(wc, self.W[j], t)
        for j in prow:
            colrows[j].discard(r)
            changed.add(j)
        changed.discard(c)
        self.pivots.append((r, c, u, dict(prow) if self.record else None))
        rows[r] = {}
        self.col_done[c] = True
        self.row_done[r] = True
        return changed

    def residual(self):
        """Remaining nonzero rows and columns: ``(row_ids, col_ids, dense)``."""
        row_ids = [i for i in range(self.nrows) if self.rows[i]]
        col_set = set()
        for i in row_ids:
            col_set.update(self.rows[i])
        col_ids = sorted(col_set)
        pos = {c: k for k, c in enumerate(col_ids)}
        dense = []
        for i in row_ids:
            row = [0] * len(col_ids)
            for c, v in self.rows[i].items():
                row[pos[c]] = v
            dense.append(row)
        return row_ids, col_ids, dense


def _sparse_axpy(y: dict, x: dict, a: int):
    """y += a * x for sparse dict vectors."""
    if not a:
        return
    for k, v in x.items():
        nv = y.get(k, 0) + a * v
        if nv:
            y[k] = nv
        else:
            y.pop(k, None)


def elementary_divisors(a: IntMatrix) -> list:
    """Nonzero Smith divisors of ``a`` (1s included), without transforms."""
    el = _Eliminator(a.rows, a.cols, a.columns).run()
    _, _, dense = el.residual()
    diag = _dense_snf(dense, track=False)[0]
    return [1] * len(el.pivots) + diag


def smith_normal_form(a: IntMatrix, transforms: bool = True) -> SmithForm:
    """Smith form ``U A V = diag(d_1, ..., d_r, 0, ...)`` with ``d_i | d_{i+1}``."""
    if not transforms:
        return SmithForm(a.rows, a.cols, elementary_divisors(a))
    el = _Eliminator(a.rows, a.cols, a.columns, track=True).run()
    row_ids, col_ids, dense = el.residual()
    diag, Ud, Vd, Wd, Xd = _dense_snf(dense, track=True)

    u_rows, v_cols, w_rows, x_cols = [], [], [], []
    used_rows, used_cols = set(), set()
    for r, c, unit, _ in el.pivots:
        u_rows.append({k: unit * x for k, x in el.U[r].items()})  # unit is +-1
        x_cols.append({k: unit * x for k, x in el.X[r].items()})
        v_cols.append(el.V[c])
        w_rows.append(el.W[c])
        used_rows.add(r)
        used_cols.add(c)
    for s in range(len(row_ids)):
        acc = {}
        for t, q in enumerate(Ud[s]):
            if q:
                _sparse_axpy(acc, el.U[row_ids[t]], q)
        u_rows.append(acc)
        xacc = {}
        for t in range(len(row_ids)):
            q = Xd[t][s]
            if q:
                _sparse_axpy(xacc, el.X[row_ids[t]], q)
        x_cols.append(xacc)
    for s in range(len(col_ids)):
        vacc, wacc = {}, {}
        for t in range(len(col_ids)):
            q = Vd[t][s]
            if q:
                _sparse_axpy(vacc, el.V[col_ids[t]], q)
            q = Wd[s][t]
            if q:
                _sparse_axpy(wacc, el.W[col_ids[t]], q)
        v_cols.append(vacc)
        w_rows.append(wacc)
    used_rows.update(row_ids)
    used_cols.update(col_ids)
    for r in range(a.rows):
        if r not in used_rows:
            u_rows.append(el.U[r])
            x_cols.append(el.X[r])
    for c in range(a.cols):
        if c not in used_cols:
            v_cols.append(el.V[c])
            w_rows.append(el.W[c])
    u = IntMatrix(a.rows, a.rows, _rows_to_cols(u_rows, a.rows))
    v = IntMatrix(a.cols, a.cols, v_cols)
    w = IntMatrix(a.cols, a.cols, _rows_to_cols(w_rows, a.cols))
    divisors = [1] * len(el.pivots) + diag
    x = IntMatrix(a.rows, a.rows, x_cols)
    return SmithForm(a.rows, a.cols, divisors, u, v, w, x)


def _rows_to_cols(rows: list, ncols: int) -> list:
    cols = [{} for _ in range(ncols)]
    for i, row in enumerate(rows):
        for j, x in row.items():
            cols[j][i] = x
    return cols


def kernel_basis(a: IntMatrix, sf: SmithForm | None = None) -> list:
    """Z-basis of ker(a): the last ``cols - rank`` columns of V, as dicts."""
    if sf is None or sf.v is None:
        sf = smith_normal_form(a)
    return [dict(sf.v.columns[j]) for j in range(sf.rank, a.cols)]


def kernel_coordinates(z, sf: SmithForm) -> list:
    """Coordinates of a kernel vector in :func:`kernel_basis`; the tail of V^-1 z."""
    if sf.v_inv is None:
        raise ValueError("SmithForm has no transforms")
    if sf._vinv_cols is None:
        sf._vinv_cols = sf.v_inv.columns
    items = z.items() if isinstance(z, dict) else enumerate(z)
    y = [0] * sf.cols
    cols = sf._vinv_cols
    for j, x in items:
        if x:
            for i, v in cols[j].items():
                y[i] += v * x
    if any(y[: sf.rank]):
        raise NotInKernel("vector is not in the kernel")
    return y[sf.rank:]


def quotient_invariants(k: int, relations: IntMatrix) -> AbelianInvariants:
    """Invariants of ``Z^k / im(relations)``."""
    if relations.rows != k:
        raise ValueError("relations must have k rows")
    divs = elementary_divisors(relations)
    return AbelianInvariants.from_orders([d for d in divs if d > 1], k - len(divs))


def rank(a: IntMatrix) -> int:
    return len(elementary_divisors(a))
