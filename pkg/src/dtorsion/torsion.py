"""Cocycles mod m, untwisted classes and Dijkgraaf-Witten torus partition functions.

Cochains are functions on nonidentity n-tuples with values in Z/m, stored as
vectors over the bar basis.  Phases are kept as exponents k of
``exp(2 pi i k / m)`` until the output boundary.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import prod

import numpy as np

from .abelian import AbelianInvariants
from .bar import DEFAULT_BAR_BUDGET, BarBasis, alternating_word, boundary_generators, \
    boundary_matrix, check_budget, homology
from .errors import MissingSector, NonCommutingTuple, VerificationMismatch
from .groups import FiniteGroup
from .modular import ModuleQuotient, module_quotient_mod_m, nullspace_mod_m
from .tuples import orbit_representatives
from .zmatrix import IntMatrix

CLASS_ENUMERATION_CAP = 10 ** 4


@dataclass
class CochainVector:
    """An n-cochain G^n -> Z/m; tuples containing the identity evaluate to 0."""

    degree: int
    modulus: int
    group_order: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64) % self.modulus
        size = (self.group_order - 1) ** self.degree
        if self.values.shape != (size,):
            raise ValueError(f"expected {size} coordinates, got {self.values.shape}")

    @classmethod
    def zero(cls, g: FiniteGroup, n: int, m: int) -> "CochainVector":
        return cls(n, m, g.order, np.zeros((g.order - 1) ** n, dtype=np.int64))

    @property
    def basis(self) -> BarBasis:
        return BarBasis(self.degree, self.group_order)

    def __call__(self, *tup) -> int:
        if any(x == 0 for x in tup):
            return 0
        return int(self.values[self.basis.index(tup)])

    def _check(self, other):
        if (self.degree, self.modulus, self.group_order) != (other.degree, other.modulus, other.group_order):
            raise ValueError("cochains live in different groups")

    def __add__(self, other: "CochainVector") -> "CochainVector":
        self._check(other)
        return CochainVector(self.degree, self.modulus, self.group_order, self.values + other.values)

    def __sub__(self, other: "CochainVector") -> "CochainVector":
        self._check(other)
        return CochainVector(self.degree, self.modulus, self.group_order, self.values - other.values)

    def __mul__(self, k: int) -> "CochainVector":
        return CochainVector(self.degree, self.modulus, self.group_order, self.values * int(k))

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, CochainVector) and self.modulus == other.modulus \
            and self.degree == other.degree and np.array_equal(self.values, other.values)

    def is_zero(self) -> bool:
        return not self.values.any()

    def evaluate(self, chain: dict) -> int:
        """Pairing with a chain given as ``{basis index: coefficient}``."""
        v = self.values
        return sum(int(v[k]) * c for k, c in chain.items()) % self.modulus

    def to_json(self) -> dict:
        return {"degree": self.degree, "modulus": self.modulus,
                "nonzero": {str(k): int(x) for k, x in enumerate(self.values) if x}}


def coboundary(g: FiniteGroup, alpha: CochainVector, budget: int = DEFAULT_BAR_BUDGET) -> CochainVector:
    """delta(alpha) = alpha o d_{n+1}."""
    n = alpha.degree + 1
    out = np.zeros((g.order - 1) ** n, dtype=np.int64)
    if n >= 2:
        a = alpha.values
        for c, col in enumerate(boundary_matrix(g, n, budget).columns):
            out[c] = sum(int(a[r]) * v for r, v in col.items())
    return CochainVector(n, alpha.modulus, g.order, out)


def is_cocycle(g: FiniteGroup, omega: CochainVector, budget: int = DEFAULT_BAR_BUDGET) -> bool:
    """Checked against every column of d_{n+1}, not just the generator columns."""
    return coboundary(g, omega, budget).is_zero()


def homology_exponent(g: FiniteGroup, n: int, budget: int = DEFAULT_BAR_BUDGET) -> int:
    return homology(g, n, budget).exponent


def ext_invariants(hprev: AbelianInvariants, m: int) -> AbelianInvariants:
    return hprev.ext(m)


def subtract_ext(total: AbelianInvariants, ext: AbelianInvariants) -> AbelianInvariants:
    return total.subtract(ext)


@dataclass
class CohomologyClassSet:
    """A subquotient of cocycles mod coboundaries, with generators and coordinates.

    ``basis[i]`` is a cocycle whose class generates the cyclic factor of
    order ``orders[i]``; :meth:`project` maps a cocycle to its coordinates.
    """

    group: FiniteGroup = field(repr=False)
    degree: int
    modulus: int
    invariants: AbelianInvariants
    basis: list
    orders: list
    quotient: ModuleQuotient = field(repr=False)

    def project(self, omega: CochainVector) -> tuple:
        return self.quotient.project(omega.values)

    def representative(self, coords) -> CochainVector:
        if len(coords) != len(self.orders):
            raise ValueError(f"expected {len(self.orders)} class coordinates, got {len(coords)}")
        v = self.quotient.lift(coords)
        return CochainVector(self.degree, self.modulus, self.group.order, v)

    def class_count(self) -> int:
        return prod(self.orders)

    def classes(self, cap: int = CLASS_ENUMERATION_CAP):
        """Every coordinate vector, when there are at most ``cap`` classes."""
        if self.class_count() > cap:
            raise ValueError(f"{self.class_count()} classes exceed the enumeration cap {cap}")
        return product(*[range(d) for d in self.orders])


def _coboundary_rows(g: FiniteGroup, n: int, budget: int) -> np.ndarray:
    """Rows of d_n as vectors in C^n: the coboundaries of the basis (n-1)-cochains."""
    size = (g.order - 1) ** n
    if n == 1:
        return np.zeros((0, size), dtype=np.int64)
    d = boundary_matrix(g, n, budget)
    out = np.zeros((d.rows, size), dtype=np.int64)
    for c, col in enumerate(d.columns):
        for r, v in col.items():
            out[r, c] = v
    return out


def _check_modulus(m: int):
    if m < 2:
        raise ValueError("modulus must be >= 2")


def cocycles_mod_m(g: FiniteGroup, n: int, m: int, budget: int = DEFAULT_BAR_BUDGET) -> np.ndarray:
    """Howell basis of Z^n(G, Z/m), one cocycle per row."""
    _check_modulus(m)
    check_budget(g, n, budget)
    return nullspace_mod_m(boundary_generators(g, n + 1, budget).transpose(), m)


def cohomology_mod_m(g: FiniteGroup, n: int, m: int, budget: int = DEFAULT_BAR_BUDGET) -> CohomologyClassSet:
    """H^n(G, Z/m) = Z^n / B^n with explicit generators."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    _check_modulus(m)
    z = cocycles_mod_m(g, n, m, budget)
    b = _coboundary_rows(g, n, budget)
    q = module_quotient_mod_m(z, b, m)
    basis = [CochainVector(n, m, g.order, v) for v in q.generators]
    return CohomologyClassSet(g, n, m, q.invariants, basis, list(q.orders), q)


def dw_weight(g: FiniteGroup, omega: CochainVector, tup) -> int:
    """Sum over S_n of sgn(s) * omega(g_s(1), ..., g_s(n)) mod m."""
    tup = tuple(tup)
    if len(tup) != omega.degree:
        raise ValueError(f"tuple length {len(tup)} does not match cochain degree {omega.degree}")
    comm = g.commute
    for i in range(len(tup)):
        for j in range(i + 1, len(tup)):
            if not comm[tup[i], tup[j]]:
                raise NonCommutingTuple(f"elements {tup[i]} and {tup[j]} do not commute")
    return omega.evaluate(alternating_word(g, tup))


@dataclass
class PhaseHistogram:
    """Exact weights per phase exponent k, the phase being exp(2 pi i k / m)."""

    modulus: int
    counts: dict

    @property
    def total(self) -> Fraction:
        return sum(self.counts.values(), Fraction(0))

    @property
    def value(self) -> complex:
        m = self.modulus
        return sum(float(w) * cmath.exp(2j * cmath.pi * k / m) for k, w in self.counts.items())

    def exact_value(self):
        """The value as a Fraction when every phase is real (+1 or -1)."""
        m = self.modulus
        if any((2 * k) % m for k in self.counts):
            return None
        return sum((w if k == 0 else -w for k, w in self.counts.items()), Fraction(0))

    def to_json(self) -> dict:
        z = self.value
        return {"modulus": self.modulus,
                "histogram": {str(k): str(self.counts[k]) for k in sorted(self.counts)},
                "value": [_clean(z.real), _clean(z.imag)]}


def _clean(x: float) -> float:
    r = round(x, 12)
    return 0.0 if r == 0 else r


def dw_partition(g: FiniteGroup, n: int, omega: CochainVector, orbits=None) -> PhaseHistogram:
    """Z(T^n) = sum over orbits of W(rep) / |C_G(rep)|."""
    if omega.degree != n:
        raise ValueError("cochain degree does not match n")
    orbits = orbit_representatives(g, n) if orbits is None else orbits
    counts = {}
    for o in orbits:
        k = dw_weight(g, omega, o.rep)
        counts[k] = counts.get(k, Fraction(0)) + Fraction(1, o.stabilizer_order)
    return PhaseHistogram(omega.modulus, counts)


def orbifold_partition(g: FiniteGroup, n: int, omega: CochainVector, sectors: dict, orbits=None) -> complex:
    """Sum over orbits of phase * amplitude / |C_G(rep)|.

    ``sectors`` is keyed by orbit index (canonical order) or by representative.
    """
    orbits = orbit_representatives(g, n) if orbits is None else orbits
    m = omega.modulus
    total = 0j
    for i, o in enumerate(orbits):
        if i in sectors:
            amp = sectors[i]
        elif tuple(o.rep) in sectors:
            amp = sectors[tuple(o.rep)]
        else:
            raise MissingSector(f"no amplitude for orbit {i} with representative {list(o.rep)}")
        phase = cmath.exp(2j * cmath.pi * dw_weight(g, omega, o.rep) / m)
        total += phase * complex(amp) / o.stabilizer_order
    return total


def omega_regular_elements(g: FiniteGroup, omega: CochainVector) -> list:
    """Elements x with omega(x, h) = omega(h, x) for every h commuting with x."""
    if omega.degree != 2:
        raise ValueError("omega-regularity needs a 2-cochain")
    comm = g.commute
    out = []
    for x in range(g.order):
        if all(omega(x, h) == omega(h, x) for h in np.flatnonzero(comm[x]).tolist()):
            out.append(x)
    return out


def br_n_mod_m(g: FiniteGroup, n: int, m: int | None = None, budget: int = DEFAULT_BAR_BUDGET,
               cohomology: CohomologyClassSet | None = None, orbits=None) -> CohomologyClassSet:
    """Classes of H^n(G, Z/m) whose alternating sums vanish on every commuting n-tuple.

    A class sum(c_i h_i) is untwisted iff sum(c_i * W(h_i, t)) = 0 mod m for
    every orbit representative t; the solutions c form a mod-m nullspace.
    """
    if m is None:
        m = max(2, homology_exponent(g, n, budget))
    _check_modulus(m)
    h = cohomology_mod_m(g, n, m, budget) if cohomology is None else cohomology
    orbits = orbit_representatives(g, n) if orbits is None else orbits
    k = len(h.basis)
    cols = [dict() for _ in range(k)]
    for t, o in enumerate(orbits):
        word = alternating_word(g, o.rep)
        for i, w in enumerate(h.basis):
            x = w.evaluate(word)
            if x:
                cols[i][t] = x
    for i, d in enumerate(h.orders):
        # d * h_i is a coboundary, so its weights must vanish
        if any((d * x) % m for x in cols[i].values()):
            raise VerificationMismatch(f"class generator {i} has weights that are not class functions")
    phi = IntMatrix(len(orbits), k, cols)
    sols = nullspace_mod_m(phi, m) if k else np.zeros((0, 0), dtype=np.int64)
    size = (g.order - 1) ** n
    gens = np.array([sum((int(c) * h.basis[i].values for i, c in enumerate(row) if c),
                         np.zeros(size, dtype=np.int64)) % m for row in sols],
                    dtype=np.int64).reshape(len(sols), size)
    b = _coboundary_rows(g, n, budget)
    space = np.vstack([gens, b % m]) if len(b) else gens
    q = module_quotient_mod_m(space, b, m)
    basis = [CochainVector(n, m, g.order, v) for v in q.generators]
    return CohomologyClassSet(g, n, m, q.invariants, basis, list(q.orders), q)


def untwisted_part(g: FiniteGroup, n: int, classes: CohomologyClassSet,
                   budget: int = DEFAULT_BAR_BUDGET) -> AbelianInvariants:
    """Remove Ext^1(H_{n-1}, Z/m) from the invariants of ``classes``."""
    ext = ext_invariants(homology(g, n - 1, budget), classes.modulus)
    try:
        return subtract_ext(classes.invariants, ext)
    except ValueError as exc:
        raise VerificationMismatch(f"Ext part {ext} is not a summand of {classes.invariants}") from exc


__all__ = [
    "CochainVector", "CohomologyClassSet", "PhaseHistogram", "br_n_mod_m", "coboundary",
    "cocycles_mod_m", "cohomology_mod_m", "dw_partition", "dw_weight", "ext_invariants",
    "homology_exponent", "is_cocycle", "omega_regular_elements", "orbifold_partition",
    "subtract_ext", "untwisted_part",
]
