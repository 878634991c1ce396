import io
import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from dtorsion.abelian import AbelianInvariants
from dtorsion.errors import NotInKernel
from dtorsion.zmatrix import (IntMatrix, elementary_divisors, kernel_basis, kernel_coordinates,
                              quotient_invariants, rank, smith_normal_form)

from oracles import lattice_quotient_invariants, minor_gcd_divisors


def random_matrix(rng, r, c, density=0.6, lo=-6, hi=6):
    return [[rng.randint(lo, hi) if rng.random() < density else 0 for _ in range(c)] for _ in range(r)]


def check_smith(a: IntMatrix, sf):
    d = sf.divisors
    assert all(x >= 1 for x in d)
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))
    assert (sf.u @ a @ sf.v) == sf.diagonal_matrix()
    assert (sf.v @ sf.v_inv) == IntMatrix.identity(a.cols)
    assert (sf.u @ sf.u_inv) == IntMatrix.identity(a.rows)
    if a.rows <= 12 and a.cols <= 12:
        assert abs(sympy.Matrix(sf.u.to_dense()).det()) == 1
        assert abs(sympy.Matrix(sf.v.to_dense()).det()) == 1


def test_examples():
    assert smith_normal_form(IntMatrix(3, 4)).divisors == []
    assert smith_normal_form(IntMatrix.from_dense([[2, 4], [6, 8]])).divisors == [2, 4]
    sf = smith_normal_form(IntMatrix.identity(5))
    assert sf.divisors == [1] * 5 and sf.rank == 5


def test_transforms_on_random_matrices():
    rng = random.Random(1)
    for _ in range(60):
        r, c = rng.randint(1, 9), rng.randint(1, 9)
        a = IntMatrix.from_dense(random_matrix(rng, r, c))
        check_smith(a, smith_normal_form(a))


def test_transforms_on_a_large_sparse_matrix():
    rng = random.Random(2)
    r, c = 150, 220
    entries = {}
    for j in range(c):
        for i in rng.sample(range(r), 4):
            entries[(i, j)] = rng.choice([-2, -1, 1, 1, 1, 2, 3])
    a = IntMatrix.from_entries(r, c, entries)
    sf = smith_normal_form(a)
    check_smith(a, sf)
    assert sf.divisors == elementary_divisors(a)


def test_minor_gcd_oracle_100_matrices():
    rng = random.Random(3)
    for _ in range(100):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        rows = random_matrix(rng, r, c, lo=-9, hi=9)
        assert elementary_divisors(IntMatrix.from_dense(rows, cols=c)) == minor_gcd_divisors(rows)


def test_agrees_with_sympy_invariant_factors():
    from sympy.matrices.normalforms import invariant_factors
    rng = random.Random(4)
    for _ in range(40):
        r, c = rng.randint(2, 7), rng.randint(2, 7)
        rows = random_matrix(rng, r, c)
        want = [abs(int(x)) for x in invariant_factors(sympy.Matrix(rows), domain=sympy.ZZ) if x != 0]
        assert elementary_divisors(IntMatrix.from_dense(rows)) == want


def test_coefficient_growth_stays_exact():
    # Hilbert-like integer matrix with large determinant
    n = 8
    rows = [[(i + 1) ** j + (3 * i - j) for j in range(n)] for i in range(n)]
    a = IntMatrix.from_dense(rows)
    sf = smith_normal_form(a)
    check_smith(a, sf)
    det = abs(int(sympy.Matrix(rows).det()))
    prod = 1
    for d in sf.divisors:
        prod *= d
    assert prod == det


def test_kernel_examples():
    assert kernel_basis(IntMatrix.identity(4)) == []
    basis = kernel_basis(IntMatrix.from_dense([[2, -2]]))
    assert len(basis) == 1
    v = basis[0]
    assert v in ({0: 1, 1: 1}, {0: -1, 1: -1})
    a = IntMatrix.from_dense([[1, 2, 3]])
    basis = kernel_basis(a)
    assert len(basis) == 2
    for v in basis:
        assert a.apply(v) == {}


def test_kernel_is_a_z_basis():
    rng = random.Random(5)
    for _ in range(30):
        r, c = rng.randint(1, 5), rng.randint(2, 8)
        a = IntMatrix.from_dense(random_matrix(rng, r, c))
        sf = smith_normal_form(a)
        basis = kernel_basis(a, sf)
        assert len(basis) == c - rank(a)
        for i, v in enumerate(basis):
            assert a.apply(v) == {}
            e = [0] * len(basis)
            e[i] = 1
            assert kernel_coordinates(v, sf) == e
        if len(basis) >= 2:
            s = {k: basis[0].get(k, 0) + basis[1].get(k, 0) for k in set(basis[0]) | set(basis[1])}
            assert kernel_coordinates(s, sf)[:2] == [1, 1]
        # saturation: Z^c / span(kernel basis) is torsion-free
        if basis:
            k = IntMatrix(c, len(basis), basis)
            assert all(d == 1 for d in elementary_divisors(k))


def test_kernel_coordinates_rejects_non_kernel():
    a = IntMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    sf = smith_normal_form(a)
    assert kernel_coordinates([0, 0, 0], sf) == [0]
    with pytest.raises(NotInKernel):
        kernel_coordinates([1, 0, 0], sf)


def test_quotient_examples():
    assert quotient_invariants(3, IntMatrix(3, 0)) == AbelianInvariants((), 3)
    assert quotient_invariants(1, IntMatrix.from_dense([[2]])) == AbelianInvariants((2,))
    rel = IntMatrix(2, 2, [{0: 2}, {1: 4}])
    assert quotient_invariants(2, rel) == AbelianInvariants((2, 4))


def test_quotient_against_coset_enumeration():
    rng = random.Random(6)
    checked = 0
    while checked < 40:
        k = rng.randint(1, 3)
        cols = [{i: rng.randint(-5, 5) for i in range(k)} for _ in range(rng.randint(k, k + 2))]
        cols = [{i: x for i, x in c.items() if x} for c in cols]
        rel = IntMatrix(k, len(cols), cols)
        want_inv = quotient_invariants(k, rel)
        if want_inv.free_rank or want_inv.order > 1000:
            continue
        try:
            got = lattice_quotient_invariants(k, cols, bound=3000)
        except ValueError:
            continue
        assert got == want_inv
        checked += 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3), min_size=1, max_size=4))
def test_divisor_product_is_determinant_gcd(rows):
    a = IntMatrix.from_dense(rows, cols=3)
    assert elementary_divisors(a) == minor_gcd_divisors(rows)


def test_dump_round_trip():
    rng = random.Random(7)
    a = IntMatrix.from_dense(random_matrix(rng, 6, 9))
    text = a.dump()
    assert text.splitlines()[0] == f"6 9 {a.nnz}"
    assert IntMatrix.load(text) == a
    buf = io.StringIO()
    a.dump(buf)
    buf.seek(0)
    assert IntMatrix.load(buf) == a


def test_sparse_dense_consistency():
    rng = random.Random(8)
    rows = random_matrix(rng, 5, 7)
    a = IntMatrix.from_dense(rows)
    assert a.to_dense() == rows
    assert a.transpose().to_dense() == [list(r) for r in zip(*rows)]
    assert all(v != 0 for v in a.entries.values())
