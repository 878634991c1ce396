import json

import pytest

from dtorsion.errors import InvalidPermutation, OrderCapExceeded, ParseError, UnknownFamily
from dtorsion.groups import (centralizer, conjugacy_classes, direct_product, group_from_spec,
                             maximal_abelian_subgroups)

SMALL = ["C1", "C2", "C6", "D8", "Q8", "S3", "A4", "S4", "D12", "C2xC2xC2", "C2xS3", "Q16", "C3xQ8"]


@pytest.fixture(scope="module", params=SMALL)
def grp(request):
    return group_from_spec(request.param)


def test_family_orders():
    assert group_from_spec("C6").order == 6
    assert group_from_spec("C6").is_abelian
    assert group_from_spec("S4").order == 24
    assert group_from_spec("A5").order == 60
    assert group_from_spec("D10").order == 10
    assert group_from_spec("Q8").order == 8
    assert group_from_spec("Q12").order == 12


def test_group_axioms(grp):
    g = grp
    n = g.order
    for a in range(n):
        assert g.mult(0, a) == a == g.mult(a, 0)
        assert g.mult(a, g.inv[a]) == 0 == g.mult(g.inv[a], a)
    for a in range(n):
        for b in range(n):
            ab = g.mult(a, b)
            for c in range(n):
                assert g.mult(ab, c) == g.mult(a, g.mult(b, c))


def test_generators_generate(grp):
    g = grp
    seen = {0}
    frontier = [0]
    while frontier:
        frontier = [g.mult(x, s) for x in frontier for s in g.generators]
        frontier = [y for y in frontier if not (y in seen or seen.add(y))]
    assert len(seen) == g.order


def test_perm_spec_gives_s3():
    spec = {"kind": "perm", "degree": 3, "generators": [[2, 1, 3], [2, 3, 1]]}
    g = group_from_spec(spec)
    assert g.order == 6 and not g.is_abelian
    # same Cayley table as the named family, so the same fingerprint
    assert g.fingerprint == group_from_spec("S3").fingerprint
    assert group_from_spec(json.dumps(spec)).order == 6


def test_products():
    v = direct_product(group_from_spec("C2"), group_from_spec("C2"))
    assert v.order == 4 and v.is_abelian
    g = group_from_spec("S3xC2")
    assert g.order == 12 and not g.is_abelian
    assert group_from_spec("C2xC2xC2").order == 8


def test_product_with_trivial_group():
    g = group_from_spec("S3")
    h = direct_product(g, group_from_spec("C1"))
    # pairing (i, 0) -> i * 1 + 0 = i keeps the table
    assert h.table == g.table


def test_centralizers_and_lagrange(grp):
    g = grp
    assert centralizer(g, [0]).order == g.order
    for x in range(g.order):
        c = centralizer(g, [x])
        assert g.order % c.order == 0
        assert all(g.mult(k, x) == g.mult(x, k) for k in c.member_ids)
        if g.is_abelian:
            assert c.order == g.order


def test_s3_transposition_centralizer():
    g = group_from_spec("S3")
    trans = [x for x in range(6) if x and g.mult(x, x) == 0]
    assert len(trans) == 3
    for t in trans:
        assert centralizer(g, [t]).order == 2


def test_class_equation(grp):
    g = grp
    classes = conjugacy_classes(g)
    assert sum(s for _, s in classes) == g.order
    if g.is_abelian:
        assert all(s == 1 for _, s in classes)


def test_class_examples():
    assert sorted(s for _, s in conjugacy_classes(group_from_spec("C4"))) == [1, 1, 1, 1]
    assert sorted(s for _, s in conjugacy_classes(group_from_spec("S3"))) == [1, 2, 3]
    assert sorted(s for _, s in conjugacy_classes(group_from_spec("Q8"))) == [1, 1, 2, 2, 2]


def test_class_reps_are_minimal(grp):
    g = grp
    for rep, _ in conjugacy_classes(g):
        assert rep == min(g.conj(k, rep) for k in range(g.order))


def _all_abelian_subgroups(g):
    """Every abelian subgroup, by closing subsets of pairwise commuting elements (tiny groups)."""
    out = set()
    frontier = {frozenset([0])}
    while frontier:
        out |= frontier
        nxt = set()
        for s in frontier:
            for x in range(g.order):
                if x in s or not all(g.mult(x, y) == g.mult(y, x) for y in s):
                    continue
                closed = set(s) | {x}
                grow = True
                while grow:
                    grow = False
                    for a in list(closed):
                        for b in list(closed):
                            c = g.mult(a, b)
                            if c not in closed:
                                closed.add(c)
                                grow = True
                nxt.add(frozenset(closed))
        frontier = nxt - out
    return out


@pytest.mark.parametrize("spec", ["S3", "Q8", "D8", "A4", "C2xS3", "D12"])
def test_maximal_abelian_cover(spec):
    g = group_from_spec(spec)
    subs = maximal_abelian_subgroups(g)
    sets = [frozenset(s.member_ids) for s in subs]
    assert all(s.is_abelian() for s in subs)
    for a in sets:
        assert not any(a < b for b in sets)
    for a in _all_abelian_subgroups(g):
        assert any(a <= b for b in sets)


def test_maximal_abelian_examples():
    assert [s.order for s in maximal_abelian_subgroups(group_from_spec("S3"))] == [3, 2, 2, 2]
    assert [s.order for s in maximal_abelian_subgroups(group_from_spec("Q8"))] == [4, 4, 4]
    c6 = group_from_spec("C6")
    assert [s.order for s in maximal_abelian_subgroups(c6)] == [6]


def test_errors():
    with pytest.raises(UnknownFamily):
        group_from_spec("X3")
    with pytest.raises(UnknownFamily):
        group_from_spec("C2xx")
    with pytest.raises(OrderCapExceeded):
        group_from_spec("S9")
    with pytest.raises(OrderCapExceeded):
        group_from_spec("C200xC200", order_cap=20000)
    with pytest.raises(ParseError):
        group_from_spec("D7")
    with pytest.raises(ParseError):
        group_from_spec("Q6")
    with pytest.raises(InvalidPermutation):
        group_from_spec({"kind": "perm", "degree": 3, "generators": [[1, 1, 2]]})


def test_deterministic_ordering():
    a, b = group_from_spec("S4"), group_from_spec("S4")
    assert a.perms == b.perms and a.fingerprint == b.fingerprint
