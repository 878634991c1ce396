"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` (the lines are printed even
without ``-s``).  The stretch cases take a few minutes in total.
"""
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from dtorsion.abelian import AbelianInvariants
from dtorsion.bar import h0n, homology, sha_n
from dtorsion.groups import group_from_spec
from dtorsion.torsion import (CochainVector, br_n_mod_m, coboundary, cohomology_mod_m, dw_partition,
                              dw_weight, homology_exponent, is_cocycle, untwisted_part)
from dtorsion.tuples import orbit_representatives
from dtorsion.zmatrix import IntMatrix, elementary_divisors

from oracles import brute_commuting_tuples, brute_orbits, minor_gcd_divisors


def z2(k):
    return AbelianInvariants((2,) * k)


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}" + (f"  ({detail})" if detail else ""))
        assert ok, detail
    return emit


def timed(fn, *args):
    t = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t


def test_criterion_1_elementary_abelian_order_8(report):
    g = group_from_spec("C2xC2xC2")
    want = {2: (z2(3), AbelianInvariants()), 3: (z2(7), z2(6)), 4: (z2(8), z2(8))}
    got, elapsed = {}, 0.0
    for n in want:
        (h, t1), (h0, t2) = timed(homology, g, n), timed(h0n, g, n)
        got[n] = (h, h0)
        elapsed += t1 + t2
    ok = got == want and elapsed <= 300
    report("1  (Z/2)^3 rows n=2,3,4", ok, f"{elapsed:.1f}s, " + "; ".join(f"n={n}: {h} / {h0}" for n, (h, h0) in got.items()))


@pytest.mark.slow
def test_criterion_1_stretch_degree_5(report):
    g = group_from_spec("C2xC2xC2")
    (h, t1), (h0, t2) = timed(homology, g, 5), timed(h0n, g, 5)
    ok = h == z2(13) == h0 and t1 + t2 <= 7200
    report("1s (Z/2)^3 row n=5", ok, f"{t1 + t2:.0f}s, H_5 = {h}, H_05 = {h0}")


def test_criterion_2_symmetric_s3(report):
    g = group_from_spec("S3")
    (h, t1), (h0, t2) = timed(homology, g, 3), timed(h0n, g, 3)
    ok = h == h0 == AbelianInvariants((6,)) and t1 + t2 <= 60
    report("2  H_3(S3) = H_03(S3) = Z/6", ok, f"{t1 + t2:.2f}s")


@pytest.mark.slow
def test_criterion_2_stretch_s4(report):
    g = group_from_spec("S4")
    (h, t1), (h0, t2) = timed(homology, g, 3), timed(h0n, g, 3)
    want = AbelianInvariants.from_orders([6, 4])
    ok = h == h0 == want and t1 + t2 <= 1800
    report("2s H_3(S4) = H_03(S4) = Z/6 + Z/4", ok, f"{t1 + t2:.1f}s, got {h} / {h0}")


def test_criterion_3_s3_degree_4(report):
    g = group_from_spec("S3")
    (h, t1), (h0, t2) = timed(homology, g, 4), timed(h0n, g, 4)
    ok = h == h0 == AbelianInvariants() and t1 + t2 <= 300
    report("3  H_4(S3) = H_04(S3) = 0", ok, f"{t1 + t2:.2f}s")


def test_criterion_4_cyclic(report):
    bad = []
    for m in range(2, 7):
        g = group_from_spec(f"C{m}")
        for n in (1, 3, 5):
            if n == 5 and m > 3:
                continue
            h, h0 = homology(g, n), h0n(g, n)
            if not h == h0 == AbelianInvariants((m,)):
                bad.append(f"C{m} n={n}: H={h}, H0={h0}")
        for n in (2, 4):
            if homology(g, n) != AbelianInvariants():
                bad.append(f"C{m} n={n}: H={homology(g, n)}")
    # In degree one every element is itself a commuting 1-tuple, so H_01 = 0 for
    # every group; the n = 1 part of this criterion cannot hold.
    report("4  cyclic groups: H_n = H_0n = Z/m for odd n in {1,3,5}, H_n = 0 for even n", not bad,
           "; ".join(bad))


def test_criterion_5_dihedral_untwisted(report):
    rows = []
    for spec in ("D6", "D8", "D10", "D12"):
        g = group_from_spec(spec)
        (h, t1), (h0, t2) = timed(homology, g, 3), timed(h0n, g, 3)
        rows.append((spec, h == h0 and h.order > 1 and t1 + t2 <= 600, h))
    ok = all(r[1] for r in rows)
    report("5  D6, D8, D10, D12 are 3-untwisted", ok, ", ".join(f"{s}: {h}" for s, _, h in rows))


FAMILY_UP_TO_32 = ([f"C{k}" for k in range(1, 33)] + [f"D{k}" for k in range(4, 33, 2)]
                   + [f"Q{k}" for k in range(8, 33, 4)]
                   + ["C2xC2", "C2xC2xC2", "C2xC2xC2xC2", "C2xC2xC2xC2xC2", "S3", "S4", "A4",
                      "C2xS3", "C3xS3", "C2xA4", "C2xQ8", "C2xD8", "C4xC4", "C2xC4", "C2xC2xS3",
                      "C4xS3", "C3xC3", "C5xS3", "C2xC8", "C2xC2xC4", "C2xC16", "C2xD16", "C2xC2xD8",
                      "C4xQ8", "C2xC2xQ8", "C3xQ8", "C2xQ12", "C2xD12", "C3xD8", "C2xC2xC6", "C4xD8",
                      "C2xC4xC4", "C4xC8", "C2xC2xC8", "C2xC2xC2xC4", "C3xA4", "C2xD10", "C2xQ16"])


def test_criterion_6_bogomolov_route(report):
    bad, seen = [], 0
    for spec in FAMILY_UP_TO_32:
        g = group_from_spec(spec)
        if g.order > 32:
            continue
        seen += 1
        sh, h0 = sha_n(g, 2), h0n(g, 2)
        br = untwisted_part(g, 2, br_n_mod_m(g, 2))
        if not (sh == h0 and h0 == AbelianInvariants() and br == AbelianInvariants()):
            bad.append((spec, str(sh), str(h0), str(br)))
    report("6  sha_2 = H_02 and Br^2 = 0 for family groups of order <= 32", not bad,
           f"{seen} groups" + (f", mismatches {bad}" if bad else ""))


UP_TO_12 = (["C1"] + [f"C{k}" for k in range(2, 13)] + ["D8", "D10", "D12", "S3", "Q8", "Q12", "A4",
                                                       "C2xC2", "C2xC4", "C2xC2xC2", "C3xC3", "C2xC6"])


def test_criterion_7_two_path(report):
    bad = []
    for spec in UP_TO_12:
        g = group_from_spec(spec)
        for n in (2, 3):
            m = max(2, homology_exponent(g, n))
            h = cohomology_mod_m(g, n, m)
            br = br_n_mod_m(g, n, m, cohomology=h)
            if untwisted_part(g, n, h) != homology(g, n) or untwisted_part(g, n, br) != h0n(g, n):
                bad.append((spec, n))
    report("7  cohomology and Br routes agree with homology and H_0n for |G| <= 12", not bad,
           f"{len(UP_TO_12)} groups" + (f", mismatches {bad}" if bad else ""))


DW_GROUPS = ["C2xC2", "S3", "D8", "Q8", "C4", "C2xC2xC2", "A4", "C3xC3", "D10", "C2xC4", "Q12"]


def test_criterion_8_dw_properties(report):
    rng = np.random.default_rng(2024)
    cache = {}
    failures = 0
    for _ in range(200):
        spec = DW_GROUPS[int(rng.integers(len(DW_GROUPS)))]
        n = int(rng.integers(2, 4))
        if (spec, n) not in cache:
            g = group_from_spec(spec)
            cache[spec, n] = (g, cohomology_mod_m(g, n, max(2, homology_exponent(g, n))),
                              orbit_representatives(g, n))
        g, h, orbits = cache[spec, n]
        m = h.modulus
        w = h.representative([int(rng.integers(d)) for d in h.orders])
        w2 = h.representative([int(rng.integers(d)) for d in h.orders])
        alpha = CochainVector(n - 1, m, g.order, rng.integers(0, m, (g.order - 1) ** (n - 1)))
        t = orbits[int(rng.integers(len(orbits)))].rep
        k = int(rng.integers(g.order))
        base = dw_weight(g, w, t)
        ok = (dw_weight(g, w + coboundary(g, alpha), t) == base
              and dw_weight(g, w, tuple(g.conj(k, x) for x in t)) == base
              and dw_weight(g, w + w2, t) == (base + dw_weight(g, w2, t)) % m)
        failures += not ok

    # Klein four: the bicharacter cocycle w(a, b) = a_1 b_2, the standard nontrivial class
    g = group_from_spec("C2xC2")
    a, b = g.generators
    coord = {}
    for i in (0, 1):
        for j in (0, 1):
            x = 0
            for _ in range(i):
                x = g.mult(x, a)
            for _ in range(j):
                x = g.mult(x, b)
            coord[x] = (i, j)
    values = [coord[x][0] * coord[y][1] for x in range(1, 4) for y in range(1, 4)]
    w = CochainVector(2, 2, 4, values)
    brute = sum(Fraction((-1) ** dw_weight(g, w, t), g.order) for t in brute_commuting_tuples(g, 2))
    klein = (is_cocycle(g, w), dw_partition(g, 2, w).exact_value(), brute)
    klein_ok = klein == (True, 1, 1)

    zero_ok = True
    for spec, n in [("C2", 3), ("C3", 2), ("C2xC2", 3), ("C5", 3), ("C2xC4", 2), ("C3xC3", 2)]:
        g = group_from_spec(spec)
        zero_ok &= dw_partition(g, n, CochainVector.zero(g, n, 2)).exact_value() == g.order ** (n - 1)

    report("8  DW invariance/additivity on 200 instances, Klein value 1, abelian zero class |G|^(n-1)",
           failures == 0 and klein_ok and zero_ok,
           f"{failures} property failures, Klein {klein}, zero class ok={zero_ok}")


ORACLE_GROUPS = ["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C2xC2", "S3", "D8", "Q8", "C2xC2xC2",
                 "D10", "A4", "D12", "Q12", "C2xS3", "C2xC6", "Q16", "D16", "C2xC8", "C3xS3", "D18",
                 "D20", "Q20", "C2xD8", "C2xQ8", "D22", "D24", "Q24", "C2xA4", "S4", "C2xC2xS3", "C4xS3"]


def test_criterion_9_oracles(report):
    bad = []
    for spec in ORACLE_GROUPS:
        g = group_from_spec(spec)
        if g.order > 24:
            continue
        for n in (1, 2, 3):
            got = {o.rep: (o.orbit_size, o.stabilizer_order) for o in orbit_representatives(g, n)}
            if got != brute_orbits(g, n):
                bad.append((spec, n))
    rng = random.Random(99)
    snf_bad = 0
    for _ in range(100):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        rows = [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)]
        snf_bad += elementary_divisors(IntMatrix.from_dense(rows, cols=c)) != minor_gcd_divisors(rows)
    report("9  orbits vs brute force (|G| <= 24, n <= 3); SNF vs minor gcd on 100 matrices",
           not bad and snf_bad == 0, f"orbit mismatches {bad}, SNF mismatches {snf_bad}")
