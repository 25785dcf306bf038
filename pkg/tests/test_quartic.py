"""Pairs of ternary quadratic forms, rank-4 rings, families, boxes."""

import random
from fractions import Fraction

import pytest

from ringminima import minima, quartic, rings
from ringminima.errors import (
    DegenerateDiscriminant,
    DimensionMismatch,
    PairingNotFound,
    ShapeViolation,
)
from ringminima.forms import BinaryForm
from ringminima.quartic import (
    FamilyTriple,
    TernaryQuadPair,
    family_height,
    family_pack,
    index_identity_x2,
    index_identity_xyxy,
    pair_action,
    pair_disc,
    pair_in_box,
    pair_literal,
    parse_pair,
    psi_binary_quartic,
    quartic_ring,
    resolvent_cubic,
    resolvent_map_candidates,
    resolvent_map_numeric,
)

ANCHOR = psi_binary_quartic((1, 0, 0, 0, 1))


def _rand_pair(rng, span=3):
    while True:
        a = tuple(rng.randint(-span, span) for _ in range(6))
        b = tuple(rng.randint(-span, span) for _ in range(6))
        p = TernaryQuadPair(a, b)
        if pair_disc(p) != 0:
            return p


def _rand_quartic(rng, span=3):
    while True:
        f = tuple(rng.randint(-span, span) for _ in range(5))
        if BinaryForm(f).disc() != 0:
            return f


# ------------------------------------------------------------ pair basics

def test_pair_literal_roundtrip():
    p = TernaryQuadPair((1, -2, 3, 0, 5, -6), (0, 1, 1, 2, -3, 4))
    assert parse_pair(pair_literal(p)) == p
    assert pair_literal(ANCHOR) == "1,0,0,0,0,1;0,0,1,1,0,0"


def test_pair_needs_six_coordinates():
    with pytest.raises(DimensionMismatch):
        TernaryQuadPair((1, 0, 0, 0, 0), (0, 0, 1, 1, 0, 0))


def test_quad_value_matches_gram():
    rng = random.Random(1)
    for _ in range(20):
        p = TernaryQuadPair(tuple(rng.randint(-4, 4) for _ in range(6)),
                            tuple(rng.randint(-4, 4) for _ in range(6)))
        c = [rng.randint(-3, 3) for _ in range(3)]
        g = p.gram("a")
        want = sum(g[i][j] * c[i] * c[j] for i in range(3) for j in range(3))
        assert p.quad_value("a", c) == want
        d = [rng.randint(-3, 3) for _ in range(3)]
        bil = sum(g[i][j] * c[i] * d[j] for i in range(3) for j in range(3))
        assert p.bilinear("a", c, d) == bil


# ------------------------------------------------------------- resolvent

def test_resolvent_anchor():
    assert resolvent_cubic(ANCHOR).coeffs == (-1, 0, 4, 0)
    assert pair_disc(ANCHOR) == 256


def test_resolvent_diagonal_pair():
    # diagonal A = (1,1,1), B = (1,2,3): 4(x-y)(2x-y)(3x-y)
    p = TernaryQuadPair((1, 0, 0, 1, 0, 1), (1, 0, 0, 2, 0, 3))
    assert resolvent_cubic(p).coeffs == (24, -44, 24, -4)


def test_degenerate_pair_rejected():
    p = TernaryQuadPair((1, 0, 0, 1, 0, 1), (1, 0, 0, 1, 0, 1))
    assert pair_disc(p) == 0
    with pytest.raises(DegenerateDiscriminant):
        quartic_ring(p)
    zero = TernaryQuadPair((1, 0, 0, 1, 0, 1), (0,) * 6)
    with pytest.raises(DegenerateDiscriminant):
        quartic_ring(zero)


def test_pair_disc_psi_equals_form_disc():
    rng = random.Random(2)
    for _ in range(100):
        f = tuple(rng.randint(-5, 5) for _ in range(5))
        assert pair_disc(psi_binary_quartic(f)) == BinaryForm(f).disc()


def test_pair_disc_group_invariance():
    rng = random.Random(3)
    g2s = [((1, 0), (0, 1)), ((1, 1), (0, 1)), ((0, 1), (-1, 0)),
           ((1, 0), (2, 1)), ((0, 1), (1, 0))]
    g3s = [((1, 0, 0), (0, 1, 0), (0, 0, 1)),
           ((1, 0, 0), (1, 1, 0), (0, 0, 1)),
           ((0, 0, 1), (1, 0, 0), (0, 1, 0)),
           ((1, 0, -2), (0, 1, 0), (0, 0, 1)),
           ((0, 1, 0), (1, 0, 0), (0, 0, -1))]
    for _ in range(100):
        p = TernaryQuadPair(tuple(rng.randint(-4, 4) for _ in range(6)),
                            tuple(rng.randint(-4, 4) for _ in range(6)))
        q = pair_action(p, rng.choice(g2s), rng.choice(g3s))
        assert pair_disc(q) == pair_disc(p)


# ------------------------------------------------------------------ psi

def test_psi_shape():
    p = ANCHOR
    assert p.a == (1, 0, 0, 0, 0, 1)
    assert p.b == (0, 0, 1, 1, 0, 0)
    assert p.gram("b")[0][2] == Fraction(1, 2)
    assert p.gram("b")[1][1] == 1
    q = psi_binary_quartic((1, 2, 3, 4, 5))
    assert q.a == (1, 2, 0, 3, -4, 5)


def test_psi_box_iff_coefficient_height():
    # at p = (1/6,1/6,1/6,1/6,1/3) box membership is the coefficient bound
    point = (Fraction(1, 6), Fraction(1, 6), Fraction(1, 6),
             Fraction(1, 6), Fraction(1, 3))
    x = 2 ** 6
    inside = psi_binary_quartic((2, -2, 1, 0, 2))     # height 2 = X^(1/6)
    outside = psi_binary_quartic((3, 0, 0, 0, 1))     # height 3
    assert pair_in_box(inside, point, x)
    assert not pair_in_box(outside, point, x)
    rng = random.Random(4)
    for _ in range(60):
        f = tuple(rng.randint(-3, 3) for _ in range(5))
        want = max(abs(c) for c in f) <= 2
        assert pair_in_box(psi_binary_quartic(f), point, x) == want


# ------------------------------------------------------------ ring build

def test_quartic_ring_anchor():
    r, c = quartic_ring(ANCHOR)
    rings.validate_ring(r)
    rings.validate_ring(c)
    assert rings.ring_disc(r) == 256
    assert rings.ring_disc(c) == 256
    zeta = rings.ring_from_form(BinaryForm((1, 0, 0, 0, 1)))
    assert minima.ring_fingerprint(r) == minima.ring_fingerprint(zeta)


def test_quartic_ring_random_pairs():
    rng = random.Random(5)
    for _ in range(10):
        p = _rand_pair(rng)
        r, c = quartic_ring(p)
        rings.validate_ring(r)
        d = pair_disc(p)
        assert rings.ring_disc(r) == d
        assert rings.ring_disc(c) == d


def test_quartic_ring_group_equivariance():
    rng = random.Random(6)
    for _ in range(2):
        p = _rand_pair(rng)
        r, _ = quartic_ring(p)
        fp = minima.ring_fingerprint(r)
        for g2, g3 in [(((1, 1), (0, 1)), ((1, 0, 0), (0, 1, 0), (0, 0, 1))),
                       (((1, 0), (0, 1)), ((1, 0, 0), (2, 1, 0), (0, 0, 1))),
                       (((0, 1), (-1, 0)), ((0, 1, 0), (0, 0, 1), (1, 0, 0)))]:
            q = pair_action(p, g2, g3)
            r2, _ = quartic_ring(q)
            assert minima.ring_fingerprint(r2) == fp


def test_psi_ring_matches_nic_construction():
    rng = random.Random(7)
    for _ in range(8):
        f = _rand_quartic(rng)
        p = psi_binary_quartic(f)
        r, _ = quartic_ring(p)
        zeta = rings.ring_from_form(BinaryForm(f))
        assert rings.ring_disc(r) == rings.ring_disc(zeta)
        lr = minima.successive_minima(minima.gram(r)).lams
        lz = minima.successive_minima(minima.gram(zeta)).lams
        assert all(abs(a - b) <= 1e-9 * max(1.0, b) for a, b in zip(lr, lz))
        assert minima.ring_fingerprint(r) == minima.ring_fingerprint(zeta)


# -------------------------------------------------------- resolvent map

def test_resolvent_map_anchor_exact():
    r, c = quartic_ring(ANCHOR)
    m = resolvent_map_numeric(r, c)
    assert m.pair == ANCHOR
    assert m.residual < 1e-9


def test_resolvent_map_roundtrip_candidates():
    rng = random.Random(8)
    for _ in range(8):
        p = _rand_pair(rng)
        r, c = quartic_ring(p)
        cands = resolvent_map_candidates(r, c)
        assert any(m.pair == p for m in cands)
        best = resolvent_map_numeric(r, c)
        assert resolvent_cubic(best.pair).coeffs == resolvent_cubic(p).coeffs


def test_resolvent_map_rejects_wrong_cubic():
    rng = random.Random(9)
    p1 = _rand_pair(rng)
    while True:
        p2 = _rand_pair(rng)
        if pair_disc(p2) != pair_disc(p1):
            break
    r1, _ = quartic_ring(p1)
    _, c2 = quartic_ring(p2)
    with pytest.raises(PairingNotFound):
        resolvent_map_numeric(r1, c2)


def test_resolvent_map_rank_guard():
    r, c = quartic_ring(ANCHOR)
    with pytest.raises(DimensionMismatch):
        resolvent_map_numeric(c, c)


# ------------------------------------------------------ index identities

def test_index_identity_xy():
    rng = random.Random(10)
    for _ in range(5):
        p = _rand_pair(rng, span=2)
        r, _ = quartic_ring(p)
        for _ in range(6):
            x = tuple(rng.randint(-3, 3) for _ in range(4))
            y = tuple(rng.randint(-3, 3) for _ in range(4))
            assert index_identity_xyxy(p, r, x, y)


def test_index_identity_square():
    rng = random.Random(11)
    for _ in range(5):
        p = _rand_pair(rng, span=2)
        r, _ = quartic_ring(p)
        for _ in range(6):
            x = tuple(rng.randint(-3, 3) for _ in range(4))
            y = tuple(rng.randint(-3, 3) for _ in range(4))
            assert index_identity_x2(p, r, x, y)


# -------------------------------------------------------------- families

def test_family_shapes_and_heights():
    t = FamilyTriple("xy_xy", (2, 1, 1, 1, 1, 1))
    p = family_pack(t)
    assert p.a == (1, 0, 2, 0, 1, 1)
    assert p.b == (0, 0, 1, 1, 1, 1)
    assert family_height(t) == 4
    t2 = FamilyTriple("x_y_x2", (1, -3, 1, 2, 1, 1, 2))
    p2 = family_pack(t2)
    assert p2.a == (1, 0, 1, -3, 1, 2)
    assert p2.b == (0, 1, 0, 1, 1, 2)
    assert family_height(t2) == 4  # b33^2 dominates


def test_family_degenerate_and_violations():
    assert pair_disc(family_pack(FamilyTriple("xy_xy", (0,) * 6))) == 0
    with pytest.raises(ShapeViolation):
        FamilyTriple("zz", (0,) * 6)
    with pytest.raises(ShapeViolation):
        FamilyTriple("xy_xy", (0,) * 7)
    with pytest.raises(ShapeViolation):
        FamilyTriple("xy_xy", (0,) * 6, eps=2)
    with pytest.raises(ShapeViolation):
        FamilyTriple("x_y_x2", (0,) * 7, nu=3)


def test_family_box_iff_height():
    # x_y_x2 members: H(T)^5 <= X exactly when the pair is in the box
    point = (Fraction(1, 10), Fraction(1, 5), Fraction(1, 5),
             Fraction(1, 5), Fraction(3, 10))
    x = 4 ** 5
    rng = random.Random(12)
    for _ in range(60):
        t = FamilyTriple("x_y_x2", tuple(rng.randint(-5, 5) for _ in range(7)))
        want = family_height(t) ** 5 <= x
        assert pair_in_box(family_pack(t), point, x) == want


def test_family_box_iff_height_xy_xy():
    point = (Fraction(1, 8), Fraction(1, 8), Fraction(1, 4),
             Fraction(1, 4), Fraction(1, 4))
    x = 3 ** 4
    rng = random.Random(13)
    for _ in range(60):
        t = FamilyTriple("xy_xy", tuple(rng.randint(-4, 4) for _ in range(6)))
        want = family_height(t) ** 4 <= x
        assert pair_in_box(family_pack(t), point, x) == want


def test_family_ring_basis_structure():
    # xy_xy rings: v1 v2 lands on v3 with unit coefficient; x_y_x2
    # rings: v1^2 does
    rng = random.Random(14)
    seen = 0
    while seen < 3:
        t = FamilyTriple("xy_xy", tuple(rng.randint(-2, 2) for _ in range(6)))
        p = family_pack(t)
        if pair_disc(p) == 0:
            continue
        r, _ = quartic_ring(p)
        prod = r.multiply((0, 1, 0, 0), (0, 0, 1, 0))
        assert abs(prod[3]) == 1
        seen += 1
    seen = 0
    while seen < 3:
        t = FamilyTriple("x_y_x2", tuple(rng.randint(-2, 2) for _ in range(7)))
        p = family_pack(t)
        if pair_disc(p) == 0:
            continue
        r, _ = quartic_ring(p)
        sq = r.multiply((0, 1, 0, 0), (0, 1, 0, 0))
        assert abs(sq[3]) == 1
        seen += 1
