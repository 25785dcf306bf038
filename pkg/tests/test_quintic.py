"""Alternating quadruples, the quintic box, and ring-side profiles."""

import random
from fractions import Fraction

import pytest

from ringminima import quintic, rings
from ringminima.errors import (
    DegenerateDiscriminant,
    DimensionMismatch,
    InvalidPoint,
)
from ringminima.forms import BinaryForm
from ringminima.quintic import (
    AltTensor,
    psi_binary_quintic,
    quintic_ring_side,
    tensor_action,
    tensor_box_exponent,
    tensor_from_flat,
    tensor_in_box,
)

BINARY_POINT = (Fraction(1, 8),) * 4 + (Fraction(1, 4),) * 3 \
    + (Fraction(3, 8),) * 2
MONIC_POINT = tuple(Fraction(k, 20) for k in (1, 2, 3, 4, 4, 5, 6, 7, 8))


def test_tensor_serialize_roundtrip():
    rng = random.Random(0)
    flat = tuple(rng.randint(-9, 9) for _ in range(40))
    t = tensor_from_flat(flat)
    assert t.serialize() == flat
    with pytest.raises(DimensionMismatch):
        tensor_from_flat(flat[:39])
    with pytest.raises(DimensionMismatch):
        AltTensor(((0,) * 10,) * 3)


def test_entry_alternating_completion():
    t = tensor_from_flat(range(40))
    for k in range(1, 5):
        m = t.matrix(k)
        for i in range(5):
            assert m[i][i] == 0
            for j in range(5):
                assert m[i][j] == -m[j][i]
    assert t.entry(1, 2, 1) == -t.entry(1, 1, 2)
    with pytest.raises(DimensionMismatch):
        t.entry(5, 1, 2)


def test_psi_anchor_slots():
    t = psi_binary_quintic((1, 0, 0, 0, 0, 1))
    assert t.entry(1, 2, 3) == -1
    assert t.entry(1, 4, 5) == -1
    assert t.entry(4, 1, 5) == 1
    assert t.entry(4, 3, 4) == -1
    # all other coefficient slots vanish for this form
    assert t.entry(2, 3, 5) == 0
    assert t.entry(2, 4, 5) == 0
    assert t.entry(3, 3, 4) == 0
    assert t.entry(3, 3, 5) == 0


def test_psi_substitution():
    t = psi_binary_quintic((1, 2, 3, 4, 5, 6))
    assert t.entry(1, 4, 5) == -6
    assert t.entry(2, 3, 5) == -4
    assert t.entry(2, 4, 5) == -5
    assert t.entry(3, 3, 4) == -2
    assert t.entry(3, 3, 5) == -3
    assert t.entry(4, 3, 4) == -1
    # fixed pattern
    assert t.entry(1, 2, 3) == -1
    assert t.entry(2, 1, 3) == 1
    assert t.entry(2, 2, 4) == 1
    assert t.entry(3, 1, 4) == -1
    assert t.entry(3, 2, 5) == -1
    assert t.entry(4, 1, 5) == 1


def test_psi_zero_form_keeps_fixed_entries():
    t = psi_binary_quintic((0, 0, 0, 0, 0, 0))
    fixed = {(1, 2, 3): -1, (2, 1, 3): 1, (2, 2, 4): 1,
             (3, 1, 4): -1, (3, 2, 5): -1, (4, 1, 5): 1}
    for k in range(1, 5):
        for i in range(1, 6):
            for j in range(i + 1, 6):
                assert t.entry(k, i, j) == fixed.get((k, i, j), 0)


def test_psi_linear_on_coefficient_slots():
    rng = random.Random(1)
    zero = psi_binary_quintic((0,) * 6).serialize()
    for _ in range(20):
        f = tuple(rng.randint(-9, 9) for _ in range(6))
        g = tuple(rng.randint(-9, 9) for _ in range(6))
        h = tuple(a + b for a, b in zip(f, g))
        sf = psi_binary_quintic(f).serialize()
        sg = psi_binary_quintic(g).serialize()
        sh = psi_binary_quintic(h).serialize()
        assert all(c - z == (a - z) + (b - z)
                   for a, b, c, z in zip(sf, sg, sh, zero))


def test_box_zero_tensor_and_guards():
    zero = tensor_from_flat((0,) * 40)
    assert tensor_in_box(zero, BINARY_POINT, 1)
    assert tensor_in_box(zero, BINARY_POINT, 10 ** 9)
    with pytest.raises(InvalidPoint):
        tensor_in_box(zero, (1, 2, 3), 10)
    with pytest.raises(InvalidPoint):
        # sums wrong
        tensor_in_box(zero, (Fraction(1, 4),) * 4 + (Fraction(1, 5),) * 5, 10)
    with pytest.raises(ValueError):
        tensor_in_box(zero, BINARY_POINT, 10, slack=0)


def test_box_binary_vertex_iff_height():
    x = 2 ** 8
    rng = random.Random(2)
    for _ in range(60):
        f = tuple(rng.randint(-3, 3) for _ in range(6))
        want = max(abs(c) for c in f) <= 2
        assert tensor_in_box(psi_binary_quintic(f), BINARY_POINT, x) == want
    # fixed slots sit exactly on the boundary (exponent 0)
    assert tensor_box_exponent(BINARY_POINT, 1, 2, 3) == 0
    assert tensor_box_exponent(BINARY_POINT, 4, 1, 5) == 0
    assert tensor_box_exponent(BINARY_POINT, 1, 4, 5) == Fraction(1, 8)


def test_box_monic_vertex_with_slack():
    x = 2 ** 20
    # three fixed slots have negative exponent at the monic vertex
    assert tensor_box_exponent(MONIC_POINT, 2, 1, 3) == Fraction(-1, 20)
    assert tensor_box_exponent(MONIC_POINT, 3, 1, 4) == Fraction(-1, 20)
    assert tensor_box_exponent(MONIC_POINT, 4, 1, 5) == Fraction(-1, 20)
    rng = random.Random(3)
    for _ in range(30):
        f = (1,) + tuple(rng.randint(-2 ** m, 2 ** m) for m in range(1, 6))
        t = psi_binary_quintic(f)
        assert not tensor_in_box(t, MONIC_POINT, x)          # strict box
        assert tensor_in_box(t, MONIC_POINT, x, slack=2)     # dilated box
    far = psi_binary_quintic((1, 5, 0, 0, 0, 0))             # |f1| > 2*X^(1/20)
    assert not tensor_in_box(far, MONIC_POINT, x, slack=2)


def test_tensor_action_integer_output():
    rng = random.Random(4)
    t = psi_binary_quintic((1, 2, 3, 4, 5, 6))
    g4 = ((1, 0, 0, 0), (2, 1, 0, 0), (0, 0, 1, 0), (0, 1, 0, 1))
    g5 = ((1, 0, 0, 0, 0), (0, 1, 0, 0, 0), (0, 0, 1, 0, 0),
          (0, 3, 0, 1, 0), (0, 0, 0, 0, 1))
    out = tensor_action(t, g4, g5)
    assert all(isinstance(v, int) for v in out.serialize())
    # identity acts trivially
    e4 = tuple(tuple(int(i == j) for j in range(4)) for i in range(4))
    e5 = tuple(tuple(int(i == j) for j in range(5)) for i in range(5))
    assert tensor_action(t, e4, e5).serialize() == t.serialize()
    # alternation survives a random integer conjugation
    g5r = tuple(tuple(rng.randint(-2, 2) for _ in range(5)) for _ in range(5))
    out2 = tensor_action(t, g4, g5r)
    for k in range(1, 5):
        m = out2.matrix(k)
        assert all(m[i][j] == -m[j][i] for i in range(5) for j in range(5))


def test_ring_side_anchor():
    prof = quintic_ring_side((1, 0, 0, 0, 0, 1))
    assert prof.disc == 3125
    assert all(abs(l - 1.0) <= 1e-9 for l in prof.lams)
    assert all(abs(v) <= 1e-9 for v in prof.p)
    zeta = rings.ring_from_form(BinaryForm((1, 0, 0, 0, 0, 1)))
    assert rings.ring_disc(zeta) == 3125


def test_ring_side_binary_sample_near_vertex():
    rng = random.Random(20)
    best = None
    for _ in range(40):
        f = tuple(rng.randint(-3, 3) for _ in range(6))
        d = BinaryForm(f).disc()
        if d != 0 and (best is None or abs(d) > best[0]):
            best = (abs(d), f)
    prof = quintic_ring_side(best[1])
    assert all(abs(v - 0.125) <= 0.12 for v in prof.p)


def test_ring_side_monic_sample_near_vertex():
    rng = random.Random(21)
    best = None
    for _ in range(40):
        f = (1,) + tuple(rng.randint(-2 ** m, 2 ** m) for m in range(1, 6))
        d = BinaryForm(f).disc()
        if d != 0 and (best is None or abs(d) > best[0]):
            best = (abs(d), f)
    prof = quintic_ring_side(best[1])
    targets = (0.05, 0.10, 0.15, 0.20)
    assert all(abs(v - t) <= 0.15 for v, t in zip(prof.p, targets))
    assert all(a <= b + 1e-12 for a, b in zip(prof.p, prof.p[1:]))


def test_ring_side_guards():
    with pytest.raises(DegenerateDiscriminant):
        quintic_ring_side((0, 0, 1, 0, 0, 0))    # disc 0
    with pytest.raises(DimensionMismatch):
        quintic_ring_side((1, 0, 0, 0, 1))       # degree 4
