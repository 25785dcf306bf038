"""Ring-table tests.

The structure tables are oracle-checked: products of the basis elements are
recomputed in Q[t]/(f) by polynomial arithmetic and re-expressed in the
basis by exact linear solves, then compared with the closed-form table.
"""

import random
from fractions import Fraction

import pytest

from ringminima import exact, forms, rings
from ringminima.errors import (DimensionMismatch, InvalidTable,
                               NonAssociativeTable, NonCommutativeTable,
                               UnsupportedDegree, ZeroDiscriminant)
from ringminima.forms import BinaryForm, parse_form
from ringminima.rings import (Ring, change_basis, cubic_form_from_ring,
                              index_identity_check, index_form_cubic,
                              index_value, is_maximal, is_maximal_at,
                              power_basis_ring, ring_disc, ring_from_form,
                              ring_from_dict, ring_to_dict, trace_form,
                              validate_ring, zeta_ring)


def _poly_mod(num, f):
    """Reduce a Fraction-coefficient poly (descending) mod f, f[0] != 0."""
    out = [Fraction(c) for c in num]
    n = len(f) - 1
    while len(out) > n:
        lead = out[0] / Fraction(f[0])
        for i in range(n + 1):
            out[i] -= lead * Fraction(f[i])
        assert out[0] == 0
        out = out[1:]
    return out


def _zeta_vectors(f):
    """Coordinates of 1, z_1, ..., z_{n-1} in powers of t (ascending)."""
    n = len(f) - 1
    vecs = [[Fraction(1)] + [Fraction(0)] * (n - 1)]  # the element 1
    for i in range(1, n):
        # z_i = f0 t^i + f1 t^(i-1) + ... + f_{i-1} t
        asc = [Fraction(0)] * n
        for m in range(1, i + 1):
            asc[m] = Fraction(f[i - m])
        vecs.append(asc)
    return vecs


def _product_in_basis(f, i, j):
    """z_i * z_j computed in Q[t]/(f), re-expressed in (1, z_1, ...)."""
    n = len(f) - 1
    vecs = _zeta_vectors(f)
    a = list(reversed(vecs[i]))
    b = list(reversed(vecs[j]))
    prod = exact.poly_mul(a, b)
    red = _poly_mod(prod, f)
    red_asc = list(reversed(red))
    red_asc += [Fraction(0)] * (n - len(red_asc))
    # solve sum_k x_k * vecs[k] = red_asc
    m = [[vecs[k][r] for k in range(n)] for r in range(n)]
    sol = exact.solve_linear(m, red_asc)
    assert sol is not None
    return sol


@pytest.mark.parametrize("n", [3, 4, 5])
def test_zeta_table_against_polynomial_oracle(n):
    rng = random.Random(100 + n)
    for _ in range(8):
        f = [rng.randrange(-5, 6) for _ in range(n + 1)]
        if f[0] == 0:
            f[0] = 1 + rng.randrange(4)
        form = BinaryForm(tuple(f))
        ring = zeta_ring(form)
        # [DERIVED] every basis product recomputed in Q[t]/(f)
        for i in range(1, n):
            for j in range(i, n):
                want = _product_in_basis(f, i, j)
                got = ring.table[i][j]
                assert [Fraction(g) for g in got] == want


def test_cubic_table_frozen_examples():
    # [PAPER] (0,1,1,0): w^2 = w, t^2 = -t, w t = 0 (the Z^3 shape)
    r = ring_from_form(parse_form("0,1,1,0"))
    assert r.table[1][1] == (0, 1, 0)
    assert r.table[2][2] == (0, 0, -1)
    assert r.table[1][2] == (0, 0, 0)
    # [PAPER] (1,0,-1,0): w^2 = 1 - t, t^2 = t, w t = 0
    r = ring_from_form(parse_form("1,0,-1,0"))
    assert r.table[1][1] == (1, 0, -1)
    assert r.table[2][2] == (0, 0, 1)
    assert r.table[1][2] == (0, 0, 0)


def test_cubic_vs_zeta_basis_change():
    # [DERIVED] the classical cubic basis is (1, -z1, -z2 - f2)
    rng = random.Random(7)
    for _ in range(10):
        f = tuple(rng.randrange(-5, 6) for _ in range(4))
        if all(c == 0 for c in f):
            continue
        form = BinaryForm(f)
        zr = zeta_ring(form)
        U = [[1, 0, 0], [0, -1, 0], [-f[2], 0, -1]]
        assert change_basis(zr, U).table == ring_from_form(form).table


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_ring_validates_and_disc_matches_form(n):
    rng = random.Random(41 + n)
    for _ in range(10):
        f = tuple(rng.randrange(-4, 5) for _ in range(n + 1))
        if all(c == 0 for c in f):
            continue
        form = BinaryForm(f)
        ring = ring_from_form(form)
        validate_ring(ring)
        # [PAPER] disc(ring of f) = disc(f), including degenerate forms
        assert ring_disc(ring) == form.disc()


def test_validate_catches_corruption():
    r = ring_from_form(parse_form("1,0,-1,0"))
    tbl = [list(map(list, row)) for row in r.table]
    tbl[1][2][0] += 1
    with pytest.raises(NonCommutativeTable):
        validate_ring(Ring(tuple(tuple(tuple(c) for c in row) for row in tbl)))
    tbl = [list(map(list, row)) for row in r.table]
    tbl[1][2][0] += 1
    tbl[2][1][0] += 1
    with pytest.raises(NonAssociativeTable):
        validate_ring(Ring(tuple(tuple(tuple(c) for c in row) for row in tbl)))
    with pytest.raises(DimensionMismatch):
        Ring(((1,),))


def test_trace_form_diagonal_example():
    # [DERIVED] Z^3 = ring of x^2 y + x y^2: trace of 1 is 3, of w is 1
    r = ring_from_form(parse_form("0,1,1,0"))
    t = trace_form(r)
    assert t[0][0] == 3
    assert exact.bareiss_det(t) == 1


def test_cubic_form_from_ring_roundtrip():
    rng = random.Random(17)
    for _ in range(20):
        f = tuple(rng.randrange(-6, 7) for _ in range(4))
        if all(c == 0 for c in f):
            continue
        form = BinaryForm(f)
        # [TRIVIAL] exact round trip
        assert cubic_form_from_ring(ring_from_form(form)).coeffs == f


def test_cubic_form_from_translated_basis():
    # translations of the non-unit basis vectors leave the form fixed
    rng = random.Random(19)
    for _ in range(10):
        f = tuple(rng.randrange(-4, 5) for _ in range(4))
        if all(c == 0 for c in f):
            continue
        ring = ring_from_form(BinaryForm(f))
        s, t = rng.randrange(-3, 4), rng.randrange(-3, 4)
        moved = change_basis(ring, [[1, 0, 0], [s, 1, 0], [t, 0, 1]])
        assert cubic_form_from_ring(moved).coeffs == f


def test_cubic_form_from_gl2_changed_basis_is_equivalent():
    # [DERIVED] a unimodular change of the (w, t) plane recovers a form in
    # the same GL2(Z)-orbit
    rng = random.Random(23)
    f = BinaryForm((1, 1, -2, 1))
    ring = ring_from_form(f)
    can0 = forms.cubic_canonical_form(f)[0]
    for _ in range(8):
        a, b, c, d = (rng.randrange(-2, 3) for _ in range(4))
        if a * d - b * c not in (1, -1):
            continue
        U = [[1, 0, 0], [0, a, b], [0, c, d]]
        g = cubic_form_from_ring(change_basis(ring, U))
        assert forms.cubic_canonical_form(g)[0].coeffs == can0.coeffs


def test_power_basis_ring_matches_zeta_for_monic():
    rng = random.Random(29)
    for n in (3, 4, 5):
        f = tuple([1] + [rng.randrange(-4, 5) for _ in range(n)])
        pb = power_basis_ring(f)
        validate_ring(pb)
        # [DERIVED] z_i = t^i + f1 t^(i-1) + ... + f_{i-1} t: triangular U
        U = [[0] * n for _ in range(n)]
        U[0][0] = 1
        for i in range(1, n):
            for j in range(i):
                U[i][i - j] = f[j]
        zr = zeta_ring(BinaryForm(f))
        assert change_basis(pb, U).table == zr.table
        assert ring_disc(pb) == BinaryForm(f).disc()


def test_index_form_cubic_is_the_form():
    # [PAPER] the index form of the ring of f is f itself
    for lit in ["0,1,1,0", "1,0,-1,0", "2,1,-3,1"]:
        form = parse_form(lit)
        assert index_form_cubic(ring_from_form(form)).coeffs == form.coeffs


@pytest.mark.parametrize("n", [3, 4, 5])
def test_index_identity(n):
    rng = random.Random(61 + n)
    for _ in range(6):
        f = tuple(rng.randrange(-4, 5) for _ in range(n + 1))
        if all(c == 0 for c in f):
            continue
        # [DERIVED] I(x^(n-2), ..., y^(n-2)) = f^C(n-1,2), checked exactly
        assert index_identity_check(BinaryForm(f))


def test_index_value_guards():
    r = ring_from_form(parse_form("1,0,-1,0"))
    with pytest.raises(DimensionMismatch):
        index_value(r, (1, 2, 3))


# ------------------------------------------------------------- maximality


def test_maximality_known_orders():
    # [DERIVED] x^3 - x - 1: disc -23 squarefree, maximal everywhere
    r = ring_from_form(parse_form("1,0,-1,-1"))
    assert is_maximal(r)
    # [DERIVED] Z[2^(2/3)-ish]: ring of x^3 - 4y^3, disc -432 = 2^4 * -27;
    # index 2 inside the maximal order of Q(cbrt(2)) (field disc -108)
    r2 = ring_from_form(parse_form("1,0,0,-4"))
    assert not is_maximal_at(r2, 2)
    assert is_maximal_at(r2, 3)
    assert not is_maximal(r2)
    # [DERIVED] ring of x^3 - 2y^3 is Z[cbrt(2)], maximal (disc -108)
    r3 = ring_from_form(parse_form("1,0,0,-2"))
    assert is_maximal_at(r3, 2)
    assert is_maximal_at(r3, 3)
    assert is_maximal(r3)


def test_maximality_squarefree_fast_path():
    r = ring_from_form(parse_form("1,0,-1,-1"))
    # disc -23: ell^2 does not divide, every prime is instantly maximal
    assert is_maximal_at(r, 23)
    assert is_maximal_at(r, 2)


def test_eigenline_path_agrees_with_enumeration():
    rng = random.Random(97)
    import ringminima.rings as rmod
    for _ in range(12):
        f = tuple(rng.randrange(-4, 5) for _ in range(4))
        form = BinaryForm(f) if any(f) else None
        if form is None or form.disc() == 0:
            continue
        ring = ring_from_form(form)
        for ell in (2, 3, 5):
            if ring_disc(ring) % (ell * ell):
                continue
            got_enum = any(rmod._line_gives_overring(ring, w, ell)
                           for w in rmod._lines_mod(ell, ring.rank))
            got_eig = any(rmod._line_gives_overring(ring, w, ell)
                          for w in rmod._eigenlines(ring, ell))
            # [DERIVED] the eigenline candidate set is complete
            assert got_enum == got_eig


def test_zero_disc_maximality_rejected():
    r = ring_from_form(parse_form("1,0,0,0"))
    with pytest.raises(ZeroDiscriminant):
        is_maximal_at(r, 2)


def test_serialization_roundtrip():
    r = ring_from_form(parse_form("1,2,0,-1,1"))
    d = ring_to_dict(r)
    assert d["rank"] == 4
    assert ring_from_dict(d).table == r.table
    with pytest.raises(InvalidTable):
        ring_from_dict({"rank": 4, "table": d["table"], "extra": 1})


def test_change_basis_guards():
    r = ring_from_form(parse_form("1,0,-1,0"))
    with pytest.raises(InvalidTable):
        change_basis(r, [[2, 0, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(InvalidTable):
        change_basis(r, [[1, 0, 0], [0, 2, 0], [0, 0, 1]])
    with pytest.raises(UnsupportedDegree):
        cubic_form_from_ring(ring_from_form(parse_form("1,0,0,0,1")))
