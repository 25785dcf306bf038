"""Lattice-minima tests.

The successive-minima pipeline is verified against an independent
box-scan oracle (coordinate bounds from the inverse Gram, ranks via
sympy) and against hand-computable lattices; ring lattices are checked
for the homomorphism property, the determinant identity, and the
classical product bounds on the minima.
"""

import itertools
import math
import random

import numpy as np
import pytest
import sympy

from ringminima import minima
from ringminima.errors import (DegenerateDiscriminant, DimensionMismatch,
                               PrecisionExhausted, UnitDiscriminant)
from ringminima.forms import BinaryForm, is_irreducible
from ringminima.minima import (MinkLattice, MinimaProfile, check_bound_system,
                               dual_minima, embeddings, gram, has_cycle,
                               is_close, minkowski_reduced_basis, profile,
                               successive_minima, unit_ball_volume)
from ringminima.rings import Ring, ring_disc, ring_from_form

CBRT2 = BinaryForm((1, 0, 0, -2))   # x^3 - 2y^3, |disc| = 108
SPLIT3 = BinaryForm((0, 1, 1, 0))   # xy(x+y), disc = 1, ring = Z^3


def _random_form(rng, deg, span=6):
    while True:
        coeffs = tuple(rng.randint(-span, span) for _ in range(deg + 1))
        f = BinaryForm(coeffs)
        try:
            from ringminima.exact import form_discriminant
            if form_discriminant(coeffs) != 0:
                return f
        except Exception:
            continue


def _random_ring(rng, deg, span=6):
    return ring_from_form(_random_form(rng, deg, span))


def _qval(g, v):
    a = np.array(g, dtype=float)
    w = np.array(v, dtype=float)
    return float(w @ a @ w)


def _box_oracle_check(g, lams, wits, rel=1e-9, max_box=3_000_000):
    """Independent verification of claimed successive minima.

    (a) the witnesses are genuine: integer vectors, claimed lengths,
        each prefix linearly independent (sympy rank);
    (b) no better chain exists: a full box scan up to (1.2 * lam_max)^2
        admits no greedy chain shorter at any index.
    Returns False when the box would be too large to scan (caller skips).
    """
    n = len(g)
    assert len(lams) == len(wits) == n
    for k in range(n):
        assert abs(math.sqrt(_qval(g, wits[k])) - lams[k]) <= rel * lams[k]
        assert sympy.Matrix([list(w) for w in wits[: k + 1]]).rank() == k + 1
    bound = (1.2 * lams[-1]) ** 2
    ainv = np.linalg.inv(np.array(g, dtype=float))
    ranges = [int(math.floor(math.sqrt(bound * ainv[i][i]) + 1e-9)) + 1
              for i in range(n)]
    total = 1
    for r in ranges:
        total *= 2 * r + 1
    if total > max_box:
        return False
    vecs = []
    for x in itertools.product(*[range(-r, r + 1) for r in ranges]):
        if any(x) and _qval(g, x) <= bound * (1 + 1e-9):
            vecs.append(x)
    vecs.sort(key=lambda v: (_qval(g, v), v))
    oracle, rows = [], []
    for v in vecs:
        m = sympy.Matrix(rows + [list(v)])
        if m.rank() == len(rows) + 1:
            rows.append(list(v))
            oracle.append(math.sqrt(_qval(g, v)))
            if len(oracle) == n:
                break
    assert len(oracle) == n
    for a, b in zip(oracle, lams):
        assert abs(a - b) <= rel * max(a, b)
    return True


# ---------------------------------------------------------------- embeddings

def test_embeddings_rows_are_homomorphisms():
    # sigma(v_i v_j) = sigma(v_i) sigma(v_j) and sigma(1) = 1 for each row,
    # and |det E|^2 = |disc|  [DERIVED: property via trace-form discriminant]
    rng = random.Random(11)
    for deg in (3, 4, 5):
        for _ in range(8):
            ring = _random_ring(rng, deg)
            n = ring.rank
            ee = embeddings(ring)
            scale = max(1.0, float(np.max(np.abs(ee))))
            for k in range(n):
                assert abs(ee[k, 0] - 1) <= 1e-9 * scale
                for i in range(n):
                    for j in range(i, n):
                        prod = ring.table[i][j]
                        lhs = sum(prod[t] * ee[k, t] for t in range(n))
                        rhs = ee[k, i] * ee[k, j]
                        assert abs(lhs - rhs) <= 1e-8 * scale * scale
            det = np.linalg.det(ee)
            assert abs(abs(det) ** 2 - abs(ring_disc(ring))) <= \
                1e-6 * max(1, abs(ring_disc(ring)))


def test_embeddings_deterministic():
    e1 = embeddings(ring_from_form(CBRT2))
    e2 = embeddings(ring_from_form(CBRT2))
    assert np.array_equal(e1, e2)


def test_embeddings_cbrt2_values():
    # every embedding of the degree-one basis vector has modulus 2^(1/3)
    # [DERIVED: root oracle]
    ee = embeddings(ring_from_form(CBRT2))
    mods = sorted(abs(ee[k, 1]) for k in range(3))
    for m in mods:
        assert abs(m - 2 ** (1 / 3)) < 1e-12 * 4
    # exactly one real row
    reals = [k for k in range(3) if abs(ee[k, 1].imag) < 1e-12]
    assert len(reals) == 1


def test_embeddings_degenerate_rejected():
    ring = ring_from_form(BinaryForm((1, 0, 0, 0)))  # x^3, disc 0
    with pytest.raises(DegenerateDiscriminant):
        embeddings(ring)


# ---------------------------------------------------------------------- gram

def test_gram_unit_first_entry_and_split_ring():
    lat = gram(ring_from_form(SPLIT3))
    assert abs(lat.gram[0][0] - 1) < 1e-12
    # Z^3 lattice: all three minima equal 1/sqrt(3), the lower bound 1/sqrt(n)
    prof = successive_minima(lat)
    for lam in prof.lams:
        assert abs(lam - 1 / math.sqrt(3)) < 1e-9


def test_gram_determinant_identity():
    # det(G) * n^n = |disc| for 100 random rings [DERIVED: via trace disc]
    rng = random.Random(23)
    for _ in range(100):
        deg = rng.choice((3, 4, 5))
        ring = _random_ring(rng, deg)
        lat = gram(ring)
        det = np.linalg.det(np.array(lat.gram))
        d = abs(ring_disc(ring))
        assert abs(det * ring.rank ** ring.rank - d) <= 1e-6 * d


def test_gram_cbrt2_diagonal():
    # G_11 = (1/3) * 3 * 2^(2/3) = 2^(2/3) [DERIVED]
    lat = gram(ring_from_form(CBRT2))
    assert abs(lat.gram[1][1] - 2 ** (2 / 3)) < 1e-9


# ------------------------------------------------------------------- minima

def test_minima_identity_and_diagonal():
    prof = successive_minima(MinkLattice(gram=np.eye(3)))
    assert prof.lams == (1.0, 1.0, 1.0)
    assert prof.p is None and prof.disc is None
    prof = successive_minima(MinkLattice(gram=np.diag([1.0, 4.0, 9.0])))
    assert prof.lams == (1.0, 2.0, 3.0)


def test_minima_idempotent_basis_lattice():
    g = [[1 / 3 if i == j else 0.0 for j in range(3)] for i in range(3)]
    prof = successive_minima(MinkLattice(gram=g))
    for lam in prof.lams:
        assert abs(lam - 1 / math.sqrt(3)) < 1e-12


def test_minima_cbrt2_exact_powers():
    # lambda = (1, 2^(1/3), 2^(2/3)) [DERIVED: enumeration oracle]
    prof = profile(ring_from_form(CBRT2))
    expect = (1.0, 2 ** (1 / 3), 2 ** (2 / 3))
    for a, b in zip(prof.lams, expect):
        assert abs(a - b) <= 1e-9 * b
    lat = gram(ring_from_form(CBRT2))
    assert _box_oracle_check(lat.gram, prof.lams, prof.vectors)


def test_minima_against_box_oracle_random_rings():
    rng = random.Random(5)
    checked = 0
    while checked < 12:
        deg = rng.choice((3, 4))
        ring = _random_ring(rng, deg, span=4)
        lat = gram(ring)
        prof = successive_minima(lat)
        if _box_oracle_check(lat.gram, prof.lams, prof.vectors):
            checked += 1


def test_minkowski_product_bounds_and_lambda0():
    # (2^n/n!) n^(-n/2) sqrt|D| <= V_n prod(lam) <= 2^n n^(-n/2) sqrt|D|;
    # 1/sqrt(n) <= lam_0 <= 1, with lam_0 = 1 on irreducible forms
    rng = random.Random(31)
    for _ in range(200):
        deg = rng.choice((3, 4, 5))
        form = _random_form(rng, deg)
        ring = ring_from_form(form)
        n = ring.rank
        prof = successive_minima(gram(ring))
        vol = unit_ball_volume(n)
        prod = vol
        for lam in prof.lams:
            prod *= lam
        root = math.sqrt(abs(ring_disc(ring))) * n ** (-n / 2)
        assert prod <= 2 ** n * root * (1 + 1e-9)
        assert prod >= 2 ** n / math.factorial(n) * root * (1 - 1e-9)
        lam0 = prof.lams[0]
        assert 1 / math.sqrt(n) - 1e-9 <= lam0 <= 1 + 1e-9
        if is_irreducible(form):
            assert abs(lam0 - 1) <= 1e-9


def test_minima_invariant_under_unimodular_change():
    rng = random.Random(7)
    base = gram(ring_from_form(CBRT2)).gram
    ref = successive_minima(MinkLattice(gram=base)).lams

    def random_unimodular(n):
        u = sympy.eye(n)
        for _ in range(6):
            i, j = rng.sample(range(n), 2)
            u[i, :] += rng.randint(-2, 2) * u[j, :]
            if rng.random() < 0.3:
                u[i, :] = -u[i, :]
        return u

    for _ in range(50):
        u = random_unimodular(3)
        m = u * sympy.Matrix(base) * u.T
        lams = successive_minima(MinkLattice(gram=np.array(m, dtype=float))).lams
        for a, b in zip(lams, ref):
            assert abs(a - b) <= 1e-9 * max(a, b)


# ------------------------------------------------------------------ profile

def test_profile_cbrt2_values():
    prof = profile(ring_from_form(CBRT2))
    assert prof.disc == -108
    p1 = math.log(2) / 3 / math.log(108)
    assert abs(prof.p[0] - p1) < 1e-9
    assert abs(prof.p[1] - 2 * p1) < 1e-9
    # coarse figures: ~ (0.0493, 0.0987)
    assert abs(prof.p[0] - 0.04936) < 1e-4
    assert abs(prof.p[1] - 0.09872) < 1e-4
    assert prof.p[0] <= prof.p[1]


def test_profile_rejects_unit_and_zero_disc():
    with pytest.raises(UnitDiscriminant):
        profile(ring_from_form(SPLIT3))
    with pytest.raises(DegenerateDiscriminant):
        profile(ring_from_form(BinaryForm((1, 0, 0, 0))))


# ----------------------------------------------------------------- is_close

def test_is_close_exact_boundary_and_beyond():
    prof = MinimaProfile(disc=1000, lams=(1.0, 2.0, 3.0), vectors=(),
                         p=(0.0, 0.0))
    t = 3 / math.log(100)
    assert is_close(prof, (0.0, 0.0), 3, 100)
    assert is_close(prof, (t, 0.0), 3, 100)          # closed at the boundary
    assert not is_close(prof, (t * (1 + 1e-9), 0.0), 3, 100)
    assert is_close((0.1, 0.2), (0.1, 0.2), 0.001, 10)  # bare sequence form
    with pytest.raises(DimensionMismatch):
        is_close(prof, (0.0,), 3, 100)


def test_is_close_cbrt2_example():
    prof = profile(ring_from_form(CBRT2))
    # deviations ~ (0.117, 0.235), allowance 3/ln(108) ~ 0.64
    assert is_close(prof, (1 / 6, 1 / 3), 3, 108)
    assert not is_close(prof, (1 / 6, 1 / 3), 3, 10 ** 12)


# -------------------------------------------------------------- dual minima

def test_dual_minima_diagonal_cases():
    assert dual_minima(MinkLattice(gram=np.eye(3))) == (1.0, 1.0, 1.0)
    lams = dual_minima(MinkLattice(gram=np.diag([1.0, 4.0])))
    assert abs(lams[0] - 0.5) < 1e-12 and abs(lams[1] - 1.0) < 1e-12


def test_dual_minima_pairing_bracket():
    # lam_i * lam*_(n-1-i) within the generous bracket [1/64, 64]
    rng = random.Random(41)
    for _ in range(30):
        deg = rng.choice((3, 4, 5))
        lat = gram(_random_ring(rng, deg))
        lams = successive_minima(lat).lams
        duals = dual_minima(lat)
        n = len(lams)
        for i in range(n):
            prod = lams[i] * duals[n - 1 - i]
            assert 1 / 64 <= prod <= 64


# --------------------------------------------------- reduced basis (greedy)

def test_minkowski_reduced_basis_diagonal():
    basis = minkowski_reduced_basis(MinkLattice(gram=np.eye(3)))
    assert basis == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    basis = minkowski_reduced_basis(MinkLattice(gram=np.diag([1.0, 4.0, 9.0])))
    assert basis == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def test_minkowski_reduced_basis_ring_lattices():
    rng = random.Random(13)
    for _ in range(10):
        deg = rng.choice((3, 4, 5))
        lat = gram(_random_ring(rng, deg))
        n = lat.rank
        basis = minkowski_reduced_basis(lat)
        det = sympy.Matrix([list(b) for b in basis]).det()
        assert abs(det) == 1
        lams = successive_minima(lat).lams
        for k, b in enumerate(basis):
            nb = math.sqrt(_qval(lat.gram, b))
            assert nb >= lams[k] * (1 - 1e-9)
            if n <= 4:
                assert nb <= lams[k] * (1 + 1e-9)
            else:
                assert nb * nb <= 2 * lams[k] ** 2 * (1 + 1e-9)
        assert basis == minkowski_reduced_basis(lat)


# ------------------------------------------------------------- bound system

def test_check_bound_system_base_and_boundary():
    assert check_bound_system([2.5], [0.5], 2.5, 1.0) == (True, True)
    c, x = 3.0, 17.0
    p = [0.1, 0.4, -0.2]
    a = [c * x ** pi for pi in p]
    assert check_bound_system(a, p, c, x) == (True, True)
    with pytest.raises(DimensionMismatch):
        check_bound_system([1.0], [0.0, 1.0], 1.0, 2.0)


def test_check_bound_system_implication_random_search():
    # 1000 hypothesis-true random instances; conclusion must always hold
    rng = random.Random(97)
    accepted = 0
    tries = 0
    while accepted < 1000 and tries < 100_000:
        tries += 1
        n = rng.randint(1, 5)
        p = [rng.uniform(-1, 1) for _ in range(n)]
        c = rng.uniform(1, 5)
        x = rng.uniform(1.5, 50)
        if rng.random() < 0.5:
            a = [c * x ** pi * rng.uniform(0.05, 1.4) for pi in p]
        else:
            a = [10 ** rng.uniform(-2, 2) for _ in range(n)]
        hyp, con = check_bound_system(a, p, c, x)
        if hyp:
            accepted += 1
            assert con, (a, p, c, x)
    assert accepted == 1000


# -------------------------------------------------------------- cycle check

def test_has_cycle_forced_outdegree():
    # every vertex with an outgoing edge forces a cycle [DERIVED: 100 random]
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(1, 10)
        graph = {v: [rng.randrange(n) for _ in range(rng.randint(1, 3))]
                 for v in range(n)}
        assert has_cycle(graph)


def test_has_cycle_negative_and_self_loop():
    assert not has_cycle({0: [1], 1: [2], 2: []})
    assert not has_cycle({0: [1, 2], 1: [3], 2: [3], 3: []})
    assert has_cycle({0: [0]})
    assert has_cycle({0: [1], 1: [0]})


# -------------------------------------------------------------- constructor

def test_lattice_constructor_guards():
    with pytest.raises(DimensionMismatch):
        MinkLattice(gram=((1.0, 0.0),))
    with pytest.raises(ValueError):
        MinkLattice(gram=((1.0, 0.5), (0.4, 1.0)))
    with pytest.raises(ValueError):
        MinkLattice(gram=((1.0, 2.0), (2.0, 1.0)))  # not positive definite
