"""Pairs of integral ternary quadratic forms and rank-4 rings.

A pair (A, B) of integral ternary quadratic forms determines a binary
cubic form 4 det(Bx - Ay), a rank-3 ring C built from that cubic, and a
rank-4 ring R whose quadratic resolvent map, written in the bases of
R/Z and C/Z, has coordinate matrices exactly (A, B).  This module
computes the cubic, its discriminant, the rank-4 ring (derived
per instance from the resolvent identity and certified by exact gates),
the embedding of binary quartic forms into pairs, two special-family
shapes with their heights, coefficient boxes, and the numeric recovery
of the resolvent map from a candidate ring pair.

Coordinate convention: a pair is stored as twelve integers
(a11, a12, a13, a22, a23, a33; b11, ..., b33) where the Gram matrix of
A has diagonal a_ii and off-diagonal entries a_ij / 2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from . import minima
from .errors import (
    DegenerateDiscriminant,
    DimensionMismatch,
    PairingNotFound,
    PrecisionExhausted,
    ShapeViolation,
)
from .exact import form_discriminant, le_power, solve_linear
from .forms import BinaryForm
from .rings import Ring, ring_disc, ring_from_form, validate_ring

_IDX = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))


@dataclass(frozen=True)
class TernaryQuadPair:
    """Integral pair of ternary quadratic forms in coordinate order
    (a11, a12, a13, a22, a23, a33) and likewise for b."""

    a: tuple
    b: tuple

    def __post_init__(self):
        a = tuple(int(v) for v in self.a)
        b = tuple(int(v) for v in self.b)
        if len(a) != 6 or len(b) != 6:
            raise DimensionMismatch("a pair needs six coordinates per form")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def gram(self, which: str):
        """Gram matrix rows (Fractions); off-diagonal entries are halved."""
        c = self.a if which == "a" else self.b
        m = [[Fraction(0)] * 3 for _ in range(3)]
        for v, (i, j) in zip(c, _IDX):
            if i == j:
                m[i][i] = Fraction(v)
            else:
                m[i][j] = m[j][i] = Fraction(v, 2)
        return tuple(tuple(row) for row in m)

    def quad_value(self, which: str, c) -> Fraction:
        """Value of the quadratic form at integer or rational coordinates."""
        coeffs = self.a if which == "a" else self.b
        return sum(Fraction(v) * Fraction(c[i]) * Fraction(c[j])
                   for v, (i, j) in zip(coeffs, _IDX))

    def bilinear(self, which: str, c, d) -> Fraction:
        """Polarization: (F(c + d) - F(c) - F(d)) / 2."""
        cd = [Fraction(x) + Fraction(y) for x, y in zip(c, d)]
        return (self.quad_value(which, cd) - self.quad_value(which, c)
                - self.quad_value(which, d)) / 2


def parse_pair(text: str) -> TernaryQuadPair:
    """Parse the literal 'a11,a12,a13,a22,a23,a33;b11,...,b33'."""
    halves = text.split(";")
    if len(halves) != 2:
        raise ValueError("pair literal needs exactly one ';'")
    a = tuple(int(t) for t in halves[0].split(","))
    b = tuple(int(t) for t in halves[1].split(","))
    return TernaryQuadPair(a, b)


def pair_literal(pair: TernaryQuadPair) -> str:
    return ",".join(map(str, pair.a)) + ";" + ",".join(map(str, pair.b))


def pair_action(pair: TernaryQuadPair, g2, g3) -> TernaryQuadPair:
    """Action of (g2, g3): (A, B) -> (r A' + s B', t A' + u B') where
    X' = g3 X g3^T and g2 = ((r, s), (t, u)).  Exact; the result must be
    integral again (guaranteed for integer matrices)."""
    (r, s), (t, u) = g2
    ga = _gram_conj(pair.gram("a"), g3)
    gb = _gram_conj(pair.gram("b"), g3)
    new_a = [[r * ga[i][j] + s * gb[i][j] for j in range(3)] for i in range(3)]
    new_b = [[t * ga[i][j] + u * gb[i][j] for j in range(3)] for i in range(3)]
    return TernaryQuadPair(_coords_from_gram(new_a), _coords_from_gram(new_b))


def _gram_conj(g, m):
    out = [[Fraction(0)] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            out[i][j] = sum(Fraction(m[i][k]) * g[k][l] * Fraction(m[j][l])
                            for k in range(3) for l in range(3))
    return out


def _coords_from_gram(g):
    coords = []
    for i, j in _IDX:
        v = g[i][j] if i == j else 2 * g[i][j]
        if v.denominator != 1:
            raise ShapeViolation("transformed pair is not integral")
        coords.append(int(v))
    return tuple(coords)


def _resolvent_coeffs(pair: TernaryQuadPair) -> tuple:
    """Coefficients of 4 det(Bx - Ay), exactly (possibly all zero)."""
    ga, gb = pair.gram("a"), pair.gram("b")

    def val(x, y):
        m = [[4 * (gb[i][j] * x - ga[i][j] * y) for j in range(3)]
             for i in range(3)]
        # 3x3 determinant over Fractions; the factor 4 per row gives 64 det,
        # so divide by 16 to land on 4 det
        det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
               - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
               + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
        return det / 16

    nodes = ((1, 0), (0, 1), (1, 1), (2, 1))
    mat = [[Fraction(x ** (3 - k) * y ** k) for k in range(4)]
           for x, y in nodes]
    rhs = [val(x, y) for x, y in nodes]
    sol = solve_linear(mat, rhs)
    coeffs = []
    for v in sol:
        if v.denominator != 1:
            raise PrecisionExhausted("resolvent cubic came out non-integral")
        coeffs.append(int(v))
    return tuple(coeffs)


def resolvent_cubic(pair: TernaryQuadPair) -> BinaryForm:
    """The integral binary cubic 4 det(Bx - Ay), computed exactly.

    Raises DegenerateDiscriminant when the determinant vanishes
    identically (every member of the pencil is singular)."""
    coeffs = _resolvent_coeffs(pair)
    if all(c == 0 for c in coeffs):
        raise DegenerateDiscriminant("pencil determinant vanishes identically")
    return BinaryForm(coeffs)


def pair_disc(pair: TernaryQuadPair) -> int:
    """Discriminant of the resolvent cubic (zero marks a degenerate pair)."""
    coeffs = _resolvent_coeffs(pair)
    if all(c == 0 for c in coeffs):
        return 0
    return form_discriminant(coeffs)


def psi_binary_quartic(f) -> TernaryQuadPair:
    """Embed a binary quartic (f0, ..., f4) as a pair of ternary forms.

    A carries the quartic's coefficients (the a23 slot takes -f3, which
    keeps the resolvent cubic classical: its discriminant then equals
    the quartic's discriminant exactly), B is the fixed form with
    b22 = 1 and Gram entry 1/2 at (1,3).
    """
    c = f.coeffs if isinstance(f, BinaryForm) else tuple(f)
    if len(c) != 5:
        raise DimensionMismatch("binary quartic needs five coefficients")
    a = (c[0], c[1], 0, c[2], -c[3], c[4])
    b = (0, 0, 1, 1, 0, 0)
    return TernaryQuadPair(a, b)


# ------------------------------------------------------------------- boxes

def quartic_box_exponents(point):
    """Box exponents for the twelve pair coordinates at
    point = (p1, p2, p3, q1, q2): |a_ij| <= X^(pi+pj-q1) and
    |b_ij| <= X^(pi+pj-q2)."""
    p1, p2, p3, q1, q2 = (Fraction(v) for v in point)
    ps = (p1, p2, p3)
    ea = tuple(ps[i] + ps[j] - q1 for i, j in _IDX)
    eb = tuple(ps[i] + ps[j] - q2 for i, j in _IDX)
    return ea, eb


def pair_in_box(pair: TernaryQuadPair, point, x) -> bool:
    """Exact closed-box membership for integral pairs."""
    ea, eb = quartic_box_exponents(point)
    for v, e in zip(pair.a + pair.b, ea + eb):
        if not le_power(abs(v), x, e):
            return False
    return True


# ---------------------------------------------------------------- families

@dataclass(frozen=True)
class FamilyTriple:
    """Free entries of a special-family pair shape.

    kind 'xy_xy': free = (a13, a23, a33, b13, b23, b33); the fixed
    entries are a11 = 1, a12 = a22 = 0 and b11 = b12 = 0, b22 = 1.
    kind 'x_y_x2': free = (a13, a22, a23, a33, b22, b23, b33); fixed
    a11 = 1, a12 = 0 and b11 = 0, b12 = 1, b13 = 0.
    eps and nu record the orientation data carried by the
    parametrization; packing uses the eps = 1, nu = 0 convention.
    """

    kind: str
    free: tuple
    eps: int = 1
    nu: int = 0

    def __post_init__(self):
        want = {"xy_xy": 6, "x_y_x2": 7}.get(self.kind)
        if want is None:
            raise ShapeViolation(f"unknown family kind {self.kind!r}")
        free = tuple(int(v) for v in self.free)
        if len(free) != want:
            raise ShapeViolation(f"{self.kind} takes {want} free entries")
        if self.eps not in (1, -1):
            raise ShapeViolation("eps must be +1 or -1")
        if self.nu not in (0, 1):
            raise ShapeViolation("nu must be 0 or 1")
        object.__setattr__(self, "free", free)


def family_pack(triple: FamilyTriple) -> TernaryQuadPair:
    """Embed the family's free entries into a full integral pair."""
    f = triple.free
    if triple.kind == "xy_xy":
        a13, a23, a33, b13, b23, b33 = f
        return TernaryQuadPair((1, 0, a13, 0, a23, a33),
                               (0, 0, b13, 1, b23, b33))
    a13, a22, a23, a33, b22, b23, b33 = f
    return TernaryQuadPair((1, 0, a13, a22, a23, a33),
                           (0, 1, 0, b22, b23, b33))


def family_height(triple: FamilyTriple) -> int:
    """Height of a family member (max of squared off-corner entries and
    plain corner entries, following the shape's box-exponent ledger)."""
    f = triple.free
    if triple.kind == "xy_xy":
        a13, a23, a33, b13, b23, b33 = f
        return max(a13 ** 2, a23 ** 2, b13 ** 2, b23 ** 2,
                   abs(a33), abs(b33))
    a13, a22, a23, a33, b22, b23, b33 = f
    return max(a13 ** 2, abs(a22), abs(a23), abs(a33),
               b22 ** 2, b23 ** 2, b33 ** 2)


# ----------------------------------------------------- the rank-4 ring

def _small_shifts():
    yield 0
    k = 1
    while k < 60:
        yield k
        yield -k
        k += 1


def _cubic_roots_sorted(coeffs, dps):
    with mpmath.workdps(dps):
        rts = mpmath.polyroots([mpmath.mpf(c) for c in coeffs],
                               maxsteps=200, extraprec=80)
    rts = [complex(t) for t in rts]
    rts.sort(key=lambda z: (z.real, z.imag))
    return rts


def _line_split(m):
    """Two linear functionals whose product is the rank-2 symmetric form m."""
    _u, sv, vh = np.linalg.svd(m)
    if sv[2] > 1e-7 * sv[0]:
        raise PrecisionExhausted("pencil member is not numerically singular")
    if sv[1] <= 1e-9 * sv[0]:
        raise PrecisionExhausted("pencil member has rank below 2")
    n = vh[2].conj()
    drop = int(np.argmax(np.abs(n)))
    idx = [i for i in range(3) if i != drop]
    w = np.zeros((3, 3), dtype=complex)
    w[idx[0], 0] = 1.0
    w[idx[1], 1] = 1.0
    w[:, 2] = n
    winv = np.linalg.inv(w)
    p = w[:, 0] @ m @ w[:, 0]
    q = w[:, 0] @ m @ w[:, 1]
    r = w[:, 1] @ m @ w[:, 1]
    scale = max(abs(p), abs(q), abs(r))
    if abs(p) >= abs(r) and abs(p) > 1e-10 * scale:
        root = np.sqrt(q * q - p * r)
        l1 = winv[0] - ((-q + root) / p) * winv[1]
        l2 = winv[0] - ((-q - root) / p) * winv[1]
    elif abs(r) > 1e-10 * scale:
        root = np.sqrt(q * q - p * r)
        l1 = winv[1] - ((-q + root) / r) * winv[0]
        l2 = winv[1] - ((-q - root) / r) * winv[0]
    else:
        l1, l2 = winv[0], winv[1]

    def norm(l):
        return l / l[int(np.argmax(np.abs(l)))]

    l1, l2 = norm(l1), norm(l2)
    key = lambda l: (l[0].real, l[0].imag, l[1].real, l[1].imag)
    return (l1, l2) if key(l1) <= key(l2) else (l2, l1)


def _partition_of_third(lines, pts, tol):
    """Which 2+2 split of the four points the third member's lines cut."""
    l1, l2 = lines
    on1 = sorted(range(4), key=lambda m: abs(np.dot(l1, pts[m])))[:2]
    rest = [m for m in range(4) if m not in on1]
    worst = max(abs(np.dot(l1, pts[m])) for m in on1)
    worst = max(worst, max(abs(np.dot(l2, pts[m])) for m in rest))
    if worst > tol:
        raise PrecisionExhausted("third singular member does not split points")
    return (tuple(sorted(on1)), tuple(sorted(rest)))


def _quartic_table_numeric(pair, shift, dps):
    """Structure constants of the rank-4 ring, in floating point.

    Works in the sheared pencil (A, B + shift * A) whose cubic has a
    nonzero leading coefficient; the base points, the per-point
    idempotent calibration against the cubic ring's embeddings, and the
    resolvent identity determine the embedding values of the basis.
    """
    ga = np.array([[float(v) for v in row] for row in pair.gram("a")])
    gb0 = np.array([[float(v) for v in row] for row in pair.gram("b")])
    gb = gb0 + shift * ga
    g = resolvent_cubic(TernaryQuadPair(
        pair.a, tuple(x + shift * y for x, y in zip(pair.b, pair.a)))).coeffs
    if g[0] == 0:
        raise PrecisionExhausted("sheared cubic still lacks a cubic term")
    roots = _cubic_roots_sorted(g, dps)
    members = [gb * t - ga for t in roots]
    lines = [_line_split(m) for m in members]
    pts = []
    for i in range(2):
        for j in range(2):
            v = np.cross(lines[0][i], lines[1][j])
            nv = np.max(np.abs(v))
            if nv < 1e-12:
                raise PrecisionExhausted("line intersection degenerated")
            pts.append(v / v[int(np.argmax(np.abs(v)))])
    parts = [((0, 1), (2, 3)), ((0, 2), (1, 3))]
    scale = max(np.max(np.abs(ga)), np.max(np.abs(gb)), 1.0)
    parts.append(_partition_of_third(lines[2], pts, 1e-5 * scale))
    if set(parts[2][0]) in (set(parts[0][0]), set(parts[0][1]),
                            set(parts[1][0]), set(parts[1][1])):
        raise PrecisionExhausted("partitions of the base points collide")

    pmat = np.array(pts)                       # 4 x 3
    _u, sv, vh = np.linalg.svd(pmat.T)
    mu = vh[3].conj()
    if np.min(np.abs(mu)) < 1e-9 * np.max(np.abs(mu)):
        raise PrecisionExhausted("base points nearly degenerate")
    nu1 = -1.0 / mu
    m0 = int(np.argmax(np.abs(mu)))
    beta1 = np.zeros(4, dtype=complex)
    beta1[m0] = 1.0 / mu[m0]
    target = np.diag(nu1) + np.outer(beta1, np.ones(4))
    s1t, _res, rank, _sv = np.linalg.lstsq(pmat, target, rcond=None)
    if rank < 3:
        raise PrecisionExhausted("point matrix rank-deficient")
    if np.max(np.abs(pmat @ s1t - target)) > 1e-8 * np.max(np.abs(target)):
        raise PrecisionExhausted("embedding system inconsistent")
    s1 = s1t.T                                  # rows: embeddings, cols: basis

    def qgram(s, part):
        (a, b), (c, d) = part
        m = np.outer(s[a], s[b]) + np.outer(s[b], s[a]) \
            + np.outer(s[c], s[d]) + np.outer(s[d], s[c])
        return m / 2

    tau = [(-g[0] * t, -(g[0] * t * t + g[1] * t + g[2])) for t in roots]
    targets = [ga * tw1 + gb * tw2 for tw1, tw2 in tau]
    kappa2 = None
    for (ti, tj) in ((0, 1), (0, 2), (1, 2)):
        dg = qgram(s1, parts[ti]) - qgram(s1, parts[tj])
        dt = targets[ti] - targets[tj]
        imax = np.unravel_index(np.argmax(np.abs(dg)), dg.shape)
        if abs(dg[imax]) < 1e-12:
            continue
        k2 = dt[imax] / dg[imax]
        if kappa2 is None:
            kappa2 = k2
        err = np.max(np.abs(dt - kappa2 * dg))
        if err > 1e-6 * max(1.0, np.max(np.abs(dt))):
            raise PrecisionExhausted("resolvent identity calibration failed")
    if kappa2 is None or abs(kappa2) < 1e-12:
        raise PrecisionExhausted("degenerate resolvent calibration")
    s = np.sqrt(kappa2) * s1

    def coefs(s):
        v = np.hstack([np.ones((4, 1), dtype=complex), s])
        out = {}
        for i in range(1, 4):
            for j in range(i, 4):
                w = s[:, i - 1] * s[:, j - 1]
                out[(i, j)] = np.linalg.solve(v, w)
        return out

    # fractional translations: align one linear coefficient per column
    c = coefs(s)
    t = np.zeros(3, dtype=complex)
    t[0] = round(c[(1, 2)][2].real) - c[(1, 2)][2]
    t[1] = round(c[(1, 2)][1].real) - c[(1, 2)][1]
    t[2] = round(c[(1, 3)][1].real) - c[(1, 3)][1]
    s = s + t[None, :]
    # integer translations: traces into {0, 1, 2, 3}
    for i in range(3):
        tr = np.sum(s[:, i])
        if abs(tr.imag) > 1e-5:
            raise PrecisionExhausted("trace came out non-real")
        k = round(tr.real)
        if abs(tr.real - k) > 1e-5:
            raise PrecisionExhausted("trace came out non-integral")
        s[:, i] += -(k // 4)
    return coefs(s)


def quartic_ring(pair: TernaryQuadPair, dps: int = 40):
    """The rank-4 ring and rank-3 ring attached to an integral pair.

    The rank-3 ring is built from the cubic 4 det(Bx - Ay) by the
    classical closed-form table.  The rank-4 table is derived per
    instance from the resolvent identity (numerically) and then gated
    exactly: the rounded table must validate as a commutative
    associative ring and its trace-form discriminant must equal the
    pair discriminant.  Raises PrecisionExhausted when certification
    fails, DegenerateDiscriminant when the pair discriminant is zero.
    The basis is translation-normalized so each non-unit basis vector
    has trace in {0, 1, 2, 3}.
    """
    g = resolvent_cubic(pair)
    d = form_discriminant(g.coeffs)
    if d == 0:
        raise DegenerateDiscriminant("pair discriminant is zero")
    cring = ring_from_form(g)
    shift = None
    for k in _small_shifts():
        ga, gb = pair.gram("a"), pair.gram("b")
        lead = _det3([[4 * (gb[i][j] + k * ga[i][j]) for j in range(3)]
                      for i in range(3)])
        if lead != 0:
            shift = k
            break
    if shift is None:
        raise DegenerateDiscriminant("pencil has identically singular slices")
    last = None
    for work in (dps, 2 * dps):
        try:
            c = _quartic_table_numeric(pair, shift, work)
        except PrecisionExhausted as e:
            last = e
            continue
        table = _round_table(c)
        if table is None:
            last = PrecisionExhausted("structure constants failed to round")
            continue
        ring = Ring(table)
        try:
            validate_ring(ring)
        except Exception as e:
            last = PrecisionExhausted(f"rounded table invalid: {e}")
            continue
        if ring_disc(ring) != d:
            last = PrecisionExhausted("trace discriminant mismatch")
            continue
        return ring, cring
    raise last if last is not None else PrecisionExhausted("construction failed")


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _round_table(c, tol=1e-6):
    rows = [[None] * 4 for _ in range(4)]
    unit = lambda j: tuple(1 if k == j else 0 for k in range(4))
    for j in range(4):
        rows[0][j] = unit(j)
        rows[j][0] = unit(j)
    for i in range(1, 4):
        for j in range(i, 4):
            vec = c[(i, j)]
            cell = []
            for z in vec:
                k = round(z.real)
                if abs(z - k) > tol * max(1.0, abs(z)):
                    return None
                cell.append(int(k))
            rows[i][j] = tuple(cell)
            rows[j][i] = tuple(cell)
    return tuple(tuple(r) for r in rows)


# ----------------------------------------------- numeric resolvent recovery

_PARTITIONS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


@dataclass(frozen=True)
class ResolventMap:
    """Recovered resolvent-map data: the integral pair, the unit-direction
    coordinates gamma (halves allowed), the partition-to-embedding
    assignment, and the worst rounding residual."""

    pair: TernaryQuadPair
    gamma: tuple
    pairing: tuple
    residual: float


def resolvent_map_candidates(r4: Ring, c3: Ring, dps: int = 40,
                             tol: float = 1e-6):
    """All embedding pairings under which the recovered resolvent-map
    coordinates are integral (halves on the unit direction).

    A pairing assigns each of the three 2+2 splits of the rank-4 ring's
    embeddings to one embedding of the rank-3 ring.  Rings with extra
    symmetry can admit several valid pairings whose recovered pairs
    differ by a signed basis change; all of them are returned, sorted
    by residual.
    """
    if r4.rank != 4 or c3.rank != 3:
        raise DimensionMismatch("expected ranks 4 and 3")
    er = minima.embeddings(r4, dps=dps)
    ec = minima.embeddings(c3, dps=dps)
    tmat = np.array([[1.0 + 0j, ec[t, 1], ec[t, 2]] for t in range(3)])
    found = []
    for perm in itertools.permutations(range(3)):
        ok = True
        resid = 0.0
        acoef, bcoef, gcoef = {}, {}, {}
        for i in range(1, 4):
            for j in range(i, 4):
                vals = np.zeros(3, dtype=complex)
                for spl, part in enumerate(_PARTITIONS):
                    (p, q), (r, sdx) = part
                    f = (er[p, i] * er[q, j] + er[q, i] * er[p, j]
                         + er[r, i] * er[sdx, j] + er[sdx, i] * er[r, j]) / 2
                    vals[perm[spl]] = f
                sol = np.linalg.solve(tmat, vals)
                mult = 1 if i == j else 2
                for store, z, den in ((acoef, sol[1] * mult, 1),
                                      (bcoef, sol[2] * mult, 1),
                                      (gcoef, sol[0] * mult, 2)):
                    zz = z * den
                    k = round(zz.real)
                    err = abs(zz - k)
                    resid = max(resid, err / den)
                    if err > tol * max(1.0, abs(zz)):
                        ok = False
                        break
                    store[(i, j)] = Fraction(k, den)
                if not ok:
                    break
            if not ok:
                break
        if ok:
            a = tuple(int(acoef[(i + 1, j + 1)]) for i, j in _IDX)
            b = tuple(int(bcoef[(i + 1, j + 1)]) for i, j in _IDX)
            gam = tuple(gcoef[(i + 1, j + 1)] for i, j in _IDX)
            found.append(ResolventMap(pair=TernaryQuadPair(a, b), gamma=gam,
                                      pairing=perm, residual=resid))
    found.sort(key=lambda m: (m.residual, m.pairing))
    return tuple(found)


def resolvent_map_numeric(r4: Ring, c3: Ring, dps: int = 40,
                          tol: float = 1e-6) -> ResolventMap:
    """Best resolvent-map certificate for the ring pair (lowest residual).

    Raises PairingNotFound when no embedding pairing gives integral
    coordinates, which signals that the rank-3 ring is not a resolvent
    of the rank-4 one.
    """
    found = resolvent_map_candidates(r4, c3, dps=dps, tol=tol)
    if not found:
        raise PairingNotFound("no embedding pairing gives integral coordinates")
    return found[0]


# ------------------------------------------------------- index identities

def index_span(ring: Ring, elements) -> int:
    """|det| of the coordinate matrix of rank-many ring elements."""
    n = ring.rank
    if len(elements) != n or any(len(e) != n for e in elements):
        raise DimensionMismatch("need rank-many full coordinate vectors")
    from .exact import bareiss_det
    return abs(bareiss_det([list(e) for e in elements]))


def index_identity_xyxy(pair: TernaryQuadPair, ring: Ring, x, y) -> bool:
    """Ind(1, x, y, xy) equals |A(x)B(y) - A(y)B(x)| for the pair that
    represents the ring's resolvent map (coordinates of x, y include
    the unit component; the quadratic forms see only the rest)."""
    xy = ring.multiply(x, y)
    lhs = index_span(ring, [(1, 0, 0, 0), x, y, xy])
    ax, bx = pair.quad_value("a", x[1:]), pair.quad_value("b", x[1:])
    ay, by = pair.quad_value("a", y[1:]), pair.quad_value("b", y[1:])
    rhs = abs(ax * by - ay * bx)
    return Fraction(lhs) == rhs


def index_identity_x2(pair: TernaryQuadPair, ring: Ring, x, y) -> bool:
    """Ind(1, x, y, x^2) equals the pair determinant with the second row
    polarized: |A(x)(B(x+y)-B(x)-B(y)) - B(x)(A(x+y)-A(x)-A(y))|."""
    x2 = ring.multiply(x, x)
    lhs = index_span(ring, [(1, 0, 0, 0), x, y, x2])
    ax, bx = pair.quad_value("a", x[1:]), pair.quad_value("b", x[1:])
    axy = 2 * pair.bilinear("a", x[1:], y[1:])
    bxy = 2 * pair.bilinear("b", x[1:], y[1:])
    rhs = abs(ax * bxy - bx * axy)
    return Fraction(lhs) == rhs
