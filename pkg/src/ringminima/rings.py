"""Finite-rank commutative rings as integer structure-constant tables.

A ring of rank n is stored as the full table c[i][j][k] with
e_i * e_j = sum_k c[i][j][k] e_k over the basis e_0, ..., e_{n-1}, where
e_0 = 1 always.  Constructors from binary forms produce:

  degree 3: the classical basis (1, w, t) with
      w*t = -a*d, w^2 = -a*c + b*w - a*t, t^2 = -b*d + d*w - c*t,
  degree >= 4 (and optionally 3): the basis (1, z_1, ..., z_{n-1}) with
      z_i = f0 t^i + f1 t^(i-1) + ... + f_(i-1) t  for a root t of f, and
      z_i z_j = - sum_{max(i+j-n,1) <= k <= i} f_{i+j-k} z_k
                + sum_{j < k <= min(i+j,n)}     f_{i+j-k} z_k   (i <= j),
      reading z_n as the constant -f_n.

Both tables are polynomial in the coefficients, so they remain valid rings
for degenerate (zero-lead or zero-discriminant) forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import sympy

from . import exact
from .errors import (DimensionMismatch, FactorizationTimeout, InvalidTable,
                     NonAssociativeTable, NonCommutativeTable,
                     UnsupportedDegree, ZeroDiscriminant)
from .forms import BinaryForm


@dataclass(frozen=True)
class Ring:
    """Rank-n commutative unital ring over Z with a distinguished basis."""

    table: tuple

    def __post_init__(self):
        try:
            tbl = tuple(tuple(tuple(int(c) for c in cell) for cell in row)
                        for row in self.table)
        except TypeError as e:
            raise DimensionMismatch("table must be n x n cells") from e
        object.__setattr__(self, "table", tbl)
        n = len(tbl)
        if any(len(row) != n for row in tbl) or \
           any(len(cell) != n for row in tbl for cell in row):
            raise DimensionMismatch("table must be n x n cells of n constants")

    @property
    def rank(self) -> int:
        return len(self.table)

    def multiply(self, u, v) -> tuple:
        """Coordinates of (sum u_i e_i) * (sum v_j e_j)."""
        n = self.rank
        if len(u) != n or len(v) != n:
            raise DimensionMismatch("coordinate length must equal rank")
        out = [0] * n
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            for j, vj in enumerate(v):
                if vj == 0:
                    continue
                cij = self.table[i][j]
                f = ui * vj
                for k in range(n):
                    if cij[k]:
                        out[k] += f * cij[k]
        return tuple(out)

    def mult_matrix(self, u) -> list:
        """Matrix of multiplication by u, acting on coordinate columns."""
        n = self.rank
        cols = [self.multiply(u, tuple(1 if j == i else 0 for j in range(n)))
                for i in range(n)]
        return [[cols[j][k] for j in range(n)] for k in range(n)]

    def power(self, u, m: int) -> tuple:
        n = self.rank
        acc = tuple(1 if i == 0 else 0 for i in range(n))
        for _ in range(m):
            acc = self.multiply(acc, u)
        return acc


def validate_ring(ring: Ring) -> None:
    """Commutativity, associativity, and e_0 = 1; raises otherwise."""
    n = ring.rank
    basis = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    for j in range(n):
        if ring.table[0][j] != basis[j] or ring.table[j][0] != basis[j]:
            raise InvalidTable("e_0 must act as the identity")
    for i in range(n):
        for j in range(i + 1, n):
            if ring.table[i][j] != ring.table[j][i]:
                raise NonCommutativeTable(f"e_{i} e_{j} != e_{j} e_{i}")
    for i in range(1, n):
        for j in range(1, n):
            for k in range(1, n):
                left = ring.multiply(ring.table[i][j], basis[k])
                right = ring.multiply(basis[i], ring.table[j][k])
                if left != right:
                    raise NonAssociativeTable(
                        f"(e_{i} e_{j}) e_{k} != e_{i} (e_{j} e_{k})")


def trace_form(ring: Ring) -> list:
    """Gram matrix T[i][j] = Tr(mult by e_i e_j)."""
    n = ring.rank
    mats = [ring.mult_matrix(tuple(1 if j == i else 0 for j in range(n)))
            for i in range(n)]
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            t = sum(sum(mats[i][r][s] * mats[j][s][r] for s in range(n))
                    for r in range(n))
            out[i][j] = out[j][i] = t
    return out


def ring_disc(ring: Ring) -> int:
    """Discriminant: determinant of the trace form."""
    return exact.bareiss_det(trace_form(ring))


# ------------------------------------------------------------ constructors


def _cubic_table(a: int, b: int, c: int, d: int) -> tuple:
    e0 = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    w2 = (-a * c, b, -a)
    wt = (-a * d, 0, 0)
    t2 = (-b * d, d, -c)
    return (e0,
            ((0, 1, 0), w2, wt),
            ((0, 0, 1), wt, t2))


def _zeta_table(coeffs) -> tuple:
    n = len(coeffs) - 1
    f = list(coeffs)

    def cell(i: int, j: int) -> tuple:
        if i == 0:
            return tuple(1 if k == j else 0 for k in range(n))
        if j == 0:
            return tuple(1 if k == i else 0 for k in range(n))
        if i > j:
            i2, j2 = j, i
        else:
            i2, j2 = i, j
        out = [0] * n
        for k in range(max(i2 + j2 - n, 1), i2 + 1):
            out[k] -= f[i2 + j2 - k]
        for k in range(j2 + 1, min(i2 + j2, n) + 1):
            if k == n:
                out[0] += f[i2 + j2 - k] * (-f[n])
            else:
                out[k] += f[i2 + j2 - k]
        return tuple(out)

    return tuple(tuple(cell(i, j) for j in range(n)) for i in range(n))


def ring_from_form(form: BinaryForm) -> Ring:
    """The rank-n ring attached to a degree-n binary form (n >= 2).

    Degree 3 uses the classical cubic basis; higher degrees use the
    z-basis table.  Constructed tables always validate and satisfy
    ring_disc == form.disc().
    """
    n = form.degree
    if n < 2:
        raise UnsupportedDegree("ring construction needs degree >= 2")
    if n == 3:
        return Ring(_cubic_table(*form.coeffs))
    return Ring(_zeta_table(form.coeffs))


def zeta_ring(form: BinaryForm) -> Ring:
    """The z-basis table at any degree >= 2 (degree 3 included)."""
    if form.degree < 2:
        raise UnsupportedDegree("ring construction needs degree >= 2")
    return Ring(_zeta_table(form.coeffs))


def power_basis_ring(coeffs) -> Ring:
    """Z[x]/(f) in the power basis for a monic integer polynomial f."""
    f = [int(c) for c in coeffs]
    if not f or f[0] != 1:
        raise InvalidTable("power basis needs a monic polynomial")
    n = len(f) - 1
    if n < 2:
        raise UnsupportedDegree("rank >= 2 required")
    # theta^m coordinates in basis (1, theta, ..., theta^(n-1))
    powers = []
    cur = [0] * n
    cur[0] = 1
    powers.append(tuple(cur))
    for _ in range(2 * n):
        nxt = [0] * (n + 1)
        for i, v in enumerate(cur):
            nxt[i + 1] += v
        if nxt[n]:
            lead = nxt[n]
            for i in range(n):
                nxt[i] -= lead * f[n - i]
        cur = nxt[:n]
        powers.append(tuple(cur))

    def cell(i, j):
        return powers[i + j]

    return Ring(tuple(tuple(cell(i, j) for j in range(n)) for i in range(n)))


def change_basis(ring: Ring, u_rows) -> Ring:
    """Rewrite the table in the basis e'_i = sum_j U[i][j] e_j.

    U must be integer, unimodular, with first row (1, 0, ..., 0).
    """
    n = ring.rank
    U = [list(map(int, row)) for row in u_rows]
    if len(U) != n or any(len(r) != n for r in U):
        raise DimensionMismatch("U must be n x n")
    if U[0] != [1] + [0] * (n - 1):
        raise InvalidTable("first basis vector must stay equal to 1")
    det = exact.bareiss_det(U)
    if det not in (1, -1):
        raise InvalidTable("U must be unimodular")
    uinv = exact.mat_inverse(U)
    new = []
    for i in range(n):
        row = []
        for j in range(n):
            prod = ring.multiply(U[i], U[j])
            # old coords -> new coords: w = v * U^{-1} (rows of U are the
            # new basis vectors written in old coordinates)
            w = [sum(Fraction(prod[m]) * uinv[m][k] for m in range(n))
                 for k in range(n)]
            if any(x.denominator != 1 for x in w):
                raise InvalidTable("basis change left the lattice")
            row.append(tuple(int(x) for x in w))
        new.append(tuple(row))
    return Ring(tuple(new))


def cubic_form_from_ring(ring: Ring) -> BinaryForm:
    """The binary cubic of a rank-3 table; exact inverse of ring_from_form.

    Accepts any valid rank-3 table: the basis is first translated so the
    product of the two non-unit basis vectors is a pure integer, then the
    coefficients are read off the normalized table.
    """
    if ring.rank != 3:
        raise UnsupportedDegree("cubic recovery needs rank 3")
    validate_ring(ring)
    # w*t = m + u*w + v*t: replace w -> w - v, t -> t - u
    _, u, v = ring.table[1][2]
    if u != 0 or v != 0:
        U = [[1, 0, 0], [-v, 1, 0], [-u, 0, 1]]
        ring = change_basis(ring, U)
    _, b, na = ring.table[1][1]
    _, d, nc = ring.table[2][2]
    a, c = -na, -nc
    expect = Ring(_cubic_table(a, b, c, d))
    if expect.table != ring.table:
        raise InvalidTable("table is not cubic-normal")
    return BinaryForm((a, b, c, d))


# ------------------------------------------------------------- index form


_INDEX_SIGN = {3: -1, 4: 1, 5: 1}


def index_value(ring: Ring, coords) -> int:
    """Index form evaluated at integer coordinates (x_1, ..., x_{n-1}).

    Value: +-det of the rows (1, alpha, alpha^2, ..., alpha^{n-1}) in the
    ring basis for alpha = sum x_i e_i, signed per rank so that
    index forms of rings of forms obey the classical substitution identity
    with a plus sign.
    """
    n = ring.rank
    if len(coords) != n - 1:
        raise DimensionMismatch("index form takes n-1 coordinates")
    alpha = (0,) + tuple(int(c) for c in coords)
    rows = []
    cur = tuple(1 if i == 0 else 0 for i in range(n))
    for _ in range(n):
        rows.append(list(cur))
        cur = ring.multiply(cur, alpha)
    sign = _INDEX_SIGN.get(n, 1)
    return sign * exact.bareiss_det(rows)


def index_form_cubic(ring: Ring) -> BinaryForm:
    """The index form of a rank-3 ring as a binary cubic."""
    if ring.rank != 3:
        raise UnsupportedDegree("binary index form needs rank 3")
    # a cubic P(x, y) is pinned by values at 4 points
    pts = [(1, 0), (0, 1), (1, 1), (2, 1)]
    vals = [index_value(ring, p) for p in pts]
    # P = a x^3 + b x^2 y + c x y^2 + d y^3
    m = [[x ** 3, x * x * y, x * y * y, y ** 3] for x, y in pts]
    sol = exact.solve_linear(m, vals)
    if sol is None or any(s.denominator != 1 for s in sol):
        raise InvalidTable("index values are not a cubic form")
    return BinaryForm(tuple(int(s) for s in sol))


def index_identity_check(form: BinaryForm) -> bool:
    """Exact check of the substitution identity for the ring of the form:

        I(x^(n-2), x^(n-3) y, ..., y^(n-2)) = f(x, y)^C(n-1, 2).

    Both sides are homogeneous of the same degree D, so equality at D+1
    points (k, 1) plus one point at infinity decides it exactly.
    """
    n = form.degree
    ring = ring_from_form(form)
    D = (n - 2) * math.comb(n, 2)
    e = math.comb(n - 1, 2)
    for k in range(D + 2):
        x, y = (k, 1) if k <= D else (1, 0)
        coords = tuple(x ** (n - 2 - i) * y ** i for i in range(n - 1))
        if index_value(ring, coords) != form(x, y) ** e:
            return False
    return True


# ------------------------------------------------------------- maximality


def _lines_mod(ell: int, dim: int):
    """Primitive representatives of the lines of F_ell^dim."""
    # first nonzero coordinate normalized to 1
    for lead in range(dim):
        base = [0] * lead + [1]
        tail = dim - lead - 1
        idx = [0] * tail
        while True:
            yield tuple(base + idx)
            for t in range(tail - 1, -1, -1):
                idx[t] += 1
                if idx[t] < ell:
                    break
                idx[t] = 0
            else:
                break


def _line_gives_overring(ring: Ring, w, ell: int) -> bool:
    """Does R + Z*(w/ell) close under multiplication?

    Needed: w e_i in ell R + Z w for every i, and w^2 in ell^2 R + ell Z w.
    """
    n = ring.rank
    piv = next(i for i in range(n) if w[i] % ell != 0)
    winv = pow(w[piv], -1, ell)
    for i in range(1, n):
        basis = tuple(1 if j == i else 0 for j in range(n))
        prod = ring.multiply(w, basis)
        t = prod[piv] * winv % ell
        if any((prod[j] - t * w[j]) % ell for j in range(n)):
            return False
    sq = ring.multiply(w, w)
    ell2 = ell * ell
    winv2 = pow(w[piv], -1, ell2)
    t = sq[piv] * winv2 % ell2
    if t % ell:
        return False
    return not any((sq[j] - t * w[j]) % ell2 for j in range(n))


def _nullspace_mod(m, ell: int):
    """Kernel basis of an integer matrix over F_ell (row lists)."""
    a = [[x % ell for x in row] for row in m]
    cols = len(a[0])
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, ell)
        a[r] = [v * inv % ell for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(v - f * u) % ell for v, u in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    out = []
    for fc in free:
        vec = [0] * cols
        vec[fc] = 1
        for rr, pc in enumerate(pivots):
            vec[pc] = (-a[rr][fc]) % ell
        out.append(vec)
    return out


def _charpoly_coeffs(m) -> list:
    """Integer characteristic polynomial coefficients, descending."""
    lam = sympy.symbols("lam")
    p = sympy.Matrix(m).charpoly(lam)
    return [int(c) for c in p.all_coeffs()]


def _eigenlines(ring: Ring, ell: int):
    """Candidate lines: joint eigenlines mod ell of the basis mult matrices.

    Any direction spanning an index-ell overring is a simultaneous
    eigenvector mod ell of multiplication by every basis element, so this
    candidate set is complete; each candidate is still verified by the full
    closure test afterwards.
    """
    n = ring.rank
    mats = [ring.mult_matrix(tuple(1 if j == i else 0 for j in range(n)))
            for i in range(1, n)]
    first = mats[0]
    cp = _charpoly_coeffs(first)
    eigs = [t for t in range(ell)
            if exact.poly_eval([c % ell for c in cp], t) % ell == 0]

    def in_ambient(space_rows, coords):
        return [sum(c * row[k] for c, row in zip(coords, space_rows)) % ell
                for k in range(n)]

    lines = []
    seen = set()

    def emit(v):
        if not any(x % ell for x in v):
            return
        piv = next(i for i in range(len(v)) if v[i] % ell)
        inv = pow(v[piv], -1, ell)
        norm = tuple(x * inv % ell for x in v)
        if norm not in seen:
            seen.add(norm)
            lines.append(norm)

    def expand(space_rows, depth):
        """Enumerate joint-eigen candidates inside span(space_rows)."""
        d = len(space_rows)
        if d == 0:
            return
        count = (ell ** d - 1) // (ell - 1)
        if d == 1:
            emit(space_rows[0])
            return
        if count <= _ENUM_LINE_LIMIT or depth >= len(mats):
            for coords in _lines_mod(ell, d):
                emit(in_ambient(space_rows, coords))
            return
        mat = mats[depth]
        # restrict (mat - t) to the subspace for every scalar t
        for t in range(ell):
            shifted = [[(mat[r][c] - (t if r == c else 0)) % ell
                        for c in range(n)] for r in range(n)]
            m2 = [[sum(shifted[r][k] * space_rows[j][k] for k in range(n))
                   % ell for j in range(d)] for r in range(n)]
            sol = _nullspace_mod(m2, ell)
            sub = [in_ambient(space_rows, s) for s in sol]
            expand(sub, depth + 1)

    for t in eigs:
        shifted = [[(first[r][c] - (t if r == c else 0)) % ell
                    for c in range(n)] for r in range(n)]
        expand(_nullspace_mod(shifted, ell), 1)
    return lines


_ENUM_LINE_LIMIT = 20000


def is_maximal_at(ring: Ring, ell: int) -> bool:
    """Is the ring maximal at the prime ell (no index-ell overring)?

    Small line counts are settled by enumerating every line of R/ell R and
    testing ring closure of R + Z*(w/ell) directly; larger primes use the
    equivalent joint-eigenline criterion to cut the candidate set first.
    The closure test itself rejects the unit line, so no filtering is
    needed.
    """
    n = ring.rank
    d = ring_disc(ring)
    if d == 0:
        raise ZeroDiscriminant("maximality is about nonzero discriminants")
    if d % (ell * ell):
        return True
    count = (ell ** n - 1) // (ell - 1)
    if count <= _ENUM_LINE_LIMIT:
        cands = _lines_mod(ell, n)
    else:
        cands = _eigenlines(ring, ell)
    for w in cands:
        if _line_gives_overring(ring, w, ell):
            return False
    return True


def is_maximal(ring: Ring, factor_digits: int = 30) -> bool:
    """Maximality at every prime; factors the discriminant first."""
    d = ring_disc(ring)
    if d == 0:
        raise ZeroDiscriminant("maximality is about nonzero discriminants")
    if abs(d) > 10 ** factor_digits:
        raise FactorizationTimeout(
            f"|disc| exceeds the {factor_digits}-digit factoring budget")
    for p, e in sympy.factorint(abs(d)).items():
        if e >= 2 and not is_maximal_at(ring, int(p)):
            return False
    return True


# ----------------------------------------------------------- serialization


def ring_to_dict(ring: Ring) -> dict:
    return {"rank": ring.rank,
            "table": [[list(cell) for cell in row] for row in ring.table]}


def ring_from_dict(data: dict) -> Ring:
    if set(data) - {"rank", "table"}:
        raise InvalidTable("unknown keys in ring serialization")
    ring = Ring(tuple(tuple(tuple(c) for c in row) for row in data["table"]))
    if ring.rank != int(data["rank"]):
        raise DimensionMismatch("rank field disagrees with table shape")
    return ring
