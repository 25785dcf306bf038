"""Coefficient boxes, exact lattice-point counts, polytopes, and densities.

Box bounds, polytope membership, and density values are all computed in
exact rational arithmetic: a coordinate bound floor(X**e) is obtained by
integer root extraction on the exact binary value of X, never by floating
comparison, so boundary lattice points are classified correctly.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from . import forms, quartic, quintic
from .errors import (
    DimensionMismatch,
    InvalidPoint,
    InvalidTable,
    ResourceBudgetExceeded,
    UnknownFunction,
    UnknownPolytope,
    UnsupportedDegree,
)

PER_COORD_LIMIT = 10 ** 7
TOTAL_COUNT_LIMIT = 10 ** 9

_HALF = Fraction(1, 2)


# ----------------------------------------------------------- exact floors


def _int_nth_root(n: int, b: int) -> int:
    """floor(n ** (1/b)) for integers n >= 0, b >= 1."""
    if n < 0:
        raise ValueError("root of a negative integer")
    if n < 2 or b == 1:
        return n
    try:
        m = int(n ** (1.0 / b))
    except OverflowError:
        m = 1 << (n.bit_length() // b + 1)
    while m > 0 and m ** b > n:
        m -= 1
    while (m + 1) ** b <= n:
        m += 1
    return m


def floor_power(x, exponent) -> int:
    """Exact floor(x ** exponent) for real x > 1 and rational exponent.

    x enters at its exact binary value (floats convert losslessly to
    Fraction), so cases like 16 ** (1/4) = 2 land on the boundary exactly.
    """
    xf = Fraction(x)
    if xf <= 1:
        raise InvalidPoint("box scale must exceed 1")
    e = Fraction(exponent)
    if e == 0:
        return 1
    if e < 0:
        return 0
    power = xf ** e.numerator
    b = e.denominator
    m = _int_nth_root(power.numerator // power.denominator, b)
    while (m + 1) ** b * power.denominator <= power.numerator:
        m += 1
    while m > 0 and m ** b * power.denominator > power.numerator:
        m -= 1
    return m


# ------------------------------------------------------------------ boxes


@dataclass(frozen=True)
class BoxSpec:
    """A symmetric coefficient box: coordinate i runs over the integers
    with |c_i| <= x ** exponents[i]."""

    kind: str
    point: tuple
    exponents: tuple
    x: object

    def bounds(self) -> tuple:
        return tuple(floor_power(self.x, e) for e in self.exponents)

    def volume(self) -> float:
        xf = float(self.x)
        v = 1.0
        for e in self.exponents:
            v *= 2.0 * xf ** float(e)
        return v


_BINARY_KIND = re.compile(r"binary_nic\((\d+)\)\Z")


def _cubic_point_valid(pt) -> bool:
    return len(pt) == 2 and 0 <= pt[0] <= pt[1] and pt[0] + pt[1] == _HALF


def quartic_point_valid(pt) -> bool:
    """Ordered nonnegative (p1,p2,p3,q1,q2) with sums 1/2 and 1/2."""
    if len(pt) != 5:
        return False
    p = [Fraction(v) for v in pt[:3]]
    q = [Fraction(v) for v in pt[3:]]
    if sum(p) != _HALF or sum(q) != _HALF:
        return False
    return 0 <= p[0] <= p[1] <= p[2] and 0 <= q[0] <= q[1]


def make_box(kind: str, point, x) -> BoxSpec:
    """Coefficient box for a profile point, one bound X^e per coordinate.

    kind is one of cubic, quartic, quintic, or binary_nic(n) with n in
    3..5; point is the profile point (or the segment parameter r for the
    binary kinds) and must satisfy the kind's sum and ordering
    constraints.
    """
    if Fraction(x) <= 1:
        raise InvalidPoint("box scale must exceed 1")
    pt = tuple(Fraction(v) for v in point)
    m = _BINARY_KIND.match(kind)
    if m:
        n = int(m.group(1))
        if not 3 <= n <= 5:
            raise UnsupportedDegree("binary_nic boxes cover degrees 3..5")
        k = Fraction(1, n * (n - 1))
        if len(pt) != 2 or pt[0] < 0 or pt[0] > pt[1] or pt[0] + pt[1] != k:
            raise InvalidPoint("r must lie on the binary segment")
        return BoxSpec(kind, pt, tuple(forms.nic_box_exponents(n, pt)), x)
    if kind == "cubic":
        if not _cubic_point_valid(pt):
            raise InvalidPoint("cubic point must be ordered with sum 1/2")
        return BoxSpec(kind, pt, tuple(forms.cubic_box_exponents(pt)), x)
    if kind == "quartic":
        if not quartic_point_valid(pt):
            raise InvalidPoint("quartic point must satisfy the base constraints")
        ea, eb = quartic.quartic_box_exponents(pt)
        return BoxSpec(kind, pt, ea + eb, x)
    if kind == "quintic":
        if not quintic.quintic_point_valid(pt):
            raise InvalidPoint("quintic point must satisfy the base constraints")
        exps = tuple(quintic.tensor_box_exponent(pt, k, i, j)
                     for k in range(1, 5) for i, j in quintic._SLOTS)
        return BoxSpec(kind, pt, exps, x)
    raise InvalidPoint(f"unknown box kind {kind!r}")


def segment_L(n: int, r) -> tuple:
    """Image of a binary segment parameter under the profile map L.

    The segment runs from (0,k) to (k/2,k/2) with k = 1/(n(n-1)); its
    image point has coordinates L(r)_i = (n-i) r1 + i r2 for i = 1..n-1,
    sending (0,k) to (k,2k,...,(n-1)k) and the midpoint to the constant
    vector 1/(2(n-1)).
    """
    if not 3 <= n <= 5:
        raise UnsupportedDegree("segment profiles cover degrees 3..5")
    if len(r) != 2:
        raise InvalidPoint("r must be a 2-vector")
    r1, r2 = Fraction(r[0]), Fraction(r[1])
    k = Fraction(1, n * (n - 1))
    if r1 < 0 or r1 > r2 or r1 + r2 != k:
        raise InvalidPoint("r must lie on the binary segment")
    return tuple((n - i) * r1 + i * r2 for i in range(1, n))


# --------------------------------------------------------- point counting


def count_points(box: BoxSpec, predicate: Optional[Callable] = None,
                 batch_size: int = 1 << 18) -> tuple:
    """Exact lattice-point count of a box, with the box volume.

    Returns (count, volume) where volume = prod(2 x^e_i).  With no
    predicate the count is the closed product of the per-coordinate
    ranges.  A predicate is either a callable on coordinate tuples or an
    object with a .batch(columns) method taking parallel int64 arrays and
    returning a boolean mask; scanning walks disjoint chunks of the
    flattened index space, so the total is independent of chunk size.
    """
    bounds = box.bounds()
    for b in bounds:
        if b > PER_COORD_LIMIT:
            raise ResourceBudgetExceeded(
                f"coordinate range {b} exceeds {PER_COORD_LIMIT}")
    total = math.prod(2 * b + 1 for b in bounds)
    if total > TOTAL_COUNT_LIMIT:
        raise ResourceBudgetExceeded(
            f"expected count {total} exceeds {TOTAL_COUNT_LIMIT}")
    volume = box.volume()
    if predicate is None:
        return total, volume
    if hasattr(predicate, "batch"):
        return _count_batched(bounds, predicate, batch_size), volume
    return _count_scalar(bounds, predicate), volume


def _count_scalar(bounds, predicate) -> int:
    rest = [range(-b, b + 1) for b in bounds[1:]]
    count = 0
    for v0 in range(-bounds[0], bounds[0] + 1):
        count += sum(1 for tail in itertools.product(*rest)
                     if predicate((v0,) + tail))
    return count


def box_columns(bounds, batch_size: int = 1 << 18, lo: int = 0,
                hi: Optional[int] = None):
    """Yield the box's integer points as parallel int64 coordinate arrays.

    Walks the flattened index space [lo, hi) in disjoint chunks, so two
    scans with different chunk sizes (or a scan split across workers)
    see exactly the same points.  Each yield is a list of numpy arrays,
    one per coordinate, each of length <= batch_size.
    """
    import numpy as np

    sizes = [2 * b + 1 for b in bounds]
    total = math.prod(sizes)
    if hi is None or hi > total:
        hi = total
    pos = lo
    while pos < hi:
        top = min(pos + batch_size, hi)
        rem = np.arange(pos, top, dtype=np.int64)
        cols = []
        for b, size in zip(reversed(bounds), reversed(sizes)):
            rem, digit = np.divmod(rem, size)
            cols.append(digit - b)
        cols.reverse()
        yield cols
        pos = top


def _count_batched(bounds, predicate, batch_size: int) -> int:
    import numpy as np

    count = 0
    for cols in box_columns(bounds, batch_size):
        count += int(np.count_nonzero(predicate.batch(cols)))
    return count


# -------------------------------------------------------------- polytopes


@dataclass(frozen=True)
class PolytopeSpec:
    """Rational linear equalities and inequalities.

    equalities: pairs (coeffs, rhs) meaning sum(c*x) == rhs; inequalities
    mean sum(c*x) <= rhs.  Membership is exact.
    """

    name: str
    dim: int
    equalities: tuple
    inequalities: tuple

    def contains(self, point) -> bool:
        pt = tuple(Fraction(v) for v in point)
        if len(pt) != self.dim:
            raise DimensionMismatch(
                f"{self.name} lives in dimension {self.dim}")
        return (all(_dot(c, pt) == r for c, r in self.equalities)
                and all(_dot(c, pt) <= r for c, r in self.inequalities))


def _dot(coeffs, pt):
    return sum(c * v for c, v in zip(coeffs, pt))


def _rows(*pairs):
    return tuple((tuple(Fraction(c) for c in coeffs), Fraction(rhs))
                 for coeffs, rhs in pairs)


_EQ4 = _rows(((1, 1, 1, 0, 0), _HALF), ((0, 0, 0, 1, 1), _HALF))
_BASIC4 = _rows(
    ((-1, 0, 0, 0, 0), 0),   # 0 <= p1
    ((1, -1, 0, 0, 0), 0),   # p1 <= p2
    ((0, 1, -1, 0, 0), 0),   # p2 <= p3
    ((0, 0, 0, -1, 0), 0),   # 0 <= q1
    ((0, 0, 0, 1, -1), 0),   # q1 <= q2
)

_EQ5 = _rows(((1, 1, 1, 1, 0, 0, 0, 0, 0), _HALF),
             ((0, 0, 0, 0, 1, 1, 1, 1, 1), Fraction(3, 2)))
_BASIC5 = _rows(
    ((-1, 0, 0, 0, 0, 0, 0, 0, 0), 0),
    ((1, -1, 0, 0, 0, 0, 0, 0, 0), 0),
    ((0, 1, -1, 0, 0, 0, 0, 0, 0), 0),
    ((0, 0, 1, -1, 0, 0, 0, 0, 0), 0),
    ((0, 0, 0, 0, -1, 0, 0, 0, 0), 0),
    ((0, 0, 0, 0, 1, -1, 0, 0, 0), 0),
    ((0, 0, 0, 0, 0, 1, -1, 0, 0), 0),
    ((0, 0, 0, 0, 0, 0, 1, -1, 0), 0),
    ((0, 0, 0, 0, 0, 0, 0, 1, -1), 0),
)

_S4_EXTRA = _rows(
    ((-1, 0, -1, 0, 1), 0),  # q2 <= p1 + p3
    ((-2, 0, 0, 1, 0), 0),   # q1 <= 2 p1
    ((0, -2, 0, 0, 1), 0),   # q2 <= 2 p2
)
_D4_EXTRA = _rows(
    ((-2, 0, 0, 1, 0), 0),   # q1 <= 2 p1
    ((0, -2, 0, 0, 1), 0),   # q2 <= 2 p2
)
_U1_EXTRA = _rows(
    ((0, -1, -1, 0, 1), 0),  # q2 <= p2 + p3
    ((-2, 0, 0, 1, 0), 0),   # q1 <= 2 p1
)
_U2_EXTRA = _rows(
    ((-1, 0, -1, 0, 1), 0),  # q2 <= p1 + p3
    ((-1, -1, 0, 1, 0), 0),  # q1 <= p1 + p2
)
_U3_EXTRA = _rows(
    ((-1, 0, -1, 0, 1), 0),  # q2 <= p1 + p3
    ((0, -2, 0, 0, 1), 0),   # q2 <= 2 p2
)

# 1/2 + p_i >= q_a + q_b, written q_a + q_b - p_i <= 1/2
_S5_EXTRA = _rows(
    ((-1, 0, 0, 0, 1, 0, 0, 1, 0), _HALF),  # q4 + q1 <= 1/2 + p1
    ((-1, 0, 0, 0, 0, 1, 1, 0, 0), _HALF),  # q3 + q2 <= 1/2 + p1
    ((0, -1, 0, 0, 1, 0, 0, 0, 1), _HALF),  # q1 + q5 <= 1/2 + p2
    ((0, -1, 0, 0, 0, 1, 0, 1, 0), _HALF),  # q2 + q4 <= 1/2 + p2
    ((0, 0, -1, 0, 0, 1, 0, 0, 1), _HALF),  # q5 + q2 <= 1/2 + p3
    ((0, 0, -1, 0, 0, 0, 1, 1, 0), _HALF),  # q3 + q4 <= 1/2 + p3
    ((0, 0, 0, -1, 0, 0, 1, 0, 1), _HALF),  # q5 + q3 <= 1/2 + p4
)


def _spec4(name, extra):
    return PolytopeSpec(name, 5, _EQ4, _BASIC4 + extra)


POLY4_S4 = _spec4("poly4_s4", _S4_EXTRA)
POLY4_D4 = _spec4("poly4_d4", _D4_EXTRA)
POLY4_PIECES = (_spec4("poly4_u1", _U1_EXTRA),
                _spec4("poly4_u2", _U2_EXTRA),
                _spec4("poly4_u3", _U3_EXTRA))
POLY5_S5 = PolytopeSpec("poly5_s5", 9, _EQ5, _BASIC5 + _S5_EXTRA)

_POLYTOPES = {
    "poly4_s4": POLY4_S4,
    "poly4_d4": POLY4_D4,
    "poly4": POLY4_PIECES,
    "poly4_u1": POLY4_PIECES[0],
    "poly4_u2": POLY4_PIECES[1],
    "poly4_u3": POLY4_PIECES[2],
    "poly5_s5": POLY5_S5,
}


def polytope_names() -> tuple:
    return tuple(sorted(_POLYTOPES))


def polytope_spec(name: str):
    """The PolytopeSpec (or tuple of union members) registered under name."""
    try:
        return _POLYTOPES[name.lower()]
    except KeyError:
        raise UnknownPolytope(f"no polytope named {name!r}") from None


def polytope_contains(name: str, point) -> bool:
    """Exact membership; union polytopes test each member."""
    spec = polytope_spec(name)
    if isinstance(spec, tuple):
        return any(s.contains(point) for s in spec)
    return spec.contains(point)


# ------------------------------------------------------- density functions


def _on_cubic_segment(pt) -> bool:
    return 0 <= pt[0] <= pt[1] and pt[0] + pt[1] == _HALF


def _f3(pt):
    return 1 - (pt[1] - pt[0]) + max(Fraction(0), _HALF - 3 * pt[0])


def _f4(pt):
    p1, p2, p3, q1, q2 = pt
    val = 1 - (p3 - p2) - (p3 - p1) - (p2 - p1) - (q2 - q1)
    ps = (p1, p2, p3)
    for qk in (q1, q2):
        for i in range(3):
            for j in range(i, 3):
                val += max(Fraction(0), qk - ps[i] - ps[j])
    return val


def _f4_d4(pt):
    p1, p2, p3, q1, q2 = pt
    return (1 - (p3 - p2) - (p3 - p1) - (p2 - p1) - (q2 - q1)
            + (q2 - 2 * p1) + (q2 - p1 - p2) + (q2 - p1 - p3))


def _f5(pt):
    ps, qs = pt[:4], pt[4:]
    val = 1
    val -= sum(ps[j] - ps[i] for i in range(4) for j in range(i + 1, 4))
    val -= sum(qs[j] - qs[i] for i in range(5) for j in range(i + 1, 5))
    for i, j in itertools.combinations(range(5), 2):
        for k in range(4):
            val += max(Fraction(0), -_HALF + qs[i] + qs[j] - ps[k])
    return val


_DENSITY_DIMS = {"d3": 2, "d3max": 2, "ds3": 2, "d4": 5, "ds4": 5,
                 "dd4": 5, "dd4_lower": 5, "d5": 9, "ds5": 9}


def density_names() -> tuple:
    return ("d3", "d3max", "dS3", "d4", "dS4", "dD4", "dD4_lower",
            "d5", "dS5")


def density_value(which: str, point):
    """Piecewise-linear density evaluator.

    Returns an exact Fraction on the function's support, the string
    "zero" off-support, and the string "unknown" where only one-sided
    information exists: the D4 evaluator inside the S4 region (the bound
    itself is exposed as dD4_lower) and the total quintic evaluator
    between the S5 polytope and the base constraints, where no closed
    membership test is available.
    """
    key = str(which).lower()
    if key not in _DENSITY_DIMS:
        raise UnknownFunction(f"no density function named {which!r}")
    pt = tuple(Fraction(v) for v in point)
    if len(pt) != _DENSITY_DIMS[key]:
        raise DimensionMismatch(
            f"{which} expects a {_DENSITY_DIMS[key]}-dimensional point")

    if key == "d3":
        return _f3(pt) if _on_cubic_segment(pt) else "zero"
    if key == "ds3":
        if _on_cubic_segment(pt) and pt[0] >= Fraction(1, 6):
            return 1 - (pt[1] - pt[0])
        return "zero"
    if key == "d3max":
        if _on_cubic_segment(pt) and pt[0] >= Fraction(1, 6):
            return 1 - (pt[1] - pt[0])
        if pt == (0, _HALF):
            return Fraction(1)
        return "zero"

    if key == "d4":
        return _f4(pt) if polytope_contains("poly4", pt) else "zero"
    if key == "ds4":
        return _f4(pt) if POLY4_S4.contains(pt) else "zero"
    if key == "dd4":
        if not POLY4_D4.contains(pt):
            return "zero"
        if POLY4_S4.contains(pt):
            return "unknown"
        return _f4_d4(pt)
    if key == "dd4_lower":
        return _f4_d4(pt) if POLY4_D4.contains(pt) else "zero"

    if key == "d5":
        if not quintic.quintic_point_valid(pt):
            return "zero"
        if POLY5_S5.contains(pt):
            return _f5(pt)
        return "unknown"
    # dS5
    return _f5(pt) if POLY5_S5.contains(pt) else "zero"


# ----------------------------------------------------------- flag polytopes


GENERIC_QUARTIC_FLAG = ((0, 0, 0, 0),
                        (0, 1, 1, 2),
                        (0, 1, 2, 2),
                        (0, 2, 2, 2))


def _validate_table(table, size: int, levels: int) -> tuple:
    rows = tuple(tuple(v for v in row) for row in table)
    if len(rows) != size or any(len(r) != size for r in rows):
        raise InvalidTable(f"table must be {size}x{size}")
    for r in rows:
        for v in r:
            if not isinstance(v, int) or not 0 <= v <= levels:
                raise InvalidTable(f"levels must be integers in 0..{levels}")
    if any(v != 0 for v in rows[0]):
        raise InvalidTable("first row must be zero")
    for i in range(size):
        for j in range(size - 1):
            if rows[i][j] > rows[i][j + 1]:
                raise InvalidTable("table must be monotone along rows")
            if rows[j][i] > rows[j + 1][i]:
                raise InvalidTable("table must be monotone along columns")
    return rows


def flag_polytope(table, degree: int) -> PolytopeSpec:
    """Polytope attached to a flag table.

    Degree 4: one inequality q_T(i,j) <= p_i + p_j per cell with
    T(i,j) > 0.  Degree 5: p_(5-T(i,j)) + 1/2 >= q_(6-i) + q_(6-j) per
    upper-triangular cell with T(i,j) > 0.  Duplicate inequalities
    collapse; the base ordering and sum constraints are always included.
    """
    if degree == 4:
        rows = _validate_table(table, 4, 2)
        extra = {}
        for i in range(1, 4):
            for j in range(1, 4):
                t = rows[i][j]
                if t == 0:
                    continue
                coeffs = [0] * 5
                coeffs[i - 1] -= 1
                coeffs[j - 1] -= 1
                coeffs[2 + t] += 1
                extra[tuple(coeffs)] = Fraction(0)
        ineqs = _BASIC4 + tuple(sorted(extra.items()))
        return PolytopeSpec("flag4", 5, _EQ4, ineqs)
    if degree == 5:
        rows = _validate_table(table, 6, 4)
        extra = {}
        for i in range(1, 6):
            for j in range(i, 6):
                t = rows[i][j]
                if t == 0:
                    continue
                coeffs = [0] * 9
                coeffs[4 + (5 - i)] += 1
                coeffs[4 + (5 - j)] += 1
                coeffs[(5 - t) - 1] -= 1
                extra[tuple(coeffs)] = _HALF
        ineqs = _BASIC5 + tuple(sorted(extra.items()))
        return PolytopeSpec("flag5", 9, _EQ5, ineqs)
    raise UnsupportedDegree("flag polytopes cover degrees 4 and 5")


# ------------------------------------------------------ vertex enumeration


def polytope_vertices(spec: PolytopeSpec) -> tuple:
    """All vertices of a bounded polytope, by facet-combination search.

    Intended for the small dimensions used here (3 or 7 after the two sum
    constraints).  Candidate basic solutions are screened in floating
    point, then confirmed with exact rational solves and membership.
    """
    import numpy as np

    from .exact import solve_linear

    eq_rows = [list(c) for c, _ in spec.equalities]
    eq_rhs = [r for _, r in spec.equalities]
    ineqs = list(spec.inequalities)
    need = spec.dim - len(eq_rows)
    a_all = np.array([[float(x) for x in c] for c, _ in ineqs])
    b_all = np.array([float(r) for _, r in ineqs])
    base = np.array([[float(x) for x in row] for row in eq_rows])
    base_rhs = np.array([float(r) for r in eq_rhs])
    verts = set()
    for combo in itertools.combinations(range(len(ineqs)), need):
        mat = np.vstack([base, a_all[list(combo)]])
        rhs = np.concatenate([base_rhs, b_all[list(combo)]])
        exactify = False
        try:
            sol = np.linalg.solve(mat, rhs)
            if np.all(a_all @ sol <= b_all + 1e-9):
                exactify = True
        except np.linalg.LinAlgError:
            exactify = True  # decide singularity exactly
        if not exactify:
            continue
        rows = eq_rows + [list(ineqs[i][0]) for i in combo]
        rhs_x = eq_rhs + [ineqs[i][1] for i in combo]
        sol_x = solve_linear(rows, rhs_x)
        if sol_x is None:
            continue
        if spec.contains(sol_x):
            verts.add(tuple(sol_x))
    return tuple(sorted(verts))


# ----------------------------------------------------------- vertex catalog


def _fr(num, den):
    return Fraction(num, den)


VERTEX_POINTS = {
    "cubic_generic": (_fr(1, 4), _fr(1, 4)),
    "cubic_monogenic": (_fr(1, 6), _fr(1, 3)),
    "cubic_reducible": (Fraction(0), _fr(1, 2)),
    "quartic_s4": (_fr(1, 6), _fr(1, 6), _fr(1, 6), _fr(1, 4), _fr(1, 4)),
    "quartic_binary": (_fr(1, 6), _fr(1, 6), _fr(1, 6), _fr(1, 6), _fr(1, 3)),
    "quartic_xy_xy": (_fr(1, 8), _fr(1, 8), _fr(1, 4), _fr(1, 4), _fr(1, 4)),
    "quartic_unexplained": (_fr(1, 8), _fr(3, 16), _fr(3, 16),
                            _fr(1, 4), _fr(1, 4)),
    "quartic_x_y_x2": (_fr(1, 10), _fr(1, 5), _fr(1, 5),
                       _fr(1, 5), _fr(3, 10)),
    "quartic_monogenic": (_fr(1, 12), _fr(1, 6), _fr(1, 4),
                          _fr(1, 6), _fr(1, 3)),
    "quartic_d4": (Fraction(0), _fr(1, 4), _fr(1, 4),
                   Fraction(0), _fr(1, 2)),
    "quintic_s5": (_fr(1, 8),) * 4 + (_fr(3, 10),) * 5,
    "quintic_binary": (_fr(1, 8),) * 4 + (_fr(1, 4), _fr(1, 4), _fr(1, 4),
                                          _fr(3, 8), _fr(3, 8)),
    "quintic_monogenic": tuple(_fr(m, 20) for m in (1, 2, 3, 4,
                                                    4, 5, 6, 7, 8)),
}
