"""Exact rational linear algebra and form discriminants.

Everything in this module is integer/Fraction arithmetic; no floats enter.
Polynomial and binary-form coefficient sequences are descending: the tuple
(a, b, c, d) means a*x^3 + b*x^2*y + c*x*y^2 + d*y^3, and its dehomogenized
univariate counterpart a*x^3 + b*x^2 + c*x + d.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch, ZeroPolynomial

Coeffs = Sequence[int | Fraction]


def poly_degree(coeffs: Coeffs) -> int:
    """Degree after stripping leading zeros; -1 for the zero polynomial."""
    for i, c in enumerate(coeffs):
        if c != 0:
            return len(coeffs) - 1 - i
    return -1


def poly_strip(coeffs: Coeffs) -> tuple:
    d = poly_degree(coeffs)
    if d < 0:
        raise ZeroPolynomial("zero polynomial")
    return tuple(coeffs[len(coeffs) - 1 - d:])


def poly_eval(coeffs: Coeffs, x):
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


def poly_deriv(coeffs: Coeffs) -> tuple:
    n = len(coeffs) - 1
    return tuple(c * (n - i) for i, c in enumerate(coeffs[:-1]))


def poly_mul(f: Coeffs, g: Coeffs) -> tuple:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return tuple(out)


def form_eval(coeffs: Coeffs, x, y):
    """Evaluate the homogeneous form with these coefficients at (x, y)."""
    n = len(coeffs) - 1
    acc = 0
    for i, c in enumerate(coeffs):
        acc += c * x ** (n - i) * y ** i
    return acc


def content(coeffs: Coeffs) -> int:
    g = 0
    for c in coeffs:
        g = math.gcd(g, abs(int(c)))
    return g


def bareiss_det(rows: Sequence[Sequence]):
    """Determinant by fraction-free Bareiss elimination.

    Exact over int entries (stays in int); Fraction entries also work since
    the interleaved divisions are then exact rational ops.
    """
    n = len(rows)
    if n == 0:
        return 1
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("determinant needs a square matrix")
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                if isinstance(num, int) and isinstance(prev, int):
                    m[i][j] = num // prev
                else:
                    m[i][j] = Fraction(num, 1) / prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list:
    if len(a[0]) != len(b):
        raise DimensionMismatch("inner dimensions differ")
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a: Sequence[Sequence], v: Sequence) -> list:
    if len(a[0]) != len(v):
        raise DimensionMismatch("matrix/vector dimensions differ")
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def mat_identity(n: int) -> list:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _echelon(rows: Sequence[Sequence]) -> list:
    """Row echelon form over Fractions (copy; input untouched)."""
    m = [[Fraction(x) for x in r] for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == nrows:
            break
    return m


def rank_exact(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    ech = _echelon(rows)
    return sum(1 for row in ech if any(x != 0 for x in row))


def solve_linear(a: Sequence[Sequence], b: Sequence) -> list | None:
    """Unique exact solution of a*x = b, or None if singular/inconsistent."""
    n = len(a)
    if any(len(r) != n for r in a) or len(b) != n:
        raise DimensionMismatch("solve_linear needs square a and matching b")
    aug = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(a)]
    ech = _echelon(aug)
    sol = [Fraction(0)] * n
    seen = set()
    for row in ech:
        lead = next((j for j in range(n) if row[j] != 0), None)
        if lead is None:
            if row[n] != 0:
                return None
            continue
        seen.add(lead)
        sol[lead] = row[n] - sum(row[j] * sol[j] for j in range(lead + 1, n))
    if len(seen) != n:
        return None
    return sol


def mat_inverse(a: Sequence[Sequence]) -> list | None:
    n = len(a)
    if any(len(r) != n for r in a):
        raise DimensionMismatch("inverse needs a square matrix")
    aug = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(a)]
    ech = _echelon(aug)
    for i in range(n):
        if ech[i][i] != 1:
            return None
    return [row[n:] for row in ech]


def gcd_of_minors(rows: Sequence[Sequence[int]], k: int) -> int:
    """gcd of all k x k minors of an integer matrix (0 if all vanish)."""
    nr, nc = len(rows), len(rows[0])
    g = 0
    for ri in itertools.combinations(range(nr), k):
        for ci in itertools.combinations(range(nc), k):
            sub = [[rows[i][j] for j in ci] for i in ri]
            g = math.gcd(g, abs(bareiss_det(sub)))
            if g == 1:
                return 1
    return g


def sylvester_matrix(f: Coeffs, g: Coeffs) -> list:
    f = poly_strip(f)
    g = poly_strip(g)
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(f) + [0] * (size - i - m - 1))
    for i in range(m):
        rows.append([0] * i + list(g) + [0] * (size - i - n - 1))
    return rows


def resultant(f: Coeffs, g: Coeffs):
    """Resultant of two nonzero polynomials (descending coefficients)."""
    f = poly_strip(f)
    g = poly_strip(g)
    if len(f) == 1 and len(g) == 1:
        return 1
    if len(f) == 1:
        return f[0] ** (len(g) - 1)
    if len(g) == 1:
        return g[0] ** (len(f) - 1)
    return bareiss_det(sylvester_matrix(f, g))


def form_discriminant(coeffs: Coeffs):
    """Discriminant of a binary form of degree len(coeffs) - 1.

    Uses disc = (-1)^(n(n-1)/2) Res(f, f') / lead on the dehomogenization.
    A vanishing leading coefficient is first repaired by the unimodular
    substitution y -> y + k*x (disc has even weight, so it is preserved);
    the smallest k in 0, 1, -1, 2, ... with f(1, k) != 0 is used.
    """
    n = len(coeffs) - 1
    if n < 1:
        raise ZeroPolynomial("forms of degree >= 1 only")
    if all(c == 0 for c in coeffs):
        raise ZeroPolynomial("zero form has no discriminant")
    if n == 1:
        return 1
    work = list(coeffs)
    if work[0] == 0:
        for k in _small_shifts():
            if form_eval(coeffs, 1, k) != 0:
                work = _shift_y_by_kx(coeffs, k)
                break
    lead = work[0]
    res = resultant(work, poly_deriv(work))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    value = Fraction(sign * res, lead)
    if value.denominator != 1:
        return value
    return int(value)


def _small_shifts():
    yield 0
    k = 1
    while True:
        yield k
        yield -k
        k += 1


def _shift_y_by_kx(coeffs: Coeffs, k: int) -> list:
    """Coefficients of f(x, y + k*x)."""
    n = len(coeffs) - 1
    out = [0] * (n + 1)
    for i, c in enumerate(coeffs):
        # c * x^(n-i) * (y + k x)^i
        for j in range(i + 1):
            out[j] += c * math.comb(i, j) * k ** (i - j)
    return out


def poly_discriminant(coeffs: Coeffs):
    """Discriminant of a univariate polynomial of its actual degree."""
    f = poly_strip(coeffs)
    if len(f) - 1 < 1:
        raise ZeroPolynomial("degree >= 1 required")
    return form_discriminant(f)


def le_power(value, base, exponent) -> bool:
    """Exact closed comparison |value| <= base**exponent.

    base is a positive int/Fraction, exponent a Fraction; the comparison is
    cleared of the fractional exponent by raising both sides to its
    denominator, so boundary cases are decided exactly.
    """
    v = abs(Fraction(value))
    if v == 0:
        return True
    b = Fraction(base)
    if b <= 0:
        raise ValueError("base must be positive")
    e = Fraction(exponent)
    return v ** e.denominator <= b ** e.numerator
