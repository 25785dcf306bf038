"""Integer binary forms: action, discriminant, reduction, coefficient boxes.

A binary form of degree n is stored as the tuple of n+1 integer
coefficients in descending powers of x: (a, b, c, d) is
a*x^3 + b*x^2*y + c*x*y^2 + d*y^3.

The GL2(Z) right action used throughout is
    (gamma f)(x, y) = f((x, y) gamma) = f(a x + c y, b x + d y)
for gamma = [[a, b], [c, d]], with the extra 1/det twist at degree 3 so
that the discriminant itself (not just its square class) is preserved.
Acting by gamma1 and then gamma2 equals acting by the product
gamma2 * gamma1 (row vectors compose on the right).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy
from sympy.polys.numberfields.galoisgroups import galois_group as _sym_galois

from . import exact
from .errors import UnsupportedDegree, ZeroDiscriminant, ZeroPolynomial

Matrix2 = Sequence[Sequence[int]]

IDENT2 = ((1, 0), (0, 1))


@dataclass(frozen=True)
class BinaryForm:
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if len(self.coeffs) < 2:
            raise UnsupportedDegree("forms of degree >= 1 only")
        if all(c == 0 for c in self.coeffs):
            raise ZeroPolynomial("zero form")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x, y):
        return exact.form_eval(self.coeffs, x, y)

    def disc(self):
        return exact.form_discriminant(self.coeffs)

    def content(self) -> int:
        return exact.content(self.coeffs)

    def literal(self) -> str:
        return ",".join(str(c) for c in self.coeffs)


def parse_form(text: str) -> BinaryForm:
    """Parse a comma-separated coefficient literal like "1,0,-1,0"."""
    parts = [p.strip() for p in text.split(",")]
    return BinaryForm(tuple(int(p) for p in parts))


def det2(gamma: Matrix2) -> int:
    return gamma[0][0] * gamma[1][1] - gamma[0][1] * gamma[1][0]


def compose2(g1: Matrix2, g2: Matrix2) -> tuple:
    """Plain matrix product g1 * g2."""
    return ((g1[0][0] * g2[0][0] + g1[0][1] * g2[1][0],
             g1[0][0] * g2[0][1] + g1[0][1] * g2[1][1]),
            (g1[1][0] * g2[0][0] + g1[1][1] * g2[1][0],
             g1[1][0] * g2[0][1] + g1[1][1] * g2[1][1]))


def substituted_coeffs(coeffs: Sequence[int], gamma: Matrix2) -> tuple:
    """Coefficients of f(a x + c y, b x + d y) for gamma = [[a,b],[c,d]]."""
    (a, b), (c, d) = gamma
    n = len(coeffs) - 1
    out = [0] * (n + 1)
    pow1 = [[1]]
    pow2 = [[1]]
    for k in range(1, n + 1):
        pow1.append([math.comb(k, j) * a ** (k - j) * c ** j for j in range(k + 1)])
        pow2.append([math.comb(k, j) * b ** (k - j) * d ** j for j in range(k + 1)])
    for i, ci in enumerate(coeffs):
        if ci == 0:
            continue
        p = pow1[n - i]
        q = pow2[i]
        for j1, v1 in enumerate(p):
            for j2, v2 in enumerate(q):
                out[j1 + j2] += ci * v1 * v2
    return tuple(out)


def gl2_action(form: BinaryForm, gamma: Matrix2) -> BinaryForm:
    """Right action of a unimodular gamma; degree 3 carries the 1/det twist."""
    d = det2(gamma)
    if d not in (1, -1):
        raise ValueError("gamma must be unimodular")
    new = substituted_coeffs(form.coeffs, gamma)
    if form.degree == 3 and d == -1:
        new = tuple(-c for c in new)
    return BinaryForm(new)


def is_squarefree_form(form: BinaryForm) -> bool:
    """A binary form is squarefree over Q iff its discriminant is nonzero."""
    return form.disc() != 0


def is_irreducible(form: BinaryForm) -> bool:
    """Irreducibility over Q (degree >= 2; a vanishing lead means y | f)."""
    if form.degree < 2:
        return True
    if form.coeffs[0] == 0:
        return False
    x = sympy.Symbol("x")
    return sympy.Poly(list(form.coeffs), x).is_irreducible


_GALOIS_NAMES = {
    (3, 3): "C3", (3, 6): "S3",
    (4, 4, True): "V4", (4, 4, False): "C4", (4, 8): "D4",
    (4, 12): "A4", (4, 24): "S4",
    (5, 5): "C5", (5, 10): "D5", (5, 20): "F5", (5, 60): "A5", (5, 120): "S5",
}


def galois_class(form: BinaryForm) -> str:
    """Galois group label of the splitting field; "red" if reducible."""
    n = form.degree
    if n not in (3, 4, 5):
        raise UnsupportedDegree("galois classification for degrees 3..5")
    if not is_irreducible(form):
        return "red"
    if n == 3:
        # irreducible cubic: cyclic iff the discriminant is a square
        return "C3" if _is_square(form.disc()) else "S3"
    x = sympy.Symbol("x")
    grp, alt = _sym_galois(sympy.Poly(list(form.coeffs), x))
    order = int(grp.order())
    key = (n, order, alt) if (n, order) == (4, 4) else (n, order)
    return _GALOIS_NAMES[key]


# ------------------------------------------------------------------ boxes


def cubic_box_exponents(p: Sequence) -> tuple:
    """Box exponents (e_a, e_b, e_c, e_d) for the cubic profile point p.

    |a| <= X^(3 p1 - 1/2), |b| <= X^(2 p1 + p2 - 1/2),
    |c| <= X^(p1 + 2 p2 - 1/2), |d| <= X^(3 p2 - 1/2).
    """
    p1, p2 = Fraction(p[0]), Fraction(p[1])
    h = Fraction(1, 2)
    return (3 * p1 - h, 2 * p1 + p2 - h, p1 + 2 * p2 - h, 3 * p2 - h)


def nic_box_exponents(n: int, r: Sequence) -> tuple:
    """Exponents ((n-i) r1 + i r2), i = 0..n, for a degree-n coefficient box."""
    r1, r2 = Fraction(r[0]), Fraction(r[1])
    return tuple((n - i) * r1 + i * r2 for i in range(n + 1))


def form_in_box(form: BinaryForm, exponents: Sequence, x_scale) -> bool:
    """Exact closed membership |c_i| <= x_scale^e_i for every coefficient."""
    if len(exponents) != len(form.coeffs):
        raise UnsupportedDegree("exponent count must match coefficient count")
    return all(exact.le_power(c, x_scale, Fraction(e))
               for c, e in zip(form.coeffs, exponents))


# -------------------------------------------------------- cubic reduction


def hessian(form: BinaryForm) -> tuple:
    """Quadratic covariant (P, Q, R) of a cubic: P x^2 + Q x y + R y^2.

    P = b^2 - 3ac, Q = bc - 9ad, R = c^2 - 3bd; its discriminant
    Q^2 - 4 P R equals -3 times the cubic discriminant, and
    H(gamma f) = H(f) composed with gamma.
    """
    if form.degree != 3:
        raise UnsupportedDegree("hessian of cubics only")
    a, b, c, d = form.coeffs
    return (b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d)


def quad_apply(q: tuple, gamma: Matrix2) -> tuple:
    """(P, Q, R) of q((x, y) gamma)."""
    (a, b), (c, d) = gamma
    P, Q, R = q
    return (P * a * a + Q * a * b + R * b * b,
            2 * P * a * c + Q * (a * d + b * c) + 2 * R * b * d,
            P * c * c + Q * c * d + R * d * d)


def _is_square(m: int) -> bool:
    if m < 0:
        return False
    r = math.isqrt(m)
    return r * r == m


def _key(coeffs: tuple) -> tuple:
    return (max(abs(c) for c in coeffs), coeffs)


def _reduce_definite(q: tuple):
    """Gauss reduction of a positive definite (P, Q, R) with transform.

    Ends at the unique reduced form: -P < Q <= P <= R, with Q >= 0
    whenever Q = -P would tie or P = R.
    """
    g = IDENT2
    P, Q, R = q
    while True:
        if P > R:
            step = ((0, 1), (-1, 0))
            P, Q, R = R, -Q, P
            g = compose2(step, g)
            continue
        if Q > P or Q <= -P:
            t = (P - Q) // (2 * P)
            step = ((1, 0), (t, 1))
            P, Q, R = quad_apply((P, Q, R), step)
            g = compose2(step, g)
            continue
        break
    if Q < 0 and P == R:
        step = ((0, 1), (-1, 0))
        P, Q, R = R, -Q, P
        g = compose2(step, g)
    if Q < 0 and Q == -P:
        step = ((1, 0), (1, 1))
        P, Q, R = quad_apply((P, Q, R), step)
        g = compose2(step, g)
    return (P, Q, R), g


_SMALL_GL2 = None


def _small_gl2():
    global _SMALL_GL2
    if _SMALL_GL2 is None:
        out = []
        rng = (-1, 0, 1)
        out = [((a, b), (c, d))
               for a in rng for b in rng for c in rng for d in rng
               if a * d - b * c in (1, -1)]
        _SMALL_GL2 = out
    return _SMALL_GL2


def _indefinite_reduced(P: int, Q: int, R: int, D: int) -> bool:
    s = math.isqrt(D)
    if Q <= 0 or Q > s:
        return False
    return s - Q < 2 * abs(P) <= s + Q


def _rho_step(P: int, Q: int, R: int, D: int):
    """One step of the reduction/cycle walk on an indefinite form.

    Returns ((P', Q', R'), gamma) with the new form = old composed with
    gamma = [[0, -1], [1, m]].
    """
    if R == 0:
        raise ZeroDiscriminant("degenerate quadratic in cycle walk")
    s = math.isqrt(D)
    two_r = 2 * abs(R)
    if abs(R) > s:
        lo = -abs(R)          # window (-|R|, |R|]
    else:
        lo = s - two_r        # window (s - 2|R|, s]
    base = (-Q) % two_r
    qp = lo + 1 + (base - (lo + 1)) % two_r
    m = (-Q - qp) // (2 * R)
    gamma = ((0, -1), (1, m))
    newq = quad_apply((P, Q, R), gamma)
    return newq, gamma


def _cycle_transforms(q: tuple, D: int, max_steps: int = 40000):
    """All reduced forms of the rho-walk from q, with transforms from q."""
    out = []
    g = IDENT2
    cur = q
    seen = set()
    for _ in range(max_steps):
        if _indefinite_reduced(*cur, D):
            if cur in seen:
                return out
            seen.add(cur)
            out.append((cur, g))
        cur, step = _rho_step(*cur, D)
        g = compose2(step, g)
    raise ValueError("reduction cycle did not close")


def _automorph(qred: tuple, D: int) -> tuple:
    """Fundamental automorph: rho-steps composed around one cycle period."""
    g = IDENT2
    cur = qred
    for _ in range(40000):
        cur, step = _rho_step(*cur, D)
        g = compose2(step, g)
        if cur == qred:
            return g
    raise ValueError("cycle period not found")


def _inv2(g: Matrix2) -> tuple:
    (a, b), (c, d) = g
    det = a * d - b * c
    if det == 1:
        return ((d, -b), (-c, a))
    return ((-d, b), (c, -a))


def _primitive(v: tuple) -> tuple:
    g = math.gcd(abs(v[0]), abs(v[1]))
    u = (v[0] // g, v[1] // g)
    if u[0] < 0 or (u[0] == 0 and u[1] < 0):
        u = (-u[0], -u[1])
    return u


def _xgcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _null_directions(H: tuple, D: int):
    """Primitive null vectors of a rationally split quadratic (two of them)."""
    P, Q, R = H
    s = math.isqrt(D)
    if P != 0:
        return [_primitive((-Q + s, 2 * P)), _primitive((-Q - s, 2 * P))]
    return [_primitive((1, 0)), _primitive((-R, Q))]


def _complete_unimodular(w: tuple) -> tuple:
    """A determinant-1 matrix whose second row is the primitive vector w."""
    u, v = w
    g, a, b = _xgcd(u, v)
    return ((b, -a), (u, v))


def _shift_into_range(P: int, Q: int) -> int:
    """The unique t with 0 <= P + t*Q < |Q|."""
    r = P % abs(Q)
    return (r - P) // Q


def _split_candidates(H: tuple, D: int):
    """Candidate transforms when the covariant splits rationally.

    Each null direction goes to (0, 1) (killing the y^2 term), signs are
    enumerated, and the leftover unipotent shift is pinned by putting the
    x^2 coefficient into [0, |Q|).  The stabilizer of that normal shape is
    exactly the enumerated finite set, so the image set is orbit-stable.
    """
    out = []
    for w in _null_directions(H, D):
        g0 = _complete_unimodular(w)
        for s1 in (1, -1):
            for s2 in (1, -1):
                gs = compose2(((s1, 0), (0, s2)), g0)
                P2, Q2, R2 = quad_apply(H, gs)
                t = _shift_into_range(P2, Q2)
                gt = compose2(((1, t), (0, 1)), gs)
                out.append(gt)
    return out


def _indefinite_candidates(form: BinaryForm, H: tuple, D: int):
    """Transforms onto the reduced cycles of the covariant, widened by an
    automorph walk long enough to pass the coefficient-norm minimum."""
    flip = ((1, 0), (0, -1))
    bases = []
    for pre in (IDENT2, flip):
        q0 = quad_apply(H, pre)
        for _, g in _cycle_transforms(q0, D):
            bases.append(compose2(g, pre))
    out = []
    norm0 = max(abs(c) for c in form.coeffs)
    cap = 64 + norm0.bit_length()
    for g0 in bases:
        out.append(g0)
        eps = _automorph(quad_apply(H, g0), D)
        for direction in (eps, _inv2(eps)):
            g = g0
            best_seen = max(abs(c) for c in substituted_coeffs(form.coeffs, g0))
            rising = 0
            prev = None
            for _ in range(cap):
                g = compose2(direction, g)
                out.append(g)
                n = max(abs(c) for c in substituted_coeffs(form.coeffs, g))
                best_seen = min(best_seen, n)
                if prev is not None and n >= prev:
                    rising += 1
                    if rising >= 3 and n > 64 * best_seen + 64:
                        break
                else:
                    rising = 0
                prev = n
    neg = ((-1, 0), (0, -1))
    out.extend([compose2(neg, g) for g in list(out)])
    return out


def cubic_canonical_form(form: BinaryForm):
    """Deterministic GL2(Z)-orbit representative of a nonzero-disc cubic.

    Returns (canonical, gamma) with gamma acting on the input giving the
    canonical form.  The representative minimizes (max |coeff|, lex tuple)
    over a covariant-pinned candidate set, so any two representatives of
    one orbit map to the same output.
    """
    if form.degree != 3:
        raise UnsupportedDegree("canonical form for cubics only")
    disc = form.disc()
    if disc == 0:
        raise ZeroDiscriminant("orbit reduction needs nonzero discriminant")
    H = hessian(form)
    D = -3 * disc

    if disc > 0:
        # Gauss reduction pins a proper-equivalence representative, so an
        # improper (det -1) translate lands at (P, -Q, R); reduce from both
        # orientations to stay constant on full GL2(Z) orbits.
        gammas = []
        for pre in (IDENT2, ((1, 0), (0, -1))):
            hred, g = _reduce_definite(quad_apply(H, pre))
            base = compose2(g, pre)
            gammas.extend(compose2(s, base) for s in _small_gl2()
                          if quad_apply(hred, s) == hred)
    elif _is_square(D):
        gammas = _split_candidates(H, D)
    else:
        gammas = _indefinite_candidates(form, H, D)

    best = None
    for g2 in gammas:
        img = gl2_action(form, g2)
        k = _key(img.coeffs)
        if best is None or k < best[0]:
            best = (k, img, g2)
    return best[1], best[2]
