"""Lattice geometry of rank-n rings under the averaged embedding norm.

A nondegenerate ring of rank n has n complex homomorphisms; the form
q(x) = (1/n) * sum_k |sigma_k(x)|^2 makes the ring a Euclidean lattice
with q(1) = 1.  This module computes the embedding matrix with
certified root isolation, the Gram matrix, successive minima (lengths,
i.e. square roots of q), logarithmic minima profiles, a closeness
predicate, dual-lattice minima, greedy Minkowski-reduced bases, and two
small checkers used by bound arguments: a weighted bound system and a
directed-graph cycle finder.

Natural logarithms are used everywhere a logarithm base appears.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

import mpmath
import numpy as np

from .errors import (
    DegenerateDiscriminant,
    DimensionMismatch,
    PrecisionExhausted,
    ResourceBudgetExceeded,
    UnitDiscriminant,
)
from .exact import gcd_of_minors, poly_deriv, resultant, solve_linear
from .rings import Ring, _charpoly_coeffs, ring_disc

_DPS_DEFAULT = 30
_PRIMITIVE_TRIES = 20
_PRIMITIVE_RANGES = (5, 50, 500)
_ENUM_CAP = 4_000_000
_CERT_REL = 1e-9


@dataclass(frozen=True)
class MinkLattice:
    """Positive definite Gram matrix, optionally backed by a ring.

    ``gram`` holds midpoint values; ``rad`` is a uniform per-entry error
    radius estimate (0 for exact input).  ``source``/``dps`` record how a
    ring-backed lattice was built so minima can be re-certified.
    """

    gram: tuple
    rad: float = 0.0
    source: Optional[Ring] = None
    dps: int = 0

    def __post_init__(self):
        g = tuple(tuple(float(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise DimensionMismatch("Gram matrix must be square")
        a = np.array(g)
        if not np.allclose(a, a.T, rtol=1e-8, atol=1e-12):
            raise ValueError("Gram matrix must be symmetric")
        try:
            np.linalg.cholesky((a + a.T) / 2)
        except np.linalg.LinAlgError:
            raise ValueError("Gram matrix must be positive definite")

    @property
    def rank(self) -> int:
        return len(self.gram)


@dataclass(frozen=True)
class MinimaProfile:
    """Successive minima of a lattice, with logarithmic profile.

    ``lams`` are the lengths lambda_0 <= ... <= lambda_{n-1} and
    ``vectors`` integer coordinate witnesses.  When the lattice comes
    from a ring with |disc| >= 2, ``p`` holds
    (ln lambda_1 / ln |disc|, ..., ln lambda_{n-1} / ln |disc|);
    otherwise ``p`` is None.
    """

    disc: Optional[int]
    lams: tuple
    vectors: tuple
    p: Optional[tuple]


def _squarefree_int_poly(coeffs) -> bool:
    der = poly_deriv(coeffs)
    return resultant(coeffs, der) != 0


def _primitive_charpoly(ring: Ring, rng: random.Random):
    """Random element whose multiplication matrix has squarefree charpoly."""
    n = ring.rank
    for bound in _PRIMITIVE_RANGES:
        for _ in range(_PRIMITIVE_TRIES):
            c = tuple(rng.randint(-bound, bound) for _ in range(n))
            m = ring.mult_matrix(c)
            cp = _charpoly_coeffs(m)
            if _squarefree_int_poly(cp):
                return c, m, cp
    raise PrecisionExhausted("no separable primitive element found")


def _root_balls(coeffs, dps: int):
    """All complex roots with certified pairwise-disjoint inclusion radii.

    Around an approximation t of a degree-n polynomial there is always a
    true root within n*|f(t)/f'(t)|; n disjoint balls therefore isolate
    exactly one root each.
    """
    n = len(coeffs) - 1
    with mpmath.workdps(dps):
        roots = mpmath.polyroots([mpmath.mpf(c) for c in coeffs],
                                 maxsteps=200, extraprec=80)
        der = [c * (n - i) for i, c in enumerate(coeffs[:-1])]
        balls = []
        for t in roots:
            t = mpmath.mpc(t)
            fv = mpmath.polyval([mpmath.mpf(c) for c in coeffs], t)
            dv = mpmath.polyval([mpmath.mpf(c) for c in der], t)
            if dv == 0:
                raise PrecisionExhausted("derivative vanished at approximate root")
            balls.append((t, n * abs(fv) / abs(dv)))
        for (t1, r1), (t2, r2) in combinations(balls, 2):
            if abs(t1 - t2) <= r1 + r2:
                raise PrecisionExhausted("root inclusion balls overlap")
        balls.sort(key=lambda b: (float(b[0].real), float(b[0].imag)))
        return balls


def _polyval_frac(coeffs, x):
    acc = mpmath.mpf(0)
    for c in coeffs:
        acc = acc * x + mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
    return acc


def embeddings(ring: Ring, dps: int = _DPS_DEFAULT, seed: int = 0) -> np.ndarray:
    """Matrix E with E[k, i] = (k-th homomorphism)(i-th basis vector).

    A random primitive element theta is drawn (coefficients uniform in
    [-5, 5], widening after 20 failures; deterministic in ``seed``); its
    exact characteristic polynomial is solved with certified disjoint
    root balls; each basis vector is written exactly as a rational
    polynomial in theta and evaluated at the isolated roots.  Rows are
    sorted by (re, im) of the primitive root for determinism.
    """
    if ring_disc(ring) == 0:
        raise DegenerateDiscriminant("embeddings need a nonzero discriminant")
    n = ring.rank
    rng = random.Random(seed)
    _c, m, cp = _primitive_charpoly(ring, rng)
    pows = [tuple(1 if i == 0 else 0 for i in range(n))]
    for _ in range(n - 1):
        prev = pows[-1]
        pows.append(tuple(sum(m[k][j] * prev[j] for j in range(n))
                          for k in range(n)))
    pmat = [[Fraction(pows[j][k]) for j in range(n)] for k in range(n)]
    gs = []
    for i in range(n):
        sol = solve_linear(pmat, [Fraction(1 if k == i else 0) for k in range(n)])
        if sol is None:
            raise PrecisionExhausted("powers of the primitive element are dependent")
        gs.append(list(reversed([Fraction(v) for v in sol])))
    balls = _root_balls(cp, dps)
    ee = np.empty((n, n), dtype=complex)
    with mpmath.workdps(dps):
        for k, (t, _r) in enumerate(balls):
            for i in range(n):
                ee[k, i] = complex(_polyval_frac(gs[i], t))
    return ee


def gram(ring: Ring, dps: int = _DPS_DEFAULT) -> MinkLattice:
    """Gram matrix G[i][j] = (1/n) sum_k sigma_k(v_i) conj(sigma_k(v_j)).

    Checks det(G) * n^n = |disc| to relative 1e-6 as a self-test,
    escalating the working precision a few times before raising.
    """
    d = ring_disc(ring)
    if d == 0:
        raise DegenerateDiscriminant("Gram matrix needs a nonzero discriminant")
    n = ring.rank
    work = dps
    for _ in range(4):
        try:
            ee = embeddings(ring, dps=work)
        except PrecisionExhausted:
            work *= 2
            continue
        g = (ee.conj().T @ ee).real / n
        g = (g + g.T) / 2
        det = float(np.linalg.det(g))
        if det > 0 and abs(det * float(n) ** n - abs(d)) <= 1e-6 * abs(d):
            return MinkLattice(gram=tuple(map(tuple, g)),
                               rad=10.0 ** (-min(work, 300) + 3),
                               source=ring, dps=work)
        work *= 2
    raise PrecisionExhausted("Gram self-check det * n^n == |disc| failed")


def _conjugate(u, g):
    n = len(g)
    return [[sum(u[i][a] * g[a][b] * u[j][b] for a in range(n) for b in range(n))
             for j in range(n)] for i in range(n)]


def _lll_gram(g, delta: float = 0.99, max_iter: int = 20000):
    """Integer row transform U such that U g U^T is LLL-reduced."""
    n = len(g)
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def inner(i, j):
        return sum(u[i][a] * g[a][b] * u[j][b]
                   for a in range(n) for b in range(n))

    def gso():
        bs = [0.0] * n
        mu = [[0.0] * n for _ in range(n)]
        for i in range(n):
            bs[i] = inner(i, i) - sum(mu[i][k] ** 2 * bs[k] for k in range(i))
            if bs[i] <= 0:
                raise PrecisionExhausted("Gram matrix numerically singular")
            for j in range(i + 1, n):
                mu[j][i] = (inner(j, i)
                            - sum(mu[j][k] * mu[i][k] * bs[k]
                                  for k in range(i))) / bs[i]
        return bs, mu

    k = 1
    it = 0
    while k < n:
        it += 1
        if it > max_iter:
            raise PrecisionExhausted("basis reduction did not converge")
        bs, mu = gso()
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                for a in range(n):
                    u[k][a] -= q * u[j][a]
                bs, mu = gso()
        if bs[k] >= (delta - mu[k][k - 1] ** 2) * bs[k - 1]:
            k += 1
        else:
            u[k], u[k - 1] = u[k - 1], u[k]
            k = max(k - 1, 1)
    return u


def _enumerate_upto(g, bound: float):
    """Nonzero integer vectors with x g x^T <= bound, one per sign pair.

    The kept representative has its first nonzero coordinate positive.
    """
    n = len(g)
    a = np.array(g, dtype=float)
    r = np.linalg.cholesky(a).T
    out = []
    x = [0] * n
    tol = 1e-9 * max(1.0, bound)

    def rec(i, rem, shift):
        if i < 0:
            for c0 in x:
                if c0:
                    if c0 > 0:
                        out.append(tuple(x))
                        if len(out) > _ENUM_CAP:
                            raise ResourceBudgetExceeded(
                                "short-vector enumeration exceeded the cap")
                    return
            return
        rt = math.sqrt(max(rem, 0.0))
        rii = r[i][i]
        lo = math.ceil((-rt - shift[i]) / rii - 1e-9)
        hi = math.floor((rt - shift[i]) / rii + 1e-9)
        for xi in range(lo, hi + 1):
            t = rii * xi + shift[i]
            rem2 = rem - t * t
            if rem2 < -tol:
                continue
            x[i] = xi
            ns = list(shift)
            for j in range(i):
                ns[j] += r[j][i] * xi
            rec(i - 1, max(rem2, 0.0), ns)
        x[i] = 0

    rec(n - 1, bound * (1 + 1e-12) + 1e-12, [0.0] * n)
    return out


def _short_vectors(g, bound: float):
    """Short vectors in original coordinates via reduction then enumeration."""
    n = len(g)
    u = _lll_gram(g)
    gr = _conjugate(u, g)
    out = set()
    for y in _enumerate_upto(gr, bound):
        v = [sum(y[i] * u[i][j] for i in range(n)) for j in range(n)]
        for c0 in v:
            if c0:
                if c0 < 0:
                    v = [-t for t in v]
                break
        out.add(tuple(v))
    return sorted(out)


def _full_rank(rows) -> bool:
    """True when the integer rows are linearly independent."""
    return gcd_of_minors(rows, len(rows)) != 0


def _minima_once(g):
    """Successive minima of the midpoint Gram by reduction + enumeration."""
    n = len(g)
    u = _lll_gram(g)
    gr = _conjugate(u, g)
    bound = max(gr[i][i] for i in range(n))
    a = np.array(g, dtype=float)

    def q(v):
        w = np.array(v, dtype=float)
        return float(w @ a @ w)

    vecs = []
    for y in _enumerate_upto(gr, bound):
        v = tuple(sum(y[i] * u[i][j] for i in range(n)) for j in range(n))
        vecs.append(v)
    vecs.sort(key=lambda v: (q(v), v))
    lams, wits, rows = [], [], []
    for v in vecs:
        if _full_rank(rows + [list(v)]):
            rows.append(list(v))
            wits.append(v)
            lams.append(math.sqrt(q(v)))
            if len(lams) == n:
                break
    if len(lams) < n:
        raise PrecisionExhausted("enumeration missed independent vectors")
    return lams, wits


def successive_minima(lat: MinkLattice) -> MinimaProfile:
    """Certified successive minima (lengths) of the lattice.

    Ring-backed lattices are recomputed at doubled working precision and
    every length must agree to relative 1e-9, else PrecisionExhausted.
    Raw Gram input is taken as exact.  ``p`` is filled only for a ring
    source with |disc| >= 2.
    """
    lams, wits = _minima_once(lat.gram)
    disc = None
    if lat.source is not None:
        disc = ring_disc(lat.source)
        lat2 = gram(lat.source, dps=2 * (lat.dps or _DPS_DEFAULT))
        lams2, _ = _minima_once(lat2.gram)
        for a, b in zip(lams, lams2):
            if abs(a - b) > _CERT_REL * max(abs(a), abs(b)):
                raise PrecisionExhausted("minima changed under doubled precision")
    p = None
    if disc is not None and abs(disc) >= 2:
        logd = math.log(abs(disc))
        p = tuple(math.log(lam) / logd for lam in lams[1:])
    return MinimaProfile(disc=disc, lams=tuple(lams), vectors=tuple(wits), p=p)


def profile(ring: Ring, dps: int = _DPS_DEFAULT) -> MinimaProfile:
    """Minima profile p_i = ln(lambda_i) / ln|disc| of a ring lattice."""
    d = ring_disc(ring)
    if d == 0:
        raise DegenerateDiscriminant("profile needs a nonzero discriminant")
    if abs(d) == 1:
        raise UnitDiscriminant("profile needs |disc| >= 2 for the log base")
    return successive_minima(gram(ring, dps=dps))


def is_close(prof, target, eps: float, x: float) -> bool:
    """True iff max_i |p_i - target_i| <= eps / ln(X) (closed condition).

    ``prof`` may be a MinimaProfile (its ``p`` is used) or a bare
    sequence of profile coordinates.
    """
    p = prof.p if isinstance(prof, MinimaProfile) else tuple(prof)
    if p is None:
        raise DimensionMismatch("profile has no p coordinates")
    target = tuple(target)
    if len(p) != len(target):
        raise DimensionMismatch("profile and target lengths differ")
    if x <= 1:
        raise ValueError("closeness scale X must exceed 1")
    return max(abs(a - b) for a, b in zip(p, target)) <= eps / math.log(x)


def dual_minima(lat: MinkLattice) -> tuple:
    """Successive minima of the dual lattice (inverse Gram)."""
    ginv = np.linalg.inv(np.array(lat.gram, dtype=float))
    ginv = (ginv + ginv.T) / 2
    lams, _ = _minima_once(tuple(map(tuple, ginv)))
    return tuple(lams)


def minkowski_reduced_basis(lat: MinkLattice) -> tuple:
    """Greedy lexicographically-least reduced basis of the lattice.

    b_k is the shortest vector (ties broken deterministically, favoring
    support on earlier coordinates) such that b_1..b_k extends to a
    basis, tested by gcd of the k x k minors being 1.  Candidates are
    all vectors of length at most twice the largest successive minimum,
    which is exhaustive for the small ranks supported here.
    """
    n = lat.rank
    g = lat.gram
    lams, _ = _minima_once(g)
    vecs = _short_vectors(g, (2 * lams[-1]) ** 2 * (1 + 1e-9))
    a = np.array(g, dtype=float)

    def q(v):
        w = np.array(v, dtype=float)
        return float(w @ a @ w)

    ranked = sorted(vecs, key=lambda v: (q(v), tuple(-c for c in v)))
    rows = []
    for k in range(n):
        for v in ranked:
            if any(tuple(r) == v for r in rows):
                continue
            if gcd_of_minors(rows + [list(v)], k + 1) == 1:
                rows.append(list(v))
                break
        else:
            raise PrecisionExhausted("no extendable vector within the bound")
    return tuple(tuple(r) for r in rows)


_BOUND_REL = 1e-9


def check_bound_system(a, p, c: float, x: float):
    """Evaluate a weighted bound system at scale X with constant C.

    hypothesis: a_i^2 <= C * max_j X^(2 p_i - p_j) * a_j  for every i
    conclusion: a_i <= C * X^(p_i)                        for every i

    Returns (hypothesis_holds, conclusion_holds); comparisons carry a
    relative slack of 1e-9 so boundary instances evaluate closed.
    """
    a = [float(v) for v in a]
    p = [float(v) for v in p]
    if len(a) != len(p):
        raise DimensionMismatch("value and exponent lengths differ")
    hyp = all(
        ai ** 2 <= (1 + _BOUND_REL) * c * max(
            x ** (2 * pi - pj) * aj for pj, aj in zip(p, a))
        for ai, pi in zip(a, p))
    con = all(ai <= (1 + _BOUND_REL) * c * x ** pi for ai, pi in zip(a, p))
    return hyp, con


def has_cycle(graph) -> bool:
    """True when the directed graph has a cycle.

    ``graph`` maps each node to an iterable of successors; successors
    that are not keys are treated as sinks.
    """
    color = {v: 0 for v in graph}
    for start in graph:
        if color[start]:
            continue
        stack = [(start, iter(graph.get(start, ())))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                continue
            if nxt not in color:
                color[nxt] = 2
                continue
            if color[nxt] == 1:
                return True
            if color[nxt] == 0:
                color[nxt] = 1
                stack.append((nxt, iter(graph.get(nxt, ()))))
    return False


def unit_ball_volume(n: int) -> float:
    """Volume of the n-dimensional Euclidean unit ball."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def ring_fingerprint(ring: Ring, dps: int = _DPS_DEFAULT) -> tuple:
    """Isomorphism-invariant summary of a nondegenerate ring.

    Returns (discriminant, rounded minima lengths, sorted multiset of
    characteristic polynomials of all lattice vectors no longer than
    the last minimum).  A ring isomorphism is an isometry for q and
    preserves characteristic polynomials, so isomorphic rings get equal
    fingerprints; the converse is a useful heuristic, not a theorem.
    """
    lat = gram(ring, dps=dps)
    prof = successive_minima(lat)
    bound = prof.lams[-1] ** 2 * (1 + 1e-9)
    polys = []
    for v in _short_vectors(lat.gram, bound):
        for sv in (v, tuple(-c for c in v)):
            polys.append(_charpoly_coeffs(ring.mult_matrix(sv)))
    return (ring_disc(ring), tuple(round(l, 6) for l in prof.lams),
            tuple(sorted(polys)))
