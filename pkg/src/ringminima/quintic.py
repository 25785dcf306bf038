"""Quadruples of alternating 5x5 integer matrices and quintic boxes.

A quadruple T = (A_1, ..., A_4) of alternating integer 5x5 matrices is
stored by its strict upper triangles (four blocks of ten integers).
Binary quintic forms embed into such quadruples; the coefficient box at
a 9-coordinate point (p_1..p_4, q_1..q_5) bounds slot (k, i, j) by
X^(1/2 + p_{5-k} - q_{6-i} - q_{6-j}).  Ring data on the quintic side
flows through the closed-form rank-n construction applied to the form
itself; quadruples are never converted back into rings here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import minima
from .errors import DegenerateDiscriminant, DimensionMismatch, InvalidPoint
from .exact import le_power
from .forms import BinaryForm
from .rings import ring_from_form

_SLOTS = ((1, 2), (1, 3), (1, 4), (1, 5), (2, 3),
          (2, 4), (2, 5), (3, 4), (3, 5), (4, 5))
_SLOT_POS = {s: n for n, s in enumerate(_SLOTS)}


@dataclass(frozen=True)
class AltTensor:
    """Four alternating 5x5 integer matrices, strict upper triangles
    in slot order (1,2),(1,3),...,(4,5)."""

    blocks: tuple

    def __post_init__(self):
        try:
            blocks = tuple(tuple(int(v) for v in blk) for blk in self.blocks)
        except TypeError as e:
            raise DimensionMismatch("blocks must be four rows of ten") from e
        if len(blocks) != 4 or any(len(b) != 10 for b in blocks):
            raise DimensionMismatch("need 4 blocks of 10 integers")
        object.__setattr__(self, "blocks", blocks)

    def entry(self, k: int, i: int, j: int) -> int:
        """a^k_{ij} with the alternating completion (1-based indices)."""
        if not (1 <= k <= 4 and 1 <= i <= 5 and 1 <= j <= 5):
            raise DimensionMismatch("k in 1..4, i and j in 1..5")
        if i == j:
            return 0
        if i < j:
            return self.blocks[k - 1][_SLOT_POS[(i, j)]]
        return -self.blocks[k - 1][_SLOT_POS[(j, i)]]

    def matrix(self, k: int) -> tuple:
        """Full 5x5 alternating matrix number k (1-based)."""
        return tuple(tuple(self.entry(k, i, j) for j in range(1, 6))
                     for i in range(1, 6))

    def serialize(self) -> tuple:
        """Flat 40-tuple: block-major, slots in lexicographic order."""
        return tuple(v for blk in self.blocks for v in blk)


def tensor_from_flat(values) -> AltTensor:
    vals = tuple(int(v) for v in values)
    if len(vals) != 40:
        raise DimensionMismatch("need 40 integers")
    return AltTensor(tuple(vals[10 * k:10 * k + 10] for k in range(4)))


def psi_binary_quintic(f) -> AltTensor:
    """Embed a binary quintic (f0, ..., f5) into a quadruple.

    Fixed entries: a1_23 = -1, a2_13 = a2_24 = 1, a3_14 = a3_25 = -1,
    a4_15 = 1.  Coefficient slots: a1_45 = -f5; a2_35 = -f3,
    a2_45 = -f4; a3_34 = -f1, a3_35 = -f2; a4_34 = -f0.
    """
    c = f.coeffs if isinstance(f, BinaryForm) else tuple(f)
    if len(c) != 6:
        raise DimensionMismatch("binary quintic needs six coefficients")
    blocks = [[0] * 10 for _ in range(4)]

    def put(k, i, j, v):
        blocks[k - 1][_SLOT_POS[(i, j)]] = v

    put(1, 2, 3, -1)
    put(1, 4, 5, -c[5])
    put(2, 1, 3, 1)
    put(2, 2, 4, 1)
    put(2, 3, 5, -c[3])
    put(2, 4, 5, -c[4])
    put(3, 1, 4, -1)
    put(3, 2, 5, -1)
    put(3, 3, 4, -c[1])
    put(3, 3, 5, -c[2])
    put(4, 1, 5, 1)
    put(4, 3, 4, -c[0])
    return AltTensor(tuple(tuple(b) for b in blocks))


def tensor_action(tensor: AltTensor, g4, g5) -> AltTensor:
    """Action of (g4, g5): A_k -> sum_l (g4)_{kl} g5 A_l g5^T.

    Integer matrices in, integer quadruple out (alternation is
    preserved by congruence)."""
    mats = [tensor.matrix(k) for k in range(1, 5)]
    conj = []
    for m in mats:
        out = [[0] * 5 for _ in range(5)]
        for i in range(5):
            for j in range(5):
                out[i][j] = sum(g5[i][a] * m[a][b] * g5[j][b]
                                for a in range(5) for b in range(5))
        conj.append(out)
    blocks = []
    for k in range(4):
        row = []
        for (i, j) in _SLOTS:
            row.append(sum(g4[k][l] * conj[l][i - 1][j - 1] for l in range(4)))
        blocks.append(tuple(row))
    return AltTensor(tuple(blocks))


def quintic_point_valid(p) -> bool:
    """Membership in the base quintic polytope constraints: ordered
    nonnegative p with sum 1/2, ordered nonnegative q with sum 3/2."""
    if len(p) != 9:
        return False
    ps = [Fraction(v) for v in p[:4]]
    qs = [Fraction(v) for v in p[4:]]
    if sum(ps) != Fraction(1, 2) or sum(qs) != Fraction(3, 2):
        return False
    if any(v < 0 for v in ps + qs):
        return False
    return all(a <= b for a, b in zip(ps, ps[1:])) and \
        all(a <= b for a, b in zip(qs, qs[1:]))


def tensor_box_exponent(point, k: int, i: int, j: int) -> Fraction:
    """Box exponent 1/2 + p_{5-k} - q_{6-i} - q_{6-j} at a 9-point."""
    ps = [Fraction(v) for v in point[:4]]
    qs = [Fraction(v) for v in point[4:]]
    return Fraction(1, 2) + ps[4 - k] - qs[5 - i] - qs[5 - j]


def tensor_in_box(tensor: AltTensor, point, x, slack: int = 1) -> bool:
    """Exact closed-box membership: |a^k_{ij}| <= slack * X^e(k,i,j).

    slack = 1 is the box itself; a larger integer slack widens every
    slot by that constant, which is how constant-bounded entries on
    negative-exponent slots are accommodated.  Raises InvalidPoint for
    points outside the base polytope constraints.
    """
    if not quintic_point_valid(point):
        raise InvalidPoint("expected ordered 9-point with sums 1/2 and 3/2")
    if slack < 1:
        raise ValueError("slack must be a positive integer")
    for k in range(1, 5):
        for (i, j) in _SLOTS:
            e = tensor_box_exponent(point, k, i, j)
            if not le_power(Fraction(tensor.entry(k, i, j), slack), x, e):
                return False
    return True


def quintic_ring_side(f, dps: int = 30) -> minima.MinimaProfile:
    """Minima profile of the rank-5 ring built from a binary quintic.

    Only the quintic-ring half of the 9-coordinate correspondence is
    computed; the sextic resolvent side is out of scope here.
    """
    form = f if isinstance(f, BinaryForm) else BinaryForm(tuple(f))
    if form.degree != 5:
        raise DimensionMismatch("binary quintic expected")
    if form.disc() == 0:
        raise DegenerateDiscriminant("quintic form has zero discriminant")
    ring = ring_from_form(form)
    return minima.profile(ring, dps=dps)
