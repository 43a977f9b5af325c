"""Brute-force collinearity oracles for certifying the incidence engine.

Everything here counts tuples of grid points directly, never touching
the line-enumeration machinery, so an agreement between t_brute /
q_brute and the engine's s3 / s4 is a genuine dual-path check.

Degenerate-tuple bookkeeping: the moment sums count the all-equal tuple
(u, u, ..., u) once per line through u, i.e. p + 1 times, while plain
tuple enumeration sees it once.  The oracles therefore enumerate tuples
that are NOT all equal (each lies on exactly one common line) and add
(p + 1) * n**2 for the all-equal family.

Costs are Theta(n**6) for triples and Theta(n**8) for quadruples, hence
the hard size caps; raise them only knowingly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CapExceeded
from .fieldsets import FieldSubset, mod_inv
from .incidence import incidence_histogram, moments

T_BRUTE_CAP = 8
Q_BRUTE_CAP = 6
ALGEBRAIC_CAP = 20

# numpy path needs determinant products to fit in int64
_NUMPY_P_LIMIT = 1 << 31


class Point(NamedTuple):
    x: int
    y: int


def collinear(u, v, w, p: int) -> bool:
    """True iff the three points share a line in the plane mod p.

    Uses the 2x2 determinant of (v - u, w - u); degenerate tuples with
    two equal points are collinear by convention (the determinant
    vanishes for them automatically).  Symmetric in its arguments.
    """
    det = (v[0] - u[0]) * (w[1] - u[1]) - (w[0] - u[0]) * (v[1] - u[1])
    return det % p == 0


def _grid(A: FieldSubset) -> list:
    return [Point(x, y) for x in A.elements for y in A.elements]


def _collinear_tensor(A: FieldSubset) -> np.ndarray:
    """Boolean tensor D[a, b, c] = collinearity of grid points a, b, c."""
    p = A.p
    pts = np.array([(x, y) for x in A.elements for y in A.elements], dtype=np.int64)
    xs, ys = pts[:, 0], pts[:, 1]
    dx = (xs[None, :] - xs[:, None]) % p   # dx[a, b] = x_b - x_a
    dy = (ys[None, :] - ys[:, None]) % p
    det = dx[:, :, None] * dy[:, None, :] - dx[:, None, :] * dy[:, :, None]
    return det % p == 0


def t_brute(A: FieldSubset, cap: int = T_BRUTE_CAP) -> int:
    """Collinear triple count by enumerating ordered point triples."""
    n, p = A.n, A.p
    if n > cap:
        raise CapExceeded(f"t_brute: n = {n} exceeds cap {cap}")
    if n == 0:
        return 0
    if p < _NUMPY_P_LIMIT:
        d = _collinear_tensor(A)
        not_all_equal = int(d.sum()) - n * n
    else:
        pts = _grid(A)
        not_all_equal = sum(
            collinear(u, v, w, p) for u in pts for v in pts for w in pts
        ) - n * n
    return not_all_equal + (p + 1) * n * n


def q_brute(A: FieldSubset, cap: int = Q_BRUTE_CAP) -> int:
    """Collinear quadruple count by enumerating ordered point quadruples.

    A not-all-equal quadruple lies on a common line iff every three of
    its four slots are collinear, which vectorizes as four broadcast
    lookups into the triple tensor.
    """
    n, p = A.n, A.p
    if n > cap:
        raise CapExceeded(f"q_brute: n = {n} exceeds cap {cap}")
    if n == 0:
        return 0
    if p < _NUMPY_P_LIMIT:
        d = _collinear_tensor(A)
        total = 0
        for a in range(n * n):
            da = d[a]
            block = (
                da[:, :, None]      # (a, b, c)
                & da[:, None, :]    # (a, b, d)
                & da[None, :, :]    # (a, c, d)
                & d                 # (b, c, d)
            )
            total += int(block.sum())
        not_all_equal = total - n * n
    else:
        pts = _grid(A)
        not_all_equal = -n * n
        for u in pts:
            for v in pts:
                for w in pts:
                    if not collinear(u, v, w, p):
                        continue
                    for z in pts:
                        if (
                            collinear(u, v, z, p)
                            and collinear(u, w, z, p)
                            and collinear(v, w, z, p)
                        ):
                            not_all_equal += 1
    return not_all_equal + (p + 1) * n * n


@dataclass(frozen=True)
class AlgebraicTripleCount:
    """Ratio-equation solution count and its reconciliation against s3."""

    count: int
    t_moment: int
    delta: int  # t_moment - 2*n**4 - count

    def delta_ratio(self, n: int) -> float:
        """|delta| / n**4, the measured reconciliation constant."""
        return abs(self.delta) / float(n ** 4) if n else 0.0


def algebraic_triple_count(A: FieldSubset, cap: int = ALGEBRAIC_CAP) -> AlgebraicTripleCount:
    """Count 6-tuples (a1..a6) in A**6 solving the slanted-triple equation

        (a1 - a2) / (a3 - a4) = (a1 - a5) / (a3 - a6) != 0,

    with a3 != a4, a3 != a6 (the nonzero ratio forces a1 != a2, a1 != a5).
    Grouping by (a1, a3) and tabulating the ratio over (a2, a4) pairs
    makes this Theta(n**4): the tuple count is the sum over ratios r of
    (number of pairs hitting r) squared.

    Also reports delta = s3 - 2*n**4 - count, the discrepancy against
    the engine's triple count after removing the two axis-parallel line
    families; the dominant degenerate term in delta is (p+1)*n**2.
    """
    n, p = A.n, A.p
    if n > cap:
        raise CapExceeded(f"algebraic_triple_count: n = {n} exceeds cap {cap}")
    m = A.modulus
    inv_cache: dict = {}
    count = 0
    for a1 in A.elements:
        for a3 in A.elements:
            ratios: dict = {}
            for a2 in A.elements:
                if a2 == a1:
                    continue
                num = (a1 - a2) % p
                for a4 in A.elements:
                    if a4 == a3:
                        continue
                    den = (a3 - a4) % p
                    d_inv = inv_cache.get(den)
                    if d_inv is None:
                        d_inv = inv_cache[den] = mod_inv(den, m)
                    r = num * d_inv % p
                    ratios[r] = ratios.get(r, 0) + 1
            count += sum(c * c for c in ratios.values())
    t = moments(incidence_histogram(A)).s3
    return AlgebraicTripleCount(count, t, t - 2 * n ** 4 - count)
