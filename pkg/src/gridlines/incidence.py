"""Line enumeration, incidence counting, and exact moment computation.

For a subset A of the prime field, the point set is the grid A x A and
the line family is all p**2 + p affine lines: Sloped(m, b) is
y = m*x + b and Vertical(c) is x = c.  The incidence count i(line) is
the number of grid points on the line.  The histogram maps each
incidence value k >= 1 to the number of lines attaining it; lines that
miss the grid entirely are only tracked through the derived zero_lines
count.

The power sums of the histogram are the central statistics:

    s1 = sum i(line)      = (p+1) * n**2        (every point on p+1 lines)
    s2 = sum i(line)**2   = n**4 + p * n**2     (second-moment identity)
    s3 = sum i(line)**3   = collinear triple count
    s4 = sum i(line)**4   = collinear quadruple count

Three build strategies produce bit-identical histograms:

    naive         iterate incidence_count over every line, Theta(p**2 n)
    slope_direct  per-slope residue tally of y - m*x, Theta(p n**2)
    slope_fast    per-slope exact cyclic convolution, Theta(p**2 log p)

slope_direct and slope_fast group work per slope and add the vertical
family at the end; per-slope results merge by plain addition of sparse
counts, so slopes may be processed in any order or concurrently.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, Optional, Union

import numpy as np

from . import ntt
from .errors import InvalidParameter, ModulusMismatch
from .fieldsets import FieldSubset

logger = logging.getLogger(__name__)


@lru_cache(maxsize=128)
def _members(A: FieldSubset) -> frozenset:
    return frozenset(A.elements)

STRATEGIES = ("naive", "slope_direct", "slope_fast")

# Dense per-slope buffers are p entries; cap keeps them under ~128 MiB.
ENGINE_MAX_P = 1 << 24

# Target element count per vectorized chunk of slopes; sized so chunk
# buffers stay cache-resident (larger chunks go memory-bandwidth bound).
_CHUNK_TARGET = 1 << 17


@dataclass(frozen=True)
class Sloped:
    """Line y = m*x + b."""

    m: int
    b: int


@dataclass(frozen=True)
class Vertical:
    """Line x = c."""

    c: int


Line = Union[Sloped, Vertical]


def all_lines(p: int) -> Iterator[Line]:
    """All p**2 + p affine lines, sloped first."""
    for m in range(p):
        for b in range(p):
            yield Sloped(m, b)
    for c in range(p):
        yield Vertical(c)


def _check_coeff(value: int, p: int, name: str) -> None:
    if not 0 <= value < p:
        raise ModulusMismatch(f"line {name} {value} is not a residue mod {p}")


def incidence_count(A: FieldSubset, line: Line) -> int:
    """Number of points of A x A on the line."""
    p = A.p
    members = _members(A)
    if isinstance(line, Vertical):
        _check_coeff(line.c, p, "offset")
        return A.n if line.c in members else 0
    _check_coeff(line.m, p, "slope")
    _check_coeff(line.b, p, "intercept")
    m, b = line.m, line.b
    return sum(1 for x in A.elements if (m * x + b) % p in members)


def slope_profile(A: FieldSubset, m: int, strategy: str = "direct") -> np.ndarray:
    """Incidence counts of all p lines with slope m, indexed by intercept.

    Entry b is i(Sloped(m, b)); equivalently the number of pairs
    (x, y) in A x A with y - m*x = b mod p.  Both strategies are exact
    and agree entrywise.
    """
    p = A.p
    _check_coeff(m, p, "slope")
    if p > ENGINE_MAX_P:
        raise InvalidParameter(f"slope_profile supports p <= {ENGINE_MAX_P}")
    elems = np.asarray(A.elements, dtype=np.int64)
    if strategy == "direct":
        if A.n == 0:
            return np.zeros(p, dtype=np.int64)
        slots = (elems[:, None] - (m * elems)[None, :] % p) % p
        return np.bincount(slots.ravel(), minlength=p)
    if strategy == "fast_convolution":
        f = np.zeros(p, dtype=np.int64)
        f[elems] = 1
        g = np.bincount((-(m * elems)) % p, minlength=p).astype(np.int64)
        return ntt.cyclic_convolve(f, g, p)
    raise InvalidParameter(f"unknown slope_profile strategy {strategy!r}")


@dataclass(frozen=True)
class IncidenceHistogram:
    """Sparse histogram of incidence values over all p**2 + p lines."""

    p: int
    n: int
    counts: Dict[int, int]

    @property
    def zero_lines(self) -> int:
        return self.p * self.p + self.p - sum(self.counts.values())

    @property
    def max_incidence(self) -> int:
        return max(self.counts) if self.counts else 0

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "counts": {str(k): self.counts[k] for k in sorted(self.counts)},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "IncidenceHistogram":
        counts = {int(k): int(v) for k, v in data["counts"].items()}
        return cls(int(data["p"]), int(data["n"]), counts)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    def to_csv(self) -> str:
        lines = ["k,lines"]
        lines.extend(f"{k},{self.counts[k]}" for k in sorted(self.counts))
        return "\n".join(lines) + "\n"


def merge_counts(*parts: Dict[int, int]) -> Dict[int, int]:
    """Add sparse count maps; associative and commutative."""
    out: Dict[int, int] = {}
    for part in parts:
        for k, v in part.items():
            out[k] = out.get(k, 0) + v
    return out


@dataclass(frozen=True)
class MomentSet:
    """Exact power sums of the incidence function (Python ints, no overflow)."""

    s1: int
    s2: int
    s3: int
    s4: int

    @property
    def t(self) -> int:
        """Collinear triple count."""
        return self.s3

    @property
    def q(self) -> int:
        """Collinear quadruple count."""
        return self.s4


def moments(h: IncidenceHistogram) -> MomentSet:
    """Power sums s_r = sum_k k**r * counts[k] for r = 1..4."""
    s1 = s2 = s3 = s4 = 0
    for k, c in h.counts.items():
        k2 = k * k
        s1 += k * c
        s2 += k2 * c
        s3 += k2 * k * c
        s4 += k2 * k2 * c
    return MomentSet(s1, s2, s3, s4)


def default_strategy(p: int, n: int) -> str:
    """slope_direct while n**2 <= p*log2(p), else slope_fast."""
    if n * n <= p * max(p.bit_length() - 1, 1):
        return "slope_direct"
    return "slope_fast"


def incidence_histogram(A: FieldSubset, strategy: Optional[str] = None) -> IncidenceHistogram:
    """Histogram of i(line) over all p**2 + p lines of the plane."""
    p, n = A.p, A.n
    if strategy is None:
        strategy = default_strategy(p, n)
        logger.info("histogram strategy auto-selected: %s (p=%d, n=%d)", strategy, p, n)
    if strategy not in STRATEGIES:
        raise InvalidParameter(f"unknown histogram strategy {strategy!r}")
    if strategy != "naive" and p > ENGINE_MAX_P:
        raise InvalidParameter(f"slope strategies support p <= {ENGINE_MAX_P}")
    if n == 0:
        return IncidenceHistogram(p, 0, {})
    if strategy == "naive":
        tally: Dict[int, int] = {}
        for line in all_lines(p):
            k = incidence_count(A, line)
            if k:
                tally[k] = tally.get(k, 0) + 1
        return IncidenceHistogram(p, n, tally)

    # counts-of-counts accumulator over k = 0..n; index 0 is discarded.
    acc = np.zeros(n + 1, dtype=np.int64)
    if strategy == "slope_direct":
        _tally_slopes_direct(A, acc)
    else:
        _tally_slopes_fast(A, acc)
    counts = {int(k): int(acc[k]) for k in range(1, n + 1) if acc[k]}
    # Vertical family: n lines meet a full column, p - n miss the grid.
    counts[n] = counts.get(n, 0) + n
    return IncidenceHistogram(p, n, counts)


def _tally_slopes_direct(A: FieldSubset, acc: np.ndarray) -> None:
    """Tally per-slope intercept profiles by direct residue counting.

    Slopes are processed in vectorized chunks keyed by (slope offset,
    residue).  When the field is much larger than the grid (p > 2 n**2)
    almost all intercepts are empty, so instead of a dense per-slope
    bincount the keys are sorted and run lengths counted, keeping the
    cost proportional to p * n**2 rather than p**2.
    """
    p, n = A.p, A.n
    sparse = p > 2 * n * n
    chunk = max(1, min(p, _CHUNK_TARGET // max(n * n, p if not sparse else 1)))
    # int32 pipeline once slope*element products and chunk keys both fit;
    # halves memory traffic on the hot path.
    narrow = p <= 46000 and chunk * p < 2 ** 31
    dtype = np.int32 if narrow else np.int64
    elems = np.asarray(A.elements, dtype=dtype)
    for start in range(0, p, chunk):
        ms = np.arange(start, min(start + chunk, p), dtype=dtype)
        c = len(ms)
        mx = ms[:, None] * elems[None, :] % dtype(p)          # (c, n)
        slots = (elems[None, None, :] - mx[:, :, None]) % dtype(p)  # (c, n, n)
        keys = slots + (np.arange(c, dtype=dtype) * dtype(p))[:, None, None]
        if sparse:
            # Rows cover disjoint key ranges, so per-row sorting makes
            # the flattened array globally sorted.
            flat = np.sort(keys.reshape(c, -1), axis=1).ravel()
            step = np.flatnonzero(flat[1:] != flat[:-1])
            edges = np.concatenate(([-1], step, [flat.size - 1]))
            lengths = np.diff(edges)
            acc_part = np.bincount(lengths, minlength=len(acc))
        else:
            profiles = np.bincount(keys.ravel(), minlength=c * p)
            acc_part = np.bincount(profiles, minlength=len(acc))
        acc += acc_part[: len(acc)]
        # run lengths / profiles never exceed n, so nothing is truncated.


def _tally_slopes_fast(A: FieldSubset, acc: np.ndarray) -> None:
    """Tally per-slope profiles via exact cyclic convolution.

    The indicator of A (as y-values) is transformed once; each slope m
    contributes the convolution with the indicator of {-m*x : x in A}.
    """
    p = A.p
    elems = np.asarray(A.elements, dtype=np.int64)
    f = np.zeros(p, dtype=np.int64)
    f[elems] = 1
    fw = ntt.forward_padded(f, p)
    for m in range(p):
        g = np.bincount((-(m * elems)) % p, minlength=p).astype(np.int64)
        profile = ntt.convolve_with_transform(fw, g, p)
        acc += np.bincount(profile, minlength=len(acc))[: len(acc)]
