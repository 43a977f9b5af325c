"""Prime moduli, subsets of the prime field, and the set generators.

A FieldSubset is a canonical (sorted, duplicate-free) subset of
{0, ..., p-1} together with a provenance string recording how it was
built.  Provenance strings use the same grammar the CLI accepts:

    list:1,2,3            explicit elements
    bernoulli:Q[:SEED]    each residue kept independently with probability Q
    uniform:N[:SEED]      uniformly random N-subset
    interval:START:LEN    {start, start+1, ...} mod p
    ap:START:STEP:LEN     arithmetic progression mod p
    gp:START:RATIO:LEN    geometric progression mod p
    paper-interval        {1, ..., isqrt(p) // 2}

Q may be a decimal ("0.3") or a fraction ("3/10"); it is handled as an
exact rational.  SEED is optional for the random families; when omitted,
the run-level seed supplied by the harness is used.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateSet,
    DescriptorError,
    DuplicateElement,
    EvenCharacteristic,
    InvalidDensity,
    InvalidParameter,
    LengthExceedsField,
    NotPrime,
    ZeroInverse,
)
from .rng import MASK64, SplitMix64, splitmix64_stream

MODULUS_CAP = 1 << 63

# Witnesses proving Miller-Rabin deterministic for n < 3.3 * 10**24,
# which covers the 2**63 modulus cap.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Residues drawn per block when materializing Bernoulli sets.
_BERNOULLI_CHUNK = 1 << 20


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """An odd prime p; the ambient field is the integers mod p."""

    p: int

    def __post_init__(self):
        if self.p == 2:
            raise EvenCharacteristic("p = 2: field must have odd characteristic")
        if self.p < 3 or self.p >= MODULUS_CAP:
            raise InvalidParameter(f"modulus must be in [3, 2**63), got {self.p}")
        if not _is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")

    @property
    def line_count(self) -> int:
        """Number of affine lines: p**2 sloped plus p vertical."""
        return self.p * self.p + self.p


def validate_prime(n: int) -> PrimeModulus:
    """Validate n as an odd prime and wrap it."""
    return PrimeModulus(int(n))


def mod_inv(x: int, m: PrimeModulus) -> int:
    """Multiplicative inverse of x mod p; x must be a nonzero residue."""
    if not 0 <= x < m.p:
        raise InvalidParameter(f"{x} is not a residue mod {m.p}")
    if x == 0:
        raise ZeroInverse("0 has no multiplicative inverse")
    return pow(x, -1, m.p)


@dataclass(frozen=True)
class FieldSubset:
    """A subset A of {0, ..., p-1} in canonical sorted form."""

    modulus: PrimeModulus
    elements: tuple
    provenance: str

    def __post_init__(self):
        p = self.modulus.p
        prev = -1
        for e in self.elements:
            if e == prev:
                raise DuplicateElement(f"duplicate element {e}")
            if e < prev:
                raise InvalidParameter("elements must be strictly increasing")
            if not 0 <= e < p:
                raise InvalidParameter(f"element {e} outside [0, {p})")
            prev = e

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def p(self) -> int:
        return self.modulus.p

    def __contains__(self, x: int) -> bool:
        i = bisect_left(self.elements, x)
        return i < len(self.elements) and self.elements[i] == x


def _canonical(m: PrimeModulus, items: Iterable[int], provenance: str) -> FieldSubset:
    elems = sorted(items)
    for a, b in zip(elems, elems[1:]):
        if a == b:
            raise DuplicateElement(f"duplicate element {a}")
    return FieldSubset(m, tuple(elems), provenance)


def from_list(m: PrimeModulus, items: Sequence[int]) -> FieldSubset:
    """Explicit set; rejects duplicates and out-of-range elements."""
    return _canonical(m, [int(x) for x in items],
                      "list:" + ",".join(str(x) for x in sorted(items)))


def gen_bernoulli(m: PrimeModulus, q, seed: int) -> FieldSubset:
    """Keep each residue independently with probability q (exact rational).

    Residue r is kept iff the r-th SplitMix64 output of `seed` is below
    floor(q * 2**64); the realized inclusion probability is within 2**-64
    of q, and exactly q when q * 2**64 is an integer (e.g. q = 1).
    """
    q = Fraction(q)
    if not 0 < q <= 1:
        raise InvalidDensity(f"density {q} outside (0, 1]")
    p = m.p
    threshold = (q.numerator << 64) // q.denominator
    elems = []
    chunk = _BERNOULLI_CHUNK
    for start in range(0, p, chunk):
        count = min(chunk, p - start)
        if threshold > MASK64:
            elems.extend(range(start, start + count))
        else:
            draws = splitmix64_stream(seed, count, offset=start)
            kept = np.flatnonzero(draws < np.uint64(threshold))
            elems.extend(int(start + i) for i in kept)
    prov = f"bernoulli:{_fmt_density(q)}:{seed}"
    return FieldSubset(m, tuple(elems), prov)


def _fmt_density(q: Fraction) -> str:
    # Prefer the short decimal form when exact, else num/den.
    f = float(q)
    if Fraction(str(f)) == q:
        return str(f)
    return f"{q.numerator}/{q.denominator}"


def gen_uniform(m: PrimeModulus, n: int, seed: int) -> FieldSubset:
    """Uniformly random n-subset of the field, seeded and reproducible.

    Samples distinct residues by rejection on the smaller of the subset
    and its complement, so memory stays O(n) even for large p.
    """
    p = m.p
    if n < 0:
        raise InvalidParameter("size must be nonnegative")
    if n > p:
        raise LengthExceedsField(f"size {n} exceeds field size {p}")
    rng = SplitMix64(seed)
    k = min(n, p - n)
    chosen = set()
    while len(chosen) < k:
        chosen.add(rng.below(p))
    if k != n:
        elems = tuple(x for x in range(p) if x not in chosen)
    else:
        elems = tuple(sorted(chosen))
    return FieldSubset(m, elems, f"uniform:{n}:{seed}")


def gen_interval(m: PrimeModulus, start: int, length: int) -> FieldSubset:
    """{start, start+1, ..., start+length-1} reduced mod p."""
    p = m.p
    if length < 1:
        raise DegenerateSet("interval length must be at least 1")
    if length > p:
        raise LengthExceedsField(f"length {length} exceeds field size {p}")
    items = [(start + i) % p for i in range(length)]
    return _canonical(m, items, f"interval:{start % p}:{length}")


def gen_ap(m: PrimeModulus, start: int, step: int, length: int) -> FieldSubset:
    """Arithmetic progression start + i*step mod p, i < length."""
    p = m.p
    if length < 1:
        raise DegenerateSet("progression length must be at least 1")
    if length > p:
        raise LengthExceedsField(f"length {length} exceeds field size {p}")
    if step % p == 0 and length > 1:
        raise DuplicateElement("step 0 repeats the start element")
    items = [(start + i * step) % p for i in range(length)]
    return _canonical(m, items, f"ap:{start % p}:{step % p}:{length}")


def gen_gp(m: PrimeModulus, start: int, ratio: int, length: int) -> FieldSubset:
    """Geometric progression start * ratio**i mod p, i < length.

    ratio must not be 0 or 1 mod p, and start must be nonzero; a ratio of
    small multiplicative order still collides, which surfaces as
    DuplicateElement.
    """
    p = m.p
    if length < 1:
        raise DegenerateSet("progression length must be at least 1")
    if length > p:
        raise LengthExceedsField(f"length {length} exceeds field size {p}")
    if ratio % p in (0, 1):
        raise InvalidParameter("gp ratio must differ from 0 and 1 mod p")
    if start % p == 0:
        raise InvalidParameter("gp start must be nonzero mod p")
    items = []
    x = start % p
    for _ in range(length):
        items.append(x)
        x = x * ratio % p
    return _canonical(m, items, f"gp:{start % p}:{ratio % p}:{length}")


def gen_paper_interval(m: PrimeModulus) -> FieldSubset:
    """The interval {1, ..., isqrt(p) // 2} of size exactly isqrt(p) // 2."""
    top = isqrt(m.p) // 2
    if top < 1:
        raise DegenerateSet(f"p = {m.p} leaves no room for the interval")
    return FieldSubset(m, tuple(range(1, top + 1)), "paper-interval")


def gen_full_field(m: PrimeModulus) -> FieldSubset:
    """A = the whole field (the interval of length p)."""
    return FieldSubset(m, tuple(range(m.p)), f"interval:0:{m.p}")


@dataclass(frozen=True)
class SetSpec:
    """Parsed set descriptor; realize() builds the subset for a modulus.

    For the seeded families an explicit descriptor seed wins; otherwise
    the caller-supplied seed (e.g. the sweep's per-trial seed) is used.
    """

    family: str
    params: tuple
    seed: Optional[int] = None

    @property
    def is_random(self) -> bool:
        return self.family in ("bernoulli", "uniform")

    def realize(self, m: PrimeModulus, seed: Optional[int] = None) -> FieldSubset:
        eff_seed = self.seed if self.seed is not None else seed
        if self.is_random and eff_seed is None:
            raise InvalidParameter(
                f"family '{self.family}' needs a seed (give one in the "
                "descriptor or via --seed)")
        if self.family == "list":
            return from_list(m, list(self.params))
        if self.family == "bernoulli":
            return gen_bernoulli(m, self.params[0], eff_seed)
        if self.family == "uniform":
            return gen_uniform(m, self.params[0], eff_seed)
        if self.family == "interval":
            return gen_interval(m, *self.params)
        if self.family == "ap":
            return gen_ap(m, *self.params)
        if self.family == "gp":
            return gen_gp(m, *self.params)
        if self.family == "paper-interval":
            return gen_paper_interval(m)
        raise DescriptorError(f"unknown family '{self.family}'")


def _int_token(tok: str, what: str) -> int:
    try:
        return int(tok, 10)
    except ValueError:
        raise DescriptorError(f"bad {what} token {tok!r}: not an integer") from None


def parse_set_descriptor(text: str) -> SetSpec:
    """Parse the descriptor grammar documented in the module docstring."""
    text = text.strip()
    if not text:
        raise DescriptorError("empty set descriptor")
    head, _, rest = text.partition(":")
    if head == "paper-interval":
        if rest:
            raise DescriptorError(f"paper-interval takes no arguments, got {rest!r}")
        return SetSpec("paper-interval", ())
    if head == "list":
        if not rest:
            raise DescriptorError("list: needs at least one element")
        items = tuple(_int_token(t, "element") for t in rest.split(","))
        return SetSpec("list", items)
    parts = rest.split(":") if rest else []
    if head == "bernoulli":
        if len(parts) not in (1, 2):
            raise DescriptorError(f"bernoulli takes Q[:SEED], got {text!r}")
        try:
            q = Fraction(parts[0])
        except (ValueError, ZeroDivisionError):
            raise DescriptorError(f"bad density token {parts[0]!r}") from None
        seed = _int_token(parts[1], "seed") if len(parts) == 2 else None
        return SetSpec("bernoulli", (q,), seed)
    if head == "uniform":
        if len(parts) not in (1, 2):
            raise DescriptorError(f"uniform takes N[:SEED], got {text!r}")
        size = _int_token(parts[0], "size")
        seed = _int_token(parts[1], "seed") if len(parts) == 2 else None
        return SetSpec("uniform", (size,), seed)
    if head == "interval":
        if len(parts) != 2:
            raise DescriptorError(f"interval takes START:LEN, got {text!r}")
        return SetSpec("interval", (_int_token(parts[0], "start"),
                                    _int_token(parts[1], "length")))
    if head == "ap":
        if len(parts) != 3:
            raise DescriptorError(f"ap takes START:STEP:LEN, got {text!r}")
        return SetSpec("ap", tuple(_int_token(t, "ap parameter") for t in parts))
    if head == "gp":
        if len(parts) != 3:
            raise DescriptorError(f"gp takes START:RATIO:LEN, got {text!r}")
        return SetSpec("gp", tuple(_int_token(t, "gp parameter") for t in parts))
    raise DescriptorError(f"unknown set family {head!r}")
