"""Exact integer cyclic convolution via a number-theoretic transform.

The incidence counts produced by convolving set indicators are plain
integers, so the transform must be exact; floating-point FFTs are not
usable here.  We work in the prime field mod Q = 15 * 2**27 + 1
(= 2013265921, primitive root 31), which supports power-of-two transform
lengths up to 2**27.  True convolution values are bounded by the set
size n < Q, so reducing mod Q loses nothing and the results are exact.

Products of two residues below Q < 2**31 fit in int64, which lets the
butterflies run vectorized on numpy int64 arrays with explicit mod steps.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

NTT_PRIME = 2013265921  # 15 * 2**27 + 1
NTT_ROOT = 31
_MAX_LOG2 = 27


@lru_cache(maxsize=None)
def _bit_reversal(log2n: int) -> np.ndarray:
    rev = np.zeros(1, dtype=np.int64)
    for _ in range(log2n):
        rev = np.concatenate([rev * 2, rev * 2 + 1])
    return rev


@lru_cache(maxsize=None)
def _twiddles(log2n: int, inverse: bool):
    """Per-level twiddle tables w_s**k, s = 2**level, k < s/2."""
    q = NTT_PRIME
    tables = []
    for level in range(1, log2n + 1):
        s = 1 << level
        w = pow(NTT_ROOT, (q - 1) // s, q)
        if inverse:
            w = pow(w, q - 2, q)
        tw = np.empty(s // 2, dtype=np.int64)
        acc = 1
        for k in range(s // 2):
            tw[k] = acc
            acc = acc * w % q
        tables.append(tw)
    return tables


def _transform(values: np.ndarray, inverse: bool) -> np.ndarray:
    q = NTT_PRIME
    n = len(values)
    log2n = n.bit_length() - 1
    if 1 << log2n != n or log2n > _MAX_LOG2:
        raise ValueError(f"transform length {n} not a power of two <= 2**{_MAX_LOG2}")
    a = values[_bit_reversal(log2n)].astype(np.int64) % q
    for level, tw in enumerate(_twiddles(log2n, inverse), start=1):
        s = 1 << level
        blocks = a.reshape(-1, s)
        even = blocks[:, : s // 2]
        odd = blocks[:, s // 2:]
        t = odd * tw[None, :] % q
        upper = (even + t) % q
        lower = (even - t) % q
        blocks[:, : s // 2] = upper
        blocks[:, s // 2:] = lower
    if inverse:
        n_inv = pow(n, q - 2, q)
        a = a * n_inv % q
    return a


def ntt(values: np.ndarray) -> np.ndarray:
    """Forward transform of an int64 array of power-of-two length."""
    return _transform(values, inverse=False)


def intt(values: np.ndarray) -> np.ndarray:
    """Inverse transform; intt(ntt(x)) == x mod Q."""
    return _transform(values, inverse=True)


def conv_length(p: int) -> int:
    """Transform length used for cyclic convolution mod x**p - 1."""
    need = 2 * p - 1
    return 1 << (need - 1).bit_length()


def cyclic_convolve(f: np.ndarray, g: np.ndarray, p: int) -> np.ndarray:
    """Exact cyclic convolution of two length-p nonnegative integer vectors.

    Entry b of the result is sum over u+v = b (mod p) of f[u] * g[v].
    All true output values must be < NTT_PRIME for exactness; incidence
    profiles satisfy this because counts never exceed the set size.
    """
    if len(f) != p or len(g) != p:
        raise ValueError("inputs must have length p")
    length = conv_length(p)
    fa = np.zeros(length, dtype=np.int64)
    ga = np.zeros(length, dtype=np.int64)
    fa[:p] = f
    ga[:p] = g
    fw = ntt(fa)
    lin = intt(fw * ntt(ga) % NTT_PRIME)
    out = lin[:p].copy()
    out[: p - 1] += lin[p: 2 * p - 1]
    return out


def forward_padded(f: np.ndarray, p: int) -> np.ndarray:
    """Precompute ntt of a zero-padded length-p vector for reuse."""
    length = conv_length(p)
    fa = np.zeros(length, dtype=np.int64)
    fa[:p] = f
    return ntt(fa)


def convolve_with_transform(fw: np.ndarray, g: np.ndarray, p: int) -> np.ndarray:
    """Cyclic convolution where the first factor's transform is prebuilt."""
    length = conv_length(p)
    ga = np.zeros(length, dtype=np.int64)
    ga[:p] = g
    lin = intt(fw * ntt(ga) % NTT_PRIME)
    out = lin[:p].copy()
    out[: p - 1] += lin[p: 2 * p - 1]
    return out