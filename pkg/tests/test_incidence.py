import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridlines.errors import InvalidParameter, ModulusMismatch
from gridlines.fieldsets import from_list, gen_full_field, gen_uniform, validate_prime
from gridlines.incidence import (
    IncidenceHistogram,
    Sloped,
    Vertical,
    all_lines,
    default_strategy,
    incidence_count,
    incidence_histogram,
    merge_counts,
    moments,
    slope_profile,
)
from gridlines.rng import SplitMix64

P5 = validate_prime(5)
UNIT_SQUARE = from_list(P5, [0, 1])

SMALL_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31]


def random_subset(p, seed, max_n=None):
    m = validate_prime(p)
    rng = SplitMix64(seed)
    n = rng.below(min(max_n or p, p) + 1)
    return gen_uniform(m, n, seed=rng.next_u64())


class TestIncidenceCount:
    def test_vertical_hand_case(self):
        assert incidence_count(UNIT_SQUARE, Vertical(0)) == 2
        assert incidence_count(UNIT_SQUARE, Vertical(2)) == 0

    def test_sloped_diagonal(self):
        # (0,0) and (1,1) lie on y = x
        assert incidence_count(UNIT_SQUARE, Sloped(1, 0)) == 2

    def test_full_field_every_line_has_p_points(self):
        A = gen_full_field(P5)
        for line in (Sloped(2, 3), Sloped(0, 0), Vertical(4)):
            assert incidence_count(A, line) == 5

    def test_modulus_mismatch(self):
        with pytest.raises(ModulusMismatch):
            incidence_count(UNIT_SQUARE, Vertical(7))
        with pytest.raises(ModulusMismatch):
            incidence_count(UNIT_SQUARE, Sloped(5, 0))


class TestSlopeProfile:
    def test_hand_case(self):
        assert list(slope_profile(UNIT_SQUARE, 0)) == [2, 2, 0, 0, 0]

    def test_full_field(self):
        A = gen_full_field(P5)
        for strat in ("direct", "fast_convolution"):
            assert list(slope_profile(A, 3, strat)) == [5] * 5

    def test_entries_match_incidence_count(self):
        A = from_list(validate_prime(11), [0, 2, 3, 7])
        for m in range(11):
            profile = slope_profile(A, m)
            for b in range(11):
                assert profile[b] == incidence_count(A, Sloped(m, b))

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(SMALL_PRIMES), st.integers(0, 2**32 - 1))
    def test_strategies_agree_and_mass_is_n_squared(self, p, seed):
        A = random_subset(p, seed)
        m = SplitMix64(seed ^ 1).below(p)
        direct = slope_profile(A, m, "direct")
        fast = slope_profile(A, m, "fast_convolution")
        assert np.array_equal(direct, fast)
        assert direct.sum() == A.n * A.n

    def test_unknown_strategy(self):
        with pytest.raises(InvalidParameter):
            slope_profile(UNIT_SQUARE, 0, "float_fft")


class TestHistogram:
    def test_hand_case_all_strategies(self):
        for strat in ("naive", "slope_direct", "slope_fast"):
            h = incidence_histogram(UNIT_SQUARE, strat)
            assert h.counts == {2: 6, 1: 12}
            assert h.zero_lines == 12

    def test_single_point(self):
        h = incidence_histogram(from_list(P5, [0]))
        assert h.counts == {1: 6}

    def test_full_field(self):
        h = incidence_histogram(gen_full_field(P5))
        assert h.counts == {5: 30}

    def test_empty_set(self):
        h = incidence_histogram(from_list(P5, []))
        assert h.counts == {}
        assert h.zero_lines == 30

    def test_line_family_size(self):
        assert sum(1 for _ in all_lines(7)) == 7 * 7 + 7

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from(SMALL_PRIMES), st.integers(0, 2**32 - 1))
    def test_strategy_equivalence(self, p, seed):
        A = random_subset(p, seed)
        naive = incidence_histogram(A, "naive")
        direct = incidence_histogram(A, "slope_direct")
        fast = incidence_histogram(A, "slope_fast")
        assert naive.counts == direct.counts == fast.counts

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from(SMALL_PRIMES), st.integers(0, 2**32 - 1))
    def test_affine_image_invariance(self, p, seed):
        A = random_subset(p, seed)
        rng = SplitMix64(seed ^ 0xA5A5)
        c = 1 + rng.below(p - 1)
        d = rng.below(p)
        image = from_list(A.modulus, [(c * a + d) % p for a in A.elements])
        assert incidence_histogram(A).counts == incidence_histogram(image).counts

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from(SMALL_PRIMES), st.integers(0, 2**32 - 1))
    def test_structural_invariants(self, p, seed):
        A = random_subset(p, seed)
        h = incidence_histogram(A)
        n = A.n
        if n:
            assert h.max_incidence <= n
            assert h.counts.get(n, 0) >= 2 * n
        assert all(v > 0 for v in h.counts.values())
        assert h.zero_lines >= 0


class TestMoments:
    def test_hand_case(self):
        ms = moments(incidence_histogram(UNIT_SQUARE))
        assert (ms.s1, ms.s2, ms.s3, ms.s4) == (24, 36, 60, 108)
        assert ms.t == 60 and ms.q == 108

    def test_single_point(self):
        ms = moments(incidence_histogram(from_list(P5, [0])))
        assert (ms.s1, ms.s2, ms.s3, ms.s4) == (6, 6, 6, 6)

    def test_full_field(self):
        for p in (5, 13):
            A = gen_full_field(validate_prime(p))
            ms = moments(incidence_histogram(A))
            assert ms.s3 == (p * p + p) * p**3
            assert ms.s4 == (p * p + p) * p**4

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(SMALL_PRIMES), st.integers(0, 2**32 - 1))
    def test_moment_identities(self, p, seed):
        A = random_subset(p, seed)
        n = A.n
        ms = moments(incidence_histogram(A))
        assert ms.s1 == (p + 1) * n * n
        assert ms.s2 == n**4 + p * n * n
        assert ms.s3 <= n * ms.s2
        assert ms.s4 <= n * ms.s3

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from(SMALL_PRIMES), st.integers(0, 2**32 - 1))
    def test_exact_deviation_identity(self, p, seed):
        # sum over lines of (i - n^2/p)^2 equals p n^2 - n^4/p exactly
        A = random_subset(p, seed)
        n = A.n
        h = incidence_histogram(A)
        mean = Fraction(n * n, p)
        dev = sum(c * (Fraction(k) - mean) ** 2 for k, c in h.counts.items())
        dev += h.zero_lines * mean**2
        assert dev == p * n * n - Fraction(n**4, p)

    def test_no_overflow_at_moderate_scale(self):
        A = gen_full_field(validate_prime(257))
        ms = moments(incidence_histogram(A, "slope_fast"))
        assert ms.s4 == (257**2 + 257) * 257**4  # > 2**64


class TestSerializationAndMerge:
    def test_json_round_trip(self):
        h = incidence_histogram(UNIT_SQUARE)
        data = json.loads(h.to_json())
        assert data == {"p": 5, "n": 2, "counts": {"1": 12, "2": 6}}
        back = IncidenceHistogram.from_json_dict(data)
        assert back == h

    def test_csv(self):
        assert incidence_histogram(UNIT_SQUARE).to_csv() == "k,lines\n1,12\n2,6\n"

    def test_merge_counts_associative_commutative(self):
        parts = [{1: 2, 3: 1}, {1: 1}, {2: 5, 3: 4}]
        merged = merge_counts(*parts)
        assert merged == {1: 3, 2: 5, 3: 5}
        assert merge_counts(parts[2], parts[0], parts[1]) == merged
        assert merge_counts(merge_counts(parts[0], parts[1]), parts[2]) == merged


class TestDefaultStrategy:
    def test_rule(self):
        assert default_strategy(1009, 20) == "slope_direct"  # 400 <= 1009*9
        assert default_strategy(1009, 303) == "slope_fast"

    def test_choice_is_logged(self, caplog):
        with caplog.at_level("INFO", logger="gridlines.incidence"):
            incidence_histogram(UNIT_SQUARE)
        assert any("strategy auto-selected" in r.message for r in caplog.records)
