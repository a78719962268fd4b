import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gpentropy.errors import ResourceGuardError, ValidationError
from gpentropy.patterns import complement_map, oracle_profile, reverse_map
from gpentropy.profile import (
    SampleSizeWarning,
    check_sample_size,
    count_3214,
    fallback_profile,
    fast_profile,
    prefix_profiles,
    profile,
    window_profiles,
)

perms = st.integers(1, 30).flatmap(lambda n: st.permutations(list(range(1, n + 1))))


def count_3214_bruteforce(r):
    n = len(r)
    return sum(
        1
        for i in range(n) for j in range(i + 1, n) for l in range(j + 1, n) for m in range(l + 1, n)
        if r[l] < r[j] < r[i] < r[m]
    )


class TestCount3214:
    def test_small(self):
        assert count_3214([4, 3, 2, 1, 5]) == 4
        assert count_3214([3, 2, 1, 4]) == 1
        assert count_3214([1, 2, 3, 4]) == 0

    @given(st.permutations(list(range(1, 13))))
    def test_bruteforce(self, r):
        assert count_3214(r) == count_3214_bruteforce(r)

    def test_short(self):
        assert count_3214([2, 1, 3]) == 0


class TestFastProfile:
    def test_fig1(self):
        p = fast_profile([7, 4, 3, 5, 2, 1, 6], 3)
        assert p.counts == (2, 0, 9, 4, 7, 13)
        assert p.meta["lower"][2].counts == (7, 14)

    @given(perms, st.sampled_from([2, 3, 4]))
    def test_matches_oracle(self, r, k):
        assert fast_profile(r, k).counts == oracle_profile(r, k).counts

    def test_identity_and_reverse(self):
        n = 50
        p = fast_profile(list(range(1, n + 1)), 4)
        assert p[(1, 2, 3, 4)] == math.comb(n, 4)
        q = fast_profile(list(range(n, 0, -1)), 4)
        assert q[(4, 3, 2, 1)] == math.comb(n, 4)

    def test_rejects_non_permutation(self):
        with pytest.raises(ValidationError):
            fast_profile([1, 1, 2], 2)

    def test_large_n_bigint_path(self):
        # n**4 exceeds int64 at this length, so the tree counts run in bigints
        r = np.random.default_rng(0).permutation(60000) + 1
        p = fast_profile(r, 2)
        inversions = p.counts[1]
        assert sum(p.counts) == math.comb(60000, 2) and 0 < inversions


class TestFallback:
    @given(st.integers(5, 11).flatmap(lambda n: st.permutations(list(range(1, n + 1)))),
           st.sampled_from([5, 6]))
    def test_matches_oracle(self, r, k):
        assert fallback_profile(r, k).counts == oracle_profile(r, k).counts

    def test_guard(self):
        with pytest.raises(ResourceGuardError):
            fallback_profile(list(range(1, 40)), 6, guard=1000)

    def test_prefix_profiles(self):
        r = [5, 2, 7, 1, 3, 6, 4]
        pref = prefix_profiles(r, 3)
        for n in range(1, len(r) + 1):
            ranks = np.argsort(np.argsort(r[:n])) + 1
            assert pref[n - 1].tolist() == list(oracle_profile(ranks, 3).counts)


class TestDispatch:
    def test_methods_agree(self):
        r = np.random.default_rng(1).permutation(12) + 1
        ps = {m: profile(r, 4, m).counts for m in ("auto", "fast", "fallback", "oracle")}
        assert len(set(ps.values())) == 1

    @pytest.mark.parametrize("k", [1, 7, 2.0])
    def test_order_range(self, k):
        with pytest.raises(ValidationError, match="order out of range"):
            profile([1, 2, 3], k)

    def test_unknown_method(self):
        with pytest.raises(ValidationError):
            profile([1, 2, 3], 2, "magic")


class TestSymmetry:
    @given(perms, st.sampled_from([2, 3, 4]))
    def test_reverse(self, r, k):
        fwd = fast_profile(r, k)
        back = fast_profile(r[::-1], k)
        assert fwd.mapped(reverse_map(k)).counts == back.counts

    @given(perms, st.sampled_from([2, 3, 4]))
    def test_complement(self, r, k):
        n = len(r)
        comp = [n + 1 - x for x in r]
        assert fast_profile(r, k).mapped(complement_map(k)).counts == fast_profile(comp, k).counts


class TestWindowProfiles:
    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_matches_oracle(self, k):
        x = np.random.default_rng(k).standard_normal(45)
        r = np.argsort(np.argsort(x)) + 1
        w, stride = 17, 4
        got = window_profiles(r, w, k, stride)
        for j, row in enumerate(got):
            seg = x[j * stride: j * stride + w]
            ranks = np.argsort(np.argsort(seg)) + 1
            assert list(row) == list(oracle_profile(ranks, k).counts)

    def test_fallback_orders(self):
        x = np.random.default_rng(9).standard_normal(14)
        r = np.argsort(np.argsort(x)) + 1
        got = window_profiles(r, 9, 5)
        seg = np.argsort(np.argsort(x[2:11])) + 1
        assert list(got[2]) == list(oracle_profile(seg, 5).counts)


class TestSampleSize:
    def test_warns_below_rule(self):
        with pytest.warns(SampleSizeWarning):
            assert not check_sample_size(8, 3)

    def test_silent_above_rule(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert check_sample_size(30, 3)
