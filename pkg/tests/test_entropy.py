import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gpentropy.entropy import ctpe, gpe, pe, pe_avg, pe_counts, shannon
from gpentropy.errors import InsufficientDataError, ResourceGuardError, ValidationError

from oracles import consecutive_bruteforce, entropy_nats, profile_bruteforce

series = st.lists(st.floats(-100, 100, allow_nan=False), min_size=7, max_size=25)


class TestShannon:
    def test_uniform(self):
        assert shannon([3, 3, 3, 3]) == pytest.approx(math.log(4))

    def test_point_mass(self):
        assert shannon([0, 5, 0]) == 0.0

    def test_zero_total(self):
        with pytest.raises(ValidationError):
            shannon([0, 0])

    def test_negative(self):
        with pytest.raises(ValidationError):
            shannon([1, -1])

    def test_huge_integer_counts(self):
        big = 10**30
        assert shannon([big, big]) == pytest.approx(math.log(2), abs=1e-15)


class TestFig1:
    # frozen from the brute-force oracle in tests/oracles.py
    def test_gpe3(self, fig1):
        v = gpe(fig1, 3)
        assert v.value == pytest.approx(0.8094992234, abs=1e-9)
        assert v.sample_size == 35

    def test_pe(self, fig1):
        assert pe(fig1, 3, 1).value == pytest.approx(0.5887621559, abs=1e-9)
        assert pe(fig1, 3, 2).value == pytest.approx(0.6131471928, abs=1e-9)
        assert pe(fig1, 3, 2).sample_size == 3

    def test_pe_avg(self, fig1):
        v = pe_avg(fig1, 3, [2, 1])
        assert v.delay == (1, 2)
        assert v.value == pytest.approx(0.6009546743, abs=1e-9)
        assert v.sample_size == 3

    def test_inversion_split(self, fig1):
        # k=2: 7 non-inversions, 14 inversions
        assert gpe(fig1, 2).value == pytest.approx(entropy_nats([7, 14]) / math.log(2))

    def test_ctpe_order2_counts_pairs(self, fig1):
        v = ctpe(fig1, 2)
        assert v.meta["normalization"] == "log(2)"
        assert sorted(v.meta["counts"]) == [7, 14]
        assert v.value == pytest.approx(0.9182958341, abs=1e-9)


class TestAgainstOracle:
    @given(series, st.sampled_from([2, 3, 4]))
    def test_gpe(self, xs, k):
        expect = entropy_nats(profile_bruteforce(xs, k))
        assert gpe(xs, k, normalized=False).value == pytest.approx(expect, abs=1e-12)

    @given(series, st.sampled_from([2, 3]), st.integers(1, 3))
    def test_pe(self, xs, k, tau):
        expect = consecutive_bruteforce(xs, k, tau)
        assert pe_counts(xs, k, tau).tolist() == expect
        assert pe(xs, k, tau).sample_size == len(xs) - tau * (k - 1)


class TestBounds:
    @given(series, st.sampled_from([2, 3, 4]))
    def test_normalized_unit_interval(self, xs, k):
        for v in (gpe(xs, k), pe(xs, k), ctpe(xs, k)):
            assert -1e-12 <= v.normalized <= 1 + 1e-12

    def test_monotone_zero(self):
        x = np.arange(30.0)
        assert gpe(x, 4).value == 0.0
        assert pe(x, 4).value == 0.0
        assert gpe(-x, 3).value == 0.0


class TestErrors:
    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            gpe([1.0, 2.0], 3)
        with pytest.raises(InsufficientDataError):
            pe([1.0, 2.0, 3.0, 4.0], 3, 2)

    def test_bad_delay(self):
        with pytest.raises(ValidationError):
            pe([1.0, 2.0, 3.0], 2, 0)

    def test_ctpe6_needs_opt_in(self):
        with pytest.raises(ResourceGuardError):
            ctpe(np.arange(10.0), 6)

    def test_ctpe_constant_tree_set(self):
        # a single point embeds no edge
        with pytest.raises(InsufficientDataError):
            ctpe([1.0], 2)

    def test_record_fields(self, fig1):
        rec = pe(fig1, 3).to_record()
        assert set(rec) == {"kind", "order", "delay", "raw_nats", "normalized", "sample_size", "method"}

    def test_raw_reporting(self, fig1):
        v = gpe(fig1, 3, normalized=False)
        assert v.value == v.raw == pytest.approx(v.normalized * math.log(6))
