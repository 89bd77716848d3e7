import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from equivox import erasure as er

from oracles import bisect

THRESHOLD = 0.2324081207560018  # (5 - sqrt 13) / 6 at 30 digits, rounded

class TestCapacity:
    def test_noiseless_qubit(self):
        assert er.erasure_capacity(0, 2) == 1.0

    @pytest.mark.parametrize("d", [2, 3, 7])
    def test_half(self, d):
        assert er.erasure_capacity(0.5, d) == 0.0

    def test_quarter(self):
        assert er.erasure_capacity(0.25, 4) == pytest.approx(1.0)

    def test_domain(self):
        with pytest.raises(ValueError):
            er.erasure_capacity(1.2, 2)
        with pytest.raises(ValueError):
            er.erasure_capacity(0.2, 1)

class TestQ4:
    def test_endpoints(self):
        assert er.q4(0) == 0.0
        assert er.q4(1) == 1.0

    def test_tenth(self):
        assert er.q4(0.1) == pytest.approx(0.0523, abs=1e-12)

    @given(st.floats(0, 1))
    def test_matches_binomial_tail(self, q):
        tail = sum(math.comb(4, k) * q**k * (1 - q) ** (4 - k) for k in range(2, 5))
        assert er.q4(q) == pytest.approx(tail, abs=1e-14)
        assert 0.0 <= er.q4(q) <= 1.0

    def test_improvement_region(self):
        t = er.improvement_threshold()
        below = np.linspace(0, t, 202)[1:-1]
        above = np.linspace(t, 1, 202)[1:-1]
        assert all(er.q4(q) < q for q in below)
        assert all(er.q4(q) > q for q in above)

class TestThreshold:
    def test_value(self):
        assert er.improvement_threshold() == pytest.approx(THRESHOLD, abs=1e-15)

    def test_fixed_point(self):
        t = er.improvement_threshold()
        assert abs(er.q4(t) - t) <= 1e-12

    def test_bisection(self):
        root = bisect(lambda q: er.q4(q) - q, 0.01, 0.5)
        assert abs(root - er.improvement_threshold()) <= 1e-10

    def test_report(self):
        rep = er.simulate_412(0.1)
        assert rep.simulated_q == pytest.approx(0.0523)
        assert rep.improvement == pytest.approx(0.0477)
        assert not rep.threshold_crossed
        assert er.simulate_412(0.3).threshold_crossed

class TestR4:
    def test_endpoints(self):
        assert er.r4_bound(0) == 1.0
        assert er.r4_bound(1) == 0.0

    def test_half(self):
        assert er.r4_bound(0.5) == 0.5

    @given(st.floats(0, 1))
    def test_difference_polynomial(self, q):
        assert er.r4_bound(q) - (1 - q) == pytest.approx(q * (1 - q) * (1 - 2 * q), abs=1e-14)

    def test_below_one_minus_q(self):
        qs = np.linspace(0.5, 1, 1000)
        assert all(er.r4_bound(q) <= 1 - q + 1e-15 for q in qs)

class TestEKR:
    @pytest.mark.parametrize("q", [0.0, 0.3, 0.6, 1.0])
    def test_single(self, q):
        assert er.ekr_recovery_bound(1, q) == pytest.approx(1 - q)

    def test_four_half(self):
        # 1/16 + 3/16 + 4/16 + 1/16; checked against mpmath
        assert er.ekr_recovery_bound(4, 0.5) == pytest.approx(0.5625, abs=1e-15)

    def test_sixty(self):
        # mpmath value 0.42065951247708855
        assert er.ekr_recovery_bound(60, 0.6) == pytest.approx(0.42065951247708855, abs=1e-12)

    def test_log_space_agrees(self):
        for n in (40, 50):
            direct = er.ekr_recovery_bound(n, 0.6)
            logged = sum(er._term(n - 1, l - 1, 0.6, n, l, True) if l <= n // 2 else er._term(n, l, 0.6, n, l, True)
                         for l in range(1, n + 1))
            assert direct == pytest.approx(logged, rel=1e-12)

    def test_large_n_finite(self):
        v = er.ekr_recovery_bound(2000, 0.6)
        assert 0.4 <= v <= 0.41

    @pytest.mark.parametrize("q", [0.55, 0.6, 0.75])
    def test_converges_to_one_minus_q(self, q):
        values = [er.ekr_recovery_bound(n, q) for n in range(4, 401)]
        assert all(v >= 1 - q - 1e-12 for v in values)
        assert abs(values[-1] - (1 - q)) < abs(values[0] - (1 - q))
        assert abs(er.ekr_recovery_bound(4000, q) - (1 - q)) < 0.01

    @pytest.mark.xfail(strict=True, reason="the bound jumps up from even n to odd n; only convergence holds")
    @pytest.mark.parametrize("q", [0.55, 0.6, 0.75])
    def test_literal_monotone_sweep(self, q):
        values = [er.ekr_recovery_bound(n, q) for n in range(4, 81)]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


class TestPartitions:
    def test_bell_numbers(self):
        assert [len(list(er.set_partitions(range(n)))) for n in range(1, 6)] == [1, 2, 5, 15, 52]

    def test_feasible(self):
        assert er.partition_feasible({0b11: 1.0, 0b1100: 0.0}, 4)
        assert not er.partition_feasible({0b11: 0.6, 0b1100: 0.6}, 4)

    def test_recovery_probability(self):
        assert er.recovery_probability({0b1111: 1.0}, 4, 0.5) == pytest.approx(1 / 16)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_exhaustive_ekr(self, n):
        rep = er.exhaustive_partition_check(n, [0.5, 0.6, 0.75])
        assert rep.violations == 0
        assert rep.max_ratio <= 1 + 1e-12

    def test_exhaustive_r4_is_tight(self):
        rep = er.exhaustive_partition_check(4, [0.5, 0.6, 0.8], singletons_zero=True)
        assert rep.violations == 0
        assert rep.max_ratio == pytest.approx(1.0)

    def test_limits(self):
        with pytest.raises(ValueError):
            er.exhaustive_partition_check(5, [0.5])
        with pytest.raises(ValueError):
            er.exhaustive_partition_check(3, [0.5], singletons_zero=True)
