"""Closed-form thresholds, certified offsets, and the dominance link."""

import math
from fractions import Fraction

import pytest

from gapforge.certified import sqrt_enclosure
from gapforge.constants import (JOINT_THRESHOLD_INDEX, cube_midpoint_integer,
                                cube_window_k, cube_window_threshold,
                                gap_dominance_scan, joint_fractional_threshold,
                                min_k_for_gap_exponent, threshold_headroom_check)
from gapforge.errors import UsageError
from gapforge.primes import is_prime


def _floor_pow_bruteforce(base: int, num: int, den: int) -> int:
    t = 0
    while (t + 1) ** den <= base ** num:
        t += 1
    return t


class TestCubeWindowThreshold:
    def test_frozen_values(self):
        # 100^2 * (floor(100^(2/19)) + 1) = 10000 * 2
        assert cube_window_threshold(100) == 20_000
        assert cube_window_threshold(21) == 882
        assert cube_window_threshold(2) == 8

    def test_matches_bruteforce_floor(self):
        for g in (2, 3, 10, 97, 1000, 5000):
            t = _floor_pow_bruteforce(g, 2, 19)
            assert cube_window_threshold(g) == g * g * (t + 1)

    def test_domain(self):
        with pytest.raises(UsageError):
            cube_window_threshold(1)


class TestCubeWindowK:
    def test_known_value(self):
        # g=3: 3*sqrt(3) / (3*sqrt(3) - 2*sqrt(2)) ~ 2.1946
        cv = cube_window_k(3)
        assert cv.lo < Fraction(21947, 10000)
        assert cv.hi > Fraction(21945, 10000)
        # defining identity k * (a - b) = a with a = g^1.5, b = (g-1)^1.5
        a = 3 * sqrt_enclosure(3, 96)
        b = 2 * sqrt_enclosure(2, 96)
        residual = cv * (a - b) - a
        assert residual.lo <= 0 <= residual.hi

    def test_grows_with_g(self):
        prev_hi = None
        for g in (3, 5, 10, 50):
            cv = cube_window_k(g)
            if prev_hi is not None:
                assert cv.lo > prev_hi
            prev_hi = cv.hi

    def test_domain(self):
        with pytest.raises(UsageError):
            cube_window_k(2)


class TestHeadroom:
    def test_holds_from_21(self):
        for g in (21, 22, 50, 100, 1000):
            rep = threshold_headroom_check(g)
            assert rep.holds and rep.margin.lo > 0
            assert rep.intermediate_holds

    def test_fails_for_tiny_g(self):
        rep = threshold_headroom_check(2)
        assert not rep.holds
        assert rep.margin.hi < 0

    def test_exact_inequality_cross_check(self):
        for g in (2, 5, 20, 21, 30, 400):
            rep = threshold_headroom_check(g)
            n = g * (g - 1)
            assert rep.holds == ((2 * rep.threshold) ** 2 < n ** 3)

    def test_json(self):
        body = threshold_headroom_check(21).to_json()
        assert body["report"] == "headroom" and body["g"] == 21


class TestCubeMidpoint:
    def test_small_values(self):
        n0, theta = cube_midpoint_integer(2)
        assert n0 == 3                        # nearest int to 2^1.5 ~ 2.828
        assert theta.lo > 0 and theta.hi < Fraction(1, 2)

    def test_nearest_and_offset_certified(self):
        for g in (2, 3, 17, 100, 12345):
            n0, theta = cube_midpoint_integer(g)
            target = (g * (g - 1)) ** 3
            # n0 is the nearest integer: |2*n0^2 - ...| check via squares
            assert (2 * n0 - 1) ** 2 < 4 * target < (2 * n0 + 1) ** 2
            # certified |theta| < 1/2
            assert -Fraction(1, 2) < theta.lo and theta.hi < Fraction(1, 2)
            # enclosure actually brackets n0 - sqrt(target)
            assert (n0 - theta.hi) ** 2 <= target <= (n0 - theta.lo) ** 2

    def test_domain(self):
        with pytest.raises(UsageError):
            cube_midpoint_integer(1)


class TestMinK:
    def test_exact_identity(self):
        assert min_k_for_gap_exponent(Fraction(21, 40)) == Fraction(40, 19)
        assert min_k_for_gap_exponent("1/2") == 2
        k = min_k_for_gap_exponent(Fraction(2, 3))
        assert (k - 1) / k == Fraction(2, 3)

    def test_domain(self):
        with pytest.raises(UsageError):
            min_k_for_gap_exponent(1)
        with pytest.raises(UsageError):
            min_k_for_gap_exponent(0)


class TestJointThreshold:
    def test_small_k_pinned_by_index(self, engine):
        # exp(sqrt(2)) ~ 4.1: the least prime above it (5) is far below the
        # 463rd prime, so the floor wins
        rep = joint_fractional_threshold(2, engine)
        assert rep.value == engine.nth_prime(JOINT_THRESHOLD_INDEX) == 3299
        assert rep.extras["p_r"] == 5

    def test_large_k_pinned_by_exponential(self, engine):
        rep = joint_fractional_threshold(80, engine)
        p_r = rep.extras["p_r"]
        assert rep.value == p_r > 3299
        assert is_prime(p_r)
        # p_r is the least prime above exp(sqrt(80))
        cutoff = math.exp(math.sqrt(80))
        assert p_r > cutoff
        assert all(not is_prime(q) for q in range(math.ceil(cutoff), p_r))

    def test_domain(self, engine):
        with pytest.raises(UsageError):
            joint_fractional_threshold(1, engine)

    def test_json(self, engine):
        body = joint_fractional_threshold(2, engine).to_json()
        assert body["name"] == "joint-fractional-threshold"
        assert body["value"]["exact"] == "3299"


class TestDominance:
    def test_holds_above_threshold(self, engine):
        rep = gap_dominance_scan(21, engine, hi=50_000)
        assert rep.holds
        assert rep.lo == cube_window_threshold(21) == 882
        assert rep.pairs_scanned > 4000
        body = rep.to_json()
        assert body["holds"] and body["violations"] == []
