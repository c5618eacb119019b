"""Interval families: endpoints, certified counts, family sweeps, containment."""

from fractions import Fraction

import pytest

from gapforge.certified import RealNumber
from gapforge.errors import PrecisionExhausted, UsageError
from gapforge.intervals import (ContainmentCertificate, Family, IntervalSpec,
                                containment_check, count_primes, endpoints,
                                family_count_rows, min_valid_n, verify_family)


class TestSpec:
    def test_anchor_validation(self):
        with pytest.raises(UsageError):
            IntervalSpec(Family.EXP_FULL, RealNumber(3), 1)
        with pytest.raises(UsageError):
            IntervalSpec(Family.EXP_REDUCED_PRIME, RealNumber(3), 9)
        IntervalSpec(Family.EXP_REDUCED_PRIME, RealNumber(3), 11)   # prime ok


class TestEndpoints:
    def test_exp_full_integer_k_exact(self):
        lo, hi = endpoints(IntervalSpec(Family.EXP_FULL, RealNumber(3), 10))
        assert lo.is_exact and lo.lo == 729
        assert hi.is_exact and hi.lo == 1000

    def test_fractional_exact(self):
        lo, hi = endpoints(IntervalSpec(Family.FRAC_TWO_SIDED, RealNumber(2), 100))
        assert (lo.lo, hi.lo) == (50, 200) and lo.is_exact and hi.is_exact
        lo, hi = endpoints(IntervalSpec(Family.FRAC_RIGHT, RealNumber(3), 10))
        assert (lo.lo, hi.lo) == (10, 15)
        lo, hi = endpoints(IntervalSpec(Family.FRAC_LEFT, RealNumber(3), 9))
        assert (lo.lo, hi.lo) == (6, 9)

    def test_reduced_family_shape(self):
        lo, hi = endpoints(IntervalSpec(Family.EXP_REDUCED_INT, RealNumber(3), 1000))
        # 1000 - 2.5 * 1000^(2/3) = 750 exactly at integer k... the power is
        # 100 exactly, so the enclosure must pin 750
        assert hi.is_exact and hi.lo == 1000
        assert lo.lo == lo.hi == 750

    def test_irrational_k_encloses_and_nests(self):
        spec = IntervalSpec(Family.EXP_FULL, RealNumber("sqrt5"), 7)
        lo96, hi96 = endpoints(spec, 96)
        lo192, hi192 = endpoints(spec, 192)
        assert lo192.nested_in(lo96) and hi192.nested_in(hi96)
        # endpoints approximate 6^sqrt5 and 7^sqrt5 far tighter than doubles
        import math
        assert math.isclose(lo96.midpoint_float(), 6 ** 5 ** 0.5, rel_tol=1e-12)
        assert math.isclose(hi96.midpoint_float(), 7 ** 5 ** 0.5, rel_tol=1e-12)
        assert hi96.width < 1e-20


class TestCountPrimes:
    def test_cube_intervals_match_enumeration(self, engine, oracle_flags):
        for n in range(2, 40):
            spec = IntervalSpec(Family.EXP_FULL, RealNumber(3), n)
            want = sum(oracle_flags[q] for q in range((n - 1) ** 3 + 1, n ** 3))
            assert count_primes(spec, engine) == want

    def test_fractional_counts_match_enumeration(self, engine, oracle_flags):
        for n in range(2, 200):
            spec = IntervalSpec(Family.FRAC_TWO_SIDED, RealNumber(2), n)
            want = sum(oracle_flags[q]
                       for q in range(n // 2 + 1, 2 * n)
                       if Fraction(n, 2) < q < 2 * n)
            assert count_primes(spec, engine) == want

    def test_open_endpoints_excluded(self, engine):
        # (3, 15) for FRAC_RIGHT(3, 3)... use (10, 15): primes 11, 13
        assert count_primes(IntervalSpec(Family.FRAC_RIGHT, RealNumber(3), 10),
                            engine) == 2
        # endpoint prime 5 must not be counted in (5, 7.5)
        assert count_primes(IntervalSpec(Family.FRAC_RIGHT, RealNumber(3), 5),
                            engine) == 1    # just 7

    def test_empty_interval(self, engine):
        # FRAC_LEFT(2, 3) = (1.5, 3): contains prime 2 -> 1; FRAC_LEFT(2, 2)
        # = (1, 2): empty
        assert count_primes(IntervalSpec(Family.FRAC_LEFT, RealNumber(2), 2),
                            engine) == 0

    def test_irrational_k_counts(self, engine, oracle_flags):
        import math
        for n in range(2, 30):
            spec = IntervalSpec(Family.EXP_FULL, RealNumber("sqrt5"), n)
            c = count_primes(spec, engine)
            s5 = math.sqrt(5)
            want = sum(oracle_flags[q]
                       for q in range(2, int(n ** s5) + 2)
                       if (n - 1) ** s5 < q < n ** s5)
            assert c == want, n


class TestVerifyFamily:
    def test_cube_two_primes_small(self, engine):
        v = verify_family(Family.EXP_FULL, 3, 2, 2, 100, engine)
        assert v.outcome == "HoldsForAll"
        assert v.to_json()["outcome"] == "HoldsForAll"

    def test_fast_and_generic_paths_agree(self, engine):
        ks = [("frac-two-sided", Family.FRAC_TWO_SIDED)]
        for _, fam in ks:
            fast = verify_family(fam, 2, 2, 11, 500, engine)
            # per-n certified recount
            for n in range(11, 501):
                c = count_primes(IntervalSpec(fam, RealNumber(2), n), engine)
                assert c >= 2, n
            assert fast.outcome == "HoldsForAll"

    def test_failure_reports_minimal_n(self, engine):
        # demanding 3 primes in (n/2, 2n) fails first at n = 2: (1, 4) has 2, 3
        v = verify_family(Family.FRAC_TWO_SIDED, 2, 4, 2, 100, engine)
        assert v.outcome == "FailsAt"
        assert v.fail_n == 2 and v.fail_count == 2

    def test_generic_path_failure(self, engine):
        # FRAC_RIGHT with aggressive k: (n, 1.001*n) quickly prime-free
        v = verify_family(Family.FRAC_RIGHT, 1000, 1, 2, 50, engine)
        assert v.outcome == "FailsAt" and v.fail_n == 2

    def test_invalid_range(self, engine):
        with pytest.raises(UsageError):
            verify_family(Family.EXP_FULL, 3, 1, 1, 10, engine)

    def test_workers_deterministic(self, engine):
        import json
        outs = [verify_family(Family.EXP_FULL, "sqrt5", 1, 2, 60, engine,
                              workers=w).to_json() for w in (1, 4)]
        assert json.dumps(outs[0], sort_keys=True) == json.dumps(outs[1], sort_keys=True)


class TestMinValidN:
    def test_frac_two_sided_all_good(self, engine):
        assert min_valid_n(Family.FRAC_TWO_SIDED, 2, 2, 10_000, engine) == 2

    def test_demand_three_primes(self, engine, oracle_flags):
        got = min_valid_n(Family.FRAC_TWO_SIDED, 2, 3, 10_000, engine)
        # independent recount: last n whose (n/2, 2n) holds < 3 primes
        def count(n):
            return sum(oracle_flags[q] for q in range(2, 2 * n)
                       if 2 * q > n and q < 2 * n)
        last_bad = max(n for n in range(2, 10_001) if count(n) < 3)
        assert got == last_bad + 1

    def test_none_when_failing_at_top(self, engine):
        assert min_valid_n(Family.FRAC_RIGHT, 1000, 1, 30, engine) is None


class TestContainment:
    def test_known_exact_cases(self):
        ten = containment_check(3, 10)
        assert ten.contained and ten.floor_power == 1000
        # margin is exactly 750 - 729 = 21 at integer k
        assert ten.margin.lo == 21 == ten.margin.hi

        two = containment_check(3, 2)
        assert not two.contained
        assert two.margin.hi < 0

    def test_integer_k_boundary(self):
        # exact arithmetic places the k=3 handover between m=5 and m=6
        assert not containment_check(3, 4).contained
        assert not containment_check(3, 5).contained
        for m in (6, 7, 8, 20, 100):
            cert = containment_check(3, m)
            assert cert.contained and cert.margin.lo > 0

    def test_rational_k(self):
        cert = containment_check("40/19", 1000)
        assert cert.contained and cert.margin.lo > 0

    def test_m_validation(self):
        with pytest.raises(UsageError):
            containment_check(3, 1)

    def test_json_shape(self):
        body = containment_check(3, 10).to_json()
        assert body["report"] == "containment" and body["m"] == 10

    def test_reduction_soundness(self, engine):
        # wherever containment holds, a prime in the reduced interval at
        # floor(m^k) forces a prime in ((m-1)^k, m^k)
        for m in range(6, 40):
            cert = containment_check(3, m)
            assert cert.contained
            reduced = IntervalSpec(Family.EXP_REDUCED_INT, RealNumber(3),
                                   cert.floor_power)
            full = IntervalSpec(Family.EXP_FULL, RealNumber(3), m)
            if count_primes(reduced, engine) >= 1:
                assert count_primes(full, engine) >= 1


class TestCsvRows:
    def test_shape_and_counts(self, engine):
        rows = list(family_count_rows(Family.FRAC_TWO_SIDED, 2, 5, 10, engine))
        assert rows[0] == ["n", "lo_lo", "lo_hi", "hi_lo", "hi_hi", "count"]
        assert len(rows) == 7
        ns = [r[0] for r in rows[1:]]
        assert ns == [5, 6, 7, 8, 9, 10]
