"""Finite-range verification of the interval-statement <-> gap-inequality
biconditionals, plus the minimal-counterexample construction.

Three cases are supported, each pairing an interval statement (side A)
with a gap inequality (side B) over consecutive primes:

  L1: (p - (k - 1/2) p^((k-1)/k), p) has a prime   <->  gap < (k - 1/2) p_next^((k-1)/k)
      anchored at p_next, domain k >= 40/19
  L5: (p, k/(k-1) p) has a prime                   <->  gap < p_prev / (k - 1)
      anchored at p_prev, domain k >= 2
  L7: ((k-1)/k p, p) has a prime                   <->  gap < p_next / k
      anchored at p_next, domain k >= 2

The per-pair checks are pure set logic over a strictly increasing
sequence, so the same machinery runs over synthetic fake-prime sequences
(`synthetic_equivalence`), where violations can be constructed at will.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .certified import (CertifiedValue, RealNumber, DEFAULT_PRECISION_BITS,
                        MAX_PRECISION_BITS, pow_enclosure)
from .errors import PrecisionExhausted, UsageError
from .gaps import MIN_EXPONENTIAL_K
from .intervals import Family, IntervalSpec, count_primes
from .primes import PrimeEngine, PrimePair, validate_synthetic_sequence

_CASES = {
    "L1": dict(anchor="next", family=Family.EXP_REDUCED_PRIME,
               min_k=MIN_EXPONENTIAL_K),
    "L5": dict(anchor="prev", family=Family.FRAC_RIGHT, min_k=Fraction(2)),
    "L7": dict(anchor="next", family=Family.FRAC_LEFT, min_k=Fraction(2)),
}


@dataclass(frozen=True)
class EquivalenceCase:
    case_id: str            # "L1" | "L5" | "L7"
    k: RealNumber
    lo: int
    hi: int

    def __post_init__(self):
        if self.case_id not in _CASES:
            raise UsageError(f"unknown case {self.case_id!r}; pick one of {sorted(_CASES)}")
        min_k = _CASES[self.case_id]["min_k"]
        if float(self.k) < float(min_k):
            raise UsageError(
                f"{self.case_id} requires k >= {min_k}, got {self.k}")
        if self.lo >= self.hi:
            raise UsageError(f"need lo < hi, got ({self.lo}, {self.hi})")

    @property
    def anchor(self) -> str:
        return _CASES[self.case_id]["anchor"]

    @property
    def family(self) -> Family:
        return _CASES[self.case_id]["family"]


@dataclass
class EquivalenceReport:
    case: EquivalenceCase
    side_a_holds: bool                  # interval statement over all anchors
    side_b_holds: bool                  # gap inequality over all pairs
    interval_witnesses: list = field(default_factory=list)   # anchors with prime-free interval
    gap_witnesses: list = field(default_factory=list)        # violating PrimePairs
    pairs_checked: int = 0

    @property
    def consistent(self) -> bool:
        return self.side_a_holds == self.side_b_holds

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "report": "equivalence",
            "case": self.case.case_id,
            "k": str(self.case.k),
            "range": [self.case.lo, self.case.hi],
            "side_a_holds": self.side_a_holds,
            "side_b_holds": self.side_b_holds,
            "consistent": self.consistent,
            "interval_witnesses": list(self.interval_witnesses),
            "gap_witnesses": [{"p_prev": p.p_prev, "p_next": p.p_next}
                              for p in self.gap_witnesses],
            "pairs_checked": self.pairs_checked,
        }

    def csv_rows(self):
        yield ["kind", "anchor", "p_prev", "p_next"]
        for a in self.interval_witnesses:
            yield ["prime-free-interval", a, "", ""]
        for p in self.gap_witnesses:
            yield ["gap-violation", p.anchored_at if hasattr(p, "anchored_at") else "",
                   p.p_prev, p.p_next]


def _interval_bounds(case_id: str, k: RealNumber, anchor: int,
                     prec: int) -> tuple[CertifiedValue, CertifiedValue]:
    """Endpoints of the case's interval at the given anchor value.

    Unlike `intervals.endpoints` this accepts any integer anchor, so the
    same formulas drive the synthetic harness.
    """
    if case_id == "L1":
        if k.is_rational:
            kf = k.fraction
            term = (kf - Fraction(1, 2)) * pow_enclosure(anchor, (kf - 1) / kf, prec)
        else:
            kcv = k.enclosure(prec)
            term = (kcv - Fraction(1, 2)) * pow_enclosure(anchor, 1 - kcv.inverse(), prec)
        return Fraction(anchor) - term, CertifiedValue.exact(anchor, prec)
    if case_id == "L5":
        if k.is_rational:
            hi = CertifiedValue.exact(k.fraction / (k.fraction - 1) * anchor, prec)
        else:
            kcv = k.enclosure(prec)
            hi = Fraction(anchor) * kcv * (kcv - 1).inverse()
        return CertifiedValue.exact(anchor, prec), hi
    # L7
    if k.is_rational:
        lo = CertifiedValue.exact((k.fraction - 1) / k.fraction * anchor, prec)
    else:
        kcv = k.enclosure(prec)
        lo = (1 - kcv.inverse()) * anchor
    return lo, CertifiedValue.exact(anchor, prec)


def _gap_bound(case_id: str, k: RealNumber, pair: PrimePair,
               prec: int) -> CertifiedValue:
    if case_id == "L1":
        if k.is_rational:
            kf = k.fraction
            return (kf - Fraction(1, 2)) * pow_enclosure(pair.p_next, (kf - 1) / kf, prec)
        kcv = k.enclosure(prec)
        return (kcv - Fraction(1, 2)) * pow_enclosure(pair.p_next, 1 - kcv.inverse(), prec)
    if case_id == "L5":
        if k.is_rational:
            return CertifiedValue.exact(Fraction(pair.p_prev) / (k.fraction - 1), prec)
        return Fraction(pair.p_prev) * (k.enclosure(prec) - 1).inverse()
    if k.is_rational:
        return CertifiedValue.exact(Fraction(pair.p_next) / k.fraction, prec)
    return Fraction(pair.p_next) * k.enclosure(prec).inverse()


def _gap_violates(case_id: str, k: RealNumber, pair: PrimePair,
                  prec: int, max_prec: int) -> bool:
    gap = pair.gap
    p = prec
    while True:
        bound = _gap_bound(case_id, k, pair, p)
        if bound.is_exact:
            return gap >= bound.lo
        if gap < bound.lo:
            return False
        if gap >= bound.hi:
            return True
        if p >= max_prec:
            raise PrecisionExhausted(
                f"gap side undecided for {pair.as_tuple()} at {max_prec} bits")
        p = min(p * 2, max_prec)


def _any_member_in(members: list, a, b) -> bool:
    """Any member v with a <= v <= b (a, b rational)."""
    i = bisect.bisect_left(members, math.ceil(a))
    j = bisect.bisect_right(members, math.floor(b))
    return j > i


def _interval_empty(case_id: str, k: RealNumber, anchor: int, members: list,
                    prec: int, max_prec: int) -> bool:
    """True iff the case's interval at `anchor` contains no member of the
    sorted sequence `members` (certified, escalating)."""
    p = prec
    while True:
        lo, hi = _interval_bounds(case_id, k, anchor, p)
        first = math.floor(lo.hi) + 1      # certainly above the lower endpoint
        last = math.ceil(hi.lo) - 1        # certainly below the upper endpoint
        if last >= first and _any_member_in(members, first, last):
            return False
        ambiguous = ((not lo.is_exact and _any_member_in(members, lo.lo, lo.hi))
                     or (not hi.is_exact and _any_member_in(members, hi.lo, hi.hi)))
        if not ambiguous:
            return True
        if p >= max_prec:
            raise PrecisionExhausted(
                f"interval side undecided at anchor {anchor} at {max_prec} bits")
        p = min(p * 2, max_prec)


def _run_cases(case: EquivalenceCase, pairs: list[PrimePair], members: list[int],
               prec: int, max_prec: int) -> EquivalenceReport:
    interval_witnesses = []
    gap_witnesses = []
    anchor_is_next = case.anchor == "next"
    checked = 0
    for pair in pairs:
        anchor = pair.p_next if anchor_is_next else pair.p_prev
        if anchor < case.lo or anchor > case.hi:
            continue
        checked += 1
        violates = _gap_violates(case.case_id, case.k, pair, prec, max_prec)
        empty = _interval_empty(case.case_id, case.k, anchor, members, prec, max_prec)
        # witness-level implication: the two must flip together pair-by-pair
        if violates != empty:
            raise AssertionError(
                f"witness-level divergence at {pair.as_tuple()}: "
                f"gap violates={violates}, interval empty={empty} "
                "(artifact bug, not a mathematical finding)")
        if violates:
            gap_witnesses.append(pair)
            interval_witnesses.append(anchor)
    return EquivalenceReport(
        case=case,
        side_a_holds=not interval_witnesses,
        side_b_holds=not gap_witnesses,
        interval_witnesses=interval_witnesses,
        gap_witnesses=gap_witnesses,
        pairs_checked=checked,
    )


def check_equivalence(case: EquivalenceCase, engine: PrimeEngine,
                      prec: int = DEFAULT_PRECISION_BITS,
                      max_prec: int = MAX_PRECISION_BITS) -> EquivalenceReport:
    """Evaluate both sides of the biconditional over all pairs whose anchor
    prime lies in [lo, hi]."""
    if case.anchor == "next":
        # anchors are p_next values; p_prev may lie below lo
        pairs = list(engine.consecutive_pairs(2, case.hi))
        members_hi = case.hi
    else:
        # anchors are p_prev values; the partner p_next may lie beyond hi
        pair_hi = engine.next_prime(case.hi)
        pairs = list(engine.consecutive_pairs(case.lo, pair_hi))
        members_hi = pair_hi
    members = [int(p) for p in engine.primes_array_upto(members_hi)]
    return _run_cases(case, pairs, members, prec, max_prec)


def synthetic_equivalence(case_id: str, k, sequence,
                          prec: int = DEFAULT_PRECISION_BITS,
                          max_prec: int = MAX_PRECISION_BITS) -> EquivalenceReport:
    """Run the biconditional logic over a fake 'prime' sequence.

    Both directions must agree as pure set logic regardless of
    primality; a divergence raises (it would be an artifact bug).
    """
    members = validate_synthetic_sequence(sequence)
    if len(members) < 2:
        case = EquivalenceCase(case_id, RealNumber(k), members[0], members[0] + 1)
        return EquivalenceReport(case, True, True)
    pairs = [PrimePair(a, b) for a, b in zip(members, members[1:])]
    case = EquivalenceCase(case_id, RealNumber(k), members[0], members[-1])
    return _run_cases(case, pairs, members, prec, max_prec)


@dataclass
class CounterexampleProbe:
    family: Family
    k: RealNumber
    n_from: int
    n_to: int
    found: bool
    n0: Optional[int] = None
    prime_count: Optional[int] = None
    anchor_kind: Optional[str] = None   # "prime" | "bracketed"
    bracket: Optional[tuple] = None     # (p_prev, p_next) around n0
    derived_interval_empty: Optional[bool] = None
    containment_certified: Optional[bool] = None

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "report": "counterexample-probe",
            "family": self.family.value,
            "k": str(self.k),
            "range": [self.n_from, self.n_to],
            "found": self.found,
            "n0": self.n0,
            "prime_count": self.prime_count,
            "anchor_kind": self.anchor_kind,
            "bracket": list(self.bracket) if self.bracket else None,
            "derived_interval_empty": self.derived_interval_empty,
            "containment_certified": self.containment_certified,
        }


def minimal_counterexample_probe(family: Family, k, n_to: int,
                                 engine: PrimeEngine,
                                 n_from: int = 3,
                                 prec: int = DEFAULT_PRECISION_BITS,
                                 max_prec: int = MAX_PRECISION_BITS) -> CounterexampleProbe:
    """Find the minimal integer n0 in [n_from, n_to] whose interval is
    prime-free, then replay the bracketing construction: with
    p_prev < n0 < p_next, the corresponding prime-indexed interval must
    be prime-free too (certified by containment).

    Not finding a counterexample is the normal outcome and is reported
    as such, not raised.
    """
    if family not in (Family.EXP_REDUCED_INT, Family.FRAC_RIGHT, Family.FRAC_LEFT):
        raise UsageError(f"probe supports integer-indexed families, not {family.value}")
    k = RealNumber(k)
    n0 = None
    count0 = None
    for n in range(n_from, n_to + 1):
        c = count_primes(IntervalSpec(family, k, n), engine, prec, max_prec)
        if c < 1:
            n0, count0 = n, c
            break
    if n0 is None:
        return CounterexampleProbe(family, k, n_from, n_to, found=False)

    from .primes import is_prime
    if is_prime(n0):
        # the failing integer is itself prime: the prime-indexed interval
        # anchored at n0 is the derived witness directly
        prime_family = {Family.EXP_REDUCED_INT: Family.EXP_REDUCED_PRIME,
                        Family.FRAC_RIGHT: Family.FRAC_RIGHT,
                        Family.FRAC_LEFT: Family.FRAC_LEFT}[family]
        empty = count_primes(IntervalSpec(prime_family, k, n0),
                             engine, prec, max_prec) == 0
        return CounterexampleProbe(family, k, n_from, n_to, found=True,
                                   n0=n0, prime_count=count0,
                                   anchor_kind="prime",
                                   derived_interval_empty=empty)

    p_prev = engine.prev_prime(n0)
    p_next = engine.next_prime(n0)

    def cert_leq(make_a, make_b) -> bool:
        # a <= b certified (a.hi <= b.lo), escalating; both sides are
        # monotone consequences of p_prev < n0 < p_next, so this settles
        p = prec
        while True:
            a, b = make_a(p), make_b(p)
            if a.hi <= b.lo:
                return True
            if a.lo > b.hi:
                return False
            if p >= max_prec:
                raise PrecisionExhausted(
                    f"containment undecided around n0={n0} at {max_prec} bits")
            p = min(p * 2, max_prec)

    # derived prime-indexed interval and its containment in the widened
    # integer-indexed one
    if family is Family.EXP_REDUCED_INT:
        derived = IntervalSpec(Family.EXP_REDUCED_PRIME, k, p_next)
        contained = cert_leq(lambda p: _interval_bounds("L1", k, n0, p)[0],
                             lambda p: _interval_bounds("L1", k, p_next, p)[0])
    elif family is Family.FRAC_RIGHT:
        derived = IntervalSpec(Family.FRAC_RIGHT, k, p_prev)
        contained = cert_leq(lambda p: _interval_bounds("L5", k, p_prev, p)[1],
                             lambda p: _interval_bounds("L5", k, n0, p)[1])
    else:
        derived = IntervalSpec(Family.FRAC_LEFT, k, p_next)
        contained = cert_leq(lambda p: _interval_bounds("L7", k, n0, p)[0],
                             lambda p: _interval_bounds("L7", k, p_next, p)[0])
    empty = count_primes(derived, engine, prec, max_prec) == 0
    return CounterexampleProbe(family, k, n_from, n_to, found=True,
                               n0=n0, prime_count=count0,
                               anchor_kind="bracketed",
                               bracket=(p_prev, p_next),
                               derived_interval_empty=empty,
                               containment_certified=contained)
