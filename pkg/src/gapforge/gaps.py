"""Parametric gap inequalities evaluated over streams of consecutive primes.

A `GapBoundSpec` describes the right-hand side g(p_prev, p_next) of a
gap inequality; `scan` certifies gap < g (or gap <= g for the Dusart
variant, which is stated with a non-strict inequality) for every pair in
a range, collecting violations and the extremal ratio gap / bound.

Strictness convention: all bounds except Dusart are strict "<", so a gap
exactly equal to a rational bound counts as a violation.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .certified import (CertifiedValue, RealNumber, DEFAULT_PRECISION_BITS,
                        MAX_PRECISION_BITS, certified_floor, log_enclosure,
                        pow_enclosure)
from .errors import PrecisionExhausted, UsageError
from .primes import PrimeEngine, PrimePair

MIN_EXPONENTIAL_K = Fraction(40, 19)
BHP_EXPONENT = Fraction(21, 40)   # 0.525 exactly

_PAIR_CHUNK = 4096


class BoundVariant(str, Enum):
    BHP = "bhp"
    DUSART = "dusart"
    EXPONENTIAL = "exponential"
    FRACTIONAL_LOWER = "fractional-lower"
    FRACTIONAL_UPPER = "fractional-upper"
    CUSTOM = "custom"


@dataclass(frozen=True)
class GapBoundSpec:
    variant: BoundVariant
    k: Optional[RealNumber] = None
    coeff: Optional[RealNumber] = None
    exponent: Optional[RealNumber] = None
    anchor: str = "next"           # which prime the RHS is evaluated at
    truncated: bool = False        # 3-decimal truncated coefficient/exponent

    def __post_init__(self):
        if self.variant is BoundVariant.EXPONENTIAL:
            if self.k is None:
                raise UsageError("exponential bound needs k")
            if float(self.k) < float(MIN_EXPONENTIAL_K):
                warnings.warn(
                    f"exponential bound with k={self.k} < 40/19 is outside the "
                    "proven parameter range; scanning anyway", stacklevel=2)
        elif self.variant in (BoundVariant.FRACTIONAL_LOWER, BoundVariant.FRACTIONAL_UPPER):
            if self.k is None:
                raise UsageError(f"{self.variant.value} bound needs k")
            if float(self.k) < 2:
                warnings.warn(
                    f"{self.variant.value} bound with k={self.k} < 2 is outside "
                    "the proven parameter range; scanning anyway", stacklevel=2)
        elif self.variant is BoundVariant.CUSTOM:
            if self.coeff is None or self.exponent is None:
                raise UsageError("custom bound needs coeff and exponent")
            theta = float(self.exponent)
            if not 0 < theta < 1:
                raise UsageError(f"custom exponent must be in (0, 1), got {theta}")
            if self.anchor not in ("prev", "next"):
                raise UsageError(f"anchor must be 'prev' or 'next', got {self.anchor!r}")

    # convenience constructors --------------------------------------

    @classmethod
    def bhp(cls) -> "GapBoundSpec":
        return cls(BoundVariant.BHP)

    @classmethod
    def dusart(cls) -> "GapBoundSpec":
        return cls(BoundVariant.DUSART, anchor="prev")

    @classmethod
    def exponential(cls, k, truncated: bool = False) -> "GapBoundSpec":
        return cls(BoundVariant.EXPONENTIAL, k=RealNumber(k), truncated=truncated)

    @classmethod
    def fractional_lower(cls, k) -> "GapBoundSpec":
        return cls(BoundVariant.FRACTIONAL_LOWER, k=RealNumber(k), anchor="prev")

    @classmethod
    def fractional_upper(cls, k) -> "GapBoundSpec":
        return cls(BoundVariant.FRACTIONAL_UPPER, k=RealNumber(k))

    @classmethod
    def custom(cls, coeff, exponent, anchor: str = "next") -> "GapBoundSpec":
        return cls(BoundVariant.CUSTOM, coeff=RealNumber(coeff),
                   exponent=RealNumber(exponent), anchor=anchor)

    @property
    def strict(self) -> bool:
        """Whether the inequality is strict (all variants except Dusart)."""
        return self.variant is not BoundVariant.DUSART

    def describe(self) -> str:
        if self.variant is BoundVariant.BHP:
            return "gap < p_next^(21/40)"
        if self.variant is BoundVariant.DUSART:
            return "gap <= p_prev / (2 ln^2 p_prev)"
        if self.variant is BoundVariant.EXPONENTIAL:
            mode = " [truncated coefficients]" if self.truncated else ""
            return f"gap < (k - 1/2) * p_next^((k-1)/k), k = {self.k}{mode}"
        if self.variant is BoundVariant.FRACTIONAL_LOWER:
            return f"gap < p_prev / (k - 1), k = {self.k}"
        if self.variant is BoundVariant.FRACTIONAL_UPPER:
            return f"gap < p_next / k, k = {self.k}"
        return (f"gap < {self.coeff} * p_{self.anchor}^{self.exponent}")

    def to_json(self) -> dict:
        return {
            "variant": self.variant.value,
            "k": str(self.k) if self.k is not None else None,
            "coeff": str(self.coeff) if self.coeff is not None else None,
            "exponent": str(self.exponent) if self.exponent is not None else None,
            "anchor": self.anchor,
            "truncated": self.truncated,
            "rule": self.describe(),
        }


def _truncate_3dp(value: RealNumber, prec: int) -> Fraction:
    """floor(1000 * value) / 1000 — three-decimal display truncation."""
    if value.is_rational:
        return Fraction((value.fraction * 1000).__floor__(), 1000)
    n = certified_floor(lambda p: value.enclosure(p) * 1000, prec)
    return Fraction(n, 1000)


def bound_value(spec: GapBoundSpec, pair: PrimePair,
                prec: int = DEFAULT_PRECISION_BITS) -> CertifiedValue:
    """Certified enclosure of the bound's right-hand side for one pair."""
    if spec.variant is BoundVariant.BHP:
        return pow_enclosure(pair.p_next, BHP_EXPONENT, prec)

    if spec.variant is BoundVariant.DUSART:
        ln = log_enclosure(pair.p_prev, prec)
        return Fraction(pair.p_prev, 2) * (ln * ln).inverse()

    if spec.variant is BoundVariant.EXPONENTIAL:
        k = spec.k
        if spec.truncated:
            coeff = _truncate_3dp(
                RealNumber(k.fraction - Fraction(1, 2)) if k.is_rational
                else _shifted(k, -Fraction(1, 2), prec), prec)
            if k.is_rational:
                expo = _truncate_3dp(
                    RealNumber((k.fraction - 1) / k.fraction), prec)
            else:
                kcv = k.enclosure(prec)
                n = certified_floor(
                    lambda p: (1 - k.enclosure(p).inverse()) * 1000, prec)
                expo = Fraction(n, 1000)
            return coeff * pow_enclosure(pair.p_next, expo, prec)
        if k.is_rational:
            kf = k.fraction
            coeff = CertifiedValue.exact(kf - Fraction(1, 2), prec)
            expo = (kf - 1) / kf
            return coeff * pow_enclosure(pair.p_next, expo, prec)
        kcv = k.enclosure(prec)
        coeff = kcv - Fraction(1, 2)
        expo = 1 - kcv.inverse()
        return coeff * pow_enclosure(pair.p_next, expo, prec)

    if spec.variant is BoundVariant.FRACTIONAL_LOWER:
        if spec.k.is_rational:
            return CertifiedValue.exact(
                Fraction(pair.p_prev) / (spec.k.fraction - 1), prec)
        return Fraction(pair.p_prev) * (spec.k.enclosure(prec) - 1).inverse()

    if spec.variant is BoundVariant.FRACTIONAL_UPPER:
        if spec.k.is_rational:
            return CertifiedValue.exact(
                Fraction(pair.p_next) / spec.k.fraction, prec)
        return Fraction(pair.p_next) * spec.k.enclosure(prec).inverse()

    # custom: coeff * anchor^theta
    anchor = pair.p_prev if spec.anchor == "prev" else pair.p_next
    coeff = (CertifiedValue.exact(spec.coeff.fraction, prec)
             if spec.coeff.is_rational else spec.coeff.enclosure(prec))
    if spec.exponent.is_rational:
        return coeff * pow_enclosure(anchor, spec.exponent.fraction, prec)
    return coeff * pow_enclosure(anchor, spec.exponent.enclosure(prec), prec)


def _shifted(value: RealNumber, delta: Fraction, prec: int):
    # helper only used by the truncated path for irrational k
    class _Shifted:
        is_rational = False

        @staticmethod
        def enclosure(p):
            return value.enclosure(p) + delta
    return _Shifted()


def pair_holds(spec: GapBoundSpec, pair: PrimePair,
               prec: int = DEFAULT_PRECISION_BITS,
               max_prec: int = MAX_PRECISION_BITS) -> tuple[bool, CertifiedValue]:
    """Certified verdict: does the pair satisfy the bound?

    Returns (holds, bound enclosure at the deciding precision).  Raises
    PrecisionExhausted if the gap cannot be separated from the bound.
    """
    gap = pair.gap
    p = prec
    while True:
        bound = bound_value(spec, pair, p)
        if spec.strict:
            # holds iff gap < bound; equality with a rational bound violates
            if bound.is_exact:
                return gap < bound.lo, bound
            if gap < bound.lo:
                return True, bound
            if gap >= bound.hi:
                return False, bound
        else:
            # Dusart: holds iff gap <= bound
            if bound.is_exact:
                return gap <= bound.lo, bound
            if gap <= bound.lo:
                return True, bound
            if gap > bound.hi:
                return False, bound
        if p >= max_prec:
            raise PrecisionExhausted(
                f"gap {gap} vs bound undecided for pair {pair.as_tuple()} at {max_prec} bits")
        p = min(p * 2, max_prec)


def _ratio(spec: GapBoundSpec, pair: PrimePair, prec: int) -> CertifiedValue:
    return Fraction(pair.gap) / bound_value(spec, pair, prec)


@dataclass
class ScanReport:
    spec: GapBoundSpec
    lo: int
    hi: int
    verdict: str                       # "AllHold" | "Violations" | "Uncertain"
    violations: list = field(default_factory=list)   # (PrimePair, bound CV)
    uncertain: list = field(default_factory=list)    # PrimePair
    max_ratio: Optional[CertifiedValue] = None
    argmax_pair: Optional[PrimePair] = None
    pairs_scanned: int = 0
    precision_bits_used: int = DEFAULT_PRECISION_BITS

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "report": "scan",
            "bound": self.spec.to_json(),
            "range": [self.lo, self.hi],
            "verdict": self.verdict,
            "violations": [
                {"p_prev": p.p_prev, "p_next": p.p_next, "gap": p.gap,
                 "bound": cv.to_json()}
                for p, cv in self.violations
            ],
            "uncertain": [{"p_prev": p.p_prev, "p_next": p.p_next}
                          for p in self.uncertain],
            "max_ratio": self.max_ratio.to_json() if self.max_ratio else None,
            "argmax_pair": ({"p_prev": self.argmax_pair.p_prev,
                             "p_next": self.argmax_pair.p_next}
                            if self.argmax_pair else None),
            "pairs_scanned": self.pairs_scanned,
            "precision_bits_used": self.precision_bits_used,
        }

    def csv_rows(self):
        """One violation per row: p_prev, p_next, gap, bound_lo, bound_hi, ratio."""
        yield ["p_prev", "p_next", "gap", "bound_lo", "bound_hi", "ratio"]
        for pair, cv in self.violations:
            ratio = (Fraction(pair.gap) / cv).midpoint_float()
            yield [pair.p_prev, pair.p_next, pair.gap,
                   f"{cv.lo.numerator}/{cv.lo.denominator}",
                   f"{cv.hi.numerator}/{cv.hi.denominator}",
                   f"{ratio:.12g}"]


def _scan_chunk(spec, pairs, prec, max_prec):
    violations = []
    uncertain = []
    best_pair = None
    best_ratio = None
    for pair in pairs:
        try:
            holds, bound = pair_holds(spec, pair, prec, max_prec)
        except PrecisionExhausted:
            uncertain.append(pair)
            continue
        if not holds:
            violations.append((pair, bound))
        ratio = Fraction(pair.gap) / bound
        if best_ratio is None:
            best_pair, best_ratio = pair, ratio
        else:
            cmp = ratio.gt(best_ratio)
            p = prec
            while cmp is None and p < max_prec:
                p = min(p * 2, max_prec)
                ratio = _ratio(spec, pair, p)
                best_ratio = _ratio(spec, best_pair, p)
                cmp = ratio.gt(best_ratio)
            if cmp:   # ties (still None at cap) keep the smaller p_prev
                best_pair, best_ratio = pair, ratio
    return violations, uncertain, best_pair, best_ratio


def scan(spec: GapBoundSpec, lo: int, hi: int, engine: PrimeEngine,
         prec: int = DEFAULT_PRECISION_BITS,
         max_prec: int = MAX_PRECISION_BITS,
         workers: int = 1) -> ScanReport:
    """Certified evaluation of the bound over every pair in (lo, hi).

    Deterministic regardless of `workers`: pairs are chunked at fixed
    boundaries, chunks merged in ascending order, and the argmax ratio
    tie-break always keeps the smaller p_prev.
    """
    pairs = list(engine.consecutive_pairs(lo, hi))
    chunks = [pairs[i:i + _PAIR_CHUNK] for i in range(0, len(pairs), _PAIR_CHUNK)]

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda c: _scan_chunk(spec, c, prec, max_prec), chunks))
    else:
        results = [_scan_chunk(spec, c, prec, max_prec) for c in chunks]

    violations = []
    uncertain = []
    best_pair = None
    best_ratio = None
    for v, u, bp, br in results:
        violations.extend(v)
        uncertain.extend(u)
        if bp is None:
            continue
        if best_pair is None:
            best_pair, best_ratio = bp, br
        else:
            cmp = br.gt(best_ratio)
            p = prec
            while cmp is None and p < max_prec:
                p = min(p * 2, max_prec)
                br = _ratio(spec, bp, p)
                best_ratio = _ratio(spec, best_pair, p)
                cmp = br.gt(best_ratio)
            if cmp:
                best_pair, best_ratio = bp, br

    # every violation re-verifies under the independent primality check
    # and a freshly computed bound at doubled precision
    from .primes import is_prime
    for pair, _ in violations:
        assert is_prime(pair.p_prev) and is_prime(pair.p_next)
        reholds, _ = pair_holds(spec, pair, prec * 2, max(max_prec, prec * 2))
        assert not reholds

    if uncertain:
        verdict = "Uncertain"
    elif violations:
        verdict = "Violations"
    else:
        verdict = "AllHold"
    return ScanReport(spec=spec, lo=lo, hi=hi, verdict=verdict,
                      violations=violations, uncertain=uncertain,
                      max_ratio=best_ratio, argmax_pair=best_pair,
                      pairs_scanned=len(pairs), precision_bits_used=prec)


def first_violation(spec: GapBoundSpec, lo: int, engine: PrimeEngine,
                    prec: int = DEFAULT_PRECISION_BITS,
                    max_prec: int = MAX_PRECISION_BITS) -> Optional[PrimePair]:
    """Smallest-p_prev violating pair at or above lo; None if none below ceiling."""
    if lo < 2:
        raise UsageError(f"first_violation needs lo >= 2, got {lo}")
    for pair in engine.consecutive_pairs(lo, engine.ceiling):
        holds, _ = pair_holds(spec, pair, prec, max_prec)
        if not holds:
            return pair
    return None


def empirical_threshold(spec: GapBoundSpec, engine: PrimeEngine,
                        prec: int = DEFAULT_PRECISION_BITS,
                        max_prec: int = MAX_PRECISION_BITS,
                        scan_floor: int = 2) -> int:
    """Frontier-limited surrogate for the bound's effective threshold.

    next_prime(p_prev of the largest violating pair) when violations
    exist below the ceiling, else the scan floor.  Only meaningful below
    the scanned frontier; says nothing about larger primes.
    """
    report = scan(spec, scan_floor, engine.ceiling, engine, prec, max_prec)
    if not report.violations:
        return scan_floor
    largest = max(p.p_prev for p, _ in report.violations)
    return engine.next_prime(largest)
