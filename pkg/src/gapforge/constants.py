"""Closed-form thresholds and feasibility relations for the cube-interval
two-prime construction.

Everything that is integer- or rational-valued is computed with exact
integer arithmetic (the "1.5" exponents are exactly 3/2 and "0.525" is
exactly 21/40, so inequalities like 2*C < (g(g-1))^(3/2) reduce to
integer comparisons after squaring).  Genuinely irrational quantities
are returned as certified enclosures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .certified import (CertifiedValue, RealNumber, DEFAULT_PRECISION_BITS,
                        MAX_PRECISION_BITS, exp_enclosure, pow_enclosure,
                        sqrt_enclosure)
from .errors import UsageError
from .gaps import BHP_EXPONENT
from .primes import PrimeEngine, PrimePair

JOINT_THRESHOLD_INDEX = 463   # prime index floor of the joint fractional constant


@dataclass
class ConstantReport:
    name: str
    inputs: dict
    value: Union[int, Fraction, CertifiedValue]
    derivation_note: str = ""
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        if isinstance(self.value, CertifiedValue):
            value = self.value.to_json()
        elif isinstance(self.value, Fraction):
            value = {"exact": f"{self.value.numerator}/{self.value.denominator}",
                     "approx": float(self.value)}
        else:
            value = {"exact": str(self.value), "approx": float(self.value)}
        extras = {}
        for key, item in self.extras.items():
            if isinstance(item, CertifiedValue):
                extras[key] = item.to_json()
            elif isinstance(item, Fraction):
                extras[key] = f"{item.numerator}/{item.denominator}"
            else:
                extras[key] = item
        return {
            "schema_version": 1,
            "report": "constant",
            "name": self.name,
            "inputs": {key: str(val) for key, val in self.inputs.items()},
            "value": value,
            "derivation_note": self.derivation_note,
            "extras": extras,
        }


def _isqrt_pow3(n: int) -> int:
    """floor(n^(3/2)) by integer square root."""
    return math.isqrt(n ** 3)


def _floor_pow(base: int, num: int, den: int) -> int:
    """Exact floor(base^(num/den)): largest t with t^den <= base^num."""
    target = base ** num
    t = int(round(base ** (num / den)))
    while t ** den > target:
        t -= 1
    while (t + 1) ** den <= target:
        t += 1
    return t


def cube_window_k(g: int, prec: int = DEFAULT_PRECISION_BITS) -> CertifiedValue:
    """The fractional-family parameter g^(3/2) / (g^(3/2) - (g-1)^(3/2)).

    With this k, the two-sided fractional interval around n ~ (g(g-1))^(3/2)
    lands inside the consecutive cubes ((g-1)^3, g^3).
    """
    if g < 3:
        raise UsageError(f"cube_window_k needs g >= 3, got {g}")
    a = g * sqrt_enclosure(g, prec)              # g^(3/2)
    b = (g - 1) * sqrt_enclosure(g - 1, prec)    # (g-1)^(3/2)
    return a * (a - b).inverse()


def cube_window_threshold(g: int) -> int:
    """Exact integer threshold g^2 * (floor(g^(2/19)) + 1)."""
    if g < 2:
        raise UsageError(f"cube_window_threshold needs g >= 2, got {g}")
    return g * g * (_floor_pow(g, 2, 19) + 1)


@dataclass
class HeadroomReport:
    g: int
    holds: bool                       # 2*threshold < (g(g-1))^(3/2), exact
    threshold: int
    margin: CertifiedValue            # (g(g-1))^(3/2) - 2*threshold
    intermediate_holds: Optional[bool]  # 2*threshold < 2*(g^(40/19) + g^2)
    intermediate_margin: Optional[CertifiedValue]

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "report": "headroom",
            "g": self.g,
            "holds": self.holds,
            "threshold": self.threshold,
            "margin": self.margin.to_json(),
            "intermediate_holds": self.intermediate_holds,
            "intermediate_margin": (self.intermediate_margin.to_json()
                                    if self.intermediate_margin else None),
        }


def threshold_headroom_check(g: int,
                             prec: int = DEFAULT_PRECISION_BITS) -> HeadroomReport:
    """Certify 2*threshold(g) < (g(g-1))^(3/2), with margins.

    Decided exactly: 2C < N^(3/2) with N = g(g-1) iff (2C)^2 < N^3.  The
    intermediate chain 2C < 2(g^(40/19) + g^2) reduces (with
    C = g^2 (t+1), t = floor(g^(2/19))) to t^19 < g^2, which is exact
    integer arithmetic as well.
    """
    c = cube_window_threshold(g)
    n = g * (g - 1)
    holds = (2 * c) ** 2 < n ** 3
    margin = sqrt_enclosure(n ** 3, prec) - 2 * c
    t = _floor_pow(g, 2, 19)
    inter_holds = t ** 19 < g * g
    inter_margin = (2 * (g * g * pow_enclosure(g, Fraction(2, 19), prec) + g * g)
                    - 2 * c)
    return HeadroomReport(g=g, holds=holds, threshold=c, margin=margin,
                          intermediate_holds=inter_holds,
                          intermediate_margin=inter_margin)


def cube_midpoint_integer(g: int,
                          prec: int = DEFAULT_PRECISION_BITS) -> tuple[int, CertifiedValue]:
    """Nearest integer n0 to (g(g-1))^(3/2) and the offset theta = n0 - (g(g-1))^(3/2).

    Ties cannot occur: g(g-1) is never a perfect square for g >= 2
    (consecutive integers are coprime and not both squares), so the
    value is irrational and the nearest integer is decided exactly via
    (2*n0 -/+ 1)^2 against 4*(g(g-1))^3.
    """
    if g < 2:
        raise UsageError(f"cube_midpoint_integer needs g >= 2, got {g}")
    n = g * (g - 1)
    target = n ** 3
    s = math.isqrt(target)               # s <= n^(3/2) < s+1
    # nearest integer is s if n^(3/2) < s + 1/2, i.e. 4*target < (2s+1)^2
    n0 = s if 4 * target < (2 * s + 1) ** 2 else s + 1
    theta = n0 - sqrt_enclosure(target, prec)
    return n0, theta


def min_k_for_gap_exponent(theta) -> Fraction:
    """Least k with (k-1)/k >= theta: exactly 1/(1-theta).

    This is the feasibility threshold for deriving the power-interval
    theorem from a gap bound of order p^theta.
    """
    theta = Fraction(theta) if not isinstance(theta, RealNumber) else theta.fraction
    if not 0 < theta < 1:
        raise UsageError(f"gap exponent must be in (0, 1), got {theta}")
    return 1 / (1 - theta)


def joint_fractional_threshold(k, engine: PrimeEngine,
                               prec: int = DEFAULT_PRECISION_BITS,
                               max_prec: int = MAX_PRECISION_BITS) -> ConstantReport:
    """The threshold max(p_r, p_463) where p_r is the least prime above exp(sqrt(k)).

    Above this threshold both one-sided fractional statements hold
    simultaneously for parameter k.  Note the exp(sqrt(k)) cutoff has
    slack: the underlying gap bound only needs 2 ln^2 p > k, i.e.
    p > exp(sqrt(k/2)).
    """
    k = RealNumber(k)
    if float(k) < 2:
        raise UsageError(f"joint threshold needs k >= 2, got {k}")
    p = prec
    while True:
        root = (sqrt_enclosure(k.fraction, p) if k.is_rational
                else _sqrt_real(k, p))
        cutoff = exp_enclosure(root, p)
        lo_prime = engine.next_prime(math.floor(cutoff.lo))
        if lo_prime > cutoff.hi:
            p_r = lo_prime
            break
        if p >= max_prec:
            from .errors import PrecisionExhausted
            raise PrecisionExhausted(
                f"a prime sits inside the exp(sqrt(k)) enclosure at {max_prec} bits")
        p = min(p * 2, max_prec)
    p_463 = engine.nth_prime(JOINT_THRESHOLD_INDEX)
    value = max(p_r, p_463)
    return ConstantReport(
        name="joint-fractional-threshold",
        inputs={"k": k},
        value=value,
        derivation_note=(
            "least prime above exp(sqrt(k)), floored at the 463rd prime; the "
            "exp(sqrt(k)) cutoff is conservative, exp(sqrt(k/2)) already suffices "
            "for the underlying gap bound"),
        extras={"p_r": p_r, "p_463": p_463,
                "cutoff": cutoff},
    )


def _sqrt_real(k: RealNumber, prec: int) -> CertifiedValue:
    cv = k.enclosure(prec)
    lo = sqrt_enclosure(cv.lo, prec)
    hi = sqrt_enclosure(cv.hi, prec)
    return CertifiedValue(lo.lo, hi.hi, prec)


@dataclass
class DominanceReport:
    g: int
    lo: int
    hi: int
    violations: list            # PrimePair where p_next^(21/40) >= p_prev / k(g)
    pairs_scanned: int

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "report": "gap-dominance",
            "g": self.g,
            "range": [self.lo, self.hi],
            "holds": self.holds,
            "violations": [{"p_prev": p.p_prev, "p_next": p.p_next}
                           for p in self.violations],
            "pairs_scanned": self.pairs_scanned,
        }


def gap_dominance_scan(g: int, engine: PrimeEngine, hi: Optional[int] = None,
                       prec: int = DEFAULT_PRECISION_BITS,
                       max_prec: int = MAX_PRECISION_BITS) -> DominanceReport:
    """Scan pairs with p_prev above threshold(g), checking
    p_next^(21/40) < p_prev / k(g)  (strict).

    This is the analytic link that justifies the closed-form threshold;
    the scan probes it empirically below the ceiling.
    """
    lo = cube_window_threshold(g)
    hi = hi if hi is not None else engine.ceiling
    violations = []
    scanned = 0
    k_cache: dict[int, CertifiedValue] = {}

    def k_at(p_bits: int) -> CertifiedValue:
        if p_bits not in k_cache:
            k_cache[p_bits] = cube_window_k(g, p_bits)
        return k_cache[p_bits]

    for pair in engine.consecutive_pairs(lo, hi):
        if pair.p_prev <= lo:
            continue
        scanned += 1
        p = prec
        while True:
            lhs = pow_enclosure(pair.p_next, BHP_EXPONENT, p)
            rhs = Fraction(pair.p_prev) * k_at(p).inverse()
            verdict = lhs.lt(rhs)
            if verdict is not None:
                break
            if p >= max_prec:
                verdict = False   # treated as violation, surfaced loudly
                break
            p = min(p * 2, max_prec)
        if not verdict:
            violations.append(pair)
    return DominanceReport(g=g, lo=lo, hi=hi, violations=violations,
                           pairs_scanned=scanned)
