"""Interval families with certified endpoints and prime counts.

Six families are supported, all open intervals parameterized by an exact
real k and an integer n (or prime p):

  EXP_FULL(k, n)          = ((n-1)^k, n^k)
  EXP_REDUCED_INT(k, n)   = (n - (k - 1/2) n^((k-1)/k), n)
  EXP_REDUCED_PRIME(k, p) = same with p prime
  FRAC_RIGHT(k, n)        = (n, k/(k-1) n)
  FRAC_LEFT(k, n)         = ((k-1)/k n, n)
  FRAC_TWO_SIDED(k, n)    = ((k-1)/k n, k/(k-1) n)

Endpoints are exact rationals whenever possible; otherwise outward
enclosures.  A prime landing inside an endpoint enclosure after maximum
precision escalation makes the count Uncertain, never a guess.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from .certified import (CertifiedValue, RealNumber, DEFAULT_PRECISION_BITS,
                        MAX_PRECISION_BITS, certified_floor, pow_enclosure)
from .errors import PrecisionExhausted, UsageError
from .primes import PrimeEngine, is_prime

_N_CHUNK = 65536


class Family(str, Enum):
    EXP_FULL = "exp-full"
    EXP_REDUCED_INT = "exp-reduced-int"
    EXP_REDUCED_PRIME = "exp-reduced-prime"
    FRAC_RIGHT = "frac-right"
    FRAC_LEFT = "frac-left"
    FRAC_TWO_SIDED = "frac-two-sided"


@dataclass(frozen=True)
class IntervalSpec:
    family: Family
    k: RealNumber
    n: int    # the anchor integer (a prime for EXP_REDUCED_PRIME)

    def __post_init__(self):
        if self.n < 2:
            raise UsageError(f"interval anchor must be >= 2, got {self.n}")
        if self.family is Family.EXP_REDUCED_PRIME and not is_prime(self.n):
            raise UsageError(f"EXP_REDUCED_PRIME needs a prime anchor, got {self.n}")

    def describe(self) -> str:
        return f"{self.family.value}(k={self.k}, n={self.n})"


def _reduced_lower(k: RealNumber, n: int, prec: int) -> CertifiedValue:
    """n - (k - 1/2) * n^((k-1)/k)."""
    if k.is_rational:
        kf = k.fraction
        coeff = kf - Fraction(1, 2)
        term = coeff * pow_enclosure(n, (kf - 1) / kf, prec)
    else:
        kcv = k.enclosure(prec)
        term = (kcv - Fraction(1, 2)) * pow_enclosure(n, 1 - kcv.inverse(), prec)
    return Fraction(n) - term


def endpoints(spec: IntervalSpec,
              prec: int = DEFAULT_PRECISION_BITS) -> tuple[CertifiedValue, CertifiedValue]:
    """Certified (lower, upper) endpoint enclosures; exact where possible."""
    k, n = spec.k, spec.n
    fam = spec.family
    if fam is Family.EXP_FULL:
        lo = pow_enclosure(n - 1, k, prec) if n > 1 else CertifiedValue.exact(0, prec)
        hi = pow_enclosure(n, k, prec)
        return lo, hi
    if fam in (Family.EXP_REDUCED_INT, Family.EXP_REDUCED_PRIME):
        return _reduced_lower(k, n, prec), CertifiedValue.exact(n, prec)
    if not k.is_rational:
        kcv = k.enclosure(prec)
        left = (1 - kcv.inverse()) * n
        right = Fraction(n) * kcv * (kcv - 1).inverse()
    else:
        kf = k.fraction
        left = CertifiedValue.exact((kf - 1) / kf * n, prec)
        right = CertifiedValue.exact(kf / (kf - 1) * n, prec)
    if fam is Family.FRAC_RIGHT:
        return CertifiedValue.exact(n, prec), right
    if fam is Family.FRAC_LEFT:
        return left, CertifiedValue.exact(n, prec)
    return left, right


def _boundary_primes(cv: CertifiedValue) -> list[int]:
    """Integers inside the enclosure whose side of the endpoint is unresolved."""
    if cv.is_exact:
        return []
    # conservative closed hull: any integer touching the enclosure
    lo_int = math.ceil(cv.lo)
    hi_int = math.floor(cv.hi)
    return [z for z in range(lo_int, hi_int + 1) if is_prime(z)]


def count_primes(spec: IntervalSpec, engine: PrimeEngine,
                 prec: int = DEFAULT_PRECISION_BITS,
                 max_prec: int = MAX_PRECISION_BITS) -> int:
    """Number of primes strictly between the endpoints.

    Raises PrecisionExhausted when a prime sits inside an endpoint
    enclosure even at the precision cap.
    """
    p = prec
    while True:
        lo, hi = endpoints(spec, p)
        if not _boundary_primes(lo) and not _boundary_primes(hi):
            break
        if p >= max_prec:
            raise PrecisionExhausted(
                f"prime inside endpoint enclosure of {spec.describe()} at {max_prec} bits")
        p = min(p * 2, max_prec)
    first = max(math.floor(lo.hi) + 1, 2)  # smallest prime candidate certainly > lower endpoint
    last = math.ceil(hi.lo) - 1            # largest integer certainly < upper endpoint
    if last < first:
        return 0
    return engine.count_primes_in_range(first - 1, last + 1)


@dataclass
class Verdict:
    outcome: str                 # "HoldsForAll" | "FailsAt" | "UncertainAt"
    n_from: int
    n_to: int
    required_count: int
    family: Family
    k: RealNumber
    fail_n: Optional[int] = None
    fail_count: Optional[int] = None
    uncertain_ns: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "report": "family-verdict",
            "family": self.family.value,
            "k": str(self.k),
            "required_count": self.required_count,
            "range": [self.n_from, self.n_to],
            "outcome": self.outcome,
            "fail_n": self.fail_n,
            "fail_count": self.fail_count,
            "uncertain_ns": list(self.uncertain_ns),
        }


def _rational_endpoint_coeffs(family: Family, k: RealNumber):
    """Per-n exact endpoint formulas (lo_num, lo_den, hi_num, hi_den, shift)
    when the family has rational endpoints; None otherwise.

    Endpoints are (lo_num*n/lo_den, hi_num*n/hi_den) except EXP_FULL with
    integer k, which is handled separately.
    """
    if not k.is_rational:
        return None
    kf = k.fraction
    if family is Family.FRAC_RIGHT:
        return (Fraction(1), kf / (kf - 1))
    if family is Family.FRAC_LEFT:
        return ((kf - 1) / kf, Fraction(1))
    if family is Family.FRAC_TWO_SIDED:
        return ((kf - 1) / kf, kf / (kf - 1))
    return None


def _counts_fast(family: Family, k: RealNumber, ns: np.ndarray,
                 engine: PrimeEngine) -> Optional[np.ndarray]:
    """Vectorized per-n prime counts for families with exact endpoints."""
    if family is Family.EXP_FULL and k.is_rational and k.fraction.denominator == 1:
        e = k.fraction.numerator
        lo_first = (ns - 1) ** e + 1          # q > (n-1)^e
        hi_last = ns ** e - 1                 # q < n^e
    else:
        coeffs = _rational_endpoint_coeffs(family, k)
        if coeffs is None:
            return None
        c_lo, c_hi = coeffs
        lo_first = (c_lo.numerator * ns) // c_lo.denominator + 1
        hi_last = -((-c_hi.numerator * ns) // c_hi.denominator) - 1
    primes = engine.primes_array_upto(int(hi_last.max()))
    lo_idx = np.searchsorted(primes, lo_first, side="left")
    hi_idx = np.searchsorted(primes, hi_last, side="right")
    return (hi_idx - lo_idx).astype(np.int64)


def verify_family(family: Family, k, m: int, n_from: int, n_to: int,
                  engine: PrimeEngine,
                  prec: int = DEFAULT_PRECISION_BITS,
                  max_prec: int = MAX_PRECISION_BITS,
                  workers: int = 1) -> Verdict:
    """Check count_primes >= m for every n in [n_from, n_to].

    Reports the minimal failing n.  Deterministic regardless of workers.
    """
    k = RealNumber(k)
    if n_from < 2 or n_from > n_to:
        raise UsageError(f"need 2 <= n_from <= n_to, got [{n_from}, {n_to}]")
    ns = np.arange(n_from, n_to + 1, dtype=np.int64)
    counts = _counts_fast(family, k, ns, engine)
    if counts is not None:
        bad = np.flatnonzero(counts < m)
        if bad.size:
            n_bad = int(ns[bad[0]])
            return Verdict("FailsAt", n_from, n_to, m, family, k,
                           fail_n=n_bad, fail_count=int(counts[bad[0]]))
        return Verdict("HoldsForAll", n_from, n_to, m, family, k)

    # generic certified path, chunked deterministically
    chunks = [range(i, min(i + _N_CHUNK, n_to + 1))
              for i in range(n_from, n_to + 1, _N_CHUNK)]

    def run_chunk(rng):
        fail = None
        uncertain = []
        for n in rng:
            spec = IntervalSpec(family, k, n)
            try:
                c = count_primes(spec, engine, prec, max_prec)
            except PrecisionExhausted:
                uncertain.append(n)
                continue
            if c < m and fail is None:
                fail = (n, c)
        return fail, uncertain

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_chunk, chunks))
    else:
        results = [run_chunk(c) for c in chunks]

    uncertain_all = []
    for fail, uncertain in results:
        uncertain_all.extend(uncertain)
        if fail is not None:
            return Verdict("FailsAt", n_from, n_to, m, family, k,
                           fail_n=fail[0], fail_count=fail[1],
                           uncertain_ns=uncertain_all)
    if uncertain_all:
        return Verdict("UncertainAt", n_from, n_to, m, family, k,
                       uncertain_ns=uncertain_all)
    return Verdict("HoldsForAll", n_from, n_to, m, family, k)


def min_valid_n(family: Family, k, m: int, n_to: int,
                engine: PrimeEngine,
                prec: int = DEFAULT_PRECISION_BITS,
                max_prec: int = MAX_PRECISION_BITS) -> Optional[int]:
    """Smallest N with count_primes >= m for all n in [N, n_to]; None if none."""
    k = RealNumber(k)
    ns = np.arange(2, n_to + 1, dtype=np.int64)
    counts = _counts_fast(family, k, ns, engine)
    if counts is not None:
        bad = np.flatnonzero(counts < m)
        if not bad.size:
            return 2
        last_fail = int(ns[bad[-1]])
    else:
        last_fail = None
        for n in range(2, n_to + 1):
            if count_primes(IntervalSpec(family, k, n), engine, prec, max_prec) < m:
                last_fail = n
        if last_fail is None:
            return 2
    if last_fail >= n_to:
        return None
    return last_fail + 1


@dataclass
class ContainmentCertificate:
    k: RealNumber
    m: int
    contained: bool
    floor_power: int                  # floor(m^k)
    inner_lo: CertifiedValue          # floor(m^k) - (k-1/2) floor(m^k)^((k-1)/k)
    outer_lo: CertifiedValue          # (m-1)^k
    margin: CertifiedValue            # inner_lo - outer_lo

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "report": "containment",
            "k": str(self.k),
            "m": self.m,
            "contained": self.contained,
            "floor_power": self.floor_power,
            "inner_lo": self.inner_lo.to_json(),
            "outer_lo": self.outer_lo.to_json(),
            "margin": self.margin.to_json(),
        }


def containment_check(k, m: int,
                      prec: int = DEFAULT_PRECISION_BITS,
                      max_prec: int = MAX_PRECISION_BITS) -> ContainmentCertificate:
    """Certify (floor(m^k) - (k-1/2) floor(m^k)^((k-1)/k), floor(m^k)) ⊆ ((m-1)^k, m^k).

    The upper inclusion floor(m^k) <= m^k is automatic; the certificate
    decides the lower one and reports the margin.  Exact when k is an
    integer; otherwise decided by escalating certified comparison.
    """
    k = RealNumber(k)
    if m < 2:
        raise UsageError(f"containment_check needs m >= 2, got {m}")
    fl = certified_floor(lambda p: pow_enclosure(m, k, p), prec, max_prec)

    p = prec
    while True:
        inner_lo = _reduced_lower(k, fl, p)
        outer_lo = pow_enclosure(m - 1, k, p) if m > 1 else CertifiedValue.exact(0, p)
        margin = inner_lo - outer_lo
        if margin.lo >= 0:
            return ContainmentCertificate(k, m, True, fl, inner_lo, outer_lo, margin)
        if margin.hi < 0:
            return ContainmentCertificate(k, m, False, fl, inner_lo, outer_lo, margin)
        if p >= max_prec:
            raise PrecisionExhausted(
                f"containment margin sign undecided for k={k}, m={m} at {max_prec} bits")
        p = min(p * 2, max_prec)


def family_count_rows(family: Family, k, n_from: int, n_to: int,
                      engine: PrimeEngine,
                      prec: int = DEFAULT_PRECISION_BITS,
                      max_prec: int = MAX_PRECISION_BITS):
    """CSV rows of per-n endpoint enclosures and prime counts."""
    k = RealNumber(k)
    yield ["n", "lo_lo", "lo_hi", "hi_lo", "hi_hi", "count"]
    for n in range(n_from, n_to + 1):
        spec = IntervalSpec(family, k, n)
        lo, hi = endpoints(spec, prec)
        c = count_primes(spec, engine, prec, max_prec)
        yield [n,
               f"{lo.lo.numerator}/{lo.lo.denominator}",
               f"{lo.hi.numerator}/{lo.hi.denominator}",
               f"{hi.lo.numerator}/{hi.lo.denominator}",
               f"{hi.hi.numerator}/{hi.hi.denominator}",
               c]
