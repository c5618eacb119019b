"""Outward-rounded rational enclosures of real quantities.

Every irrational number that enters a verdict is carried as a pair of
exact rationals (lo, hi) bracketing the true value.  The only places
where rounding happens at all are the MPFR primitives in this module
(pow, exp, log, sqrt); everything downstream is exact `Fraction`
arithmetic, so enclosures stay sound by construction.

Comparisons are trichotomous: an enclosure either decides a question or
it does not, in which case the caller escalates precision (doubling up
to a cap) and finally raises `PrecisionExhausted` rather than guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

import gmpy2

from .errors import PrecisionExhausted, UsageError

DEFAULT_PRECISION_BITS = 96
MAX_PRECISION_BITS = 1024

_RD = gmpy2.RoundDown
_RU = gmpy2.RoundUp

Rational = Union[int, Fraction]


def _to_fraction(x: "gmpy2.mpfr") -> Fraction:
    num, den = x.as_integer_ratio()
    return Fraction(int(num), int(den))


def _mpfr_dir(value: Fraction, prec: int, rounding) -> "gmpy2.mpfr":
    with gmpy2.context(precision=prec, round=rounding):
        return gmpy2.mpfr(gmpy2.mpq(value.numerator, value.denominator))


@dataclass(frozen=True)
class CertifiedValue:
    """An outward-rounded enclosure lo <= true value <= hi."""

    lo: Fraction
    hi: Fraction
    precision_bits: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"inverted enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, value: Rational, precision_bits: int = 0) -> "CertifiedValue":
        f = Fraction(value)
        return cls(f, f, precision_bits)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint_float(self) -> float:
        return float((self.lo + self.hi) / 2)

    # -- exact interval arithmetic ------------------------------------

    def _coerce(self, other) -> "CertifiedValue":
        if isinstance(other, CertifiedValue):
            return other
        return CertifiedValue.exact(other)

    def __add__(self, other) -> "CertifiedValue":
        o = self._coerce(other)
        return CertifiedValue(self.lo + o.lo, self.hi + o.hi,
                              max(self.precision_bits, o.precision_bits))

    __radd__ = __add__

    def __sub__(self, other) -> "CertifiedValue":
        o = self._coerce(other)
        return CertifiedValue(self.lo - o.hi, self.hi - o.lo,
                              max(self.precision_bits, o.precision_bits))

    def __rsub__(self, other) -> "CertifiedValue":
        return self._coerce(other) - self

    def __neg__(self) -> "CertifiedValue":
        return CertifiedValue(-self.hi, -self.lo, self.precision_bits)

    def __mul__(self, other) -> "CertifiedValue":
        o = self._coerce(other)
        products = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return CertifiedValue(min(products), max(products),
                              max(self.precision_bits, o.precision_bits))

    __rmul__ = __mul__

    def inverse(self) -> "CertifiedValue":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("enclosure straddles zero")
        return CertifiedValue(1 / self.hi, 1 / self.lo, self.precision_bits)

    def __truediv__(self, other) -> "CertifiedValue":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "CertifiedValue":
        return self._coerce(other) * self.inverse()

    # -- trichotomous comparisons (None = undecided) ------------------

    def lt(self, other) -> Optional[bool]:
        """Certified self < other, or None if the enclosures overlap."""
        o = self._coerce(other)
        if self.hi < o.lo:
            return True
        if self.lo > o.hi:
            return False
        if self.is_exact and o.is_exact:
            return self.lo < o.lo
        return None

    def gt(self, other) -> Optional[bool]:
        return self._coerce(other).lt(self)

    def contains(self, value: Rational) -> bool:
        return self.lo <= value <= self.hi

    def nested_in(self, outer: "CertifiedValue") -> bool:
        return outer.lo <= self.lo and self.hi <= outer.hi

    # -- rendering ----------------------------------------------------

    def decimal_bracket(self, digits: int = 15) -> str:
        """Render as 'lo…hi' decimal bracket; exact values render once."""
        if self.is_exact:
            if self.lo.denominator == 1:
                return str(self.lo.numerator)
            return f"{self.lo.numerator}/{self.lo.denominator}"
        scale = 10 ** digits
        lo = math.floor(self.lo * scale) / Fraction(scale)
        hi = math.ceil(self.hi * scale) / Fraction(scale)
        return f"{float(lo):.{digits}g}...{float(hi):.{digits}g}"

    def to_json(self) -> dict:
        return {
            "lo": f"{self.lo.numerator}/{self.lo.denominator}",
            "hi": f"{self.hi.numerator}/{self.hi.denominator}",
            "approx": self.midpoint_float(),
            "precision_bits": self.precision_bits,
        }


class RealNumber:
    """An exact representation of a real parameter (k, c, theta).

    Either a rational carried as `Fraction`, or the square root of a
    positive integer carried symbolically so that powers of it are
    evaluated with certified arithmetic instead of a truncated decimal.
    Accepted input forms: int, Fraction, "p/q", a decimal string, or
    "sqrtN" (e.g. "sqrt5").
    """

    __slots__ = ("_frac", "_radicand")

    def __init__(self, value):
        self._frac: Optional[Fraction] = None
        self._radicand: Optional[int] = None
        if isinstance(value, RealNumber):
            self._frac, self._radicand = value._frac, value._radicand
            return
        if isinstance(value, (int, Fraction)):
            self._frac = Fraction(value)
            return
        if isinstance(value, str):
            text = value.strip().lower()
            if text.startswith("sqrt"):
                rad = int(text[4:])
                if rad <= 0:
                    raise UsageError(f"sqrt argument must be positive: {value!r}")
                root = math.isqrt(rad)
                if root * root == rad:
                    self._frac = Fraction(root)
                else:
                    self._radicand = rad
                return
            # "p/q" and decimal strings are both exact rationals
            self._frac = Fraction(text)
            return
        if isinstance(value, float):
            raise UsageError(
                "refusing float input for an exact parameter; pass a string or Fraction")
        raise UsageError(f"cannot interpret {value!r} as a real parameter")

    @property
    def is_rational(self) -> bool:
        return self._frac is not None

    @property
    def fraction(self) -> Fraction:
        if self._frac is None:
            raise ValueError("irrational parameter has no exact fraction")
        return self._frac

    def enclosure(self, prec: int) -> CertifiedValue:
        if self._frac is not None:
            return CertifiedValue.exact(self._frac, prec)
        return sqrt_enclosure(Fraction(self._radicand), prec)

    def __float__(self) -> float:
        if self._frac is not None:
            return float(self._frac)
        return math.sqrt(self._radicand)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RealNumber):
            return NotImplemented
        return self._frac == other._frac and self._radicand == other._radicand

    def __hash__(self):
        return hash((self._frac, self._radicand))

    def __str__(self) -> str:
        if self._frac is not None:
            f = self._frac
            return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
        return f"sqrt{self._radicand}"

    def __repr__(self) -> str:
        return f"RealNumber({str(self)!r})"


# ---------------------------------------------------------------------
# MPFR-backed enclosure primitives.  All take exact rational inputs and
# produce CertifiedValue results via directed rounding.
# ---------------------------------------------------------------------

def sqrt_enclosure(x: Rational, prec: int) -> CertifiedValue:
    x = Fraction(x)
    if x < 0:
        raise ValueError("sqrt of negative value")
    # exact when x is a perfect square of a rational
    rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return CertifiedValue.exact(Fraction(rn, rd), prec)
    with gmpy2.context(precision=prec, round=_RD):
        lo = gmpy2.sqrt(_mpfr_dir(x, prec, _RD))
    with gmpy2.context(precision=prec, round=_RU):
        hi = gmpy2.sqrt(_mpfr_dir(x, prec, _RU))
    return CertifiedValue(_to_fraction(lo), _to_fraction(hi), prec)


def log_enclosure(x: Rational, prec: int) -> CertifiedValue:
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log of non-positive value")
    if x == 1:
        return CertifiedValue.exact(0, prec)
    with gmpy2.context(precision=prec, round=_RD):
        lo = gmpy2.log(_mpfr_dir(x, prec, _RD))
    with gmpy2.context(precision=prec, round=_RU):
        hi = gmpy2.log(_mpfr_dir(x, prec, _RU))
    return CertifiedValue(_to_fraction(lo), _to_fraction(hi), prec)


def exp_enclosure(x: Union[Rational, CertifiedValue], prec: int) -> CertifiedValue:
    if not isinstance(x, CertifiedValue):
        x = CertifiedValue.exact(x)
    with gmpy2.context(precision=prec, round=_RD):
        lo = gmpy2.exp(_mpfr_dir(x.lo, prec, _RD))
    with gmpy2.context(precision=prec, round=_RU):
        hi = gmpy2.exp(_mpfr_dir(x.hi, prec, _RU))
    return CertifiedValue(_to_fraction(lo), _to_fraction(hi), prec)


def _pow_rational_exact(base: Fraction, exponent: Fraction) -> Optional[Fraction]:
    """Exact base**exponent when it is rational: integer exponents, and
    fractional exponents whose root of the base is exact (e.g. 1000^(2/3))."""
    if exponent.denominator == 1:
        return base ** exponent.numerator
    q = exponent.denominator
    rn, exact_n = gmpy2.iroot(base.numerator, q)
    if not exact_n:
        return None
    rd, exact_d = gmpy2.iroot(base.denominator, q)
    if not exact_d:
        return None
    return Fraction(int(rn), int(rd)) ** exponent.numerator


def pow_enclosure(base: Rational,
                  exponent: Union[Rational, RealNumber, CertifiedValue],
                  prec: int) -> CertifiedValue:
    """Enclosure of base ** exponent for base > 0.

    Exact when the exponent is an integer.  When the exponent itself is
    an enclosure, monotonicity in the exponent (direction depending on
    whether base >= 1) picks the right endpoints.
    """
    base = Fraction(base)
    if base <= 0:
        raise ValueError("pow_enclosure requires a positive base")
    if isinstance(exponent, RealNumber):
        if exponent.is_rational:
            exponent = exponent.fraction
        else:
            exponent = exponent.enclosure(prec)
    if isinstance(exponent, CertifiedValue):
        if exponent.is_exact:
            exponent = exponent.lo
        else:
            e_lo, e_hi = exponent.lo, exponent.hi
            if base >= 1:
                lo = _pow_dir(base, e_lo, prec, _RD)
                hi = _pow_dir(base, e_hi, prec, _RU)
            else:
                lo = _pow_dir(base, e_hi, prec, _RD)
                hi = _pow_dir(base, e_lo, prec, _RU)
            return CertifiedValue(lo, hi, prec)
    exponent = Fraction(exponent)
    exact = _pow_rational_exact(base, exponent)
    if exact is not None:
        return CertifiedValue.exact(exact, prec)
    if base == 1:
        return CertifiedValue.exact(1, prec)
    return CertifiedValue(_pow_dir(base, exponent, prec, _RD),
                          _pow_dir(base, exponent, prec, _RU), prec)


def _pow_dir(base: Fraction, exponent: Fraction, prec: int, rounding) -> Fraction:
    # mpfr(base) and mpfr(exponent) round in the same direction as the
    # final pow; for base >= 1 and exponent >= 0 this keeps the bound
    # one-sided.  Bases in (0, 1) or negative exponents flip the
    # monotonicity in one argument, so we bracket conservatively by
    # evaluating with both rounded conversions and keeping the extreme.
    results = []
    for conv_round in (_RD, _RU):
        with gmpy2.context(precision=prec, round=conv_round):
            b = gmpy2.mpfr(gmpy2.mpq(base.numerator, base.denominator))
            e = gmpy2.mpfr(gmpy2.mpq(exponent.numerator, exponent.denominator))
        with gmpy2.context(precision=prec, round=rounding):
            results.append(_to_fraction(b ** e))
    return min(results) if rounding is _RD else max(results)


# ---------------------------------------------------------------------
# Escalation helpers.  `make` is a callable prec -> CertifiedValue.
# ---------------------------------------------------------------------

MakeEnclosure = Callable[[int], CertifiedValue]


def escalating(make: MakeEnclosure,
               start_prec: int = DEFAULT_PRECISION_BITS,
               max_prec: int = MAX_PRECISION_BITS):
    """Yield enclosures at doubling precision up to the cap."""
    prec = start_prec
    while True:
        yield make(prec)
        if prec >= max_prec:
            return
        prec = min(prec * 2, max_prec)


def decide_lt(make_a: MakeEnclosure, make_b: MakeEnclosure,
              start_prec: int = DEFAULT_PRECISION_BITS,
              max_prec: int = MAX_PRECISION_BITS) -> bool:
    """Certified truth of a < b, escalating until decided."""
    prec = start_prec
    while True:
        verdict = make_a(prec).lt(make_b(prec))
        if verdict is not None:
            return verdict
        if prec >= max_prec:
            raise PrecisionExhausted(
                f"a < b undecided at {max_prec} bits")
        prec = min(prec * 2, max_prec)


def certified_floor(make: MakeEnclosure,
                    start_prec: int = DEFAULT_PRECISION_BITS,
                    max_prec: int = MAX_PRECISION_BITS) -> int:
    """floor of the enclosed value, escalating while it straddles an integer."""
    for cv in escalating(make, start_prec, max_prec):
        f_lo = math.floor(cv.lo)
        f_hi = math.floor(cv.hi)
        if f_lo == f_hi:
            return f_lo
        # an exact integer hi with width zero would have matched above
    raise PrecisionExhausted(
        f"floor undecided at {max_prec} bits (enclosure straddles an integer)")


def certified_nearest_int(make: MakeEnclosure,
                          start_prec: int = DEFAULT_PRECISION_BITS,
                          max_prec: int = MAX_PRECISION_BITS) -> int:
    """Nearest integer to the enclosed value; caller guarantees no tie."""
    for cv in escalating(make, start_prec, max_prec):
        n_lo = math.floor(cv.lo + Fraction(1, 2))
        n_hi = math.floor(cv.hi + Fraction(1, 2))
        if n_lo == n_hi:
            return n_lo
    raise PrecisionExhausted(
        f"nearest integer undecided at {max_prec} bits")
