"""gapforge: certified desk-scale verification of prime-gap bounds and
prime-in-interval claims."""

from .certified import CertifiedValue, RealNumber
from .errors import (CeilingExceeded, GapforgeError, InvalidRange,
                     MalformedSequence, PrecisionExhausted, UsageError)
from .gaps import BoundVariant, GapBoundSpec, ScanReport, bound_value, scan
from .intervals import Family, IntervalSpec, Verdict, containment_check, verify_family
from .primes import PrimeEngine, PrimePair, is_prime

__version__ = "0.1.0"

__all__ = [
    "BoundVariant", "CeilingExceeded", "CertifiedValue", "Family",
    "GapBoundSpec", "GapforgeError", "IntervalSpec", "InvalidRange",
    "MalformedSequence", "PrecisionExhausted", "PrimeEngine", "PrimePair",
    "RealNumber", "ScanReport", "UsageError", "Verdict", "bound_value",
    "containment_check", "is_prime", "scan", "verify_family",
]
