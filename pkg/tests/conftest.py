"""Shared fixtures: session-scoped engines and an independent prime oracle."""

import pytest

from gapforge.primes import PrimeEngine

ORACLE_LIMIT = 1_000_000


@pytest.fixture(scope="session")
def engine():
    """Workhorse engine for everything that stays under 2 * 10^6."""
    return PrimeEngine(ceiling=2_000_000)


@pytest.fixture(scope="session")
def small_engine():
    """Minimal-ceiling engine for frontier/threshold behaviour."""
    return PrimeEngine(ceiling=10_000)


def _oracle_sieve(limit: int) -> bytearray:
    """Dense byte-per-integer sieve, deliberately unlike the engine's
    segmented odd-only numpy implementation."""
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    p = 2
    while p * p <= limit:
        if flags[p]:
            flags[p * p:: p] = bytearray(len(range(p * p, limit + 1, p)))
        p += 1
    return flags


@pytest.fixture(scope="session")
def oracle_flags():
    """oracle_flags[n] == 1 iff n is prime, for n <= ORACLE_LIMIT."""
    return _oracle_sieve(ORACLE_LIMIT)


@pytest.fixture(scope="session")
def oracle_primes(oracle_flags):
    """Ascending list of all primes <= ORACLE_LIMIT from the oracle sieve."""
    return [n for n in range(2, ORACLE_LIMIT + 1) if oracle_flags[n]]


def trial_division_is_prime(n: int) -> bool:
    """Third, slowest opinion: plain trial division."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True
