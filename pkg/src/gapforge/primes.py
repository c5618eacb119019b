"""Segmented odd-only sieve engine plus an independent primality check.

All range queries use the open-interval convention: `primes_in_range(lo,
hi)` returns primes q with lo < q < hi, endpoints excluded.  The sieve
is the workhorse; `is_prime` is deliberately sieve-independent (trial
division below 2**20, a deterministic strong-pseudoprime battery above)
so violations and spot checks can be re-verified by a second method.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .errors import CeilingExceeded, InvalidRange, MalformedSequence

DEFAULT_CEILING = 10 ** 8
DEFAULT_SEGMENT_SPAN = 1 << 21   # integers covered per segment (~128 KiB odd mask)

CACHE_MAGIC = b"GAPF"
CACHE_VERSION = 1

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_TRIAL_LIMIT = 1 << 20


@dataclass(frozen=True)
class PrimePair:
    """Two consecutive primes and their gap."""

    p_prev: int
    p_next: int
    index_prev: Optional[int] = None   # 1-based ordinal of p_prev, when known

    @property
    def gap(self) -> int:
        return self.p_next - self.p_prev

    def as_tuple(self) -> tuple:
        return (self.p_prev, self.p_next)


@dataclass(frozen=True)
class SieveSegment:
    """One tile of the segmented sieve: odd integers in [start, start+length)."""

    start: int           # inclusive, odd
    length: int          # count of integers covered (even span)
    bits: np.ndarray     # bool per odd integer; True = composite

    def primes(self) -> np.ndarray:
        odds = self.start + 2 * np.flatnonzero(~self.bits)
        return odds


def is_prime(n: int) -> bool:
    """Deterministic primality check, independent of the sieve."""
    if n < 2:
        return False
    if n < _TRIAL_LIMIT:
        if n in _SMALL_PRIMES:
            return True
        for p in _SMALL_PRIMES:
            if n % p == 0:
                return False
        d = 41
        while d * d <= n:
            if n % d == 0:
                return False
            d += 2
        return True
    # deterministic Miller-Rabin for n < 3.3e24 with the first 12 primes
    if n % 2 == 0:
        return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit, by a dense sieve (used for base primes)."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if mask[p]:
            mask[p * p:: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def write_segment_cache(path: str, segment: SieveSegment) -> None:
    packed = np.packbits(segment.bits.astype(np.uint8), bitorder="little")
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<IQQ", CACHE_VERSION, segment.start, segment.length))
        fh.write(packed.tobytes())


def read_segment_cache(path: str) -> Optional[SieveSegment]:
    try:
        with open(path, "rb") as fh:
            if fh.read(4) != CACHE_MAGIC:
                return None
            version, start, length = struct.unpack("<IQQ", fh.read(20))
            if version != CACHE_VERSION:
                return None
            raw = np.frombuffer(fh.read(), dtype=np.uint8)
    except OSError:
        return None
    n_odds = (length + 1) // 2
    bits = np.unpackbits(raw, bitorder="little")[:n_odds].astype(bool)
    return SieveSegment(start=start, length=length, bits=bits)


class PrimeEngine:
    """Prime generation and navigation under a configured ceiling."""

    def __init__(self, ceiling: int = DEFAULT_CEILING,
                 segment_span: int = DEFAULT_SEGMENT_SPAN,
                 cache_dir: Optional[str] = None):
        if ceiling < 10 ** 4:
            raise InvalidRange(f"ceiling {ceiling} below minimum 10^4")
        self.ceiling = ceiling
        self.segment_span = segment_span
        self.cache_dir = cache_dir if cache_dir is not None else os.environ.get("GAPFORGE_CACHE")
        self._base: Optional[np.ndarray] = None
        self._base_limit = 0
        # cached ascending prime array covering [2, _cached_upto]
        self._primes: Optional[np.ndarray] = None
        self._cached_upto = 0

    # -- internals ----------------------------------------------------

    def _base_primes(self, limit: int) -> np.ndarray:
        if self._base is None or self._base_limit < limit:
            self._base = _simple_sieve(max(limit, 1 << 10))
            self._base_limit = max(limit, 1 << 10)
        return self._base[self._base <= limit]

    def _sieve_segment(self, start: int, end: int) -> SieveSegment:
        """Composite mask over the odd integers in [start, end)."""
        if start % 2 == 0:
            start += 1
        length = end - start
        n_odds = max((length + 1) // 2, 0)

        cache_path = None
        if self.cache_dir:
            cache_path = os.path.join(self.cache_dir, f"seg_{start}_{length}.sieve")
            cached = read_segment_cache(cache_path)
            if cached is not None and cached.start == start and cached.length == length:
                return cached

        bits = np.zeros(n_odds, dtype=bool)
        base = self._base_primes(int(end ** 0.5) + 1)
        for p in base[base > 2]:
            p = int(p)
            first = max(p * p, ((start + p - 1) // p) * p)
            if first % 2 == 0:
                first += p
            if first >= end:
                continue
            bits[(first - start) // 2:: p] = True
        if start <= 1 < end:
            bits[(1 - start) // 2] = True   # 1 is not prime
        segment = SieveSegment(start=start, length=length, bits=bits)

        if cache_path:
            os.makedirs(self.cache_dir, exist_ok=True)
            try:
                write_segment_cache(cache_path, segment)
            except OSError:
                pass
        return segment

    def _segments(self, lo: int, hi: int) -> Iterator[SieveSegment]:
        """Tile [lo, hi) with sieve segments (odd parts only)."""
        start = max(lo, 3)
        if start % 2 == 0:
            start += 1
        while start < hi:
            end = min(start + self.segment_span, hi)
            yield self._sieve_segment(start, end)
            start = end

    def _check_range(self, lo: int, hi: int) -> None:
        if lo < 0 or lo >= hi:
            raise InvalidRange(f"need 0 <= lo < hi, got ({lo}, {hi})")
        if hi > self.ceiling:
            raise CeilingExceeded(
                f"hi={hi} exceeds sieve ceiling {self.ceiling}", frontier=self.ceiling)

    # -- cached prime array (for bulk consumers) ----------------------

    def primes_array_upto(self, n: int) -> np.ndarray:
        """Ascending array of all primes <= n, cached and grown on demand."""
        if n > self.ceiling:
            raise CeilingExceeded(
                f"{n} exceeds sieve ceiling {self.ceiling}", frontier=self.ceiling)
        if self._primes is None or self._cached_upto < n:
            chunks = [np.array([2], dtype=np.int64)] if n >= 2 else []
            for seg in self._segments(3, n + 1):
                chunks.append(seg.primes())
            self._primes = (np.concatenate(chunks) if chunks
                            else np.array([], dtype=np.int64))
            self._cached_upto = n
        cut = int(np.searchsorted(self._primes, n, side="right"))
        return self._primes[:cut]

    # -- public operations --------------------------------------------

    def primes_in_range(self, lo: int, hi: int) -> list[int]:
        """Primes q with lo < q < hi, ascending (open interval)."""
        self._check_range(lo, hi)
        out: list[int] = []
        if lo < 2 < hi:
            out.append(2)
        for seg in self._segments(lo + 1, hi):
            primes = seg.primes()
            out.extend(int(p) for p in primes[(primes > lo) & (primes < hi)])
        return out

    def count_primes_in_range(self, lo: int, hi: int) -> int:
        """|primes_in_range(lo, hi)| without materializing the list."""
        self._check_range(lo, hi)
        count = 1 if lo < 2 < hi else 0
        for seg in self._segments(lo + 1, hi):
            primes_mask = ~seg.bits
            odds = seg.start + 2 * np.flatnonzero(primes_mask)
            count += int(np.count_nonzero((odds > lo) & (odds < hi)))
        return count

    def next_prime(self, x: int) -> int:
        """Smallest prime strictly greater than x."""
        if x < 0:
            raise InvalidRange(f"next_prime needs x >= 0, got {x}")
        if x < 2:
            return 2
        window = 128
        lo = x
        while lo < self.ceiling:
            hi = min(lo + window, self.ceiling + 1)
            for seg in self._segments(lo + 1, hi):
                primes = seg.primes()
                above = primes[primes > x]
                if above.size:
                    return int(above[0])
            lo = hi - 1
            window *= 2
        raise CeilingExceeded(
            f"no prime above {x} below ceiling {self.ceiling}", frontier=self.ceiling)

    def prev_prime(self, x: int) -> int:
        """Largest prime strictly less than x."""
        if x < 3:
            raise InvalidRange(f"prev_prime needs x >= 3, got {x}")
        window = 128
        hi = x
        while True:
            lo = max(hi - window, 1)
            if lo < 2 < hi:
                best = 2
            else:
                best = None
            for seg in self._segments(max(lo, 3), hi):
                primes = seg.primes()
                below = primes[primes < x]
                if below.size:
                    best = int(below[-1])
            if best is not None:
                return best
            if lo <= 2:
                raise InvalidRange(f"no prime below {x}")
            hi = lo + 1
            window *= 2

    def nth_prime(self, n: int) -> int:
        """The n-th prime, 1-based (p_1 = 2)."""
        if n < 1:
            raise InvalidRange(f"nth_prime needs n >= 1, got {n}")
        if n == 1:
            return 2
        seen = 1
        for seg in self._segments(3, self.ceiling + 1):
            primes = seg.primes()
            if seen + primes.size >= n:
                return int(primes[n - seen - 1])
            seen += primes.size
        raise CeilingExceeded(
            f"p_{n} lies above ceiling {self.ceiling}", frontier=self.ceiling)

    def prime_index(self, p: int) -> int:
        """1-based ordinal of prime p in the prime sequence."""
        return self.count_primes_in_range(1, p) + 1

    def consecutive_pairs(self, lo: int, hi: int,
                          with_index: bool = False) -> Iterator[PrimePair]:
        """Every PrimePair with p_prev >= lo and p_next <= hi, ascending.

        Pairs straddling internal segment boundaries are emitted exactly
        once: the last prime of each segment is carried into the next.
        """
        if lo >= hi:
            raise InvalidRange(f"need lo < hi, got ({lo}, {hi})")
        self._check_range(max(lo, 0), hi)
        prev: Optional[int] = None
        index_prev: Optional[int] = None
        if lo <= 2 <= hi:
            prev = 2
            index_prev = 1
        for seg in self._segments(max(lo, 3), hi + 1):
            for p in seg.primes():
                p = int(p)
                if p < lo or p > hi:
                    continue
                if prev is not None:
                    if with_index and index_prev is None:
                        index_prev = self.prime_index(prev)
                    yield PrimePair(prev, p, index_prev if with_index else None)
                    if index_prev is not None:
                        index_prev += 1
                prev = p


def validate_synthetic_sequence(seq) -> list[int]:
    """Check a fake-prime sequence: strictly increasing integers, len >= 2."""
    values = [int(v) for v in seq]
    if len(values) < 1:
        raise MalformedSequence("sequence is empty")
    for a, b in zip(values, values[1:]):
        if b <= a:
            raise MalformedSequence(f"sequence not strictly increasing at {a}, {b}")
    return values
