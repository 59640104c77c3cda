"""Membership in L+: primes whose Legendre-symbol partial sums never go negative.

The character n -> (n/p) is p-periodic with (p/p) = 0 and a full period
summing to zero, so S(kp + r) = S(r). Checking the prefixes t = 1..p-1 is
therefore enough to decide the condition for every N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import numpy as np

from multdyck._parallel import ordered_map
from multdyck.errors import DomainError
from multdyck.numtheory import legendre, residue_sign_table, sieve

# prefixes checked term by term before falling back to a full residue table
EARLY_STEPS = 128
SCAN_CHUNK = 256

_SMALL_SPF = sieve(EARLY_STEPS).smallest_factor


@dataclass(frozen=True)
class CharacterWalk:
    p: int
    is_member: bool
    min_prefix: int
    first_violation: int | None
    final_sum: int
    plus_count: int


@dataclass(frozen=True)
class ScanReport:
    limit: int
    members: tuple[int, ...]
    primes_scanned: int
    density_ratio: Fraction
    walks: tuple[CharacterWalk, ...] | None = field(default=None, repr=False)

    @property
    def count(self) -> int:
        return len(self.members)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or not _is_prime(p):
        raise DomainError(f"expected an odd prime, got {p}")


def partial_sums(p: int) -> np.ndarray:
    """``S(t) = sum_{n <= t} (n/p)`` for ``t = 1..p-1``."""
    _check_odd_prime(p)
    return np.cumsum(residue_sign_table(p), dtype=np.int64)


def walk(p: int) -> CharacterWalk:
    """Full partial-sum diagnostics for one odd prime."""
    _check_odd_prime(p)
    table = residue_sign_table(p)
    sums = np.cumsum(table, dtype=np.int64)
    neg = np.flatnonzero(sums < 0)
    first = int(neg[0]) + 1 if len(neg) else None
    return CharacterWalk(
        p=p,
        is_member=first is None,
        min_prefix=int(sums.min()),
        first_violation=first,
        final_sum=int(sums[-1]),
        plus_count=int(np.count_nonzero(table > 0)),
    )


def _member_unchecked(p: int) -> bool:
    steps = min(p - 1, EARLY_STEPS)
    chi = [0, 1]
    s = 1
    for n in range(2, steps + 1):
        q = int(_SMALL_SPF[n])
        c = legendre(n, p) if q == n else chi[q] * chi[n // q]
        chi.append(c)
        s += c
        if s < 0:
            return False
    if steps == p - 1:
        return True
    return bool(np.cumsum(residue_sign_table(p), dtype=np.int64).min() >= 0)


def is_member(p: int) -> bool:
    """Early-exit test for ``p`` in L+."""
    _check_odd_prime(p)
    return _member_unchecked(p)


def _members_in(primes: list[int]) -> list[int]:
    return [p for p in primes if _member_unchecked(p)]


def _walks_in(primes: list[int]) -> list[CharacterWalk]:
    return [walk(p) for p in primes]


def scan(limit: int, workers: int = 1, walks: bool = False) -> ScanReport:
    """Decide membership for every odd prime ``p <= limit``.

    With ``walks=True`` the report also carries a :class:`CharacterWalk` for
    every odd prime scanned (full walks, no early exit).
    """
    if limit < 3:
        raise DomainError(f"scan limit must be >= 3, got {limit}")
    pt = sieve(limit)
    odd = pt.primes[1:].tolist()
    chunks = [odd[i : i + SCAN_CHUNK] for i in range(0, len(odd), SCAN_CHUNK)]
    walk_rows: tuple[CharacterWalk, ...] | None = None
    if walks:
        walk_rows = tuple(
            w for part in ordered_map(_walks_in, chunks, workers, processes=True) for w in part
        )
        members = [w.p for w in walk_rows if w.is_member]
    else:
        members = [p for part in ordered_map(_members_in, chunks, workers, processes=True) for p in part]
    total = len(pt.primes)
    return ScanReport(
        limit=limit,
        members=tuple(members),
        primes_scanned=total,
        density_ratio=Fraction(len(members), total),
        walks=walk_rows,
    )


def nth_member(k: int, max_limit: int | None = None, workers: int = 1) -> int:
    """The k-th element of L+ in increasing order.

    The search limit doubles until ``k`` members are found. ``max_limit``
    bounds the search; exceeding it raises :class:`DomainError`.
    """
    if k < 1:
        raise DomainError(f"index must be >= 1, got {k}")
    found: list[int] = []
    scanned_to = 2
    limit = 1024
    while True:
        if max_limit is not None:
            if scanned_to >= max_limit:
                raise DomainError(
                    f"only {len(found)} members of L+ below max-limit {max_limit}; index {k} not reached"
                )
            limit = min(limit, max_limit)
        pt = sieve(limit)
        new = pt.primes[pt.pi(scanned_to) :].tolist()
        chunks = [new[i : i + SCAN_CHUNK] for i in range(0, len(new), SCAN_CHUNK)]
        for part in ordered_map(_members_in, chunks, workers, processes=True):
            found.extend(part)
            if len(found) >= k:
                return found[k - 1]
        scanned_to = limit
        limit *= 2
