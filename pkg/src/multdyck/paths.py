"""Exact enumeration of multiplicative paths that are incomplete Dyck paths.

A sign assignment fixes eps_q = +-1 at every prime q <= N; its completely
multiplicative extension gives the step at n as the product of eps_q over
primes dividing n to an odd power, i.e. (-1)^popcount(bits & kernel_mask[n]).
m(N) is the fraction of the 2^pi(N) assignments whose partial sums all stay
>= 0 on 1..N.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from math import log
from typing import Mapping

import numpy as np

from multdyck._parallel import chunk_ranges, ordered_map
from multdyck.errors import CapacityError, DomainError
from multdyck.numtheory import KernelMaskTable, PrimeTable, kernel_masks, sieve

DEFAULT_CAP = 25
ENUM_CHUNK = 1 << 15
TABLE1_ROWS = range(2, 20)


@dataclass(frozen=True)
class SignAssignment:
    """Signs at the primes <= n_max; bit i set means the i-th prime gets -1."""

    n_max: int
    bits: int

    def __post_init__(self):
        if self.n_max < 1:
            raise DomainError(f"n_max must be >= 1, got {self.n_max}")
        if self.bits < 0:
            raise DomainError("assignment bits must be non-negative")

    @classmethod
    def all_plus(cls, n_max: int) -> SignAssignment:
        return cls(n_max, 0)

    @classmethod
    def from_signs(cls, n_max: int, signs: Mapping[int, int]) -> SignAssignment:
        """Build from ``{prime: +1 or -1}``; unlisted primes get +1."""
        primes = sieve(max(n_max, 2)).primes.tolist()
        index = {p: i for i, p in enumerate(primes) if p <= n_max}
        bits = 0
        for q, e in signs.items():
            if q not in index:
                raise DomainError(f"{q} is not a prime <= {n_max}")
            if e not in (1, -1):
                raise DomainError(f"sign at {q} must be +1 or -1, got {e}")
            if e == -1:
                bits |= 1 << index[q]
        return cls(n_max, bits)

    def step(self, n: int, kmt: KernelMaskTable) -> int:
        return -1 if (self.bits & kmt.mask(n)).bit_count() & 1 else 1

    def steps(self, kmt: KernelMaskTable) -> list[int]:
        _check_table(self.n_max, kmt)
        return [self.step(n, kmt) for n in range(1, self.n_max + 1)]


@dataclass(frozen=True)
class MCountResult:
    n_max: int
    dyck_count: int
    total: int

    @property
    def m_value(self) -> Fraction:
        return Fraction(self.dyck_count, self.total)


@dataclass(frozen=True)
class Table1Row:
    n: int
    p_n: int
    dyck_count: int
    m: Fraction

    @property
    def m_rounded(self) -> Decimal:
        """m to three decimal places, as tabulated."""
        return (Decimal(self.m.numerator) / Decimal(self.m.denominator)).quantize(
            Decimal("0.001"), rounding=ROUND_HALF_UP
        )

    @property
    def m_ln_p(self) -> float:
        # the published column multiplies the already rounded m by ln p
        return float(self.m_rounded) * log(self.p_n)

    @property
    def m_ln_p_exact(self) -> float:
        return float(self.m) * log(self.p_n)


def _check_table(n_max: int, kmt: KernelMaskTable) -> None:
    if kmt.n_max < n_max:
        raise DomainError(f"kernel mask table covers n <= {kmt.n_max}, need {n_max}")


def is_incomplete_dyck(a: SignAssignment, kmt: KernelMaskTable) -> bool:
    """True iff every partial sum of the derived path on 1..N is >= 0."""
    _check_table(a.n_max, kmt)
    s = 0
    bits = a.bits
    for n in range(1, a.n_max + 1):
        s += -1 if (bits & kmt.mask(n)).bit_count() & 1 else 1
        if s < 0:
            return False
    return True


def mask_steps(words: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Steps ``(-1)^popcount(words & mask)`` as int32, shape ``(rows, len(masks))``."""
    par = np.bitwise_count(words[:, None, :] & masks[None, :, :]).sum(axis=2, dtype=np.int32) & 1
    return 1 - 2 * par


def survivors_by_masks(words: np.ndarray, masks: np.ndarray, n_max: int) -> np.ndarray:
    """Row mask of assignments whose paths stay >= 0 on 1..n_max.

    ``words`` is ``(rows, W)`` uint64 assignment bits, ``masks`` the
    ``(>= n_max + 1, W)`` kernel-mask array. Columns are processed in
    doubling segments and dead rows dropped, so most rows cost only a few
    steps.
    """
    rows = words.shape[0]
    alive = np.arange(rows)
    w = words
    s = np.zeros(rows, dtype=np.int32)
    start, seg = 1, 4
    while start <= n_max and len(alive):
        stop = min(start + seg, n_max + 1)
        cs = np.cumsum(mask_steps(w, masks[start:stop]), axis=1, dtype=np.int32) + s[:, None]
        ok = cs.min(axis=1) >= 0
        alive, w, s = alive[ok], w[ok], cs[ok, -1]
        start, seg = stop, seg * 2
    out = np.zeros(rows, dtype=bool)
    out[alive] = True
    return out


def _primes_below(n_max: int, kmt: KernelMaskTable) -> int:
    return sum(1 for p in kmt.prime_index if p <= n_max)


def exact_m(
    n_max: int,
    kmt: KernelMaskTable | None = None,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> MCountResult:
    """Count incomplete multiplicative Dyck paths of length ``n_max`` exactly.

    All ``2^pi(n_max)`` assignments are enumerated in contiguous blocks of
    bit patterns; block counts are summed, so the result does not depend on
    ``workers``.
    """
    if n_max < 1:
        raise DomainError(f"N must be >= 1, got {n_max}")
    if kmt is None:
        pt = sieve(max(n_max, 2))
        k = pt.pi(n_max)
        if k > cap:
            raise _cap_error(n_max, k, cap)
        kmt = kernel_masks(n_max, pt)
    _check_table(n_max, kmt)
    k = _primes_below(n_max, kmt)
    if k > cap:
        raise _cap_error(n_max, k, cap)
    if k >= 63:
        raise CapacityError(f"2^{k} assignments cannot be enumerated", required=k, cap=62)
    total = 1 << k
    masks = np.ascontiguousarray(kmt.masks[: n_max + 1, :1])

    def count(r: tuple[int, int]) -> int:
        words = np.arange(r[0], r[1], dtype=np.uint64)[:, None]
        return int(np.count_nonzero(survivors_by_masks(words, masks, n_max)))

    dyck = sum(ordered_map(count, chunk_ranges(total, ENUM_CHUNK), workers))
    return MCountResult(n_max=n_max, dyck_count=dyck, total=total)


def _cap_error(n_max: int, k: int, cap: int) -> CapacityError:
    return CapacityError(
        f"N={n_max} has {k} primes, so exact enumeration needs 2^{k} assignments; "
        f"this exceeds the enumeration cap of {cap} primes (raise --cap to at least {k})",
        required=k,
        cap=cap,
    )


def exact_m_gray(n_max: int, kmt: KernelMaskTable) -> MCountResult:
    """Same count as :func:`exact_m`, walking assignments in Gray-code order.

    Consecutive assignments differ in one prime, so only the steps at
    multiples of that prime (odd exponent) change sign. Pure Python; meant
    for small N.
    """
    _check_table(n_max, kmt)
    k = _primes_below(n_max, kmt)
    flips = [[n for n in range(1, n_max + 1) if kmt.mask(n) >> i & 1] for i in range(k)]
    steps = [1] * (n_max + 1)

    def ok() -> bool:
        s = 0
        for n in range(1, n_max + 1):
            s += steps[n]
            if s < 0:
                return False
        return True

    dyck = int(ok())
    prev = 0
    for i in range(1, 1 << k):
        g = i ^ (i >> 1)
        bit = (g ^ prev).bit_length() - 1
        prev = g
        for n in flips[bit]:
            steps[n] = -steps[n]
        dyck += ok()
    return MCountResult(n_max=n_max, dyck_count=dyck, total=1 << k)


def table1(pt: PrimeTable | None = None, workers: int = 1) -> list[Table1Row]:
    """m(p_n) for the n-th prime p_n, n = 2..19."""
    if pt is None:
        pt = sieve(67)
    last = TABLE1_ROWS[-1]
    if len(pt.primes) < last:
        raise DomainError(f"prime table must contain the {last}th prime")
    p_last = int(pt.primes[last - 1])
    kmt = kernel_masks(p_last, pt)
    rows = []
    for n in TABLE1_ROWS:
        p = int(pt.primes[n - 1])
        res = exact_m(p, kmt, workers=workers)
        rows.append(Table1Row(n=n, p_n=p, dyck_count=res.dyck_count, m=res.m_value))
    return rows
