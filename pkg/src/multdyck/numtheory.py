"""Number-theoretic primitives: least-prime-factor sieve, Legendre symbol,
squarefree flags and squarefree-kernel bitmasks.

Everything here is immutable after construction; arrays are returned
read-only so tables can be shared freely between worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

import numpy as np

from multdyck.errors import CapacityError, DomainError

MASK_WORD_BITS = 64


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PrimeTable:
    """Primes up to ``limit`` together with the least-prime-factor table.

    ``smallest_factor[n]`` is the least prime dividing ``n`` for
    ``2 <= n <= limit``; entries 0 and 1 are 0 and 1.
    """

    limit: int
    primes: np.ndarray
    smallest_factor: np.ndarray

    def pi(self, x: int) -> int:
        """Number of primes <= x (x must not exceed ``limit``)."""
        if x > self.limit:
            raise DomainError(f"pi({x}) requested from a table with limit {self.limit}")
        return int(np.searchsorted(self.primes, x, side="right"))

    def is_prime(self, n: int) -> bool:
        if n > self.limit:
            raise DomainError(f"{n} exceeds sieve limit {self.limit}")
        return n >= 2 and int(self.smallest_factor[n]) == n

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Prime factorization of ``n`` as ``[(p, e), ...]`` with ascending p."""
        if not 1 <= n <= self.limit:
            raise DomainError(f"cannot factor {n} with a table of limit {self.limit}")
        out: list[tuple[int, int]] = []
        spf = self.smallest_factor
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out


def sieve(limit: int) -> PrimeTable:
    """Least-prime-factor sieve up to ``limit`` inclusive."""
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == 0:
            seg = spf[p * p :: p]
            seg[seg == 0] = p
    idx = np.arange(limit + 1, dtype=np.int64)
    is_p = spf == 0
    is_p[:2] = False
    spf[is_p] = idx[is_p]
    spf[1] = 1
    primes = np.flatnonzero(is_p).astype(np.int64)
    return PrimeTable(limit=limit, primes=_frozen(primes), smallest_factor=_frozen(spf))


def _check_odd_modulus(p: int) -> None:
    if p < 3 or p % 2 == 0:
        raise DomainError(f"Legendre symbol needs an odd prime modulus, got p={p}")


def legendre(n: int, p: int) -> int:
    """Legendre symbol (n/p) by the binary Jacobi-symbol algorithm.

    ``p`` must be an odd prime; primality is the caller's responsibility
    (for odd composite ``p`` the result is the Jacobi symbol).
    """
    _check_odd_modulus(p)
    a = n % p
    m = p
    sign = 1
    while a:
        # strip factors of two: (2/m) = -1 iff m = 3, 5 (mod 8)
        tz = (a & -a).bit_length() - 1
        a >>= tz
        if tz & 1 and m & 7 in (3, 5):
            sign = -sign
        if a & m & 3 == 3:
            sign = -sign
        a, m = m % a, a
    return sign if m == 1 else 0


def residue_sign_table(p: int) -> np.ndarray:
    """``table[n - 1] = (n/p)`` for ``1 <= n <= p - 1``, as int8.

    Built by marking the squares ``k^2 mod p`` for ``k <= (p-1)/2``, so the
    cost is O(p) with no symbol evaluations.
    """
    _check_odd_modulus(p)
    k = np.arange(1, (p - 1) // 2 + 1, dtype=np.int64)
    table = np.full(p, -1, dtype=np.int8)
    table[(k * k) % p] = 1
    return table[1:]


@dataclass(frozen=True)
class KernelMaskTable:
    """Squarefree-kernel bitmasks for ``1 <= n <= n_max``.

    Bit ``i`` of ``mask(n)`` is set iff the ``i``-th prime (0-based) divides
    ``n`` to an odd power. Storage is ``words`` uint64 words per entry, word 0
    holding bits 0..63.
    """

    n_max: int
    width: int
    prime_index: dict[int, int]
    masks: np.ndarray  # shape (n_max + 1, words), uint64
    _int_masks: tuple[int, ...] = field(repr=False, compare=False)

    @property
    def words(self) -> int:
        return self.masks.shape[1]

    @property
    def num_primes(self) -> int:
        return len(self.prime_index)

    def mask(self, n: int) -> int:
        """Mask of ``n`` as a Python integer."""
        return self._int_masks[n]


def kernel_masks(n_max: int, pt: PrimeTable, width: int = MASK_WORD_BITS) -> KernelMaskTable:
    """Build squarefree-kernel masks by walking least prime factors.

    ``width`` is the number of prime indices the table can hold (rounded up
    to a multiple of 64). If there are more primes than that below
    ``n_max`` a :class:`CapacityError` is raised instead of truncating.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    if n_max > pt.limit:
        raise DomainError(f"n_max={n_max} exceeds prime table limit {pt.limit}")
    words = max(1, -(-width // MASK_WORD_BITS))
    primes = pt.primes[: pt.pi(n_max)]
    if len(primes) > words * MASK_WORD_BITS:
        raise CapacityError(
            f"kernel mask width {words * MASK_WORD_BITS} cannot hold the "
            f"{len(primes)} primes <= {n_max}",
            required=len(primes),
            cap=words * MASK_WORD_BITS,
        )
    prime_index = {int(p): i for i, p in enumerate(primes)}
    spf = pt.smallest_factor
    ints = [0] * (n_max + 1)
    for n in range(2, n_max + 1):
        p = int(spf[n])
        ints[n] = ints[n // p] ^ (1 << prime_index[p])
    masks = np.zeros((n_max + 1, words), dtype=np.uint64)
    low = (1 << MASK_WORD_BITS) - 1
    for w in range(words):
        shift = w * MASK_WORD_BITS
        masks[:, w] = [(m >> shift) & low for m in ints]
    return KernelMaskTable(
        n_max=n_max,
        width=words * MASK_WORD_BITS,
        prime_index=prime_index,
        masks=_frozen(masks),
        _int_masks=tuple(ints),
    )


def mobius_squarefree(u_max: int, pt: PrimeTable) -> np.ndarray:
    """Boolean array ``flag`` of length ``u_max + 1``; ``flag[n]`` iff mu(n)^2 = 1."""
    if u_max < 1:
        raise DomainError(f"u_max must be >= 1, got {u_max}")
    if u_max > pt.limit:
        raise DomainError(f"u_max={u_max} exceeds prime table limit {pt.limit}")
    flag = np.ones(u_max + 1, dtype=bool)
    flag[0] = False
    for p in pt.primes[: pt.pi(isqrt(u_max))]:
        q = int(p) * int(p)
        flag[q::q] = False
    return _frozen(flag)


def multiplicative_levels(n_max: int, pt: PrimeTable) -> list[np.ndarray]:
    """Composite integers in ``[2, n_max]`` grouped by total prime-factor count.

    ``levels[j]`` holds those ``n`` with Omega(n) = j + 2. Evaluating a
    completely multiplicative function level by level lets each level be a
    single vectorised gather: ``f(n) = f(spf(n)) * f(n // spf(n))``.
    """
    if n_max > pt.limit:
        raise DomainError(f"n_max={n_max} exceeds prime table limit {pt.limit}")
    omega = np.zeros(n_max + 1, dtype=np.int64)
    for p in pt.primes[: pt.pi(n_max)].tolist():
        q = p
        while q <= n_max:
            omega[q::q] += 1
            q *= p
    levels = []
    for j in range(2, int(omega.max(initial=0)) + 1):
        levels.append(np.flatnonzero(omega == j))
    return levels


def extend_multiplicatively(
    prime_values: np.ndarray,
    pt: PrimeTable,
    n_max: int,
    levels: list[np.ndarray] | None = None,
) -> np.ndarray:
    """Completely multiplicative extension of values given at primes.

    ``prime_values`` has shape ``(rows, pi(n_max))`` (entries +-1). Returns an
    int8 array ``f`` of shape ``(rows, n_max + 1)`` with ``f[:, 0] = 0`` and
    ``f[:, 1] = 1``.
    """
    prime_values = np.atleast_2d(np.asarray(prime_values, dtype=np.int8))
    k = pt.pi(n_max)
    if prime_values.shape[1] != k:
        raise DomainError(f"expected values at {k} primes, got {prime_values.shape[1]}")
    if levels is None:
        levels = multiplicative_levels(n_max, pt)
    f = np.zeros((prime_values.shape[0], n_max + 1), dtype=np.int8)
    f[:, 1] = 1
    f[:, pt.primes[:k]] = prime_values
    spf = pt.smallest_factor
    for lvl in levels:
        q = spf[lvl]
        f[:, lvl] = f[:, q] * f[:, lvl // q]
    return f
