"""Independent reference computations for the tests.

Nothing here imports the package: factorizations are by trial division and
symbols by Euler's criterion, so agreement with the library is a real check.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import isqrt


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, isqrt(n) + 1))


def primes_upto(n: int) -> list[int]:
    return [q for q in range(2, n + 1) if is_prime(q)]


def factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_legendre(n: int, p: int) -> int:
    r = pow(n % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def squarefree(n: int) -> bool:
    return all(e == 1 for e in factor(n).values())


def mult_value(n: int, signs: dict[int, int]) -> int:
    """f(n) for the completely multiplicative f with f(q) = signs[q]."""
    v = 1
    for q, e in factor(n).items():
        v *= signs[q] ** e
    return v


def path_ok(n_max: int, signs: dict[int, int]) -> bool:
    s = 0
    for n in range(1, n_max + 1):
        s += mult_value(n, signs)
        if s < 0:
            return False
    return True


def brute_count(n_max: int) -> tuple[int, int]:
    """(dyck_count, total) by trying every sign vector on the primes <= n_max."""
    ps = primes_upto(n_max)
    hits = 0
    for combo in itertools.product((1, -1), repeat=len(ps)):
        if path_ok(n_max, dict(zip(ps, combo))):
            hits += 1
    return hits, 2 ** len(ps)


def prefix_tree_count(n_max: int) -> int:
    """Count by depth-first search over signs, pruning at the first negative prefix.

    Branches only where n is prime; composite steps are forced by
    multiplicativity. Structurally unrelated to bitmask enumeration.
    """
    f = [0] * (n_max + 1)
    f[1] = 1
    spf = [0] * (n_max + 1)
    for n in range(2, n_max + 1):
        spf[n] = next(d for d in range(2, n + 1) if n % d == 0)

    def go(n: int, s: int) -> int:
        while n <= n_max:
            if spf[n] == n:
                total = 0
                for e in (1, -1):
                    if s + e >= 0:
                        f[n] = e
                        total += go(n + 1, s + e)
                return total
            f[n] = f[spf[n]] * f[n // spf[n]]
            s += f[n]
            if s < 0:
                return 0
            n += 1
        return 1

    return go(2, 1)


def brute_second_moment(u: int) -> Fraction:
    ps = primes_upto(u)
    acc = 0
    for combo in itertools.product((1, -1), repeat=len(ps)):
        signs = dict(zip(ps, combo))
        m = sum(mult_value(n, signs) for n in range(1, u + 1))
        acc += m * m
    return Fraction(acc, 2 ** len(ps))
