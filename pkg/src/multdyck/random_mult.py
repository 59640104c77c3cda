"""Random multiplicative functions.

``f(p)`` are independent fair signs at the primes and ``f`` is extended
completely multiplicatively. This module estimates m(N) = P(M_f(t) >= 0 for
all t <= N) by sampling, checks the second-moment identity
``E M_f(u)^2 = sum_{d <= u squarefree} floor(sqrt(u/d))^2`` exactly, checks the
sub-Gaussian tail bound for weighted sign sums, and evaluates truncated
versions of the tail integral I(N) and of the random Dirichlet series.

All sampling goes through :mod:`multdyck.rng`; sample ``i`` uses stream ``i``
so results do not depend on chunking or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist

import numpy as np

from multdyck import rng
from multdyck._parallel import chunk_ranges, ordered_map
from multdyck.errors import CapacityError, DomainError
from multdyck.numtheory import (
    PrimeTable,
    extend_multiplicatively,
    kernel_masks,
    mobius_squarefree,
    multiplicative_levels,
    sieve,
)
from multdyck.paths import SignAssignment, survivors_by_masks

MC_CHUNK = 1 << 15
BRUTE_CAP = 22
SIGMA_PRESETS = {"half-plus": 0.5, "one-plus": 1.0}


def sigma_preset(name: str, n: float) -> float:
    """``base + 3 ln ln N / ln N`` with base 1/2 (``half-plus``) or 1 (``one-plus``)."""
    if name not in SIGMA_PRESETS:
        raise DomainError(f"unknown sigma preset {name!r}; choose from {sorted(SIGMA_PRESETS)}")
    if n <= math.e:
        raise DomainError(f"sigma presets need N > e, got {n}")
    ln = math.log(n)
    return SIGMA_PRESETS[name] + 3 * math.log(ln) / ln


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise DomainError("Wilson interval needs at least one trial")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / trials
    z2n = z * z / trials
    denom = 1 + z2n
    center = (p + z2n / 2) / denom
    margin = z / denom * math.sqrt(p * (1 - p) / trials + z2n / (4 * trials))
    lo = max(0.0, min(center - margin, p))
    hi = min(1.0, max(center + margin, p))
    return lo, hi


# -- samples ---------------------------------------------------------------


def _bits_to_flags(bits: int, k: int) -> np.ndarray:
    raw = np.frombuffer(bits.to_bytes(max(1, -(-k // 8)), "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:k].astype(bool)


def assignment_values(a: SignAssignment, pt: PrimeTable | None = None, upto: int | None = None) -> np.ndarray:
    """``f(0..upto)`` for the multiplicative extension of ``a`` (f(0) = 0)."""
    upto = a.n_max if upto is None else upto
    if upto > a.n_max:
        raise DomainError(f"assignment covers primes <= {a.n_max}, asked for values up to {upto}")
    if pt is None or pt.limit < upto:
        pt = sieve(max(upto, 2))
    k = pt.pi(upto)
    neg = _bits_to_flags(a.bits, k)
    return extend_multiplicatively(np.where(neg, -1, 1)[None, :], pt, upto)[0]


@dataclass(frozen=True)
class RMFSample:
    """One draw of the random signs at the primes <= n_max."""

    assignment: SignAssignment
    seed: int
    stream: int

    @property
    def n_max(self) -> int:
        return self.assignment.n_max

    def values(self, pt: PrimeTable | None = None) -> np.ndarray:
        return assignment_values(self.assignment, pt)

    def walk(self, pt: PrimeTable | None = None) -> np.ndarray:
        """``M_f(t)`` for ``t = 1..n_max`` (entry ``t - 1``)."""
        return np.cumsum(self.values(pt)[1:], dtype=np.int64)


def sample_assignment(n_max: int, seed: int, stream: int = 0) -> RMFSample:
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    k = sieve(max(n_max, 2)).pi(n_max)
    flags = rng.negative_flags(seed, np.array([stream]), k)[0]
    bits = sum(1 << i for i in np.flatnonzero(flags).tolist())
    return RMFSample(SignAssignment(n_max, bits), seed, stream)


# -- m(N) by Monte Carlo --------------------------------------------------


@dataclass(frozen=True)
class MCEstimate:
    n_max: int
    samples: int
    successes: int
    seed: int
    confidence: float = 0.95

    @property
    def estimate(self) -> float:
        return self.successes / self.samples

    def interval(self, confidence: float | None = None) -> tuple[float, float]:
        return wilson_interval(self.successes, self.samples, confidence or self.confidence)

    @property
    def ci_low(self) -> float:
        return self.interval()[0]

    @property
    def ci_high(self) -> float:
        return self.interval()[1]


class _PathSampler:
    """Survival test for sampled paths on 1..n_max.

    Uses kernel-mask parity while the primes fit in ``mask_width`` bits,
    otherwise extends the signs through the least-prime-factor table.
    """

    def __init__(self, n_max: int, mask_width: int = 64, route: str = "auto"):
        self.n_max = n_max
        self.pt = sieve(max(n_max, 2))
        self.k = self.pt.pi(n_max)
        if route == "auto":
            route = "masks" if self.k <= mask_width else "factorization"
        if route not in ("masks", "factorization"):
            raise DomainError(f"unknown route {route!r}")
        self.route = route
        if route == "masks":
            self.kmt = kernel_masks(n_max, self.pt, width=mask_width)
        else:
            self.levels = multiplicative_levels(n_max, self.pt)

    def survivors(self, seed: int, streams: np.ndarray) -> np.ndarray:
        if self.route == "masks":
            words = rng.sign_words(seed, streams, self.kmt.words)
            words = rng.truncate_words(words, self.k)
            return survivors_by_masks(words, self.kmt.masks, self.n_max)
        neg = rng.negative_flags(seed, streams, self.k)
        f = extend_multiplicatively(np.where(neg, -1, 1), self.pt, self.n_max, self.levels)
        sums = np.cumsum(f[:, 1:], axis=1, dtype=np.int32)
        return sums.min(axis=1) >= 0


def mc_m(
    n_max: int,
    samples: int,
    seed: int = 0,
    workers: int = 1,
    confidence: float = 0.95,
    route: str = "auto",
    mask_width: int = 64,
) -> MCEstimate:
    """Monte Carlo estimate of m(N) with a Wilson interval."""
    if n_max < 1:
        raise DomainError(f"N must be >= 1, got {n_max}")
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    sampler = _PathSampler(n_max, mask_width, route)

    def count(r: tuple[int, int]) -> int:
        streams = np.arange(r[0], r[1], dtype=np.uint64)
        return int(np.count_nonzero(sampler.survivors(seed, streams)))

    hits = sum(ordered_map(count, chunk_ranges(samples, MC_CHUNK), workers))
    return MCEstimate(n_max=n_max, samples=samples, successes=hits, seed=seed, confidence=confidence)


# -- second moment ---------------------------------------------------------


@dataclass(frozen=True)
class MomentRecord:
    u: int
    formula_value: int
    exact_value: Fraction | None = None
    mc_value: float | None = None


def _isqrt_array(q: np.ndarray) -> np.ndarray:
    r = np.floor(np.sqrt(q.astype(np.float64))).astype(np.int64)
    r -= r * r > q
    r += (r + 1) * (r + 1) <= q
    return r


def second_moment_formula(u: int, pt: PrimeTable | None = None) -> int:
    """``sum over squarefree d <= u of floor(sqrt(u/d))^2``."""
    if u < 1:
        raise DomainError(f"u must be >= 1, got {u}")
    if pt is None or pt.limit < u:
        pt = sieve(max(u, 2))
    d = np.flatnonzero(mobius_squarefree(u, pt))
    r = _isqrt_array(u // d)
    return int(np.sum(r * r))


def second_moments_bruteforce(u_max: int, cap: int = BRUTE_CAP, workers: int = 1) -> list[Fraction]:
    """Exact ``E M_f(u)^2`` for ``u = 1..u_max`` by enumerating every assignment."""
    if u_max < 1:
        raise DomainError(f"u must be >= 1, got {u_max}")
    pt = sieve(max(u_max, 2))
    k = pt.pi(u_max)
    if k > cap:
        raise CapacityError(
            f"brute-force second moment at u={u_max} needs 2^{k} assignments; cap is {cap} primes",
            required=k,
            cap=cap,
        )
    kmt = kernel_masks(u_max, pt)
    masks = kmt.masks[1 : u_max + 1, 0]
    total = 1 << k

    def block(r: tuple[int, int]) -> np.ndarray:
        bits = np.arange(r[0], r[1], dtype=np.uint64)
        par = np.bitwise_count(bits[:, None] & masks[None, :]) & 1
        m = np.cumsum(1 - 2 * par.astype(np.int64), axis=1)
        return np.sum(m * m, axis=0)

    acc = [0] * u_max
    for part in ordered_map(block, chunk_ranges(total, 1 << 14), workers):
        for i, v in enumerate(part.tolist()):
            acc[i] += v
    return [Fraction(a, total) for a in acc]


def second_moment_bruteforce(u: int, cap: int = BRUTE_CAP) -> Fraction:
    """Exact ``E M_f(u)^2`` averaged over all ``2^pi(u)`` sign assignments."""
    return second_moments_bruteforce(u, cap)[-1]


def second_moment_mc(u: int, samples: int, seed: int = 0) -> float:
    """Sample mean of ``M_f(u)^2``."""
    if u < 1 or samples < 1:
        raise DomainError("u and samples must be >= 1")
    pt = sieve(max(u, 2))
    k = pt.pi(u)
    levels = multiplicative_levels(u, pt)
    parts = []
    for lo, hi in chunk_ranges(samples, 1 << 12):
        neg = rng.negative_flags(seed, np.arange(lo, hi, dtype=np.uint64), k)
        f = extend_multiplicatively(np.where(neg, -1, 1), pt, u, levels)
        m = f.sum(axis=1, dtype=np.int64)
        parts.append(int(np.sum(m * m)))
    return sum(parts) / samples


def moments(u_max: int, mode: str = "both", cap: int = BRUTE_CAP) -> list[MomentRecord]:
    """Moment records for ``u = 1..u_max``; ``mode`` is formula, brute or both."""
    if mode not in ("formula", "brute", "both"):
        raise DomainError(f"mode must be formula, brute or both, got {mode!r}")
    pt = sieve(max(u_max, 2))
    brute = second_moments_bruteforce(u_max, cap) if mode != "formula" else None
    out = []
    for u in range(1, u_max + 1):
        formula = second_moment_formula(u, pt)
        exact = brute[u - 1] if brute is not None else None
        out.append(MomentRecord(u=u, formula_value=formula, exact_value=exact))
    return out


# -- sub-Gaussian tail -----------------------------------------------------


@dataclass(frozen=True)
class SubGaussianResult:
    sigma: float
    k_primes: int
    gamma: float
    samples: int
    seed: int
    s: float
    successes: int

    @property
    def empirical_tail(self) -> float:
        return self.successes / self.samples

    @property
    def stderr(self) -> float:
        p = self.empirical_tail
        return math.sqrt(p * (1 - p) / self.samples)

    @property
    def bound(self) -> float:
        return math.exp(-self.gamma**2 / (2 * self.s))


def first_primes(k: int) -> np.ndarray:
    if k < 1:
        raise DomainError(f"need at least one prime, got k={k}")
    bound = 15 if k < 6 else int(k * (math.log(k) + math.log(math.log(k)))) + 1
    return sieve(bound).primes[:k]


def subgaussian_check(
    sigma: float,
    k_primes: int,
    gamma: float,
    samples: int,
    seed: int = 0,
    workers: int = 1,
) -> SubGaussianResult:
    """Empirical ``P(sum_p p^-sigma f(p) >= gamma)`` over the first ``k_primes`` primes
    against ``exp(-gamma^2 / 2s)`` with ``s = sum_p p^-2sigma``."""
    if gamma < 0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    if sigma <= 0.5:
        raise DomainError(f"sigma must exceed 1/2, got {sigma}")
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    weights = first_primes(k_primes).astype(np.float64) ** -sigma
    s = math.fsum((weights * weights).tolist())

    def count(r: tuple[int, int]) -> int:
        neg = rng.negative_flags(seed, np.arange(r[0], r[1], dtype=np.uint64), k_primes)
        x = np.where(neg, -weights, weights).sum(axis=1)
        return int(np.count_nonzero(x >= gamma))

    hits = sum(ordered_map(count, chunk_ranges(samples, MC_CHUNK), workers))
    return SubGaussianResult(sigma, k_primes, gamma, samples, seed, s, hits)


# -- truncated tail integral -------------------------------------------------


@dataclass(frozen=True)
class TailEstimate:
    n_lo: int
    sigma: float
    truncation: float
    samples: int
    mean_I: float
    stderr: float
    seed: int


def tail_weights(n_lo: int, sigma: float, truncation: float) -> np.ndarray:
    """``w[j] = integral of u^(-sigma-1)`` over ``[n, n+1) & [n_lo, U]``, n = n_lo + j."""
    n_hi = math.floor(truncation)
    n = np.arange(n_lo, n_hi + 1, dtype=np.float64)
    b = np.minimum(n + 1, truncation)
    # a^-s - b^-s, written to avoid cancellation when b/a is close to 1
    return n**-sigma * -np.expm1(-sigma * np.log1p((b - n) / n)) / sigma


def tail_integral(
    n_lo: int,
    sigma: float,
    truncation: float,
    samples: int,
    seed: int = 0,
    workers: int = 1,
    signs: str = "random",
) -> TailEstimate:
    """Sample mean of ``I = integral over [N, U] of |M_f(u)| u^(-sigma-1) du``.

    ``M_f`` is constant on each ``[n, n+1)``, so each sample's integral is the
    exact finite sum ``sum |M_f(n)| w_n``. ``signs="all-plus"`` replaces the
    random signs by f = 1 (then M_f(u) = floor(u)).
    """
    if n_lo < 1:
        raise DomainError(f"N must be >= 1, got {n_lo}")
    if sigma <= 0.5:
        raise DomainError(f"sigma must exceed 1/2, got {sigma}")
    if truncation < n_lo:
        raise DomainError(f"truncation U={truncation} must be >= N={n_lo}")
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples}")
    if signs not in ("random", "all-plus"):
        raise DomainError(f"signs must be random or all-plus, got {signs!r}")
    if truncation == n_lo:
        return TailEstimate(n_lo, sigma, truncation, samples, 0.0, 0.0, seed)

    n_hi = math.floor(truncation)
    w = tail_weights(n_lo, sigma, truncation)
    if signs == "all-plus":
        value = math.fsum((np.arange(n_lo, n_hi + 1) * w).tolist())
        return TailEstimate(n_lo, sigma, truncation, samples, value, 0.0, seed)

    pt = sieve(max(n_hi, 2))
    k = pt.pi(n_hi)
    levels = multiplicative_levels(n_hi, pt)
    rows = max(1, min(256, (1 << 22) // (n_hi + 1)))

    def block(r: tuple[int, int]) -> list[float]:
        neg = rng.negative_flags(seed, np.arange(r[0], r[1], dtype=np.uint64), k)
        f = extend_multiplicatively(np.where(neg, -1, 1), pt, n_hi, levels)
        m = np.cumsum(f, axis=1, dtype=np.int32)[:, n_lo:]
        return (np.abs(m) * w).sum(axis=1).tolist()

    values = [v for part in ordered_map(block, chunk_ranges(samples, rows), workers) for v in part]
    mean = math.fsum(values) / samples
    if samples > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (samples - 1)
        stderr = math.sqrt(var / samples)
    else:
        stderr = 0.0
    return TailEstimate(n_lo, sigma, truncation, samples, mean, stderr, seed)


# -- truncated random zeta ---------------------------------------------------


@dataclass(frozen=True)
class ZetaEval:
    sigma: float
    t: float
    cutoff: int
    value: complex


def zeta_truncated(
    assignment: SignAssignment | RMFSample | None,
    sigma: float,
    t: float,
    cutoff: int,
) -> ZetaEval:
    """``sum_{n <= cutoff} f(n) n^-(sigma + i t)``; ``None`` means f = 1.

    A plain partial sum with no acceleration. Near sigma = 1/2 it carries no
    accuracy guarantee at any feasible cutoff.
    """
    if cutoff < 1:
        raise DomainError(f"cutoff must be >= 1, got {cutoff}")
    if sigma <= 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    if isinstance(assignment, RMFSample):
        assignment = assignment.assignment
    if assignment is None:
        f = np.ones(cutoff + 1, dtype=np.int8)
        f[0] = 0
    else:
        f = assignment_values(assignment, upto=cutoff)
    n = np.arange(1, cutoff + 1, dtype=np.float64)
    ln = np.log(n)
    mag = f[1:] * np.exp(-sigma * ln)
    re = math.fsum((mag * np.cos(t * ln)).tolist())
    im = -math.fsum((mag * np.sin(t * ln)).tolist()) if t else 0.0
    return ZetaEval(sigma=sigma, t=t, cutoff=cutoff, value=complex(re, im))
