import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from multdyck import DomainError, CapacityError, rng
from multdyck.numtheory import extend_multiplicatively, kernel_masks, sieve
from multdyck.paths import SignAssignment, exact_m, mask_steps
from multdyck.random_mult import (
    mc_m,
    moments,
    sample_assignment,
    second_moment_bruteforce,
    second_moment_formula,
    second_moment_mc,
    sigma_preset,
    subgaussian_check,
    tail_integral,
    tail_weights,
    wilson_interval,
    zeta_truncated,
)
from oracles import brute_second_moment, mult_value, primes_upto


# -- samples -------------------------------------------------------------------


def test_sample_n1():
    s = sample_assignment(1, seed=3)
    assert s.assignment.bits == 0
    assert s.walk().tolist() == [1]


def test_sample_deterministic():
    assert sample_assignment(500, 9, 4) == sample_assignment(500, 9, 4)
    assert sample_assignment(500, 9, 4) != sample_assignment(500, 9, 5)


def test_sample_matches_generator_flags():
    k = len(primes_upto(300))
    flags = rng.negative_flags(17, np.arange(5, dtype=np.uint64), k)
    for stream in range(5):
        bits = sample_assignment(300, 17, stream).assignment.bits
        assert [bool(bits >> i & 1) for i in range(k)] == flags[stream].tolist()


def test_sign_at_two_is_fair():
    flags = rng.negative_flags(123, np.arange(100_000, dtype=np.uint64), 25)
    eps2 = np.where(flags[:, 0], -1.0, 1.0)
    assert abs(eps2.mean()) <= 3 / math.sqrt(100_000)


def test_walk_invariants():
    for stream in range(20):
        s = sample_assignment(2000, 42, stream)
        f = s.values()
        walk = s.walk()
        assert walk[0] == 1
        assert np.all(np.abs(np.diff(walk)) == 1)
        assert np.all(f[[j * j for j in range(1, 45)]] == 1)


def test_values_match_direct_multiplicative_extension():
    s = sample_assignment(200, 5, 1)
    ps = primes_upto(200)
    signs = {q: (-1 if s.assignment.bits >> i & 1 else 1) for i, q in enumerate(ps)}
    assert s.values()[1:].tolist() == [mult_value(n, signs) for n in range(1, 201)]


def test_mask_route_matches_factorization_route():
    n_max = 10_000
    pt = sieve(n_max)
    k = pt.pi(n_max)
    kmt = kernel_masks(n_max, pt, width=k)
    streams = np.arange(12, dtype=np.uint64)
    words = rng.truncate_words(rng.sign_words(8, streams, kmt.words), k)
    by_masks = mask_steps(words, kmt.masks[1:])
    neg = rng.negative_flags(8, streams, k)
    by_lpf = extend_multiplicatively(np.where(neg, -1, 1), pt, n_max)[:, 1:]
    assert np.array_equal(by_masks, by_lpf)


@pytest.mark.parametrize("n", [2, 10, 67, 300, 1000])
def test_mc_routes_agree(n):
    a = mc_m(n, 20_000, seed=3, route="masks", mask_width=256)
    b = mc_m(n, 20_000, seed=3, route="factorization")
    assert a.successes == b.successes


# -- m(N) by sampling --------------------------------------------------------------


def test_mc_n1_is_exact():
    e = mc_m(1, 1000, seed=0)
    assert e.estimate == 1.0 and e.successes == 1000
    assert e.ci_low <= 1.0 == e.ci_high


def test_mc_n3_covers_three_quarters():
    e = mc_m(3, 1_000_000, seed=1)
    assert e.ci_low <= 0.75 <= e.ci_high


def test_mc_deterministic_across_workers():
    assert mc_m(67, 100_000, seed=5, workers=1) == mc_m(67, 100_000, seed=5, workers=4)


def test_mc_rejects_bad_arguments():
    with pytest.raises(DomainError):
        mc_m(0, 10)
    with pytest.raises(DomainError):
        mc_m(10, 0)


def test_mc_calibration_reduced():
    truth = float(exact_m(23).m_value)
    hits = 0
    for seed in range(10):
        lo, hi = mc_m(23, 100_000, seed=seed).interval(0.99)
        hits += lo <= truth <= hi
    assert hits >= 8


def _wilson_by_roots(k, n, z):
    # endpoints solve (p_hat - p)^2 n = z^2 p (1 - p)
    ph = k / n
    roots = np.roots([n + z * z, -(2 * n * ph + z * z), n * ph * ph])
    return sorted(float(r.real) for r in roots)


@pytest.mark.parametrize("k,n", [(9, 10), (1, 10), (430026, 1_000_000), (50, 100), (3, 7)])
def test_wilson_matches_quadratic_roots(k, n):
    lo, hi = wilson_interval(k, n, 0.95)
    z = 1.959963984540054
    rlo, rhi = _wilson_by_roots(k, n, z)
    assert lo == pytest.approx(rlo, abs=1e-12)
    assert hi == pytest.approx(rhi, abs=1e-12)
    assert lo <= k / n <= hi


def test_wilson_extremes():
    assert wilson_interval(10, 10)[1] == 1.0
    assert wilson_interval(0, 10)[0] == 0.0
    with pytest.raises(DomainError):
        wilson_interval(0, 0)


# -- second moment -------------------------------------------------------------


@pytest.mark.parametrize("u,expected", [(1, 1), (2, 2), (4, 6)])
def test_second_moment_formula_examples(u, expected):
    assert second_moment_formula(u) == expected


@pytest.mark.parametrize("u,expected", [(1, 1), (4, 6)])
def test_second_moment_bruteforce_examples(u, expected):
    assert second_moment_bruteforce(u) == expected


def test_second_moment_u10():
    assert second_moment_bruteforce(10) == second_moment_formula(10) == brute_second_moment(10)


@pytest.mark.parametrize("u", range(1, 19))
def test_bruteforce_matches_trial_division_oracle(u):
    assert second_moment_bruteforce(u) == brute_second_moment(u)


def test_formula_below_chained_bound():
    u_max = 10_000
    pt = sieve(u_max)
    # sum_{d <= u} floor(u/d) = sum_{n <= u} tau(n)
    tau = np.zeros(u_max + 1, dtype=np.int64)
    for d in range(1, u_max + 1):
        tau[d::d] += 1
    floor_sums = np.cumsum(tau)
    harmonic = np.cumsum(1.0 / np.arange(1, u_max + 1))
    for u in range(1, u_max + 1):
        v = second_moment_formula(u, pt)
        # floor(sqrt(u/d))^2 <= floor(u/d) <= u/d term by term
        assert v <= floor_sums[u]
        assert v <= u * harmonic[u - 1] * (1 + 1e-12)


def test_second_moment_bruteforce_cap():
    with pytest.raises(CapacityError):
        second_moment_bruteforce(100)  # pi(100) = 25 > 22


def test_second_moment_mc_close_to_formula():
    u = 30
    assert second_moment_mc(u, 100_000, seed=2) == pytest.approx(second_moment_formula(u), rel=0.05)


def test_moments_records():
    recs = moments(12, mode="both")
    assert [r.u for r in recs] == list(range(1, 13))
    assert all(r.exact_value == r.formula_value for r in recs)
    assert all(r.exact_value is None for r in moments(5, mode="formula"))
    with pytest.raises(DomainError):
        moments(5, mode="nope")


# -- sub-Gaussian ------------------------------------------------------------------


def test_subgaussian_gamma_zero():
    r = subgaussian_check(0.8, 20, 0.0, 10_000, seed=1)
    assert r.bound == 1.0 and r.empirical_tail <= r.bound


def test_subgaussian_single_prime():
    # sigma = 1 gives s_2 = 1/2, so f(2)/2 >= 1 never happens
    r = subgaussian_check(1.0, 1, 1.0, 10_000, seed=1)
    assert r.s == pytest.approx(0.25)
    assert r.empirical_tail == 0.0
    assert r.bound == pytest.approx(math.exp(-2))


def test_subgaussian_fifty_primes():
    probe = subgaussian_check(0.6, 50, 0.0, 1, seed=0)
    r = subgaussian_check(0.6, 50, 2 * math.sqrt(probe.s), 1_000_000, seed=4)
    assert r.bound == pytest.approx(math.exp(-2))
    assert r.empirical_tail <= math.exp(-2) + 3 * r.stderr


def test_subgaussian_s_value():
    r = subgaussian_check(0.75, 10, 0.5, 10, seed=0)
    assert r.s == pytest.approx(sum(p ** -1.5 for p in primes_upto(29)))


def test_subgaussian_validation():
    with pytest.raises(DomainError):
        subgaussian_check(0.6, 10, -1.0, 100)
    with pytest.raises(DomainError):
        subgaussian_check(0.5, 10, 1.0, 100)


def test_subgaussian_deterministic_across_workers():
    a = subgaussian_check(0.6, 100, 1.0, 100_000, seed=9, workers=1)
    b = subgaussian_check(0.6, 100, 1.0, 100_000, seed=9, workers=3)
    assert a == b


# -- tail integral -----------------------------------------------------------------


def test_sigma_presets():
    n = 1000
    ll = 3 * math.log(math.log(n)) / math.log(n)
    assert sigma_preset("half-plus", n) == pytest.approx(0.5 + ll)
    assert sigma_preset("one-plus", n) == pytest.approx(1 + ll)
    with pytest.raises(DomainError):
        sigma_preset("half-plus", 2)
    with pytest.raises(DomainError):
        sigma_preset("two-plus", 100)


def test_tail_empty_interval():
    t = tail_integral(50, 1.2, 50, 10, seed=0)
    assert t.mean_I == 0.0


def test_tail_rejects_bad_truncation():
    with pytest.raises(DomainError):
        tail_integral(50, 1.2, 40, 10)
    with pytest.raises(DomainError):
        tail_integral(50, 0.5, 100, 10)


def test_tail_all_plus_matches_quadrature():
    value = tail_integral(10, 2.0, 1000, 1, signs="all-plus").mean_I
    pieces = [integrate.quad(lambda u, n=n: n * u**-3.0, n, n + 1, epsabs=1e-15, epsrel=1e-13)[0]
              for n in range(10, 1000)]
    assert abs(value - math.fsum(pieces)) < 1e-9


def test_tail_weights_fractional_truncation():
    w = tail_weights(3, 1.5, 5.5)
    exact = [(3**-1.5 - 4**-1.5) / 1.5, (4**-1.5 - 5**-1.5) / 1.5, (5**-1.5 - 5.5**-1.5) / 1.5]
    assert np.allclose(w, exact, rtol=1e-12)


def test_tail_random_matches_direct_sum():
    t = tail_integral(20, 1.3, 300, 3, seed=6)
    w = tail_weights(20, 1.3, 300)
    vals = []
    for stream in range(3):
        walk = sample_assignment(300, 6, stream).walk()
        vals.append(float(np.sum(np.abs(walk[19:]) * w)))
    assert t.mean_I == pytest.approx(sum(vals) / 3, rel=1e-12)


def test_tail_mean_decreases_with_n():
    means = []
    for n in (100, 1000, 10_000):
        t = tail_integral(n, sigma_preset("half-plus", n), 10 * n, 200, seed=11)
        assert t.mean_I >= 0
        means.append(t.mean_I)
    assert means[0] > means[1] > means[2]


def test_tail_deterministic_across_workers():
    a = tail_integral(100, 1.2, 2000, 300, seed=2, workers=1)
    b = tail_integral(100, 1.2, 2000, 300, seed=2, workers=4)
    assert a == b


# -- zeta ------------------------------------------------------------------------


def test_zeta_two():
    z = zeta_truncated(None, 2.0, 0.0, 10**6)
    assert abs(z.value - math.pi**2 / 6) < 2e-6


def test_zeta_three():
    z = zeta_truncated(None, 3.0, 0.0, 10**4)
    assert abs(z.value.real - 1.2020569031595942) < 1e-7


def test_zeta_cutoff_one():
    for stream in range(3):
        assert zeta_truncated(sample_assignment(10, 1, stream), 0.7, 5.0, 1).value == 1


def test_zeta_matches_direct_sum():
    s = sample_assignment(500, 3)
    f = s.values()
    direct = sum(int(f[n]) * n ** complex(-0.8, -4.0) for n in range(1, 501))
    assert zeta_truncated(s, 0.8, 4.0, 500).value == pytest.approx(direct, rel=1e-12)


def test_zeta_needs_enough_signs():
    with pytest.raises(DomainError):
        zeta_truncated(SignAssignment(10, 0), 2.0, 0.0, 100)
    with pytest.raises(DomainError):
        zeta_truncated(None, 0.0, 0.0, 10)
