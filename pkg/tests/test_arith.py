import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kfree_moments.arith import (
    BandSpec,
    CapacityError,
    band_value,
    band_window,
    compute_cr,
    count_kfree,
    iroot,
    is_squarefree,
    sieve_kfree,
    sieve_mobius,
    totient,
    totient_table,
    window_band_energy,
)

from . import oracles


def test_mobius_small():
    assert sieve_mobius(1).values[1] == 1
    assert list(sieve_mobius(6).values[1:]) == [1, -1, -1, 0, -1, 1]
    assert sieve_mobius(30).values[30] == -1


def test_mobius_matches_factorization_oracle():
    mu = sieve_mobius(1000)
    assert [int(v) for v in mu.values[1:]] == [oracles.mobius(n) for n in range(1, 1001)]


def test_mobius_summatory_identity():
    n = 10**4
    mu = sieve_mobius(n).values.astype(np.int64)
    acc = np.zeros(n + 1, dtype=np.int64)
    for d in range(1, n + 1):
        acc[d::d] += mu[d]
    assert acc[1] == 1
    assert not acc[2:].any()


def test_mobius_primes_and_large_prime_factor():
    mu = sieve_mobius(10**5)
    # 99991 is prime; 2 * 49999 has a prime factor above sqrt(N)
    assert mu[99991] == -1
    assert mu[2 * 49999] == 1
    assert mu[4 * 24989] == 0


def test_tables_are_read_only():
    mu = sieve_mobius(10)
    with pytest.raises(ValueError):
        mu.values[1] = 5


def test_capacity_error():
    with pytest.raises(CapacityError):
        sieve_mobius(10**6, budget=1000)
    with pytest.raises(CapacityError):
        sieve_kfree(2, 10**6, budget=1000)


@pytest.mark.parametrize("k, n, clear", [
    (2, 10, {4, 8, 9}),
    (3, 10, {8}),
])
def test_kfree_small(k, n, clear):
    bits = sieve_kfree(k, n).bits
    assert {i for i in range(1, n + 1) if not bits[i]} == clear


@pytest.mark.parametrize("k", [2, 3, 4])
def test_kfree_matches_oracle(k):
    bits = sieve_kfree(k, 2000).bits
    assert [bool(b) for b in bits[1:]] == [oracles.is_kfree(n, k) for n in range(1, 2001)]


@pytest.mark.parametrize("k", [2, 3])
def test_kfree_identity_with_mobius(k):
    n = 10**6
    mu = sieve_mobius(iroot(n, k))
    acc = np.zeros(n + 1, dtype=np.int64)
    for d in range(1, iroot(n, k) + 1):
        acc[d**k :: d**k] += mu[d]
    assert np.array_equal(acc[1:], sieve_kfree(k, n).bits[1:].astype(np.int64))


@pytest.mark.parametrize("k, n, expected", [
    (2, 10, 7), (2, 100, 61), (2, 10**4, 6083), (3, 10, 9),
])
def test_count_kfree(k, n, expected):
    assert sum(oracles.is_kfree(m, k) for m in range(1, n + 1)) == expected
    assert count_kfree(k, n) == expected
    assert count_kfree(k, n, table=sieve_kfree(k, n)) == expected


def test_iroot():
    assert iroot(0, 2) == 0
    assert iroot(15, 2) == 3
    assert iroot(16, 2) == 4
    assert iroot(2**60, 3) == 2**20
    assert iroot(2**60 - 1, 3) == 2**20 - 1


def test_band_spec_validation():
    with pytest.raises(ValueError):
        BandSpec(2, 3, 3)
    with pytest.raises(ValueError):
        BandSpec(2, 0.5, 3)
    with pytest.raises(ValueError):
        BandSpec(1, 1, 3)


def test_band_value_examples(mobius_1e4):
    assert band_value(7919, BandSpec(2, 1, 2), mobius_1e4) == 1
    assert band_value(72, BandSpec(2, 2, 4), mobius_1e4) == -2
    assert band_value(0, BandSpec(2, 2, 4), mobius_1e4) == 0
    assert band_value(-72, BandSpec(2, 2, 4), mobius_1e4) == -2


@given(st.integers(1, 3000), st.integers(2, 3), st.integers(1, 20), st.integers(1, 20))
@settings(max_examples=150, deadline=None)
def test_band_value_matches_oracle(n, k, y, width):
    mu = sieve_mobius(100)
    assert band_value(n, BandSpec(k, y, y + width), mu) == oracles.band(n, k, y, y + width)


@given(st.integers(1, 5000), st.integers(1, 10), st.integers(1, 10), st.integers(1, 10))
@settings(max_examples=100, deadline=None)
def test_band_additivity(n, y, a, b):
    mu = sieve_mobius(100)
    z, w = y + a, y + a + b
    left = band_value(n, BandSpec(2, y, z), mu) + band_value(n, BandSpec(2, z, w), mu)
    assert left == band_value(n, BandSpec(2, y, w), mu)


def test_band_window_matches_pointwise(mobius_1e4):
    spec = BandSpec(2, 2, 50)
    w = band_window(2, 500, 1500, spec, mobius_1e4)
    assert [int(v) for v in w] == [band_value(n, spec, mobius_1e4) for n in range(500, 1501)]


def test_window_energy_full_window_trivial_band():
    assert window_band_energy(2, 1000, 1000, BandSpec(2, 1, 2)) == 1000


def test_window_energy_matches_divisor_oracle(mobius_1e4):
    n = 10**4
    expected = sum(oracles.band_by_divisors(m, 2, 2, 100) ** 2 for m in range(1, n + 1))
    assert expected == 3917  # frozen from the oracle above
    assert window_band_energy(2, n, n, BandSpec(2, 2, 100), mobius_1e4) == expected


def test_window_energy_streams_in_chunks(mobius_1e4):
    spec = BandSpec(2, 2, 64)
    whole = window_band_energy(2, 10**4, 3000.5, spec, mobius_1e4)
    chunked = window_band_energy(2, 10**4, 3000.5, spec, mobius_1e4, chunk=97)
    assert whole == chunked
    brute = sum(band_value(m, spec, mobius_1e4) ** 2 for m in range(7000, 10**4 + 1))
    assert whole == brute  # N - K = 6999.5 < m <= N


def test_window_energy_half_width_keeps_endpoint():
    # N - K = 99.5 < m <= 100 leaves only m = 100 = 2^2 * 25, where b = mu(2) = -1
    assert window_band_energy(2, 100, 0.5, BandSpec(2, 2, 4)) == 1
    assert window_band_energy(2, 99, 0.5, BandSpec(2, 2, 4)) == 1  # 99 = 3^2 * 11
    assert window_band_energy(2, 101, 0.5, BandSpec(2, 2, 4)) == 0


@pytest.mark.parametrize("r, expected", [(1, 1), (12, 4), (97, 96)])
def test_totient(r, expected):
    assert oracles.totient(r) == expected
    assert totient(r) == expected


def test_totient_table():
    phi = totient_table(500)
    assert [int(v) for v in phi[1:]] == [oracles.totient(r) for r in range(1, 501)]


def _cr_oracle(r, k):
    # Euler product: mu(r) / zeta(k) / prod_{p | r} (1 - p^-k)
    val = mpmath.mpf(1) / mpmath.zeta(k)
    for p in oracles.factor(r):
        val /= 1 - mpmath.mpf(p) ** (-k)
    return float(oracles.mobius(r) * val)


@pytest.mark.parametrize("r, k, approx", [
    (1, 2, 0.607927), (2, 2, -0.810569), (1, 3, 0.831907),
])
def test_compute_cr_examples(r, k, approx):
    c = compute_cr(r, k, 1e-6)
    assert abs(c - _cr_oracle(r, k)) < 1e-6
    assert c == pytest.approx(approx, abs=1e-6)


@pytest.mark.parametrize("r", [1, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 30])
def test_compute_cr_bounds_and_oracle(r):
    for k, tol in ((2, 1e-5), (3, 1e-7)):
        c = compute_cr(r, k, tol)
        assert abs(c - _cr_oracle(r, k)) < tol
        assert 1 / 3 - tol <= abs(c) <= 2 + tol


def test_compute_cr_rejects_non_squarefree():
    with pytest.raises(ValueError):
        compute_cr(4, 2)
    assert not is_squarefree(12)
    assert is_squarefree(30)


def test_compute_cr_truncation_tail_bound():
    # tail sum_{f > F} f^-k is below tol at F = ceil(tol^(-1/(k-1)))
    for k, tol in ((2, 1e-3), (3, 1e-4), (4, 1e-5)):
        F = math.ceil(tol ** (-1 / (k - 1)))
        tail = float(mpmath.zeta(k) - mpmath.fsum(mpmath.mpf(f) ** -k for f in range(1, F + 1)))
        assert tail < tol
