"""Sieves and elementary arithmetic for k-free numbers.

All tables are dense numpy arrays indexed directly by ``n`` (slot 0 is a
placeholder holding 0), built once and then frozen read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Default ceiling for a single table, in bytes. Tables larger than this raise
# CapacityError instead of exhausting memory.
MEMORY_BUDGET_BYTES = 2**31

# Chunk length for the streaming window-energy computation.
WINDOW_CHUNK = 1 << 20


class CapacityError(MemoryError):
    """Requested table does not fit in the configured memory budget."""


def _check_capacity(n: int, bytes_per_entry: int, budget: int | None = None) -> None:
    budget = MEMORY_BUDGET_BYTES if budget is None else budget
    need = (n + 1) * bytes_per_entry
    if need > budget:
        raise CapacityError(
            f"table for N={n} needs ~{need} bytes, budget is {budget} bytes"
        )


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def iroot(n: int, k: int) -> int:
    """Largest integer ``r`` with ``r**k <= n`` (exact, for n >= 0)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n < 2:
        return n
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def primes_upto(n: int) -> np.ndarray:
    """All primes ``<= n`` by a plain Eratosthenes sieve."""
    if n < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(n + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@dataclass(frozen=True)
class MobiusTable:
    """Möbius values ``values[n] = mu(n)`` for ``1 <= n <= limit``."""

    limit: int
    values: np.ndarray  # int8, length limit + 1, values[0] == 0

    def __getitem__(self, n):
        return self.values[n]


@dataclass(frozen=True)
class KFreeTable:
    """Indicator ``bits[n] = mu_k(n)`` for ``1 <= n <= limit``."""

    k: int
    limit: int
    bits: np.ndarray  # bool, length limit + 1, bits[0] == False

    def __getitem__(self, n):
        return self.bits[n]

    def count(self, n: int | None = None) -> int:
        n = self.limit if n is None else n
        return int(np.count_nonzero(self.bits[: n + 1]))


@dataclass(frozen=True)
class BandSpec:
    """Divisor band ``y <= d < z`` for the banded sums b_{y,z}."""

    k: int
    y: float
    z: float

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if not (1 <= self.y < self.z):
            raise ValueError(f"band needs 1 <= y < z, got y={self.y}, z={self.z}")

    def divisors(self, dmax: int | None = None) -> range:
        """Integers ``d`` with ``y <= d < z`` (optionally capped at ``dmax``)."""
        lo = max(1, math.ceil(self.y))
        hi = math.ceil(self.z)  # exclusive
        if dmax is not None:
            hi = min(hi, dmax + 1)
        return range(lo, max(lo, hi))


def sieve_mobius(n: int, budget: int | None = None) -> MobiusTable:
    """Möbius function on ``1..n``.

    Small primes (``p <= sqrt(n)``) are sieved directly; a running product of
    the small prime divisors then exposes the at most one remaining large
    prime factor of each squarefree entry.
    """
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    _check_capacity(n, 5, budget)
    mu = np.ones(n + 1, dtype=np.int8)
    mu[0] = 0
    prod_dtype = np.uint32 if n < 2**32 else np.uint64
    prod = np.ones(n + 1, dtype=prod_dtype)
    for p in primes_upto(math.isqrt(n)):
        p = int(p)
        mu[p::p] *= -1
        prod[p::p] *= p
        mu[p * p :: p * p] = 0
    big = prod < np.arange(n + 1, dtype=prod_dtype)
    mu[big] *= -1
    del prod, big
    return MobiusTable(n, _frozen(mu))


def sieve_kfree(k: int, n: int, budget: int | None = None) -> KFreeTable:
    """Indicator of k-free numbers on ``1..n`` (clears multiples of ``p**k``)."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    _check_capacity(n, 1, budget)
    bits = np.ones(n + 1, dtype=bool)
    bits[0] = False
    for p in primes_upto(iroot(n, k)):
        q = int(p) ** k
        bits[q::q] = False
    return KFreeTable(k, n, _frozen(bits))


def count_kfree(k: int, n: int, table: KFreeTable | None = None,
                mobius: MobiusTable | None = None) -> int:
    """Q_k(N), the number of k-free integers in ``[1, N]``.

    Uses a supplied sieve table if given; otherwise evaluates
    ``sum_{d^k <= N} mu(d) * floor(N / d^k)``, which needs Möbius values only
    up to ``N**(1/k)``.
    """
    if n < 1:
        return 0
    if table is not None:
        if table.k != k or table.limit < n:
            raise ValueError("table does not cover the requested (k, N)")
        return table.count(n)
    dmax = iroot(n, k)
    if mobius is None or mobius.limit < dmax:
        mobius = sieve_mobius(max(dmax, 1))
    d = np.arange(1, dmax + 1, dtype=np.int64)
    return int(np.sum(mobius.values[1 : dmax + 1].astype(np.int64) * (n // d**k)))


def band_value(n: int, spec: BandSpec, mobius: MobiusTable) -> int:
    """b_{y,z}(n): sum of mu(d) over ``y <= d < z`` with ``d**k | n``.

    ``b(0) = 0`` by convention.
    """
    if n == 0:
        return 0
    m = abs(n)
    dmax = iroot(m, spec.k)
    total = 0
    for d in spec.divisors(dmax):
        if d > mobius.limit:
            raise ValueError(f"Möbius table (limit {mobius.limit}) too short for d={d}")
        if m % d**spec.k == 0:
            total += int(mobius.values[d])
    return total


def band_window(k: int, lo: int, hi: int, spec: BandSpec,
                mobius: MobiusTable) -> np.ndarray:
    """b_{y,z}(n) for ``lo <= n <= hi`` as an int16 array (``lo >= 1``)."""
    if spec.k != k:
        raise ValueError("band spec has a different k")
    out = np.zeros(max(hi - lo + 1, 0), dtype=np.int16)
    if out.size == 0:
        return out
    dmax = iroot(hi, k)
    for d in spec.divisors(dmax):
        m = int(mobius.values[d])
        if m == 0:
            continue
        q = d**k
        start = -(-lo // q) * q
        if start <= hi:
            out[start - lo :: q] += m
    return out


def window_band_energy(k: int, n: int, K: float, spec: BandSpec,
                       mobius: MobiusTable | None = None,
                       chunk: int = WINDOW_CHUNK) -> int:
    """Sum of ``b_{y,z}(m)**2`` over the window ``N - K < m <= N``.

    Streams over the window in chunks, so memory stays O(chunk).
    """
    lo = max(math.floor(n - K) + 1, 1)
    if lo > n:
        return 0
    dmax = iroot(n, k)
    if mobius is None or mobius.limit < dmax:
        mobius = sieve_mobius(max(dmax, 1))
    total = 0
    for a in range(lo, n + 1, chunk):
        b = min(a + chunk - 1, n)
        w = band_window(k, a, b, spec, mobius).astype(np.int64)
        total += int(np.dot(w, w))
    return total


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


def totient(r: int) -> int:
    """Euler's phi."""
    if r < 1:
        raise ValueError(f"totient needs r >= 1, got {r}")
    out = r
    for p in factorize(r):
        out -= out // p
    return out


def totient_table(n: int) -> np.ndarray:
    """phi(m) for ``0 <= m <= n`` (phi[0] = 0)."""
    _check_capacity(n, 8)
    phi = np.arange(n + 1, dtype=np.int64)
    for p in primes_upto(n):
        p = int(p)
        phi[p::p] -= phi[p::p] // p
    return _frozen(phi)


def compute_cr(r: int, k: int, tol: float = 1e-6,
               mobius: MobiusTable | None = None) -> float:
    """Singular constant C(r) = sum_f mu(f r) / f**k for squarefree ``r``.

    The series is cut at ``F = ceil(tol**(-1/(k-1)))``; since
    ``sum_{f>F} f**-k < F**(1-k)/(k-1) <= tol`` the result is within ``tol``.
    For squarefree r, mu(f r) = mu(f) mu(r) when gcd(f, r) = 1 and 0 otherwise.
    """
    if r < 1 or not is_squarefree(r):
        raise ValueError(f"C(r) needs squarefree r >= 1, got {r}")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    F = math.ceil(tol ** (-1.0 / (k - 1)))
    if mobius is None or mobius.limit < F:
        mobius = sieve_mobius(F)
    f = np.arange(1, F + 1, dtype=np.int64)
    mu = mobius.values[1 : F + 1].astype(np.float64)
    if r > 1:
        mu = np.where(np.gcd(f, r) == 1, mu, 0.0)
    s = math.fsum(mu / f.astype(np.float64) ** k)
    mu_r = (-1) ** len(factorize(r))
    c = mu_r * s
    if not (1 / 3 - tol <= abs(c) <= 2 + tol):
        raise ArithmeticError(f"|C({r})| = {abs(c)} outside [1/3, 2]")
    return c
