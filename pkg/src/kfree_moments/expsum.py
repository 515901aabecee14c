"""Trigonometric polynomials with integer coefficients.

A :class:`CoeffSeq` holds the weights ``c[n]`` of ``S(alpha) = sum c[n] e(alpha n)``
for ``1 <= n <= N``, with ``e(x) = exp(2 pi i x)``.  Evaluation is either
pointwise (:func:`eval_direct`, compensated summation) or on a uniform grid
through an FFT (:func:`eval_grid`, :func:`eval_shifted_abs`).  The smoothing
kernels (Fejér, the trapezoidal N/K kernel and its restriction to a residue
class) come in closed and direct-sum forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np
import scipy.fft as sfft

from ._config import get_threads
from .arith import KFreeTable, sieve_kfree

# Closed forms divide by sin^2(pi alpha); below this distance to the nearest
# integer the defining sums are used instead.
KERNEL_EPS = 1e-6

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CoeffSeq:
    """Integer weights ``coeffs[n]`` for ``n = 1..N``; ``coeffs[0]`` is always 0."""

    coeffs: np.ndarray
    label: str
    k: int | None = None

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coeffs must be a nonempty 1-d array")
        if c[0] != 0:
            raise ValueError("coeffs[0] must be 0 (sequences start at n = 1)")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def length(self) -> int:
        return self.coeffs.size - 1

    @classmethod
    def from_values(cls, values, label: str = "custom", k: int | None = None) -> "CoeffSeq":
        """Build from weights for ``n = 1..N`` (no leading zero slot)."""
        v = np.asarray(values)
        c = np.zeros(v.size + 1, dtype=np.result_type(v.dtype, np.int8))
        c[1:] = v
        return cls(c, label, k)


def kfree_sequence(k: int, n: int, table: KFreeTable | None = None) -> CoeffSeq:
    """The mu_k sequence on ``1..N``."""
    if table is None or table.k != k or table.limit < n:
        table = sieve_kfree(k, n)
    c = table.bits[: n + 1].astype(np.int8)
    return CoeffSeq(c, f"mu_{k}", k)


def dist_to_int(x: float) -> float:
    """||x||, distance to the nearest integer."""
    return abs(x - round(x))


def _phases(n: np.ndarray, alpha) -> np.ndarray:
    """Fractional parts of ``alpha * n`` in [0, 1).

    Rational ``alpha`` is reduced exactly in integer arithmetic.
    """
    if isinstance(alpha, Rational) and not isinstance(alpha, (int, np.integer)):
        a = Fraction(alpha)
        p, q = a.numerator % a.denominator, a.denominator
        if p * int(np.abs(n).max(initial=0)) < 2**62:
            return ((p * n) % q) / q
        return np.array([(p * int(m)) % q for m in n], dtype=np.float64) / q
    a = float(alpha)
    a -= math.floor(a)
    return np.mod(a * n.astype(np.float64), 1.0)


def compensated_sum(x: np.ndarray) -> float:
    """Sum with pairwise error-free transformations (TwoSum cascade).

    Each pairwise level keeps its exact rounding errors; the (tiny) error
    terms are then added, giving ``eps * |sum| + O(eps^2 log n) * sum |x|``
    accuracy at numpy speed.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size == 0:
        return 0.0
    err = []
    while x.size > 1:
        if x.size % 2:
            x = np.append(x, 0.0)
        a, b = x[0::2], x[1::2]
        s = a + b
        bb = s - a
        err.append(float(np.sum((a - (s - bb)) + (b - bb))))
        x = s
    return float(x[0]) + math.fsum(err)


def eval_direct(seq: CoeffSeq, alpha) -> complex:
    """S(alpha) = sum_n c[n] e(alpha n) with compensated summation.

    ``alpha`` may be a float or an exact rational (``Fraction``/``int``).
    """
    n = np.flatnonzero(seq.coeffs)
    if n.size == 0:
        return 0j
    c = seq.coeffs[n].astype(np.float64)
    theta = TWO_PI * _phases(n.astype(np.int64), alpha)
    return complex(compensated_sum(c * np.cos(theta)), compensated_sum(c * np.sin(theta)))


def default_grid_size(n: int, oversample: int = 8) -> int:
    """Smallest power of two ``>= oversample * N`` (and ``>= N + 1``)."""
    target = max(oversample * n, n + 1, 2)
    return 1 << (target - 1).bit_length()


@dataclass(frozen=True)
class SpectrumGrid:
    """``values[j] = S(j / M)`` for ``j = 0..M-1``."""

    values: np.ndarray
    source_label: str
    source_length: int
    k: int | None = None

    @property
    def grid_size(self) -> int:
        return self.values.size


def eval_grid(seq: CoeffSeq, m: int | None = None) -> SpectrumGrid:
    """Evaluate ``S`` on the grid ``j / M`` via one FFT.

    ``M`` defaults to :func:`default_grid_size`; ``M < N + 1`` would alias
    distinct frequencies and is rejected.
    """
    n = seq.length
    m = default_grid_size(n) if m is None else int(m)
    if m < n + 1:
        raise ValueError(f"grid size M={m} must be >= N+1={n + 1}")
    x = seq.coeffs.astype(np.float64)
    # sum c_n e(+nj/M) = conj(FFT(c)) for real c
    v = np.conj(sfft.fft(x, n=m, workers=get_threads()))
    v.flags.writeable = False
    return SpectrumGrid(v, seq.label, n, seq.k)


def eval_shifted_abs(seq: CoeffSeq, m: int, shift: Fraction) -> np.ndarray:
    """``|S((j + shift) / M)|`` for ``j = 0..M-1``, ``0 <= shift < 1``.

    A grid of size ``L*M`` is the union of the ``L`` shifted grids with
    ``shift = s/L``; building it this way keeps memory at O(M).
    For ``shift == 0`` only the half spectrum ``j = 0..M//2`` is returned.
    """
    n = seq.length
    if m < n + 1:
        raise ValueError(f"grid size M={m} must be >= N+1={n + 1}")
    x = seq.coeffs.astype(np.float64)
    if shift == 0:
        return np.abs(sfft.rfft(x, n=m, workers=get_threads()))
    idx = np.arange(n + 1, dtype=np.int64)
    tw = np.exp(-1j * TWO_PI * _phases(idx, Fraction(shift) / m))
    return np.abs(sfft.fft(x * tw, n=m, workers=get_threads()))


# --------------------------------------------------------------------------
# Kernels


def _require_int(x, name: str) -> int:
    if float(x) != int(x):
        raise ValueError(f"{name} must be an integer, got {x}")
    return int(x)


def fejer_direct(n: int, alpha: float) -> float:
    """sum_{|m| <= N} (1 - |m|/N) e(alpha m)."""
    n = _require_int(n, "N")
    m = np.arange(1, n, dtype=np.float64)
    d = alpha - round(alpha)
    return 1.0 + 2.0 * math.fsum((1.0 - m / n) * np.cos(TWO_PI * m * d))


def fejer(n: int, alpha: float) -> float:
    """Fejér kernel ``sin^2(pi N a) / (N sin^2(pi a))``; equals N at integers."""
    n = _require_int(n, "N")
    if n < 1:
        raise ValueError("N must be >= 1")
    d = alpha - round(alpha)
    if abs(d) < KERNEL_EPS:
        return fejer_direct(n, d)
    s = math.sin(math.pi * n * d)
    t = math.sin(math.pi * d)
    return s * s / (n * t * t)


def kernel_nk_direct(n: float, k: float, alpha: float) -> float:
    """sum_{|m| <= N+K} min(1, (N+K-|m|)/K) e(alpha m), for real N, K >= 1."""
    top = n + k
    mmax = math.floor(top)
    m = np.arange(1, mmax + 1, dtype=np.float64)
    w = np.minimum(1.0, (top - m) / k)
    d = alpha - round(alpha)
    return 1.0 + 2.0 * math.fsum(w * np.cos(TWO_PI * m * d))


def kernel_nk(n: float, k: float, alpha: float) -> float:
    """Trapezoidal kernel ``sin(pi(2N+K)a) sin(pi K a) / (K sin^2(pi a))``.

    For integer N, K this equals :func:`kernel_nk_direct`.  Non-integer
    parameters are replaced by ``[N]+1`` and ``[K]+1``, which changes the
    value by O(1).
    """
    if n < 1 or k < 1:
        raise ValueError("kernel_nk needs N, K >= 1")
    if float(n) != int(n) or float(k) != int(k):
        n, k = math.floor(n) + 1, math.floor(k) + 1
    n, k = int(n), int(k)
    # integer parameters make the closed form 1-periodic
    d = alpha - round(alpha)
    if abs(d) < KERNEL_EPS:
        return kernel_nk_direct(n, k, d)
    t = math.sin(math.pi * d)
    return math.sin(math.pi * (2 * n + k) * d) * math.sin(math.pi * k * d) / (k * t * t)


def nk_bound(n: float, k: float, alpha: float) -> float:
    """min(2N+K+1, 1/||a|| + 1, 1/(K||a||^2) + 1)."""
    d = dist_to_int(alpha)
    if d == 0:
        return 2 * n + k + 1
    # divide stepwise: d * d underflows for subnormal d
    return min(2 * n + k + 1, 1 / d + 1, 1 / k / d / d + 1)


def kernel_congruence(n: float, k: float, m: int, d: int, alpha: float) -> complex:
    """Trapezoidal kernel restricted to ``n' == M (mod d)``, by direct summation."""
    if d < 1 or d > n + k:
        raise ValueError(f"need 1 <= d <= N+K, got d={d}")
    top = n + k
    mmax = math.floor(top)
    first = -mmax + ((m + mmax) % d)
    idx = np.arange(first, mmax + 1, d, dtype=np.int64)
    if idx.size == 0:
        return 0j
    w = np.minimum(1.0, (top - np.abs(idx)) / k)
    theta = TWO_PI * _phases(idx, alpha)
    return complex(math.fsum(w * np.cos(theta)), math.fsum(w * np.sin(theta)))


def congruence_bound(n: float, k: float, d: int, alpha: float) -> float:
    """min((N+K)/d, 1/||d a||, d/(K ||d a||^2)) + 1."""
    t = dist_to_int(d * alpha)
    base = (n + k) / d
    if t > 0:
        base = min(base, 1 / t, d / k / t / t)
    return base + 1
