"""Dyadic decomposition of mu_k into divisor bands.

``b_i = b_{2^(i-1), 2^i}`` and the merged tail ``b* = b_{2^h, 2^H}``, where
``N^(1/k) <= 2^H < 2 N^(1/k)`` and ``N^(1/(k+1)) < 2^h <= 2 N^(1/(k+1))``.
Then ``mu_k = sum_{i<=H} b_i = sum_{i<=h} b_i + b*`` pointwise on ``1..N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np

from .arith import (
    BandSpec,
    KFreeTable,
    MobiusTable,
    band_window,
    iroot,
    sieve_kfree,
    sieve_mobius,
    window_band_energy,
)
from .expsum import CoeffSeq
from .quad import DEFAULT_REL_TOL, MomentResult, QuadratureBudgetError, moments_with_refinement

Piece = Union[int, str]  # band index i, or "star"
STAR = "star"


@dataclass(frozen=True)
class DecompositionPlan:
    k: int
    n: int
    h: int
    H: int

    @property
    def star_band(self) -> tuple[int, int]:
        return 2**self.h, 2**self.H


def choose_plan(k: int, n: int) -> DecompositionPlan:
    """The unique ``h``, ``H`` fixed by the two-sided dyadic constraints.

    Both are found in exact integer arithmetic: ``H`` is the least integer with
    ``2^(kH) >= N`` and ``h`` the least with ``2^((k+1)h) > N``.
    """
    if n < 2:
        raise ValueError(f"N must be >= 2, got {n}")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    H = 0
    while 2 ** (k * H) < n:
        H += 1
    h = 0
    while 2 ** ((k + 1) * h) <= n:
        h += 1
    return DecompositionPlan(k, n, h, H)


def _mobius_for(n: int, k: int, mobius: MobiusTable | None) -> MobiusTable:
    dmax = iroot(n, k)
    if mobius is None or mobius.limit < dmax:
        mobius = sieve_mobius(max(dmax, 1))
    return mobius


def _band_array(k: int, n: int, y: int, z: int, mobius: MobiusTable) -> np.ndarray:
    out = np.zeros(n + 1, dtype=np.int16)
    if y < z:
        out[1:] = band_window(k, 1, n, BandSpec(k, y, z), mobius)
    return out


def build_band_coefficients(k: int, n: int, i: int,
                            mobius: MobiusTable | None = None) -> CoeffSeq:
    """Coefficients of T_i: b_{2^(i-1), 2^i}(n) for ``n = 1..N``."""
    if i < 1:
        raise ValueError(f"band index must be >= 1, got {i}")
    mobius = _mobius_for(n, k, mobius)
    c = _band_array(k, n, 2 ** (i - 1), 2**i, mobius)
    return CoeffSeq(c, f"band {i}", k)


def build_star_coefficients(plan: DecompositionPlan,
                            mobius: MobiusTable | None = None) -> CoeffSeq:
    """Coefficients of T*: b_{2^h, 2^H}; all zero when ``h == H``."""
    mobius = _mobius_for(plan.n, plan.k, mobius)
    y, z = plan.star_band
    c = _band_array(plan.k, plan.n, y, z, mobius)
    return CoeffSeq(c, "star band", plan.k)


@dataclass(frozen=True)
class DecompositionReport:
    plan: DecompositionPlan
    full_ok: bool
    split_ok: bool
    # (identity, n, expected mu_k(n), got) for the first mismatch, if any
    first_violation: tuple | None = None

    @property
    def passed(self) -> bool:
        return self.full_ok and self.split_ok


def verify_decomposition(plan: DecompositionPlan,
                         mobius: MobiusTable | None = None,
                         table: KFreeTable | None = None,
                         band_source: Callable[[Piece], np.ndarray] | None = None,
                         ) -> DecompositionReport:
    """Check both band identities for every ``n <= N`` in integer arithmetic.

    Bands are streamed one at a time into a running sum.  ``band_source``
    overrides how each piece's coefficient array is produced.
    """
    k, n = plan.k, plan.n
    if band_source is None:
        mob = _mobius_for(n, k, mobius)

        def band_source(piece):
            if piece == STAR:
                return build_star_coefficients(plan, mob).coeffs
            return build_band_coefficients(k, n, piece, mob).coeffs

    if table is None or table.k != k or table.limit < n:
        table = sieve_kfree(k, n)
    target = table.bits[: n + 1].astype(np.int32)

    running = np.zeros(n + 1, dtype=np.int32)
    split = None
    for i in range(1, plan.H + 1):
        running += band_source(i)
        if i == plan.h:
            split = running + band_source(STAR)
    if split is None:  # h == 0 cannot happen for N >= 2, kept for safety
        split = band_source(STAR).astype(np.int32)

    first = None
    checks = []
    for name, arr in (("full", running), ("split", split)):
        bad = np.flatnonzero(arr[1:] != target[1:])
        checks.append(bad.size == 0)
        if bad.size and first is None:
            m = int(bad[0]) + 1
            first = (name, m, int(target[m]), int(arr[m]))
    return DecompositionReport(plan, checks[0], checks[1], first)


# --------------------------------------------------------------------------
# Windowed band energies


@dataclass(frozen=True)
class Lemma1Row:
    k: int
    n: int
    K: float
    y: float
    z: float
    energy: int
    bound: float

    @property
    def ratio(self) -> float:
        return self.energy / self.bound


def lemma1_bound(k: int, n: int, K: float, y: float, z: float) -> float:
    """``K y^(1-k) + N^(1/k) log^3 z`` with unit constants; second term dropped if K = N."""
    b = K * y ** (1 - k)
    if K != n:
        b += n ** (1 / k) * math.log(z) ** 3
    return b


def lemma1_sweep(k: int, cases: Iterable[tuple], mobius: MobiusTable | None = None
                 ) -> list[Lemma1Row]:
    """Energy / bound for each ``(N, K, y, z)`` case."""
    rows = []
    for n, K, y, z in cases:
        if not (1 <= K <= n):
            raise ValueError(f"need 1 <= K <= N, got K={K}, N={n}")
        spec = BandSpec(k, y, z)
        mob = _mobius_for(n, k, mobius)
        e = window_band_energy(k, n, K, spec, mob)
        rows.append(Lemma1Row(k, n, K, y, z, e, lemma1_bound(k, n, K, y, z)))
    return rows


def lemma1_grid(k: int, ns: Iterable[int], k_steps: Iterable[int] = range(0, 11, 2),
                full_window: bool | None = None) -> list[tuple]:
    """Sweep cases: ``K = N / 2^j`` crossed with dyadic bands ``[2^(i-1), 2^i)``, ``i <= H``.

    ``full_window`` restricts to ``K = N`` (True) or ``K < N`` (False).
    """
    cases = []
    for n in ns:
        plan = choose_plan(k, n)
        for j in k_steps:
            K = n / 2**j
            if K < 1:
                continue
            if full_window is True and j != 0 or full_window is False and j == 0:
                continue
            for i in range(1, plan.H + 1):
                cases.append((n, K, 2 ** (i - 1), 2**i))
    return cases


def max_ratio_by_n(rows: Iterable[Lemma1Row]) -> dict[int, float]:
    out: dict[int, float] = {}
    for r in rows:
        out[r.n] = max(out.get(r.n, 0.0), r.ratio)
    return dict(sorted(out.items()))


# --------------------------------------------------------------------------
# Per-piece moments


@dataclass(frozen=True)
class PieceMoment:
    plan: DecompositionPlan
    piece: Piece
    p: float
    moment: MomentResult
    theoretical_bound: float

    @property
    def ratio(self) -> float:
        return self.moment.value / self.theoretical_bound


def piece_bound(plan: DecompositionPlan, piece: Piece, p: float) -> float:
    """Unit-constant bounds: ``2^i log N`` (p=1), ``2^i N^(p-1)`` (1<p<2),
    ``2^(-i(k-1)) N`` (p=2); the star piece gets ``N^(p/(k+1))``."""
    n, k = plan.n, plan.k
    if piece == STAR:
        return n ** (p / (k + 1))
    i = int(piece)
    if p == 1:
        return 2**i * math.log(n)
    if p == 2:
        return 2 ** (-i * (k - 1)) * n
    return 2**i * n ** (p - 1)


def piece_moments(plan: DecompositionPlan, piece: Piece, p: float,
                  rel_tol: float = DEFAULT_REL_TOL,
                  mobius: MobiusTable | None = None) -> PieceMoment:
    """Measured moment of T_i (or T*) next to its unit-constant bound."""
    if not (1 <= p <= 2):
        raise ValueError(f"piece moments are defined for 1 <= p <= 2, got {p}")
    if piece == STAR:
        seq = build_star_coefficients(plan, mobius)
    else:
        seq = build_band_coefficients(plan.k, plan.n, int(piece), mobius)
    (res,), failures = moments_with_refinement(seq, [p], rel_tol)
    if failures:
        raise QuadratureBudgetError(res)
    return PieceMoment(plan, piece, float(p), res, piece_bound(plan, piece, p))
