"""Moment integrals ``I(p) = int_0^1 |S(alpha)|^p d alpha`` from uniform grids.

For a 1-periodic integrand the trapezoid rule is the plain grid mean.  At
``p = 2`` it is exact once ``M >= N + 1`` (discrete Parseval), which is the
built-in validator used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import count_kfree
from .expsum import (
    CoeffSeq,
    SpectrumGrid,
    default_grid_size,
    eval_grid,
    eval_shifted_abs,
    kfree_sequence,
)

DEFAULT_REL_TOL = 1e-6
# Largest grid (points) a refinement may reach, as a multiple of N.
DEFAULT_MAX_OVERSAMPLE = 16384


@dataclass(frozen=True)
class MomentResult:
    k: int | None
    p: float
    n: int
    m: int
    value: float
    err_estimate: float = 0.0
    label: str = ""
    history: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.value < 0 or self.err_estimate < 0:
            raise ValueError("moment value and error estimate must be nonnegative")

    @property
    def rel_err(self) -> float:
        return self.err_estimate / self.value if self.value > 0 else 0.0


class QuadratureBudgetError(RuntimeError):
    """Refinement hit the grid budget before converging.

    ``best`` is the last :class:`MomentResult` reached.
    """

    def __init__(self, best: MomentResult, message: str = ""):
        self.best = best
        super().__init__(
            message
            or f"p={best.p}, N={best.n}: no convergence by M={best.m} "
            f"(value {best.value!r}, err {best.err_estimate!r})"
        )


def _power_sum(a: np.ndarray, p: float) -> float:
    if p == 0:
        return float(a.size)
    if p == 1:
        return float(np.sum(a))
    if p == 2:
        return float(np.dot(a, a))
    return float(np.sum(np.power(a, p)))


def _half_power_sum(a: np.ndarray, p: float) -> float:
    """Full-circle power sum from an rfft half spectrum of even length M."""
    inner = _power_sum(a[1:-1], p)
    return _power_sum(a[:1], p) + _power_sum(a[-1:], p) + 2.0 * inner


def moment_from_grid(grid: SpectrumGrid, p: float) -> MomentResult:
    """Grid mean of ``|values|**p`` (error estimate left at 0)."""
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    a = np.abs(grid.values)
    value = _power_sum(a, p) / grid.grid_size
    return MomentResult(grid.k, float(p), grid.source_length, grid.grid_size,
                        value, 0.0, grid.source_label)


class _ShiftedGridSums:
    """Power sums of ``|S|`` over the grid of ``L * M0`` points, built shift by shift.

    Uses ``|S(-a)| = |S(a)|`` (real coefficients): the shifts ``s/L`` and
    ``(L-s)/L`` carry the same multiset of values, so only ``s <= L/2`` is
    evaluated.
    """

    def __init__(self, seq: CoeffSeq, ps: Sequence[float]):
        self.seq = seq
        self.ps = list(ps)
        n = seq.length
        self.m0 = max(1 << n.bit_length(), 2)  # power of two > N
        self.level = 1
        a = eval_shifted_abs(seq, self.m0, Fraction(0))
        self.sums = np.array([_half_power_sum(a, p) for p in self.ps])

    @property
    def grid_size(self) -> int:
        return self.level * self.m0

    def means(self) -> np.ndarray:
        return self.sums / self.grid_size

    def refine(self, active: Sequence[int] | None = None) -> None:
        """Double the grid; only the power sums for ``active`` indices are updated."""
        idx = range(len(self.ps)) if active is None else list(active)
        lvl2 = 2 * self.level
        extra = np.zeros(len(self.ps))
        for s in range(1, self.level + 1, 2):
            a = eval_shifted_abs(self.seq, self.m0, Fraction(s, lvl2))
            w = 1.0 if s == lvl2 - s else 2.0
            for i in idx:
                extra[i] += w * _power_sum(a, self.ps[i])
        self.sums = self.sums + extra
        self.level = lvl2


def moments_with_refinement(seq: CoeffSeq, ps: Sequence[float],
                            rel_tol: float = DEFAULT_REL_TOL,
                            max_grid: int | None = None,
                            start_oversample: int | None = None):
    """Refined moments for several exponents sharing one set of spectra.

    For each ``p`` the grid doubles from ``8N`` (``16N`` for ``p < 1``) until
    two successive values differ by less than ``rel_tol`` relatively; ``p < 1``
    needs two such agreements in a row.  Returns ``(results, failures)``
    where ``failures`` lists the indices that ran out of grid budget; their
    entries in ``results`` are the best values reached.
    """
    if rel_tol < 1e-10:
        raise ValueError("rel_tol must be >= 1e-10")
    ps = [float(p) for p in ps]
    if any(p < 0 for p in ps):
        raise ValueError("p must be >= 0")
    n = seq.length
    if max_grid is None:
        max_grid = default_grid_size(n, DEFAULT_MAX_OVERSAMPLE)
    sums = _ShiftedGridSums(seq, ps)

    start = []
    for p in ps:
        over = start_oversample or (16 if p < 1 else 8)
        start.append(default_grid_size(n, over))
    need_agree = [2 if p < 1 else 1 for p in ps]
    agree = [0] * len(ps)
    prev: list[float | None] = [None] * len(ps)
    hist: list[list] = [[] for _ in ps]
    done: dict[int, MomentResult] = {}

    while True:
        vals = sums.means()
        m = sums.grid_size
        for i, p in enumerate(ps):
            if i in done or m < start[i]:
                continue
            v = float(vals[i])
            hist[i].append((m, v))
            if prev[i] is not None:
                diff = abs(v - prev[i])
                if p == 0 or diff <= rel_tol * abs(v):
                    agree[i] += 1
                else:
                    agree[i] = 0
                if agree[i] >= need_agree[i]:
                    done[i] = MomentResult(seq.k, p, n, m, v, diff, seq.label, tuple(hist[i]))
            prev[i] = v
        active = [i for i in range(len(ps)) if i not in done]
        if not active or 2 * m > max_grid:
            break
        sums.refine(active)

    results, failures = [], []
    for i, p in enumerate(ps):
        if i in done:
            results.append(done[i])
            continue
        failures.append(i)
        m, v = hist[i][-1] if hist[i] else (sums.grid_size, float(sums.means()[i]))
        err = abs(v - hist[i][-2][1]) if len(hist[i]) > 1 else math.inf
        results.append(MomentResult(seq.k, p, n, m, v, err, seq.label, tuple(hist[i])))
    return results, failures


def moment_with_refinement(k: int, n: int, p: float,
                           rel_tol: float = DEFAULT_REL_TOL,
                           seq: CoeffSeq | None = None,
                           max_grid: int | None = None) -> MomentResult:
    """Refined I_k(p) for the mu_k sequence of length N.

    Raises :class:`QuadratureBudgetError` (carrying the best value) if the grid
    budget is exhausted first.
    """
    if seq is None:
        seq = kfree_sequence(k, n)
    (res,), failures = moments_with_refinement(seq, [p], rel_tol, max_grid)
    if failures:
        raise QuadratureBudgetError(res)
    return res


@dataclass(frozen=True)
class HolderReport:
    q1: float
    p: float
    q2: float
    theta: float
    lhs: float
    rhs: float
    slack: float
    passed: bool


def holder_check(rq1: MomentResult, rq2: MomentResult, rp: MomentResult,
                 tol: float = 1e-6) -> HolderReport:
    """Check ``I(p) <= I(q1)**(1-theta) * I(q2)**theta`` for ``p = (1-theta) q1 + theta q2``.

    The inequality is exact for true integrals; the multiplicative slack is
    ``1 + tol`` plus the relative error estimates of the three moments.
    """
    srcs = {(r.k, r.n, r.label) for r in (rq1, rq2, rp)}
    if len(srcs) != 1:
        raise ValueError(f"moments come from different sources: {sorted(map(str, srcs))}")
    q1, q2, p = rq1.p, rq2.p, rp.p
    if not (q1 <= p <= q2):
        raise ValueError(f"need q1 <= p <= q2, got {q1}, {p}, {q2}")
    theta = 0.0 if q2 == q1 else (p - q1) / (q2 - q1)
    rhs = rq1.value ** (1 - theta) * rq2.value**theta
    slack = 1 + tol + rq1.rel_err + rq2.rel_err + rp.rel_err
    return HolderReport(q1, p, q2, theta, rp.value, rhs, slack, rp.value <= rhs * slack)


@dataclass(frozen=True)
class ParsevalReport:
    k: int
    n: int
    quadrature: float
    count: int
    rel_dev: float
    passed: bool


def parseval_check(k: int, n: int, rel_tol: float = 1e-9,
                   seq: CoeffSeq | None = None) -> ParsevalReport:
    """Compare the p = 2 grid mean with Q_k(N)."""
    if seq is None:
        seq = kfree_sequence(k, n)
    # M >= N + 1 already makes p = 2 exact; stay modest on memory
    grid = eval_grid(seq, default_grid_size(n, 2))
    value = moment_from_grid(grid, 2).value
    q = count_kfree(k, n)
    dev = abs(value - q) / q if q else abs(value)
    return ParsevalReport(k, n, value, q, dev, dev < rel_tol)

