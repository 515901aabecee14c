"""Multi-N experiments: moment sweeps, growth-exponent fits, the critical
point, and the major-arc scanner."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import stats

from ._config import get_threads
from .arith import (
    MobiusTable,
    compute_cr,
    is_squarefree,
    sieve_kfree,
    sieve_mobius,
    totient_table,
)
from .expsum import eval_direct, kfree_sequence
from .quad import DEFAULT_REL_TOL, MomentResult, moments_with_refinement

DEFAULT_NS = tuple(2**e for e in range(14, 23))


def critical_point(k: int) -> float:
    return 1 + 1 / k


def theoretical_e(k: int, p: float) -> float:
    """Growth exponent of I_k(p): ``p/(k+1)`` below ``1 + 1/k``, ``p - 1`` above."""
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    crit = critical_point(k)
    if math.isclose(p, crit, rel_tol=0, abs_tol=1e-12):
        return 1 / k
    return p - 1 if p > crit else p / (k + 1)


# --------------------------------------------------------------------------
# Sweeps


@dataclass(frozen=True)
class SweepRow:
    n: int
    p: float
    result: MomentResult
    converged: bool = True
    error: str | None = None


def _sweep_one(k: int, n: int, ps: Sequence[float], rel_tol: float) -> list[SweepRow]:
    seq = kfree_sequence(k, n, sieve_kfree(k, n))
    results, failures = moments_with_refinement(seq, ps, rel_tol)
    rows = []
    for i, (p, res) in enumerate(zip(ps, results)):
        bad = i in failures
        msg = f"no convergence by M={res.m}" if bad else None
        rows.append(SweepRow(n, float(p), res, not bad, msg))
    return rows


def moment_sweep_multi(k: int, ps: Sequence[float], ns: Sequence[int] = DEFAULT_NS,
                       rel_tol: float = DEFAULT_REL_TOL,
                       threads: int | None = None) -> dict[float, list[SweepRow]]:
    """Refined moments for every ``(p, N)``; the spectra of each N are shared by all p.

    Rows whose refinement ran out of grid budget are kept with
    ``converged=False`` rather than aborting the sweep.
    """
    ns = list(ns)
    if len(ns) < 3 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("need at least 3 increasing N values")
    workers = threads or get_threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_n = list(pool.map(lambda n: _sweep_one(k, n, ps, rel_tol), ns))
    else:
        per_n = [_sweep_one(k, n, ps, rel_tol) for n in ns]
    out: dict[float, list[SweepRow]] = {float(p): [] for p in ps}
    for rows in per_n:
        for row in rows:
            out[row.p].append(row)
    return out


def moment_sweep(k: int, p: float, ns: Sequence[int] = DEFAULT_NS,
                 rel_tol: float = DEFAULT_REL_TOL, threads: int | None = None) -> list[SweepRow]:
    return moment_sweep_multi(k, [p], ns, rel_tol, threads)[float(p)]


# --------------------------------------------------------------------------
# Fits


@dataclass(frozen=True)
class ExponentFit:
    k: int | None
    p: float
    points: tuple  # ((log N, log I), ...)
    slope: float
    intercept: float
    std_error: float
    theoretical: float
    residuals: tuple = ()

    @property
    def deviation(self) -> float:
        return self.slope - self.theoretical


def fit_power_law(ns, values) -> tuple[float, float, float, np.ndarray]:
    """OLS of log(value) on log(N): ``(slope, intercept, stderr, residuals)``."""
    x = np.log(np.asarray(ns, dtype=np.float64))
    v = np.asarray(values, dtype=np.float64)
    if x.size < 3:
        raise ValueError("need at least 3 points")
    if np.ptp(x) == 0:
        raise ValueError("degenerate fit: all N are equal")
    if not np.all((v > 0) & np.isfinite(v)):
        raise ValueError("moments must be positive to take logarithms")
    y = np.log(v)
    lr = stats.linregress(x, y)
    resid = y - (lr.intercept + lr.slope * x)
    return float(lr.slope), float(lr.intercept), float(lr.stderr), resid


def fit_exponent(table: Sequence) -> ExponentFit:
    """Fit I ~ N^slope over sweep rows (``SweepRow`` or ``MomentResult``)."""
    res = [r.result if isinstance(r, SweepRow) else r for r in table]
    if len(res) < 3:
        raise ValueError("need at least 3 rows")
    if len({(r.k, r.p) for r in res}) != 1:
        raise ValueError("rows mix different (k, p)")
    k, p = res[0].k, res[0].p
    ns = [r.n for r in res]
    vals = [r.value for r in res]
    slope, icpt, se, resid = fit_power_law(ns, vals)
    pts = tuple(zip(np.log(ns).tolist(), np.log(vals).tolist()))
    theo = theoretical_e(k, p) if k is not None else float("nan")
    return ExponentFit(k, p, pts, slope, icpt, se, theo, tuple(resid.tolist()))


@dataclass
class ECurve:
    k: int
    ps: list[float]
    fits: list[ExponentFit] = field(default_factory=list)

    @property
    def slopes(self) -> list[float]:
        return [f.slope for f in self.fits]

    @property
    def theoretical(self) -> list[float]:
        return [theoretical_e(self.k, p) for p in self.ps]

    def rows(self) -> list[dict]:
        return [
            {"k": self.k, "p": f.p, "slope": f.slope, "std_error": f.std_error,
             "theoretical": f.theoretical, "deviation": f.deviation}
            for f in self.fits
        ]


def slope_tolerance(k: int, p: float) -> float:
    """Allowed |slope - E(p)|: 0.05 away from the knee, 0.10 within 0.3 of it."""
    return 0.05 if abs(p - critical_point(k)) >= 0.3 else 0.10


def e_curve(k: int, ps: Sequence[float], ns: Sequence[int] = DEFAULT_NS,
            rel_tol: float = DEFAULT_REL_TOL, sweep: dict | None = None) -> ECurve:
    """Fitted growth exponent per p, with the theoretical curve alongside."""
    if sweep is None:
        sweep = moment_sweep_multi(k, ps, ns, rel_tol)
    curve = ECurve(k, [float(p) for p in ps])
    for p in curve.ps:
        curve.fits.append(fit_exponent(sweep[p]))
    return curve


@dataclass(frozen=True)
class CriticalRow:
    n: int
    value: float
    lower_ratio: float  # I / (N^(1/k) log N)
    upper_ratio: float  # I / (N^(1/k) log^2 N)


def critical_ratio(k: int, ns: Sequence[int] = DEFAULT_NS, rel_tol: float = DEFAULT_REL_TOL,
                   sweep: dict | None = None) -> list[CriticalRow]:
    """I_k(1 + 1/k) normalised by both the lower and the upper bound shapes."""
    p = critical_point(k)
    if sweep is None or p not in sweep:
        sweep = moment_sweep_multi(k, [p], ns, rel_tol)
    out = []
    for row in sweep[p]:
        n, v = row.n, row.result.value
        base = n ** (1 / k)
        out.append(CriticalRow(n, v, v / (base * math.log(n)), v / (base * math.log(n) ** 2)))
    return out


# --------------------------------------------------------------------------
# Major arcs


@dataclass(frozen=True)
class MajorArcPoint:
    k: int
    n: int
    a: int
    r: int
    beta: Fraction
    measured: complex
    predicted_main: float  # C(r) N / r^k
    floor_bound: float  # N / (10 r^k)

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.a, self.r**self.k) + self.beta

    @property
    def above_floor(self) -> bool:
        return abs(self.measured) >= self.floor_bound


@dataclass(frozen=True)
class MajorArcSummary:
    n_points: int
    pass_fraction: float
    max_error_constant: float  # max |S - C(r) N/r^k| / (r^k N^(1/k)) at beta = 0
    min_separation: float
    separation_ok: bool


def major_arc_fractions(k: int, r_max: int) -> list[tuple[int, int]]:
    """``(a, r)`` with r squarefree, ``r <= r_max``, ``1 <= a <= r^k``, gcd(a, r^k) = 1."""
    out = []
    for r in range(1, r_max + 1):
        if not is_squarefree(r):
            continue
        q = r**k
        out.extend((a, r) for a in range(1, q + 1) if math.gcd(a, q) == 1)
    return out


def min_circle_gap(fracs: Sequence[Fraction]) -> float:
    """Smallest distance on R/Z between distinct points."""
    pts = sorted({f - math.floor(f) for f in fracs})
    if len(pts) < 2:
        return 1.0
    gaps = [b - a for a, b in zip(pts, pts[1:])]
    gaps.append(1 + pts[0] - pts[-1])
    return float(min(gaps))


def major_arc_scan(k: int, n: int, r_max: int, betas: Sequence = (0,),
                   tol: float = 1e-6, strict: bool = True,
                   mobius: MobiusTable | None = None):
    """Evaluate S_k at ``a/r^k + beta`` for all admissible ``(a, r)``.

    ``strict`` enforces ``r_max <= N^(1/(5k))``, the range where the floor
    ``|S| >= N/(10 r^k)`` is guaranteed for large N.  Returns
    ``(points, summary)``.
    """
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    if strict and r_max ** (5 * k) > n:
        raise ValueError(f"r_max={r_max} exceeds N^(1/(5k)) for N={n}")
    betas = [Fraction(b) for b in betas]
    seq = kfree_sequence(k, n)
    if mobius is None:
        mobius = sieve_mobius(math.ceil(tol ** (-1 / (k - 1))))
    fracs = major_arc_fractions(k, r_max)
    cr = {r: compute_cr(r, k, tol, mobius) for r in {r for _, r in fracs}}
    points = []
    for a, r in fracs:
        q = r**k
        for b in betas:
            s = eval_direct(seq, Fraction(a, q) + b)
            points.append(MajorArcPoint(k, n, a, r, b, s, cr[r] * n / q, n / (10 * q)))
    nk = n ** (1 / k)
    errs = [abs(pt.measured - pt.predicted_main) / (pt.r**k * nk)
            for pt in points if pt.beta == 0]
    gap = min_circle_gap([Fraction(a, r**k) for a, r in fracs])
    summary = MajorArcSummary(
        len(points),
        sum(pt.above_floor for pt in points) / len(points),
        max(errs) if errs else float("nan"),
        gap,
        gap > 1 / (50 * n),
    )
    return points, summary


# --------------------------------------------------------------------------
# Totient sums


@dataclass(frozen=True)
class TotientRow:
    R: int
    total: float
    ratio: float
    passed: bool


def totient_sum_check(rs: Sequence[int], threshold: float = 0.2) -> list[TotientRow]:
    """``sum_{r<=R} mu_2(r) phi(r)/r`` against ``threshold * R``.

    The check is only asserted for ``R >= 1000``; smaller R always pass.
    """
    rmax = max(rs)
    phi = totient_table(rmax).astype(np.float64)
    sqf = sieve_kfree(2, rmax).bits
    r = np.arange(rmax + 1, dtype=np.float64)
    r[0] = 1.0
    terms = np.where(sqf, phi / r, 0.0)
    csum = np.cumsum(terms)
    out = []
    for R in rs:
        total = float(csum[R])
        ratio = total / R
        out.append(TotientRow(R, total, ratio, R < 1000 or ratio >= threshold))
    return out
