"""Randomised and swept checks shared by the CLI and the test-suite."""

from __future__ import annotations

import numpy as np

from .decomp import lemma1_grid, lemma1_sweep, max_ratio_by_n
from .expsum import (
    KERNEL_EPS,
    congruence_bound,
    fejer,
    fejer_direct,
    kernel_congruence,
    kernel_nk,
    kernel_nk_direct,
)


def sample_alphas(rng: np.random.Generator, size: int) -> np.ndarray:
    """Mix of generic points, points within KERNEL_EPS of an integer, and
    points straddling the closed-form/direct crossover."""
    kind = rng.integers(0, 3, size)
    base = rng.integers(-2, 3, size).astype(np.float64)
    sign = rng.choice([-1.0, 1.0], size)
    generic = rng.uniform(-2.0, 2.0, size)
    near = base + sign * rng.uniform(0, KERNEL_EPS, size)
    cross = base + sign * KERNEL_EPS * rng.uniform(0.5, 2.0, size)
    return np.choose(kind, [generic, near, cross])


def kernel_agreement(samples: int = 1000, seed: int = 0, tol: float = 1e-9,
                     nmax: int = 500) -> dict:
    """Max |closed form - defining sum| for fejer and kernel_nk at random points."""
    rng = np.random.default_rng(seed)
    alphas = sample_alphas(rng, samples)
    ns = rng.integers(1, nmax + 1, samples)
    ks = rng.integers(1, nmax + 1, samples)
    fe = nk = 0.0
    near = 0
    for a, n, k in zip(alphas, ns, ks):
        a, n, k = float(a), int(n), int(k)
        near += abs(a - round(a)) < KERNEL_EPS
        fe = max(fe, abs(fejer(n, a) - fejer_direct(n, a)))
        nk = max(nk, abs(kernel_nk(n, k, a) - kernel_nk_direct(n, k, a)))
    return {"samples": samples, "seed": seed, "tol": tol, "near_integer_samples": near,
            "fejer_max_abs_err": fe, "kernel_nk_max_abs_err": nk,
            "passed": fe <= tol and nk <= tol}


def congruence_constant(samples: int = 500, seed: int = 0, nmax: int = 400) -> float:
    """Smallest C with ``|E_{N,K,M,d}(a)| <= C * congruence_bound`` over a random sweep."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(1, nmax + 1))
        k = int(rng.integers(1, nmax + 1))
        d = int(rng.integers(1, n + k + 1))
        m = int(rng.integers(1, 10 * d + 1))
        a = float(rng.uniform(0, 1))
        e = abs(kernel_congruence(n, k, m, d, a))
        worst = max(worst, e / congruence_bound(n, k, d, a))
    return worst


def lemma1_boundedness(k: int, ns, factor: float = 2.0) -> dict:
    """Max energy/bound ratio per N, for K < N (two-term bound) and K = N (one term).

    Passes when, for both families, the ratio at the largest N is at most
    ``factor`` times the ratio at the smallest N.
    """
    ns = list(ns)
    out = {"k": k, "N": ns, "factor": factor}
    ok = True
    for name, full in (("partial_window", False), ("full_window", True)):
        rows = lemma1_sweep(k, lemma1_grid(k, ns, full_window=full))
        mx = max_ratio_by_n(rows)
        first, last = mx[min(mx)], mx[max(mx)]
        good = last <= factor * first
        ok &= good
        out[name] = {"max_ratio_by_N": {str(n): r for n, r in mx.items()},
                     "cases": len(rows), "passed": good}
    out["passed"] = ok
    return out
