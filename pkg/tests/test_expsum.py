import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kfree_moments.expsum import (
    CoeffSeq,
    compensated_sum,
    congruence_bound,
    default_grid_size,
    dist_to_int,
    eval_direct,
    eval_grid,
    eval_shifted_abs,
    fejer,
    fejer_direct,
    kernel_congruence,
    kernel_nk,
    kernel_nk_direct,
    kfree_sequence,
    nk_bound,
)

from . import oracles


def test_coeffseq_validation():
    with pytest.raises(ValueError):
        CoeffSeq(np.array([1, 1]), "bad")
    with pytest.raises(ValueError):
        CoeffSeq(np.zeros((2, 2)), "bad")
    seq = CoeffSeq.from_values([1, 2, 3])
    assert seq.length == 3
    assert list(seq.coeffs) == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        seq.coeffs[1] = 9


def test_kfree_sequence():
    seq = kfree_sequence(2, 10)
    assert seq.label == "mu_2" and seq.k == 2
    assert [int(c) for c in seq.coeffs[1:]] == [1, 1, 1, 0, 1, 1, 1, 0, 0, 1]


def test_eval_direct_half():
    # seven squarefree n <= 10: 1,2,3,5,6,7,10; signs (-1)^n sum to -1
    seq = kfree_sequence(2, 10)
    assert eval_direct(seq, Fraction(1, 2)) == pytest.approx(-1, abs=1e-14)
    assert eval_direct(seq, 0.5) == pytest.approx(-1, abs=1e-14)
    assert eval_direct(seq, 0) == 7


@given(st.integers(1, 300), st.floats(-3, 3, allow_nan=False))
@settings(max_examples=100, deadline=None)
def test_eval_direct_matches_oracle(n, alpha):
    seq = kfree_sequence(2, n)
    ref = oracles.expsum([int(c) for c in seq.coeffs[1:]], alpha)
    assert abs(eval_direct(seq, alpha) - ref) < 1e-10 * max(1, n)


@given(st.integers(1, 200), st.integers(-50, 50), st.integers(1, 97))
@settings(max_examples=100, deadline=None)
def test_eval_direct_periodic_and_conjugate(n, a, q):
    seq = kfree_sequence(3, n)
    alpha = Fraction(a, q)
    s = eval_direct(seq, alpha)
    assert eval_direct(seq, alpha + 1) == s  # exact phases make this bitwise
    assert abs(eval_direct(seq, -alpha) - s.conjugate()) < 1e-12 * n


def test_exact_phases_at_large_n():
    # alpha * n overflows float precision; exact reduction keeps the sum real
    seq = CoeffSeq.from_values(np.ones(10))
    huge = Fraction(10**18 + 1, 2)
    assert eval_direct(seq, huge) == pytest.approx(0, abs=1e-12)  # alternating +-1, ten terms


def test_compensated_sum_matches_fsum():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(10001) * 10.0 ** rng.integers(-8, 8, 10001)
    assert compensated_sum(x) == pytest.approx(math.fsum(x), rel=0, abs=1e-15 * np.abs(x).sum())
    assert compensated_sum(np.array([1e16, 1.0, -1e16])) == 1.0
    assert compensated_sum(np.array([])) == 0.0


def test_dist_to_int():
    assert dist_to_int(2.25) == 0.25
    assert dist_to_int(-0.9) == pytest.approx(0.1)
    assert dist_to_int(3.0) == 0.0


def test_default_grid_size():
    assert default_grid_size(1000) == 8192
    assert default_grid_size(1024, 8) == 8192
    assert default_grid_size(1, 1) == 2


def test_eval_grid_matches_direct():
    seq = kfree_sequence(2, 200)
    grid = eval_grid(seq, 512)
    assert grid.grid_size == 512 and grid.source_length == 200
    for j in (0, 1, 37, 255, 256, 511):
        assert abs(grid.values[j] - eval_direct(seq, Fraction(j, 512))) < 1e-10


def test_eval_grid_rejects_aliasing():
    with pytest.raises(ValueError):
        eval_grid(kfree_sequence(2, 100), 100)


@pytest.mark.parametrize("shift", [Fraction(0), Fraction(1, 2), Fraction(3, 8)])
def test_shifted_grid(shift):
    seq = kfree_sequence(2, 100)
    m = 256
    a = eval_shifted_abs(seq, m, shift)
    js = range(a.size)
    want = [abs(eval_direct(seq, (j + shift) / m)) for j in js]
    assert np.allclose(a, want, atol=1e-10)
    if shift == 0:
        assert a.size == m // 2 + 1


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=60))
@settings(max_examples=60, deadline=None)
def test_grid_parseval(vals):
    seq = CoeffSeq.from_values(vals)
    grid = eval_grid(seq, default_grid_size(len(vals), 2))
    assert np.mean(np.abs(grid.values) ** 2) == pytest.approx(sum(v * v for v in vals), abs=1e-9)


# kernels

@pytest.mark.parametrize("n", [1, 2, 7, 50])
def test_fejer_closed_vs_direct(n):
    for alpha in (0.0, 1e-9, 0.013, 0.25, 0.5, 0.731, 3.2, -1.1):
        assert fejer(n, alpha) == pytest.approx(fejer_direct(n, alpha), abs=1e-9)
    assert fejer(n, 0) == pytest.approx(n)
    assert fejer(n, 4) == pytest.approx(n)


def test_fejer_nonnegative_and_normalised():
    m = 4096
    vals = [fejer(20, j / m) for j in range(m)]
    assert min(vals) >= -1e-12
    assert np.mean(vals) == pytest.approx(1.0, abs=1e-12)


def test_kernel_nk_examples():
    assert kernel_nk(10, 5, 0) == pytest.approx(2 * 10 + 5)
    assert kernel_nk_direct(10, 5, 0) == pytest.approx(25)
    assert kernel_nk(10, 5, 0.5) == pytest.approx(kernel_nk_direct(10, 5, 0.5), abs=1e-12)


@given(st.integers(1, 200), st.integers(1, 200), st.floats(-2, 2, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_kernel_nk_closed_vs_direct(n, k, alpha):
    direct = kernel_nk_direct(n, k, alpha)
    assert kernel_nk(n, k, alpha) == pytest.approx(direct, abs=1e-9 * (2 * n + k))
    assert abs(direct) <= nk_bound(n, k, alpha) * (1 + 1e-9)


def test_kernel_nk_near_integer_branch():
    for eps in (0.0, 1e-12, 5e-7, -5e-7, 2e-6):
        assert kernel_nk(30, 7, 2 + eps) == pytest.approx(kernel_nk_direct(30, 7, eps), abs=1e-9)


def test_kernel_nk_non_integer_rounds_up():
    assert kernel_nk(10.3, 4.5, 0.17) == kernel_nk(11, 5, 0.17)
    assert abs(kernel_nk(10.3, 4.5, 0.17) - kernel_nk_direct(10.3, 4.5, 0.17)) < 10


def test_kernel_nk_rejects_small():
    with pytest.raises(ValueError):
        kernel_nk(0, 3, 0.1)


def test_kernel_congruence_examples():
    # d = 1 recovers the full kernel
    assert kernel_congruence(12, 4, 0, 1, 0.3).real == pytest.approx(kernel_nk(12, 4, 0.3), abs=1e-10)
    # classes mod d partition the full sum
    total = sum(kernel_congruence(12, 4, m, 5, 0.3) for m in range(5))
    assert total == pytest.approx(kernel_nk(12, 4, 0.3), abs=1e-10)
    with pytest.raises(ValueError):
        kernel_congruence(5, 2, 0, 8, 0.1)


@given(st.integers(1, 100), st.integers(1, 100), st.integers(0, 30), st.integers(1, 30),
       st.floats(0, 1, allow_nan=False))
@settings(max_examples=150, deadline=None)
def test_kernel_congruence_bound_constant(n, k, m, d, alpha):
    if d > n + k:
        return
    val = abs(kernel_congruence(n, k, m, d, alpha))
    assert val <= 10 * congruence_bound(n, k, d, alpha)
