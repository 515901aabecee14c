"""Sieve the k-free numbers, split mu_k into dyadic divisor bands, and check
that the bands add back up to mu_k."""

from kfree_moments.arith import BandSpec, band_value, count_kfree, sieve_kfree, sieve_mobius
from kfree_moments.decomp import choose_plan, verify_decomposition

N = 10**6

table = sieve_kfree(2, N)
print(f"squarefree numbers up to {N}: {count_kfree(2, N, table=table)}")
print(f"cubefree numbers up to {N}:   {count_kfree(3, N)}")

mu = sieve_mobius(1000)
print("\nb_{2,4}(n) = sum of mu(d) over d in [2,4) with d^2 | n:")
for n in (4, 9, 36, 72, 35):
    print(f"  n={n:3d}  b={band_value(n, BandSpec(2, 2, 4), mu):+d}")

for k in (2, 3):
    plan = choose_plan(k, N)
    rep = verify_decomposition(plan)
    print(f"\nk={k}: h={plan.h}, H={plan.H}, star band [{plan.star_band[0]}, {plan.star_band[1]})")
    print(f"  sum of all bands == mu_k:          {rep.full_ok}")
    print(f"  bands up to h plus star == mu_k:   {rep.split_ok}")
