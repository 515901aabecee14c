"""Evaluate S_2 at the rationals a/r^2 and compare with the main term C(r) N / r^2."""

from fractions import Fraction

from kfree_moments.arith import compute_cr
from kfree_moments.scaling import major_arc_scan

N = 10**5
b = Fraction(1, 200 * N)
points, summary = major_arc_scan(2, N, 5, betas=(0, b, -b), strict=False)

for r in (1, 2, 3, 5):
    print(f"C({r}) = {compute_cr(r, 2):+.6f}")

print("\n  a/r^2      Re S         C(r)N/r^2")
for p in points:
    if p.beta == 0 and p.r <= 3:
        print(f"  {p.a}/{p.r**2:<4}  {p.measured.real:11.2f}  {p.predicted_main:11.2f}")

print(f"\n{summary.n_points} points, fraction above N/(10 r^2): {summary.pass_fraction:.3f}")
print(f"largest |S - main| / (r^2 sqrt N): {summary.max_error_constant:.4f}")
