"""Closed forms of the smoothing kernels against their defining sums."""

from kfree_moments.expsum import fejer, fejer_direct, kernel_congruence, kernel_nk, kernel_nk_direct
from kfree_moments.verify import congruence_constant, kernel_agreement

for a in (0.0, 3e-7, 0.01, 0.37):
    print(f"alpha={a:<6g} fejer {fejer(40, a):12.6f} / {fejer_direct(40, a):12.6f}"
          f"   K_(40,9) {kernel_nk(40, 9, a):12.6f} / {kernel_nk_direct(40, 9, a):12.6f}")

parts = [kernel_congruence(40, 9, m, 3, 0.37) for m in range(3)]
print(f"\nresidue classes mod 3 sum to {sum(parts).real:.9f}; full kernel {kernel_nk(40, 9, 0.37):.9f}")

rep = kernel_agreement(samples=1000)
print(f"\nmax error over 1000 random points: fejer {rep['fejer_max_abs_err']:.1e}, "
      f"trapezoid {rep['kernel_nk_max_abs_err']:.1e}")
print(f"empirical constant for the congruence bound: {congruence_constant():.3f}")
