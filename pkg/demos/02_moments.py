"""Refined moments of S_2 at one length, with the convergence history and
the Parseval and Hölder self-checks."""

from kfree_moments.expsum import kfree_sequence
from kfree_moments.quad import holder_check, moments_with_refinement, parseval_check

N = 2**16
ps = [0.5, 1.0, 1.5, 2.0, 3.0]
results, failures = moments_with_refinement(kfree_sequence(2, N), ps, rel_tol=1e-9)

for r in results:
    steps = " -> ".join(f"{v:.10g}@{m // N}N" for m, v in r.history)
    print(f"I({r.p}) = {r.value:.12g}   ({steps})")
print("unconverged:", [ps[i] for i in failures] or "none")

rep = parseval_check(2, N)
print(f"\nI(2) from the grid {rep.quadrature:.3f}, squarefree count {rep.count}")

by_p = dict(zip(ps, results))
h = holder_check(by_p[1.0], by_p[2.0], by_p[1.5])
print(f"Hölder at p=1.5: {h.lhs:.6g} <= {h.rhs:.6g}  ({h.passed})")
