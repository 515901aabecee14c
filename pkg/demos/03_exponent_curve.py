"""Fit the growth exponent of I_2(p) against N and draw it over the
piecewise-linear prediction with its knee at p = 3/2.

Writes exponent_curve.svg in the current directory.
"""

from pathlib import Path

from kfree_moments.scaling import e_curve, moment_sweep_multi, slope_tolerance
from kfree_moments.svgplot import e_curve_series, render_svg

ns = [2**e for e in range(12, 19)]  # smaller than the full 2^14..2^22 sweep
ps = [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0]

sweep = moment_sweep_multi(2, ps, ns)
curve = e_curve(2, ps, ns, sweep=sweep)
print(" p     slope    E(p)    within band")
for f in curve.fits:
    ok = abs(f.deviation) <= slope_tolerance(2, f.p)
    print(f"{f.p:4.2f}  {f.slope:7.4f}  {f.theoretical:6.4f}  {ok}")

svg = render_svg(e_curve_series(2, curve.ps, curve.slopes), title="growth exponent, k=2",
                 xlabel="p", ylabel="E(p)")
Path("exponent_curve.svg").write_text(svg)
print("wrote exponent_curve.svg")
