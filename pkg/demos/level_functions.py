"""Rearrangements and level functions of a small step function.

Run with ``python demos/level_functions.py``.
"""

import numpy as np

from orlicz_lorentz import StepFunction, Weight, rearrange
from orlicz_lorentz.level import crosscheck_level, halperin_level, sinnamon_level

# f bumps up in the middle, w decays in two steps
f = StepFunction([0, 0.25, 0.5, 0.75, 1.0], [1.0, 3.0, 0.5, 2.0])
w = Weight([0, 0.5, 1.0], [2.0, 1.0])

fstar = rearrange(f)
print("f* breaks:", fstar.breaks)
print("f* values:", fstar.values)

dec = halperin_level(f, w)
print("\nlevel intervals (a, b] and their ratio F/W")
for iv in dec.intervals:
    print(f"  ({iv.a:.3f}, {iv.b:.3f}]  ratio {iv.ratio:.6f}")

# f⁰/w is non-increasing by construction
ratios = dec.ratio_profile
print("\nf0/w on the merged grid:", np.round(ratios, 6))
assert np.all(np.diff(ratios) <= 1e-12)

# the hull construction should agree with the block merge
hull = sinnamon_level(f, w)
print("hull-based f0:", hull.breaks, np.round(hull.values, 6))
report = crosscheck_level(f, w)
print("cross-check:", report)

# a characteristic function has a closed form: W(a)/a on [0, a) then w
chi = StepFunction([0, 0.25, 1.0], [1.0, 0.0])
lev = halperin_level(chi, w).level
print("\nlevel function of chi_[0,1/4):", lev.breaks, lev.values)
