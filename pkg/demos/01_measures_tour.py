"""A tour of the L2 discrepancy measures on one small point set.

Every measure shares the same evaluation recipe: a constant term, a
per-point product over one-coordinate factors, and a pairwise product
over two-coordinate factors.  That gives each one the same O(d n^2)
cost, so comparing all of them on the same set is cheap.
"""

import numpy as np

from l2disc import kernel_spec, sobol, squared_discrepancy

# A 16-point digital net in the unit square.
points = sobol(16, 2)
print("point set: 16-point Sobol set, d=2")
print(points.coords[:4], "... (first 4 of 16 rows)")
print()

# The eight unweighted measures.
print(f"{'measure':<8} {'squared':>12} {'root':>10}")
for tag in ("star", "ext", "per", "ctr", "cad", "mix", "sym", "asd"):
    result = squared_discrepancy(kernel_spec(tag, 2), points)
    print(f"{tag:<8} {result.value:>12.8f} {result.root:>10.6f}")
print()

# Weighted variants take one importance weight per coordinate.  With
# gamma halved on the second axis, irregularity along that axis costs
# half as much.
for gamma in ([1.0, 1.0], [1.0, 0.5]):
    spec = kernel_spec("ctr_weighted", 2, gamma=gamma)
    result = squared_discrepancy(spec, points)
    print(f"ctr_weighted gamma={gamma}: root = {result.root:.6f}")
print()

# The wraparound measure ignores translations on the torus: shifting
# every point by the same offset (mod 1) leaves it unchanged.
shifted = np.mod(points.coords + [0.37, 0.81], 1.0)
from l2disc import PointSet

before = squared_discrepancy(kernel_spec("per", 2), points).value
after = squared_discrepancy(kernel_spec("per", 2), PointSet(shifted)).value
print(f"wraparound, original set:  {before:.12f}")
print(f"wraparound, shifted set:   {after:.12f}")
print(f"difference: {abs(before - after):.2e} (translation-invariant)")
