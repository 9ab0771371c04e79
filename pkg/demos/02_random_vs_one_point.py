"""When does a measure prefer n copies of one point to n random points?

For every measure here, the expected squared discrepancy of n
independent uniform points is exactly J/n for a measure-specific
constant J.  Replicating a single well-placed point n times leaves the
squared discrepancy constant.  Comparing the two gives a threshold
sample size: below it, the degenerate replicated set scores *better*
than random sampling — a warning sign for some measures.
"""

from l2disc import (
    anchor_point,
    expected_iid_squared,
    iid_threshold,
    pathology_table,
    single_point_value,
)

# The threshold n* = J / V, where V is the squared discrepancy of the
# best single point, replicated.  For n < n*, replication wins.
print(f"{'measure':<6} {'d':>2} {'n*E[D^2]':>12} {'single V':>12} {'threshold':>10}")
for d in (1, 2, 3):
    for tag in ("star", "ext", "per", "ctr", "cad", "mix", "sym", "asd"):
        j = expected_iid_squared(tag, 1, d)  # n * E[D^2] is n-free
        anchor = anchor_point(tag, d)
        v = single_point_value(tag, d, anchor)
        t = iid_threshold(tag, d)
        print(f"{tag:<6} {d:>2} {j:>12.6f} {v:>12.6f} {t:>10.3f}")
    print()

# The centered measure's threshold grows like 3^d: in d=6 a single
# replicated center beats hundreds of random points.  The symmetrized
# and reflection-averaged measures stay near 1, so random sampling is
# never badly beaten.
for tag in ("ctr", "sym", "asd"):
    print(f"{tag}: threshold at d=6 is {iid_threshold(tag, 6):8.1f}")
print()

# The full per-dimension report carries comparison flags against a set
# of published reference values, three columns per measure.
rows = pathology_table([2])
print(f"{'measure':<6} {'overall':>10}  notes")
for row in rows:
    print(f"{row.measure.value:<6} {row.table1_match:>10}  {row.notes or '-'}")
