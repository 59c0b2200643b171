"""
Deciding pairs of paths
=======================

Each pair of trees gives a homogeneous integer system with strict sums and
implications.  An infeasible system rules out commensurability of the two
right-angled Artin groups.  Here we run the decision on short paths.
"""

from __future__ import annotations

from raagcomm.solver import decide
from raagcomm.trees import path_tree

# %%
# P_3 against longer paths: the system dies in the first round, because some
# strict sum has no variable left in the maximal support.
for m in range(5, 9):
    v = decide(path_tree(3), path_tree(m))
    c = v.components[0]
    print(f"P3 x P{m}: {v.meaning:28s} first event: {c.trace[0]['event']}")

# %%
# A small sweep.  Off the diagonal every pair is infeasible; on the diagonal
# the all-ones labelling of the diagonal edges is always a solution.
lo, hi = 5, 8
print("     " + "".join(f"P{m:<4d}" for m in range(lo, hi + 1)))
for n in range(lo, hi + 1):
    cells = []
    for m in range(lo, hi + 1):
        cells.append(" yes " if decide(path_tree(n), path_tree(m)).feasible else "  .  ")
    print(f"P{n:<3d} " + "".join(cells))
