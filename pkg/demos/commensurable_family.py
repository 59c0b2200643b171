"""
A feasible family: P_{4k+2} and T_{k,k+1}
=========================================

For these pairs the system has positive integer solutions.  The solver
returns one such witness, and we read the vertex labels R_1, R_2 off it.
"""

from __future__ import annotations

from collections import Counter

from raagcomm.solver import decide
from raagcomm.system import check_assignment, r_labels
from raagcomm.trees import path_tree, tkk_tree

for k in (1, 2, 3):
    g1, g2 = path_tree(4 * k + 2), tkk_tree(k)
    v = decide(g1, g2)
    c = v.witness_component
    s = v.systems[c.component - 1]
    # %%
    # The witness is verified independently of the solver.
    assert check_assignment(s, c.witness).ok
    values = Counter(x for x in c.witness if x)
    print(f"k={k}: feasible on component {c.component}, "
          f"{sum(values.values())} positive labels, values {dict(sorted(values.items()))}")
    # %%
    # Vertex labels on the support (vertices with R = 0 are outside it).
    labels = {w: r for w, r in r_labels(s, c.witness).items() if any(r)}
    print(f"     R labels on {len(labels)} vertices: {sorted(set(labels.values()))}")

# %%
# A feasible verdict is only a necessary condition.  The report says so.
print(decide(path_tree(10), tkk_tree(2)).meaning)
