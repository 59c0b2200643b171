"""
Splittings and the M-labels
===========================

The subgroups defined by S and Z split as graphs of groups whose underlying
graphs should both match the explicit graph X.  We compare the three, then
turn an isomorphism into edge labels and feed them back into the linear
system built for the same pair of trees.
"""

from __future__ import annotations

from raagcomm.covers import build_cover_S, build_cover_Z
from raagcomm.splitting import build_X, labelled_iso, m_labels, path_4k2_tree, quotient_graph
from raagcomm.system import build_full_system, check_assignment
from raagcomm.trees import tkk_tree

k = 2
x = build_X(k)
h = quotient_graph(tkk_tree(k), build_cover_S(k))
kk = quotient_graph(path_4k2_tree(k), build_cover_Z(k)[0])
for name, sk in (("X", x), ("Psi(H)", h), ("Psi(K)", kk)):
    print(f"{name:7s} {len(sk.vertices)} vertices, ranks {sk.rank_multiset()}")

# %%
# Isomorphisms that respect the free ranks of the vertex groups.
phi = labelled_iso(h, kk)
print("X ~ Psi(H):", labelled_iso(x, h) is not None, "  Psi(H) ~ Psi(K):", phi is not None)

# %%
# M-labels: sums of products of vertex and edge labels over the skeleton edges
# of each product-edge type.  They must solve the generated system.
systems = build_full_system(tkk_tree(k), path_4k2_tree(k))
res = m_labels(h, kk, phi, systems[0].product)
s = systems[res.component - 1]
rep = check_assignment(s, res.assignment(s))
print(f"component {res.component}: system satisfied = {rep.ok}, ratios q = {sorted({int(q) for q in res.ratios})}")
