"""
The two finite covers
=====================

S is a cover of the bouquet on {a1, e1}; Z is a cover of the bouquet on
{C1..Ck, C1'..Ck'}.  Both have k(k+1) sheets.  We print their cycle
structure and the distances alpha/beta of the loop vertices.
"""

from __future__ import annotations

from raagcomm.covers import build_cover_S, build_cover_Z, label_subgraph_components, validate_cover

k = 3
s = build_cover_S(k)
print(f"S, k={k}: {s.vertex_count} vertices, valid={validate_cover(s).ok}")
for letter in s.alphabet:
    print(f"  {letter}: cycles {s.cycles(letter)}")

# %%
# Z is built around one long cycle; the middle letters skip the vertices where
# they carry a loop.
z, ab = build_cover_Z(k)
print(f"Z, k={k}: {z.vertex_count} vertices, valid={validate_cover(z).ok}")
for letter in z.alphabet:
    print(f"  {letter:4s} census {z.census(letter)}")
print("  alpha/beta:", ab.to_dict())

# %%
# Connectivity of the two-letter subgraphs is one of the defining properties.
for i in range(2, k + 1):
    pair = [f"C{i - 1}'", f"C{i}"]
    print(f"  components of {pair}: {len(label_subgraph_components(z, pair))}")
