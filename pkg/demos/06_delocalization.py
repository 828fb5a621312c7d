"""
Eigenvector mass grows away from an edge
========================================

For an eigenvalue mu >= 2 sqrt(d - 1) and a tree-like neighbourhood of an
edge, the squared eigenvector mass on successive BFS layers does not
decrease.  Two copies of an LPS graph joined by two edges have such an
eigenvalue, with a vector that is positive on one copy and negative on
the other.
"""

import math

import numpy as np

from expanders import build_lps, delocalization_profile, max_nontrivial_abs_eig
from expanders.random_graphs import joined_copies

H = build_lps(5, 29)

# %%
# The constant vector: layer sums grow exactly by a factor d - 1.
prof = delocalization_profile(H, (0, int(H.table[0][0])), 3, np.ones(H.n), float(H.d))
print("constant vector layer ratios:", [s / prof.sums[0] for s in prof.sums])

# %%
J = joined_copies(H)
e = max_nontrivial_abs_eig(J, method="iterative")
print(f"two-copy graph: mu = {e.eigenvalue:.5f} >= 2 sqrt(d-1) = {2 * math.sqrt(J.d - 1):.5f}")

# %%
for u in (0, H.n + 5):
    v = int(J.table[u][-1])
    p = delocalization_profile(J, (u, v), 3, e.vector, e.eigenvalue)
    print(f"edge ({u}, {v}): layer sums {[f'{s:.3e}' for s in p.sums]}, non-decreasing = {p.ok}")
