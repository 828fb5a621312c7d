"""
Exactly n vertices by augmentation
==================================

Take the largest LPS base H with at most n vertices, add r = n - |H| new
vertices and wire each to a disjoint block of p + 2 base vertices.  Base
vertices outside the blocks get a loop (or, with an even leftover, a
perfect matching) so the result is (p + 2)-regular.
"""

from expanders import augment_to_exact, max_nontrivial_abs_eig

# %%
c = augment_to_exact(2500, 13)
G = c.graph
print(f"base {c.details['base_n']} vertices, r_new = {c.details['r_new']}, n = {G.n}, d = {G.d}")
print(f"loops: {int(G.loops.sum())}")

# %%
lam = max_nontrivial_abs_eig(G, method="dense").value
print(f"lambda = {lam:.4f} <= bound {c.bound_value:.4f}")

# %%
# Matching mode avoids loops when the leftover count is even.
m = augment_to_exact(2500, 13, mode="matching")
print(f"matching mode: loops = {int(m.graph.loops.sum())}, "
      f"lambda = {max_nontrivial_abs_eig(m.graph, method='dense').value:.4f}")
