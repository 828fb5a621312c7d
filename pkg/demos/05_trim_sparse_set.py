"""
Exactly n vertices by trimming
==============================

Delete a few vertices that are far apart and have tree-like
neighbourhoods, then pair up their neighbours.  Locally the graph still
looks like a tree, so the second eigenvalue moves by at most about 1/r.
"""

from expanders import build_lps, delete_and_match, find_sparse_set, max_nontrivial_abs_eig, trim_to_exact
from expanders.errors import HypothesisError
from expanders.random_graphs import random_regular_graph, switch_out_cycle_clusters

# %%
# LPS graphs have many short cycles, so the strict hypothesis (every
# (2r+4)-ball has at most one cycle) fails; relaxed mode still finds
# separated vertices with tree balls.
H = build_lps(5, 29)
try:
    find_sparse_set(H, 1)
except HypothesisError as e:
    print("strict mode:", e)
S = find_sparse_set(H, 1, u_target=5, relaxed=True)
print("relaxed sparse set:", S.vertices)

# %%
res = delete_and_match(H, S)
print(f"after deleting 5 vertices: n = {res.graph.n}, d = {res.graph.d}, {len(res.matching)} new edges")

# %%
# The whole pipeline with a certified bound lambda(H) + 1/r.
lam_h = max_nontrivial_abs_eig(H).value
c = trim_to_exact(12175, 2.0, base=H, relaxed=True, lambda_base=lam_h)
print(f"lambda(H) = {lam_h:.4f}, bound = {c.bound_value:.4f}")

# %%
# Random cubic graphs are locally tree-like.  After switching away the few
# places where two short cycles sit close together, the strict mode works.
G = switch_out_cycle_clusters(random_regular_graph(20000, 3, seed=0), 4, seed=0)
S = find_sparse_set(G, 0)
print(f"strict sparse set on a cubic graph: |U| = {len(S)} >= {S.lower_bound:.1f}")
