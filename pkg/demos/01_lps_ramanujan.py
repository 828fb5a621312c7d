"""
LPS Ramanujan graphs
====================

Build the Cayley graph of PSL(2, q) with the p + 1 four-square generators,
check its basic shape and certify that its second eigenvalue (in absolute
value) stays below the Ramanujan bound 2 sqrt(p).
"""

import math

from expanders import build_lps, certify, girth, is_bipartite, max_nontrivial_abs_eig
from expanders.number_theory import four_square_reps, legendre

# %%
# The generators come from the p + 1 ways of writing p as a sum of four
# squares with odd positive first coordinate.
p, q = 13, 17
print(f"legendre({p}, {q}) = {legendre(p, q)}; |A({p})| = {len(four_square_reps(p))}")

# %%
# With p a residue mod q the graph lives on PSL(2, q): q(q^2 - 1)/2 vertices.
G = build_lps(p, q)
print(f"n = {G.n}, d = {G.d}, girth = {girth(G)}, bipartite = {is_bipartite(G)}")

# %%
# Dense eigensolver: exact up to floating point.
est = max_nontrivial_abs_eig(G, method="dense")
print(f"lambda = {est.value:.6f}  <=  2 sqrt(p) = {2 * math.sqrt(p):.6f}")

# %%
# A certificate bundles the measurement, the bound and the verdict.
cert = certify(G, "ramanujan")
print(cert.to_json())
