"""
Quaternion Cayley graphs
========================

The same generators read as quaternions act on Q(m), the square-norm
quaternions mod m up to scalars.  Composite moduli give many more vertex
counts than PSL(2, q) alone.
"""

import math

from expanders import build_quaternion, max_nontrivial_abs_eig
from expanders.cayley_quaternion import choose_exponents, class_count, q_size

# %%
# Vertex counts: |Q(q)| = q(q^2 - 1)/2 for a prime, multiplicative over
# coprime factors, and a factor q^3 for each extra power.
print("Q(5)  =", class_count(5))
print("Q(65) =", class_count(65), "=", q_size(5, 13, 1, 1))
print("smallest (s, t) with Q(5^s 13^t) >= 70000:", choose_exponents(70000, 5, 13))

# %%
# H(29, 13): 30-regular on 1092 vertices.
G = build_quaternion(29, 13)
lam = max_nontrivial_abs_eig(G, method="dense").value
print(f"n = {G.n}, d = {G.d}, lambda = {lam:.6f} <= {2 * math.sqrt(29):.6f}")

# %%
# A prime-power modulus: H(29, 5^2) has 60 * 5^3 = 7500 vertices.
H = build_quaternion(29, ((5, 2),))
print(f"n = {H.n}, d = {H.d}")
