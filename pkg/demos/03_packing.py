"""
Any degree by packing generator sets
====================================

Split d greedily into blocks p_i + 1 (p_i prime, 1 mod 4) plus a leftover
y <= 4, use all the LPS generator sets on one group and fill the leftover
with fresh pairs {g, g^-1} and an involution.  The union rule bounds the
second eigenvalue by the sum of the blocks' values.
"""

from expanders import greedy_decompose, max_nontrivial_abs_eig, pack_cayley, pack_generators
from expanders.cayley_lps import cayley_graph
from expanders.spectral import union_bound_check

# %%
for d in (7, 12, 20, 24):
    dec = greedy_decompose(d)
    print(f"d = {d}: primes {list(dec.primes)}, leftover {dec.leftover}")

# %%
# d = 20 on PSL(2, 13): one block of 18 plus one extra pair.
c = pack_cayley(20, q=13)
lam = max_nontrivial_abs_eig(c.graph).value
print(f"n = {c.graph.n}, simple = {c.graph.is_simple()}, lambda = {lam:.4f} <= bound {c.bound_value:.4f}")

# %%
# d = 12 repeats p = 5; the second copy is conjugated so the graph stays simple.
plan = pack_generators(12, q=29)
print("conjugations:", plan.conjugations)
rep = union_bound_check([cayley_graph(plan.group, b) for b in plan.blocks])
print(f"block lambdas {[round(x, 4) for x in rep.lambdas]}, union {rep.lambda_union:.4f}, ok = {rep.ok}")
