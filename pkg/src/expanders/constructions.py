"""Composite constructions built from the Cayley graph families.

* ``pack_cayley``: any degree d, by taking the union of LPS generating sets
  for a greedy decomposition of d into blocks p_i + 1, plus at most four
  extra generators.
* ``augment_to_exact``: exactly n vertices and degree p + 2, by attaching
  n - m new vertices to disjoint blocks of a Ramanujan graph on m vertices.
* ``find_sparse_set`` / ``delete_and_match`` / ``trim_to_exact``: exactly n
  vertices by deleting well-separated tree-like vertices from a larger graph
  and re-pairing their neighbours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cayley_lps import PSL2, build_lps, cayley_graph, lps_generators
from .cayley_quaternion import (
    QuaternionGroup,
    _factors,
    _modulus,
    build_quaternion,
    choose_exponents,
    class_count,
    partial_numbering,
    q_size,
    quaternion_generators,
)
from .errors import ConstructionError, HypothesisError, PreconditionError, SparseSetError
from .graph_core import MultiGraph, ball, ball_rank, ball_ranks, bfs_layers, cycle_rank, distances_from, is_connected
from .number_theory import find_q_lps, find_qpair, is_prime, largest_prime_1mod4_leq, legendre, lps_size
from .spectral import bound_value, max_nontrivial_abs_eig

# refuse to build Cayley groups larger than this many vertices
MAX_GROUP_ORDER = 5_000_000


# ---------------------------------------------------------------- decomposition


@dataclass(frozen=True)
class DegreeDecomposition:
    d: int
    primes: tuple[int, ...]
    leftover: int

    @property
    def supported(self) -> bool:
        return self.leftover <= 4

    @property
    def pairs(self) -> int:
        """Arbitrary generator/inverse pairs used for the leftover."""
        return self.leftover // 2

    @property
    def involutions(self) -> int:
        return self.leftover % 2


def greedy_decompose(d: int) -> DegreeDecomposition:
    """Peel off the largest p + 1 <= remainder (p prime, p = 1 mod 4) while the remainder exceeds 4."""
    if d < 3:
        raise PreconditionError(f"degree {d} < 3")
    primes = []
    rest = d
    while rest > 4:
        p = largest_prime_1mod4_leq(rest - 1)
        if p is None:
            break
        primes.append(p)
        rest -= p + 1
    return DegreeDecomposition(d, tuple(primes), rest)


# ---------------------------------------------------------------- packing


@dataclass
class Construction:
    """A built graph together with the spectral bound its construction guarantees."""

    graph: MultiGraph
    bound_kind: str
    bound_params: dict
    bound_value: float
    details: dict = field(default_factory=dict)


def smallest_psl_q(primes, n: int = 0) -> int:
    """Smallest prime q = 1 mod 4, distinct from the p_i, with every p_i a residue mod q and |PSL(2,q)| >= n."""
    primes = set(primes)
    q = 5
    while True:
        if is_prime(q) and q not in primes and lps_size(q) >= n and all(legendre(p, q) == 1 for p in primes):
            return q
        q += 4


def _check_psl_q(primes, q: int) -> None:
    if not is_prime(q) or q % 4 != 1:
        raise PreconditionError(f"q={q} is not a prime congruent to 1 mod 4")
    for p in primes:
        if p == q:
            raise PreconditionError(f"q={q} coincides with a block prime")
        if legendre(p, q) != 1:
            raise PreconditionError(f"p={p} is not a quadratic residue mod q={q}")


def quaternion_modulus_for(primes, n: int):
    """Smallest H(p, q1^s q2^t) with at least n vertices, q1, q2 from ``find_qpair``."""
    q1, q2 = find_qpair(primes)
    s, t = choose_exponents(n, q1, q2)
    return ((q1, s), (q2, t))


def _make_group(backend: str, primes, q=None, m=None, n: int = 0):
    """The vertex group and a generator function p -> generating list."""
    if backend == "psl":
        if q is None:
            q = smallest_psl_q(primes, n)
        _check_psl_q(primes, q)
        group = PSL2(q)
        return group, (lambda p: lps_generators(p, q)), {"backend": "psl", "q": q}
    if backend == "quaternion":
        f = _factors(m) if m is not None else quaternion_modulus_for(primes, n)
        if class_count(f) > MAX_GROUP_ORDER:
            raise PreconditionError(
                f"quaternion group for modulus {_modulus(f)} has {class_count(f)} vertices, above {MAX_GROUP_ORDER}"
            )
        group = QuaternionGroup(f)
        return group, (lambda p: quaternion_generators(p, f)), {"backend": "quaternion", "m": group.m, "factors": [list(x) for x in f]}
    raise PreconditionError(f"unknown backend {backend!r}")


def _conjugate_fresh(group, gens: list, taken: set):
    """Conjugate ``gens`` by the first element h (enumeration order) making them disjoint from ``taken``."""
    limit = min(group.order, 10_000)
    for i in range(limit):
        h = group.element(i)
        hi = group.inv(h)
        conj = [group.mul(group.mul(hi, g), h) for g in gens]
        if not taken.intersection(conj) and len(set(conj)) == len(conj):
            return conj, i
    raise ConstructionError(f"no conjugating element among the first {limit} makes the generator sets disjoint")


def _fresh_pair(group, taken: set):
    """First element (enumeration order) that is not an involution, with it and its inverse unused."""
    for i in range(group.order):
        g = group.element(i)
        if group.is_involution(g) or g in taken:
            continue
        gi = group.inv(g)
        if gi in taken:
            continue
        return g, gi
    raise ConstructionError("group has no unused non-involution left")


def _fresh_involution(group, taken: set):
    inv = group.involution()
    if inv not in taken:
        return inv
    identity = group.identity()
    for i in range(group.order):
        g = group.element(i)
        if g != identity and g not in taken and group.is_involution(g):
            return g
    raise ConstructionError("group has no unused involution left")


@dataclass
class PackPlan:
    """The group and the generator blocks of a packed Cayley graph.

    ``blocks`` lists one inverse-closed generator list per prime, then one
    per extra pair and one per extra involution; the packed graph is the
    union of the Cayley graphs of the blocks.
    """

    group: object
    blocks: list
    decomposition: DegreeDecomposition
    info: dict
    extra: list
    conjugations: list


def pack_generators(
    d: int,
    backend: str = "psl",
    q: int | None = None,
    m=None,
    n: int = 0,
    simple: bool = True,
    allow_five: bool = False,
) -> PackPlan:
    """Choose the group and generator blocks for ``pack_cayley``."""
    dec = greedy_decompose(d)
    if not dec.supported and not (allow_five and dec.leftover == 5):
        raise PreconditionError(f"degree {d} leaves {dec.leftover} > 4 after decomposition {list(dec.primes)}")
    group, gen_fn, info = _make_group(backend, dec.primes, q=q, m=m, n=n)
    blocks: list = []
    taken: set = set()
    conjugators = []
    for p in dec.primes:
        block = gen_fn(p)
        if simple and len(set(block)) != len(block):
            raise PreconditionError(f"generators for p={p} repeat in this group; the graph cannot be simple")
        if simple and taken.intersection(block):
            block, h = _conjugate_fresh(group, block, taken)
            conjugators.append({"p": p, "conjugator": h})
        blocks.append(list(block))
        taken.update(block)
    extra = []
    for _ in range(dec.pairs):
        g, gi = _fresh_pair(group, taken)
        extra.append(group.index(g))
        blocks.append([g, gi])
        taken.update([g, gi])
    for _ in range(dec.involutions):
        g = _fresh_involution(group, taken)
        extra.append(group.index(g))
        blocks.append([g])
        taken.add(g)
    if simple and group.identity() in taken:
        raise ConstructionError("identity among generators")
    return PackPlan(group, blocks, dec, info, extra, conjugators)


def pack_cayley(
    d: int,
    backend: str = "psl",
    q: int | None = None,
    m=None,
    n: int = 0,
    simple: bool = True,
    allow_five: bool = False,
) -> Construction:
    """A d-regular Cayley graph from unions of LPS generating sets.

    The group is PSL(2, q) (``backend="psl"``) or Q(m) (``"quaternion"``).
    Without explicit ``q``/``m`` the smallest admissible group with at least
    ``n`` vertices is used.  With ``simple`` set, a repeated prime's
    generators are conjugated away from earlier ones.  A leftover of 5
    (d = 11, 23, ...) is rejected unless ``allow_five`` is set, in which
    case two pairs and one involution are added.
    """
    plan = pack_generators(d, backend, q=q, m=m, n=n, simple=simple, allow_five=allow_five)
    dec = plan.decomposition
    G = cayley_graph(plan.group, [g for block in plan.blocks for g in block])
    if G.d != d:
        raise ConstructionError(f"packed graph has degree {G.d}, expected {d}")
    params = {"primes": list(dec.primes), "pairs": dec.pairs, "involutions": dec.involutions}
    details = dict(plan.info)
    details.update(
        n=G.n,
        d=d,
        decomposition={"primes": list(dec.primes), "leftover": dec.leftover},
        extra_generators=plan.extra,
        conjugations=plan.conjugations,
        connected=is_connected(G),
    )
    return Construction(G, "pack-union", params, bound_value("pack-union", d, **params), details)


# ---------------------------------------------------------------- exact n by augmentation


def _largest_quaternion_base(p: int, n: int):
    q1, q2 = find_qpair([p])
    best = None
    s = 1
    while q_size(q1, q2, s, 1) <= n:
        t = 1
        while q_size(q1, q2, s, t) <= n:
            cand = (q_size(q1, q2, s, t), -s, ((q1, s), (q2, t)))
            best = cand if best is None or cand > best else best
            t += 1
        s += 1
    return None if best is None else best[2]


def augment_to_exact(
    n: int,
    p: int,
    backend: str = "psl",
    mode: str = "loops",
    q: int | None = None,
    m=None,
    numbering: str = "full",
) -> Construction:
    """A (p+2)-regular graph on exactly n vertices.

    Base H is the largest admissible (p+1)-regular Ramanujan graph with
    m <= n vertices.  New vertex k (0-based) is joined to base vertices
    k*d .. (k+1)*d - 1 (or the k-th block of the partial numbering), and
    every other base vertex gets a loop, or in ``mode="matching"`` is
    paired with the next one.
    """
    if p % 4 != 1 or not is_prime(p):
        raise PreconditionError(f"p={p} is not a prime congruent to 1 mod 4")
    if mode not in ("loops", "matching"):
        raise PreconditionError(f"unknown mode {mode!r}")
    d = p + 2
    if backend == "psl":
        if numbering != "full":
            raise PreconditionError("partial numbering applies to the quaternion backend only")
        q = find_q_lps(p, n) if q is None else q
        if q is None:
            raise PreconditionError(f"no admissible base graph for p={p} with at most {n} vertices")
        H = build_lps(p, q)
        info = {"backend": "psl", "q": q}
        group = None
    elif backend == "quaternion":
        f = _factors(m) if m is not None else _largest_quaternion_base(p, n)
        if f is None:
            raise PreconditionError(f"no admissible base graph for p={p} with at most {n} vertices")
        if class_count(f) > MAX_GROUP_ORDER:
            raise PreconditionError(f"base graph with {class_count(f)} vertices is above {MAX_GROUP_ORDER}")
        H = build_quaternion(p, f)
        group = QuaternionGroup(f)
        info = {"backend": "quaternion", "m": group.m, "factors": [list(x) for x in f]}
    else:
        raise PreconditionError(f"unknown backend {backend!r}")
    base_n = H.n
    r_new = n - base_n
    if r_new < 0:
        raise PreconditionError(f"target n={n} is below the base graph size {base_n}")
    if r_new * d > base_n:
        raise PreconditionError(f"target too far above largest base graph: {r_new} new vertices need {r_new * d} > {base_n}")
    if mode == "matching" and n % 2:
        raise PreconditionError(f"matching mode needs even n, got {n}")
    params = {"p": p, "r_new": r_new, "m": base_n}
    details = dict(info)
    details.update(n=n, base_n=base_n, r_new=r_new, mode=mode, numbering=numbering)
    if r_new == 0:
        # n is itself a base size: return the Ramanujan graph untouched
        details.update(d=H.d, loops=0, matching_edges=0)
        return Construction(H, "thm12", params, bound_value("thm12", d, **params), details)

    if numbering == "partial":
        pn = partial_numbering(group.factors)
        if r_new * d > len(pn):
            raise PreconditionError(f"partial numbering covers {len(pn)} vertices, need {r_new * d}")
        block = pn.vertices(group, r_new * d)
    elif numbering == "full":
        block = np.arange(r_new * d, dtype=np.int64)
    else:
        raise PreconditionError(f"unknown numbering {numbering!r}")
    in_block = np.zeros(base_n, dtype=bool)
    in_block[block] = True
    rest = np.flatnonzero(~in_block)

    col = np.empty(base_n, dtype=np.int64)
    col[block] = base_n + np.repeat(np.arange(r_new, dtype=np.int64), d)
    if mode == "loops":
        col[rest] = rest
    else:
        if rest.size % 2:
            raise PreconditionError("odd number of non-neighbour base vertices; cannot match")
        col[rest[0::2]] = rest[1::2]
        col[rest[1::2]] = rest[0::2]
    table = np.vstack([np.column_stack([H.table, col]), block.reshape(r_new, d)])
    G = MultiGraph(table)
    details.update(
        d=d,
        loops=int(rest.size) if mode == "loops" else 0,
        matching_edges=int(rest.size // 2) if mode == "matching" else 0,
    )
    return Construction(G, "thm12", params, bound_value("thm12", d, **params), details)


# ---------------------------------------------------------------- sparse sets


@dataclass
class SparseSet:
    """Vertices at pairwise distance >= 2r + 3 whose (r+1)-balls are trees."""

    vertices: list[int]
    r: int
    base_n: int
    d: int
    relaxed: bool = False
    short_cycles: int = 0
    survivors: int = 0

    @property
    def lower_bound(self) -> float:
        """The guaranteed size n / (2 d^(2r+3)) when the full hypothesis holds."""
        return self.base_n / (2 * self.d ** (2 * self.r + 3))

    def __len__(self) -> int:
        return len(self.vertices)


def _short_cycle_vertices(G: MultiGraph, r: int) -> tuple[np.ndarray, int]:
    """Vertices on cycles of length <= 2r + 4, and the number of such cycles.

    Each such cycle lies in the (r+2)-ball of its vertices; under the
    hypothesis that ball has rank at most one, and its 2-core is the cycle.
    """
    rows = G.rows
    radius = r + 2
    ranks = ball_ranks(G, radius)
    cand = np.flatnonzero(ranks >= 1)
    on_cycle: set[int] = set()
    cycles: set[frozenset] = set()
    for v in cand.tolist():
        if v in on_cycle:
            continue
        B = ball(G, v, radius)
        core = _two_core(B.vertices, B.induced_edges)
        if v in core and _cycle_length(core, B.induced_edges) <= 2 * r + 4:
            key = frozenset(core)
            if key not in cycles:
                cycles.add(key)
                on_cycle.update(core)
    return np.array(sorted(on_cycle), dtype=np.int64), len(cycles)


def _two_core(vertices, edges) -> set[int]:
    deg = {v: 0 for v in vertices}
    adj: dict[int, list[int]] = {v: [] for v in vertices}
    for a, b in edges:
        deg[a] += 2 if a == b else 1
        if a != b:
            deg[b] += 1
        adj[a].append(b)
        if a != b:
            adj[b].append(a)
    stack = [v for v in vertices if deg[v] <= 1]
    alive = set(vertices)
    while stack:
        v = stack.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for w in adj[v]:
            if w in alive:
                deg[w] -= 1
                if deg[w] <= 1:
                    stack.append(w)
    return alive


def _cycle_length(core: set[int], edges) -> int:
    return sum(1 for a, b in edges if a in core and b in core)


def _greedy_separated(rows, candidates, sep: int, target: int) -> list[int]:
    """Pick candidates in order, discarding everything within distance ``sep`` of each pick."""
    blocked: set[int] = set()
    chosen = []
    for v in candidates:
        if v in blocked:
            continue
        chosen.append(v)
        if target and len(chosen) >= target:
            break
        dist, _ = bfs_layers(rows, [v], sep)
        blocked.update(dist)
    return chosen


def find_sparse_set(G: MultiGraph, r: int, u_target: int = 0, relaxed: bool = False) -> SparseSet:
    """Vertices at pairwise distance >= 2r+3 with cycle-free (r+1)-balls.

    Strict mode first checks that every (2r+4)-ball has at most one cycle,
    removes the (r+1)-neighbourhoods of all cycles of length <= 2r+4 and
    picks greedily from what survives.  Relaxed mode skips the hypothesis
    and picks greedily among vertices whose (r+1)-balls are trees.
    ``u_target = 0`` means take as many as possible.
    """
    n, d = G.n, G.d
    if d < 3:
        raise PreconditionError(f"degree {d} < 3")
    if r < 0:
        raise PreconditionError(f"radius {r} < 0")
    if r > math.log(n) / math.log(d - 1):
        raise HypothesisError(f"r={r} exceeds log_{d - 1}({n}) = {math.log(n) / math.log(d - 1):.3f}")
    rows = G.rows
    n_cycles = 0
    if relaxed:
        ranks = ball_ranks(G, r + 1)
        survivors = np.flatnonzero(ranks == 0)
    else:
        ranks = ball_ranks(G, 2 * r + 4, stop_above=1)
        bad = np.flatnonzero(ranks >= 2)
        if bad.size:
            w = int(bad[0])
            raise HypothesisError(
                f"the {2 * r + 4}-ball of vertex {w} has cycle rank {int(ranks[w])} > 1", witness=w, rank=int(ranks[w])
            )
        cyc, n_cycles = _short_cycle_vertices(G, r)
        keep = np.ones(n, dtype=bool)
        if cyc.size:
            keep[distances_from(G, cyc, max_depth=r + 1) >= 0] = False
        survivors = np.flatnonzero(keep)
    chosen = _greedy_separated(rows, survivors.tolist(), 2 * r + 2, u_target)
    if u_target and len(chosen) < u_target:
        raise SparseSetError(f"found {len(chosen)} separated vertices, needed {u_target}", achieved=len(chosen))
    S = SparseSet(chosen, r, n, d, relaxed=relaxed, short_cycles=n_cycles, survivors=int(survivors.size))
    verify_sparse_set(G, S, check_size=not relaxed and not u_target)
    return S


def verify_sparse_set(G: MultiGraph, S: SparseSet, check_size: bool = True) -> None:
    """Re-check the sparse-set conclusions by direct BFS; raise ``ConstructionError`` on failure."""
    rows = G.rows
    r = S.r
    if check_size and len(S) < S.lower_bound:
        raise ConstructionError(f"|U| = {len(S)} is below the guaranteed {S.lower_bound:.3g}")
    for u in S.vertices:
        if ball_rank(rows, u, r + 1):
            raise ConstructionError(f"the {r + 1}-ball of {u} contains a cycle")
    if S.vertices:
        chosen = set(S.vertices)
        for u in S.vertices:
            dist, _ = bfs_layers(rows, [u], 2 * r + 2)
            close = chosen.intersection(dist) - {u}
            if close:
                raise ConstructionError(f"vertices {u} and {min(close)} are closer than {2 * r + 3}")


# ---------------------------------------------------------------- delete and match


@dataclass
class TrimResult:
    graph: MultiGraph
    matching: list[tuple[int, int]]
    deleted: list[int]


def delete_and_match(H: MultiGraph, U, r: int | None = None, experimental_odd: bool = False) -> TrimResult:
    """Delete the vertices of U and pair up their neighbours with new edges.

    With d even each deleted vertex's sorted neighbours are matched in
    consecutive pairs.  For odd d, ``experimental_odd`` pairs the pooled
    neighbours of all deleted vertices consecutively instead (needs |U|
    even); the result is always re-checked.  Matching edges are reported in
    the new numbering; every one must have a tree-like r-neighbourhood.
    """
    vertices = list(U.vertices) if isinstance(U, SparseSet) else [int(u) for u in U]
    if r is None:
        r = U.r if isinstance(U, SparseSet) else 1
    if not vertices:
        return TrimResult(H, [], [])
    d = H.d
    deleted = set(vertices)
    if len(deleted) != len(vertices):
        raise PreconditionError("repeated vertex in U")
    stars = []
    for u in vertices:
        nb = sorted(int(x) for x in H.table[u])
        if deleted.intersection(nb):
            raise PreconditionError(f"vertex {u} of U is adjacent to another vertex of U (or has a loop)")
        if len(set(nb)) != d:
            raise PreconditionError(f"vertex {u} of U has a repeated neighbour")
        stars.append(nb)
    if len({x for nb in stars for x in nb}) != d * len(stars):
        raise PreconditionError("two vertices of U share a neighbour")
    if d % 2 == 0:
        pairs = [(nb[i], nb[i + 1]) for nb in stars for i in range(0, d, 2)]
    elif experimental_odd:
        if len(vertices) % 2:
            raise PreconditionError("odd degree pairing needs an even number of deleted vertices")
        pool = [x for nb in stars for x in nb]
        pairs = [(pool[i], pool[i + 1]) for i in range(0, len(pool), 2)]
    else:
        raise PreconditionError(f"degree {d} is odd; within-star pairing needs even degree")

    table = H.table.copy()
    # each (u, x) slot is replaced by x's partner; x's row holds u once per edge
    partner: dict[tuple[int, int], int] = {}
    owner = {x: u for u, nb in zip(vertices, stars) for x in nb}
    for a, b in pairs:
        partner[(owner[a], a)] = b
        partner[(owner[b], b)] = a
    for (u, x), y in partner.items():
        slot = np.flatnonzero(table[x] == u)
        if not slot.size:
            raise ConstructionError(f"edge {x}-{u} is missing")
        table[x, slot[0]] = y
    new_index, keep = H.relabel_delete(vertices)
    G = MultiGraph(new_index[table[keep]])
    matching = [(int(new_index[a]), int(new_index[b])) for a, b in pairs]
    for a, b in matching:
        if cycle_rank(ball(G, (a, b), r)):
            raise ConstructionError(f"the {r}-neighbourhood of matching edge ({a}, {b}) contains a cycle")
    return TrimResult(G, matching, sorted(vertices))


def trim_to_exact(
    n: int,
    epsilon: float,
    p: int | None = None,
    q: int | None = None,
    base: MultiGraph | None = None,
    relaxed: bool = False,
    lambda_base: float | None = None,
    **solver,
) -> Construction:
    """A d-regular graph on n vertices from a larger base by deleting a sparse set.

    r = ceil(2 / epsilon).  The base is ``base`` or LPS(p, q).  The reported
    bound is lambda(base) + 1/r with lambda(base) measured (or supplied).
    """
    if epsilon <= 0:
        raise PreconditionError(f"epsilon must be positive, got {epsilon}")
    if base is None:
        if p is None or q is None:
            raise PreconditionError("either a base graph or (p, q) is required")
        base = build_lps(p, q)
    d = base.d
    if (n * d) % 2:
        raise PreconditionError(f"n*d = {n * d} is odd")
    u = base.n - n
    if u < 0:
        raise PreconditionError(f"target n={n} exceeds the base size {base.n}")
    r = math.ceil(2 / epsilon)
    if lambda_base is None:
        lambda_base = max_nontrivial_abs_eig(base, **solver).value
    if u == 0:
        G, matching, S = base, [], None
    else:
        try:
            S = find_sparse_set(base, r, u_target=u, relaxed=relaxed)
        except SparseSetError as e:
            raise SparseSetError(f"gap too large for this base: {e}", achieved=e.achieved) from e
        res = delete_and_match(base, S, r=r)
        G, matching = res.graph, res.matching
    params = {"lambda_base": float(lambda_base), "r": r}
    details = {
        "n": n,
        "d": d,
        "base_n": base.n,
        "u": u,
        "r": r,
        "epsilon": epsilon,
        "relaxed": relaxed,
        "deleted": [] if S is None else list(S.vertices),
        "matching_edges": len(matching),
        "matching": [list(e) for e in matching],
    }
    if p is not None:
        details.update(p=p, q=q)
    return Construction(G, "trim", params, bound_value("trim", d, **params), details)
