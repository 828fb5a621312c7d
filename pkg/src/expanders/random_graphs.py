"""Random regular test graphs and local edge switching.

``random_regular_graph`` draws from the configuration (pairing) model and
then applies double-edge switches until the graph is simple.
``switch_out_cycle_clusters`` goes further and removes every place where a
radius-R ball contains two or more independent cycles, which is what the
strict sparse-set search asks of its host graph.
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError
from .graph_core import MultiGraph, ball_ranks, bfs_layers, distances_from


def _pairing(n: int, d: int, rng) -> list[list[int]]:
    stubs = np.repeat(np.arange(n), d)
    rng.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)
    rows: list[list[int]] = [[] for _ in range(n)]
    for a, b in pairs.tolist():
        rows[a].append(b)
        rows[b].append(a)
    return rows


def _bad_simple(rows: list[list[int]], v: int) -> bool:
    r = rows[v]
    return v in r or len(set(r)) != len(r)


def _swap(rows, a, b, c, e) -> None:
    """Replace edges ab, ce by ac, be."""
    rows[a].remove(b)
    rows[b].remove(a)
    rows[c].remove(e)
    rows[e].remove(c)
    rows[a].append(c)
    rows[c].append(a)
    rows[b].append(e)
    rows[e].append(b)


def _random_edge(rows, n, d, rng) -> tuple[int, int]:
    c = int(rng.integers(n))
    return c, rows[c][int(rng.integers(d))]


def random_regular_graph(n: int, d: int, seed: int = 0) -> MultiGraph:
    """A simple d-regular graph from the pairing model, made simple by random switches."""
    if (n * d) % 2 or not 0 <= d < n:
        raise PreconditionError(f"no simple {d}-regular graph on {n} vertices")
    rng = np.random.default_rng(seed)
    rows = _pairing(n, d, rng)
    bad = [v for v in range(n) if _bad_simple(rows, v)]
    while bad:
        v = bad.pop()
        if not _bad_simple(rows, v):
            continue
        r = rows[v]
        w = v if v in r else next(x for x in r if r.count(x) > 1)
        c, e = _random_edge(rows, n, d, rng)
        if len({v, w, c, e}) < 4 - (v == w) or c in rows[v] or e in rows[w]:
            bad.append(v)
            continue
        _swap(rows, v, w, c, e)
        bad.extend(x for x in (v, w, c, e) if _bad_simple(rows, x))
    return MultiGraph(np.array(rows, dtype=np.int64))


def _cycle_edge(rows: list[list[int]], v: int, radius: int) -> tuple[int, int] | None:
    """An edge lying on a cycle inside the radius-ball of v (a non-tree edge of its BFS), if any."""
    dist, layers = bfs_layers(rows, [v], radius)
    parent = {v: -1}
    for layer in layers[1:]:
        for y in layer:
            parent[y] = next(x for x in rows[y] if dist.get(x, -2) == dist[y] - 1)
    for x in dist:
        for y in rows[x]:
            if y in dist and parent.get(x) != y and parent.get(y) != x:
                return x, y
    return None


def switch_out_cycle_clusters(G: MultiGraph, radius: int, seed: int = 0, max_rounds: int = 50) -> MultiGraph:
    """Switch edges until every radius-ball has cycle rank at most one.

    Each offending ball loses one edge of a cycle, swapped with a uniformly
    random edge far from it.  Only vertices near a switch are re-examined.
    """
    rng = np.random.default_rng(seed)
    n, d = G.n, G.d
    rows = [list(r) for r in G.rows]
    current = G
    check = np.arange(n)
    for _ in range(max_rounds):
        ranks = ball_ranks(current, radius, sources=check)
        bad = check[ranks >= 2]
        if not bad.size:
            return current
        touched: set[int] = set()
        for v in bad.tolist():
            if v in touched:
                continue
            e = _cycle_edge(rows, int(v), radius)
            if e is None:  # already fixed by an earlier switch this round
                continue
            a, b = e
            near, _ = bfs_layers(rows, [a, b], 2 * radius + 1)
            for _attempt in range(100):
                c, e = _random_edge(rows, n, d, rng)
                if c in near or e in near or c in rows[a] or e in rows[b]:
                    continue
                _swap(rows, a, b, c, e)
                touched.update((a, b, c, e))
                break
        current = MultiGraph(np.array(rows, dtype=np.int64), check=False)
        if not touched:
            continue
        dist = distances_from(current, sorted(touched), max_depth=radius)
        check = np.union1d(np.flatnonzero(dist >= 0), bad)
    raise PreconditionError(f"could not clear cycle clusters in {max_rounds} rounds")


def joined_copies(H: MultiGraph, edge: tuple[int, int] | None = None) -> MultiGraph:
    """Two disjoint copies of H joined by a 2-edge swap.

    The edge (a, b) is removed from both copies and replaced by a-a' and
    b-b'.  The result is d-regular with a two-edge bottleneck, so its second
    eigenvalue is close to d and its eigenvector is imbalanced between the
    halves.
    """
    a, b = edge if edge is not None else (0, int(H.table[0][0]))
    if b not in H.table[a] or a == b:
        raise PreconditionError(f"({a}, {b}) is not a non-loop edge")
    n = H.n
    table = np.vstack([H.table, H.table + n])
    for x, y in ((a, b), (b, a)):
        for shift in (0, n):
            row = table[x + shift]
            slot = np.flatnonzero(row == y + shift)[0]
            row[slot] = x + (n - shift)  # cross to the same vertex in the other copy
    return MultiGraph(table)
