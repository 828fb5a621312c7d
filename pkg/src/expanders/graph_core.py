"""Regular multigraphs with loops, BFS balls, cycle rank, girth and the edge-list format.

A ``MultiGraph`` stores a d-regular multigraph as an ``(n, d)`` integer table:
row ``u`` lists the neighbours of ``u`` (sorted, with multiplicity), and a loop
at ``u`` appears as one entry ``u`` in that row.  A loop therefore adds one to
the degree and one to the diagonal of the adjacency matrix, so the all-ones
vector is always an eigenvector with eigenvalue d.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DegreeError, GraphFormatError, PreconditionError

INF = math.inf

_HEADER = re.compile(r"^expander v1 n=(\d+) d=(\d+)$")


class MultiGraph:
    """Immutable d-regular multigraph on vertices 0..n-1."""

    def __init__(self, table: np.ndarray, *, check: bool = True):
        table = np.asarray(table)
        if table.ndim != 2:
            raise PreconditionError("neighbour table must be two-dimensional")
        table = np.sort(table.astype(np.int64, copy=True), axis=1)
        n = table.shape[0]
        if check and table.size:
            if table.min() < 0 or table.max() >= n:
                raise PreconditionError("neighbour index out of range")
            _check_symmetric(table)
        table.flags.writeable = False
        self._table = table

    @classmethod
    def from_target_table(cls, table: np.ndarray) -> "MultiGraph":
        """Build from per-vertex target lists (e.g. a Cayley graph's right-multiplication maps)."""
        return cls(table)

    @property
    def table(self) -> np.ndarray:
        return self._table

    @property
    def n(self) -> int:
        return self._table.shape[0]

    @property
    def d(self) -> int:
        return self._table.shape[1]

    @cached_property
    def loops(self) -> np.ndarray:
        """Loop count at each vertex."""
        counts = (self._table == np.arange(self.n)[:, None]).sum(axis=1)
        counts.flags.writeable = False
        return counts

    @cached_property
    def adjacency(self) -> list[list[int]]:
        """Non-loop neighbours of each vertex, sorted, with multiplicity."""
        return [[w for w in row if w != u] for u, row in enumerate(self.rows)]

    @cached_property
    def rows(self) -> list[list[int]]:
        """Plain-list copy of the neighbour table (loops included), for Python BFS."""
        return self._table.tolist()

    def neighbors(self, u: int) -> np.ndarray:
        return self._table[u]

    def edges(self) -> np.ndarray:
        """Edge multiset as an (E, 2) array of pairs u <= v, loops as (u, u), sorted."""
        u = np.repeat(np.arange(self.n), self.d)
        v = self._table.ravel()
        keep = v >= u
        return np.column_stack([u[keep], v[keep]])

    def num_edges(self) -> int:
        return int((self._table.ravel() >= np.repeat(np.arange(self.n), self.d)).sum())

    def multiplicity(self, u: int, v: int) -> int:
        return int((self._table[u] == v).sum())

    def is_simple(self) -> bool:
        t = self._table
        if (t == np.arange(self.n)[:, None]).any():
            return False
        return not (t[:, 1:] == t[:, :-1]).any()

    def relabel_delete(self, removed: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
        """Old-to-new index map (``-1`` for removed vertices) and surviving old indices."""
        keep = np.ones(self.n, dtype=bool)
        keep[list(removed)] = False
        new_index = np.full(self.n, -1, dtype=np.int64)
        new_index[keep] = np.arange(int(keep.sum()))
        return new_index, np.flatnonzero(keep)

    def __eq__(self, other):
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return self._table.shape == other._table.shape and np.array_equal(self._table, other._table)

    def __hash__(self):
        return hash((self._table.shape, self._table.tobytes()))

    def __repr__(self):
        return f"MultiGraph(n={self.n}, d={self.d})"


def _check_symmetric(table: np.ndarray) -> None:
    n, d = table.shape
    u = np.repeat(np.arange(n, dtype=np.int64), d)
    v = table.ravel()
    off = u != v
    fwd = np.sort(u[off] * n + v[off])
    bwd = np.sort(v[off] * n + u[off])
    if not np.array_equal(fwd, bwd):
        bad = np.flatnonzero(fwd != bwd)[0]
        a, b = divmod(int(fwd[bad]), n)
        raise PreconditionError(f"adjacency is not symmetric near edge ({a}, {b})")


def build(n: int, d: int, edge_list: Iterable[Sequence[int]], loop_list: Iterable[int] = ()) -> MultiGraph:
    """Assemble a d-regular multigraph from edges and loops.

    An edge ``(u, u)`` in ``edge_list`` is a loop.  Raises ``DegreeError``
    naming the first vertex whose degree is not ``d``.
    """
    rows: list[list[int]] = [[] for _ in range(n)]
    for e in edge_list:
        a, b = int(e[0]), int(e[1])
        if not (0 <= a < n and 0 <= b < n):
            raise PreconditionError(f"edge ({a}, {b}) has an endpoint outside [0, {n})")
        rows[a].append(b)
        if a != b:
            rows[b].append(a)
    for a in loop_list:
        a = int(a)
        if not 0 <= a < n:
            raise PreconditionError(f"loop at {a} is outside [0, {n})")
        rows[a].append(a)
    for u, row in enumerate(rows):
        if len(row) != d:
            raise DegreeError(u, len(row), d)
    return MultiGraph(np.array(rows, dtype=np.int64).reshape(n, d), check=False)


def from_networkx(g, d: int | None = None) -> MultiGraph:
    """Convert a networkx graph with nodes 0..n-1 (regular) to a MultiGraph."""
    n = g.number_of_nodes()
    if d is None:
        d = max((deg for _, deg in g.degree()), default=0)
    return build(n, d, g.edges())


# ---------------------------------------------------------------------------
# BFS machinery


@dataclass(frozen=True)
class Ball:
    """Vertices within ``radius`` of a centre vertex or edge, split into distance layers."""

    center: int | tuple[int, int]
    radius: int
    vertices: list[int]
    induced_edges: list[tuple[int, int]]
    layers: list[list[int]] = field(repr=False)


def _sources(center) -> list[int]:
    if isinstance(center, (tuple, list)):
        return sorted(set(int(c) for c in center))
    return [int(center)]


def bfs_layers(rows: list[list[int]], sources: Sequence[int], radius: int) -> tuple[dict[int, int], list[list[int]]]:
    """Distances (as a dict) and layers of all vertices within ``radius`` of ``sources``."""
    dist = {s: 0 for s in sources}
    layers = [list(dict.fromkeys(sources))]
    frontier = layers[0]
    for depth in range(1, radius + 1):
        nxt = []
        for x in frontier:
            for y in rows[x]:
                if y not in dist:
                    dist[y] = depth
                    nxt.append(y)
        if not nxt:
            break
        layers.append(nxt)
        frontier = nxt
    return dist, layers


def ball(G: MultiGraph, center, radius: int) -> Ball:
    """Exact BFS ball around a vertex or an edge ``(u, v)``."""
    if radius < 0:
        raise PreconditionError("radius must be non-negative")
    rows = G.rows
    dist, layers = bfs_layers(rows, _sources(center), radius)
    edges = []
    for x in dist:
        for y in rows[x]:
            if y >= x and y in dist:
                edges.append((x, y))
    edges.sort()
    return Ball(center=center, radius=radius, vertices=sorted(dist), induced_edges=edges, layers=layers)


def _components(vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> int:
    adj: dict[int, list[int]] = {v: [] for v in vertices}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen: set[int] = set()
    count = 0
    for s in adj:
        if s in seen:
            continue
        count += 1
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return count


def cycle_rank(B: Ball) -> int:
    """|E| - |V| + components of the ball's induced subgraph (loops and parallel edges count)."""
    return len(B.induced_edges) - len(B.vertices) + _components(B.vertices, B.induced_edges)


def ball_rank(rows: list[list[int]], source: int, radius: int) -> int:
    """Cycle rank of the radius-ball around one vertex, without building a ``Ball``.

    The ball of a single vertex is connected, so the rank is |E| - |V| + 1.
    """
    dist, _ = bfs_layers(rows, [source], radius)
    twice_edges = 0
    for x in dist:
        for y in rows[x]:
            if y == x:
                twice_edges += 2
            elif y in dist:
                twice_edges += 1
    return twice_edges // 2 - len(dist) + 1


# pair codes processed per batch in ball_ranks
_BATCH_BUDGET = 4_000_000


def _ball_size_estimate(n: int, d: int, radius: int) -> int:
    size, layer = 1, d
    for _ in range(radius):
        size += layer
        layer *= max(d - 1, 1)
        if size >= n:
            return n
    return min(size, n)


def ball_ranks(G: MultiGraph, radius: int, sources=None, stop_above: int | None = None) -> np.ndarray:
    """Cycle ranks of the radius-balls around many vertices at once.

    Vectorised BFS over batches of sources, tracking (source, vertex) pairs
    as integer codes.  With ``stop_above`` set, processing stops after the
    first batch containing a rank above it; ranks of unprocessed sources are
    reported as -1.
    """
    n, d = G.n, G.d
    t = G.table
    src = np.arange(n, dtype=np.int64) if sources is None else np.asarray(sources, dtype=np.int64)
    out = np.full(src.size, -1, dtype=np.int64)
    batch = max(1, _BATCH_BUDGET // max(1, d * _ball_size_estimate(n, d, radius)))
    for lo in range(0, src.size, batch):
        chunk = src[lo:lo + batch]
        b = chunk.size
        owner = np.arange(b, dtype=np.int64)
        visited = owner * n + chunk
        frontier = visited
        for _ in range(radius):
            if not frontier.size:
                break
            cand = ((frontier // n)[:, None] * n + t[frontier % n]).ravel()
            cand = np.unique(cand)
            pos = np.searchsorted(visited, cand)
            pos[pos >= visited.size] = 0
            cand = cand[visited[pos] != cand]
            visited = np.union1d(visited, cand)
            frontier = cand
        who = visited // n
        vert = visited % n
        nb = who[:, None] * n + t[vert]
        pos = np.searchsorted(visited, nb)
        pos[pos >= visited.size] = 0
        inside = visited[pos] == nb
        is_loop = t[vert] == vert[:, None]
        twice = np.where(is_loop, 2, 1) * inside
        twice_edges = np.bincount(np.repeat(who, d), weights=twice.ravel(), minlength=b)
        nverts = np.bincount(who, minlength=b)
        ranks = (twice_edges // 2).astype(np.int64) - nverts + 1
        out[lo:lo + b] = ranks
        if stop_above is not None and (ranks > stop_above).any():
            break
    return out


def distance(G: MultiGraph, u: int, v: int) -> float:
    """Graph distance, or ``INF`` when v is unreachable from u."""
    if u == v:
        return 0
    rows = G.rows
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in rows[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                if y == v:
                    return dist[y]
                queue.append(y)
    return INF


def distances_from(G: MultiGraph, sources: Sequence[int], max_depth: int | None = None) -> np.ndarray:
    """Multi-source BFS distances as an int array, ``-1`` for unreached vertices."""
    dist = np.full(G.n, -1, dtype=np.int64)
    frontier = np.unique(np.asarray(sources, dtype=np.int64))
    dist[frontier] = 0
    depth = 0
    t = G.table
    while frontier.size and (max_depth is None or depth < max_depth):
        depth += 1
        cand = np.unique(t[frontier].ravel())
        cand = cand[dist[cand] < 0]
        dist[cand] = depth
        frontier = cand
    return dist


def is_connected(G: MultiGraph) -> bool:
    if G.n == 0:
        return True
    return bool((distances_from(G, [0]) >= 0).all())


def is_bipartite(G: MultiGraph) -> bool:
    """Two-colourability, checked per connected component.  A loop makes a graph non-bipartite."""
    t = G.table
    colour = np.full(G.n, -1, dtype=np.int64)
    for s in range(G.n):
        if colour[s] >= 0:
            continue
        colour[s] = 0
        frontier = np.array([s])
        while frontier.size:
            nb = t[frontier]
            want = 1 - colour[frontier]
            clash = (colour[nb] >= 0) & (colour[nb] != want[:, None])
            if clash.any():
                return False
            flat = nb.ravel()
            fresh = colour[flat] < 0
            colour[flat[fresh]] = np.repeat(want, G.d)[fresh]
            frontier = np.unique(flat[fresh])
    return True


def _shortest_cycle_through(rows: list[list[int]], s: int, best: float, max_radius: float) -> float:
    """Shortest cycle length seen by BFS from s, or ``best`` if nothing shorter shows up.

    Assumes a simple graph.  Every cycle through s of length at most
    ``2 * max_radius + 1`` is found; other hits are lengths of closed walks,
    which bound some real cycle from above, so the minimum over all s is exact.
    """
    dist = {s: 0}
    parent = {s: -1}
    frontier = [s]
    depth = 0
    while frontier and 2 * depth + 1 < best:
        grow = depth < max_radius
        nxt = []
        for x in frontier:
            px = parent[x]
            for y in rows[x]:
                if y == px:
                    continue
                if y in dist:
                    best = min(best, dist[x] + dist[y] + 1)
                elif grow:
                    dist[y] = depth + 1
                    parent[y] = x
                    nxt.append(y)
        frontier = nxt
        depth += 1
    return best


def girth_search(G: MultiGraph, max_radius: int | None = None) -> tuple[float, bool]:
    """Girth with an optional BFS radius cap.

    Returns ``(value, exact)``.  With a cap R every cycle of length up to
    2R + 1 is found; if there is none, ``value`` is the lower bound 2R + 2 and
    ``exact`` is False.
    """
    if G.n == 0:
        return INF, True
    if G.loops.any():
        return 1, True
    t = G.table
    if (t[:, 1:] == t[:, :-1]).any():
        return 2, True
    cap = INF if max_radius is None else max_radius
    rows = G.rows
    best = INF
    for s in range(G.n):
        best = _shortest_cycle_through(rows, s, best, cap)
        if best == 3:
            break
    if max_radius is not None and best > 2 * max_radius + 1:
        return 2 * max_radius + 2, False
    return best, True


def girth(G: MultiGraph) -> float:
    """Length of the shortest cycle; 1 with a loop, 2 with a parallel edge, ``INF`` for a forest."""
    return girth_search(G)[0]


# ---------------------------------------------------------------------------
# Edge-list text format


def dumps(G: MultiGraph) -> str:
    """Serialise to the ``expander v1`` edge-list format."""
    e = G.edges()
    body = "\n".join(f"{u} {v}" for u, v in e.tolist())
    head = f"expander v1 n={G.n} d={G.d}\n"
    return head + (body + "\n" if body else "")


def loads(text: str) -> MultiGraph:
    lines = text.split("\n", 1)
    m = _HEADER.match(lines[0].strip())
    if not m:
        raise GraphFormatError(f"bad header line: {lines[0][:80]!r}")
    n, d = int(m.group(1)), int(m.group(2))
    rest = lines[1] if len(lines) > 1 else ""
    try:
        flat = np.array(rest.split(), dtype=np.int64)
    except ValueError as exc:
        raise GraphFormatError(f"non-integer token in edge list: {exc}") from None
    if flat.size % 2:
        raise GraphFormatError("edge list has an odd number of integers")
    pairs = flat.reshape(-1, 2)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
        raise GraphFormatError(f"vertex index outside [0, {n})")
    if (pairs[:, 0] > pairs[:, 1]).any():
        raise GraphFormatError("edge lines must satisfy u <= v")
    return _from_pairs(n, d, pairs)


def _from_pairs(n: int, d: int, pairs: np.ndarray) -> MultiGraph:
    loop = pairs[:, 0] == pairs[:, 1]
    src = np.concatenate([pairs[:, 0], pairs[~loop, 1]])
    dst = np.concatenate([pairs[:, 1], pairs[~loop, 0]])
    deg = np.bincount(src, minlength=n)
    bad = np.flatnonzero(deg != d)
    if bad.size:
        v = int(bad[0])
        raise DegreeError(v, int(deg[v]), d)
    order = np.lexsort((dst, src))
    return MultiGraph(dst[order].reshape(n, d), check=False)


def write_edge_list(G: MultiGraph, path) -> None:
    Path(path).write_text(dumps(G), encoding="ascii", newline="\n")


def read_edge_list(path) -> MultiGraph:
    return loads(Path(path).read_text(encoding="ascii"))
