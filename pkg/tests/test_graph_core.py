import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from expanders.errors import DegreeError, GraphFormatError, PreconditionError
from expanders.graph_core import (
    INF,
    MultiGraph,
    ball,
    ball_rank,
    ball_ranks,
    build,
    cycle_rank,
    distance,
    distances_from,
    dumps,
    from_networkx,
    girth,
    girth_search,
    is_bipartite,
    is_connected,
    loads,
    read_edge_list,
    write_edge_list,
)

from conftest import cycle


def union_find_acyclic(vertices, edges):
    """Independent forest check: a union-find that fails on the first edge closing a cycle."""
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def brute_girth(g: nx.Graph):
    best = INF
    for c in nx.simple_cycles(g.to_directed()):
        if len(c) >= 3:
            best = min(best, len(c))
    return best


def random_regular(n, d, seed):
    return from_networkx(nx.random_regular_graph(d, n, seed=seed))


# ---------------------------------------------------------------- build


def test_build_triangle():
    G = build(3, 2, [(0, 1), (1, 2), (2, 0)])
    assert G.n == 3 and G.d == 2
    assert G.table.tolist() == [[1, 2], [0, 2], [0, 1]]
    assert G.is_simple()


def test_build_loops_count_once():
    G = build(2, 2, [(0, 1)], [0, 1])
    assert G.loops.tolist() == [1, 1]
    assert G.table.tolist() == [[0, 1], [0, 1]]
    assert not G.is_simple()


def test_build_double_edges():
    G = build(4, 2, [(0, 1), (0, 1), (2, 3), (2, 3)])
    assert G.multiplicity(0, 1) == 2
    assert G.num_edges() == 4
    assert girth(G) == 2


def test_build_rejects_irregular():
    with pytest.raises(DegreeError) as e:
        build(3, 2, [(0, 1), (1, 2)])
    assert e.value.vertex == 0 and e.value.degree == 1


def test_build_rejects_out_of_range():
    with pytest.raises(PreconditionError):
        build(2, 1, [(0, 2)])


def test_table_is_read_only(petersen):
    with pytest.raises(ValueError):
        petersen.table[0, 0] = 5


def test_asymmetric_table_rejected():
    with pytest.raises(PreconditionError):
        MultiGraph(np.array([[1], [2], [0]]))


def test_degree_sum(lps_13_17):
    G = lps_13_17
    nonloop = (G.table != np.arange(G.n)[:, None]).sum()
    assert nonloop + G.loops.sum() == G.n * G.d


# ---------------------------------------------------------------- balls


def test_ball_on_cycle():
    B = ball(cycle(10), 0, 2)
    assert B.vertices == [0, 1, 2, 8, 9]
    assert [sorted(layer) for layer in B.layers] == [[0], [1, 9], [2, 8]]
    assert cycle_rank(B) == 0


def test_petersen_balls(petersen):
    B1 = ball(petersen, 0, 1)
    assert len(B1.vertices) == 4 and len(B1.induced_edges) == 3
    assert [len(layer) for layer in B1.layers] == [1, 3]
    B2 = ball(petersen, 0, 2)
    assert len(B2.vertices) == 10
    assert cycle_rank(B2) == 15 - 10 + 1


def test_cycle_rank_of_whole_cycle():
    assert cycle_rank(ball(cycle(5), 0, 2)) == 1


def test_edge_ball_layers(petersen):
    B = ball(petersen, (0, 1), 1)
    assert sorted(B.layers[0]) == [0, 1]
    assert len(B.layers[1]) == 4


def test_ball_layer_structure(lps_13_17):
    G = lps_13_17
    B = ball(G, 5, 3)
    rows = G.rows
    depth = {v: i for i, layer in enumerate(B.layers) for v in layer}
    for v, i in depth.items():
        if i == 0:
            continue
        near = [depth[w] for w in rows[v] if w in depth]
        assert i - 1 in near
        assert min(near) >= i - 1


@pytest.mark.parametrize("seed", range(5))
def test_cycle_rank_matches_union_find(seed):
    G = random_regular(60, 3, seed)
    rng = np.random.default_rng(seed)
    for v in rng.integers(0, G.n, size=10).tolist():
        for r in (1, 2, 3):
            B = ball(G, v, r)
            assert (cycle_rank(B) == 0) == union_find_acyclic(B.vertices, B.induced_edges)
            assert ball_rank(G.rows, v, r) == cycle_rank(B)


def test_ball_ranks_vectorised_matches_scalar():
    G = random_regular(300, 3, 7)
    for r in (2, 4, 6):
        fast = ball_ranks(G, r)
        slow = [ball_rank(G.rows, v, r) for v in range(G.n)]
        assert fast.tolist() == slow


def test_ball_ranks_with_loops():
    G = build(4, 3, [(0, 1), (1, 2), (2, 3), (3, 0)], [0, 1, 2, 3])
    assert ball_ranks(G, 0).tolist() == [1, 1, 1, 1]
    assert ball_ranks(G, 2).tolist() == [5, 5, 5, 5]


def test_ball_ranks_early_stop(petersen):
    out = ball_ranks(petersen, 6, stop_above=1)
    assert out[0] == 6


def test_negative_radius_rejected(petersen):
    with pytest.raises(PreconditionError):
        ball(petersen, 0, -1)


# ---------------------------------------------------------------- global properties


def test_petersen_properties(petersen):
    assert girth(petersen) == 5
    assert is_connected(petersen)
    assert not is_bipartite(petersen)


def test_c8_properties(c8):
    assert girth(c8) == 8
    assert is_bipartite(c8)


def test_k4_girth():
    assert girth(from_networkx(nx.complete_graph(4))) == 3


def test_loop_girth_and_bipartite():
    G = build(2, 2, [(0, 1)], [0, 1])
    assert girth(G) == 1
    assert not is_bipartite(G)


def test_forest_girth_is_infinite():
    G = build(2, 1, [(0, 1)])
    assert girth(G) == INF
    assert distance(G, 0, 1) == 1


def test_disconnected():
    G = build(6, 2, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    assert not is_connected(G)
    assert distance(G, 0, 4) == INF
    assert distances_from(G, [0]).tolist() == [0, 1, 1, -1, -1, -1]


@pytest.mark.parametrize("seed", range(6))
def test_girth_matches_brute_force(seed):
    g = nx.random_regular_graph(3, 16, seed=seed)
    assert girth(from_networkx(g)) == brute_girth(g)


def test_girth_capped_lower_bound(lps_5_29):
    value, exact = girth_search(lps_5_29, max_radius=3)
    assert (value, exact) == (8, False)
    value, exact = girth_search(lps_5_29, max_radius=4)
    assert (value, exact) == (9, True)


def test_distance_matches_networkx(petersen):
    g = nx.petersen_graph()
    for u, v in itertools.combinations(range(10), 2):
        assert distance(petersen, u, v) == nx.shortest_path_length(g, u, v)


# ---------------------------------------------------------------- edge-list format


def test_dumps_format():
    G = build(2, 2, [(0, 1)], [0, 1])
    assert dumps(G) == "expander v1 n=2 d=2\n0 0\n0 1\n1 1\n"


def test_round_trip_file(tmp_path, lps_13_17):
    path = tmp_path / "g.txt"
    write_edge_list(lps_13_17, path)
    H = read_edge_list(path)
    assert H == lps_13_17
    assert path.read_bytes().endswith(b"\n")
    assert b"\r" not in path.read_bytes()


@pytest.mark.parametrize(
    "text",
    [
        "graph n=2 d=1\n0 1\n",
        "expander v1 n=2 d=1\n0 x\n",
        "expander v1 n=2 d=1\n0\n",
        "expander v1 n=2 d=1\n0 5\n",
        "expander v1 n=2 d=1\n1 0\n",
    ],
)
def test_loads_rejects_malformed(text):
    with pytest.raises(GraphFormatError):
        loads(text)


def test_loads_rejects_irregular():
    with pytest.raises(DegreeError):
        loads("expander v1 n=3 d=2\n0 1\n1 2\n")


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.data())
def test_round_trip_random_multigraphs(n, data):
    # random 2-regular multigraph with loops: a union of a perfect "pairing with loops" twice
    edges, loops = [], []
    for _ in range(2):
        perm = data.draw(st.permutations(range(n)))
        for i in range(0, n - 1, 2):
            edges.append((perm[i], perm[i + 1]))
        if n % 2:
            loops.append(perm[-1])
    G = build(n, 2, edges, loops)
    assert loads(dumps(G)) == G
    assert G.num_edges() == len(edges) + len(loops)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_ball_layers_partition(seed):
    G = random_regular(40, 3, seed)
    B = ball(G, 0, 3)
    flat = [v for layer in B.layers for v in layer]
    assert sorted(flat) == B.vertices
    dist = distances_from(G, [0])
    for i, layer in enumerate(B.layers):
        assert all(dist[v] == i for v in layer)
