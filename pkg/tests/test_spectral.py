import json
import math

import networkx as nx
import numpy as np
import pytest

from expanders.cayley_lps import build_lps
from expanders.errors import ConvergenceError, PreconditionError
from expanders.graph_core import MultiGraph, build, from_networkx
from expanders.spectral import (
    SpectralCertificate,
    _iterative,
    adjacency_matrix,
    apply_adjacency,
    bound_value,
    certify,
    delocalization_profile,
    graph_union,
    max_nontrivial_abs_eig,
    union_bound_check,
)

from conftest import cycle


def nx_lambda(G: MultiGraph):
    """Oracle: numpy eigvalsh of the dense matrix, dropping one eigenvalue equal to d."""
    vals = np.sort(np.linalg.eigvalsh(adjacency_matrix(G)))
    k = int(np.argmin(np.abs(vals - G.d)))
    rest = np.delete(vals, k)
    return float(np.max(np.abs(rest)))


def test_apply_adjacency_examples(petersen):
    assert np.allclose(apply_adjacency(petersen, np.ones(10)), 3 * np.ones(10))
    C4 = cycle(4)
    assert apply_adjacency(C4, np.array([1, -1, 1, -1])).tolist() == [-2, 2, -2, 2]
    G = build(2, 2, [(0, 1)], [0, 1])
    assert apply_adjacency(G, np.array([1.0, -1.0])).tolist() == [0, 0]
    with pytest.raises(PreconditionError):
        apply_adjacency(G, np.ones(3))


def test_apply_adjacency_sum(lps_13_17):
    v = np.random.default_rng(0).standard_normal(lps_13_17.n)
    assert math.isclose(apply_adjacency(lps_13_17, v).sum(), lps_13_17.d * v.sum(), rel_tol=1e-10, abs_tol=1e-9)


def test_adjacency_matrix_loops():
    G = build(2, 2, [(0, 1)], [0, 1])
    assert adjacency_matrix(G).tolist() == [[1, 1], [1, 1]]


@pytest.mark.parametrize("method", ["dense", "iterative"])
def test_small_graph_values(method, k6, petersen, c8):
    assert max_nontrivial_abs_eig(k6, method=method).value == pytest.approx(1, abs=1e-7)
    assert max_nontrivial_abs_eig(petersen, method=method).value == pytest.approx(2, abs=1e-7)
    # C_8 is bipartite: -2 is a nontrivial eigenvalue under the two-sided definition
    assert max_nontrivial_abs_eig(c8, method=method).value == pytest.approx(2, abs=1e-7)


def test_dense_matches_oracle(petersen, lps_13_17):
    for G in (petersen, lps_13_17, from_networkx(nx.random_regular_graph(5, 50, seed=1))):
        assert max_nontrivial_abs_eig(G, method="dense").value == pytest.approx(nx_lambda(G), abs=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_dense_and_iterative_agree(seed):
    G = from_networkx(nx.random_regular_graph(4, 300, seed=seed))
    a = max_nontrivial_abs_eig(G, method="dense")
    b = max_nontrivial_abs_eig(G, method="iterative")
    assert abs(a.value - b.value) < 1e-6


def test_witness_properties(lps_13_17):
    for method in ("dense", "iterative"):
        e = max_nontrivial_abs_eig(lps_13_17, method=method)
        f = e.vector
        assert abs(f.sum()) < 1e-10 * math.sqrt(len(f))
        assert np.linalg.norm(f) == pytest.approx(1.0)
        r = np.linalg.norm(apply_adjacency(lps_13_17, f) - e.eigenvalue * f)
        assert r <= 1e-8 * lps_13_17.d


def test_seed_stability(lps_5_29):
    a = max_nontrivial_abs_eig(lps_5_29, seed=0).value
    b = max_nontrivial_abs_eig(lps_5_29, seed=1).value
    assert abs(a - b) < 1e-8


def test_lps_13_17_ramanujan(lps_13_17):
    e = max_nontrivial_abs_eig(lps_13_17)
    assert e.method == "dense-exact"
    assert e.value <= 2 * math.sqrt(13) + 1e-9


def test_lanczos_fallback_when_power_stalls(lps_13_17):
    dense = max_nontrivial_abs_eig(lps_13_17, method="dense").value
    est = _iterative(lps_13_17, 1e-8, 5, 0)
    assert abs(est.value - dense) < 1e-6
    assert est.residual <= 1e-8


def test_convergence_error_carries_estimate(monkeypatch, lps_13_17):
    import expanders.spectral as sp

    def bad_lanczos(G, sign, tol, v0):
        return 0.0, v0 / np.linalg.norm(v0), 1.0, 1

    monkeypatch.setattr(sp, "_lanczos", bad_lanczos)
    with pytest.raises(ConvergenceError) as e:
        max_nontrivial_abs_eig(lps_13_17, method="iterative", max_iter=3)
    assert e.value.residual == 1.0 and e.value.iterations > 3


def test_unknown_method(petersen):
    with pytest.raises(PreconditionError):
        max_nontrivial_abs_eig(petersen, method="magic")


def test_bound_values():
    assert bound_value("ramanujan", 6) == pytest.approx(2 * math.sqrt(5))
    assert bound_value("thm12", 15, p=13, r_new=52, m=2448) == pytest.approx(
        math.sqrt(28) + math.sqrt(13) + 52 / 2448 * 15
    )
    assert bound_value("thm12", 15, p=13, r_new=52, m=2448) == pytest.approx(9.2157, abs=1e-4)
    assert bound_value("pack-union", 20, primes=[17], pairs=1, involutions=0) == pytest.approx(10.246211, abs=1e-6)
    assert bound_value("trim", 6, lambda_base=4.4, r=2) == pytest.approx(4.9)
    with pytest.raises(PreconditionError):
        bound_value("nope", 3)


def test_certificate_json(lps_5_29):
    cert = certify(lps_5_29, "ramanujan")
    assert cert.passed and cert.heuristic and cert.method == "iterative"
    assert cert.bound_value == pytest.approx(4.4721, abs=1e-4)
    text = cert.to_json()
    keys = list(json.loads(text).keys())
    assert keys == ["n", "d", "lambda", "method", "residual", "iterations", "bound_kind", "bound_value", "verdict", "heuristic"]
    assert format(cert.lambda_, ".17g") in text
    assert SpectralCertificate.from_json(text) == cert


def test_certify_dense_and_fail(petersen, c8):
    cert = certify(petersen, "ramanujan")
    assert cert.method == "dense-exact" and not cert.heuristic and cert.passed
    assert certify(c8, "ramanujan").passed  # 2 <= 2
    bad = certify(petersen, "trim", lambda_base=0.5, r=2)
    assert bad.verdict == "fail"


def test_certify_pack_bound():
    from expanders.constructions import pack_cayley

    c = pack_cayley(20, q=13)
    cert = certify(c.graph, c.bound_kind, **c.bound_params)
    assert cert.bound_value == pytest.approx(2 * math.sqrt(17) + 2)
    assert cert.passed


# ---------------------------------------------------------------- delocalization


def test_constant_vector_profile(lps_5_29):
    G = lps_5_29
    u, v = 0, int(G.table[0][0])
    prof = delocalization_profile(G, (u, v), 3, np.ones(G.n), float(G.d))
    ratios = [s / prof.sums[0] for s in prof.sums]
    assert ratios == [float((G.d - 1) ** i) for i in range(4)]
    assert prof.ok and prof.first_step_ok


def test_profile_rejects_non_eigenvector(lps_5_29):
    f = np.zeros(lps_5_29.n)
    f[5000] = 1.0
    with pytest.raises(PreconditionError):
        delocalization_profile(lps_5_29, (0, int(lps_5_29.table[0][0])), 1, f, 6.0)


def test_profile_rejects_cycles(petersen):
    with pytest.raises(PreconditionError):
        delocalization_profile(petersen, (0, 1), 2, np.ones(10), 3.0)


def test_profile_rejects_non_edge(lps_5_29):
    with pytest.raises(PreconditionError):
        delocalization_profile(lps_5_29, (0, 0), 1, np.ones(lps_5_29.n), 6.0)


def test_profile_on_imbalanced_graph():
    # two copies of LPS(5, 29) joined by a 2-edge swap; second eigenvalue close to d
    from expanders.random_graphs import joined_copies

    H = build_lps(5, 29)
    J = joined_copies(H)
    e = max_nontrivial_abs_eig(J, method="iterative")
    assert e.eigenvalue >= 2 * math.sqrt(J.d - 1)
    for u in (0, 777, 12180 + 5):
        v = int(J.table[u][-1])
        prof = delocalization_profile(J, (u, v), 3, e.vector, e.eigenvalue)
        assert prof.applies and prof.ok, prof


# ---------------------------------------------------------------- union rule


def test_union_with_itself_doubles(petersen):
    U = graph_union([petersen, petersen])
    assert max_nontrivial_abs_eig(U).value == pytest.approx(4.0)


def test_union_with_edgeless(petersen):
    E = MultiGraph(np.zeros((10, 0), dtype=np.int64))
    rep = union_bound_check([petersen, E])
    assert rep.lambda_union == pytest.approx(2.0) and rep.ok


def test_union_of_lps_blocks():
    A, B = build_lps(5, 29), build_lps(13, 29)
    rep = union_bound_check([A, B])
    assert rep.ok
    assert rep.lambda_union <= 2 * math.sqrt(5) + 2 * math.sqrt(13) + 1e-6


def test_union_requires_same_n(petersen, k6):
    with pytest.raises(PreconditionError):
        graph_union([petersen, k6])
