"""Nontrivial spectral radius of regular multigraphs, certificates and delocalization profiles.

For a d-regular graph the all-ones vector is an eigenvector with eigenvalue
d.  The quantity of interest is

    lambda(G) = max |x^T A x|  over unit x orthogonal to the all-ones vector,

i.e. the largest absolute eigenvalue once one copy of d is removed.  A
bipartite graph therefore has lambda = d.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .errors import ConvergenceError, PreconditionError
from .graph_core import MultiGraph, bfs_layers, ball, cycle_rank

DENSE_THRESHOLD = 4096
DEFAULT_TOL = 1e-8
MAX_ITER = 100_000

# Certification tolerance by method, added to the bound before comparing.
CERT_TOL = {"dense-exact": 1e-9, "iterative": 1e-6}

BOUND_KINDS = ("ramanujan", "thm12", "pack-union", "trim")


def apply_adjacency(G: MultiGraph, v: np.ndarray) -> np.ndarray:
    """A v, where a loop contributes its vertex's own value once."""
    v = np.asarray(v, dtype=float)
    if v.shape[0] != G.n:
        raise PreconditionError(f"vector has length {v.shape[0]}, graph has {G.n} vertices")
    return v[G.table].sum(axis=1)


def adjacency_matrix(G: MultiGraph) -> np.ndarray:
    """Dense adjacency matrix (multiplicities on the off-diagonal, loop counts on the diagonal)."""
    A = np.zeros((G.n, G.n))
    np.add.at(A, (np.repeat(np.arange(G.n), G.d), G.table.ravel()), 1.0)
    return A


@dataclass
class EigenEstimate:
    """Result of ``max_nontrivial_abs_eig``."""

    value: float
    vector: np.ndarray = field(repr=False)
    eigenvalue: float  # signed eigenvalue attaining the value
    method: str
    residual: float  # ||A f - mu f|| / d for the unit witness f
    iterations: int
    lambda_plus: float  # largest nontrivial eigenvalue
    lambda_minus: float  # smallest nontrivial eigenvalue


def _dense(G: MultiGraph) -> EigenEstimate:
    n, d = G.n, G.d
    A = adjacency_matrix(G)
    # Householder reflection H with H e_1 = ones/sqrt(n); columns 1.. of H span ones^perp.
    u = np.full(n, -1.0 / math.sqrt(n))
    u[0] += 1.0
    beta = 2.0 / (u @ u)
    Au = A @ u
    HAH = A - beta * np.outer(u, Au) - beta * np.outer(Au, u) + beta * beta * (u @ Au) * np.outer(u, u)
    vals, vecs = np.linalg.eigh(HAH[1:, 1:])
    k = int(np.argmax(np.abs(vals)))
    y = np.concatenate([[0.0], vecs[:, k]])
    f = y - beta * u * (u @ y)
    mu = float(vals[k])
    res = float(np.linalg.norm(apply_adjacency(G, f) - mu * f)) / max(d, 1)
    return EigenEstimate(
        value=abs(mu), vector=f, eigenvalue=mu, method="dense-exact", residual=res,
        iterations=0, lambda_plus=float(vals[-1]), lambda_minus=float(vals[0]),
    )


def _power(G: MultiGraph, sign: int, tol: float, max_iter: int, rng) -> tuple[float, np.ndarray, float, int]:
    """Top eigenpair of d*I + sign*A on ones^perp, returned as an eigenpair of A."""
    d = G.d
    v = rng.standard_normal(G.n)
    v -= v.mean()
    v /= np.linalg.norm(v)
    rq_old = None
    res = math.inf
    rq = 0.0
    for it in range(1, max_iter + 1):
        w = d * v + sign * apply_adjacency(G, v)
        w -= w.mean()
        rq = float(v @ w)
        res = float(np.linalg.norm(w - rq * v))
        norm = np.linalg.norm(w)
        if norm == 0.0:
            # v lies in the kernel, so d*I + sign*A vanishes on ones^perp
            return sign * (rq - d), v, 0.0, it
        converged = (
            rq_old is not None
            and abs(rq - rq_old) <= tol * max(abs(rq), 1.0)
            and res <= tol * d
        )
        if converged:
            return sign * (rq - d), v, res, it
        rq_old = rq
        v = w / norm
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps",
        estimate=sign * (rq - d), residual=res, iterations=max_iter,
    )


def _lanczos(G: MultiGraph, sign: int, tol: float, v0: np.ndarray) -> tuple[float, np.ndarray, float, int]:
    """Extreme eigenpair of sign*A on ones^perp by implicitly restarted Lanczos (ARPACK).

    The all-ones direction is sent to -2d so it can never be the answer.
    """
    n, d = G.n, G.d
    counter = [0]

    def mv(x):
        counter[0] += 1
        x = np.ravel(x)
        return sign * apply_adjacency(G, x) - 2.0 * d * x.mean() * np.ones(n) - sign * d * x.mean() * np.ones(n)

    op = LinearOperator((n, n), matvec=mv, dtype=float)
    v0 = v0 - v0.mean()
    vals, vecs = eigsh(op, k=1, which="LA", v0=v0, tol=tol * 1e-2, ncv=min(n - 1, 64), maxiter=max(1000, n))
    f = vecs[:, 0] - vecs[:, 0].mean()
    f /= np.linalg.norm(f)
    mu = float(f @ apply_adjacency(G, f))
    res = float(np.linalg.norm(apply_adjacency(G, f) - mu * f))
    return mu, f, res, counter[0]


def _iterative(G: MultiGraph, tol: float, max_iter: int, seed: int) -> EigenEstimate:
    rng = np.random.default_rng(seed)

    def solve(sign):
        try:
            return _power(G, sign, tol, max_iter, rng)
        except ConvergenceError as err:
            # Power iteration stalls when the top of the spectrum is nearly degenerate;
            # restart from a fresh seeded vector with Lanczos, which resolves clusters.
            mu, f, res, its = _lanczos(G, sign, tol, rng.standard_normal(G.n))
            if res > tol * G.d:
                raise ConvergenceError(
                    f"iterative solver did not reach residual {tol * G.d:.3g} (got {res:.3g})",
                    estimate=mu, residual=res, iterations=err.iterations + its,
                ) from err
            return mu, f, res, err.iterations + its

    lp, fp, rp, ip = solve(+1)
    lm, fm, rm, im = solve(-1)
    if lp >= -lm:
        value, mu, f, res = lp, lp, fp, rp
    else:
        value, mu, f, res = -lm, lm, fm, rm
    return EigenEstimate(
        value=abs(value), vector=f, eigenvalue=mu, method="iterative", residual=res / max(G.d, 1),
        iterations=ip + im, lambda_plus=lp, lambda_minus=lm,
    )


def max_nontrivial_abs_eig(
    G: MultiGraph,
    tol: float = DEFAULT_TOL,
    method: str = "auto",
    dense_threshold: int = DENSE_THRESHOLD,
    seed: int = 0,
    max_iter: int = MAX_ITER,
) -> EigenEstimate:
    """Largest |eigenvalue| of A on the complement of the all-ones vector.

    ``method="auto"`` uses a full symmetric eigendecomposition when
    ``G.n <= dense_threshold`` and deflated power iteration on d*I + A and
    d*I - A otherwise.
    """
    if G.n < 2:
        raise PreconditionError("need at least two vertices")
    if method == "auto":
        method = "dense" if G.n <= dense_threshold else "iterative"
    if method == "dense":
        return _dense(G)
    if method == "iterative":
        return _iterative(G, tol, max_iter, seed)
    raise PreconditionError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Certificates


def bound_value(kind: str, d: int, **params) -> float:
    """Threshold for each bound kind.

    ramanujan   2 sqrt(d - 1)
    thm12       sqrt(2p + 2) + sqrt(p) + (r_new / m)(p + 2)        params p, r_new, m
    pack-union  sum 2 sqrt(p_i) + 2 * pairs + involutions           params primes, pairs, involutions
    trim        lambda_base + 1 / r                                 params lambda_base, r
    """
    if kind == "ramanujan":
        return 2.0 * math.sqrt(d - 1)
    if kind == "thm12":
        p, r_new, m = params["p"], params.get("r_new", 0), params["m"]
        return math.sqrt(2 * p + 2) + math.sqrt(p) + (r_new / m) * (p + 2)
    if kind == "pack-union":
        return (
            sum(2.0 * math.sqrt(p) for p in params["primes"])
            + 2.0 * params.get("pairs", 0)
            + 1.0 * params.get("involutions", 0)
        )
    if kind == "trim":
        return float(params["lambda_base"]) + 1.0 / params["r"]
    raise PreconditionError(f"unknown bound kind {kind!r}; expected one of {BOUND_KINDS}")


@dataclass
class SpectralCertificate:
    n: int
    d: int
    lambda_: float
    method: str
    residual: float
    iterations: int
    bound_kind: str
    bound_value: float
    verdict: str
    heuristic: bool

    def to_json(self) -> str:
        """One JSON object, keys in field order, floats at 17 significant digits."""
        parts = []
        for f in fields(self):
            key = "lambda" if f.name == "lambda_" else f.name
            val = getattr(self, f.name)
            if isinstance(val, bool):
                txt = "true" if val else "false"
            elif isinstance(val, float):
                txt = format(val, ".17g") if math.isfinite(val) else json.dumps(None)
            else:
                txt = json.dumps(val)
            parts.append(f"{json.dumps(key)}: {txt}")
        return "{" + ", ".join(parts) + "}"

    @classmethod
    def from_json(cls, text: str) -> "SpectralCertificate":
        data = json.loads(text)
        data["lambda_"] = data.pop("lambda")
        return cls(**data)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def certify(
    G: MultiGraph,
    bound_kind: str,
    tol: float = DEFAULT_TOL,
    method: str = "auto",
    cert_tol: float | None = None,
    seed: int = 0,
    **params,
) -> SpectralCertificate:
    """Measure lambda(G) and compare it with the threshold of ``bound_kind``.

    Dense certificates are exact up to floating point; iterative ones are
    flagged heuristic because power iteration only proves a lower bound on
    lambda.
    """
    bound = bound_value(bound_kind, G.d, **params)
    est = max_nontrivial_abs_eig(G, tol=tol, method=method, seed=seed)
    slack = CERT_TOL[est.method] if cert_tol is None else cert_tol
    return SpectralCertificate(
        n=G.n,
        d=G.d,
        lambda_=est.value,
        method=est.method,
        residual=est.residual,
        iterations=est.iterations,
        bound_kind=bound_kind,
        bound_value=bound,
        verdict="pass" if est.value <= bound + slack else "fail",
        heuristic=est.method != "dense-exact",
    )


# ---------------------------------------------------------------------------
# Delocalization


@dataclass
class DelocalizationProfile:
    sums: list[float]  # S_i = sum of f^2 over vertices at distance exactly i from the edge
    mu: float
    residual: float
    slack: float
    applies: bool  # mu >= 2 sqrt(d - 1), so the monotonicity claim is in force
    violations: list[int]  # layers i with S_i < S_{i-1} - slack
    first_step_ok: bool  # S_1 >= (3d - 4)/d * S_0 - slack

    @property
    def ok(self) -> bool:
        return not self.applies or (not self.violations and self.first_step_ok)


def delocalization_profile(
    G: MultiGraph,
    edge: tuple[int, int],
    r: int,
    f: np.ndarray,
    mu: float,
    max_residual: float = 1e-6,
) -> DelocalizationProfile:
    """Mass of f^2 on the BFS layers around a tree-like edge neighbourhood.

    Requires the r-ball of ``edge`` to be cycle-free and f to be an
    eigenvector for mu up to ``max_residual`` (relative to ||f||).
    """
    u, v = edge
    if v not in G.rows[u]:
        raise PreconditionError(f"({u}, {v}) is not an edge")
    B = ball(G, (u, v), r)
    if cycle_rank(B) != 0:
        raise PreconditionError(f"the {r}-ball of edge ({u}, {v}) contains a cycle")
    f = np.asarray(f, dtype=float)
    fnorm2 = float(f @ f)
    if fnorm2 == 0.0:
        raise PreconditionError("f is the zero vector")
    res = float(np.linalg.norm(apply_adjacency(G, f) - mu * f)) / math.sqrt(fnorm2)
    if res > max_residual:
        raise PreconditionError(f"f is not an eigenvector for mu={mu} (relative residual {res:.3g})")
    _, layers = bfs_layers(G.rows, [u, v], r)
    sq = f * f
    sums = [float(sq[layer].sum()) for layer in layers]
    slack = 10.0 * res * fnorm2
    d = G.d
    applies = mu >= 2.0 * math.sqrt(d - 1)
    violations = [i for i in range(1, len(sums)) if sums[i] < sums[i - 1] - slack]
    first = len(sums) < 2 or sums[1] >= (3 * d - 4) / d * sums[0] - slack
    return DelocalizationProfile(
        sums=sums, mu=mu, residual=res, slack=slack, applies=applies,
        violations=violations if applies else [], first_step_ok=first if applies else True,
    )


# ---------------------------------------------------------------------------
# Union rule


def graph_union(graphs: Sequence[MultiGraph]) -> MultiGraph:
    """Edge-multiset union of regular graphs on a shared vertex set."""
    ns = {g.n for g in graphs}
    if len(ns) != 1:
        raise PreconditionError(f"graphs have different vertex counts {sorted(ns)}")
    return MultiGraph(np.concatenate([g.table for g in graphs], axis=1), check=False)


@dataclass
class UnionBoundReport:
    lambdas: list[float]
    lambda_union: float
    bound: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.lambda_union <= self.bound + self.tolerance


def union_bound_check(graphs: Sequence[MultiGraph], tolerance: float = 1e-6, **solver) -> UnionBoundReport:
    """Check lambda(G_1 + ... + G_k) <= lambda(G_1) + ... + lambda(G_k)."""
    U = graph_union(graphs)
    lams = [max_nontrivial_abs_eig(g, **solver).value for g in graphs]
    lu = max_nontrivial_abs_eig(U, **solver).value
    return UnionBoundReport(lambdas=lams, lambda_union=lu, bound=float(sum(lams)), tolerance=tolerance)
