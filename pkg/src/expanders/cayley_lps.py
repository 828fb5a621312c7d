"""LPS Ramanujan graphs as Cayley graphs of PSL(2, F_q).

Vertices are numbered as follows.  Matrices with a11 != 0 come first,
normalised to 1 <= a11 <= (q-1)/2 and ordered lexicographically by
(a11, a12, a21); a22 is then forced by the determinant.  The q(q-1)/2
matrices with a11 == 0 follow, normalised to 1 <= a12 <= (q-1)/2 and ordered
by (a12, a22), with a21 = -1/a12.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConstructionError, PreconditionError
from .graph_core import MultiGraph, is_bipartite, is_connected
from .number_theory import four_square_reps, is_prime, legendre, lps_size, sqrt_mod


@dataclass(frozen=True)
class ProjMat:
    """A canonical representative of an element of PSL(2, F_q)."""

    a11: int
    a12: int
    a21: int
    a22: int
    q: int

    def __post_init__(self):
        q = self.q
        if (self.a11 * self.a22 - self.a12 * self.a21) % q != 1:
            raise PreconditionError(f"{self.entries} does not have determinant 1 mod {q}")
        h = (q - 1) // 2
        lead = self.a11 if self.a11 else self.a12
        if not 1 <= lead <= h:
            raise PreconditionError(f"{self.entries} is not in canonical sign form")

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a11, self.a12, self.a21, self.a22)

    def __matmul__(self, other: "ProjMat") -> "ProjMat":
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return canonical(((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h)), self.q)

    def inverse(self) -> "ProjMat":
        a, b, c, d = self.entries
        return canonical(((d, -b), (-c, a)), self.q)

    def is_identity(self) -> bool:
        return self.entries == (1, 0, 0, 1)

    def is_involution(self) -> bool:
        """True when the square is the identity (this includes the identity itself)."""
        return (self @ self).is_identity()


def canonical(m, q: int) -> ProjMat:
    """The one of {m, -m} satisfying the sign convention.  ``m`` is ((a11, a12), (a21, a22))."""
    (a, b), (c, d) = m
    a, b, c, d = a % q, b % q, c % q, d % q
    if (a * d - b * c) % q != 1:
        raise PreconditionError(f"matrix {((a, b), (c, d))} does not have determinant 1 mod {q}")
    h = (q - 1) // 2
    if (a and a > h) or (a == 0 and b > h):
        a, b, c, d = (-a) % q, (-b) % q, (-c) % q, (-d) % q
    return ProjMat(a, b, c, d, q)


def _check_q(q: int) -> None:
    if q < 3 or not is_prime(q):
        raise PreconditionError(f"{q} is not an odd prime")


def index_of(M: ProjMat) -> int:
    q = M.q
    if M.a11:
        return (M.a11 - 1) * q * q + M.a12 * q + M.a21
    return (q - 1) // 2 * q * q + (M.a12 - 1) * q + M.a22


def mat_of_index(i: int, q: int) -> ProjMat:
    _check_q(q)
    if not 0 <= i < lps_size(q):
        raise PreconditionError(f"index {i} outside [0, {lps_size(q)})")
    a, b, c, d = (int(v) for v in _entries_of_indices(np.array([i]), q)[0])
    return ProjMat(a, b, c, d, q)


def _entries_of_indices(idx: np.ndarray, q: int) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    inv = _inverse_table(q)
    head = (q - 1) // 2 * q * q
    out = np.empty((idx.size, 4), dtype=np.int64)
    top = idx < head
    i = idx[top]
    a11 = i // (q * q) + 1
    a12 = (i // q) % q
    a21 = i % q
    out[top, 0] = a11
    out[top, 1] = a12
    out[top, 2] = a21
    out[top, 3] = (1 + a12 * a21) % q * inv[a11] % q
    j = idx[~top] - head
    a12 = j // q + 1
    out[~top, 0] = 0
    out[~top, 1] = a12
    out[~top, 2] = (-inv[a12]) % q
    out[~top, 3] = j % q
    return out


def _indices_of_entries(e: np.ndarray, q: int) -> np.ndarray:
    """Index of each row of (unnormalised, det 1) entries, after sign canonicalisation."""
    e = e % q
    h = (q - 1) // 2
    flip = (e[:, 0] > h) | ((e[:, 0] == 0) & (e[:, 1] > h))
    e = np.where(flip[:, None], (-e) % q, e)
    head = h * q * q
    return np.where(
        e[:, 0] != 0,
        (e[:, 0] - 1) * q * q + e[:, 1] * q + e[:, 2],
        head + (e[:, 1] - 1) * q + e[:, 3],
    )


def _inverse_table(q: int) -> np.ndarray:
    inv = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        inv[a] = pow(a, -1, q)
    return inv


class PSL2:
    """PSL(2, F_q) with the numbering above; used as the vertex group of Cayley graphs."""

    def __init__(self, q: int):
        _check_q(q)
        self.q = q
        self.order = lps_size(q)

    @cached_property
    def elements(self) -> np.ndarray:
        """(order, 4) array of canonical entries (a11, a12, a21, a22) in index order."""
        e = _entries_of_indices(np.arange(self.order), self.q)
        e.flags.writeable = False
        return e

    def element(self, i: int) -> ProjMat:
        return mat_of_index(i, self.q)

    def index(self, x: ProjMat) -> int:
        return index_of(x)

    def identity(self) -> ProjMat:
        return ProjMat(1, 0, 0, 1, self.q)

    def mul(self, x: ProjMat, y: ProjMat) -> ProjMat:
        return x @ y

    def inv(self, x: ProjMat) -> ProjMat:
        return x.inverse()

    def is_involution(self, x: ProjMat) -> bool:
        return x.is_involution()

    def involution(self) -> ProjMat:
        """The matrix with rows (0, 1) and (-1, 0)."""
        return canonical(((0, 1), (-1, 0)), self.q)

    def right_mul_map(self, g: ProjMat) -> np.ndarray:
        """Index of x*g for every element x, in index order."""
        x = self.elements
        e, f, gg, h = g.entries
        prod = np.column_stack([
            x[:, 0] * e + x[:, 1] * gg,
            x[:, 0] * f + x[:, 1] * h,
            x[:, 2] * e + x[:, 3] * gg,
            x[:, 2] * f + x[:, 3] * h,
        ])
        return _indices_of_entries(prod, self.q)


def cayley_graph(group, generators) -> MultiGraph:
    """Cayley graph x ~ x*g over an inverse-closed generator multiset."""
    if not generators:
        return MultiGraph(np.zeros((group.order, 0), dtype=np.int64))
    table = np.column_stack([group.right_mul_map(g) for g in generators])
    return MultiGraph.from_target_table(table)


def check_lps_parameters(p: int, q: int) -> None:
    for name, v in (("p", p), ("q", q)):
        if not is_prime(v) or v % 4 != 1:
            raise PreconditionError(f"{name}={v} is not a prime congruent to 1 mod 4")
    if p == q:
        raise PreconditionError("p and q must differ")
    if legendre(p, q) != 1:
        raise PreconditionError(f"legendre({p}, {q}) = -1: p is not a quadratic residue mod q")


def lps_generators(p: int, q: int) -> list[ProjMat]:
    """The p+1 LPS generators of PSL(2, F_q), from the four-square representations of p."""
    check_lps_parameters(p, q)
    iota = sqrt_mod(q - 1, q)
    s_inv = pow(sqrt_mod(p, q), -1, q)
    gens = []
    for rep in four_square_reps(p):
        a0, a1, a2, a3 = rep.coords
        m = (
            (s_inv * (a0 + iota * a1), s_inv * (a2 + iota * a3)),
            (s_inv * (-a2 + iota * a3), s_inv * (a0 - iota * a1)),
        )
        gens.append(canonical(m, q))
    if len(set(gens)) != p + 1:
        raise ConstructionError(f"LPS generators for p={p}, q={q} are not distinct")
    gen_set = set(gens)
    if any(g.inverse() not in gen_set for g in gens):
        raise ConstructionError("LPS generator set is not closed under inverse")
    return gens


def build_lps(p: int, q: int) -> MultiGraph:
    """The (p+1)-regular LPS graph on PSL(2, F_q), vertices numbered by ``index_of``."""
    gens = lps_generators(p, q)
    if any(g.is_identity() for g in gens):
        raise ConstructionError("identity among LPS generators")
    G = cayley_graph(PSL2(q), gens)
    if p < q and not G.is_simple():
        raise ConstructionError(f"LPS({p}, {q}) has parallel edges")
    if not is_connected(G):
        raise ConstructionError(f"LPS({p}, {q}) is disconnected")
    if is_bipartite(G):
        raise ConstructionError(f"LPS({p}, {q}) is bipartite")
    return G
