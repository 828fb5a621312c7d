"""Cayley graphs H(p, m) of quaternions over Z_m modulo scalars.

Q(m) is the group of quaternions x0 + x1 i + x2 j + x3 k over Z_m whose norm
is a unit square, modulo unit scalars.  By the Chinese remainder theorem
Q(m) splits as a product over the prime-power factors q^e of m, and all
computation here is done per factor.  A class is represented canonically by
reducing modulo each q^e and scaling so that the first coordinate not
divisible by q equals 1.

Vertices of Q(m) are numbered in mixed radix: the class with component
indices (i_1, ..., i_k) gets index ((i_1 * N_2) + i_2) * N_3 + ..., where
component classes are sorted lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .cayley_lps import cayley_graph
from .errors import ConstructionError, PreconditionError
from .graph_core import MultiGraph, is_bipartite, is_connected
from .number_theory import crt_idempotents, crt_join, factorize, four_square_reps, legendre

Factors = tuple[tuple[int, int], ...]


def _factors(m) -> Factors:
    """Normalise an int or ((q, e), ...) to a validated factorization."""
    if isinstance(m, int):
        f = factorize(m)
    else:
        f = tuple(sorted((int(q), int(e)) for q, e in m))
    if not f or any(q == 2 for q, _ in f):
        raise PreconditionError(f"modulus must be odd and > 1, got {m}")
    if any(e < 1 for _, e in f) or len({q for q, _ in f}) != len(f):
        raise PreconditionError(f"bad factorization {m}")
    if len(f) > 2:
        raise PreconditionError("moduli with more than two distinct prime factors are not supported")
    return f


def _modulus(f: Factors) -> int:
    return prod(q**e for q, e in f)


@dataclass(frozen=True)
class QuatClass:
    """Canonical representative of a class in Q(m)."""

    x0: int
    x1: int
    x2: int
    x3: int
    m: int

    @property
    def coords(self) -> tuple[int, int, int, int]:
        return (self.x0, self.x1, self.x2, self.x3)


def quat_mul(a: Sequence[int], b: Sequence[int], m: int) -> tuple[int, int, int, int]:
    """Hamilton product modulo m."""
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        (a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3) % m,
        (a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2) % m,
        (a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1) % m,
        (a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0) % m,
    )


def _quat_mul_rows(x: np.ndarray, g: Sequence[int], m: int) -> np.ndarray:
    """Hamilton product of each row of x by the fixed quaternion g, modulo m."""
    b0, b1, b2, b3 = (int(v) % m for v in g)
    x0, x1, x2, x3 = x[:, 0], x[:, 1], x[:, 2], x[:, 3]
    return np.column_stack([
        x0 * b0 - x1 * b1 - x2 * b2 - x3 * b3,
        x0 * b1 + x1 * b0 + x2 * b3 - x3 * b2,
        x0 * b2 - x1 * b3 + x2 * b0 + x3 * b1,
        x0 * b3 + x1 * b2 - x2 * b1 + x3 * b0,
    ]) % m


def norm(x: Sequence[int], m: int) -> int:
    return sum(v * v for v in x) % m


def _is_square_unit(value: int, f: Factors) -> bool:
    # a unit mod q^e is a square iff it is a square mod q (Hensel)
    return all(legendre(value, q) == 1 for q, _ in f)


def _canon_component(x: Sequence[int], q: int, e: int) -> tuple[int, int, int, int]:
    M = q**e
    x = [v % M for v in x]
    for v in x:
        if v % q:
            s = pow(v, -1, M)
            return tuple(w * s % M for w in x)
    raise PreconditionError("norm is not a unit")


def canonicalize(x: Sequence[int], m) -> QuatClass:
    """Canonical representative of the scalar class of x in Q(m)."""
    f = _factors(m)
    mm = _modulus(f)
    if not _is_square_unit(norm(x, mm), f):
        raise PreconditionError(f"norm of {tuple(x)} is not a unit square mod {mm}")
    comps = [_canon_component(x, q, e) for q, e in f]
    moduli = [q**e for q, e in f]
    coords = tuple(crt_join([c[k] for c in comps], moduli) for k in range(4))
    return QuatClass(*coords, mm)


def q_size(q1: int, q2: int, s: int, t: int) -> int:
    """Number of vertices of H(p, q1^s q2^t)."""
    if s < 1 or t < 1:
        raise PreconditionError("exponents must be >= 1")
    return q1 ** (3 * (s - 1)) * q2 ** (3 * (t - 1)) * (q1 * (q1 - 1) * (q1 + 1) // 2) * (q2 * (q2 - 1) * (q2 + 1) // 2)


def class_count(m) -> int:
    """|Q(m)| for a modulus with one or two prime factors."""
    return prod(q ** (3 * (e - 1)) * (q * (q * q - 1) // 2) for q, e in _factors(m))


def choose_exponents(n: int, q1: int, q2: int) -> tuple[int, int]:
    """(s, t) minimising q_size(q1, q2, s, t) subject to q_size >= n; ties go to smaller s."""
    best = None
    s = 1
    while True:
        t = 1
        while q_size(q1, q2, s, t) < n:
            t += 1
        cand = (q_size(q1, q2, s, t), s, t)
        if best is None or cand < best:
            best = cand
        if q_size(q1, q2, s, 1) >= n:
            break
        s += 1
    return best[1], best[2]


@lru_cache(maxsize=64)
def _component_classes(q: int, e: int) -> np.ndarray:
    """Sorted (N, 4) array of canonical classes of Q(q^e)."""
    M = q**e
    mult = np.arange(0, M, q, dtype=np.int64)
    full = np.arange(M, dtype=np.int64)
    squares = np.zeros(q, dtype=bool)
    squares[(np.arange(1, q) ** 2) % q] = True
    blocks = []
    for k in range(4):
        axes = [mult] * k + [np.array([1], dtype=np.int64)] + [full] * (3 - k)
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 4)
        nrm = (grid * grid).sum(axis=1) % q
        blocks.append(grid[squares[nrm]])
    out = np.concatenate(blocks)
    out = out[np.lexsort(out.T[::-1])]
    expected = q ** (3 * (e - 1)) * (q * (q * q - 1) // 2)
    if len(out) != expected:
        raise ConstructionError(f"enumerated {len(out)} classes mod {q}^{e}, expected {expected}")
    out.flags.writeable = False
    return out


def _codes(x: np.ndarray, M: int) -> np.ndarray:
    return ((x[:, 0] * M + x[:, 1]) * M + x[:, 2]) * M + x[:, 3]


def _canon_rows(x: np.ndarray, q: int, M: int) -> np.ndarray:
    x = x % M
    unit = (x % q) != 0
    if not unit.any(axis=1).all():
        raise ConstructionError("non-unit norm encountered")
    lead = x[np.arange(len(x)), np.argmax(unit, axis=1)]
    uniq, where = np.unique(lead, return_inverse=True)
    inv = np.array([pow(int(v), -1, M) for v in uniq], dtype=np.int64)
    return x * inv[where.ravel()][:, None] % M


class _Component:
    def __init__(self, q: int, e: int):
        self.q, self.e, self.M = q, e, q**e
        self.classes = _component_classes(q, e)
        self.codes = _codes(self.classes, self.M)

    def index(self, canon: np.ndarray) -> np.ndarray:
        codes = _codes(canon, self.M)
        pos = np.searchsorted(self.codes, codes)
        if (pos >= len(self.codes)).any() or (self.codes[np.minimum(pos, len(self.codes) - 1)] != codes).any():
            raise ConstructionError("product left the class set")
        return pos

    def right_mul_map(self, g: Sequence[int]) -> np.ndarray:
        prod_ = _quat_mul_rows(self.classes, g, self.M)
        return self.index(_canon_rows(prod_, self.q, self.M))


class QuaternionGroup:
    """Q(m) with the mixed-radix numbering described in the module docstring."""

    def __init__(self, m):
        self.factors = _factors(m)
        self.m = _modulus(self.factors)
        self.components = [_Component(q, e) for q, e in self.factors]
        self.sizes = [len(c.classes) for c in self.components]
        self.order = prod(self.sizes)
        self._moduli = [c.M for c in self.components]

    def _split_index(self, i: int) -> list[int]:
        out = []
        for n_c in reversed(self.sizes):
            i, r = divmod(i, n_c)
            out.append(r)
        return out[::-1]

    def element(self, i: int) -> QuatClass:
        if not 0 <= i < self.order:
            raise PreconditionError(f"index {i} outside [0, {self.order})")
        parts = [c.classes[j] for c, j in zip(self.components, self._split_index(i))]
        coords = tuple(crt_join([int(p[k]) for p in parts], self._moduli) for k in range(4))
        return QuatClass(*coords, self.m)

    def index(self, x) -> int:
        coords = x.coords if isinstance(x, QuatClass) else tuple(x)
        i = 0
        for c, n_c in zip(self.components, self.sizes):
            comp = _canon_component(coords, c.q, c.e)
            i = i * n_c + int(c.index(np.array([comp], dtype=np.int64))[0])
        return i

    @cached_property
    def elements(self) -> np.ndarray:
        """(order, 4) array of canonical tuples mod m, in index order."""
        idem = crt_idempotents(self._moduli)
        grids = np.meshgrid(*[np.arange(s) for s in self.sizes], indexing="ij")
        out = np.zeros((self.order, 4), dtype=np.int64)
        for c, e_c, g in zip(self.components, idem, grids):
            out += c.classes[g.ravel()] * e_c
        out %= self.m
        out.flags.writeable = False
        return out

    def identity(self) -> QuatClass:
        return canonicalize((1, 0, 0, 0), self.factors)

    def mul(self, x, y) -> QuatClass:
        return canonicalize(quat_mul(_coords(x), _coords(y), self.m), self.factors)

    def inv(self, x) -> QuatClass:
        a, b, c, d = _coords(x)
        return canonicalize((a, -b, -c, -d), self.factors)

    def is_involution(self, x) -> bool:
        return self.mul(x, x) == self.identity()

    def involution(self) -> QuatClass:
        """The class of i = (0, 1, 0, 0); i^2 = -1 is a scalar."""
        return canonicalize((0, 1, 0, 0), self.factors)

    def right_mul_map(self, g) -> np.ndarray:
        """Index of x*g for every class x, in index order."""
        g = _coords(g)
        maps = [c.right_mul_map(g) for c in self.components]
        out = maps[0]
        for mp, n_c in zip(maps[1:], self.sizes[1:]):
            out = (out[:, None] * n_c + mp[None, :]).ravel()
        return out


def _coords(x) -> tuple[int, int, int, int]:
    return x.coords if isinstance(x, QuatClass) else tuple(int(v) for v in x)


def enumerate_classes(m) -> list[QuatClass]:
    """All classes of Q(m) in index order."""
    G = QuaternionGroup(m)
    return [QuatClass(*row, G.m) for row in G.elements.tolist()]


def brute_force_class_count(m: int) -> tuple[int, int]:
    """Oracle for |Q(m)| by scanning all m^4 tuples (m <= 200).

    Returns ``(valid // phi(m), orbits)``: the number of tuples with unit
    square norm divided by the number of unit scalars, and the number of
    distinct scalar orbits, each orbit labelled by its lexicographically
    smallest member.  Shares no code with the canonical-form path.
    """
    if m > 200:
        raise PreconditionError("brute force is limited to m <= 200")
    primes = [q for q, _ in _factors(m)]
    r = np.arange(m, dtype=np.int64)
    good = np.ones(m, dtype=bool)
    for q in primes:
        qs = np.zeros(q, dtype=bool)
        qs[(np.arange(1, q) ** 2) % q] = True
        good &= qs[r % q]
    units = np.array([u for u in range(1, m) if all(u % q for q in primes)], dtype=np.int64)
    s2 = r * r % m
    tail = (s2[:, None, None] + s2[None, :, None] + s2[None, None, :]) % m  # x1, x2, x3
    grid = np.stack(np.meshgrid(r, r, r, indexing="ij"), axis=-1).reshape(-1, 3)
    valid = 0
    labels = []
    for x0 in range(m):
        mask = good[(s2[x0] + tail) % m].ravel()
        cnt = int(mask.sum())
        if not cnt:
            continue
        valid += cnt
        rows = np.column_stack([np.full(cnt, x0, dtype=np.int64), grid[mask]])
        best = None
        for u in units:
            c = _codes(rows * u % m, m)
            best = c if best is None else np.minimum(best, c)
        labels.append(np.unique(best))
    orbits = len(np.unique(np.concatenate(labels))) if labels else 0
    return valid // len(units), orbits


def partial_numbering_size(m) -> int:
    f = _factors(m)
    rad = prod(q for q, _ in f)
    return (_modulus(f) // rad) ** 3


class PartialNumbering:
    """Lexicographic numbering of the classes (1, x1, x2, x3) with x_i divisible by every prime of m.

    Each such tuple is already canonical (its first coordinate is 1 modulo
    every prime power) and has norm 1 mod each prime, so it is a vertex.
    """

    def __init__(self, m):
        self.factors = _factors(m)
        self.m = _modulus(self.factors)
        self.rad = prod(q for q, _ in self.factors)
        self.base = self.m // self.rad

    def __len__(self) -> int:
        return self.base**3

    def tuple_of(self, i: int) -> tuple[int, int, int, int]:
        if not 0 <= i < len(self):
            raise PreconditionError(f"number {i} outside [0, {len(self)})")
        b = self.base
        a1, rest = divmod(i, b * b)
        a2, a3 = divmod(rest, b)
        return (1, a1 * self.rad, a2 * self.rad, a3 * self.rad)

    def number_of(self, x: Sequence[int]) -> int | None:
        x0, x1, x2, x3 = (int(v) % self.m for v in x)
        if x0 != 1 or x1 % self.rad or x2 % self.rad or x3 % self.rad:
            return None
        b = self.base
        return ((x1 // self.rad) * b + x2 // self.rad) * b + x3 // self.rad

    def vertices(self, group: "QuaternionGroup", count: int | None = None) -> np.ndarray:
        """Group indices of the first ``count`` numbered classes."""
        count = len(self) if count is None else count
        return np.array([group.index(self.tuple_of(i)) for i in range(count)], dtype=np.int64)


def partial_numbering(m) -> PartialNumbering:
    return PartialNumbering(m)


def check_quaternion_parameters(p: int, m) -> Factors:
    f = _factors(m)
    if p % 4 != 1:
        raise PreconditionError(f"p={p} is not congruent to 1 mod 4")
    for q, _ in f:
        if q == p:
            raise PreconditionError(f"p={p} divides m")
        if legendre(p, q) != 1:
            raise PreconditionError(f"p={p} is not a square mod {q}")
    return f


def quaternion_generators(p: int, m) -> list[QuatClass]:
    """Classes of a0 + a1 i + a2 j + a3 k for the p+1 four-square representations of p."""
    f = check_quaternion_parameters(p, m)
    return [canonicalize(rep.coords, f) for rep in four_square_reps(p)]


def build_quaternion(p: int, m) -> MultiGraph:
    """H(p, m): the (p+1)-regular Cayley graph of Q(m), vertices in mixed-radix order."""
    gens = quaternion_generators(p, m)
    group = QuaternionGroup(m)
    G = cayley_graph(group, gens)
    if not is_connected(G):
        raise ConstructionError(f"H({p}, {group.m}) is disconnected")
    if is_bipartite(G):
        raise ConstructionError(f"H({p}, {group.m}) is bipartite")
    return G
