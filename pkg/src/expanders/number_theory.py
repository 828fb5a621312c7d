"""Number theory helpers: primes, quadratic residues, four-square representations, CRT."""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt, prod
from typing import Iterable, Sequence

from sympy import isprime as _sympy_isprime
from sympy.ntheory.residue_ntheory import sqrt_mod as _sympy_sqrt_mod

from .errors import ConstructionError, PreconditionError

# Upper end of the scan in find_qpair unless the caller raises it.
QPAIR_SEARCH_LIMIT = 10**8


@dataclass(frozen=True, order=True)
class FourSquareRep:
    """A solution of a0^2 + a1^2 + a2^2 + a3^2 = p with a0 odd positive, a1..a3 even."""

    a0: int
    a1: int
    a2: int
    a3: int
    p: int

    def __post_init__(self):
        if self.a0 <= 0 or self.a0 % 2 == 0:
            raise PreconditionError(f"a0 must be odd and positive, got {self.a0}")
        if any(a % 2 for a in (self.a1, self.a2, self.a3)):
            raise PreconditionError("a1, a2, a3 must be even")
        if self.a0**2 + self.a1**2 + self.a2**2 + self.a3**2 != self.p:
            raise PreconditionError(f"{self.coords} is not a representation of {self.p}")

    @property
    def coords(self) -> tuple[int, int, int, int]:
        return (self.a0, self.a1, self.a2, self.a3)

    def conjugate(self) -> "FourSquareRep":
        return FourSquareRep(self.a0, -self.a1, -self.a2, -self.a3, self.p)


def is_prime(n: int) -> bool:
    """Deterministic primality test for non-negative integers."""
    return n >= 2 and bool(_sympy_isprime(n))


def largest_prime_1mod4_leq(x: int) -> int | None:
    """Largest prime p <= x with p = 1 (mod 4), or None when x < 5."""
    c = x - ((x - 1) % 4)
    while c >= 5:
        if is_prime(c):
            return c
        c -= 4
    return None


def _require_odd_prime(q: int) -> None:
    if q < 3 or not is_prime(q):
        raise PreconditionError(f"{q} is not an odd prime")


def legendre(a: int, q: int) -> int:
    """Legendre symbol (a/q) by Euler's criterion."""
    _require_odd_prime(q)
    t = pow(a % q, (q - 1) // 2, q)
    return -1 if t == q - 1 else t


def sqrt_mod(a: int, q: int) -> int:
    """Smaller square root of the quadratic residue a modulo the odd prime q."""
    _require_odd_prime(q)
    a %= q
    if a == 0:
        return 0
    if legendre(a, q) != 1:
        raise PreconditionError(f"{a} is not a quadratic residue mod {q}")
    s = _sympy_sqrt_mod(a, q)
    return min(s, q - s)


def four_square_reps(p: int) -> list[FourSquareRep]:
    """All p+1 representations of p as a0^2+a1^2+a2^2+a3^2, a0 odd positive, others even.

    Returned in lexicographic order of (a0, a1, a2, a3).
    """
    if p % 4 != 1 or not is_prime(p):
        raise PreconditionError(f"{p} is not a prime congruent to 1 mod 4")
    out = []
    bound = isqrt(p)
    evens = [v for v in range(-bound, bound + 1) if v % 2 == 0]
    for a0 in range(1, bound + 1, 2):
        r0 = p - a0 * a0
        for a1 in evens:
            r1 = r0 - a1 * a1
            if r1 < 0:
                continue
            for a2 in evens:
                r2 = r1 - a2 * a2
                if r2 < 0:
                    continue
                a3 = isqrt(r2)
                if a3 * a3 != r2 or a3 % 2:
                    continue
                out.append(FourSquareRep(a0, a1, a2, -a3, p))
                if a3:
                    out.append(FourSquareRep(a0, a1, a2, a3, p))
    out.sort()
    if len(out) != p + 1:
        raise ConstructionError(f"found {len(out)} four-square representations of {p}, expected {p + 1}")
    return out


def lps_size(q: int) -> int:
    """Order of PSL(2, F_q)."""
    return q * (q * q - 1) // 2


def find_q_lps(p: int, n_cap: int) -> int | None:
    """Largest prime q = 1 (mod 4), q != p, with (p/q) = 1 and q(q^2-1)/2 <= n_cap."""
    q = 1
    while lps_size(q + 1) <= n_cap:
        q += 1
    q -= (q - 1) % 4
    while q >= 5:
        if q != p and is_prime(q) and legendre(p, q) == 1:
            return q
        q -= 4
    return None


def find_qpair(p_list: Iterable[int], limit: int = QPAIR_SEARCH_LIMIT) -> tuple[int, int]:
    """The two smallest primes q = 1 (mod 4 * prod(p_list)).

    Such q makes every p_i a quadratic residue (quadratic reciprocity with
    q = 1 mod 4 and q = 1 mod p_i).
    """
    primes = sorted(set(p_list))
    if not primes or any(p % 4 != 1 or not is_prime(p) for p in primes):
        raise PreconditionError(f"expected distinct primes = 1 mod 4, got {list(p_list)}")
    step = 4 * prod(primes)
    found = []
    q = 1 + step
    while len(found) < 2:
        if q > limit:
            raise PreconditionError(f"no prime pair = 1 mod {step} below {limit}")
        if is_prime(q):
            found.append(q)
        q += step
    return found[0], found[1]


def factorize(m: int) -> tuple[tuple[int, int], ...]:
    """Trial-division factorization as ((prime, exponent), ...), primes ascending."""
    if m < 1:
        raise PreconditionError(f"cannot factor {m}")
    out = []
    f = 2
    while f * f <= m:
        if m % f == 0:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            out.append((f, e))
        f += 1 if f == 2 else 2
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def crt_split(x: int, moduli: Sequence[int]) -> tuple[int, ...]:
    """Residues of x modulo each of the pairwise coprime moduli."""
    return tuple(x % mi for mi in moduli)


def crt_join(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Inverse of crt_split: the unique x mod prod(moduli) with the given residues."""
    m = prod(moduli)
    x = 0
    for r, mi in zip(residues, moduli):
        rest = m // mi
        x += r * rest * pow(rest, -1, mi)
    return x % m


def crt_idempotents(moduli: Sequence[int]) -> tuple[int, ...]:
    """e_i with e_i = 1 mod moduli[i] and 0 mod the others; x = sum r_i e_i (mod m)."""
    m = prod(moduli)
    return tuple((m // mi) * pow(m // mi, -1, mi) % m for mi in moduli)
