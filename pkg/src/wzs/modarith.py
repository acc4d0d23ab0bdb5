"""Residue arithmetic groundwork: factorization, CRT, units, power residues.

Everything is exact integer arithmetic.  Moduli are capped by a configurable
trial-division bound (default 10**6); nothing here needs probabilistic
primality or big-number factoring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

DEFAULT_BOUND = 10**6


@lru_cache(maxsize=8)
def _sieve_primes(limit: int) -> tuple[int, ...]:
    """Primes up to `limit` by sieve of Eratosthenes."""
    if limit < 2:
        return ()
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(flags[p * p :: p]))
    return tuple(i for i, f in enumerate(flags) if f)


@dataclass(frozen=True)
class ModulusProfile:
    """A modulus with its factorization split by prime residue class mod 3.

    n1 collects the prime powers p^e with p = 1 (mod 3) and n2 those with odd
    p = 2 (mod 3).  Powers of 2 and 3 land in three_part so that the
    closed-form evaluators can refuse them explicitly instead of silently
    misclassifying.
    """

    n: int
    factors: tuple[tuple[int, int], ...]
    n1: int
    n2: int
    three_part: int
    big_omega_n1: int
    big_omega_n2: int
    small_omega_n1: int
    small_omega_n2: int

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self.factors)

    @property
    def small_omega(self) -> int:
        return len(self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def prime_powers(self) -> list[int]:
        return [p**e for p, e in self.factors]

    def primes_n1(self) -> list[int]:
        return sorted(p for p, _ in self.factors if p % 3 == 1)

    def primes_n2(self) -> list[int]:
        return sorted(p for p, _ in self.factors if p % 3 == 2 and p != 2)

    def divisors(self) -> list[int]:
        ds = [1]
        for p, e in self.factors:
            ds = [d * p**k for d in ds for k in range(e + 1)]
        return sorted(ds)


@lru_cache(maxsize=4096)
def factor(n: int, bound: int = DEFAULT_BOUND) -> ModulusProfile:
    """Factor n by trial division and split the primes by class mod 3."""
    if not 1 <= n <= bound:
        raise ValueError(f"modulus {n} outside supported range [1, {bound}]")
    factors: list[tuple[int, int]] = []
    rest = n
    for p in _sieve_primes(math.isqrt(n) + 1):
        if p * p > rest:
            break
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            factors.append((p, e))
    if rest > 1:
        factors.append((rest, 1))
    factors.sort()

    n1 = n2 = three_part = 1
    bo1 = bo2 = so1 = so2 = 0
    for p, e in factors:
        if p in (2, 3):
            three_part *= p**e
        elif p % 3 == 1:
            n1 *= p**e
            bo1 += e
            so1 += 1
        else:
            n2 *= p**e
            bo2 += e
            so2 += 1
    return ModulusProfile(
        n=n,
        factors=tuple(factors),
        n1=n1,
        n2=n2,
        three_part=three_part,
        big_omega_n1=bo1,
        big_omega_n2=bo2,
        small_omega_n1=so1,
        small_omega_n2=so2,
    )


def units(m: int) -> set[int]:
    """The unit residues mod m; the trivial modulus 1 yields {0}."""
    if m < 1:
        raise ValueError("modulus must be positive")
    if m == 1:
        return {0}
    return {x for x in range(1, m) if math.gcd(x, m) == 1}


@lru_cache(maxsize=None)
def _power_values(k: int, q: int) -> frozenset[int]:
    # Exhaustive k-th powers mod q, including non-units.
    return frozenset(pow(x, k, q) for x in range(q))


def is_kth_power_residue(a: int, k: int, m: int) -> bool:
    """Whether x**k = a (mod m) has a solution.

    Decided prime power by prime power and combined: solvable mod m exactly
    when solvable mod every maximal prime-power divisor.  Each component is
    settled by exhaustive enumeration of k-th powers.
    """
    if m < 1:
        raise ValueError("modulus must be positive")
    if k < 1:
        raise ValueError("exponent must be positive")
    if not 0 <= a < m:
        raise ValueError(f"residue {a} not in [0, {m - 1}]")
    if m == 1:
        return True
    return all(a % q in _power_values(k, q) for q in factor(m).prime_powers())


def crt_combine(parts: list[tuple[int, int]]) -> int:
    """Combine (residue, modulus) pairs with pairwise coprime moduli.

    Returns the unique residue mod the product congruent to every part.
    """
    r_acc, m_acc = 0, 1
    for r, m in parts:
        if m < 1:
            raise ValueError("moduli must be positive")
        if not 0 <= r < m:
            raise ValueError(f"residue {r} not in [0, {m - 1}]")
        g = math.gcd(m_acc, m)
        if g != 1:
            raise ValueError(f"moduli not pairwise coprime (gcd {g})")
        if m > 1:
            step = (r - r_acc) * pow(m_acc, -1, m) % m
            r_acc += m_acc * step
        m_acc *= m
    return r_acc % m_acc


def crt_split(r: int, moduli: list[int]) -> list[tuple[int, int]]:
    """Project a residue onto each modulus; inverse of crt_combine."""
    return [(r % m, m) for m in moduli]
