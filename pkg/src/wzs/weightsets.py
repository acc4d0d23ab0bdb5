"""Weight sets A in [1, n-1]: cubes and squares of units, units, {+-1}, {1}.

A weight set is materialized eagerly as a sorted tuple plus a frozenset for
O(1) membership; moduli are desk scale, so memory is a non-issue and the
dynamic programming inner loops want fast iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .modarith import factor, units

KINDS = ("cubes", "squares", "units", "pm_one", "singleton_one", "custom")


@dataclass(frozen=True)
class WeightSet:
    modulus: int
    elements: tuple[int, ...]
    kind: str
    is_subgroup: bool
    members: frozenset[int] = field(repr=False, compare=False, default=frozenset())

    def __contains__(self, x: int) -> bool:
        return x in self.members

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def to_dict(self) -> dict:
        return {
            "n": self.modulus,
            "kind": self.kind,
            "elements": list(self.elements),
            "is_subgroup": self.is_subgroup,
        }


def _closed_under_multiplication(elems: frozenset[int], n: int) -> bool:
    return all(a * b % n in elems for a in elems for b in elems)


def _make(n: int, elems: set[int], kind: str) -> WeightSet:
    if n < 2:
        raise ValueError("weight sets need modulus >= 2")
    if not elems:
        raise ValueError("weight set must be nonempty")
    bad = [x for x in elems if not 1 <= x <= n - 1]
    if bad:
        raise ValueError(f"weights {sorted(bad)} outside [1, {n - 1}]")
    members = frozenset(elems)
    is_subgroup = 1 in members and _closed_under_multiplication(members, n)
    return WeightSet(
        modulus=n,
        elements=tuple(sorted(elems)),
        kind=kind,
        is_subgroup=is_subgroup,
        members=members,
    )


def cubes(n: int) -> WeightSet:
    """Cubes of the units mod n; equals the full unit group when every odd
    prime factor is 2 mod 3."""
    return _make(n, {pow(a, 3, n) for a in units(n)}, "cubes")


def squares(n: int) -> WeightSet:
    """Squares of the units mod n."""
    return _make(n, {pow(a, 2, n) for a in units(n)}, "squares")


def units_weights(n: int) -> WeightSet:
    """The full unit group as a weight set."""
    return _make(n, units(n), "units")


def pm_one(n: int) -> WeightSet:
    """{1, n-1}; collapses to {1} when n = 2."""
    return _make(n, {1, n - 1}, "pm_one")


def singleton_one(n: int) -> WeightSet:
    """{1}: plain (unweighted) zero-sums."""
    return _make(n, {1}, "singleton_one")


def custom(n: int, elems: list[int]) -> WeightSet:
    """A user-supplied weight set; deduplicates and sorts."""
    return _make(n, set(elems), "custom")


_FACTORIES = {
    "cubes": cubes,
    "squares": squares,
    "units": units_weights,
    "pm_one": pm_one,
    "singleton_one": singleton_one,
}


def by_kind(kind: str, n: int, elems: list[int] | None = None) -> WeightSet:
    """Construct a weight set from its kind tag (CLI aliases accepted)."""
    alias = {"pm1": "pm_one", "one": "singleton_one"}.get(kind, kind)
    if alias == "custom":
        if not elems:
            raise ValueError("custom weight set needs explicit elements")
        return custom(n, elems)
    if alias not in _FACTORIES:
        raise ValueError(f"unknown weight kind {kind!r}")
    return _FACTORIES[alias](n)


def project(a: WeightSet, m: int) -> WeightSet:
    """Image of a weight set under reduction mod a divisor m of its modulus.

    Unit-based kinds always project onto the corresponding set mod m; for
    custom sets an element reducing to 0 has no meaning as a weight, so the
    projection is refused.
    """
    n = a.modulus
    if m < 2:
        raise ValueError("projection target must be >= 2")
    if n % m != 0:
        raise ValueError(f"{m} does not divide {n}")
    images = {x % m for x in a.elements}
    if 0 in images:
        raise ValueError(f"projection of {a.kind} set mod {m} hits 0; not a weight set")
    return _make(m, images, a.kind)


def coset_minima(a: WeightSet) -> list[int]:
    """rep[x] = min of the multiplicative coset A*x mod n, with rep[0] = 0.

    Only meaningful when A is a subgroup (the cosets partition Z_n); used for
    orbit-pruned search and canonical forms.
    """
    n = a.modulus
    rep = list(range(n))
    for x in range(1, n):
        best = x
        for w in a.elements:
            v = w * x % n
            if v < best:
                best = v
        rep[x] = best
    return rep


def reduced_alphabet(a: WeightSet) -> tuple[list[int], list[int]]:
    """(first symbols, alphabet) for enumerating multisets up to equivalence.

    For subgroup weight sets every nonzero residue is replaced by its
    coset-minimal representative, and the uniform unit scaling lets the
    minimum term be anchored to a divisor of n (divisors are coset-minimal
    because 1 is a weight).  Non-subgroup sets get no reduction.
    """
    n = a.modulus
    if a.is_subgroup:
        rep = coset_minima(a)
        symbols = sorted({rep[x] for x in range(1, n)})
        firsts = [d for d in factor(n).divisors() if d < n]
        missing = set(firsts) - set(symbols)
        if missing:
            raise RuntimeError(f"divisor anchors {missing} not coset-minimal")
        return firsts, symbols
    symbols = list(range(1, n))
    return list(symbols), symbols
