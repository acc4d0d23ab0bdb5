"""Extremal sequences: canonical forms under the orbit action, exhaustive
enumeration of classes, recursive construction, and structure classification.

Two sequences are in the same orbit when one is a uniform unit multiple of a
per-term weight rescaling of the other, up to permutation; zero-sum-freeness
is an orbit invariant, so one canonical representative per class suffices.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .errors import ContractError, HypothesisError, TheoremViolation
from .modarith import ModulusProfile, crt_combine, factor, units
from .weightsets import WeightSet, coset_minima, cubes, reduced_alphabet
from .invariants import (
    Budget,
    SearchStats,
    davenport_formula,
    davenport_search,
    theorem_hypothesis_failure,
)
from .zerosum import Sequence, has_weighted_zero_subseq


@dataclass(frozen=True)
class CanonicalSequence:
    """A sequence with its canonical orbit representative.

    orbit_size counts the distinct coset-normalized forms the unit scaling
    produces; canonical is the lexicographically least of them.
    """

    base: Sequence
    orbit_size: int
    canonical: Sequence


@dataclass(frozen=True)
class StructureReport:
    """Recursive decomposition of an extremal sequence.

    case1 strips a prime p of n1 leaving two p-coprime terms whose mod-p image
    pair is itself zero-sum-free; case2 strips a prime of n2 leaving one
    coprime term; base is an undecomposed prime (or trivial) level.  When
    several primes qualify, all are recorded and the first is expanded.
    """

    modulus: int
    case: str
    p: int | None
    coprime_terms: tuple[int, ...]
    remainder: Sequence | None
    child: StructureReport | None
    qualifying: tuple[tuple[str, int], ...]

    def to_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "case": self.case,
            "p": self.p,
            "coprime_terms": list(self.coprime_terms),
            "remainder": list(self.remainder.terms) if self.remainder is not None else None,
            "child": self.child.to_dict() if self.child is not None else None,
            "qualifying": [list(q) for q in self.qualifying],
        }


@dataclass(frozen=True)
class ExtremalClasses:
    classes: tuple[CanonicalSequence, ...]
    complete: bool
    d_value: int
    stats: SearchStats


def _require_subgroup(weights: WeightSet) -> None:
    if not weights.is_subgroup:
        raise HypothesisError(
            "weight set is a subgroup of the units",
            f"kind={weights.kind}, n={weights.modulus}",
        )


def canonicalize(seq: Sequence, weights: WeightSet) -> CanonicalSequence:
    """Least orbit element: coset-normalize each term, minimize over scalings."""
    if weights.modulus != seq.modulus:
        raise ValueError("weight set modulus does not match sequence")
    _require_subgroup(weights)
    n = seq.modulus
    rep = coset_minima(weights)
    candidates = {
        tuple(sorted(rep[c * x % n] for x in seq.terms)) for c in units(n)
    }
    return CanonicalSequence(
        base=seq,
        orbit_size=len(candidates),
        canonical=Sequence(n, min(candidates)),
    )


def equivalent(s: Sequence, t: Sequence, weights: WeightSet) -> bool:
    """Whether two sequences lie in the same orbit."""
    if s.modulus != t.modulus:
        raise ValueError("sequences live over different moduli")
    if len(s) != len(t):
        return False
    return canonicalize(s, weights).canonical == canonicalize(t, weights).canonical


def enumerate_extremal(
    n: int,
    weights: WeightSet,
    budget: Budget | None = None,
    d_value: int | None = None,
) -> ExtremalClasses:
    """All canonical classes of zero-sum-free sequences of length D - 1.

    D comes from the closed form when its hypotheses hold, else from a
    conclusive search; enumeration walks the orbit-reduced space and dedupes
    by canonical form.
    """
    if weights.modulus != n:
        raise ValueError("weight set modulus does not match n")
    _require_subgroup(weights)
    budget = budget or Budget()
    if d_value is None:
        if weights.kind == "cubes" and theorem_hypothesis_failure(factor(n)) is None:
            d_value = davenport_formula(factor(n)).value
        else:
            res = davenport_search(n, weights, budget)
            if not res.conclusive:
                raise HypothesisError("D_A(n) known", "search was inconclusive")
            d_value = res.value
    target = d_value - 1

    t0 = time.perf_counter()
    deadline = t0 + budget.max_seconds
    full = (1 << n) - 1
    firsts, alphabet = reduced_alphabet(weights)
    shifts = {x: sorted({a * x % n for a in weights.elements}) for x in alphabet}
    found: dict[tuple[int, ...], CanonicalSequence] = {}
    nodes = 0
    complete = True

    def extend(mask: int, x: int) -> int:
        m = mask | 1
        new = mask
        for s in shifts[x]:
            new |= ((m << s) | (m >> (n - s))) & full if s else m
        return new

    def rec(terms: tuple[int, ...], mask: int, lo: int) -> None:
        nonlocal nodes, complete
        if not complete:
            return
        if len(terms) == target:
            canon = canonicalize(Sequence(n, terms), weights)
            found.setdefault(canon.canonical.terms, canon)
            return
        for i in range(lo, len(alphabet)):
            nodes += 1
            if nodes > budget.max_nodes or (
                nodes % 4096 == 0 and time.perf_counter() > deadline
            ):
                complete = False
                return
            x = alphabet[i]
            new = extend(mask, x)
            if new & 1:
                continue
            rec(terms + (x,), new, i)

    if target == 0:
        found[()] = canonicalize(Sequence(n, ()), weights)
    else:
        for first in firsts:
            nodes += 1
            mask = extend(0, first)
            if not mask & 1:
                rec((first,), mask, alphabet.index(first))
            if not complete:
                break

    classes = tuple(found[key] for key in sorted(found))
    stats = SearchStats(nodes=nodes, wall_time=time.perf_counter() - t0)
    return ExtremalClasses(classes=classes, complete=complete, d_value=d_value, stats=stats)


def _least_non_cube(p: int) -> int:
    cube_set = cubes(p)
    for x in range(2, p):
        if x not in cube_set:
            return x
    raise ContractError(f"no non-cube unit mod {p}")


def _construct_terms(n: int) -> list[int]:
    if n == 1:
        return []
    p = max(q for q, _ in factor(n).factors)
    sub = n // p
    rest = [p * x for x in _construct_terms(sub)]
    if p % 3 == 1:
        x_star = crt_combine([(1, p), (0, sub)])
        x_dstar = crt_combine([(_least_non_cube(p), p), (0, sub)])
        return [x_star, x_dstar] + rest
    x_star = crt_combine([(1, p), (0, sub)])
    return [x_star] + rest


def construct_extremal(profile: ModulusProfile) -> Sequence:
    """Build an extremal sequence recursively, largest prime first.

    Strips the largest prime p: a zero-sum-free unit pair (images 1 and the
    least non-cube mod p, both 0 mod n/p) when the cube subgroup mod p is
    proper, a single unit lift otherwise; the recursive tail is multiplied by
    p.  The output is re-verified before being returned.
    """
    failure = theorem_hypothesis_failure(profile)
    if failure:
        raise HypothesisError(failure, f"n = {profile.n}")
    n = profile.n
    seq = Sequence.make(n, _construct_terms(n))
    expected = 2 * profile.big_omega_n1 + profile.big_omega_n2
    if len(seq) != expected:
        raise ContractError(f"construction length {len(seq)} != {expected} for n={n}")
    if n >= 2 and has_weighted_zero_subseq(seq, cubes(n)) is not None:
        raise ContractError(f"constructed sequence is not zero-sum-free: {seq}")
    return seq


def _classify(seq: Sequence, profile: ModulusProfile) -> StructureReport:
    n = profile.n
    if len(profile.factors) <= 1:
        return StructureReport(
            modulus=n,
            case="base",
            p=n if len(profile.factors) == 1 else None,
            coprime_terms=seq.terms,
            remainder=None,
            child=None,
            qualifying=(),
        )

    def coprime_terms(q: int) -> tuple[int, ...]:
        return tuple(t for t in seq.terms if t % q != 0)

    qualifying: list[tuple[str, int]] = []
    for p in profile.primes_n1():
        cnt = len(coprime_terms(p))
        if cnt < 2:
            raise TheoremViolation(
                "extremal sequence has fewer than two terms coprime to a prime of n1",
                {"n": n, "p": p, "terms": list(seq.terms)},
            )
        if cnt == 2:
            qualifying.append(("case1", p))
    for q in profile.primes_n2():
        cnt = len(coprime_terms(q))
        if cnt < 1:
            raise TheoremViolation(
                "extremal sequence has no term coprime to a prime of n2",
                {"n": n, "q": q, "terms": list(seq.terms)},
            )
        if cnt == 1:
            qualifying.append(("case2", q))
    if not qualifying:
        raise TheoremViolation(
            "no prime divisor qualifies for decomposition",
            {"n": n, "terms": list(seq.terms)},
        )

    case, p = qualifying[0]
    coprime = coprime_terms(p)
    divided = tuple(t // p for t in seq.terms if t % p == 0)
    sub_n = n // p
    sub_profile = factor(sub_n)
    remainder = Sequence.make(sub_n, divided)

    if case == "case1":
        image = Sequence.make(p, (t % p for t in coprime))
        if has_weighted_zero_subseq(image, cubes(p)) is not None:
            raise TheoremViolation(
                "coprime pair image admits a weighted zero-sum",
                {"n": n, "p": p, "pair": list(coprime)},
            )

    sub_d = davenport_formula(sub_profile).value
    if len(remainder) != sub_d - 1:
        raise TheoremViolation(
            "divided remainder does not have extremal length",
            {"n": n, "p": p, "remainder": list(remainder.terms), "expected": sub_d - 1},
        )
    if has_weighted_zero_subseq(remainder, cubes(sub_n)) is not None:
        raise TheoremViolation(
            "divided remainder is not zero-sum-free",
            {"n": n, "p": p, "remainder": list(remainder.terms)},
        )
    child = _classify(remainder, sub_profile)
    return StructureReport(
        modulus=n,
        case=case,
        p=p,
        coprime_terms=coprime,
        remainder=remainder,
        child=child,
        qualifying=tuple(qualifying),
    )


def classify_structure(seq: Sequence, profile: ModulusProfile) -> StructureReport:
    """Decompose a verified extremal sequence per the structure result.

    Extremality is enforced here (length D - 1 and zero-sum-free by the DP
    check), never trusted from the caller; a sequence that then fails to
    decompose raises TheoremViolation with a full dump.
    """
    failure = theorem_hypothesis_failure(profile)
    if failure:
        raise HypothesisError(failure, f"n = {profile.n}")
    if profile.n != seq.modulus:
        raise ValueError("profile does not match sequence modulus")
    d = davenport_formula(profile).value
    if len(seq) != d - 1:
        raise HypothesisError(
            "sequence is extremal", f"length {len(seq)} != D - 1 = {d - 1}"
        )
    if profile.n >= 2 and has_weighted_zero_subseq(seq, cubes(profile.n)) is not None:
        raise HypothesisError(
            "sequence is extremal", "it has a weighted zero-sum subsequence"
        )
    return _classify(seq, profile)


def reconstruct(report: StructureReport) -> Sequence:
    """Rebuild the sequence a StructureReport describes."""
    if report.case == "base":
        return Sequence.make(report.modulus, report.coprime_terms)
    child_seq = reconstruct(report.child)
    terms = list(report.coprime_terms) + [report.p * y for y in child_seq.terms]
    return Sequence.make(report.modulus, terms)


def orbit_transform(seq: Sequence, weights: WeightSet, rng) -> Sequence:
    """A random element of the orbit: uniform unit scaling times per-term
    weights (the permutation is absorbed by sorted storage)."""
    _require_subgroup(weights)
    n = seq.modulus
    unit_pool = sorted(units(n))
    c = unit_pool[rng.randrange(len(unit_pool))]
    elems = weights.elements
    terms = [c * elems[rng.randrange(len(elems))] * x % n for x in seq.terms]
    return Sequence.make(n, terms)


def coprimality_violating_sequence(
    profile: ModulusProfile, rng, prime: int | None = None
) -> Sequence:
    """A length-(D-1) sequence violating the coprimality minima on purpose.

    For a chosen prime of n1 at most one term is left coprime; for a prime of
    n2 none is.  Such sequences must always contain a weighted zero-sum
    subsequence.
    """
    failure = theorem_hypothesis_failure(profile)
    if failure:
        raise HypothesisError(failure, f"n = {profile.n}")
    n = profile.n
    length = 2 * profile.big_omega_n1 + profile.big_omega_n2
    pool_n1, pool_n2 = profile.primes_n1(), profile.primes_n2()
    if prime is None:
        pool = pool_n1 + pool_n2
        if not pool:
            raise HypothesisError("n has an odd prime divisor", f"n = {n}")
        prime = pool[rng.randrange(len(pool))]
    coprime_quota = rng.randrange(2) if prime in pool_n1 else 0
    terms = []
    for _ in range(coprime_quota):
        t = rng.randrange(n)
        while t % prime == 0:
            t = rng.randrange(n)
        terms.append(t)
    while len(terms) < length:
        terms.append(prime * rng.randrange(n // prime))
    return Sequence.make(n, terms)
