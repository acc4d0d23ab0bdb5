"""Weighted zero-sum decision core.

Reachable weighted sums are tracked as bitmasks (one bit per residue) with a
snapshot kept per term, so existence checks and certificate backtracking share
one dynamic programming pass.  Certificates name term indices and weights and
are always re-verified arithmetically before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import ContractError, HypothesisError, TheoremViolation
from .modarith import ModulusProfile, crt_combine, factor
from .weightsets import WeightSet, cubes


@dataclass(frozen=True)
class Sequence:
    """A finite multiset over Z_n, stored as a sorted tuple of residues."""

    modulus: int
    terms: tuple[int, ...]

    @classmethod
    def make(cls, n: int, terms) -> Sequence:
        ts = tuple(sorted(terms))
        if n < 1:
            raise ValueError("modulus must be positive")
        if any(not 0 <= t < n for t in ts):
            raise ValueError(f"terms must lie in [0, {n - 1}]")
        return cls(n, ts)

    def __len__(self) -> int:
        return len(self.terms)

    def multiplicity(self, g: int) -> int:
        return self.terms.count(g)

    def is_subsequence_of(self, other: Sequence) -> bool:
        if self.modulus != other.modulus:
            return False
        return all(self.multiplicity(g) <= other.multiplicity(g) for g in set(self.terms))

    def project(self, m: int) -> Sequence:
        """Image under the natural map Z_n -> Z_m for a divisor m."""
        if m < 1 or self.modulus % m != 0:
            raise ValueError(f"{m} does not divide {self.modulus}")
        return Sequence.make(m, (t % m for t in self.terms))


@dataclass(frozen=True)
class Certificate:
    """Chosen (term index, weight) pairs witnessing a weighted sum.

    Indices refer to the sorted term storage of the associated sequence.
    """

    picked: tuple[tuple[int, int], ...]
    claimed_sum: int

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.picked)

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(a for _, a in self.picked)

    def verify(self, seq: Sequence, weights: WeightSet) -> bool:
        if weights.modulus != seq.modulus:
            return False
        idxs = self.indices
        if len(set(idxs)) != len(idxs):
            return False
        if any(not 0 <= i < len(seq) for i in idxs):
            return False
        if any(a not in weights for a in self.weights):
            return False
        total = sum(a * seq.terms[i] for i, a in self.picked) % seq.modulus
        return total == self.claimed_sum % seq.modulus

    def to_dict(self) -> dict:
        return {
            "picked": [{"index": i, "weight": a} for i, a in self.picked],
            "sum": self.claimed_sum,
        }


@lru_cache(maxsize=512)
def _cubes_for(n: int) -> WeightSet:
    return cubes(n)


def _shift_table(terms, weights: WeightSet) -> list[list[int]]:
    n = weights.modulus
    cache: dict[int, list[int]] = {}
    out = []
    for x in terms:
        shs = cache.get(x)
        if shs is None:
            shs = sorted({a * x % n for a in weights.elements})
            cache[x] = shs
        out.append(shs)
    return out


def _subset_layers(seq: Sequence, weights: WeightSet) -> list[int]:
    """Bitmask per prefix of the sums of nonempty weighted subsequences."""
    n = seq.modulus
    full = (1 << n) - 1
    layers = [0]
    r = 0
    for shs in _shift_table(seq.terms, weights):
        m = r | 1
        new = r
        for s in shs:
            new |= ((m << s) | (m >> (n - s))) & full if s else m
        layers.append(new)
        r = new
    return layers


def _check_moduli(seq: Sequence, weights: WeightSet) -> None:
    if seq.modulus != weights.modulus:
        raise ValueError(
            f"sequence modulus {seq.modulus} != weight modulus {weights.modulus}"
        )


def reachable_sums(seq: Sequence, weights: WeightSet) -> set[int]:
    """All residues of the form sum(a_i * x_i) over nonempty subsequences."""
    _check_moduli(seq, weights)
    r = _subset_layers(seq, weights)[-1]
    return {t for t in range(seq.modulus) if r >> t & 1}


def _backtrack_subset(
    seq: Sequence, weights: WeightSet, layers: list[int], target: int
) -> Certificate:
    # Skip a term whenever the residual target survives without it (smallest
    # index set), then take the smallest usable weight.
    n = seq.modulus
    terms = seq.terms
    picked: list[tuple[int, int]] = []
    t = target
    j = len(terms)
    while True:
        if j > 0 and layers[j - 1] >> t & 1:
            j -= 1
            continue
        if j == 0:
            raise ContractError("certificate backtracking fell off the table")
        x = terms[j - 1]
        prev = layers[j - 1]
        stop = False
        for a in weights.elements:
            s = (t - a * x) % n
            if s == 0:
                picked.append((j - 1, a))
                stop = True
                break
            if prev >> s & 1:
                picked.append((j - 1, a))
                t = s
                j -= 1
                break
        else:
            raise ContractError("no weight reproduces a reachable DP state")
        if stop:
            break
    cert = Certificate(picked=tuple(sorted(picked)), claimed_sum=target)
    if not cert.verify(seq, weights):
        raise ContractError(f"backtracked certificate failed verification {cert}")
    return cert


def has_weighted_zero_subseq(seq: Sequence, weights: WeightSet) -> Certificate | None:
    """Certificate for a nonempty weighted zero-sum subsequence, if any."""
    _check_moduli(seq, weights)
    layers = _subset_layers(seq, weights)
    if not layers[-1] & 1:
        return None
    return _backtrack_subset(seq, weights, layers, 0)


def has_fixed_length_zero_subseq(
    seq: Sequence, weights: WeightSet, length: int, allow_empty: bool = False
) -> Certificate | None:
    """Certificate for a weighted zero-sum subsequence of exactly `length` terms.

    length above the sequence length yields None by contract.  length = 0 is
    None under the nonempty convention unless allow_empty opts in to the empty
    certificate.
    """
    _check_moduli(seq, weights)
    if length < 0 or length > len(seq):
        return None
    if length == 0:
        return Certificate(picked=(), claimed_sum=0) if allow_empty else None
    n = seq.modulus
    full = (1 << n) - 1
    shifts = _shift_table(seq.terms, weights)
    layers: list[list[int]] = [[1] + [0] * length]
    prev = layers[0]
    for j, shs in enumerate(shifts, start=1):
        cur = prev[:]
        top = min(j, length)
        for c in range(1, top + 1):
            src = prev[c - 1]
            if not src:
                continue
            acc = cur[c]
            for s in shs:
                acc |= ((src << s) | (src >> (n - s))) & full if s else src
            cur[c] = acc
        layers.append(cur)
        prev = cur
    if not layers[-1][length] & 1:
        return None

    terms = seq.terms
    picked: list[tuple[int, int]] = []
    t, c, j = 0, length, len(terms)
    while c > 0:
        if layers[j - 1][c] >> t & 1:
            j -= 1
            continue
        x = terms[j - 1]
        prev_row = layers[j - 1][c - 1]
        for a in weights.elements:
            s = (t - a * x) % n
            if prev_row >> s & 1:
                picked.append((j - 1, a))
                t, c, j = s, c - 1, j - 1
                break
        else:
            raise ContractError("fixed-length backtracking lost the DP trail")
    cert = Certificate(picked=tuple(sorted(picked)), claimed_sum=0)
    if not cert.verify(seq, weights):
        raise ContractError(f"fixed-length certificate failed verification {cert}")
    return cert


def full_zero_sum_weights(values, weights: WeightSet) -> list[int] | None:
    """Weights making the WHOLE value list sum to zero, or None.

    The values are taken in the order given (one weight per entry); this is
    the exhaustive stand-in for the unit-count existence guarantees.
    """
    n = weights.modulus
    vals = list(values)
    if any(not 0 <= v < n for v in vals):
        raise ValueError("values outside residue range")
    full = (1 << n) - 1
    layers = [1]
    cur = 1
    for shs in _shift_table(vals, weights):
        nxt = 0
        for s in shs:
            nxt |= ((cur << s) | (cur >> (n - s))) & full if s else cur
        layers.append(nxt)
        cur = nxt
    if not cur & 1:
        return None
    ws: list[int] = []
    t = 0
    for j in range(len(vals) - 1, -1, -1):
        x = vals[j]
        prev = layers[j]
        for a in weights.elements:
            s = (t - a * x) % n
            if prev >> s & 1:
                ws.append(a)
                t = s
                break
        else:
            raise ContractError("full-selection backtracking lost the DP trail")
    if t != 0:
        raise ContractError("full-selection backtracking ended off zero")
    return ws[::-1]


def crt_zero_check(seq: Sequence, profile: ModulusProfile) -> bool:
    """Whether the whole sequence is a cube-weighted zero-sum, componentwise.

    Checks each maximal prime-power projection for a full-selection weighted
    zero-sum; the conjunction equals the direct whole-sequence check over Z_n.
    """
    if profile.n != seq.modulus:
        raise ValueError("profile does not match sequence modulus")
    if profile.n == 1:
        return True
    for q in profile.prime_powers():
        proj = [t % q for t in seq.terms]
        if full_zero_sum_weights(proj, _cubes_for(q)) is None:
            return False
    return True


def _lift_weight(w: int, sub_n: int, weights: WeightSet) -> int:
    """Smallest member of the weight set reducing to w mod sub_n."""
    for a in weights.elements:
        if a % sub_n == w:
            return a
    raise ContractError(f"no lift of weight {w} from modulus {sub_n}")


def _choose_with_units(pairs, p: int, need: int, m: int) -> list[int]:
    # Positions of the first `need` units, padded in index order up to m.
    chosen: list[int] = []
    taken = set()
    for pos, (_, v) in enumerate(pairs):
        if len(chosen) == need:
            break
        if v % p != 0:
            chosen.append(pos)
            taken.add(pos)
    for pos in range(len(pairs)):
        if len(chosen) == m:
            break
        if pos not in taken:
            chosen.append(pos)
            taken.add(pos)
    return sorted(chosen)


def _extract(pairs: list[tuple[int, int]], n: int, m: int) -> list[tuple[int, int]]:
    """Recursive zero-sum extraction; returns (original index, weight) picks."""
    prof = factor(n)

    if len(prof.factors) == 1:
        p = n
        need = 3 if p % 3 == 1 else 2
        unit_count = sum(1 for _, v in pairs if v % p != 0)
        if unit_count >= need:
            chosen = _choose_with_units(pairs, p, need, m)
            weight_set = _cubes_for(p)
            ws = full_zero_sum_weights([pairs[pos][1] % p for pos in chosen], weight_set)
            if ws is None:
                raise TheoremViolation(
                    "unit-rich sequence admitted no full weighted zero-sum",
                    {"p": p, "pairs": pairs, "chosen": chosen},
                )
            return [(pairs[pos][0], a) for pos, a in zip(chosen, ws)]
        divisible = [pos for pos, (_, v) in enumerate(pairs) if v % p == 0]
        if len(divisible) < m:
            raise ContractError("too few p-divisible terms in base case")
        return [(pairs[pos][0], 1) for pos in divisible[:m]]

    def coprime_count(q: int) -> int:
        return sum(1 for _, v in pairs if v % q != 0)

    for p in prof.primes_n1():
        if coprime_count(p) <= 2:
            return _drop_and_recurse(pairs, n, m, p)
    for q in prof.primes_n2():
        if coprime_count(q) <= 1:
            return _drop_and_recurse(pairs, n, m, q)
    return _combine_by_crt(pairs, prof, m)


def _drop_and_recurse(pairs, n: int, m: int, p: int) -> list[tuple[int, int]]:
    sub_n = n // p
    sub = factor(sub_n)
    needed = m + 2 * sub.big_omega_n1 + sub.big_omega_n2
    keep = [(idx, v) for idx, v in pairs if v % p == 0]
    if len(keep) < needed:
        raise ContractError(f"not enough p-divisible terms to recurse at p={p}")
    child = _extract([(idx, v // p) for idx, v in keep[:needed]], sub_n, m)
    weight_set = _cubes_for(n)
    return [(idx, _lift_weight(w, sub_n, weight_set)) for idx, w in child]


def _combine_by_crt(pairs, prof: ModulusProfile, m: int) -> list[tuple[int, int]]:
    # Every prime sees enough units: pick a unit-rich core, pad to m terms,
    # solve per prime with full-selection DP, then glue the weights by CRT.
    selected: list[int] = []
    taken: set[int] = set()

    def ensure(q: int, quota: int) -> None:
        have = sum(1 for pos in selected if pairs[pos][1] % q != 0)
        for pos in range(len(pairs)):
            if have >= quota:
                return
            if pos not in taken and pairs[pos][1] % q != 0:
                selected.append(pos)
                taken.add(pos)
                have += 1
        if have < quota:
            raise ContractError(f"could not gather {quota} units for prime {q}")

    for p in prof.primes_n1():
        ensure(p, 3)
    for q in prof.primes_n2():
        ensure(q, 2)
    for pos in range(len(pairs)):
        if len(selected) == m:
            break
        if pos not in taken:
            selected.append(pos)
            taken.add(pos)
    chosen = sorted(selected)

    primes = prof.primes_n1() + prof.primes_n2()
    per_prime: dict[int, list[int]] = {}
    for r in primes:
        ws = full_zero_sum_weights([pairs[pos][1] % r for pos in chosen], _cubes_for(r))
        if ws is None:
            raise TheoremViolation(
                "unit-rich core admitted no weighted zero-sum at a prime",
                {"prime": r, "pairs": pairs, "chosen": chosen},
            )
        per_prime[r] = ws

    weight_set = _cubes_for(prof.n)
    out = []
    for k, pos in enumerate(chosen):
        a = crt_combine([(per_prime[r][k], r) for r in primes])
        if a not in weight_set:
            raise TheoremViolation(
                "CRT-combined weight left the cube set",
                {"weight": a, "n": prof.n},
            )
        out.append((pairs[pos][0], a))
    return out


def extract_length_m(seq: Sequence, profile: ModulusProfile, m: int) -> Certificate:
    """Constructively extract an m-term cube-weighted zero-sum subsequence.

    Requires the exact-value hypotheses (odd square-free n coprime to 3, 7 and
    13), m at least 3*omega(n1) + 2*omega(n2), and sequence length exactly
    m + 2*Omega(n1) + Omega(n2); under these the certificate always exists.
    """
    n = profile.n
    if n != seq.modulus:
        raise ValueError("profile does not match sequence modulus")
    failure = _extraction_hypothesis_failure(profile)
    if failure:
        raise HypothesisError(failure)
    m_min = 3 * profile.small_omega_n1 + 2 * profile.small_omega_n2
    if m < m_min:
        raise HypothesisError(f"m >= 3*omega(n1) + 2*omega(n2) = {m_min}", f"got m = {m}")
    expected_len = m + 2 * profile.big_omega_n1 + profile.big_omega_n2
    if len(seq) != expected_len:
        raise HypothesisError(
            f"sequence length = m + 2*Omega(n1) + Omega(n2) = {expected_len}",
            f"got {len(seq)}",
        )
    picks = _extract(list(enumerate(seq.terms)), n, m)
    cert = Certificate(picked=tuple(sorted(picks)), claimed_sum=0)
    if len(cert.picked) != m or not cert.verify(seq, _cubes_for(n)):
        raise ContractError(f"extraction produced an invalid certificate {cert}")
    return cert


def _extraction_hypothesis_failure(profile: ModulusProfile) -> str | None:
    if profile.n < 2:
        return "n >= 2"
    if profile.n % 2 == 0:
        return "n is odd"
    if profile.n % 3 == 0:
        return "n is coprime to 3"
    if not profile.is_squarefree:
        return "n is square-free"
    if profile.n % 7 == 0:
        return "7 does not divide n"
    if profile.n % 13 == 0:
        return "13 does not divide n"
    return None
