"""Command-line front end: JSON/CSV emission, result caching, verify harness.

Exit codes: 0 success, 1 refusal (hypothesis violation), 2 inconclusive
(budget exhausted), 3 internal contract failure, 64 usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
import time
from dataclasses import asdict, dataclass

from . import __version__
from .errors import ContractError, HypothesisError, TheoremViolation
from .modarith import factor, is_kth_power_residue
from .weightsets import by_kind
from .zerosum import (
    Sequence,
    crt_zero_check,
    extract_length_m,
    full_zero_sum_weights,
    has_weighted_zero_subseq,
)
from .invariants import (
    Budget,
    davenport_formula,
    davenport_search,
    e_formula,
    gao_E,
    lower_bound_witness,
    prior_upper_bound,
    theorem_hypothesis_failure,
)
from .extremal import (
    canonicalize,
    classify_structure,
    construct_extremal,
    coprimality_violating_sequence,
    enumerate_extremal,
    equivalent,
    orbit_transform,
    reconstruct,
)

EXIT_OK = 0
EXIT_REFUSED = 1
EXIT_INCONCLUSIVE = 2
EXIT_CONTRACT = 3
EXIT_USAGE = 64

DEFAULT_CACHE = "./.wzs-cache.jsonl"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunRecord:
    """One cached CLI result; serialization round-trips losslessly."""

    command: str
    params: dict
    payload: str
    timestamp: float
    version: str
    duration: float

    def to_json(self) -> str:
        body = asdict(self)
        body["key"] = cache_key(self.command, self.params)
        return json.dumps(body, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> RunRecord:
        body = json.loads(line)
        body.pop("key", None)
        return cls(**body)


def cache_key(command: str, params: dict) -> str:
    return json.dumps(
        {"command": command, "params": params, "version": __version__}, sort_keys=True
    )


class Cache:
    """Append-only JSONL result cache; corrupt lines are skipped loudly."""

    def __init__(self, path: str | None = None) -> None:
        self.path = path or os.environ.get("WZS_CACHE", DEFAULT_CACHE)

    def lookup(self, command: str, params: dict) -> str | None:
        key = cache_key(command, params)
        try:
            fh = open(self.path, encoding="utf-8")
        except FileNotFoundError:
            return None
        with fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    print(
                        f"warning: skipping corrupt cache line {lineno} in {self.path}",
                        file=sys.stderr,
                    )
                    continue
                if rec.get("key") == key:
                    return rec.get("payload")
        return None

    def store(self, record: RunRecord) -> None:
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(record.to_json() + "\n")

    def entries(self) -> int:
        try:
            fh = open(self.path, encoding="utf-8")
        except FileNotFoundError:
            return 0
        with fh:
            return sum(1 for line in fh if line.strip())

    def clear(self) -> bool:
        try:
            os.remove(self.path)
            return True
        except FileNotFoundError:
            return False


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _parse_residues(raw: str) -> list[int]:
    raw = raw.strip()
    if not raw:
        return []
    return [int(chunk) for chunk in raw.split(",")]


def _budget_from(args) -> Budget:
    ms = args.budget_ms
    if ms is None:
        ms = int(os.environ.get("WZS_BUDGET_MS", "60000"))
    return Budget(max_seconds=ms / 1000.0)


def _weights_from(args):
    elems = _parse_residues(args.elems) if getattr(args, "elems", None) else None
    return by_kind(args.weights, args.n, elems)


def _cmd_weights(args) -> int:
    ws = by_kind(args.kind, args.n, _parse_residues(args.elems) if args.elems else None)
    _emit(ws.to_dict())
    return EXIT_OK


def _cmd_check(args) -> int:
    weights = _weights_from(args)
    seq = Sequence.make(args.n, _parse_residues(args.seq))
    cert = has_weighted_zero_subseq(seq, weights)
    _emit(
        {
            "n": args.n,
            "weights": weights.kind,
            "seq": list(seq.terms),
            "zero_sum_subseq": cert is not None,
            "certificate": cert.to_dict() if cert is not None else None,
        }
    )
    return EXIT_OK


def _cmd_davenport(args) -> int:
    weights = _weights_from(args)
    budget = _budget_from(args)
    params = {
        "n": args.n,
        "weights": args.weights,
        "elems": args.elems,
        "method": args.method,
        "budget_ms": int(budget.max_seconds * 1000),
        "jobs": args.jobs,
    }
    cache = Cache()
    hit = cache.lookup("davenport", params)
    if hit is not None:
        print(hit)
        return EXIT_OK

    t0 = time.perf_counter()
    out: dict = {"n": args.n, "weights": weights.kind}
    code = EXIT_OK
    if args.method in ("formula", "both"):
        try:
            prof = factor(args.n)
            out["formula"] = davenport_formula(prof).value
            out["E_formula"] = e_formula(prof).value
        except HypothesisError as exc:
            if args.method == "formula":
                raise
            out["formula"] = None
            out["E_formula"] = None
            out["formula_refusal"] = str(exc)
    if args.method in ("search", "both"):
        res = davenport_search(args.n, weights, budget, jobs=args.jobs)
        out["search"] = res.value
        out["conclusive"] = res.conclusive
        out["witness"] = list(res.witness.terms) if res.witness is not None else None
        out["stats"] = {"nodes": res.stats.nodes, "wall_time": res.stats.wall_time}
        if not res.conclusive:
            out["lower"] = res.lower
            out["upper"] = res.upper
            code = EXIT_INCONCLUSIVE
    if args.method == "both":
        f, s = out.get("formula"), out.get("search")
        out["agrees"] = (f == s) if f is not None and s is not None else None

    payload = json.dumps(out, sort_keys=True)
    print(payload)
    if code == EXIT_OK:
        cache.store(
            RunRecord(
                command="davenport",
                params=params,
                payload=payload,
                timestamp=time.time(),
                version=__version__,
                duration=time.perf_counter() - t0,
            )
        )
    return code


def _table_row(n: int, kind: str, budget: Budget, jobs: int) -> dict:
    prof = factor(n)
    row: dict = {
        "n": n,
        "n1": prof.n1,
        "n2": prof.n2,
        "Omega_n1": prof.big_omega_n1,
        "Omega_n2": prof.big_omega_n2,
    }
    # the closed form speaks only about cube weights, and only in hypothesis
    if kind == "cubes" and theorem_hypothesis_failure(prof) is None:
        row["D_formula"] = davenport_formula(prof).value
        row["E_formula"] = e_formula(prof).value
    else:
        row["D_formula"] = None
        row["E_formula"] = None
    res = davenport_search(n, by_kind(kind, n), budget, jobs=jobs)
    row["D_search"] = res.value
    if row["D_formula"] is None or row["D_search"] is None:
        row["agrees"] = None
    else:
        row["agrees"] = row["D_formula"] == row["D_search"]
    row["witness"] = (
        " ".join(str(t) for t in res.witness.terms) if res.witness is not None else ""
    )
    return row


_TABLE_COLUMNS = [
    "n",
    "n1",
    "n2",
    "Omega_n1",
    "Omega_n2",
    "D_formula",
    "D_search",
    "E_formula",
    "agrees",
    "witness",
]


def _cmd_table(args) -> int:
    if args.start < 2 or args.end < args.start:
        raise ValueError("table needs 2 <= from <= to")
    budget = _budget_from(args)
    cache = Cache()
    rows = []
    for n in range(args.start, args.end + 1):
        params = {
            "n": n,
            "weights": args.weights,
            "budget_ms": int(budget.max_seconds * 1000),
            "jobs": args.jobs,
        }
        hit = cache.lookup("table-row", params)
        if hit is not None:
            rows.append(json.loads(hit))
            continue
        t0 = time.perf_counter()
        row = _table_row(n, args.weights, budget, args.jobs)
        cache.store(
            RunRecord(
                command="table-row",
                params=params,
                payload=json.dumps(row, sort_keys=True),
                timestamp=time.time(),
                version=__version__,
                duration=time.perf_counter() - t0,
            )
        )
        rows.append(row)

    if args.format == "json":
        _emit(rows)
        return EXIT_OK
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(_TABLE_COLUMNS)
    for row in rows:
        rendered = []
        for col in _TABLE_COLUMNS:
            val = row[col]
            if val is None:
                rendered.append("")
            elif isinstance(val, bool):
                rendered.append("true" if val else "false")
            else:
                rendered.append(str(val))
        writer.writerow(rendered)
    return EXIT_OK


def _structure_or_none(canon_seq, prof):
    if theorem_hypothesis_failure(prof) is not None:
        return None
    return classify_structure(canon_seq, prof).to_dict()


def _cmd_extremal(args) -> int:
    weights = _weights_from(args)
    budget = _budget_from(args)
    prof = factor(args.n)

    if args.action == "construct":
        seq = construct_extremal(prof)
        _emit({"n": args.n, "witness": list(seq.terms), "length": len(seq)})
        return EXIT_OK

    if args.action == "classify":
        if args.seq is None:
            raise ValueError("classify needs --seq")
        seq = Sequence.make(args.n, _parse_residues(args.seq))
        report = classify_structure(seq, prof)
        _emit({"n": args.n, "report": report.to_dict()})
        return EXIT_OK

    params = {
        "n": args.n,
        "weights": args.weights,
        "elems": args.elems,
        "budget_ms": int(budget.max_seconds * 1000),
    }
    cache = Cache()
    hit = cache.lookup("extremal-enumerate", params)
    if hit is not None:
        print(hit)
        return EXIT_OK
    t0 = time.perf_counter()
    enum = enumerate_extremal(args.n, weights, budget)
    classes = []
    for c in enum.classes:
        entry = {
            "canonical": list(c.canonical.terms),
            "orbit_size": c.orbit_size,
            "structure": (
                _structure_or_none(c.canonical, prof) if weights.kind == "cubes" else None
            ),
        }
        classes.append(entry)
    out = {
        "n": args.n,
        "weights": weights.kind,
        "d_value": enum.d_value,
        "count": len(classes),
        "complete": enum.complete,
        "classes": classes,
    }
    payload = json.dumps(out, sort_keys=True)
    print(payload)
    if not enum.complete:
        return EXIT_INCONCLUSIVE
    cache.store(
        RunRecord(
            command="extremal-enumerate",
            params=params,
            payload=payload,
            timestamp=time.time(),
            version=__version__,
            duration=time.perf_counter() - t0,
        )
    )
    return EXIT_OK


def _run_verify(n: int, seed: int, budget: Budget) -> dict:
    prof = factor(n)
    failure = theorem_hypothesis_failure(prof)
    if failure:
        raise HypothesisError(failure, f"n = {n}")
    rng = random.Random(seed)
    weights = by_kind("cubes", n)
    checks: dict[str, dict] = {}

    d_form = davenport_formula(prof).value
    d_search = davenport_search(n, weights, budget)
    checks["formula_matches_search"] = {
        "pass": d_search.conclusive and d_search.value == d_form,
        "formula": d_form,
        "search": d_search.value,
    }
    checks["e_value_relation"] = {
        "pass": e_formula(prof).value == gao_E(d_form, n),
        "e_formula": e_formula(prof).value,
    }
    witness = lower_bound_witness(prof)
    checks["lower_bound_witness_tight"] = {
        "pass": len(witness) == d_form - 1,
        "witness": list(witness.terms),
    }

    m = 3 * prof.small_omega_n1 + 2 * prof.small_omega_n2
    length = m + 2 * prof.big_omega_n1 + prof.big_omega_n2
    ok = True
    for _ in range(25):
        seq = Sequence.make(n, (rng.randrange(n) for _ in range(length)))
        cert = extract_length_m(seq, prof, m)
        if len(cert.picked) != m or not cert.verify(seq, weights):
            ok = False
            break
    checks["extraction_certificates"] = {"pass": ok, "trials": 25, "m": m}

    enum = enumerate_extremal(n, weights, budget)
    classify_ok = enum.complete
    minima_ok = True
    for c in enum.classes:
        report = classify_structure(c.canonical, prof)
        if not equivalent(reconstruct(report), c.canonical, weights):
            classify_ok = False
        for p in prof.primes_n1():
            if sum(1 for t in c.canonical.terms if t % p != 0) < 2:
                minima_ok = False
        for q in prof.primes_n2():
            if sum(1 for t in c.canonical.terms if t % q != 0) < 1:
                minima_ok = False
    checks["extremal_classification"] = {
        "pass": classify_ok,
        "classes": len(enum.classes),
    }
    checks["coprimality_minima"] = {"pass": minima_ok}

    ok = True
    for _ in range(100):
        violator = coprimality_violating_sequence(prof, rng)
        if has_weighted_zero_subseq(violator, weights) is None:
            ok = False
            break
    checks["violation_forces_zero_sum"] = {"pass": ok, "trials": 100}

    ok = True
    for _ in range(200):
        seq = Sequence.make(n, (rng.randrange(n) for _ in range(rng.randrange(7))))
        direct = full_zero_sum_weights(seq.terms, weights) is not None
        if crt_zero_check(seq, prof) != direct:
            ok = False
            break
    checks["crt_factorization"] = {"pass": ok, "trials": 200}

    cube_values = {pow(x, 3, n) for x in range(n)}
    square_values = {pow(x, 2, n) for x in range(n)}
    ok = all(
        is_kth_power_residue(a, 3, n) == (a in cube_values) for a in range(n)
    ) and all(is_kth_power_residue(a, 2, n) == (a in square_values) for a in range(n))
    checks["power_residue_split"] = {"pass": ok}

    ok = True
    for _ in range(100):
        seq = Sequence.make(n, (rng.randrange(n) for _ in range(1 + rng.randrange(5))))
        moved = orbit_transform(seq, weights, rng)
        if canonicalize(seq, weights).canonical != canonicalize(moved, weights).canonical:
            ok = False
            break
        if (has_weighted_zero_subseq(seq, weights) is None) != (
            has_weighted_zero_subseq(moved, weights) is None
        ):
            ok = False
            break
    checks["equivalence_invariance"] = {"pass": ok, "trials": 100}

    bound = prior_upper_bound(prof).d_bound
    checks["prior_bound_ceiling"] = {
        "pass": d_search.value is not None and d_search.value <= bound,
        "bound": bound,
    }

    return {
        "n": n,
        "weights": "cubes",
        "checks": checks,
        "all_pass": all(c["pass"] for c in checks.values()),
    }


def _cmd_verify(args) -> int:
    result = _run_verify(args.n, args.rng_seed, _budget_from(args))
    _emit(result)
    return EXIT_OK if result["all_pass"] else EXIT_CONTRACT


def _cmd_cache(args) -> int:
    cache = Cache()
    if args.action == "clear":
        _emit({"path": cache.path, "cleared": cache.clear()})
    else:
        _emit({"path": cache.path, "entries": cache.entries()})
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="wzs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_weights_flags(p, default_kind="cubes"):
        p.add_argument("--weights", default=default_kind,
                       choices=["cubes", "squares", "units", "pm1", "one", "custom"])
        p.add_argument("--elems", default=None,
                       help="comma-separated residues for --weights custom")

    p = sub.add_parser("weights", help="print a weight set as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", required=True,
                   choices=["cubes", "squares", "units", "pm1", "one", "custom"])
    p.add_argument("--elems", default=None)
    p.set_defaults(func=_cmd_weights)

    p = sub.add_parser("check", help="weighted zero-sum subsequence verdict")
    p.add_argument("--n", type=int, required=True)
    add_weights_flags(p)
    p.add_argument("--seq", required=True, help="comma-separated residues")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("davenport", help="weighted Davenport constant")
    p.add_argument("--n", type=int, required=True)
    add_weights_flags(p)
    p.add_argument("--method", default="both", choices=["search", "formula", "both"])
    p.add_argument("--budget-ms", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_davenport)

    p = sub.add_parser("table", help="sweep a range of moduli into CSV/JSON rows")
    p.add_argument("--weights", default="cubes",
                   choices=["cubes", "squares", "units", "pm1", "one"])
    p.add_argument("--from", dest="start", type=int, required=True)
    p.add_argument("--to", dest="end", type=int, required=True)
    p.add_argument("--format", "--out", dest="format", default="csv",
                   choices=["csv", "json"])
    p.add_argument("--budget-ms", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("extremal", help="enumerate, construct or classify extremal sequences")
    p.add_argument("action", choices=["enumerate", "construct", "classify"])
    p.add_argument("--n", type=int, required=True)
    add_weights_flags(p)
    p.add_argument("--seq", default=None, help="sequence for classify")
    p.add_argument("--budget-ms", type=int, default=None)
    p.set_defaults(func=_cmd_extremal)

    p = sub.add_parser("verify", help="run the full desk-scale check matrix for one n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--budget-ms", type=int, default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("cache", help="inspect or clear the result cache")
    p.add_argument("action", nargs="?", default="stats", choices=["stats", "clear"])
    p.set_defaults(func=_cmd_cache)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except HypothesisError as exc:
        _emit({"error": "refused", "reason": str(exc)})
        return EXIT_REFUSED
    except TheoremViolation as exc:
        _emit({"error": "theorem violation", "detail": str(exc), "dump": exc.dump})
        return EXIT_CONTRACT
    except ContractError as exc:
        _emit({"error": "internal contract failure", "detail": str(exc)})
        return EXIT_CONTRACT
    except ValueError as exc:
        print(f"wzs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
