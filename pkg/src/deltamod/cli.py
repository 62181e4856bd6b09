"""Command-line front end. Every verification prints a JSON report.

Exit codes: 0 when every verdict passes, 1 when one fails, 2 on usage
errors or exceeded caps.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .catalog import (
    Tr_size,
    Via,
    build_A,
    build_Aprime,
    build_D,
    build_H,
    build_named,
    build_T,
    build_Tprime,
    named_representation,
)
from .extensions import (
    CUT_ENUMERATION_CAP,
    ExtensionType,
    classify_extension_element,
    enumerate_modular_cuts,
    extend,
)
from .linalg import (
    is_delta_modular,
    is_totally_delta_modular,
    max_abs_minor_witness,
    rank,
    row_point_count,
)
from .matroid import CapExceeded, LinearMatroid, Matroid, epsilon, matroid_from_dict
from .normal_form import Representation
from .search import (
    ExcludedMinorVerdict,
    rank2_max_size,
    rank2_max_size_oracle,
    random_2modular_matrix,
    verify_excluded_minor_2modular,
)
from .structure import MINOR_HOST_CAP, analyze_clique_extension, has_minor

logger = logging.getLogger("deltamod")

EXCLUDED_PATTERNS = ("U(2,5)", "F7", "R9", "U24+U24")
EXCLUDED_MINOR_NAMES = {"U24+U24": "U24+U24", "U8": "U8", "U8p": "U8prime", "U25": "U(2,5)"}
RANK2_EXPECTED = {1: 3, 2: 4, 4: 6, 6: 8, 7: 10}
VERIFY_MAIN_MAX_R = 8
MODULARITY_MAX_R = 6
MINOR_FREE_MAX_R = 5


class UsageError(ValueError):
    pass


@dataclass
class Report:
    command: str
    inputs: dict
    verdicts: list[dict] = field(default_factory=list)

    def add(self, claim: str, anchor: str, passed: bool, witness=None) -> None:
        self.verdicts.append({"claim": claim, "anchor": anchor, "pass": bool(passed), "witness": witness})

    @property
    def passed(self) -> bool:
        return all(v["pass"] for v in self.verdicts)

    def to_dict(self) -> dict:
        return {"command": self.command, "inputs": self.inputs, "verdicts": self.verdicts, "pass": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# verification commands
# ---------------------------------------------------------------------------


def cmd_verify_main(r_min: int, r_max: int, minor_cap: int = MINOR_HOST_CAP) -> Report:
    if not 2 <= r_min <= r_max <= VERIFY_MAIN_MAX_R:
        raise UsageError(f"need 2 <= r_min <= r_max <= {VERIFY_MAIN_MAX_R}")
    rep = Report("verify-main", {"r_min": r_min, "r_max": r_max})
    patterns = {name: build_named(name) for name in EXCLUDED_PATTERNS}
    for r in range(r_min, r_max + 1):
        target = Tr_size(r)
        A, Ap = build_A(r), build_Aprime(r)
        if r <= MODULARITY_MAX_R:
            for name, m in (("A", A), ("Aprime", Ap)):
                best, rows, cols = max_abs_minor_witness(m.matrix, r)
                rep.add(
                    f"{name}_{r}_2modular",
                    f"every rank-sized subdeterminant of {name}_r has absolute value at most 2",
                    best <= 2,
                    {"max_abs_minor": best, "columns": [m.labels[c] for c in cols]},
                )
        for name, m in (("A", A), ("Aprime", Ap)):
            count = row_point_count(m.matrix.T)
            rep.add(
                f"{name}_{r}_row_count",
                "the transpose has C(r+2,2)-2 nonzero pairwise non-parallel rows",
                count == target,
                {"rows": count, "expected": target},
            )
        T, Tp = build_T(r), build_Tprime(r)
        for name, M in (("T", T), ("Tprime", Tp)):
            eps = epsilon(M)
            rep.add(f"{name}_{r}_epsilon", "the matroid has C(r+2,2)-2 points", eps == target, {"epsilon": eps})
        if r <= MINOR_FREE_MAX_R:
            for name, M in (("T", T), ("Tprime", Tp)):
                found = {}
                for pname, P in patterns.items():
                    w = has_minor(M, P, host_cap=minor_cap)
                    found[pname] = None if w is None else w.to_dict()
                rep.add(
                    f"{name}_{r}_minor_free",
                    "no minor isomorphic to U(2,5), F7, R9 or U(2,4)+U(2,4)",
                    all(v is None for v in found.values()),
                    found,
                )
    return rep


def cmd_excluded_minors(names: list[str] | None = None) -> Report:
    names = names or ["U24+U24", "U8", "U8p"]
    rep = Report("excluded-minor", {"names": names})
    for name in names:
        if name not in EXCLUDED_MINOR_NAMES:
            raise UsageError(f"unknown excluded-minor name {name!r}")
        res = verify_excluded_minor_2modular(build_named(EXCLUDED_MINOR_NAMES[name]))
        rep.add(
            f"{name}_excluded_minor",
            "not 2-modular, while every single-element deletion and contraction is",
            res.verdict is ExcludedMinorVerdict.EXCLUDED_MINOR,
            res.to_dict(),
        )
    return rep


def cmd_rank2(delta: int, cap: int | None = None) -> Report:
    kwargs = {} if cap is None else {"cap": cap}
    rep = Report("rank2", {"delta": delta})
    n, witness = rank2_max_size(delta, **kwargs)
    cols = [witness.column(j) for j in range(witness.cols)]
    valid = is_delta_modular(witness, delta) and len({c for c in cols}) == len(cols)
    rep.add(
        "witness_valid",
        f"the witness is a {delta}-modular 2-row matrix with pairwise non-parallel columns",
        valid and rank(witness) == 2,
        {"n_max": n, "witness_matrix": witness.tolist()},
    )
    rep.add("lower_bound", "columns (1,0), (0,1) and (1,m) give at least delta+2", n >= delta + 2, {"n_max": n})
    if delta in RANK2_EXPECTED:
        rep.add(
            "expected_value",
            f"U(2,{RANK2_EXPECTED[delta] + 1}) is the rank-2 excluded minor for delta = {delta}",
            n == RANK2_EXPECTED[delta],
            {"n_max": n, "expected": RANK2_EXPECTED[delta]},
        )
    if delta <= 5:
        oracle = rank2_max_size_oracle(delta)
        rep.add("enlarged_box", "the search over |a| <= 2 delta finds the same maximum", oracle == n, {"oracle": oracle})
    return rep


def _admissible_cuts(K: Matroid, cap: int):
    for cut in enumerate_modular_cuts(K, cap=cap):
        if cut.is_empty or any(K.r(g) <= 1 for g in cut.generators):
            continue
        yield cut


def cmd_projections(r: int, cap: int | None = None) -> Report:
    if r not in (3, 4):
        raise UsageError("projections is exhaustive only at rank 3 or 4")
    if cap is None:
        cap = CUT_ENUMERATION_CAP if r == 3 else 60
    K = build_named(f"MK({r + 1})")
    patterns = {name: build_named(name) for name in ("U(2,5)", "F7", "R9")}
    rep = Report("projections", {"r": r})
    counts = {"excluded_by_minor": 0, "TYPE_A": 0, "TYPE_B": 0, "OTHER": 0}
    failures = []
    for cut in _admissible_cuts(K, cap):
        N = extend(K, cut, "e")
        minor = next((p for p, P in patterns.items() if has_minor(N, P) is not None), None)
        if minor is not None:
            counts["excluded_by_minor"] += 1
            continue
        c = classify_extension_element(N, K.elements, "e")
        counts[c.type.value] += 1
        if c.type is ExtensionType.OTHER:
            failures.append(cut.generator_labels())
    rep.add(
        "simple_extensions_typed",
        "every simple extension of the clique with no U(2,5), F7 or R9 minor is type (a) or type (b)",
        not failures,
        {"counts": counts, "failures": failures},
    )
    return rep


def cmd_analyze(M: Matroid, X: list[str], certified: bool) -> Report:
    a = analyze_clique_extension(M, X, hypotheses_hold=certified)
    rep = Report("analyze", {"size": len(M), "rank": M.full_rank, "clique_size": len(X), "certified": certified})
    applies = certified and M.full_rank >= 6
    rep.add(
        "size_bound",
        "|M| <= C(r+2,2)-2 for a spanning-clique matroid without the four excluded minors",
        a.size_bound_holds or not applies,
        {"size": a.size, "bound": a.size_bound, "asserted": applies},
    )
    rep.add(
        "special_points",
        "at most 21 special points",
        a.special_bound_holds or not applies,
        {"total": a.special.total, "special": a.special.special, "asserted": applies},
    )
    bad = [c for c in a.pair_checks if c["asserted"] and not c["holds"]]
    rep.add("pair_structure", "pairs of outside elements sit in a common small clique", not bad, {"failures": bad})
    rep.inputs["analysis"] = a.to_dict()
    return rep


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(str(exc)) from exc


def load_matroid(path: str) -> tuple[Matroid, Representation | None]:
    text = _read(path)
    if text.lstrip().startswith("{"):
        return matroid_from_dict(json.loads(text)), None
    rep = Representation.from_text(text)
    return rep.matroid(), rep


def _construct(args) -> tuple[str, bool]:
    """Returns (payload, is_json)."""
    name = args.name
    r = args.r
    if name in ("A", "Aprime", "H", "D", "T", "Tprime") and r is None:
        raise UsageError(f"{name} needs --r")
    if name == "A":
        return build_A(r).to_text(), False
    if name == "Aprime":
        return build_Aprime(r).to_text(), False
    if name == "H":
        return build_H(r).to_text(), False
    if name == "D":
        return build_D(r).to_text(), False
    if name == "random":
        m = random_2modular_matrix(r or 3, args.cols, args.seed)
        return Representation.of(m).to_text(), False
    if name in ("T", "Tprime"):
        builder = build_T if name == "T" else build_Tprime
        M = builder(r, Via(args.via))
        if isinstance(M, LinearMatroid):
            return Representation(M.matrix, M.labels, M.field).to_text(), False
        return json.dumps(M.to_dict(), sort_keys=True, indent=2) + "\n", True
    rep = named_representation(name)
    if rep is not None:
        return rep.to_text(), False
    try:
        M = build_named(name)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    return json.dumps(M.to_dict(), sort_keys=True, indent=2) + "\n", True


def _clique_arg(M: Matroid, args) -> list[str]:
    if args.clique_labels:
        return list(args.clique_labels)
    prefix = args.clique
    if prefix is None:
        raise UsageError("give --clique PREFIX or --clique-labels")
    return [e for e in M.elements if e.startswith(prefix)]


def build_parser() -> argparse.ArgumentParser:
    def shared(parser: argparse.ArgumentParser, suppress: bool) -> None:
        # accepted before or after the subcommand; SUPPRESS keeps the
        # subparser from overwriting a value given before it
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        parser.add_argument("-o", "--output", default=d(None), help="write the report or matrix here instead of stdout")
        parser.add_argument("--timing", action="store_true", default=d(False), help="include wall-clock runtime in reports")
        parser.add_argument("--seed", type=int, default=d(0))
        parser.add_argument("--cap", type=int, default=d(None), help="override the command's size cap")
        parser.add_argument("-v", "--verbose", action="store_true", default=d(False))

    p = argparse.ArgumentParser(prog="deltamod", description="Exact checks for Delta-modular matrices and matroids.")
    p.add_argument("--version", action="version", version=__version__)
    shared(p, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    shared(common, suppress=True)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, **kwargs) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], **kwargs)

    s = add("modcheck", help="check Delta-modularity of a matrix file")
    s.add_argument("--file", required=True)
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--totally", action="store_true")

    s = add("construct", help="write a catalog matrix or matroid")
    s.add_argument("name")
    s.add_argument("--r", type=int)
    s.add_argument("--via", default="MATRIX", choices=[v.value for v in Via])
    s.add_argument("--cols", type=int, default=4, help="extra columns for 'random'")

    s = add("epsilon", help="number of points of a matrix or matroid file")
    s.add_argument("--file", required=True)

    s = add("verify-main", help="2-modularity, counts and minor-freeness of A_r and A'_r")
    s.add_argument("--r", type=int, help="single rank (same as --r-min R --r-max R)")
    s.add_argument("--r-min", type=int, default=2)
    s.add_argument("--r-max", type=int, default=5)

    s = add("excluded-minor", help="certify excluded minors for 2-modularity")
    s.add_argument("--name", action="append", choices=sorted(EXCLUDED_MINOR_NAMES))

    s = add("rank2", help="largest rank-2 uniform matroid that is Delta-modular")
    s.add_argument("--delta", type=int, required=True)

    s = add("classify-extension", help="types of the elements outside a spanning clique")
    s.add_argument("--file", required=True)
    s.add_argument("--clique")
    s.add_argument("--clique-labels", nargs="+")

    s = add("analyze", help="spanning-clique structure report")
    s.add_argument("--file", required=True)
    s.add_argument("--clique")
    s.add_argument("--clique-labels", nargs="+")

    s = add("minor", help="search for a minor isomorphic to a catalog matroid")
    s.add_argument("--host", required=True)
    s.add_argument("--pattern", required=True)

    s = add("projections", help="exhaustive typing of simple clique extensions")
    s.add_argument("--r", type=int, required=True)
    return p


def _certified(M: Matroid, rep: Representation | None) -> bool:
    """Minor-freeness certificate: a 2-modular rational matrix excludes all four patterns."""
    return rep is not None and rep.field == 0 and rank(rep.matrix) > 0 and is_delta_modular(rep.matrix, 2)


def run(args) -> tuple[str, int]:
    cmd = args.command
    if cmd == "modcheck":
        M, rep = load_matroid(args.file)
        if rep is None:
            raise UsageError("modcheck needs a matrix file")
        m = rep.matrix
        r = rank(m)
        if r == 0:
            raise UsageError("matrix has rank 0")
        best, rows, cols = max_abs_minor_witness(m, r)
        report = Report("modcheck", {"file": args.file, "delta": args.delta, "totally": args.totally})
        report.add("delta_modular", "every rank-sized subdeterminant is bounded by delta",
                   best <= args.delta, {"max_abs_minor": best, "rows": list(rows), "columns": list(cols)})
        if args.totally:
            report.add("totally_delta_modular", "every square subdeterminant is bounded by delta",
                       is_totally_delta_modular(m, args.delta), None)
        return report.to_json(), 0 if report.passed else 1
    if cmd == "construct":
        payload, _ = _construct(args)
        return payload, 0
    if cmd == "epsilon":
        M, _ = load_matroid(args.file)
        out = {"rank": M.full_rank, "size": len(M), "epsilon": epsilon(M)}
        return json.dumps(out, sort_keys=True, indent=2) + "\n", 0
    if cmd == "verify-main":
        lo, hi = (args.r, args.r) if args.r is not None else (args.r_min, args.r_max)
        kwargs = {} if args.cap is None else {"minor_cap": args.cap}
        report = cmd_verify_main(lo, hi, **kwargs)
    elif cmd == "excluded-minor":
        report = cmd_excluded_minors(args.name)
    elif cmd == "rank2":
        report = cmd_rank2(args.delta, args.cap)
    elif cmd == "projections":
        report = cmd_projections(args.r, args.cap)
    elif cmd == "classify-extension":
        M, _ = load_matroid(args.file)
        X = _clique_arg(M, args)
        out = [classify_extension_element(M, X, e).to_dict() for e in M.elements if e not in set(X)]
        return json.dumps(out, sort_keys=True, indent=2) + "\n", 0
    elif cmd == "analyze":
        M, rep = load_matroid(args.file)
        report = cmd_analyze(M, _clique_arg(M, args), _certified(M, rep))
    elif cmd == "minor":
        M, _ = load_matroid(args.host)
        try:
            P = build_named(args.pattern)
        except KeyError as exc:
            raise UsageError(str(exc)) from exc
        kwargs = {} if args.cap is None else {"host_cap": args.cap}
        w = has_minor(M, P, **kwargs)
        body = {"pattern": args.pattern, "witness": None if w is None else w.to_dict()}
        return json.dumps(body, sort_keys=True, indent=2) + "\n", 0
    else:  # pragma: no cover - argparse enforces the choices
        raise UsageError(cmd)
    return report.to_json(), 0 if report.passed else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    start = time.perf_counter()
    try:
        payload, code = run(args)
    except (UsageError, CapExceeded, KeyError, ValueError) as exc:
        print(f"deltamod: error: {exc}", file=sys.stderr)
        return 2
    if args.timing and payload.lstrip().startswith("{"):
        data = json.loads(payload)
        data["runtime_seconds"] = round(time.perf_counter() - start, 3)
        payload = json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if args.output:
        Path(args.output).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
