"""Command line front end.

Every command reads one instance file, runs one checker and emits a JSON
report ``{version, command, inputDigest, seed, verdict, payload}`` with
sorted keys.  Exit codes: 0 when the verdict holds, 2 when it is violated
(or undecided), 1 on usage, parse or input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

from . import __version__
from . import expr as _expr
from .instance import (
    InstanceError,
    InstanceFile,
    build_equation,
    build_field,
    build_pairs,
    build_points,
    build_solutions,
    build_structure,
    build_variety,
    parse_instance,
)
from .lindeq import (
    decompose,
    delta_eval,
    fundamental_system,
    hankel_wronskian,
    top_coefficients_nonzero,
)
from .predimension import (
    ASViolation,
    delta_en,
    delta_exp,
    epsilon_tuple,
    epsilon_vector,
    sigma_equality_check,
    validate_axioms,
    verify_AS,
    verify_AS_higher,
)
from .rotundity import (
    DEFAULT_BOUND,
    NotExpPoint,
    check_en_exp_rotund,
    check_en_free,
    check_en_rotund,
    check_exp_free,
    check_exp_rotund,
    lift_exp_point,
)
from .transcendence import ldim_mod_C

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2


@dataclass(frozen=True)
class Flags:
    bound: int = DEFAULT_BOUND
    strong: bool = False
    mode: str = "proper"
    seed: int | None = None

    def digest_part(self, command: str) -> dict:
        # only the flags a command actually reads enter its digest
        used = _FLAG_USE.get(command, ())
        return {k: getattr(self, k) for k in used}


@dataclass(frozen=True)
class Outcome:
    verdict: str
    payload: dict
    code: int


def _holds(flag: bool, yes: str, no: str, payload: dict) -> Outcome:
    return Outcome(yes if flag else no, payload, EXIT_OK if flag else EXIT_VIOLATED)


# --------------------------------------------------------------------------
# commands


def cmd_fundamental(inst: InstanceFile, flags: Flags) -> Outcome:
    E = build_equation(inst)
    F = build_field(inst)
    bases = [s.x for s in inst.solutions] or [inst.base]
    seen, systems, ok = set(), [], True
    for text in bases:
        if text in seen:
            continue
        seen.add(text)
        FS = fundamental_system(E, F(text))
        solves = all(not delta_eval(E, FS.x, v) for v in FS.v)
        nonzero = bool(FS.wronskian)
        ok &= solves and nonzero
        systems.append({**FS.describe(), "solvesEquation": solves, "wronskianNonzero": nonzero})
    return _holds(ok, "holds", "violated", {"equation": E.describe(), "systems": systems})


def cmd_proper(inst: InstanceFile, flags: Flags) -> Outcome:
    E = build_equation(inst)
    rows, all_proper = [], True
    for sol in build_solutions(inst, E):
        FS = fundamental_system(E, sol.x)
        dec = decompose(FS, sol.y)
        by_coeffs = all(bool(a) for a in dec.coefficients)
        by_wronskian = bool(hankel_wronskian(FS.x, sol.y, E.n))
        all_proper &= by_coeffs
        rows.append(
            {
                "x": str(sol.x),
                "y": str(sol.y),
                **dec.describe(),
                "allCoefficientsNonzero": by_coeffs,
                "wronskianNonzero": by_wronskian,
                "topCoefficientsNonzero": top_coefficients_nonzero(dec),
                "criteriaAgree": by_coeffs == by_wronskian,
            }
        )
    return _holds(all_proper, "proper", "not-proper", {"equation": E.describe(), "solutions": rows})


def cmd_decompose(inst: InstanceFile, flags: Flags) -> Outcome:
    E = build_equation(inst)
    rows = []
    for sol in build_solutions(inst, E):
        FS = fundamental_system(E, sol.x)
        dec = decompose(FS, sol.y)
        rows.append({"x": str(sol.x), "y": str(sol.y), "basis": [str(v) for v in FS.v], **dec.describe()})
    return Outcome("decomposed", {"equation": E.describe(), "solutions": rows}, EXIT_OK)


def cmd_epsilon(inst: InstanceFile, flags: Flags) -> Outcome:
    E = build_equation(inst)
    sols = build_solutions(inst, E)
    rows, tup = [], []
    for sol in sols:
        et = epsilon_tuple(E, sol)
        tup += et
        rows.append({"x": str(sol.x), "epsilon": list(epsilon_vector(E, sol)), "tuple": [str(v) for v in et]})
    lr = ldim_mod_C(tup)
    payload = {
        "equation": E.describe(),
        "solutions": rows,
        "ldim": lr.dimension,
        "relations": [list(r) for r in lr.relations],
    }
    return Outcome("computed", payload, EXIT_OK)


def cmd_delta(inst: InstanceFile, flags: Flags) -> Outcome:
    S = build_structure(inst)
    payload = {"structure": S.describe(), "exp": None, "en": None}
    try:
        payload["exp"] = delta_exp(S).to_dict()
        if S.equation is not None:
            payload["en"] = delta_en(S).to_dict()
    except ASViolation as exc:
        payload["violation"] = str(exc)
        return Outcome("violated", payload, EXIT_VIOLATED)
    return Outcome("nonnegative", payload, EXIT_OK)


def cmd_verify_as(inst: InstanceFile, flags: Flags) -> Outcome:
    pairs = build_pairs(inst)
    payload = {"pairs": [[str(a), str(b)] for a, b in pairs]}
    try:
        payload["report"] = verify_AS(pairs).to_dict()
    except ASViolation as exc:
        payload["violation"] = str(exc)
        return Outcome("violated", payload, EXIT_VIOLATED)
    return Outcome("holds", payload, EXIT_OK)


def cmd_verify_as_n(inst: InstanceFile, flags: Flags) -> Outcome:
    E = build_equation(inst)
    sols = build_solutions(inst, E)
    payload = {"equation": E.describe(), "solutions": [s.describe() for s in sols]}
    try:
        payload["report"] = verify_AS_higher(E, sols, flags.mode).to_dict()
    except ASViolation as exc:
        payload["violation"] = str(exc)
        return Outcome("violated", payload, EXIT_VIOLATED)
    return Outcome("holds", payload, EXIT_OK)


def cmd_sigma_eq(inst: InstanceFile, flags: Flags) -> Outcome:
    S = build_structure(inst)
    res = sigma_equality_check(S)
    return _holds(res.equal, "equal", "different", {"structure": S.describe(), **res.to_dict()})


def cmd_rotund(inst: InstanceFile, flags: Flags) -> Outcome:
    V = build_variety(inst)
    res = check_exp_rotund(V, flags.bound, flags.strong)
    payload = {"variety": V.describe(), "result": res.to_dict()}
    return _holds(res.holds, res.verdict, res.verdict, payload)


def cmd_en_rotund(inst: InstanceFile, flags: Flags) -> Outcome:
    E = build_equation(inst)
    V = build_variety(inst, E)
    tilde = check_en_rotund(E, V, flags.bound, flags.strong)
    via_exp = check_en_exp_rotund(E, V, flags.bound)
    payload = {"variety": V.describe(), "tilde": tilde.to_dict(), "expProjection": via_exp.to_dict()}
    return Outcome(tilde.verdict, payload, EXIT_OK if tilde.holds else EXIT_VIOLATED)


def cmd_free(inst: InstanceFile, flags: Flags) -> Outcome:
    V = build_variety(inst)
    res = check_exp_free(V)
    return _holds(res.free, "free", "not-free", {"variety": V.describe(), **res.to_dict()})


def cmd_en_free(inst: InstanceFile, flags: Flags) -> Outcome:
    E = build_equation(inst)
    V = build_variety(inst, E)
    res = check_en_free(E, V)
    return _holds(res.free, "free", "not-free", {"variety": V.describe(), **res.to_dict()})


def cmd_lift(inst: InstanceFile, flags: Flags) -> Outcome:
    E = build_equation(inst)
    points = build_points(inst)
    payload = {"equation": E.describe(), "points": [[str(x), str(y)] for x, y in points]}
    try:
        sols = lift_exp_point(E, points)
    except NotExpPoint as exc:
        payload["violation"] = str(exc)
        return Outcome("not-exp-point", payload, EXIT_VIOLATED)
    payload["solutions"] = [s.describe() for s in sols]
    return Outcome("lifted", payload, EXIT_OK)


def cmd_axioms(inst: InstanceFile, flags: Flags) -> Outcome:
    S = build_structure(inst)
    res = validate_axioms(S)
    return _holds(res["passed"], "passed", "failed", {"structure": S.describe(), **res})


COMMANDS: dict[str, Callable[[InstanceFile, Flags], Outcome]] = {
    "fundamental": cmd_fundamental,
    "proper": cmd_proper,
    "decompose": cmd_decompose,
    "epsilon": cmd_epsilon,
    "delta": cmd_delta,
    "verify-as": cmd_verify_as,
    "verify-as-n": cmd_verify_as_n,
    "sigma-eq": cmd_sigma_eq,
    "rotund": cmd_rotund,
    "en-rotund": cmd_en_rotund,
    "free": cmd_free,
    "en-free": cmd_en_free,
    "lift": cmd_lift,
    "axioms": cmd_axioms,
}

_FLAG_USE = {
    "rotund": ("bound", "strong"),
    "en-rotund": ("bound", "strong"),
    "verify-as-n": ("mode",),
}


# --------------------------------------------------------------------------
# reports


def input_digest(command: str, inst: InstanceFile | None, flags: Flags, text: str = "") -> str:
    body = {"command": command, "flags": flags.digest_part(command)}
    body["input"] = inst.to_dict() if inst is not None else {"raw": text}
    canon = json.dumps(body, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def render(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _diagnostic(exc: Exception) -> dict:
    if isinstance(exc, (InstanceError, _expr.ParseError)):
        return exc.to_dict()
    return {"error": type(exc).__name__, "message": str(exc), "line": None, "column": None}


def run(command: str, text: str, flags: Flags = Flags()) -> tuple[dict, int]:
    """Run one command on instance text; returns (report, exit code)."""
    inst = None
    try:
        inst = parse_instance(text)
        outcome = COMMANDS[command](inst, flags)
    except (ValueError, ArithmeticError, IndexError, AssertionError) as exc:
        outcome = Outcome("error", _diagnostic(exc), EXIT_ERROR)
    report = {
        "version": __version__,
        "command": command,
        "inputDigest": input_digest(command, inst, flags, text),
        "seed": flags.seed,
        "verdict": outcome.verdict,
        "payload": outcome.payload,
    }
    return report, outcome.code


# --------------------------------------------------------------------------
# golden corpus


def corpus_dir() -> Path:
    return Path(str(resources.files("axel") / "corpus"))


def load_manifest(root: Path | None = None) -> list[dict]:
    root = root or corpus_dir()
    return json.loads((root / "manifest.json").read_text(encoding="utf-8"))["cases"]


def case_flags(case: dict) -> Flags:
    f = case.get("flags", {})
    return Flags(f.get("bound", DEFAULT_BOUND), f.get("strong", False), f.get("mode", "proper"), f.get("seed"))


def run_case(case: dict, root: Path | None = None) -> tuple[str, int]:
    root = root or corpus_dir()
    text = (root / case["file"]).read_text(encoding="utf-8")
    report, code = run(case["command"], text, case_flags(case))
    return render(report), code


def selftest(root: Path | None = None) -> tuple[dict, int]:
    root = root or corpus_dir()
    cases = load_manifest(root)
    rows, bad = [], 0
    for case in cases:
        out, code = run_case(case, root)
        golden = root / "golden" / f"{case['name']}.json"
        expected = golden.read_text(encoding="utf-8") if golden.exists() else None
        match = out == expected and code == case["exit"]
        bad += not match
        rows.append({"name": case["name"], "command": case["command"], "exit": code, "match": match})
    payload = {"cases": rows, "total": len(rows), "mismatched": bad}
    report = {
        "version": __version__,
        "command": "selftest",
        "inputDigest": hashlib.sha256(
            json.dumps(cases, sort_keys=True, separators=(",", ":")).encode("utf-8")
        ).hexdigest(),
        "seed": None,
        "verdict": "passed" if not bad else "failed",
        "payload": payload,
    }
    return report, EXIT_OK if not bad else EXIT_VIOLATED


def regenerate_golden(root: Path | None = None) -> list[str]:
    """Rewrite every golden report and the expected exit codes; returns case names."""
    root = root or corpus_dir()
    manifest_path = root / "manifest.json"
    data = json.loads(manifest_path.read_text(encoding="utf-8"))
    (root / "golden").mkdir(exist_ok=True)
    names = []
    for case in data["cases"]:
        out, code = run_case(case, root)
        (root / "golden" / f"{case['name']}.json").write_text(out, encoding="utf-8")
        case["exit"] = code
        names.append(case["name"])
    manifest_path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return names


# --------------------------------------------------------------------------
# entry point


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _ArgParser(prog="axel", description="Ax-Schanuel and rotundity checks over exponential fields.")
    p.add_argument("--version", action="version", version=f"axel {__version__}")
    p.add_argument("command", choices=sorted(COMMANDS) + ["selftest"])
    p.add_argument("file", nargs="?", help="instance file (TOML); not used by selftest")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="entry bound for the matrix enumeration")
    p.add_argument("--strong", action="store_true", help="check strong rotundity")
    p.add_argument("--mode", choices=["proper", "epsilon"], default="proper", help="form of the higher order inequality")
    p.add_argument("--seed", type=int, default=None, help="recorded in the report")
    p.add_argument("--json", dest="json_out", metavar="OUT", help="write the JSON report here")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_intermixed_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"axel: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.command == "selftest":
        report, code = selftest()
    else:
        if not args.file:
            print("axel: error: an instance file is required", file=sys.stderr)
            return EXIT_ERROR
        if args.bound < 1:
            print("axel: error: --bound must be at least 1", file=sys.stderr)
            return EXIT_ERROR
        flags = Flags(args.bound, args.strong, args.mode, args.seed)
        try:
            text = Path(args.file).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            report = {
                "version": __version__,
                "command": args.command,
                "inputDigest": None,
                "seed": args.seed,
                "verdict": "error",
                "payload": {"error": type(exc).__name__, "message": str(exc), "line": None, "column": None},
            }
            code = EXIT_ERROR
        else:
            report, code = run(args.command, text, flags)
    out = render(report)
    if args.json_out:
        Path(args.json_out).write_text(out, encoding="utf-8")
        print(f"{report['command']}: {report['verdict']}")
    else:
        sys.stdout.write(out)
    if report["verdict"] == "error":
        d = report["payload"]
        loc = f" at line {d['line']}, column {d['column']}" if d.get("line") is not None else ""
        print(f"axel: {d['error']}: {d['message']}{loc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
