"""Instance and variety files: TOML documents with expression strings.

Layout::

    constants = ["s"]            # symbols of C
    base = "t"                   # optional, default "t"
    generators = ["t^2"]         # optional extra generators of a structure

    [model]
    exponents = ["t", "s*t"]     # u1 = exp(t), u2 = exp(s*t)

    [equation]
    eigenvalues = [["1", 1], ["s", 1]]   # (eigenvalue, multiplicity)

    [[solutions]]
    x = "t"
    coefficients = [["1"], ["1"]]        # a_ij per block; or z = [...]; or y = "..."

    [[exp_instances]]
    a = "t"
    b = "u1"

    [[points]]                           # (x, y) with Exp(mu_1 x, y)
    x = "t"
    y = "u1"

    [variety]
    ambient = "G"                        # or "E" (then z = n lists of m)
    n = 2
    parameters = ["w1", "w2"]
    x = ["w1", "w2"]
    y = ["w1", "w2"]

A variety may instead say ``source = "solutions" | "exp_instances" |
"points"`` (the locus over C of the instance's own data) or
``representation = "linear-binomial"`` with ``x_equations`` and
``y_equations``.

:func:`parse_instance` checks structure, expression syntax and declared
symbols and reports the offending line and column; the ``build_*``
functions turn the validated form into library objects.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any

import tomli
import tomli_w

from . import expr as _expr
from .algebra import rational_field
from .expfield import ExpField, FieldElement, is_constant
from .lindeq import (
    Equation,
    InvalidEigenvalue,
    NotASolution,
    Solution,
    block_coefficients,
    en_membership,
    fundamental_system,
    make_equation,
    satisfies,
    solution_from_coefficients,
    solution_from_y,
)
from .predimension import FGStructure, make_structure
from .rotundity import (
    LinearBinomialVariety,
    ParamVariety,
    en_point_variety,
    exp_point_variety,
    locus_of_point,
)


class InstanceError(ValueError):
    """Malformed instance file, with a location when one is known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, kind: str = "InstanceError"):
        self.message = message
        self.line = line
        self.column = column
        self.kind = kind
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)

    def to_dict(self) -> dict:
        return {"error": self.kind, "message": self.message, "line": self.line, "column": self.column}


# --------------------------------------------------------------------------
# structured form


@dataclass(frozen=True)
class SolutionSpec:
    x: str
    coefficients: tuple[tuple[str, ...], ...] | None = None
    z: tuple[str, ...] | None = None
    y: str | None = None


@dataclass(frozen=True)
class VarietySpec:
    ambient: str = "G"
    n: int = 0
    m: int = 1
    parameters: tuple[str, ...] = ()
    x: tuple[str, ...] = ()
    y: tuple[str, ...] = ()
    z: tuple[tuple[str, ...], ...] = ()
    source: str | None = None
    representation: str = "parametrized"
    x_equations: tuple[tuple[tuple[str, ...], str], ...] = ()
    y_equations: tuple[tuple[tuple[int, ...], str], ...] = ()


@dataclass(frozen=True)
class InstanceFile:
    constants: tuple[str, ...] = ()
    base: str = "t"
    exponents: tuple[str, ...] = ()
    generators: tuple[str, ...] = ()
    eigenvalues: tuple[tuple[str, int], ...] | None = None
    solutions: tuple[SolutionSpec, ...] = ()
    exp_instances: tuple[tuple[str, str], ...] = ()
    points: tuple[tuple[str, str], ...] = ()
    variety: VarietySpec | None = None

    def to_dict(self) -> dict:
        """Plain-data form; the canonical input for digests and round trips."""
        return _plain(asdict(self))

    @property
    def u_names(self) -> tuple[str, ...]:
        return tuple(f"u{j + 1}" for j in range(len(self.exponents)))


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


# --------------------------------------------------------------------------
# parsing


_TOML_LOC = re.compile(r"\(at line (\d+), column (\d+)\)")

_TOP = {"constants", "base", "generators", "model", "equation", "solutions", "exp_instances", "points", "variety"}


class _Reader:
    """Walks the decoded TOML, validating shapes and expressions."""

    def __init__(self, text: str):
        self.text = text

    # -- locations ----------------------------------------------------------
    def locate(self, value: str, offset: int = 0) -> tuple[int | None, int | None]:
        for quote in ('"', "'"):
            pos = self.text.find(quote + value + quote)
            if pos >= 0:
                pos += 1 + offset
                line = self.text.count("\n", 0, pos) + 1
                col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
                return line, col
        return None, None

    def locate_key(self, key: str) -> tuple[int | None, int | None]:
        m = re.search(rf"(?m)^\s*(\[+\s*)?{re.escape(key)}\b", self.text)
        if not m:
            return None, None
        pos = m.start(0) + len(m.group(0)) - len(key)
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, message: str, key: str | None = None, kind: str = "InstanceError"):
        line, col = self.locate_key(key) if key else (None, None)
        raise InstanceError(message, line, col, kind)

    # -- primitives ---------------------------------------------------------
    def expression(self, value, allowed, where: str) -> str:
        if isinstance(value, int) and not isinstance(value, bool):
            value = str(value)
        if not isinstance(value, str):
            self.fail(f"{where}: expected an expression string, got {type(value).__name__}", where.split(".")[0])
        try:
            node = _expr.parse_expression(value)
            _expr.check_symbols(node, allowed)
        except _expr.ParseError as exc:
            line, col = self.locate(value, exc.column - 1)
            raise InstanceError(f"{where}: {exc.message}", line, col, "ParseError") from None
        except _expr.UndeclaredSymbol as exc:
            line, col = self.locate(value, (exc.column or 1) - 1)
            raise InstanceError(f"{where}: undeclared symbol {exc.name!r}", line, col, "UndeclaredSymbol") from None
        return value.strip()

    def names(self, value, where: str) -> tuple[str, ...]:
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            self.fail(f"{where} must be a list of symbol names", where)
        for v in value:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
                self.fail(f"{where}: {v!r} is not a symbol name", where)
        if len(set(value)) != len(value):
            self.fail(f"{where}: repeated symbol", where)
        return tuple(value)

    def str_list(self, value, allowed, where: str) -> tuple[str, ...]:
        if not isinstance(value, list):
            self.fail(f"{where} must be a list", where.split(".")[-1])
        return tuple(self.expression(v, allowed, f"{where}[{i}]") for i, v in enumerate(value))

    def table(self, value, where: str, keys: set[str]) -> dict:
        if not isinstance(value, dict):
            self.fail(f"{where} must be a table", where)
        extra = sorted(set(value) - keys)
        if extra:
            self.fail(f"{where}: unknown key {extra[0]!r}", extra[0])
        return value

    def tables(self, value, where: str, keys: set[str]) -> list[dict]:
        if not isinstance(value, list):
            self.fail(f"{where} must be an array of tables", where)
        return [self.table(v, where, keys) for v in value]

    # -- document -----------------------------------------------------------
    def read(self, doc: dict) -> InstanceFile:
        extra = sorted(set(doc) - _TOP)
        if extra:
            self.fail(f"unknown top-level key {extra[0]!r}", extra[0])
        constants = self.names(doc.get("constants", []), "constants")
        base = doc.get("base", "t")
        if not isinstance(base, str) or not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", base):
            self.fail("base must be a symbol name", "base")
        reserved = [c for c in constants + (base,) if re.fullmatch(r"u\d+", c)]
        if reserved or base in constants:
            self.fail(f"symbol {(reserved or [base])[0]!r} clashes with the model's names", "constants")
        ct = set(constants) | {base}

        model = self.table(doc.get("model", {}), "model", {"exponents"})
        exponents = self.str_list(model.get("exponents", []), ct, "model.exponents")
        us = {f"u{j + 1}" for j in range(len(exponents))}
        allowed = ct | us

        generators = self.str_list(doc.get("generators", []), allowed, "generators")

        eigenvalues = None
        if "equation" in doc:
            eq = self.table(doc["equation"], "equation", {"eigenvalues"})
            raw = eq.get("eigenvalues")
            if not isinstance(raw, list) or not raw:
                self.fail("equation.eigenvalues must be a nonempty list of [value, multiplicity]", "eigenvalues")
            pairs = []
            for i, item in enumerate(raw):
                if not isinstance(item, list) or len(item) != 2:
                    self.fail(f"equation.eigenvalues[{i}] must be [value, multiplicity]", "eigenvalues")
                value, mult = item
                try:
                    value = self.expression(value, set(constants), f"equation.eigenvalues[{i}]")
                except InstanceError as exc:
                    if exc.kind == "UndeclaredSymbol":
                        raise InstanceError(
                            exc.message.replace("undeclared symbol", "eigenvalue uses non-constant"),
                            exc.line,
                            exc.column,
                            "InvalidEigenvalue",
                        ) from None
                    raise
                if isinstance(mult, bool) or not isinstance(mult, int) or mult < 1:
                    self.fail(f"equation.eigenvalues[{i}]: multiplicity must be a positive integer", "eigenvalues", "InvalidEigenvalue")
                pairs.append((value, mult))
            eigenvalues = tuple(pairs)

        solutions = []
        for i, s in enumerate(self.tables(doc.get("solutions", []), "solutions", {"x", "coefficients", "z", "y"})):
            where = f"solutions[{i}]"
            if "x" not in s:
                self.fail(f"{where}: missing x", "solutions")
            given = [k for k in ("coefficients", "z", "y") if k in s]
            if len(given) != 1:
                self.fail(f"{where}: give exactly one of coefficients, z, y", "solutions")
            x = self.expression(s["x"], allowed, f"{where}.x")
            kind = given[0]
            if kind == "coefficients":
                blocks = s["coefficients"]
                if not isinstance(blocks, list) or not all(isinstance(b, list) for b in blocks):
                    self.fail(f"{where}.coefficients must be a list of lists", "coefficients")
                coeffs = tuple(
                    self.str_list(b, set(constants), f"{where}.coefficients[{j}]") for j, b in enumerate(blocks)
                )
                solutions.append(SolutionSpec(x, coefficients=coeffs))
            elif kind == "z":
                solutions.append(SolutionSpec(x, z=self.str_list(s["z"], allowed, f"{where}.z")))
            else:
                solutions.append(SolutionSpec(x, y=self.expression(s["y"], allowed, f"{where}.y")))

        exp_instances = []
        for i, p in enumerate(self.tables(doc.get("exp_instances", []), "exp_instances", {"a", "b"})):
            if set(p) != {"a", "b"}:
                self.fail(f"exp_instances[{i}] needs a and b", "exp_instances")
            exp_instances.append(
                (
                    self.expression(p["a"], allowed, f"exp_instances[{i}].a"),
                    self.expression(p["b"], allowed, f"exp_instances[{i}].b"),
                )
            )

        points = []
        for i, p in enumerate(self.tables(doc.get("points", []), "points", {"x", "y"})):
            if set(p) != {"x", "y"}:
                self.fail(f"points[{i}] needs x and y", "points")
            points.append(
                (self.expression(p["x"], allowed, f"points[{i}].x"), self.expression(p["y"], allowed, f"points[{i}].y"))
            )

        variety = None
        if "variety" in doc:
            variety = self.read_variety(doc["variety"], constants, allowed)

        return InstanceFile(
            constants,
            base,
            exponents,
            generators,
            eigenvalues,
            tuple(solutions),
            tuple(exp_instances),
            tuple(points),
            variety,
        )

    def read_variety(self, v, constants, allowed) -> VarietySpec:
        keys = {"ambient", "n", "m", "parameters", "x", "y", "z", "source", "representation", "x_equations", "y_equations"}
        v = self.table(v, "variety", keys)
        if "source" in v:
            src = v["source"]
            if src not in ("solutions", "exp_instances", "points"):
                self.fail("variety.source must be solutions, exp_instances or points", "source")
            if set(v) - {"source"}:
                self.fail("variety.source excludes other variety keys", "source")
            return VarietySpec(ambient="E" if src == "solutions" else "G", source=src)
        representation = v.get("representation", "parametrized")
        n = v.get("n")
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            self.fail("variety.n must be a positive integer", "n")
        if representation == "linear-binomial":
            cset = set(constants)
            xe, ye = [], []
            for i, eq in enumerate(self.tables(v.get("x_equations", []), "x_equations", {"coefficients", "rhs"})):
                coeffs = self.str_list(eq.get("coefficients", []), cset, f"variety.x_equations[{i}].coefficients")
                if len(coeffs) != n:
                    self.fail(f"variety.x_equations[{i}] needs {n} coefficients", "x_equations")
                xe.append((coeffs, self.expression(eq.get("rhs", "0"), cset, f"variety.x_equations[{i}].rhs")))
            for i, eq in enumerate(self.tables(v.get("y_equations", []), "y_equations", {"exponents", "gamma"})):
                exps = eq.get("exponents", [])
                if not isinstance(exps, list) or len(exps) != n or not all(
                    isinstance(e, int) and not isinstance(e, bool) for e in exps
                ):
                    self.fail(f"variety.y_equations[{i}] needs {n} integer exponents", "y_equations")
                gamma = self.expression(eq.get("gamma", "1"), cset, f"variety.y_equations[{i}].gamma")
                ye.append((tuple(exps), gamma))
            return VarietySpec(
                ambient="G", n=n, representation=representation, x_equations=tuple(xe), y_equations=tuple(ye)
            )
        if representation != "parametrized":
            self.fail(f"unknown variety representation {representation!r}", "representation")
        ambient = v.get("ambient", "G")
        if ambient not in ("G", "E"):
            self.fail("variety.ambient must be G or E", "ambient")
        params = self.names(v.get("parameters", []), "parameters")
        clash = set(params) & set(constants)
        if clash:
            self.fail(f"parameter {sorted(clash)[0]!r} is also a constant", "parameters")
        vsyms = set(constants) | set(params)
        x = self.str_list(v.get("x", []), vsyms, "variety.x")
        if ambient == "G":
            y = self.str_list(v.get("y", []), vsyms, "variety.y")
            if len(x) != n or len(y) != n:
                self.fail(f"variety in G_{n} needs {n} x and {n} y coordinates", "x")
            return VarietySpec("G", n, 1, params, x, y)
        m = v.get("m", len(x))
        z = v.get("z", [])
        if not isinstance(z, list) or len(z) != n:
            self.fail(f"variety.z must hold {n} blocks", "z")
        zs = tuple(self.str_list(b, vsyms, f"variety.z[{j}]") for j, b in enumerate(z))
        if len(x) != m or any(len(b) != m for b in zs):
            self.fail(f"variety in E-space needs blocks of length m = {m}", "z")
        return VarietySpec("E", n, m, params, x, (), zs)


def parse_instance(text: str) -> InstanceFile:
    """Validated structured form of an instance file."""
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        msg = str(exc)
        m = _TOML_LOC.search(msg)
        if m:
            line, col = int(m.group(1)), int(m.group(2))
        else:
            lines = text.split("\n")
            line, col = len(lines), len(lines[-1]) + 1
        raise InstanceError(re.sub(r"\s*\(at [^)]*\)", "", msg).strip(), line, col, "ParseError") from None
    return _Reader(text).read(doc)


def from_dict(data: dict) -> InstanceFile:
    """Inverse of :meth:`InstanceFile.to_dict`."""
    v = data.get("variety")
    variety = None
    if v is not None:
        variety = VarietySpec(
            v["ambient"],
            v["n"],
            v["m"],
            tuple(v["parameters"]),
            tuple(v["x"]),
            tuple(v["y"]),
            tuple(tuple(b) for b in v["z"]),
            v["source"],
            v["representation"],
            tuple((tuple(c), r) for c, r in v["x_equations"]),
            tuple((tuple(e), g) for e, g in v["y_equations"]),
        )
    eig = data.get("eigenvalues")
    return InstanceFile(
        tuple(data["constants"]),
        data["base"],
        tuple(data["exponents"]),
        tuple(data["generators"]),
        tuple((a, m) for a, m in eig) if eig is not None else None,
        tuple(
            SolutionSpec(
                s["x"],
                tuple(tuple(b) for b in s["coefficients"]) if s["coefficients"] is not None else None,
                tuple(s["z"]) if s["z"] is not None else None,
                s["y"],
            )
            for s in data["solutions"]
        ),
        tuple((a, b) for a, b in data["exp_instances"]),
        tuple((x, y) for x, y in data["points"]),
        variety,
    )


def serialize_instance(inst: InstanceFile) -> str:
    """TOML text that parses back to ``inst``."""
    doc: dict[str, Any] = {}
    if inst.constants:
        doc["constants"] = list(inst.constants)
    doc["base"] = inst.base
    if inst.generators:
        doc["generators"] = list(inst.generators)
    if inst.exponents:
        doc["model"] = {"exponents": list(inst.exponents)}
    if inst.eigenvalues is not None:
        doc["equation"] = {"eigenvalues": [[a, m] for a, m in inst.eigenvalues]}
    sols = []
    for s in inst.solutions:
        d: dict[str, Any] = {"x": s.x}
        if s.coefficients is not None:
            d["coefficients"] = [list(b) for b in s.coefficients]
        elif s.z is not None:
            d["z"] = list(s.z)
        else:
            d["y"] = s.y
        sols.append(d)
    if sols:
        doc["solutions"] = sols
    if inst.exp_instances:
        doc["exp_instances"] = [{"a": a, "b": b} for a, b in inst.exp_instances]
    if inst.points:
        doc["points"] = [{"x": x, "y": y} for x, y in inst.points]
    v = inst.variety
    if v is not None:
        if v.source is not None:
            doc["variety"] = {"source": v.source}
        elif v.representation == "linear-binomial":
            doc["variety"] = {
                "representation": v.representation,
                "n": v.n,
                "x_equations": [{"coefficients": list(c), "rhs": r} for c, r in v.x_equations],
                "y_equations": [{"exponents": list(e), "gamma": g} for e, g in v.y_equations],
            }
        else:
            d = {"ambient": v.ambient, "n": v.n, "parameters": list(v.parameters), "x": list(v.x)}
            if v.ambient == "G":
                d["y"] = list(v.y)
            else:
                d["m"] = v.m
                d["z"] = [list(b) for b in v.z]
            doc["variety"] = d
    return tomli_w.dumps(doc)


# --------------------------------------------------------------------------
# building library objects


def build_field(inst: InstanceFile) -> ExpField:
    return ExpField(inst.constants, inst.base, inst.exponents)


def build_equation(inst: InstanceFile) -> Equation:
    if inst.eigenvalues is None:
        raise InstanceError("this command needs an [equation] section", kind="MissingSection")
    return make_equation(inst.eigenvalues, inst.constants, inst.base)


def _constant(F: ExpField, text: str) -> FieldElement:
    c = F(text)
    if not is_constant(c):
        raise InvalidEigenvalue(f"{text!r} is not a constant")
    return c


def build_solutions(inst: InstanceFile, E: Equation, F: ExpField | None = None) -> list[Solution]:
    F = F or build_field(inst)
    out = []
    for s in inst.solutions:
        x = F(s.x)
        if s.coefficients is not None:
            coeffs = block_coefficients(E, [[_constant(F, a) for a in b] for b in s.coefficients])
            out.append(solution_from_coefficients(fundamental_system(E, x), coeffs))
        elif s.z is not None:
            z = [F(c) for c in s.z]
            if len(z) != E.n or not en_membership(E, x, z):
                raise NotASolution(f"z-list for x = {s.x} does not satisfy E_{E.n}")
            out.append(Solution(x, tuple(z)))
        else:
            y = F(s.y)
            if not satisfies(E, x, y):
                raise NotASolution(f"y = {s.y} does not solve the equation for x = {s.x}")
            out.append(solution_from_y(E, x, y))
    return out


def build_pairs(inst: InstanceFile, F: ExpField | None = None) -> list[tuple[FieldElement, FieldElement]]:
    F = F or build_field(inst)
    return [(F(a), F(b)) for a, b in inst.exp_instances]


def build_points(inst: InstanceFile, F: ExpField | None = None) -> list[tuple[FieldElement, FieldElement]]:
    F = F or build_field(inst)
    return [(F(x), F(y)) for x, y in inst.points]


def build_structure(inst: InstanceFile) -> FGStructure:
    F = build_field(inst)
    E = build_equation(inst) if inst.eigenvalues is not None else None
    sols = build_solutions(inst, E, F) if inst.solutions else []
    gens = [F(g) for g in inst.generators]
    return make_structure(gens, build_pairs(inst, F), sols, equation=E, field=F)


def _variety_value(K, text: str):
    env = {str(g): g for g in K.gens}
    return _expr.evaluate(_expr.parse_expression(text), env, number=K)


def build_variety(inst: InstanceFile, E: Equation | None = None):
    v = inst.variety
    if v is None:
        raise InstanceError("this command needs a [variety] section", kind="MissingSection")
    if v.source == "solutions":
        E = E or build_equation(inst)
        sols = build_solutions(inst, E)
        if not sols:
            raise InstanceError("variety.source = solutions but no solutions given", kind="MissingSection")
        return en_point_variety(E, sols)
    if v.source == "exp_instances":
        if not inst.exp_instances:
            raise InstanceError("variety.source = exp_instances but none given", kind="MissingSection")
        return exp_point_variety(build_pairs(inst))
    if v.source == "points":
        pts = build_points(inst)
        if not pts:
            raise InstanceError("variety.source = points but none given", kind="MissingSection")
        return exp_point_variety(pts)
    if v.representation == "linear-binomial":
        cfield = rational_field(inst.constants) if inst.constants else None

        def const(text):
            if cfield is None:
                val = _expr.evaluate(_expr.parse_expression(text), {}, number=Fraction)
                return Fraction(val)
            return _variety_value(cfield, text)

        A = tuple(tuple(const(c) for c in cs) for cs, _ in v.x_equations)
        alpha = tuple(const(r) for _, r in v.x_equations)
        B = tuple(tuple(e) for e, _ in v.y_equations)
        gamma = tuple(const(g) for _, g in v.y_equations)
        return LinearBinomialVariety(v.n, A, alpha, B, gamma, cfield)
    K = rational_field(tuple(inst.constants) + tuple(v.parameters))
    if v.ambient == "G":
        coords = [_variety_value(K, c) for c in v.x + v.y]
        return ParamVariety(K, tuple(v.parameters), tuple(coords), ("G", v.n))
    coords = [_variety_value(K, c) for c in v.x]
    for block in v.z:
        coords += [_variety_value(K, c) for c in block]
    return ParamVariety(K, tuple(v.parameters), tuple(coords), ("E", v.n, v.m))


__all__ = [
    "InstanceError",
    "InstanceFile",
    "SolutionSpec",
    "VarietySpec",
    "parse_instance",
    "serialize_instance",
    "from_dict",
    "build_field",
    "build_equation",
    "build_solutions",
    "build_pairs",
    "build_points",
    "build_structure",
    "build_variety",
    "locus_of_point",
]
