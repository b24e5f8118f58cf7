"""Finitely presented Exp- and E_n-structures inside the model.

A structure is a list of generators plus declared relation instances.  The
sigma counts are taken over the declared instances only; reports say so.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

from .expfield import ExpField, FieldElement, derive, is_constant, unify
from .lindeq import (
    Equation,
    NotASolution,
    Solution,
    decompose,
    en_membership,
    eval_poly,
    fundamental_system,
    g_poly,
    hankel_wronskian,
)
from .transcendence import LdimResult, ldim_mod_C, td_over_C


class ASViolation(AssertionError):
    """An Ax-Schanuel type inequality failed; in the sound model this is a bug."""


class NotProper(ValueError):
    pass


class InvalidInstance(ValueError):
    pass


class NotSubpresentation(ValueError):
    pass


def is_exp_pair(a: FieldElement, b: FieldElement) -> bool:
    """D b = b D a with b != 0."""
    F, (a, b) = unify(a, b)
    return bool(b) and derive(b) == b * derive(a)


@dataclass(frozen=True, eq=False)
class FGStructure:
    field: ExpField
    generators: tuple[FieldElement, ...] = ()
    exp_instances: tuple[tuple[FieldElement, FieldElement], ...] = ()
    en_instances: tuple[Solution, ...] = ()
    equation: Equation | None = None

    def elements(self) -> list[FieldElement]:
        out = list(self.generators)
        for a, b in self.exp_instances:
            out += [a, b]
        for s in self.en_instances:
            out += s.elements()
        return out

    def restrict(self, exp_idx: Sequence[int], en_idx: Sequence[int], generators=()) -> "FGStructure":
        return FGStructure(
            self.field,
            tuple(generators),
            tuple(self.exp_instances[i] for i in exp_idx),
            tuple(self.en_instances[i] for i in en_idx),
            self.equation,
        )

    def describe(self) -> dict:
        return {
            "generators": [str(g) for g in self.generators],
            "exp_instances": [[str(a), str(b)] for a, b in self.exp_instances],
            "en_instances": [s.describe() for s in self.en_instances],
        }


def make_structure(
    generators: Sequence[FieldElement] = (),
    exp_instances: Sequence[tuple] = (),
    en_instances: Sequence[Solution] = (),
    equation: Equation | None = None,
    field: ExpField | None = None,
    validate: bool = True,
) -> FGStructure:
    """Build a structure over one common field, checking every declared instance."""
    flat = list(generators) + [e for p in exp_instances for e in p] + [e for s in en_instances for e in s.elements()]
    if flat:
        F, flat = unify(*flat) if field is None else unify(field(0), *flat)
        if field is not None:
            flat = flat[1:]
    else:
        F = field if field is not None else (equation.base_field if equation else ExpField())
    it = iter(flat)
    gens = tuple(next(it) for _ in generators)
    pairs = tuple((next(it), next(it)) for _ in exp_instances)
    sols = tuple(Solution(next(it), tuple(next(it) for _ in s.z)) for s in en_instances)
    if validate:
        for a, b in pairs:
            if not is_exp_pair(a, b):
                raise InvalidInstance(f"({a}, {b}) is not an exp pair")
        if sols and equation is None:
            raise InvalidInstance("E_n instances need an equation")
        for s in sols:
            if not en_membership(equation, s.x, s.z):
                raise InvalidInstance(f"{s.describe()} does not satisfy E_n")
    return FGStructure(F, gens, pairs, sols, equation)


@dataclass(frozen=True)
class PredimReport:
    td: int
    sigma: int
    delta: int
    witness: tuple = ()
    all_constant: bool = False
    note: str = "sigma counts declared instances only"

    def to_dict(self) -> dict:
        return {
            "td": self.td,
            "sigma": self.sigma,
            "delta": self.delta,
            "relations": [list(r) for r in self.witness],
            "allConstant": self.all_constant,
            "note": self.note,
        }


def sigma_exp(S: FGStructure) -> LdimResult:
    return ldim_mod_C([a for a, _ in S.exp_instances])


def _report(S: FGStructure, sig: LdimResult) -> PredimReport:
    elems = S.elements()
    td = td_over_C(elems)
    delta = td - sig.dimension
    all_const = all(is_constant(e) for e in elems)
    if delta < 0:
        raise ASViolation(f"delta = {delta} < 0")
    if (delta == 0) != all_const:
        raise ASViolation(f"delta = {delta} but all-constant = {all_const}")
    return PredimReport(td, sig.dimension, delta, sig.relations, all_const)


def delta_exp(S: FGStructure) -> PredimReport:
    return _report(S, sigma_exp(S))


def epsilon_vector(E: Equation, sol: Solution) -> tuple[int, ...]:
    """epsilon(z_0) through the canonical decomposition; zeros for constant x."""
    if is_constant(sol.x):
        return (0,) * E.k
    FS = fundamental_system(E, sol.x)
    return decompose(FS, sol.z[0]).epsilon


def epsilon_tuple(E: Equation, sol: Solution) -> list[FieldElement]:
    """(eps_1 mu_1 x, ..., eps_k mu_k x)."""
    eps = epsilon_vector(E, sol)
    return [sol.x * mu if e else sol.x * 0 for e, mu in zip(eps, E.mu)]


def epsilon_sigma_en(S: FGStructure) -> LdimResult:
    if S.equation is None:
        return LdimResult(0, ())
    tup = [v for s in S.en_instances for v in epsilon_tuple(S.equation, s)]
    return ldim_mod_C(tup)


def delta_en(S: FGStructure) -> PredimReport:
    return _report(S, epsilon_sigma_en(S))


def delta_auto(S: FGStructure) -> int:
    if S.en_instances:
        return delta_en(S).delta
    return delta_exp(S).delta


# --------------------------------------------------------------------------
# Ax-Schanuel verifiers


@dataclass(frozen=True)
class ASReport:
    td: int
    ldim: int
    margin: int
    holds: bool
    relation: tuple[int, ...] | None = None
    relations: tuple = ()
    mode: str = "exp"

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "td": self.td,
            "ldim": self.ldim,
            "margin": self.margin,
            "holds": self.holds,
            "relation": list(self.relation) if self.relation is not None else None,
            "relations": [list(r) for r in self.relations],
        }


def verify_AS(pairs: Sequence[tuple[FieldElement, FieldElement]]) -> ASReport:
    """td C(a, b) >= ldim(a / C) + 1, and an integer relation when td <= n."""
    if not pairs:
        return ASReport(0, 0, 0, True)
    F, flat = unify(*[e for p in pairs for e in p])
    a = flat[0::2]
    b = flat[1::2]
    for ai, bi in zip(a, b):
        if is_constant(ai):
            raise ValueError(f"verify_AS needs nonconstant a's, got {ai}")
        if not is_exp_pair(ai, bi):
            raise InvalidInstance(f"({ai}, {bi}) is not an exp pair")
    td = td_over_C(a + b)
    lr = ldim_mod_C(a)
    margin = td - lr.dimension - 1
    relation = None
    if td <= len(a):
        if not lr.relations:
            raise ASViolation(f"td = {td} <= {len(a)} but no relation among the a's")
        relation = lr.relations[0]
        combo = F(0)
        for m, ai in zip(relation, a):
            combo = combo + ai * m
        if not is_constant(combo):
            raise ASViolation(f"relation {relation} does not give a constant")
    if margin < 0:
        raise ASViolation(f"td {td} < ldim {lr.dimension} + 1")
    return ASReport(td, lr.dimension, margin, True, relation, lr.relations)


def verify_AS_higher(E: Equation, solutions: Sequence[Solution], mode: str = "proper") -> ASReport:
    """Higher order inequality for proper solutions, or its epsilon form."""
    if mode not in ("proper", "epsilon"):
        raise ValueError(f"unknown mode {mode!r}")
    if not solutions:
        return ASReport(0, 0, 0, True, mode=mode)
    for s in solutions:
        if is_constant(s.x):
            raise ValueError("verify_AS_higher needs nonconstant x")
        if not en_membership(E, s.x, s.z):
            raise NotASolution(f"{s.describe()} does not satisfy E_n")
    elems = [e for s in solutions for e in s.elements()]
    td = td_over_C(elems)
    if mode == "proper":
        for s in solutions:
            dec = decompose(fundamental_system(E, s.x), s.z[0])
            if not all(bool(a) for a in dec.coefficients):
                raise NotProper(f"solution {s.describe()} is not proper")
        tup = [s.x * lam for lam in E.lambdas for s in solutions]
        lr = ldim_mod_C(tup)
    else:
        lr = ldim_mod_C([v for s in solutions for v in epsilon_tuple(E, s)])
    margin = td - lr.dimension - 1
    if margin < 0:
        raise ASViolation(f"{mode} form: td {td} < ldim {lr.dimension} + 1")
    return ASReport(td, lr.dimension, margin, True, None, lr.relations, mode)


# --------------------------------------------------------------------------
# strong substructures


def _index_in(e: FieldElement, pool: Sequence[FieldElement]) -> bool:
    return any(e == p for p in pool)


def _exp_key(p, pool) -> int | None:
    for i, q in enumerate(pool):
        if p[0] == q[0] and p[1] == q[1]:
            return i
    return None


def _en_key(s: Solution, pool: Sequence[Solution]) -> int | None:
    for i, q in enumerate(pool):
        if s.x == q.x and all(a == b for a, b in zip(s.z, q.z)):
            return i
    return None


@dataclass(frozen=True)
class StrongReport:
    holds: bool
    family: str
    checked: int
    failures: tuple = ()

    def to_dict(self) -> dict:
        return {"holds": self.holds, "family": self.family, "checked": self.checked, "failures": list(self.failures)}


def strong_substructure(
    A: FGStructure,
    B: FGStructure,
    family: Sequence[FGStructure] | None = None,
    delta: Callable[[FGStructure], int] = delta_auto,
) -> StrongReport:
    """delta(X cap A) <= delta(X) over a finite family of X inside B."""
    exp_in_B = [_exp_key(p, B.exp_instances) for p in A.exp_instances]
    en_in_B = [_en_key(s, B.en_instances) for s in A.en_instances]
    b_elems = B.elements()
    if None in exp_in_B or None in en_in_B or not all(_index_in(g, b_elems) for g in A.generators):
        raise NotSubpresentation("A is not a sub-presentation of B")
    if family is None:
        family_name = "all sub-presentations generated by subsets of B's declared instances"
        family = []
        ne, nn = len(B.exp_instances), len(B.en_instances)
        for r in range(ne + nn + 1):
            for combo in combinations(range(ne + nn), r):
                family.append(B.restrict([i for i in combo if i < ne], [i - ne for i in combo if i >= ne]))
        family.append(B)
    else:
        family_name = "explicit"
    a_exp = set(i for i in exp_in_B)
    a_en = set(i for i in en_in_B)
    failures = []
    for idx, X in enumerate(family):
        xe = [i for i, p in enumerate(X.exp_instances) if _exp_key(p, B.exp_instances) in a_exp]
        xn = [i for i, s in enumerate(X.en_instances) if _en_key(s, B.en_instances) in a_en]
        gens = [g for g in X.generators if _index_in(g, A.elements())]
        XA = X.restrict(xe, xn, gens)
        d_xa, d_x = delta(XA), delta(X)
        if d_xa > d_x:
            failures.append({"index": idx, "deltaXcapA": d_xa, "deltaX": d_x})
    return StrongReport(not failures, family_name, len(family), tuple(failures))


# --------------------------------------------------------------------------
# the Exp / E_n translation


def lift_pair(E: Equation, a: FieldElement, b: FieldElement) -> Solution:
    """Exp(a, b) as the E_n tuple (a / mu_1, b, mu_1 b, ..., mu_1^{n-1} b)."""
    mu = E.mu[0]
    F, (a, b) = unify(a, b)
    x = a / F(mu)
    return Solution(x, tuple(b * F(mu) ** j for j in range(E.n)))


def exp_view(S: FGStructure) -> list[tuple[FieldElement, FieldElement]]:
    """Declared exp pairs plus (mu_i x, y_i) for every block used by an E_n instance."""
    pairs = list(S.exp_instances)
    E = S.equation
    for s in S.en_instances:
        if is_constant(s.x):
            continue
        FS = fundamental_system(E, s.x)
        eps = decompose(FS, s.z[0]).epsilon
        for i, e in enumerate(eps):
            if e:
                a = FS.x * E.mu[i]
                pairs.append((a, FS.leaders[i]))
    return pairs


def en_view(S: FGStructure) -> list[Solution]:
    sols = list(S.en_instances)
    if S.equation is not None:
        sols += [lift_pair(S.equation, a, b) for a, b in S.exp_instances]
    return sols


@dataclass(frozen=True)
class SigmaEquality:
    sigma_exp: int
    sigma_en: int

    @property
    def equal(self) -> bool:
        return self.sigma_exp == self.sigma_en

    def __bool__(self):
        return self.equal

    def to_dict(self) -> dict:
        return {"sigmaExp": self.sigma_exp, "sigmaEn": self.sigma_en, "equal": self.equal}


def sigma_equality_check(S: FGStructure) -> SigmaEquality:
    """sigma over the exp view versus the epsilon-sigma over the E_n view."""
    pairs = exp_view(S)
    for a, b in pairs:
        if not is_exp_pair(a, b):
            raise InvalidInstance(f"translated pair ({a}, {b}) is not an exp pair")
    s_exp = ldim_mod_C([a for a, _ in pairs]).dimension
    if S.equation is None:
        return SigmaEquality(s_exp, s_exp)
    sols = en_view(S)
    tup = [v for s in sols for v in epsilon_tuple(S.equation, s)]
    s_en = ldim_mod_C(tup).dimension
    return SigmaEquality(s_exp, s_en)


# --------------------------------------------------------------------------
# axiom validators


def _check(name: str, passed: bool, detail: str = "") -> dict:
    return {"axiom": name, "passed": bool(passed), "detail": detail}


def validate_axioms(S: FGStructure) -> dict:
    """Check what the axioms say about the declared data of S."""
    checks = []
    F = S.field
    E = S.equation
    pairs = list(S.exp_instances)
    # A4: subgroup of G_1 containing G_1(C)
    ok = True
    for i, (a1, b1) in enumerate(pairs):
        ok &= is_exp_pair(-a1, 1 / b1)
        for a2, b2 in pairs[i:]:
            ok &= is_exp_pair(a1 + a2, b1 * b2)
    for c in [F(0), F(1)] + [F.const(n) for n in F.constants]:
        ok &= is_exp_pair(c, F(2))
    checks.append(_check("A4 group closure", ok, f"{len(pairs)} declared pairs"))
    # A5': fibres are cosets of the constants
    ok = True
    for i, (a1, b1) in enumerate(pairs):
        for a2, b2 in pairs[i + 1 :]:
            ok &= is_constant(a1 - a2) == is_constant(b1 / b2)
    checks.append(_check("A5 fibres", ok))
    elems = S.elements()
    if E is not None:
        # A2': C is defined by E_n(c, 1, 0, ..., 0)
        zeros = [F(0)] * (E.n - 1)
        ok = all(en_membership(E, e, [F(1)] + zeros) == is_constant(e) for e in elems + [F.t])
        checks.append(_check("A2 constants", ok))
        # Exp(x, y) <-> E_n(x / lambda_1, y, lambda_1 y, ...)
        ok = all(en_membership(E, s.x, s.z) for s in (lift_pair(E, a, b) for a, b in pairs))
        checks.append(_check("Exp definable from E_n", ok))
        # A3': reconstruction from exp witnesses
        ok = True
        for s in S.en_instances:
            ok &= _a3_reconstructs(E, s)
        checks.append(_check("A3 reconstruction", ok, f"{len(S.en_instances)} instances"))
        # AS' for instances with C-independent z-blocks
        good = [s for s in S.en_instances if not is_constant(s.x) and all(not is_constant(z) for z in s.z)]
        good = [s for s in good if bool(hankel_wronskian(s.x, s.z[0], E.n))]
        if good:
            td = td_over_C([e for s in good for e in s.elements()])
            ld = ldim_mod_C([s.x * lam for lam in E.lambdas for s in good]).dimension
            checks.append(_check("AS'", td >= ld + 1, f"td={td}, ldim={ld}"))
    checks.append(_check("NT", any(not is_constant(e) for e in elems + [F.t])))
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}


def _a3_reconstructs(E: Equation, s: Solution) -> bool:
    if is_constant(s.x):
        return all(is_constant(z) for z in s.z)
    FS = fundamental_system(E, s.x)
    dec = decompose(FS, s.z[0])
    G = FS.field
    x = FS.x
    for y, mu in zip(FS.leaders, E.mu):
        if not is_exp_pair(x * mu, y):
            return False
    blocks = dec.blocks
    for l, zl in enumerate(s.z):
        acc = G(0)
        for i, block in enumerate(blocks):
            for j, a in enumerate(block):
                if a:
                    g = g_poly(E, i + 1, j, l)
                    acc = acc + a * eval_poly([G(c) for c in g], x) * FS.leaders[i]
        if acc != zl:
            return False
    return True
