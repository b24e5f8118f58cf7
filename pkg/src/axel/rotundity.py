"""Varieties in G_n and in the E_n ambient space, and bounded rotundity checks.

A parametrized variety is the Zariski closure of the image of a rational map
w -> (coordinates); its dimension and the dimensions of its [M]-images are
Jacobian ranks.  Rotundity quantifies over all integer matrices M, so the
checks here enumerate one canonical matrix per rational row space with
entries bounded by N and report the bound alongside the verdict.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import gcd
from typing import Iterable, Sequence

from sympy.polys.fields import FracElement, FracField

from .algebra import (
    DimensionMismatch,
    ExactMatrix,
    SingularMatrix,
    _int_exquo,
    bareiss_echelon,
    coerce,
    embed,
    evaluate_at,
    flatten_to_q,
    q_kernel_basis,
    rational_field,
    rowspace_canonical,
    substitute,
    symbols_used,
    to_text,
    transpose,
)
from .expfield import FieldElement, derive, unify
from .lindeq import Equation, Solution, en_membership, h_entries

DEFAULT_BOUND = 3
DEFAULT_DEGREE_BUDGET = 8
MONOMIAL_CAP = 120


class UnsupportedRepresentation(ValueError):
    pass


class SubstitutionPole(ZeroDivisionError):
    pass


class DependentEigenvalues(ValueError):
    pass


class NotExpPoint(ValueError):
    pass


class ZeroScalar(ValueError):
    pass


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("AXEL_THREADS", "1")))
    except ValueError:
        return 1


# --------------------------------------------------------------------------
# points and the [M]-map


@dataclass(frozen=True, eq=False)
class GroupPoint:
    x: tuple[FieldElement, ...]
    y: tuple[FieldElement, ...]

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise DimensionMismatch("x and y parts differ in length")
        if any(not v for v in self.y):
            raise ValueError("multiplicative coordinates must be nonzero")

    def __eq__(self, other):
        return (
            isinstance(other, GroupPoint)
            and len(self.x) == len(other.x)
            and all(a == b for a, b in zip(self.x + self.y, other.x + other.y))
        )


def m_map(M: Sequence[Sequence[int]], p: GroupPoint) -> GroupPoint:
    """u_i = sum m_ij x_j, v_i = prod y_j^m_ij."""
    n = len(p.x)
    if any(len(r) != n for r in M):
        raise DimensionMismatch(f"matrix width differs from n = {n}")
    elems = list(p.x) + list(p.y)
    F, elems = unify(*elems)
    xs, ys = elems[:n], elems[n:]
    us, vs = [], []
    for row in M:
        u, v = F(0), F(1)
        for m, x, y in zip(row, xs, ys):
            if m:
                u = u + x * m
                v = v * y**m
        us.append(u)
        vs.append(v)
    return GroupPoint(tuple(us), tuple(vs))


@dataclass(frozen=True)
class MMatrix:
    rows: tuple[tuple[int, ...], ...]
    canonical: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "MMatrix":
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        return cls(rows, rowspace_canonical(rows) if rows else ())

    @property
    def rank(self) -> int:
        return len(self.canonical)


# --------------------------------------------------------------------------
# varieties


@dataclass(frozen=True, eq=False)
class ParamVariety:
    """Closure of the image of w -> coords; coords in ambient order.

    Ambient ``("G", n)``: coordinates (x_1..x_n, y_1..y_n).  Ambient
    ``("E", n, m)``: coordinates (x_1..x_m, z_10..z_m0, ..., z_1,n-1..z_m,n-1).
    Symbols of ``field`` other than ``params`` are constants.
    """

    field: FracField
    params: tuple[str, ...]
    coords: tuple[FracElement, ...]
    ambient: tuple = ()

    def __post_init__(self):
        if self.ambient and self.ambient[0] == "G":
            n = self.ambient[1]
            if len(self.coords) != 2 * n:
                raise DimensionMismatch(f"G_{n} needs {2 * n} coordinates")
            if any(not y for y in self.coords[n:]):
                raise ValueError("multiplicative coordinate is identically zero")
        if self.ambient and self.ambient[0] == "E":
            _, n, m = self.ambient
            if len(self.coords) != m * (n + 1):
                raise DimensionMismatch(f"E-space needs {m * (n + 1)} coordinates")

    @property
    def kind(self) -> str:
        return self.ambient[0]

    @property
    def n(self) -> int:
        return self.ambient[1]

    @property
    def param_gens(self) -> list[FracElement]:
        gens = {str(g): g for g in self.field.gens}
        return [gens[p] for p in self.params]

    @property
    def constants(self) -> tuple[str, ...]:
        return tuple(str(g) for g in self.field.gens if str(g) not in self.params)

    def xs(self):
        return self.coords[: self.n]

    def ys(self):
        return self.coords[self.n :]

    def dimension(self) -> int:
        from .transcendence import image_dim

        return image_dim(list(self.coords), self.param_gens)

    def describe(self) -> dict:
        return {
            "representation": "parametrized",
            "ambient": list(self.ambient),
            "parameters": list(self.params),
            "coordinates": [to_text(c) for c in self.coords],
        }


@dataclass(frozen=True, eq=False)
class LinearBinomialVariety:
    """{A x = alpha} x {prod y^B_row = gamma} inside G_n.

    ``A`` rows hold constants (Fractions or elements of ``cfield``); ``B``
    rows are integer exponent vectors.  The system is assumed consistent and
    the binomial lattice saturated, so the variety is an irreducible coset.
    """

    n: int
    A: tuple[tuple, ...] = ()
    alpha: tuple = ()
    B: tuple[tuple[int, ...], ...] = ()
    gamma: tuple = ()
    cfield: FracField | None = None

    kind = "G"

    @property
    def ambient(self):
        return ("G", self.n)

    def _rank_a(self, extra=()) -> int:
        rows = [list(r) for r in self.A] + [list(r) for r in extra]
        if not rows:
            return 0
        return ExactMatrix(rows, self.cfield).rank()

    def _rank_b(self, extra=()) -> int:
        rows = [list(r) for r in self.B] + [list(r) for r in extra]
        if not rows:
            return 0
        return ExactMatrix(rows).rank()

    def dimension(self) -> int:
        return 2 * self.n - self._rank_a() - self._rank_b()

    def describe(self) -> dict:
        def s(c):
            return to_text(c) if isinstance(c, FracElement) else str(c)

        return {
            "representation": "linear-binomial",
            "ambient": ["G", self.n],
            "xEquations": [{"coefficients": [s(c) for c in r], "rhs": s(a)} for r, a in zip(self.A, self.alpha)],
            "yEquations": [{"exponents": list(r), "gamma": s(g)} for r, g in zip(self.B, self.gamma)],
        }


# --------------------------------------------------------------------------
# dim [M](V)


class _Jacobians:
    """J_x and J_ylog = (dy/dw)/y of a parametrized variety, plus evaluations."""

    def __init__(self, V: ParamVariety):
        self.V = V
        n = V.n
        ws = V.param_gens
        self.jx = [[x.diff(w) for w in ws] for x in V.xs()]
        self.jy = [[y.diff(w) / y for w in ws] for y in V.ys()]
        self.d = len(ws)
        self.points = []
        rng = random.Random(1729 + 31 * n + self.d)
        tries = 0
        while len(self.points) < 2 and tries < 20:
            tries += 1
            pt = [Fraction(rng.randint(-89, 89), rng.randint(1, 11)) for _ in V.field.gens]
            try:
                ex = [[evaluate_at(e, pt) for e in row] for row in self.jx]
                ey = [[evaluate_at(e, pt) for e in row] for row in self.jy]
            except ZeroDivisionError:
                continue
            self.points.append(_integer_columns(ex, ey))

    def rank_at(self, M, k: int) -> list[int]:
        out = []
        for ex, ey in self.points:
            rows = [[sum(m * e for m, e in zip(mr, col)) for col in zip(*ex)] for mr in M]
            rows += [[sum(m * e for m, e in zip(mr, col)) for col in zip(*ey)] for mr in M]
            out.append(bareiss_echelon(rows, 1, _int_exquo)[0] if rows and rows[0] else 0)
        return out

    def rank_exact(self, M) -> int:
        K = self.V.field
        zero = K.zero
        rows = []
        for J in (self.jx, self.jy):
            for mr in M:
                row = []
                for j in range(self.d):
                    acc = zero
                    for m, Jr in zip(mr, J):
                        if m:
                            acc = acc + Jr[j] * m
                    row.append(acc)
                rows.append(row)
        if not rows or not rows[0]:
            return 0
        return ExactMatrix(rows, K).rank()


def _integer_columns(ex, ey):
    """Scale each column of the stacked [ex; ey] by a common denominator."""
    n_rows = len(ex) + len(ey)
    stacked = ex + ey
    d = len(stacked[0]) if stacked else 0
    scales = []
    for j in range(d):
        den = 1
        for i in range(n_rows):
            q = stacked[i][j].denominator
            den = den * q // gcd(den, q)
        scales.append(den)
    ix = [[int(r[j] * scales[j]) for j in range(d)] for r in ex]
    iy = [[int(r[j] * scales[j]) for j in range(d)] for r in ey]
    return ix, iy


@lru_cache(maxsize=64)
def _cached_jacobians(V: ParamVariety) -> _Jacobians:
    return _Jacobians(V)


def dim_m_image(M: Sequence[Sequence[int]], V, need: int | None = None) -> int:
    """dim [M](V).

    With ``need`` given, a certified lower bound >= need may be returned
    instead of the exact value (random specializations only ever lower the
    rank); below ``need`` the result is always exact.
    """
    M = [list(r) for r in M]
    if not M:
        return 0
    if isinstance(V, LinearBinomialVariety):
        if any(len(r) != V.n for r in M):
            raise DimensionMismatch("matrix width differs from n")
        return V._rank_a(M) - V._rank_a() + V._rank_b(M) - V._rank_b()
    if V.kind != "G":
        raise UnsupportedRepresentation("[M] acts on varieties in G_n")
    if any(len(r) != V.n for r in M):
        raise DimensionMismatch("matrix width differs from n")
    J = _cached_jacobians(V)
    if need is not None:
        ranks = J.rank_at(M, len(M))
        if ranks and max(ranks) >= need:
            return max(ranks)
    return J.rank_exact(M)


def m_image(M: Sequence[Sequence[int]], V: ParamVariety) -> ParamVariety:
    """[M](V) as a parametrized variety (composition of rational maps)."""
    xs, ys = V.xs(), V.ys()
    K = V.field
    us, vs = [], []
    for row in M:
        u, v = K.zero, K.one
        for m, x, y in zip(row, xs, ys):
            if m:
                u = u + x * m
                v = v * y**m if m > 0 else v / y ** (-m)
        us.append(u)
        vs.append(v)
    return ParamVariety(K, V.params, tuple(us + vs), ("G", len(M)))


def dim_m_image_oracle(M: Sequence[Sequence[int]], V: ParamVariety) -> int:
    """image_dim of the composed parametrization."""
    from .transcendence import image_dim

    W = m_image(M, V)
    return image_dim(list(W.coords), V.param_gens, exact=True)


# --------------------------------------------------------------------------
# canonical enumeration of integer matrices


def _hnf_shapes(n: int, k: int, N: int) -> Iterable[tuple[tuple[int, ...], ...]]:
    for pivots in combinations(range(n), k):
        for pvals in product(range(1, N + 1), repeat=k):
            slots = []
            for i, c in enumerate(pivots):
                row_slots = []
                for col in range(n):
                    if col < c:
                        row_slots.append((0,))
                    elif col == c:
                        row_slots.append((pvals[i],))
                    elif col in pivots:
                        j = pivots.index(col)
                        row_slots.append(tuple(range(0, pvals[j])))
                    else:
                        row_slots.append(tuple(range(-N, N + 1)))
                slots.append(row_slots)
            flat = [s for r in slots for s in r]
            for vals in product(*flat):
                yield tuple(tuple(vals[i * n : (i + 1) * n]) for i in range(k))


@lru_cache(maxsize=None)
def canonical_matrices(n: int, N: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Canonical (saturated HNF) representatives with entries bounded by N.

    Exactly one matrix per rational row space whose canonical form has
    |entries| <= N; ordered by decreasing rank, then lexicographically.
    """
    out = []
    for k in range(n, 0, -1):
        found = []
        for M in _hnf_shapes(n, k, N):
            if any(_row_gcd(r) != 1 for r in M):
                continue
            if rowspace_canonical(M) == M:
                found.append(M)
        found.sort()
        out.extend(found)
    return tuple(out)


def _row_gcd(r) -> int:
    g = 0
    for x in r:
        g = gcd(g, x)
    return g


@dataclass(frozen=True)
class RotundityVerdict:
    verdict: str  # "rotund-up-to-bound" | "violated"
    bound: int
    strong: bool
    violating: tuple[tuple[int, ...], ...] | None = None
    violating_dim: int | None = None
    violating_rank: int | None = None
    checked: int = 0
    min_margin: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict == "rotund-up-to-bound"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "bound": self.bound,
            "strong": self.strong,
            "violatingMatrix": [list(r) for r in self.violating] if self.violating is not None else None,
            "violatingDim": self.violating_dim,
            "violatingRank": self.violating_rank,
            "checked": self.checked,
            "minMarginLowerBoundByRank": {str(k): v for k, v in sorted(self.min_margin.items())},
        }


def check_exp_rotund(V, bound: int = DEFAULT_BOUND, strong: bool = False, threads: int | None = None) -> RotundityVerdict:
    """dim [M](V) >= rank M (+1 if strong) over canonical M with entries <= bound."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    n = V.n
    mats = canonical_matrices(n, bound)
    extra = 1 if strong else 0
    threads = thread_count() if threads is None else threads

    def evaluate(M):
        k = len(M)
        need = k + extra
        d = dim_m_image(M, V, need=need)
        return k, d, d - need

    if isinstance(V, ParamVariety):
        _cached_jacobians(V)  # build once before fanning out
    margins: dict = {}
    checked = 0
    chunk = max(1, 64 * threads)
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for start in range(0, len(mats), chunk):
            batch = mats[start : start + chunk]
            results = list(pool.map(evaluate, batch)) if pool else [evaluate(M) for M in batch]
            for M, (k, d, margin) in zip(batch, results):
                checked += 1
                if margin < 0:
                    return RotundityVerdict("violated", bound, strong, M, d, k, checked, margins)
                margins[k] = min(margins.get(k, margin), margin)
    finally:
        if pool:
            pool.shutdown()
    return RotundityVerdict("rotund-up-to-bound", bound, strong, None, None, None, checked, margins)


# --------------------------------------------------------------------------
# freeness


@dataclass(frozen=True)
class FreeVerdict:
    free: bool
    additive: tuple[tuple[int, ...], ...] = ()
    multiplicative: tuple[tuple[int, ...], ...] = ()

    def __bool__(self):
        return self.free

    def to_dict(self) -> dict:
        return {
            "free": self.free,
            "additiveRelations": [list(r) for r in self.additive],
            "multiplicativeRelations": [list(r) for r in self.multiplicative],
        }


def _q_relations(columns: list[list[FracElement]], n: int) -> list[tuple[int, ...]]:
    """{m in Q^n : sum_i m_i J[i][j] = 0 for all j}."""
    conditions = []
    for col in columns:
        if not any(col):
            continue
        conditions += transpose(flatten_to_q(list(col)))
    return q_kernel_basis(conditions, n)


def check_exp_free(V) -> FreeVerdict:
    """No constant Z-combination of x's, no constant monomial in y's, generically."""
    if isinstance(V, LinearBinomialVariety):
        mult = tuple(tuple(r) for r in rowspace_canonical(V.B)) if V.B else ()
        add = _rational_rowspace(V)
        return FreeVerdict(not add and not mult, add, mult)
    if V.kind != "G":
        raise UnsupportedRepresentation("freeness is defined for varieties in G_n")
    J = _cached_jacobians(V)
    add = _q_relations([list(c) for c in zip(*J.jx)], V.n) if J.d else q_kernel_basis([], V.n)
    mult = _q_relations([list(c) for c in zip(*J.jy)], V.n) if J.d else q_kernel_basis([], V.n)
    return FreeVerdict(not add and not mult, tuple(add), tuple(mult))


def _rational_rowspace(V: LinearBinomialVariety) -> tuple[tuple[int, ...], ...]:
    """Rational vectors in the C-row space of A, as a saturated basis."""
    if not V.A:
        return ()
    F = V.cfield
    if F is None:
        return tuple(rowspace_canonical([[int(x * _den(r)) for x in r] for r in V.A]))
    kernel = _field_kernel([list(r) for r in V.A], F, V.n)
    if not kernel:
        return tuple(tuple(int(i == j) for j in range(V.n)) for i in range(V.n))
    conditions = []
    for vec in kernel:
        conditions += transpose(flatten_to_q([coerce(v, F) for v in vec]))
    rels = q_kernel_basis(conditions, V.n)
    return tuple(rowspace_canonical(rels)) if rels else ()


def _den(r) -> int:
    d = 1
    for x in r:
        q = Fraction(x).denominator
        d = d * q // gcd(d, q)
    return d


def _field_kernel(rows: list[list], F: FracField, n: int) -> list[list[FracElement]]:
    """Right kernel basis over F by Gauss-Jordan."""
    A = [[coerce(x, F) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        pv = A[r][c]
        A[r] = [x / pv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    basis = []
    for f in (c for c in range(n) if c not in pivots):
        v = [F.zero] * n
        v[f] = F.one
        for row, pc in zip(A, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


# --------------------------------------------------------------------------
# membership of one parametrized image in another


@dataclass(frozen=True)
class Membership:
    answer: str  # "yes" | "no" | "unknown"
    method: str = ""
    certificate: str | None = None

    def to_dict(self) -> dict:
        return {"answer": self.answer, "method": self.method, "certificate": self.certificate}


def _field_with(symbols: Sequence[str]) -> FracField:
    return rational_field(tuple(symbols))


def _try_solve(target: ParamVariety, psi: Sequence[FracElement]) -> bool:
    """Find w' with target(w') = psi(w) by successive linear elimination."""
    K = target.field
    if all(c == p for c, p in zip(target.coords, psi)):
        return True
    primed = {w: f"{w}__p" for w in target.params}
    names = [str(g) for g in K.gens] + list(primed.values())
    B = _field_with(names)
    gens = {str(g): g for g in B.gens}
    assigned: dict[str, FracElement] = {}
    # rename params of target to primed symbols
    images = [gens[primed[str(g)]] if str(g) in primed else gens[str(g)] for g in K.gens]
    lhs = [substitute(c, images, B) for c in target.coords]
    # parameters the target ignores can take any value
    unknown = set().union(*(symbols_used(L) for L in lhs)) & set(primed.values())
    rhs = [embed(p, B) for p in psi]
    for _ in range(len(unknown) + 1):
        progress = False
        for L, R in zip(lhs, rhs):
            used = symbols_used(L) & unknown
            if len(used) != 1:
                continue
            (name,) = used
            idx = names.index(name)
            num = (L - R).numer
            if max(m[idx] for m in num.itermonoms()) != 1:
                continue
            # num = a * w + b with a, b free of w
            a_terms, b_terms = {}, {}
            for mono, c in num.terms():
                if mono[idx]:
                    a_terms[mono[:idx] + (0,) + mono[idx + 1 :]] = c
                else:
                    b_terms[mono] = c
            a, b = B.ring.from_dict(a_terms), B.ring.from_dict(b_terms)
            if not a:
                continue
            sol = -B(b) / B(a)
            assigned[name] = sol
            unknown.discard(name)
            sub = [assigned.get(str(g), g) for g in B.gens]
            lhs = [substitute(x, sub, B) for x in lhs]
            progress = True
            break
        if not unknown:
            break
        if not progress:
            return False
    if unknown:
        return False
    return all(L == R for L, R in zip(lhs, rhs))


def _monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    out = []

    def rec(prefix, left, i):
        if i == nvars:
            out.append(tuple(prefix))
            return
        for e in range(left + 1):
            rec(prefix + [e], left - e, i + 1)

    rec([], degree, 0)
    out.sort(key=lambda m: (sum(m), m))
    return out


def _vanishing_certificate(target: ParamVariety, psi: Sequence[FracElement], budget: int):
    """A polynomial vanishing on target's image but not on psi, if one is found."""
    K = target.field
    consts = [g for g in K.gens if str(g) not in target.params]
    funcs = list(target.coords) + consts
    pfuncs = list(psi) + consts
    nv = len(funcs)
    rng = random.Random(4242 + nv)
    for degree in range(1, budget + 1):
        monos = _monomials(nv, degree)
        if len(monos) > MONOMIAL_CAP:
            break
        rows = []
        tries = 0
        while len(rows) < len(monos) + 8 and tries < 4 * len(monos) + 40:
            tries += 1
            pt = [Fraction(rng.randint(-60, 60), rng.randint(1, 9)) for _ in K.gens]
            try:
                vals = [evaluate_at(f, pt) for f in funcs]
            except ZeroDivisionError:
                continue
            rows.append([_mono_value(m, vals) for m in monos])
        kernel = q_kernel_basis(rows, len(monos))
        for vec in kernel:
            P = _poly_expr(vec, monos)
            if _apply_poly(vec, monos, funcs, K) != 0:
                continue
            if _apply_poly(vec, monos, pfuncs, K) != 0:
                return P
    return None


def _mono_value(m, vals):
    acc = Fraction(1)
    for e, v in zip(m, vals):
        if e:
            acc *= v**e
    return acc


def _apply_poly(vec, monos, funcs, K):
    acc = K.zero
    for c, m in zip(vec, monos):
        if not c:
            continue
        term = K.one * c
        for e, f in zip(m, funcs):
            if e:
                term = term * f**e
        acc = acc + term
    return acc


def _poly_expr(vec, monos) -> str:
    parts = []
    for c, m in zip(vec, monos):
        if c:
            mono = "*".join(f"X{i + 1}^{e}" if e > 1 else f"X{i + 1}" for i, e in enumerate(m) if e)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
    return " + ".join(parts)


def image_contained(target: ParamVariety, psi: Sequence[FracElement], budget: int = DEFAULT_DEGREE_BUDGET) -> Membership:
    """Is the closure of w -> psi(w) inside the closure of target's image?

    ``psi`` lives in target's field (same parameters).  "yes" comes with an
    explicit reparametrization, "no" with a polynomial that vanishes on the
    target but not on psi; otherwise "unknown".
    """
    from .transcendence import image_dim

    psi = [embed(p, target.field) for p in psi]
    if _try_solve(target, psi):
        return Membership("yes", "reparametrization")
    dim_target = image_dim(list(target.coords), target.param_gens)
    if dim_target == len(target.coords):
        return Membership("yes", "target is dense in its ambient space")
    if image_dim(psi, target.param_gens) > dim_target:
        return Membership("no", "dimension")
    cert = _vanishing_certificate(target, psi, budget)
    if cert is not None:
        return Membership("no", "vanishing polynomial", cert)
    return Membership("unknown", f"no decision within degree budget {budget}")


# --------------------------------------------------------------------------
# E_n-space varieties


def _blocks(V: ParamVariety):
    """x-bar and z-blocks z_j-bar (j = 0..n-1) of an E-space variety."""
    _, n, m = V.ambient
    xs = V.coords[:m]
    zs = [V.coords[m * (j + 1) : m * (j + 2)] for j in range(n)]
    return list(xs), [list(z) for z in zs]


def pr_j(V: ParamVariety, j: int = 0) -> ParamVariety:
    """(x-bar, z_j-bar) as a variety in G_m."""
    xs, zs = _blocks(V)
    return ParamVariety(V.field, V.params, tuple(xs + zs[j]), ("G", len(xs)))


def _mu_values(E: Equation, K: FracField) -> list[FracElement]:
    return [embed(m.value, K) for m in E.mu]


def _require_constants(E: Equation, V: ParamVariety):
    missing = set(E.base_field.constants) - set(V.constants)
    if missing:
        raise ValueError(f"variety field lacks constants {sorted(missing)}")


@dataclass(frozen=True)
class EnExpVerdict:
    rotund: RotundityVerdict
    closure: Membership

    @property
    def holds(self) -> bool:
        return self.rotund.holds and self.closure.answer == "yes"

    @property
    def verdict(self) -> str:
        if not self.rotund.holds or self.closure.answer == "no":
            return "violated"
        return "holds" if self.closure.answer == "yes" else "unknown"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "rotundity": self.rotund.to_dict(), "closure": self.closure.to_dict()}


def check_en_exp_rotund(
    E: Equation, V: ParamVariety, bound: int = DEFAULT_BOUND, budget: int = DEFAULT_DEGREE_BUDGET
) -> EnExpVerdict:
    """pr_1(V) Exp-rotund and (x, y) in pr_1(V) => (x, y, mu_1 y, ..., mu_1^{n-1} y) in V."""
    _require_constants(E, V)
    if V.ambient[1] != E.n:
        raise DimensionMismatch("variety order differs from the equation's")
    V1 = pr_j(V, 0)
    rot = check_exp_rotund(V1, bound)
    xs, zs = _blocks(V)
    mu = _mu_values(E, V.field)[0]
    psi = list(xs)
    for j in range(E.n):
        psi += [z * mu**j for z in zs[0]]
    return EnExpVerdict(rot, image_contained(V, psi, budget))


def _l_matrix(E: Equation, x: FracElement, K: FracField) -> ExactMatrix:
    if not x:
        raise SubstitutionPole("L_x has a pole at x = 0")
    H = ExactMatrix(h_entries(E, x, K), K)
    try:
        return H.inverse()
    except (SingularMatrix, ZeroDivisionError) as exc:
        raise SubstitutionPole(f"H_x is singular on x = {x.as_expr()}") from exc


def _h_matrix(E: Equation, x: FracElement, K: FracField) -> ExactMatrix:
    if not x:
        raise SubstitutionPole("H_x has a pole at x = 0")
    return ExactMatrix(h_entries(E, x, K), K)


def l_tilde(E: Equation, coords_x: Sequence, zs: Sequence[Sequence], K: FracField) -> list[list[FracElement]]:
    """Blocks v-bar_1..v-bar_n with v_{i,col} = L^col_{x_i}(z-bar^i)."""
    m = len(coords_x)
    out = [[None] * m for _ in range(E.n)]
    for i, x in enumerate(coords_x):
        L = _l_matrix(E, x, K)
        zi = [zs[j][i] for j in range(E.n)]
        for col in range(E.n):
            acc = K.zero
            for l in range(E.n):
                if L[col, l]:
                    acc = acc + L[col, l] * zi[l]
            out[col][i] = acc
    return out


def h_tilde(E: Equation, coords_x: Sequence, vs: Sequence[Sequence], K: FracField) -> list[list[FracElement]]:
    """Inverse of l_tilde: z_{i,l} = sum_col H_x[l][col] v_{i,col}."""
    m = len(coords_x)
    out = [[None] * m for _ in range(E.n)]
    for i, x in enumerate(coords_x):
        H = _h_matrix(E, x, K)
        vi = [vs[c][i] for c in range(E.n)]
        for l in range(E.n):
            acc = K.zero
            for col in range(E.n):
                if H[l, col]:
                    acc = acc + H[l, col] * vi[col]
            out[l][i] = acc
    return out


def tilde_transforms(E: Equation, V: ParamVariety) -> tuple[ParamVariety, ParamVariety]:
    """V' = R-tilde(L-tilde(V)) in G_{km} and V'' = R(L-tilde(V)) in K^{m(k+1)}."""
    _require_constants(E, V)
    if V.ambient[1] != E.n:
        raise DimensionMismatch("variety order differs from the equation's")
    K = V.field
    xs, zs = _blocks(V)
    vs = l_tilde(E, xs, zs, K)
    leaders = [vs[N - 1] for N in E.offsets]
    mus = _mu_values(E, K)
    vp_x = [mu * x for mu in mus for x in xs]
    vp_y = [y for block in leaders for y in block]
    if any(not y for y in vp_y):
        raise ValueError("a leader coordinate of L-tilde(V) vanishes identically: the generic point of V is not proper")
    V1 = ParamVariety(K, V.params, tuple(vp_x + vp_y), ("G", E.k * len(xs)))
    V2 = ParamVariety(K, V.params, tuple(xs + vp_y), ("R", E.k, len(xs)))
    return V1, V2


def tilde_transforms_direct(E: Equation, V: ParamVariety) -> ParamVariety:
    """V' computed by a different route: solve H_x v = z per solution block.

    Only the leader coordinates are extracted, each by Cramer's rule.
    """
    K = V.field
    xs, zs = _blocks(V)
    mus = _mu_values(E, K)
    leaders = []
    for N in E.offsets:
        block = []
        for i, x in enumerate(xs):
            H = _h_matrix(E, x, K)
            zi = [zs[l][i] for l in range(E.n)]
            d = H.det()
            if not d:
                raise SubstitutionPole("H_x singular")
            cols = [list(r) for r in H.entries]
            for l in range(E.n):
                cols[l][N - 1] = zi[l]
            block.append(ExactMatrix(cols, K).det() / d)
        leaders.append(block)
    vp_x = [mu * x for mu in mus for x in xs]
    vp_y = [y for block in leaders for y in block]
    return ParamVariety(K, V.params, tuple(vp_x + vp_y), ("G", E.k * len(xs)))


def v_double_lift(E: Equation, V: ParamVariety) -> list[FracElement]:
    """H-tilde(x, y_1, x y_1, ..., x^{n_1-1} y_1, ...) on the generic point of V''."""
    K = V.field
    _, V2 = tilde_transforms(E, V)
    m = len(V.coords) // (E.n + 1)
    xs = list(V2.coords[:m])
    ys = [list(V2.coords[m * (1 + i) : m * (2 + i)]) for i in range(E.k)]
    vs = []
    for i, j in E.blocks:
        vs.append([ys[i][c] * xs[c] ** j for c in range(m)])
    zs = h_tilde(E, xs, vs, K)
    return xs + [z for block in zs for z in block]


@dataclass(frozen=True)
class EnVerdict:
    rotund: RotundityVerdict
    closure: Membership

    @property
    def verdict(self) -> str:
        if not self.rotund.holds or self.closure.answer == "no":
            return "violated"
        return "holds" if self.closure.answer == "yes" else "unknown"

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "rotundity": self.rotund.to_dict(), "closure": self.closure.to_dict()}


def check_en_rotund(
    E: Equation,
    V: ParamVariety,
    bound: int = DEFAULT_BOUND,
    strong: bool = False,
    budget: int = DEFAULT_DEGREE_BUDGET,
) -> EnVerdict:
    V1, _ = tilde_transforms(E, V)
    rot = check_exp_rotund(V1, bound, strong)
    return EnVerdict(rot, image_contained(V, v_double_lift(E, V), budget))


def eigenvalues_independent(E: Equation) -> bool:
    vals = [m.value for m in E.mu]
    return not q_kernel_basis(transpose(flatten_to_q(vals)), len(vals))


def check_en_free(E: Equation, V: ParamVariety) -> FreeVerdict:
    if not eigenvalues_independent(E):
        raise DependentEigenvalues("the distinct eigenvalues are Q-linearly dependent")
    V1, _ = tilde_transforms(E, V)
    return check_exp_free(V1)


# --------------------------------------------------------------------------
# points


def lift_exp_point(E: Equation, points: Sequence[tuple[FieldElement, FieldElement]]) -> list[Solution]:
    """(x, y) with Exp(mu_1 x, y) -> (x, y, mu_1 y, ..., mu_1^{n-1} y)."""
    out = []
    mu = E.mu[0]
    for x, y in points:
        F, (x, y) = unify(x, y)
        a = x * F(mu)
        if not y or derive(y) != y * derive(a):
            raise NotExpPoint(f"({a}, {y}) is not an exp pair")
        sol = Solution(x, tuple(y * F(mu) ** j for j in range(E.n)))
        assert en_membership(E, sol.x, sol.z)
        out.append(sol)
    return out


def scaling_transform(V, c) -> object:
    """(x, y) -> (c x, y) for a nonzero constant c."""
    if isinstance(V, LinearBinomialVariety):
        cf = V.cfield
        cc = coerce(c, cf) if cf is not None else Fraction(c)
        if not cc:
            raise ZeroScalar("scaling by zero")
        return LinearBinomialVariety(V.n, V.A, tuple(a * cc for a in V.alpha), V.B, V.gamma, V.cfield)
    K = V.field
    cc = coerce(c, K)
    if not cc:
        raise ZeroScalar("scaling by zero")
    if symbols_used(cc) & set(V.params):
        raise ValueError("scaling factor must be constant")
    return ParamVariety(K, V.params, tuple(x * cc for x in V.xs()) + tuple(V.ys()), V.ambient)


# --------------------------------------------------------------------------
# varieties from model points


def locus_of_point(coords: Sequence[FieldElement], ambient: tuple) -> ParamVariety:
    """Algebraic locus over C of a point of K^N, parametrized by (t, u_1, ..., u_r)."""
    F, elems = unify(*coords)
    params = (F.base,) + F.u_names
    return ParamVariety(F.K, params, tuple(e.value for e in elems), ambient)


def exp_point_variety(points: Sequence[tuple[FieldElement, FieldElement]]) -> ParamVariety:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return locus_of_point(xs + ys, ("G", len(points)))


def en_point_variety(E: Equation, sols: Sequence[Solution]) -> ParamVariety:
    m = len(sols)
    coords = [s.x for s in sols]
    for j in range(E.n):
        coords += [s.z[j] for s in sols]
    return locus_of_point(coords, ("E", E.n, m))
