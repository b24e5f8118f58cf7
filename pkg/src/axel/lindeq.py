"""Linear differential equations with constant coefficients.

An :class:`Equation` is given by its distinct eigenvalues with multiplicities;
``p(lambda) = prod (lambda - mu_i)^{n_i} = lambda^n + sum c_i lambda^i``.
For a nonconstant x the solutions of the equation in y form a C-vector space
with canonical basis ``y_i, x y_i, ..., x^{n_i - 1} y_i`` where
``d/dx y_i = mu_i y_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial
from typing import Sequence

from sympy.polys.fields import FracElement, FracField

from .algebra import DimensionMismatch, ExactMatrix, embed, symbols_used, to_text
from .expfield import (
    ConstantBase,
    ExpField,
    FieldElement,
    common_field,
    derive,
    is_constant,
    unify,
)


class ZeroEigenvalue(ValueError):
    pass


class DuplicateEigenvalue(ValueError):
    pass


class InvalidEigenvalue(ValueError):
    pass


class NonPolynomialBase(ValueError):
    """x must be a polynomial in t over C for exp(mu x) to live in the model."""


class NotASolution(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class ProperCriteriaDisagree(AssertionError):
    """The coefficient and Wronskian properness criteria gave different answers."""


@dataclass(frozen=True, eq=False)
class Equation:
    """Linear ODE with constant coefficients, p(d/dx) y = 0."""

    base_field: ExpField
    mu: tuple[FieldElement, ...]
    mult: tuple[int, ...]
    coeffs: tuple[FieldElement, ...]  # c_0, ..., c_{n-1}

    @property
    def k(self) -> int:
        return len(self.mu)

    @property
    def n(self) -> int:
        return sum(self.mult)

    @property
    def offsets(self) -> tuple[int, ...]:
        """N_i = 1 + sum_{j<i} n_j (1-based positions of block leaders)."""
        out, acc = [], 1
        for m in self.mult:
            out.append(acc)
            acc += m
        return tuple(out)

    @property
    def lambdas(self) -> tuple[FieldElement, ...]:
        return tuple(mu for mu, m in zip(self.mu, self.mult) for _ in range(m))

    @property
    def blocks(self) -> tuple[tuple[int, int], ...]:
        """(block index i, inner index j) for each of the n basis positions, 0-based."""
        return tuple((i, j) for i, m in enumerate(self.mult) for j in range(m))

    def char_poly(self) -> tuple[FieldElement, ...]:
        """Coefficients of p low to high, leading 1 included."""
        return self.coeffs + (self.base_field(1),)

    def mu_values(self, field: FracField) -> list[FracElement]:
        return [embed(m.value, field) for m in self.mu]

    def coeff_values(self, field: FracField) -> list[FracElement]:
        return [embed(c.value, field) for c in self.coeffs]

    def describe(self) -> dict:
        return {
            "eigenvalues": [[str(m), k] for m, k in zip(self.mu, self.mult)],
            "order": self.n,
            "coefficients": [str(c) for c in self.coeffs],
        }


def make_equation(eigen: Sequence[tuple], constants: Sequence[str] = (), base: str = "t") -> Equation:
    """Equation from (eigenvalue, multiplicity) pairs; eigenvalues must be constants."""
    F = ExpField(constants, base)
    mus, mults = [], []
    for value, mult in eigen:
        mu = F(value)
        if not is_constant(mu):
            raise InvalidEigenvalue(f"eigenvalue {mu} is not a constant")
        if not mu:
            raise ZeroEigenvalue("eigenvalue 0 makes c_0 = 0")
        if int(mult) != mult or mult < 1:
            raise InvalidEigenvalue(f"multiplicity {mult} must be a positive integer")
        if any(mu == other for other in mus):
            raise DuplicateEigenvalue(f"eigenvalue {mu} listed twice")
        mus.append(mu)
        mults.append(int(mult))
    if not mus:
        raise InvalidEigenvalue("at least one eigenvalue is required")
    poly = [F(1)]
    for mu, m in zip(mus, mults):
        for _ in range(m):
            # multiply by (lambda - mu)
            shifted = [F(0)] + poly
            scaled = [-mu * c for c in poly] + [F(0)]
            poly = [a + b for a, b in zip(shifted, scaled)]
    assert poly[-1] == 1
    return Equation(F, tuple(mus), tuple(mults), tuple(poly[:-1]))


# --------------------------------------------------------------------------
# evaluation of the operator


def _derivatives(x: FieldElement, y: FieldElement, count: int) -> list[FieldElement]:
    """[y, d/dx y, ..., (d/dx)^count y]."""
    F, (x, y) = unify(x, y)
    dx = derive(x)
    if not dx:
        raise ConstantBase(f"{x} is constant")
    out = [y]
    for _ in range(count):
        out.append(derive(out[-1]) / dx)
    return out


def delta_eval(E: Equation, x: FieldElement, y: FieldElement) -> FieldElement:
    """(D x)^{2n-1} [ (d/dx)^n y + sum c_i (d/dx)^i y ]."""
    F, (x, y) = unify(x, y)
    ds = _derivatives(x, y, E.n)
    acc = ds[E.n]
    for c, d in zip(E.coeffs, ds):
        if c:
            acc = acc + c * d
    return derive(x) ** (2 * E.n - 1) * acc


def satisfies(E: Equation, x: FieldElement, y: FieldElement) -> bool:
    return not delta_eval(E, x, y)


def en_membership(E: Equation, x: FieldElement, z: Sequence[FieldElement]) -> bool:
    """Whether (x, z_0, ..., z_{n-1}) satisfies D z_i = z_{i+1} D x with z_n = -sum c_i z_i."""
    if len(z) != E.n:
        raise DimensionMismatch(f"expected {E.n} z-components, got {len(z)}")
    F, elems = unify(x, *z)
    x, z = elems[0], list(elems[1:])
    zn = F(0)
    for c, zi in zip(E.coeffs, z):
        zn = zn - c * zi
    z.append(zn)
    dx = derive(x)
    return all(derive(z[i]) == z[i + 1] * dx for i in range(E.n))


def apply_operator(E: Equation, x: FieldElement, y: FieldElement, shifts: Sequence[tuple]) -> FieldElement:
    """prod (d/dx - mu)^power applied to y."""
    F, (x, y) = unify(x, y)
    dx = derive(x)
    if not dx:
        raise ConstantBase(f"{x} is constant")
    out = y
    for mu, power in shifts:
        mu = F(mu) if not isinstance(mu, FieldElement) else mu
        for _ in range(power):
            out = derive(out) / dx - mu * out
    return out


# --------------------------------------------------------------------------
# g_{ijl} polynomials


def g_poly(E: Equation, i: int, j: int, l: int) -> tuple[FieldElement, ...]:
    """(d/dx)^l (x^j y_i) = g_{ijl}(x) y_i; coefficients of g low to high.

    ``i`` is the 1-based block index.
    """
    if not 1 <= i <= E.k or not 0 <= j < E.mult[i - 1] or l < 0:
        raise IndexOutOfRange(f"g_({i},{j},{l}) out of range")
    mu = E.mu[i - 1]
    zero = E.base_field(0)
    g = [zero] * j + [E.base_field(1)]
    for _ in range(l):
        deriv = [g[k + 1] * (k + 1) for k in range(len(g) - 1)] + [zero]
        g = [d + mu * c for d, c in zip(deriv, g)]
    return tuple(g)


def g_poly_closed(E: Equation, i: int, j: int, l: int) -> tuple[FieldElement, ...]:
    """Leibniz closed form: sum_k C(l,k) mu^{l-k} j!/(j-k)! X^{j-k}."""
    mu = E.mu[i - 1]
    coeffs = [E.base_field(0)] * (j + 1)
    for k in range(min(l, j) + 1):
        coeffs[j - k] = coeffs[j - k] + mu ** (l - k) * (comb(l, k) * factorial(j) // factorial(j - k))
    return tuple(coeffs)


def eval_poly(coeffs: Sequence, x):
    acc = x * 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def h_entries(E: Equation, x: FracElement, field: FracField) -> list[list[FracElement]]:
    """Matrix (f_{l,col}(x)) with (d/dx)^l v_col = f_{l,col}(x) v_col.

    For v_col = x^j y_i the entry is g_{ijl}(x) / x^j; ``x`` is any element of
    ``field`` (which must contain the constant symbols).
    """
    x = embed(x, field)
    rows = []
    for l in range(E.n):
        row = []
        for i, j in E.blocks:
            g = [embed(c.value, field) for c in g_poly(E, i + 1, j, l)]
            num = eval_poly(g, x)
            row.append(num / x**j if j else num)
        rows.append(row)
    return rows


# --------------------------------------------------------------------------
# fundamental systems


@dataclass(frozen=True, eq=False)
class FundamentalSystem:
    equation: Equation
    x: FieldElement
    leaders: tuple[FieldElement, ...]  # y_i = exp(mu_i x), one per block
    v: tuple[FieldElement, ...]
    H: ExactMatrix
    L: ExactMatrix
    wronskian: FieldElement

    @property
    def field(self) -> ExpField:
        return self.x.field

    def in_field(self, G: ExpField) -> "FundamentalSystem":
        if G == self.field:
            return self
        return fundamental_system(self.equation, G.embed(self.x), field=G)

    def combine(self, coeffs: Sequence) -> FieldElement:
        """sum a_i v_i."""
        F = self.field
        acc = F(0)
        for a, v in zip(coeffs, self.v):
            acc = acc + a * v
        return acc

    def describe(self) -> dict:
        return {
            "x": str(self.x),
            "v": [str(v) for v in self.v],
            "H": [[to_text(e) for e in row] for row in self.H.entries],
            "L": [[to_text(e) for e in row] for row in self.L.entries],
            "wronskian": str(self.wronskian),
            "field": [to_text(h) for h in self.field.basis],
        }


def _check_polynomial_base(x: FieldElement) -> None:
    F = x.field
    if symbols_used(x.value) & set(F.u_names):
        raise NonPolynomialBase(f"{x} involves exponential generators")
    tpos = len(F.constants)
    if any(m[tpos] for m in x.value.denom.itermonoms()):
        raise NonPolynomialBase(f"{x} is not a polynomial in {F.base}")


def fundamental_system(E: Equation, x: FieldElement, field: ExpField | None = None) -> FundamentalSystem:
    """Canonical fundamental system (all a_ij = 1) of the equation in y for base x."""
    if is_constant(x):
        raise ConstantBase(f"{x} is constant")
    _check_polynomial_base(x)
    F = field if field is not None else x.field
    F = common_field(F, x.field)
    for mu in E.mu:
        F, _ = F.adjoin((mu * x).to_ct())
    for mu in E.mu:
        F2, _ = F.adjoin((F(mu) * F.embed(x)).to_ct())
        assert F2 == F
    x = F.embed(x)
    leaders = tuple(F.adjoin((F(mu) * x).to_ct())[1] for mu in E.mu)
    v = tuple(leaders[i] * x**j for i, j in E.blocks)
    H = ExactMatrix(h_entries(E, x.value, F.K), F.K)
    L = H.inverse()
    dx = derive(x)
    rows = [list(v)]
    for _ in range(E.n - 1):
        rows.append([derive(e) / dx for e in rows[-1]])
    W = ExactMatrix([[e.value for e in r] for r in rows], F.K).det()
    return FundamentalSystem(E, x, leaders, v, H, L, FieldElement(F, W))


@dataclass(frozen=True, eq=False)
class Decomposition:
    coefficients: tuple[FieldElement, ...]  # a_1..a_n following the v ordering
    equation: Equation = None

    @property
    def blocks(self) -> tuple[tuple[FieldElement, ...], ...]:
        out, pos = [], 0
        for m in self.equation.mult:
            out.append(self.coefficients[pos : pos + m])
            pos += m
        return tuple(out)

    @property
    def epsilon(self) -> tuple[int, ...]:
        return tuple(int(any(bool(a) for a in block)) for block in self.blocks)

    def describe(self) -> dict:
        return {"coefficients": [str(a) for a in self.coefficients], "epsilon": list(self.epsilon)}


def decompose(FS: FundamentalSystem, y: FieldElement) -> Decomposition:
    """Unique constants a with y = sum a_i v_i, recovered through L = H^{-1}."""
    G = common_field(FS.field, y.field)
    FS = FS.in_field(G)
    y = G.embed(y)
    ds = _derivatives(FS.x, y, FS.equation.n - 1)
    coeffs = []
    for i in range(FS.equation.n):
        vi = G(0)
        for l, d in enumerate(ds):
            entry = FS.L[i, l]
            if entry:
                vi = vi + FieldElement(G, entry) * d
        a = vi / FS.v[i]
        if not is_constant(a):
            raise NotASolution(f"{y} is not a solution for x = {FS.x}")
        coeffs.append(a)
    if FS.combine(coeffs) != y:
        raise NotASolution(f"{y} is not in the span of the fundamental system")
    return Decomposition(tuple(coeffs), FS.equation)


def hankel_wronskian(x: FieldElement, y: FieldElement, n: int) -> FieldElement:
    """Wronskian of (y, d/dx y, ..., (d/dx)^{n-1} y) with respect to d/dx."""
    ds = _derivatives(x, y, 2 * n - 2)
    F = ds[0].field
    M = ExactMatrix([[ds[l + j].value for j in range(n)] for l in range(n)], F.K)
    return FieldElement(F, M.det())


def proper_criteria(FS: FundamentalSystem, y: FieldElement) -> tuple[bool, bool]:
    """(all canonical coefficients nonzero, Wronskian of y's derivatives nonzero)."""
    if not satisfies(FS.equation, FS.x, y):
        raise NotASolution(f"{y} is not a solution for x = {FS.x}")
    dec = decompose(FS, y)
    by_coeffs = all(bool(a) for a in dec.coefficients)
    by_wronskian = bool(hankel_wronskian(FS.x, y, FS.equation.n))
    return by_coeffs, by_wronskian


def top_coefficients_nonzero(dec: Decomposition) -> bool:
    """Every block's highest coefficient a_{i,n_i-1} is nonzero.

    This is exactly when y, d/dx y, ..., (d/dx)^{n-1} y span the solution
    space; it agrees with the all-coefficients criterion when every
    eigenvalue is simple.
    """
    return all(bool(block[-1]) for block in dec.blocks)


def is_proper(FS: FundamentalSystem, y: FieldElement, check: bool = True) -> bool:
    """All canonical coefficients nonzero.

    With ``check`` the Wronskian criterion is computed as well and a
    disagreement raises :class:`ProperCriteriaDisagree`.  The two differ for
    repeated eigenvalues, e.g. y = x exp(x) for (d/dx - 1)^2.
    """
    if not check:
        if not satisfies(FS.equation, FS.x, y):
            raise NotASolution(f"{y} is not a solution for x = {FS.x}")
        return all(bool(a) for a in decompose(FS, y).coefficients)
    a, b = proper_criteria(FS, y)
    if a != b:
        raise ProperCriteriaDisagree(f"coefficient criterion {a} vs Wronskian criterion {b} for {y}")
    return a


@dataclass(frozen=True, eq=False)
class Solution:
    """Tuple (x, z_0, ..., z_{n-1}) meant to satisfy the E_n relation."""

    x: FieldElement
    z: tuple[FieldElement, ...]

    @property
    def y(self) -> FieldElement:
        return self.z[0]

    def elements(self) -> list[FieldElement]:
        return [self.x, *self.z]

    def describe(self) -> dict:
        return {"x": str(self.x), "z": [str(c) for c in self.z]}


def solution_from_y(E: Equation, x: FieldElement, y: FieldElement) -> Solution:
    """The E_n tuple (x, y, d/dx y, ..., (d/dx)^{n-1} y)."""
    ds = _derivatives(x, y, E.n - 1)
    F = ds[0].field
    return Solution(F.embed(x), tuple(ds))


def solution_from_coefficients(FS: FundamentalSystem, coeffs: Sequence) -> Solution:
    if len(coeffs) != FS.equation.n:
        raise DimensionMismatch(f"expected {FS.equation.n} coefficients, got {len(coeffs)}")
    y = FS.combine([FS.field(a) for a in coeffs])
    return solution_from_y(FS.equation, FS.x, y)


def block_coefficients(E: Equation, blocks: Sequence[Sequence]) -> list:
    """Flatten per-block coefficients a_{ij} into v-ordering."""
    if len(blocks) != E.k or any(len(b) != m for b, m in zip(blocks, E.mult)):
        raise DimensionMismatch(f"coefficient blocks must have sizes {list(E.mult)}")
    return [a for b in blocks for a in b]
