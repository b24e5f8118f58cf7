"""The concrete differential field K = C(t)[u_1^{+-1}, ..., u_r^{+-1}].

Constants are C = Q(s_1, ..., s_p).  Each generator u_j stands for
exp(h_j(t)) with h_j in C[t] nonconstant with zero constant term, and the
h_j are kept Q-linearly independent, so t, u_1, ..., u_r are algebraically
independent over C.  The derivation is D t = 1, D u_j = h_j'(t) u_j, D = 0
on C.
"""

from __future__ import annotations

from fractions import Fraction
import re
from functools import lru_cache
from math import lcm
from typing import Iterable, Sequence, Union

from sympy.polys.fields import FracElement

from . import expr as _expr
from .algebra import (
    coerce,
    embed,
    flatten_to_q,
    q_kernel_basis,
    rational_field,
    substitute,
    symbols_used,
    to_text,
    transpose,
)


class ConstantBase(ValueError):
    """The base element x of d/dx is constant (D x = 0)."""


class ConstantExponent(ValueError):
    """exp of a nonzero constant is not representable in the model."""


class BasisDependent(ValueError):
    """Exponent basis is Q-linearly dependent (or has a constant member)."""


class IncompatibleFields(ValueError):
    pass


def _u_names(r: int) -> tuple[str, ...]:
    return tuple(f"u{j + 1}" for j in range(r))


class ExpField:
    """Descriptor of one exponential-polynomial differential field.

    Immutable; two descriptors with the same constants, base symbol and
    exponent basis are equal and share their sympy fields.
    """

    __slots__ = ("constants", "base", "basis", "Ct", "K", "_dlog", "_gens", "__weakref__")

    def __init__(self, constants: Sequence[str] = (), base: str = "t", exponents: Iterable = ()):
        constants = tuple(constants)
        clash = [n for n in constants + (base,) if re.fullmatch(r"u\d+", n)]
        if base in constants or len(set(constants)) != len(constants) or clash:
            raise ValueError(f"bad symbol declaration: constants={constants}, base={base!r}")
        self.constants = constants
        self.base = base
        self.Ct = rational_field(constants + (base,))
        basis = tuple(self._as_exponent(h) for h in exponents)
        for h in basis:
            if not h:
                raise BasisDependent("exponent polynomial is constant")
        if basis and len(q_kernel_basis(transpose(flatten_to_q(list(basis))), len(basis))) > 0:
            raise BasisDependent("exponent basis is Q-linearly dependent")
        self.basis = basis
        self.K = rational_field(constants + (base,) + _u_names(len(basis)))
        t = self.K.gens[len(constants)]
        us = self.K.gens[len(constants) + 1 :]
        self._dlog = tuple(embed(h.diff(self.Ct.gens[-1]), self.K) * u for h, u in zip(basis, us))
        self._gens = (t,) + tuple(us)

    # -- construction helpers -------------------------------------------------
    def _to_ct(self, h) -> FracElement:
        if isinstance(h, str):
            h = self.parse_ct(h)
        elif isinstance(h, FieldElement):
            h = h.to_ct()
        elif not isinstance(h, FracElement):
            h = coerce(h, self.Ct)
        h = embed(h, self.Ct)
        tpos = len(self.constants)
        if any(m[tpos] for m in h.denom.itermonoms()):
            raise ValueError(f"exponent {h.as_expr()} is not a polynomial in {self.base}")
        return h

    def _as_exponent(self, h) -> FracElement:
        """Normalize to an element of C[t] with zero constant term."""
        h = self._to_ct(h)
        tpos = len(self.constants)
        ring = self.Ct.ring
        const_num = ring.from_dict({m: c for m, c in h.numer.terms() if not m[tpos]})
        return h - self.Ct(const_num) / self.Ct(h.denom)

    def parse_ct(self, text: str) -> FracElement:
        env = {n: g for n, g in zip(self.constants + (self.base,), self.Ct.gens)}
        node = _expr.parse_expression(text)
        _expr.check_symbols(node, env)
        return _expr.evaluate(node, env, number=self.Ct)

    @property
    def r(self) -> int:
        return len(self.basis)

    @property
    def u_names(self) -> tuple[str, ...]:
        return _u_names(len(self.basis))

    @property
    def symbol_names(self) -> tuple[str, ...]:
        return self.constants + (self.base,) + self.u_names

    def key(self):
        return (self.constants, self.base, self.basis)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, ExpField):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        hs = ", ".join(str(h.as_expr()) for h in self.basis)
        return f"ExpField(constants={list(self.constants)}, base={self.base!r}, exponents=[{hs}])"

    # -- elements -----------------------------------------------------------
    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            return self.embed(value)
        if isinstance(value, str):
            return self.parse(value)
        return FieldElement(self, coerce(value, self.K))

    def parse(self, text: str) -> "FieldElement":
        env = {n: FieldElement(self, g) for n, g in zip(self.symbol_names, self.K.gens)}
        node = _expr.parse_expression(text)
        _expr.check_symbols(node, env)
        return _expr.evaluate(node, env, number=lambda k: FieldElement(self, self.K(k)))

    @property
    def t(self) -> "FieldElement":
        return FieldElement(self, self._gens[0])

    def u(self, j: int) -> "FieldElement":
        """Generator u_j (1-based)."""
        return FieldElement(self, self._gens[j])

    def const(self, name_or_value) -> "FieldElement":
        if isinstance(name_or_value, str) and name_or_value in self.constants:
            return FieldElement(self, self.K.gens[self.constants.index(name_or_value)])
        return self(name_or_value)

    def monomial(self, coords: Sequence[int]) -> "FieldElement":
        value = self.K.one
        for g, c in zip(self._gens[1:], coords):
            if c:
                value = value * g**c if c > 0 else value / g ** (-c)
        return FieldElement(self, value)

    # -- exponent lattice ---------------------------------------------------
    def coordinates(self, h) -> tuple[Fraction, ...] | None:
        """Q-coordinates of h's nonconstant part in the basis, or None."""
        h = self._as_exponent(h)
        if not h:
            return (Fraction(0),) * self.r
        if not self.basis:
            return None
        rows = flatten_to_q(list(self.basis) + [h])
        ker = q_kernel_basis(transpose(rows), len(rows))
        for k in ker:
            if k[-1]:
                return tuple(Fraction(-k[j], k[-1]) for j in range(self.r))
        return None

    def adjoin(self, h) -> tuple["ExpField", "FieldElement"]:
        """Extend the field so that exp(h) is a Laurent monomial.

        The constant part of h is dropped (exp of it is a constant factor);
        a nonzero constant h is rejected.
        """
        hraw = self._to_ct(h)
        hn = self._as_exponent(hraw)
        if not hn:
            if hraw:
                raise ConstantExponent(f"exp({hraw.as_expr()}) of a nonzero constant")
            return self, FieldElement(self, self.K.one)
        coords = self.coordinates(hn)
        if coords is None:
            F = ExpField(self.constants, self.base, self.basis + (hn,))
            return F, F.u(F.r)
        d = lcm(*(c.denominator for c in coords)) if coords else 1
        if d == 1:
            return self, self.monomial([int(c) for c in coords])
        F = ExpField(self.constants, self.base, tuple(b / d for b in self.basis))
        return F, F.monomial([int(c * d) for c in coords])

    def contains_lattice_of(self, other: "ExpField") -> bool:
        if other.constants != self.constants or other.base != self.base:
            return False
        for h in other.basis:
            c = self.coordinates(h)
            if c is None or any(x.denominator != 1 for x in c):
                return False
        return True

    def embed(self, a: "FieldElement") -> "FieldElement":
        """Image of an element of another field whose lattice this one contains."""
        if a.field is self or a.field == self:
            return a if a.field is self else FieldElement(self, a.value)
        src = a.field
        if src.constants != self.constants or src.base != self.base:
            raise IncompatibleFields(f"{src} vs {self}")
        used = symbols_used(a.value)
        if not (used & set(src.u_names)):
            return FieldElement(self, a.value.set_field(self.K))
        images = _embedding_images(src, self)
        return FieldElement(self, substitute(a.value, images, self.K))

    # -- derivation -----------------------------------------------------------
    def derive_value(self, f: FracElement) -> FracElement:
        t = self._gens[0]
        out = f.diff(t)
        for u, dl in zip(self._gens[1:], self._dlog):
            du = f.diff(u)
            if du:
                out = out + dl * du
        return out


@lru_cache(maxsize=None)
def _embedding_images(src: ExpField, dst: ExpField) -> tuple:
    images = list(dst.K.gens[: len(dst.constants) + 1])
    for h in src.basis:
        c = dst.coordinates(h)
        if c is None or any(x.denominator != 1 for x in c):
            raise IncompatibleFields(f"exponent {h.as_expr()} is not in the lattice of {dst}")
        images.append(dst.monomial([int(x) for x in c]).value)
    return tuple(images)


@lru_cache(maxsize=None)
def common_field(F: ExpField, G: ExpField) -> ExpField:
    """Smallest field (up to rescaling) whose lattice contains both lattices."""
    if F == G:
        return F
    if F.constants != G.constants or F.base != G.base:
        raise IncompatibleFields(f"{F} vs {G}")
    if F.contains_lattice_of(G):
        return F
    if G.contains_lattice_of(F):
        return G
    H = F
    for h in G.basis:
        H, _ = H.adjoin(h)
    return H


Number = Union[int, Fraction]


class FieldElement:
    """Immutable element of an :class:`ExpField`; arithmetic coerces fields."""

    __slots__ = ("field", "value")
    __hash__ = None  # equality embeds across fields

    def __init__(self, field: ExpField, value: FracElement):
        self.field = field
        self.value = value

    def _pair(self, other):
        if isinstance(other, FieldElement):
            if other.field is self.field:
                return self.field, self.value, other.value
            if other.field == self.field:
                return self.field, self.value, other.value
            F = common_field(self.field, other.field)
            return F, F.embed(self).value, F.embed(other).value
        if isinstance(other, (int, Fraction)):
            return self.field, self.value, coerce(other, self.field.K)
        if isinstance(other, FracElement):
            return self.field, self.value, coerce(other, self.field.K)
        return None

    def __add__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return FieldElement(p[0], p[1] + p[2])

    __radd__ = __add__

    def __sub__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return FieldElement(p[0], p[1] - p[2])

    def __rsub__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return FieldElement(p[0], p[2] - p[1])

    def __mul__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return FieldElement(p[0], p[1] * p[2])

    __rmul__ = __mul__

    def __truediv__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        if not p[2]:
            raise ZeroDivisionError("division by zero in K")
        return FieldElement(p[0], p[1] / p[2])

    def __rtruediv__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        if not p[1]:
            raise ZeroDivisionError("division by zero in K")
        return FieldElement(p[0], p[2] / p[1])

    def __neg__(self):
        return FieldElement(self.field, -self.value)

    def __pow__(self, e: int):
        if e < 0:
            if not self.value:
                raise ZeroDivisionError("0 ** negative")
            return FieldElement(self.field, 1 / self.value ** (-e))
        return FieldElement(self.field, self.value**e)

    def __eq__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return p[1] == p[2]

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __bool__(self):
        return bool(self.value)

    def __repr__(self):
        return f"FieldElement({self})"

    def __str__(self):
        return to_text(self.value)

    def to_string(self) -> str:
        return str(self)

    def is_constant(self) -> bool:
        return is_constant(self)

    def to_ct(self) -> FracElement:
        """This element as a member of C(t); it must not involve any u_j."""
        if symbols_used(self.value) & set(self.field.u_names):
            raise ValueError(f"{self} involves exponential generators")
        return self.value.set_field(self.field.Ct)

    def in_field(self, F: ExpField) -> "FieldElement":
        return F.embed(self)


def derive(a: FieldElement) -> FieldElement:
    """The derivation D of the model."""
    return FieldElement(a.field, a.field.derive_value(a.value))


def is_constant(a: FieldElement) -> bool:
    """True iff a lies in C, i.e. involves neither t nor any u_j."""
    F = a.field
    return not (symbols_used(a.value) & ({F.base} | set(F.u_names)))


def partial(x: FieldElement, a: FieldElement) -> FieldElement:
    """d/dx = (D x)^-1 D."""
    dx = derive(x)
    if not dx:
        raise ConstantBase(f"{x} is constant")
    return derive(a) / dx


def adjoin_exponent(F: ExpField, h) -> tuple[ExpField, FieldElement]:
    return F.adjoin(h)


def unify(*elements: FieldElement) -> tuple[ExpField, list[FieldElement]]:
    """Embed elements into one common field."""
    fields = [e.field for e in elements if isinstance(e, FieldElement)]
    if not fields:
        raise ValueError("no field elements to unify")
    F = fields[0]
    for G in fields[1:]:
        if G is not F:
            F = common_field(F, G)
    return F, [F.embed(e) if isinstance(e, FieldElement) else F(e) for e in elements]
