"""Transcendence degree over C and Q-linear dimension modulo C.

Both work inside a fixed :class:`ExpField`: since t, u_1, ..., u_r are
algebraically independent over C, the transcendence degree of finitely many
elements is the rank of their Jacobian with respect to (t, u_1, ..., u_r).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from sympy.polys.fields import FracElement, FracField

from .algebra import ExactMatrix, evaluate_at, to_fraction, flatten_to_q, q_kernel_basis, transpose
from .expfield import ExpField, FieldElement, derive, unify

_POINT_TRIES = 3


@dataclass(frozen=True, eq=False)
class TdQuery:
    field: ExpField
    elements: tuple[FieldElement, ...]

    @classmethod
    def of(cls, elements: Sequence[FieldElement]) -> "TdQuery":
        if not elements:
            return cls(ExpField(), ())
        F, elems = unify(*elements)
        return cls(F, tuple(elems))


LdimQuery = TdQuery


@dataclass(frozen=True)
class LdimResult:
    dimension: int
    relations: tuple[tuple[int, ...], ...] = field(default_factory=tuple)

    def __iter__(self):
        return iter((self.dimension, self.relations))


def _random_point(K: FracField, rng: random.Random) -> list[Fraction]:
    return [Fraction(rng.randint(-97, 97), rng.randint(1, 13)) for _ in K.gens]


def jacobian_rank(values: Sequence[FracElement], variables: Sequence[FracElement], K: FracField) -> int:
    """Rank over K of (d value_i / d variable_j).

    A few random rational specializations give a lower bound; if it already
    reaches min(rows, cols) that is the answer, otherwise the rank is
    computed exactly over the function field.
    """
    values = [v for v in values if v]
    if not values or not variables:
        return 0
    jac = [[v.diff(x) for x in variables] for v in values]
    full = min(len(values), len(variables))
    rng = random.Random(len(values) * 7919 + len(variables))
    best = 0
    for _ in range(_POINT_TRIES):
        point = _random_point(K, rng)
        try:
            num = [[evaluate_at(e, point) for e in row] for row in jac]
        except ZeroDivisionError:
            continue
        best = max(best, ExactMatrix(num).rank())
        if best == full:
            return best
    return ExactMatrix(jac, K).rank()


def jacobian_rank_exact(values: Sequence[FracElement], variables: Sequence[FracElement], K: FracField) -> int:
    values = [v for v in values if v]
    if not values or not variables:
        return 0
    return ExactMatrix([[v.diff(x) for x in variables] for v in values], K).rank()


def _query(q) -> TdQuery:
    return q if isinstance(q, TdQuery) else TdQuery.of(list(q))


def td_over_C(q, exact: bool = False) -> int:
    """Transcendence degree over C of C(elements)."""
    q = _query(q)
    if not q.elements:
        return 0
    F = q.field
    variables = F._gens
    values = [e.value for e in q.elements]
    if exact:
        return jacobian_rank_exact(values, variables, F.K)
    return jacobian_rank(values, variables, F.K)


def ldim_mod_C(q) -> LdimResult:
    """dim of the Q-span of the elements in K/C, with a relation basis.

    m is a relation iff sum m_i x_i is constant iff sum m_i D x_i = 0, which
    is a Q-linear condition read off the flattened coefficients of D x_i.
    """
    q = _query(q)
    n = len(q.elements)
    if n == 0:
        return LdimResult(0, ())
    ders = [derive(e).value for e in q.elements]
    if not any(ders):
        return LdimResult(0, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))
    rels = q_kernel_basis(transpose(flatten_to_q(ders)), n)
    return LdimResult(n - len(rels), tuple(rels))


def ldim_mod_C_expansion(q) -> LdimResult:
    """Same as :func:`ldim_mod_C` by coefficient comparison, without D.

    Over a common denominator Dn, sum m_i N_i = c Dn for a constant c.  With
    (t, u)-monomials as basis over C and a fixed monomial mu0 of Dn, c is
    forced to be sum m_i N_i[mu0] / Dn[mu0], leaving linear conditions on m
    with coefficients in Q[s] that are flattened over Q.
    """
    q = _query(q)
    n = len(q.elements)
    if n == 0:
        return LdimResult(0, ())
    F = q.field
    K = F.K
    npar = len(F.constants)
    ring = K.ring
    den = ring.one
    for e in q.elements:
        den = den.lcm(e.value.denom)
    nums = [e.value.numer * den.exquo(e.value.denom) for e in q.elements]

    def split(poly):
        out: dict = {}
        for m, c in poly.terms():
            key, inner = m[npar:], m[:npar] + (0,) * (len(m) - npar)
            out.setdefault(key, {})[inner] = c
        return {k: ring.from_dict(v) for k, v in out.items()}

    dsplit = split(den)
    nsplit = [split(p) for p in nums]
    mu0 = max(dsplit)
    d0 = dsplit[mu0]
    keys = sorted(set(dsplit).union(*nsplit))
    conditions = []
    zero = ring.zero
    for key in keys:
        # coefficient of key in sum m_i (N_i d0 - N_i[mu0] Dn), for each i
        per = [ns.get(key, zero) * d0 - ns.get(mu0, zero) * dsplit.get(key, zero) for ns in nsplit]
        if not any(per):
            continue
        tables = [dict(p.terms()) for p in per]
        inners = sorted({m for tab in tables for m in tab})
        for inner in inners:
            conditions.append([to_fraction(tab.get(inner, 0)) for tab in tables])
    rels = q_kernel_basis(conditions, n) if conditions else [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return LdimResult(n - len(rels), tuple(rels))


def integer_relations(q) -> tuple[tuple[int, ...], ...]:
    """Primitive integer vectors spanning {m : sum m_i x_i in C}."""
    return ldim_mod_C(q).relations


def image_dim(phi: Sequence[FracElement], params: Sequence, exact: bool = False) -> int:
    """Dimension of the Zariski closure of the image of w -> phi(w).

    ``params`` are generators (or their names) of the parameter field.
    """
    phi = [p for p in phi]
    if not phi:
        return 0
    K = phi[0].field
    gens = {str(g): g for g in K.gens}
    variables = [gens[p] if isinstance(p, str) else p for p in params]
    if exact:
        return jacobian_rank_exact(phi, variables, K)
    return jacobian_rank(phi, variables, K)
