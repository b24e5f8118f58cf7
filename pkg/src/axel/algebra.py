"""Exact arithmetic and linear algebra over Q and over Q(s_1, ..., s_p, ...).

Rationals are :class:`fractions.Fraction`.  Multivariate polynomials and
rational functions are sympy's sparse ``PolyElement``/``FracElement`` over
``QQ`` with graded-lex order; reduced fractions are canonical, so structural
equality is mathematical equality.  Ranks, determinants and inverses use
fraction-free (Bareiss) elimination over the polynomial ring after clearing
row denominators.
"""

from __future__ import annotations

import re

from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import Iterable, Sequence

from sympy import QQ
from sympy.polys.fields import FracElement, FracField
from sympy.polys.orderings import grlex

Rational = Fraction
MultiPoly = "sympy.polys.rings.PolyElement"
RatFunc = FracElement


class SingularMatrix(ArithmeticError):
    """Raised when inverting a matrix whose rank is below its size."""


class DimensionMismatch(ValueError):
    pass


@lru_cache(maxsize=None)
def rational_field(names: tuple[str, ...]) -> FracField:
    """Field of rational functions over Q in ``names`` (graded lex)."""
    if not names:
        raise ValueError("rational_field needs at least one symbol")
    return FracField(tuple(names), QQ, grlex)


def to_fraction(c) -> Fraction:
    """Convert a domain rational (gmpy2 mpq, PythonMPQ, int, Fraction)."""
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    return Fraction(int(c.numerator), int(c.denominator))


def embed(f: FracElement, field: FracField) -> FracElement:
    """Move ``f`` into ``field`` by symbol name (symbols must be a subset)."""
    if f.field is field:
        return f
    return f.set_field(field)


def symbols_used(f: FracElement) -> set[str]:
    syms = f.field.symbols
    used = set()
    for poly in (f.numer, f.denom):
        for monom in poly.itermonoms():
            for i, e in enumerate(monom):
                if e:
                    used.add(str(syms[i]))
    return used


def coerce(value, field: FracField) -> FracElement:
    if isinstance(value, FracElement):
        return embed(value, field)
    if isinstance(value, Fraction):
        return field(value.numerator) / field(value.denominator)
    if isinstance(value, str):
        from .expr import evaluate, parse_expression

        env = {str(g): g for g in field.gens}
        return evaluate(parse_expression(value), env, field)
    return field(value)


# --------------------------------------------------------------------------
# Polynomial evaluation / substitution


def evaluate_poly(poly, values: Sequence, one):
    """Evaluate ``poly`` with its generators replaced by ``values``.

    ``values`` may live in any ring supporting ``+``, ``*`` and ``**`` with
    ``one`` its identity; coefficients are multiplied in as Fractions when the
    target is a Fraction, otherwise they are coerced by the target ring.
    """
    total = one * 0
    cache: dict[tuple[int, int], object] = {}
    for monom, coeff in poly.terms():
        term = one * to_fraction(coeff) if isinstance(one, (int, Fraction)) else one * coeff
        for i, e in enumerate(monom):
            if e:
                key = (i, e)
                pw = cache.get(key)
                if pw is None:
                    pw = values[i] ** e
                    cache[key] = pw
                term = term * pw
        total = total + term
    return total


def substitute(f: FracElement, values: Sequence[FracElement], field: FracField) -> FracElement:
    """Substitute ``values`` (elements of ``field``) for the generators of ``f``."""
    one = field.one
    coerced = [coerce(v, field) for v in values]
    num = evaluate_poly(f.numer, coerced, one)
    den = evaluate_poly(f.denom, coerced, one)
    if not den:
        raise ZeroDivisionError("substitution makes the denominator vanish")
    return num / den


def evaluate_at(f: FracElement, point: Sequence[Fraction]) -> Fraction:
    """Evaluate ``f`` at a rational point (one value per generator)."""
    num = evaluate_poly(f.numer, point, Fraction(1))
    den = evaluate_poly(f.denom, point, Fraction(1))
    if den == 0:
        raise ZeroDivisionError("pole at evaluation point")
    return num / den


# --------------------------------------------------------------------------
# Q-flattening


def flatten_to_q(values: Sequence[FracElement]) -> list[list[Fraction]]:
    """Coordinate vectors over Q of rational functions sharing one field.

    All values are put over a common denominator; the numerators' coefficient
    vectors (indexed by every monomial that occurs) are Q-linearly dependent
    exactly when the values are.  Returns one row per value.
    """
    if not values:
        return []
    field = values[0].field
    denom = reduce(lambda a, b: a.lcm(b), (v.denom for v in values), field.ring.one)
    nums = [v.numer * denom.exquo(v.denom) for v in values]
    monoms = sorted({m for p in nums for m in p.itermonoms()})
    index = {m: i for i, m in enumerate(monoms)}
    rows = []
    for p in nums:
        row = [Fraction(0)] * len(monoms)
        for m, c in p.terms():
            row[index[m]] = to_fraction(c)
        rows.append(row)
    return rows


def transpose(rows: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*rows)] if rows else []


# --------------------------------------------------------------------------
# Fraction-free elimination


def _is_zero(a) -> bool:
    return not a


def _ff_pivot(rows, start, col):
    best, best_size = None, None
    for i in range(start, len(rows)):
        a = rows[i][col]
        if a:
            size = len(a) if hasattr(a, "terms") else 1
            if best is None or size < best_size:
                best, best_size = i, size
    return best


def bareiss_echelon(rows: list[list], one, exquo) -> tuple[int, list[list], int, list[int]]:
    """In-place fraction-free forward elimination.

    Returns (rank, rows, sign, pivot_columns); entries below pivots are zero
    and each pivot is a minor of the input.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    rank, prev, sign = 0, one, 1
    pivots = []
    for col in range(n):
        if rank == m:
            break
        p = _ff_pivot(rows, rank, col)
        if p is None:
            continue
        if p != rank:
            rows[p], rows[rank] = rows[rank], rows[p]
            sign = -sign
        piv_row = rows[rank]
        a = piv_row[col]
        for i in range(rank + 1, m):
            row = rows[i]
            b = row[col]
            if b:
                for j in range(col + 1, n):
                    row[j] = exquo(a * row[j] - b * piv_row[j], prev)
            else:
                for j in range(col + 1, n):
                    row[j] = exquo(a * row[j], prev)
            row[col] = a * 0
        prev = a
        rank += 1
        pivots.append(col)
    return rank, rows, sign, pivots


def _int_exquo(a, b):
    q, r = divmod(a, b)
    assert r == 0, "Bareiss division not exact"
    return q


def _poly_exquo(a, b):
    return a.exquo(b)


def _clear_rows(entries, field) -> tuple[list[list], list]:
    """Scale each row to polynomial (or integer) entries; return rows and scale factors."""
    if field is None:
        out, scales = [], []
        for row in entries:
            fr = [to_fraction(x) for x in row]
            d = 1
            for x in fr:
                d = d * x.denominator // gcd(d, x.denominator)
            out.append([int(x * d) for x in fr])
            scales.append(d)
        return out, scales
    ring = field.ring
    out, scales = [], []
    for row in entries:
        d = ring.one
        for x in row:
            if x:
                d = d.lcm(x.denom)
        out.append([x.numer * d.exquo(x.denom) if x else ring.zero for x in row])
        scales.append(d)
    return out, scales


def _matrix_field(entries) -> FracField | None:
    for row in entries:
        for x in row:
            if isinstance(x, FracElement):
                return x.field
    return None


class ExactMatrix:
    """Immutable rectangular matrix with exact entries.

    Entries are either all Fractions (``field is None``) or all elements of
    one sympy ``FracField``.
    """

    __slots__ = ("rows", "cols", "entries", "field")

    def __init__(self, entries: Iterable[Iterable], field: FracField | None = None, cols: int | None = None):
        raw = [list(r) for r in entries]
        if field is None:
            field = _matrix_field(raw)
        if field is None:
            data = tuple(tuple(to_fraction(x) for x in r) for r in raw)
        else:
            data = tuple(tuple(coerce(x, field) for x in r) for r in raw)
        widths = {len(r) for r in data}
        if len(widths) > 1:
            raise DimensionMismatch("ragged matrix")
        self.entries = data
        self.rows = len(data)
        self.cols = widths.pop() if widths else (cols or 0)
        self.field = field

    # construction helpers
    @classmethod
    def identity(cls, n: int, field: FracField | None = None) -> "ExactMatrix":
        one = field.one if field is not None else Fraction(1)
        zero = one * 0
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], field)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def tolist(self):
        return [list(r) for r in self.entries]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(transpose(self.entries), self.field, cols=self.rows)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"ExactMatrix({[[str(x) for x in r] for r in self.entries]})"

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        field = self.field or other.field
        zero = field.zero if field is not None else Fraction(0)
        out = []
        for i in range(self.rows):
            ri = self.entries[i]
            row = []
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    a = ri[k]
                    if a:
                        b = other.entries[k][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return ExactMatrix(out, field, cols=other.cols)

    def is_identity(self) -> bool:
        return self.rows == self.cols and all(
            (x == 1) if i == j else (not x) for i, r in enumerate(self.entries) for j, x in enumerate(r)
        )

    # exact linear algebra
    def _cleared(self):
        rows, scales = _clear_rows(self.entries, self.field)
        if self.field is None:
            return rows, scales, 1, _int_exquo
        return rows, scales, self.field.ring.one, _poly_exquo

    def rank(self) -> int:
        if self.rows == 0 or self.cols == 0:
            return 0
        rows, _, one, exquo = self._cleared()
        return bareiss_echelon(rows, one, exquo)[0]

    def det(self):
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return self.field.one if self.field is not None else Fraction(1)
        rows, scales, one, exquo = self._cleared()
        rank, rows, sign, _ = bareiss_echelon(rows, one, exquo)
        if rank < n:
            return self.field.zero if self.field is not None else Fraction(0)
        d = rows[n - 1][n - 1] * sign
        scale = reduce(lambda a, b: a * b, scales, one)
        if self.field is None:
            return Fraction(d, scale)
        return self.field(d) / self.field(scale)

    def inverse(self) -> "ExactMatrix":
        """Two-sided inverse by fraction-free Gauss-Jordan on ``[P | I]``."""
        if self.rows != self.cols:
            raise DimensionMismatch("inverse of a non-square matrix")
        n = self.rows
        rows, scales, one, exquo = self._cleared()
        zero = one * 0
        aug = [rows[i] + [one if i == j else zero for j in range(n)] for i in range(n)]
        prev = one
        for k in range(n):
            p = _ff_pivot(aug, k, k)
            if p is None:
                raise SingularMatrix(f"matrix is singular (rank < {n})")
            if p != k:
                aug[p], aug[k] = aug[k], aug[p]
            a = aug[k][k]
            pk = aug[k]
            for i in range(n):
                if i == k:
                    continue
                row = aug[i]
                b = row[k]
                for j in range(2 * n):
                    if j == k:
                        continue
                    row[j] = exquo(a * row[j] - b * pk[j], prev)
                row[k] = zero
            prev = a
        d = prev
        if self.field is None:
            out = [[Fraction(aug[i][n + j] * scales[j], d) for j in range(n)] for i in range(n)]
            return ExactMatrix(out)
        F = self.field
        dd = F(d)
        out = [[F(aug[i][n + j] * scales[j]) / dd for j in range(n)] for i in range(n)]
        return ExactMatrix(out, F)

    def solve(self, rhs: Sequence) -> list:
        """Solve ``self @ x = rhs`` for square invertible ``self``."""
        inv = self.inverse()
        col = ExactMatrix([[r] for r in rhs], self.field, cols=1)
        return [r[0] for r in (inv @ col).entries]


def rank(M: ExactMatrix | Sequence[Sequence]) -> int:
    if not isinstance(M, ExactMatrix):
        M = ExactMatrix(M)
    return M.rank()


def invert(M: ExactMatrix) -> ExactMatrix:
    return M.inverse()


def det(M: ExactMatrix):
    return M.det()


# --------------------------------------------------------------------------
# Q-kernels and integer lattices


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    A = [[to_fraction(x) for x in r] for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        pv = A[r][c]
        A[r] = [x / pv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A[:r], pivots


def primitive(vec: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers with positive leading entry."""
    fr = [to_fraction(x) for x in vec]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = reduce(gcd, (abs(x) for x in ints), 0)
    if g == 0:
        return tuple(ints)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def q_kernel_basis(M: Sequence[Sequence], ncols: int | None = None) -> list[tuple[int, ...]]:
    """Basis of the right kernel over Q, as primitive integer vectors.

    ``ncols`` is needed when ``M`` has no rows.
    """
    if not M:
        n = ncols or 0
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    n = len(M[0])
    R, pivots = rref(M)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(primitive(v))
    return basis


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _hnf_rows(rows: list[list[int]], ncols: int, track: list[list[int]] | None = None) -> list[list[int]]:
    """Row-style Hermite normal form by unimodular row operations (in place)."""
    A = rows
    m = len(A)
    r = 0
    for c in range(ncols):
        # gather a gcd pivot into row r
        for i in range(r + 1, m):
            if A[i][c]:
                a, b = A[r][c], A[i][c]
                g, x, y = _xgcd(a, b)
                if a == 0:
                    A[r], A[i] = A[i], A[r]
                    if track is not None:
                        track[r], track[i] = track[i], track[r]
                    continue
                pa, pb = a // g, b // g
                Ar, Ai = A[r], A[i]
                A[r] = [x * u + y * v for u, v in zip(Ar, Ai)]
                A[i] = [-pb * u + pa * v for u, v in zip(Ar, Ai)]
                if track is not None:
                    Tr, Ti = track[r], track[i]
                    track[r] = [x * u + y * v for u, v in zip(Tr, Ti)]
                    track[i] = [-pb * u + pa * v for u, v in zip(Tr, Ti)]
        if r < m and A[r][c]:
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
                if track is not None:
                    track[r] = [-x for x in track[r]]
            p = A[r][c]
            for i in range(r):
                q = A[i][c] // p
                if q:
                    A[i] = [u - q * v for u, v in zip(A[i], A[r])]
                    if track is not None:
                        track[i] = [u - q * v for u, v in zip(track[i], track[r])]
            r += 1
            if r == m:
                break
    return A


def hnf_row_canonical(M: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Row Hermite normal form of an integer matrix, zero rows removed.

    Pivots are positive, entries above a pivot lie in ``[0, pivot)``; the
    result depends only on the row lattice.
    """
    rows = [[int(x) for x in r] for r in M]
    if not rows:
        return ()
    ncols = len(rows[0])
    H = _hnf_rows(rows, ncols)
    return tuple(tuple(r) for r in H if any(r))


def integer_kernel_lattice(M: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Z-basis of ``{v in Z^n : M v = 0}``."""
    if not M:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]
    At = [[int(M[i][j]) for i in range(len(M))] for j in range(ncols)]
    track = [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    _hnf_rows(At, len(M), track)
    return [tuple(track[i]) for i in range(ncols) if not any(At[i])]


def saturate(M: Sequence[Sequence[int]], ncols: int | None = None) -> tuple[tuple[int, ...], ...]:
    """HNF basis of (rational row space of M) intersected with Z^n."""
    if not M:
        return ()
    n = len(M[0]) if ncols is None else ncols
    perp = q_kernel_basis(M, n)
    return hnf_row_canonical(integer_kernel_lattice(perp, n))


def rowspace_canonical(M: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """One canonical integer matrix per rational row space (saturated HNF)."""
    return saturate(M)


def int_matrix_rank(M: Sequence[Sequence[int]]) -> int:
    if not M or not M[0]:
        return 0
    rows = [[int(x) for x in r] for r in M]
    return bareiss_echelon(rows, 1, _int_exquo)[0]


def to_text(f) -> str:
    """Printable form of a field element in the input expression syntax."""
    text = str(f.as_expr()).replace("**", "^")
    return re.sub(r"\^\((-\d+)\)", r"^\1", text)
