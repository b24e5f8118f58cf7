from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from axel.algebra import (
    ExactMatrix,
    SingularMatrix,
    hnf_row_canonical,
    int_matrix_rank,
    q_kernel_basis,
    rational_field,
    rowspace_canonical,
    to_text,
)

small = st.integers(-6, 6)


def int_matrix(rows=st.integers(1, 4), cols=st.integers(1, 4)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.lists(small, min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0])
    )


def test_rank_identity():
    assert ExactMatrix([[1, 0], [0, 1]]).rank() == 2


def test_rank_symbolic_dependent_rows():
    K = rational_field(("s",))
    s = K.gens[0]
    assert ExactMatrix([[K(1), s], [K(2), 2 * s]], K).rank() == 1


def test_vandermonde_rank_and_inverse():
    K = rational_field(("m1", "m2"))
    m1, m2 = K.gens
    V = ExactMatrix([[K(1), K(1)], [m1, m2]], K)
    assert V.rank() == 2
    Vi = V.inverse()
    expected = [[m2 / (m2 - m1), -1 / (m2 - m1)], [-m1 / (m2 - m1), 1 / (m2 - m1)]]
    assert [[Vi[i, j] for j in range(2)] for i in range(2)] == expected
    assert (V @ Vi).is_identity()


def test_identity_inverse_and_singular():
    assert ExactMatrix([[1, 0], [0, 1]]).inverse().is_identity()
    with pytest.raises(SingularMatrix):
        ExactMatrix([[0]]).inverse()


def test_kernel_examples():
    ker = q_kernel_basis([[1, 1, -2]], 3)
    assert len(ker) == 2
    for v in ker:
        assert v[0] + v[1] - 2 * v[2] == 0
    assert q_kernel_basis([[1, 0], [0, 1]], 2) == []
    assert len(q_kernel_basis([[0, 0, 0]], 3)) == 3


def test_rowspace_examples():
    assert rowspace_canonical([[2, 4], [1, 2]]) == ((1, 2),)
    assert rowspace_canonical([[1, 0], [0, 1]]) == ((1, 0), (0, 1))
    assert rowspace_canonical([[0, 0]]) == ()


def test_to_text_uses_input_syntax():
    K = rational_field(("t", "u1"))
    t, u = K.gens
    assert to_text(t**2 / u**2) == "t^2/u1^2"


@given(int_matrix())
def test_rank_matches_sympy(M):
    assert ExactMatrix(M).rank() == sympy.Matrix(M).rank()


@given(int_matrix(st.integers(1, 3), st.integers(1, 3)))
def test_symbolic_det_matches_sympy(M):
    # perturb the diagonal by a symbol: exact fraction-free elimination over Q(s)
    K = rational_field(("s",))
    s = K.gens[0]
    n = min(len(M), len(M[0]))
    sq = [[K(M[i][j]) + (s if i == j else 0) for j in range(n)] for i in range(n)]
    S = sympy.Symbol("s")
    ref = sympy.Matrix([[M[i][j] + (S if i == j else 0) for j in range(n)] for i in range(n)]).det()
    assert sympy.expand(ExactMatrix(sq, K).det().as_expr() - ref) == 0


@given(int_matrix())
def test_kernel_vectors_are_annihilated(M):
    ncols = len(M[0])
    ker = q_kernel_basis(M, ncols)
    assert len(ker) == ncols - sympy.Matrix(M).rank()
    for v in ker:
        assert all(sum(Fraction(a) * b for a, b in zip(row, v)) == 0 for row in M)


@given(int_matrix(), st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(-3, 3)), max_size=6))
def test_rowspace_canonical_invariant_under_row_operations(M, ops):
    base = rowspace_canonical(M)
    rows = [list(r) for r in M]
    for i, j, c in ops:
        i %= len(rows)
        j %= len(rows)
        if i != j:
            rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    rows.append([0] * len(M[0]))
    assert rowspace_canonical(rows) == base
    assert len(base) == int_matrix_rank(M)


@given(int_matrix())
def test_hnf_spans_same_lattice(M):
    H = hnf_row_canonical(M)
    # each HNF row is an integer combination of M's rows and vice versa: compare via sympy
    A = sympy.Matrix(M)
    if H:
        B = sympy.Matrix(H)
        assert A.rank() == B.rank() == sympy.Matrix.vstack(A, B).rank()
