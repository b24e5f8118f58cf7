from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from axel.expr import ParseError, UndeclaredSymbol, check_symbols, evaluate, parse_expression

SYMS = ["t", "s", "u1"]


def test_polynomial_parses():
    node = parse_expression("t^2 + s*t")
    check_symbols(node, {"t", "s"})
    t, s = sympy.symbols("t s")
    assert evaluate(node, {"t": t, "s": s}, number=sympy.Integer) == t**2 + s * t


def test_trailing_operator_reports_its_column():
    with pytest.raises(ParseError) as err:
        parse_expression("t +")
    assert err.value.column == 3


@pytest.mark.parametrize(
    "text, column",
    [("", 1), ("(t", 1), ("t ^ s", 5), ("t $ 1", 3), ("2 3", 3), ("*t", 1)],
)
def test_parse_errors_are_located(text, column):
    with pytest.raises(ParseError) as err:
        parse_expression(text)
    assert err.value.column == column


def test_undeclared_symbol_carries_column():
    node = parse_expression("t + q")
    with pytest.raises(UndeclaredSymbol) as err:
        check_symbols(node, {"t"})
    assert err.value.name == "q" and err.value.column == 5


def test_negative_exponent_and_division():
    node = parse_expression("(2/3)^-2 - 1/4")
    assert evaluate(node, {}) == Fraction(9, 4) - Fraction(1, 4)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        evaluate(parse_expression("1/(2-2)"), {})


def expressions(depth=3):
    leaf = st.one_of(st.sampled_from(SYMS), st.integers(0, 9).map(str))
    if depth == 0:
        return leaf

    sub = expressions(depth - 1)
    return st.one_of(
        leaf,
        st.tuples(sub, st.sampled_from(["+", "-", "*"]), sub).map(lambda p: f"({p[0]}) {p[1]} ({p[2]})"),
        st.tuples(sub, st.integers(0, 3)).map(lambda p: f"({p[0]})^{p[1]}"),
        sub.map(lambda e: f"-({e})"),
    )


@given(expressions())
def test_evaluation_matches_sympy(text):
    env = {n: sympy.Symbol(n) for n in SYMS}
    ours = evaluate(parse_expression(text), env, number=sympy.Integer)
    ref = sympy.sympify(text.replace("^", "**"), locals=env)
    assert sympy.expand(ours - ref) == 0
