import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from axel.expfield import ConstantBase, ExpField, derive
from axel.generators import Generator, GeneratorConfig
from axel.lindeq import (
    IndexOutOfRange,
    NonPolynomialBase,
    NotASolution,
    ProperCriteriaDisagree,
    ZeroEigenvalue,
    apply_operator,
    decompose,
    delta_eval,
    en_membership,
    fundamental_system,
    g_poly,
    g_poly_closed,
    hankel_wronskian,
    is_proper,
    make_equation,
    proper_criteria,
    satisfies,
    solution_from_coefficients,
    top_coefficients_nonzero,
)

seeds = st.integers(0, 10_000)


def test_characteristic_polynomial_expansion():
    E = make_equation([("1", 2), ("-2", 1)])
    assert [str(c) for c in E.coeffs] == ["2", "-3", "0"]
    assert [str(c) for c in make_equation([("1", 1)]).coeffs] == ["-1"]
    with pytest.raises(ZeroEigenvalue):
        make_equation([("0", 1)])


def test_delta_eval_examples():
    F = ExpField((), "t", ["t"])
    exp_eq = make_equation([("1", 1)])
    assert not delta_eval(exp_eq, F.t, F.u(1))
    assert not delta_eval(make_equation([("1", 2)]), F.t, F.t * F.u(1))
    assert delta_eval(exp_eq, F.t, F.t) == F("1 - t")


def test_en_membership_examples():
    F = ExpField((), "t", ["t"])
    E = make_equation([("1", 1), ("-1", 1)])
    u = F.u(1)
    assert en_membership(E, F.t, [u + 1 / u, u - 1 / u])
    assert en_membership(E, F(5), [F(3), F(7)])
    assert not en_membership(E, F.t, [F.t, F(1)])


def test_apply_operator_examples():
    F = ExpField((), "t", ["t"])
    E = make_equation([("1", 2)])
    assert not apply_operator(E, F.t, F.u(1), [("1", 1)])
    assert not apply_operator(E, F.t, F.t * F.u(1), [("1", 2)])
    with pytest.raises(ConstantBase):
        apply_operator(E, F(2), F.u(1), [("1", 1)])


@given(seeds)
def test_operator_isolates_top_term(seed):
    gen = Generator(GeneratorConfig(seed=seed))
    E = gen.equation(max_order=4)
    FS = fundamental_system(E, gen.x())
    i = seed % E.k
    top = E.mult[i] - 1
    shifts = [(E.mu[i], top)] + [(E.mu[s], E.mult[s]) for s in range(E.k) if s != i]
    y = FS.leaders[i] * FS.x**top
    expected = FS.leaders[i] * math.factorial(top)
    for s in range(E.k):
        if s != i:
            expected = expected * (E.mu[i] - E.mu[s]) ** E.mult[s]
    assert apply_operator(E, FS.x, y, shifts) == expected


def test_fundamental_system_distinct_roots():
    E = make_equation([("1", 1), ("s", 1)], ("s",))
    FS = fundamental_system(E, E.base_field.t)
    assert [str(v) for v in FS.v] == ["u1", "u2"]
    F = FS.field
    assert FS.H.tolist() == [[F(1).value, F(1).value], [F(1).value, F("s").value]]


def test_fundamental_system_repeated_root():
    E = make_equation([("1", 2)])
    FS = fundamental_system(E, E.base_field.t)
    F = FS.field
    assert [str(v) for v in FS.v] == ["u1", "t*u1"]
    assert FS.H.tolist() == [[F(1).value, F(1).value], [F(1).value, F("(1+t)/t").value]]
    assert FS.H.det() == F("1/t").value


def test_fundamental_system_exp_equation():
    E = make_equation([("1", 1)])
    FS = fundamental_system(E, E.base_field.t)
    assert FS.H.tolist() == [[FS.field(1).value]]
    assert FS.wronskian == FS.field.u(1)


def test_fundamental_system_rejects_bad_bases():
    E = make_equation([("1", 1)])
    F = ExpField((), "t", ["t"])
    with pytest.raises(ConstantBase):
        fundamental_system(E, F(3))
    with pytest.raises(NonPolynomialBase):
        fundamental_system(E, F("1/t"))
    with pytest.raises(NonPolynomialBase):
        fundamental_system(E, F("u1"))


def test_g_poly_examples():
    E = make_equation([("s", 2), ("2", 1)], ("s",))
    F = E.base_field
    assert g_poly(E, 1, 0, 3) == (F("s^3"),)
    assert g_poly(E, 1, 1, 1) == (F(1), F("s"))
    assert g_poly(E, 1, 1, 0) == (F(0), F(1))
    with pytest.raises(IndexOutOfRange):
        g_poly(E, 2, 1, 0)


@given(seeds, st.integers(0, 5))
def test_g_poly_recursion_matches_leibniz_form(seed, l):
    E = Generator(GeneratorConfig(seed=seed)).equation()
    for i in range(1, E.k + 1):
        for j in range(E.mult[i - 1]):
            rec = g_poly(E, i, j, l)
            closed = g_poly_closed(E, i, j, l)
            assert all(a == b for a, b in zip(rec, closed)) and len(rec) == len(closed)


def test_decompose_examples():
    E = make_equation([("1", 2)])
    F = ExpField((), "t", ["t"])
    FS = fundamental_system(E, F.t)
    dec = decompose(FS, F("3*u1 + t*u1"))
    assert [str(a) for a in dec.coefficients] == ["3", "1"] and dec.epsilon == (1,)
    E2 = make_equation([("1", 1), ("s", 1)], ("s",))
    FS2 = fundamental_system(E2, E2.base_field.t)
    assert decompose(FS2, FS2.v[0]).epsilon == (1, 0)
    assert decompose(FS2, FS2.v[1]).epsilon == (0, 1)
    with pytest.raises(NotASolution):
        decompose(FS, F("u1^2"))


def test_proper_examples():
    E = make_equation([("1", 1), ("-1", 1)])
    FS = fundamental_system(E, E.base_field.t)
    u1, u2 = FS.leaders
    assert is_proper(FS, u1 + u2)
    # det [[y, y'], [y', y'']] for y = u1 + 1/u1; the basis Wronskian is -2 u1 u2
    assert hankel_wronskian(FS.x, u1 + u2, 2) == 4
    assert FS.wronskian == -2 * u1 * u2
    assert not is_proper(FS, u1)
    E1 = make_equation([("2", 1)])
    FS1 = fundamental_system(E1, E1.base_field.t)
    assert is_proper(FS1, FS1.v[0] * 5)


def test_repeated_root_separates_the_two_criteria():
    # x exp(x) has a zero coefficient yet y, d/dx y are independent
    E = make_equation([("1", 2)])
    FS = fundamental_system(E, E.base_field.t)
    y = FS.v[1]
    assert proper_criteria(FS, y) == (False, True)
    assert top_coefficients_nonzero(decompose(FS, y))
    with pytest.raises(ProperCriteriaDisagree):
        is_proper(FS, y)
    assert is_proper(FS, y, check=False) is False


@given(seeds)
def test_fundamental_systems_solve_and_are_independent(seed):
    gen = Generator(GeneratorConfig(seed=seed))
    E = gen.equation()
    FS = fundamental_system(E, gen.x(fixed=seed % 2 == 0))
    assert len(FS.v) == E.n
    assert all(satisfies(E, FS.x, v) for v in FS.v)
    assert FS.wronskian
    assert (FS.H @ FS.L).is_identity()


@given(seeds)
def test_decomposition_round_trips(seed):
    gen = Generator(GeneratorConfig(seed=seed))
    E = gen.equation()
    FS, coeffs, sol = gen.solution(E)
    dec = decompose(FS, sol.y)
    assert [a == c for a, c in zip(dec.coefficients, coeffs)] == [True] * E.n
    assert en_membership(E, sol.x, sol.z)


@given(seeds)
def test_wronskian_criterion_is_top_coefficients(seed):
    gen = Generator(GeneratorConfig(seed=seed))
    E = gen.equation(max_order=3)
    FS, coeffs, sol = gen.solution(E)
    if not any(coeffs):
        return
    by_coeffs, by_wronskian = proper_criteria(FS, sol.y)
    assert by_wronskian == top_coefficients_nonzero(decompose(FS, sol.y))
    if all(m == 1 for m in E.mult):
        assert by_coeffs == by_wronskian


@given(seeds)
def test_solution_tuples_are_derivative_chains(seed):
    gen = Generator(GeneratorConfig(seed=seed))
    E = gen.equation(max_order=3)
    FS, coeffs, _ = gen.solution(E)
    sol = solution_from_coefficients(FS, coeffs)
    dx = derive(sol.x)
    for a, b in zip(sol.z, sol.z[1:]):
        assert derive(a) == b * dx
