import pytest
from hypothesis import given
from hypothesis import strategies as st

from axel.expfield import ExpField, is_constant
from axel.generators import Generator, GeneratorConfig
from axel.lindeq import fundamental_system, make_equation, solution_from_coefficients
from axel.predimension import (
    InvalidInstance,
    NotProper,
    NotSubpresentation,
    delta_auto,
    delta_en,
    delta_exp,
    epsilon_sigma_en,
    epsilon_tuple,
    lift_pair,
    make_structure,
    sigma_equality_check,
    sigma_exp,
    strong_substructure,
    validate_axioms,
    verify_AS,
    verify_AS_higher,
)
from axel.transcendence import td_over_C

seeds = st.integers(0, 10_000)
F = ExpField(("s",), "t", ["t", "s*t"])
u1, u2 = F.u(1), F.u(2)


def test_sigma_exp_examples():
    assert sigma_exp(make_structure((), [(F.t, u1)])).dimension == 1
    assert sigma_exp(make_structure((), [(F.t, u1), (F("t+1"), 2 * u1)])).dimension == 1
    assert sigma_exp(make_structure((), (), field=F)).dimension == 0


def test_delta_exp_examples():
    r = delta_exp(make_structure((), [(F.t, u1)]))
    assert (r.td, r.sigma, r.delta) == (2, 1, 1)
    r = delta_exp(make_structure((), [(F.t, u1), (F("s*t"), u2)]))
    assert (r.td, r.sigma, r.delta) == (3, 2, 1)
    r = delta_exp(make_structure([F("s"), F(4)], [(F("s"), F(7))]))
    assert r.delta == 0 and r.all_constant


def test_declared_instances_are_validated():
    with pytest.raises(InvalidInstance):
        make_structure((), [(F.t, u2)])


def test_epsilon_sigma_examples():
    E1 = make_equation([("1", 1)])
    G = ExpField((), "t", ["t"])
    S = make_structure((), (), [solution_from_coefficients(fundamental_system(E1, G.t), [1])], equation=E1)
    assert epsilon_sigma_en(S).dimension == 1
    E = make_equation([("1", 1), ("-1", 1)])
    FS = fundamental_system(E, E.base_field.t)
    one_block = solution_from_coefficients(FS, [1, 0])
    assert [str(v) for v in epsilon_tuple(E, one_block)] == ["t", "0"]
    assert epsilon_sigma_en(make_structure((), (), [one_block], equation=E)).dimension == 1
    proper = solution_from_coefficients(FS, [1, 1])
    assert [str(v) for v in epsilon_tuple(E, proper)] == ["t", "-t"]
    # t and -t are Q-dependent mod C
    assert epsilon_sigma_en(make_structure((), (), [proper], equation=E)).dimension == 1


def test_verify_as_examples():
    # margin is td - ldim - 1
    r = verify_AS([(F.t, u1)])
    assert (r.td, r.ldim, r.margin, r.holds) == (2, 1, 0, True)
    r = verify_AS([(F.t, u1), (F("2*t"), u1**2)])
    assert (r.td, r.ldim) == (2, 1)
    assert r.relation in ((2, -1), (-2, 1))
    assert verify_AS([]).holds


def test_verify_as_higher_examples():
    E = make_equation([("1", 1), ("s", 1)], ("s",))
    sol = solution_from_coefficients(fundamental_system(E, E.base_field.t), [1, 1])
    r = verify_AS_higher(E, [sol])
    assert (r.td, r.ldim, r.margin) == (3, 2, 0)
    E2 = make_equation([("1", 2)])
    sol2 = solution_from_coefficients(fundamental_system(E2, E2.base_field.t), [1, 1])
    r = verify_AS_higher(E2, [sol2])
    assert (r.td, r.ldim + 1, r.margin) == (2, 2, 0)
    assert verify_AS_higher(E2, []).holds


def test_verify_as_higher_rejects_improper_in_proper_mode():
    E = make_equation([("1", 1), ("-1", 1)])
    sol = solution_from_coefficients(fundamental_system(E, E.base_field.t), [1, 0])
    with pytest.raises(NotProper):
        verify_AS_higher(E, [sol], "proper")
    assert verify_AS_higher(E, [sol], "epsilon").holds


def test_strong_substructure_examples():
    B = make_structure((), [(F.t, u1), (F("s*t"), u2)])
    A = make_structure((), [(F.t, u1)])
    rep = strong_substructure(A, B)
    assert rep.holds and rep.checked == 5
    const = make_structure([F("s")], (), field=F)
    assert strong_substructure(const, make_structure([F("s")], [(F.t, u1)])).holds
    with pytest.raises(NotSubpresentation):
        strong_substructure(make_structure((), [(F("2*t"), u1**2)]), B)


def test_strong_substructure_false_branch_with_mock_delta():
    B = make_structure((), [(F.t, u1), (F("s*t"), u2)])
    A = make_structure((), [(F.t, u1)])

    def mock(S):
        # pretend larger structures lose predimension
        return 5 - len(S.exp_instances) * 2 if S.exp_instances else 0

    rep = strong_substructure(A, B, delta=mock)
    assert not rep.holds and rep.failures


def test_sigma_equality_examples():
    E = make_equation([("1", 1), ("-1", 1)])
    G = ExpField((), "t", ["t"])
    S = make_structure((), [(G.t, G.u(1))], equation=E)
    res = sigma_equality_check(S)
    assert res.equal and res.sigma_exp == 1
    empty = make_structure((), (), field=G, equation=E)
    assert sigma_equality_check(empty).sigma_exp == 0 and sigma_equality_check(empty).equal


def test_validate_axioms_examples():
    G = ExpField((), "t", ["t"])
    u = G.u(1)
    assert validate_axioms(make_structure((), [(G.t, u), (-G.t, 1 / u)]))["passed"]
    assert validate_axioms(make_structure((), [(G.t, u), (G.t, 2 * u)]))["passed"]
    E = make_equation([("1", 1), ("s", 1)], ("s",))
    sol = solution_from_coefficients(fundamental_system(E, E.base_field.t), [2, -1])
    report = validate_axioms(make_structure((), (), [sol], equation=E))
    assert report["passed"]
    assert {c["axiom"] for c in report["checks"]} >= {"A3 reconstruction", "A2 constants", "AS'"}


@given(seeds)
def test_verify_as_margin(seed):
    gen = Generator(GeneratorConfig(seed=seed))
    pairs = gen.exp_pairs()
    r = verify_AS(pairs)
    assert r.margin == r.td - r.ldim - 1 >= 0


@given(seeds)
def test_delta_nonnegative_and_zero_only_on_constants(seed):
    gen = Generator(GeneratorConfig(seed=seed))
    S = gen.structure("exp" if seed % 2 else "en", constant_only=seed % 5 == 0)
    d = delta_auto(S)
    assert d >= 0
    assert (d == 0) == all(is_constant(e) for e in S.elements())


@given(seeds)
def test_adding_an_instance_is_monotone(seed):
    gen = Generator(GeneratorConfig(seed=seed))
    pairs = gen.exp_pairs(3)
    small = make_structure((), pairs[:2])
    big = make_structure((), pairs)
    assert sigma_exp(big).dimension >= sigma_exp(small).dimension
    d_td = td_over_C(big.elements()) - td_over_C(small.elements())
    assert delta_exp(big).delta - delta_exp(small).delta <= d_td


@given(seeds)
def test_lifted_pairs_keep_both_sigmas(seed):
    gen = Generator(GeneratorConfig(seed=seed))
    E = gen.equation(max_order=3)
    x = gen.x()
    G, y = x.field.adjoin((x * E.mu[0]).to_ct())
    a = G.embed(x) * E.mu[0]
    sol = lift_pair(E, a, y)
    assert delta_en(make_structure((), (), [sol], equation=E)).delta >= 0
    assert sigma_equality_check(make_structure((), [(a, y)], equation=E)).equal
