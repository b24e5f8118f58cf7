import pytest
from hypothesis import given
from hypothesis import strategies as st

from axel.instance import (
    InstanceError,
    InstanceFile,
    SolutionSpec,
    VarietySpec,
    build_equation,
    build_pairs,
    build_solutions,
    build_structure,
    build_variety,
    from_dict,
    parse_instance,
    serialize_instance,
)
from axel.lindeq import en_membership
from axel.rotundity import LinearBinomialVariety, ParamVariety


def error_of(text):
    with pytest.raises(InstanceError) as info:
        parse_instance(text)
    return info.value


SOLUTIONS = """constants = ["s"]

[equation]
eigenvalues = [["1", 1], ["s", 1]]

[[solutions]]
x = "t"
coefficients = [["1"], ["2"]]

[[solutions]]
x = "t + 1"
z = ["u1", "u1"]
"""


def test_parse_and_build_solutions():
    inst = parse_instance(SOLUTIONS.replace('z = ["u1", "u1"]', 'coefficients = [["0"], ["1"]]'))
    assert inst.constants == ("s",)
    assert inst.eigenvalues == (("1", 1), ("s", 1))
    E = build_equation(inst)
    sols = build_solutions(inst, E)
    assert len(sols) == 2
    assert all(en_membership(E, s.x, s.z) for s in sols)


def test_z_solutions_are_checked():
    text = """[model]
exponents = ["t"]

[equation]
eigenvalues = [["1", 1]]

[[solutions]]
x = "t"
z = ["u1"]

[[solutions]]
x = "t"
z = ["t"]
"""
    inst = parse_instance(text)
    with pytest.raises(ValueError):
        build_solutions(inst, build_equation(inst))


def test_exp_instances_and_structure():
    text = """constants = ["s"]
generators = ["s"]

[model]
exponents = ["t"]

[[exp_instances]]
a = "t"
b = "u1"
"""
    inst = parse_instance(text)
    (pair,) = build_pairs(inst)
    assert str(pair[0]) == "t" and str(pair[1]) == "u1"
    S = build_structure(inst)
    assert len(S.exp_instances) == 1 and len(S.generators) == 1


def test_varieties():
    g = parse_instance(
        """[variety]
ambient = "G"
n = 2
parameters = ["w1", "w2"]
x = ["w1", "w2"]
y = ["w1", "w2"]
"""
    )
    V = build_variety(g)
    assert isinstance(V, ParamVariety) and V.ambient == ("G", 2) and V.dimension() == 2
    lb = parse_instance(
        """constants = ["s"]

[variety]
representation = "linear-binomial"
n = 2
x_equations = [{ coefficients = ["1", "-1"], rhs = "s" }]
y_equations = [{ exponents = [1, 1], gamma = "2" }]
"""
    )
    W = build_variety(lb)
    assert isinstance(W, LinearBinomialVariety) and W.dimension() == 2


def test_missing_sections():
    inst = parse_instance('constants = ["s"]\n')
    with pytest.raises(InstanceError) as info:
        build_equation(inst)
    assert info.value.kind == "MissingSection"
    with pytest.raises(InstanceError):
        build_variety(inst)


# -- diagnostics -------------------------------------------------------------


def test_expression_error_location():
    e = error_of('[equation]\neigenvalues = [["1", 1]]\n\n[[solutions]]\nx = "t +"\ncoefficients = [["1"]]\n')
    assert (e.kind, e.line, e.column) == ("ParseError", 5, 8)


def test_undeclared_symbol_location():
    e = error_of('constants = ["s"]\ngenerators = ["t + q"]\n')
    assert (e.kind, e.line, e.column) == ("UndeclaredSymbol", 2, 20)
    assert "'q'" in e.message


def test_toml_syntax_error_location():
    e = error_of('constants = ["s"\n')
    assert e.kind == "ParseError" and e.line is not None


def test_structural_errors():
    assert error_of("foo = 1\n").line == 1
    e = error_of('[equation]\neigenvalues = [["t", 1]]\n')
    assert (e.kind, e.line, e.column) == ("InvalidEigenvalue", 2, 18)
    e = error_of('[equation]\neigenvalues = [["1", 0]]\n')
    assert e.kind == "InvalidEigenvalue"
    assert "exactly one" in error_of('[[solutions]]\nx = "t"\n').message
    assert "clashes" in error_of('constants = ["u1"]\n').message
    assert error_of('[model]\nexponents = ["u1"]\n').kind == "UndeclaredSymbol"


def test_error_dict_shape():
    d = error_of("foo = 1\n").to_dict()
    assert set(d) == {"error", "message", "line", "column"}


# -- round trip --------------------------------------------------------------

ct_exprs = st.sampled_from(["t", "s*t", "t^2", "t + 1", "s", "2*t - s", "1/(t+1)"])
full_exprs = st.sampled_from(["t", "u1", "u1^-1", "t*u1", "s + u1", "3"])
constants_only = st.sampled_from(["0", "1", "-2", "s", "1/2"])


@st.composite
def instances(draw):
    exps = tuple(draw(st.lists(st.sampled_from(["t", "s*t", "t^2"]), min_size=1, max_size=2, unique=True)))
    eig = None
    sols = ()
    if draw(st.booleans()):
        mults = draw(st.lists(st.integers(1, 2), min_size=1, max_size=2))
        vals = draw(st.lists(st.sampled_from(["1", "-1", "s", "2"]), min_size=len(mults), max_size=len(mults), unique=True))
        eig = tuple(zip(vals, mults))
        n = sum(mults)
        sols = tuple(
            draw(
                st.one_of(
                    st.builds(
                        lambda x, c: SolutionSpec(x, coefficients=tuple(tuple(c[: m]) for m in mults)),
                        ct_exprs,
                        st.lists(constants_only, min_size=2, max_size=2),
                    ),
                    st.builds(lambda x, z: SolutionSpec(x, z=tuple(z)), ct_exprs, st.lists(full_exprs, min_size=n, max_size=n)),
                    st.builds(lambda x, y: SolutionSpec(x, y=y), ct_exprs, full_exprs),
                )
            )
            for _ in range(draw(st.integers(0, 2)))
        )
    pairs = tuple(draw(st.lists(st.tuples(ct_exprs, full_exprs), max_size=2)))
    variety = None
    if draw(st.booleans()):
        variety = VarietySpec("G", 1, 1, ("w",), ("w",), (draw(st.sampled_from(["w", "w^2 + s", "1/w"])),))
    return InstanceFile(
        constants=("s",),
        exponents=exps,
        generators=tuple(draw(st.lists(full_exprs, max_size=2))),
        eigenvalues=eig,
        solutions=sols,
        exp_instances=pairs,
        variety=variety,
    )


@given(instances())
def test_serialize_round_trip(inst):
    text = serialize_instance(inst)
    back = parse_instance(text)
    assert back == inst
    assert from_dict(inst.to_dict()) == inst
    assert serialize_instance(back) == text
