import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chono.expr import EvalError, ParseError, evaluate, parse, to_text


def ev(text, x=0.0, y=0.0):
    return evaluate(parse(text), x, y)


def test_precedence_basics():
    assert ev("1+2*3") == 7.0
    assert ev("(1+2)*3") == 9.0
    assert ev("2*3-1") == 5.0
    assert ev("6/3/2") == 1.0  # left-associative


def test_power_right_associative():
    assert ev("2^3^2") == 512.0
    assert ev("2^(3^2)") == 512.0  # parenthesized oracle
    assert ev("(2^3)^2") == 64.0


def test_unary_minus_binds_below_power():
    assert ev("-2^2") == -4.0
    assert ev("(-2)^2") == 4.0
    assert ev("2^-1") == 0.5


def test_variables_and_functions():
    assert ev("x-y", 0.3, 0.3) == 0.0
    assert ev("cos(10*(x-y))*x*y", 0.5, 0.5) == 0.25
    assert ev("sin(x*y)", 1.0, 1.0) == pytest.approx(0.8414710, abs=1e-6)
    assert ev("sin(10*x*y)", 0.0, 123.0) == 0.0
    assert ev("tanh(0)") == 0.0
    assert ev("abs(-3)") == 3.0
    assert ev("exp(1)") == pytest.approx(math.e, rel=1e-15)
    assert ev("pi") == math.pi


def test_parse_errors_carry_offset():
    with pytest.raises(ParseError) as err:
        parse("1 + * 2")
    assert err.value.offset == 4
    with pytest.raises(ParseError) as err:
        parse("sin 1")
    assert err.value.offset == 4
    with pytest.raises(ParseError) as err:
        parse("(1+2")
    assert err.value.offset == 4


def test_implicit_multiplication_rejected():
    with pytest.raises(ParseError):
        parse("10xy")  # the shorthand "10xy" must be spelled 10*x*y
    with pytest.raises(ParseError):
        parse("xy")
    with pytest.raises(ParseError):
        parse("2(x+y)")


def test_unknown_names_rejected():
    with pytest.raises(ParseError):
        parse("cot(x)")
    with pytest.raises(ParseError):
        parse("z+1")


def test_eval_errors_on_nonfinite():
    with pytest.raises(EvalError):
        ev("1/0")
    with pytest.raises(EvalError):
        ev("0^-1")
    with pytest.raises(EvalError):
        ev("exp(10000)")
    with pytest.raises(EvalError):
        ev("(-1)^0.5")


def test_redundant_parentheses_agree():
    pairs = [("1+2*3", "1+(2*3)"), ("-x^2", "-(x^2)"), ("x*y+y", "(x*y)+y")]
    for left, right in pairs:
        for x, y in [(0.3, 0.7), (1.5, -2.0)]:
            assert ev(left, x, y) == pytest.approx(ev(right, x, y), abs=1e-14)


ROUNDTRIP_CORPUS = [
    "sin(10*x*y)",
    "cos(10*(x-y))*x*y",
    "sin(x*y)",
    "1+2*3-4/8",
    "2^3^2",
    "-x^2+tanh(x*y)",
    "abs(x-y)*exp(-x)",
    "pi*x - 0.5*y",
]


@pytest.mark.parametrize("text", ROUNDTRIP_CORPUS)
def test_roundtrip_corpus(text):
    tree = parse(text)
    reparsed = parse(to_text(tree))
    for i in range(100):
        x = -2.0 + 4.0 * ((i * 37) % 100) / 99.0
        y = -2.0 + 4.0 * ((i * 61) % 100) / 99.0
        assert evaluate(reparsed, x, y) == pytest.approx(evaluate(tree, x, y), abs=1e-14)


# random finite-valued ASTs (no division/power, so evaluation never faults)
_safe_tree = st.recursive(
    st.one_of(
        st.floats(-5.0, 5.0).map(lambda v: ("num", v)),
        st.sampled_from([("var", "x"), ("var", "y")]),
    ),
    lambda children: st.one_of(
        st.tuples(st.sampled_from(["add", "sub", "mul"]), children, children),
        children.map(lambda e: ("neg", e)),
        st.tuples(st.sampled_from(["sin", "cos", "tanh"]), children).map(
            lambda t: ("call", t[0], t[1])),
    ),
    max_leaves=20,
)


@settings(max_examples=100, deadline=None)
@given(tree=_safe_tree, x=st.floats(-3.0, 3.0), y=st.floats(-3.0, 3.0))
def test_roundtrip_property(tree, x, y):
    assert evaluate(parse(to_text(tree)), x, y) == pytest.approx(
        evaluate(tree, x, y), abs=1e-12)
