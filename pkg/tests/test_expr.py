import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vielbein.expr import (
    BinOp,
    Call,
    Coord,
    EvalError,
    Neg,
    Num,
    Param,
    ParseError,
    eval_jet,
    parse,
    to_text,
)
from vielbein.jets import jet_seed

from conftest import fd_grad, fd_hess


def test_parse_precedence_example():
    tree = parse("1 - 2*M/x2", dim=4)
    assert tree == BinOp("-", Num(1.0),
                         BinOp("/", BinOp("*", Num(2.0), Param("M")), Coord(2)))


def test_parse_and_eval_sqrt_example():
    tree = parse("sqrt(1-2*M/x2+Q^2/x2^2)", dim=4)
    val = eval_jet(tree, [0.0, 4.0, 0.0, 0.0], {"M": 1.0, "Q": 0.0})
    assert math.isclose(val, math.sqrt(0.5), rel_tol=1e-15)


def test_coordinate_out_of_range():
    with pytest.raises(ParseError) as err:
        parse("x6", dim=5)
    assert "x6" in str(err.value)
    parse("x5", dim=5)


def test_unary_minus_binds_looser_than_power():
    assert parse("-x1^2", 2) == Neg(BinOp("^", Coord(1), Num(2.0)))
    assert parse("(-x1)^2", 2) == BinOp("^", Neg(Coord(1)), Num(2.0))


def test_left_associativity():
    assert parse("1-2-3", 1) == BinOp("-", BinOp("-", Num(1.0), Num(2.0)), Num(3.0))
    assert parse("2^3^2", 1) == BinOp("^", BinOp("^", Num(2.0), Num(3.0)), Num(2.0))
    assert eval_jet(parse("2^3^2", 1), [0.0]) == 64.0


def test_exponent_sign():
    tree = parse("x1^-2", 1)
    assert tree == BinOp("^", Coord(1), Neg(Num(2.0)))
    assert math.isclose(eval_jet(tree, [2.0]), 0.25)


def test_scientific_literals():
    assert parse("1.5e-3", 1) == Num(0.0015)
    assert parse(".5E2", 1) == Num(50.0)


def test_syntax_error_offsets():
    with pytest.raises(ParseError) as err:
        parse("1 + * 2", 1)
    assert err.value.offset == 4
    with pytest.raises(ParseError) as err:
        parse("1 + 2 $", 1)
    assert err.value.offset == 6
    with pytest.raises(ParseError):
        parse("", 1)
    with pytest.raises(ParseError):
        parse("(1 + 2", 1)


def test_unknown_function():
    with pytest.raises(ParseError) as err:
        parse("foo(x1)", 2)
    assert "foo" in str(err.value)


def test_eval_jet_polynomial():
    tree = parse("x1*x1", 4)
    out = eval_jet(tree, jet_seed((3.0, 0.0, 0.0, 0.0)))
    assert out.value == 9.0
    assert out.grad[0] == 6.0
    assert out.hess[0, 0] == 2.0


def test_eval_jet_seed_passthrough():
    out = eval_jet(parse("x2", 4), jet_seed((0.0, 5.0, 0.0, 0.0)))
    assert out.value == 5.0
    assert np.array_equal(out.grad, [0.0, 1.0, 0.0, 0.0])


def test_domain_error_reports_subexpression():
    tree = parse("1 + sqrt(x2)", 4)
    with pytest.raises(EvalError) as err:
        eval_jet(tree, jet_seed((0.0, 0.0, 0.0, 0.0)))
    assert "sqrt(x2)" in str(err.value)
    with pytest.raises(EvalError) as err:
        eval_jet(parse("1/x1", 1), jet_seed((0.0,)))
    assert "1.0 / x1" in str(err.value)


def test_unresolved_parameter():
    with pytest.raises(EvalError) as err:
        eval_jet(parse("M*x1", 1), [2.0], {})
    assert "M" in str(err.value)


def test_float_pow_rejects_complex():
    with pytest.raises(EvalError):
        eval_jet(parse("x1^0.5", 1), [-2.0])


CORPUS = [
    "1 - 2*M/x2",
    "sqrt(1 - 2*M/x2 + Q^2/x2^2)",
    "x1*sin(x3) + cos(x2)^2",
    "-x1^2 + x2^-2",
    "exp(-x1*x1/2)",
    "ln(x2 + 3) / (1 + x1^2)",
    "a*x1 + b*x2 + c",
    "((x1))",
    "1.5e-3*x1 - .5E2",
    "x1/x2/x3",
    "x1 - x2 - x3",
    "2^x1^2",
    "-(x1 + x2)",
    "sin(cos(sqrt(x2 + 5)))",
    "x1*x2*x3*x4",
    "1/(1/(1/x1))",
    "x2*sin(x3)",
    "B*x2",
    "Q/x2",
    "1/sqrt(1 - 2*M/x2)",
    "x1^2*x2^3 - x3^4",
    "-(-(-x1))",
    "(x1 + x2)*(x3 - x4)",
    "x1 + x2*x3^2/x4",
    "2.0*x1 - 3.5/x2 + 0.25",
    "exp(x1)*exp(-x1)",
    "sin(x1)^2 + cos(x1)^2",
    "sqrt(sqrt(x2 + 10))",
    "M*Q*k",
    "x1^-1",
    "1e0 + 1e1*x1 + 1e2*x2",
    "(x1 - 1)*(x1 + 1)",
    "ln(exp(x3))",
    "x4/(x3/(x2/x1))",
    "-x1*x2",
    "-x1*-x2",
    "cos(x1 - x2) - cos(x1)*cos(x2)",
    "a + b - c + d - e",
    "x1^2^3",
    "0.5*(x1 + x2)^2",
    "sqrt(x1^2 + 1) - x1",
    "sin(M*x1 + Q)",
    "x3*(x3*(x3 + 1) + 1)",
    "1 - 1/x2 + 1/x2^2 - 1/x2^3",
    "(a + b)*(a - b)/(a*a - b*b + 1)",
    "exp(ln(x2 + 2))",
    "x1/2 + x2/3 + x3/4 + x4/5",
    "-(x1^2)",
    "cos(-x2)",
    "((x1 + (x2)))*((x3))",
    "3.14159*x1^2",
]


@pytest.mark.parametrize("text", CORPUS)
def test_roundtrip_corpus(text):
    tree = parse(text, 4)
    assert parse(to_text(tree), 4) == tree


_leaf = st.one_of(
    st.floats(min_value=0.0, max_value=9.0).map(lambda v: Num(round(v, 3))),
    st.integers(1, 4).map(Coord),
    st.sampled_from(["M", "Q", "k_0"]).map(Param),
)


def _exprs(depth):
    if depth == 0:
        return _leaf
    sub = _exprs(depth - 1)
    return st.one_of(
        _leaf,
        st.tuples(st.sampled_from("+-*/^"), sub, sub).map(lambda t: BinOp(*t)),
        sub.map(Neg),
        st.tuples(st.sampled_from(["sin", "cos", "sqrt", "exp", "ln"]), sub)
        .map(lambda t: Call(*t)),
    )


@given(tree=_exprs(4))
def test_roundtrip_generated(tree):
    assert parse(to_text(tree), 4) == tree


@pytest.mark.parametrize("seed", range(12))
def test_eval_jet_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    texts = [
        "sin(x1)*cos(x2) + x3^3",
        "exp(x1/4)*ln(x2 + 4)",
        "sqrt(x1*x1 + x2*x2 + 1) - M*x3",
        "(x1 + x2)^2 / (x3^2 + 2)",
    ]
    tree = parse(texts[seed % 4], 3)
    params = {"M": 1.7}
    point = rng.uniform(-1.0, 1.0, size=3)
    out = eval_jet(tree, jet_seed(point), params)

    def f(p):
        return eval_jet(tree, [float(v) for v in p], params)

    scale = max(1.0, abs(out.value))
    assert np.allclose(out.grad, fd_grad(f, point), atol=1e-6 * scale)
    assert np.allclose(out.hess, fd_hess(f, point), atol=1e-5 * scale)
