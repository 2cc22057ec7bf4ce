import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from paraslant.diffcalc import central_difference, eval_jet1, eval_values
from paraslant.errors import DomainError, ExprSyntaxError, UnboundVariable, UnknownFunction
from paraslant.expr import BinOp, Call, Num, Pow, Var, evaluate, free_vars, parse, to_text
from paraslant.jet import Jet1


def test_parse_product_of_variable_and_call():
    assert parse("v*cosh(alpha)") == BinOp("*", Var("v"), Call("cosh", Var("alpha")))


def test_parse_literal_zero():
    assert parse("0") == Num(0.0)


def test_parse_division_binds_left():
    e = parse("u/sqrt(2)*sinh(alpha)")
    assert e == BinOp("*", BinOp("/", Var("u"), Call("sqrt", Num(2.0))), Call("sinh", Var("alpha")))


def test_power_is_integer_and_binds_tighter_than_unary_minus():
    assert parse("-x^2") == parse("-(x^2)")
    assert parse("x^-1") == Pow(Var("x"), -1)


def test_evaluate_plain_floats():
    assert evaluate(parse("v*cosh(alpha)"), {"v": 2.0, "alpha": 0.0}) == 2.0


def test_jet_derivative_of_product():
    e = parse("v*cosh(alpha)")
    out = evaluate(e, {"v": Jet1.variable(3.0, 0, 2), "alpha": Jet1.variable(1.0, 1, 2)})
    assert out.val == pytest.approx(3 * math.cosh(1))
    assert out.grad[0] == pytest.approx(math.cosh(1), abs=1e-15)
    assert out.grad[1] == pytest.approx(3 * math.sinh(1), abs=1e-14)


def test_hyperbolic_identity():
    assert evaluate(parse("cosh(a)^2 - sinh(a)^2"), {"a": 0.7}) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("text, names", [
    ("v*cosh(alpha)", {"v", "alpha"}),
    ("3.5", set()),
    ("u + v", {"u", "v"}),
    ("k1*sqrt(t) - ln(t)", {"k1", "t"}),
])
def test_free_vars(text, names):
    assert free_vars(parse(text)) == names


@pytest.mark.parametrize("text, offset", [("a+", 2), ("(x", 2), ("x y", 2), ("2^x", 2), ("", 0)])
def test_syntax_errors_report_offset(text, offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text)
    assert info.value.offset == offset


def test_unknown_function_and_unbound_variable():
    with pytest.raises(UnknownFunction):
        parse("tanh(x)")
    with pytest.raises(UnboundVariable):
        evaluate(parse("x + y"), {"x": 1.0})


@pytest.mark.parametrize("text, x", [("ln(x)", 0.0), ("sqrt(x)", -1.0), ("1/x", 0.0), ("x^-2", 0.0)])
def test_domain_errors(text, x):
    with pytest.raises(DomainError):
        evaluate(parse(text), {"x": x})


def test_second_order_values_match_closed_form():
    from paraslant.diffcalc import eval_jet2

    vals, grads, hess = eval_jet2([parse("x^2*sin(y)")], ["x", "y"], [1.5, 0.3])
    x, y = 1.5, 0.3
    assert vals[0] == pytest.approx(x * x * math.sin(y))
    assert np.allclose(grads[0], [2 * x * math.sin(y), x * x * math.cos(y)], atol=1e-14)
    want = [[2 * math.sin(y), 2 * x * math.cos(y)], [2 * x * math.cos(y), -x * x * math.sin(y)]]
    assert np.allclose(hess[0], want, atol=1e-14)


# -- properties -----------------------------------------------------------------

NAMES = ("x", "y", "z")
leaf = st.one_of(st.sampled_from(NAMES),
                 st.floats(0.1, 3.0, allow_nan=False).map(lambda c: f"{c:.4f}"))


def _extend(inner):
    # every function wrapper keeps its argument inside a safe domain
    return st.one_of(
        st.tuples(inner, st.sampled_from(["+", "-", "*"]), inner).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        st.tuples(inner, inner).map(lambda t: f"({t[0]})/(1 + ({t[1]})^2)"),
        st.tuples(st.sampled_from(["sin", "cos"]), inner).map(lambda t: f"{t[0]}({t[1]})"),
        inner.map(lambda a: f"exp(sin({a}))"),
        inner.map(lambda a: f"cosh(cos({a}))"),
        inner.map(lambda a: f"sinh(sin({a}))"),
        inner.map(lambda a: f"ln(1 + ({a})^2)"),
        inner.map(lambda a: f"sqrt(2 + cos({a}))"),
        st.tuples(inner, st.integers(1, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
        inner.map(lambda a: f"-({a})"),
    )


expressions = st.recursive(leaf, _extend, max_leaves=12)
points = st.lists(st.floats(-1.5, 1.5, allow_nan=False), min_size=3, max_size=3)


def _depth(e) -> int:
    if isinstance(e, (Num, Var)):
        return 1
    if isinstance(e, BinOp):
        return 1 + max(_depth(e.left), _depth(e.right))
    if isinstance(e, Pow):
        return 1 + _depth(e.base)
    return 1 + _depth(e.arg)


@settings(max_examples=1000, deadline=None)
@given(expressions, points)
def test_jet_gradient_matches_central_difference(text, u):
    e = parse(text)
    assume(_depth(e) <= 6)
    vals, grads = eval_jet1([e], NAMES, u)
    assume(abs(vals[0]) < 1e4)
    fd = central_difference(lambda p: eval_values([e], NAMES, p), u, 1e-5)[0]
    scale = max(1.0, float(np.max(np.abs(grads[0]))))
    assert np.max(np.abs(grads[0] - fd)) / scale <= 1e-5


@settings(max_examples=300, deadline=None)
@given(expressions)
def test_print_parse_print_is_a_fixed_point(text):
    once = to_text(parse(text))
    assert to_text(parse(once)) == once
    assert parse(once) == parse(text)
