import random

import pytest
import sympy as sp

from qcurv import QQ, field, format_expr, parse_expr
from qcurv.errors import DivisionByZeroExpression, ExpressionSyntaxError

from oracles import equal, q, x


def test_examples():
    assert parse_expr("(q*x+1)/(x+1)") * (QQ.x + 1) == QQ.q * QQ.x + 1
    assert parse_expr("q^3") == QQ.q**3
    assert parse_expr("1/(q-1)^2 * x") == QQ.x / (QQ.q - 1) ** 2


@pytest.mark.parametrize(
    "text,ref",
    [
        ("-q^2", -(q**2)),
        ("2/3*x", sp.Rational(2, 3) * x),
        ("x^(-2)*q", q / x**2),
        ("1 - x - q", 1 - x - q),
        ("8/4/2", sp.Integer(1)),
        ("(q)^(2)", q**2),
        ("  q *  x ", q * x),
        ("-(-x)", x),
    ],
)
def test_precedence(text, ref):
    assert equal(parse_expr(text), ref)


@pytest.mark.parametrize(
    "text,pos",
    [("", 0), ("q+", 2), ("(q", 2), ("q)", 1), ("y", 0), ("q^x", 2), ("2**3", 2), ("q^(-)", 4)],
)
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expr(text)
    assert info.value.position == pos


@pytest.mark.parametrize("text", ["1/0", "x/(q-q)", "0^(-1)", "(x-x)^(-2)"])
def test_division_by_zero(text):
    with pytest.raises(DivisionByZeroExpression):
        parse_expr(text)


def _tree(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(["q", "x", str(rng.randint(0, 5))])
    op = rng.choice("+-*/^n")
    if op == "n":
        return f"-{_tree(rng, depth - 1)}"
    if op == "^":
        return f"({_tree(rng, depth - 1)})^({rng.randint(-2, 3)})"
    return f"({_tree(rng, depth - 1)}){op}({_tree(rng, depth - 1)})"


def _sympy_eval(text):
    return sp.sympify(text.replace("^", "**"), locals={"q": q, "x": x})


def test_random_trees_round_trip():
    rng = random.Random(5)
    checked = 0
    while checked < 500:
        text = _tree(rng, 4)
        try:
            f = parse_expr(text)
        except DivisionByZeroExpression:
            continue
        s = format_expr(f)
        assert parse_expr(s) == f
        assert format_expr(parse_expr(s)) == s
        if checked < 60:
            assert equal(f, _sympy_eval(text))
        checked += 1


def test_round_trip_in_positive_characteristic():
    F7 = field(7)
    f = parse_expr("(3*q*x + 5)/(x^2 + 6)", F7)
    assert parse_expr(format_expr(f), F7) == f
    assert parse_expr("7*x + 1", F7) == F7.one
