import math

import numpy as np
import pytest

from ilssvm.expr import (
    BinOp,
    Call,
    ExprEvalError,
    ExprSyntaxError,
    Neg,
    Num,
    Var,
    eval_expr,
    eval_expr_block,
    free_vars,
    parse_expr,
    to_str,
)

PLANE = "0.6*x1 + 0.3*x2"
FRIEDMAN = "10*sin(pi*x1*x2) + 20*(x3-0.5)^2 + 10*x4 + 5*x5"
MULTI = "0.79 + 1.27*x1*x2 + 1.56*x1*x4 + 3.42*x2*x5 + 2.06*x3*x4*x5"
GABOR = "pi*exp(-2*(x1^2+x2^2))*cos(2*pi*(x1+x2))/2"


def test_parse_plane_free_vars():
    assert free_vars(parse_expr(PLANE)) == ["x1", "x2"]


def test_parse_friedman_free_vars():
    assert free_vars(parse_expr(FRIEDMAN)) == ["x1", "x2", "x3", "x4", "x5"]


def test_free_vars_literal_empty():
    assert free_vars(parse_expr("3.0")) == []


def test_double_caret_offset():
    with pytest.raises(ExprSyntaxError) as err:
        parse_expr("x1^^2")
    assert err.value.offset == 3


def test_eval_plane():
    assert eval_expr(parse_expr(PLANE), {"x1": 1.0, "x2": 1.0}) == pytest.approx(0.9)


def test_eval_gabor_origin():
    v = eval_expr(parse_expr(GABOR), {"x1": 0.0, "x2": 0.0})
    assert v == pytest.approx(math.pi / 2)


def test_eval_multi_zeros():
    assigned = {f"x{i}": 0.0 for i in range(1, 6)}
    assert eval_expr(parse_expr(MULTI), assigned) == pytest.approx(0.79)


@pytest.mark.parametrize(
    "text,expected",
    [
        ("2^3^2", 512.0),  # right associative
        ("-2^2", -4.0),  # ^ binds tighter than unary minus
        ("2*-3", -6.0),
        ("6/3/2", 1.0),  # left associative
        ("1-2-3", -4.0),
        ("2^-1", 0.5),
        ("(1+2)*3", 9.0),
        ("abs(-4) + sqrt(9)", 7.0),
    ],
)
def test_eval_precedence(text, expected):
    assert eval_expr(parse_expr(text), {}) == expected


def test_eval_errors():
    with pytest.raises(ExprEvalError, match="missing variable"):
        eval_expr(parse_expr("x1"), {})
    with pytest.raises(ExprEvalError, match="division by zero"):
        eval_expr(parse_expr("1/x1"), {"x1": 0.0})
    with pytest.raises(ExprEvalError, match="sqrt"):
        eval_expr(parse_expr("sqrt(x1)"), {"x1": -1.0})
    with pytest.raises(ExprEvalError, match="non-integer exponent"):
        eval_expr(parse_expr("x1^0.5"), {"x1": -2.0})
    with pytest.raises(ExprEvalError):
        eval_expr(parse_expr("exp(x1)"), {"x1": 1e6})


def test_parse_errors():
    with pytest.raises(ExprSyntaxError, match="unknown function"):
        parse_expr("foo(3)")
    with pytest.raises(ExprSyntaxError, match="unknown identifier"):
        parse_expr("y1 + 2")
    with pytest.raises(ExprSyntaxError, match="empty"):
        parse_expr("   ")
    with pytest.raises(ExprSyntaxError):
        parse_expr("x0 + 1")  # indices start at 1
    with pytest.raises(ExprSyntaxError):
        parse_expr("(1+2")
    with pytest.raises(ExprSyntaxError):
        parse_expr("1 2")


def test_parse_is_pure():
    assert parse_expr(FRIEDMAN) == parse_expr(FRIEDMAN)


def _random_ast(rng, depth, for_eval):
    """Random parser-canonical AST; for_eval restricts to total operations."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return Num(float(round(rng.uniform(0.0, 5.0), 3)))
        return Var(f"x{rng.integers(1, 4)}")
    kind = rng.integers(0, 4)
    if kind == 0:
        return Neg(_random_ast(rng, depth - 1, for_eval))
    if kind == 1:
        func = rng.choice(["sin", "cos", "abs"] if for_eval else ["sin", "cos", "exp", "abs", "sqrt"])
        return Call(str(func), _random_ast(rng, depth - 1, for_eval))
    if kind == 2 and not for_eval:
        return BinOp("^", _random_ast(rng, depth - 1, for_eval), _random_ast(rng, depth - 1, for_eval))
    ops = ["+", "-", "*"] if for_eval else ["+", "-", "*", "/"]
    op = str(rng.choice(ops))
    return BinOp(op, _random_ast(rng, depth - 1, for_eval), _random_ast(rng, depth - 1, for_eval))


def test_round_trip_random_asts():
    rng = np.random.default_rng(42)
    for _ in range(300):
        ast = _random_ast(rng, 4, for_eval=False)
        assert parse_expr(to_str(ast)) == ast


def _direct_eval(node, env):
    """Independent reference evaluator for the fuzz oracle."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_direct_eval(node.arg, env)
    if isinstance(node, Call):
        fn = {"sin": math.sin, "cos": math.cos, "abs": abs}[node.func]
        return fn(_direct_eval(node.arg, env))
    a = _direct_eval(node.left, env)
    b = _direct_eval(node.right, env)
    return {"+": a + b, "-": a - b, "*": a * b}[node.op]


def test_eval_fuzz_oracle():
    rng = np.random.default_rng(7)
    for _ in range(100):
        ast = _random_ast(rng, 4, for_eval=True)
        env = {f"x{i}": float(rng.normal()) for i in range(1, 4)}
        assert eval_expr(ast, env) == pytest.approx(_direct_eval(ast, env), rel=1e-12, abs=1e-12)


def test_block_eval_matches_scalar():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(20, 3))
    cols = {f"x{j + 1}": X[:, j] for j in range(3)}
    for _ in range(50):
        ast = _random_ast(rng, 4, for_eval=True)
        block = eval_expr_block(ast, cols)
        for i in range(20):
            env = {f"x{j + 1}": X[i, j] for j in range(3)}
            assert block[i] == pytest.approx(eval_expr(ast, env), rel=1e-12, abs=1e-12)


def test_block_eval_reports_row():
    cols = {"x1": np.array([1.0, 2.0, 0.0, 4.0])}
    with pytest.raises(ExprEvalError, match="row 2"):
        eval_expr_block(parse_expr("1/x1"), cols)


def test_round_trip_builtin_formulas():
    for text in (PLANE, FRIEDMAN, MULTI, GABOR):
        ast = parse_expr(text)
        assert parse_expr(to_str(ast)) == ast
