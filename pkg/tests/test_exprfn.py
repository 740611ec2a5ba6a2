import math

import numpy as np
import pytest

from riccisym import exprfn
from riccisym.exprfn import (
    Add,
    Call,
    EvalError,
    Jet2,
    Mul,
    Num,
    ParseError,
    Pow,
    Var,
    eval_jet2,
    parse,
    unparse,
)


def test_parse_precedence_shapes():
    assert parse("1 + t^2") == Add(Num(1.0), Pow(Var(), 2))
    assert parse("sin(t)*exp(t)") == Mul(Call("sin", Var()), Call("exp", Var()))
    # '^' binds tighter than unary minus
    assert parse("-t^2") == exprfn.Neg(Pow(Var(), 2))
    # left associativity
    assert parse("1 - 2 - 3") == exprfn.Sub(exprfn.Sub(Num(1.0), Num(2.0)), Num(3.0))
    assert parse("2*t + 1") == Add(Mul(Num(2.0), Var()), Num(1.0))


def test_parse_errors_report_position():
    with pytest.raises(ParseError, match="unexpected end of input"):
        parse("1 +")
    with pytest.raises(ParseError, match="unknown identifier"):
        parse("2*x")
    with pytest.raises(ParseError) as err:
        parse("(1 + t")
    assert "')'" in str(err.value) or "end of input" in str(err.value)
    with pytest.raises(ParseError):
        parse("")
    with pytest.raises(ParseError, match="integer"):
        parse("t^0.5")


def test_pi_is_reserved():
    e = parse("sin(pi*t)")
    assert abs(e(0.5) - 1.0) < 1e-15


def test_jet_polynomial():
    j = eval_jet2(parse("t^2"), 3.0)
    assert (j.v, j.d1, j.d2) == (9.0, 6.0, 2.0)


def test_jet_sin_at_zero():
    j = eval_jet2(parse("sin(t)"), 0.0)
    assert (j.v, j.d1, j.d2) == (0.0, 1.0, 0.0)


def test_jet_matches_finite_difference_of_value():
    e = parse("exp(2*t)")
    t0, h = 0.5, 1e-5
    j = eval_jet2(e, t0)
    fd = (e(t0 + h) - e(t0 - h)) / (2 * h)
    assert abs(j.d1 - fd) / abs(fd) < 1e-8


def test_negative_exponent():
    j = eval_jet2(parse("t^-2"), 2.0)
    assert abs(j.v - 0.25) < 1e-15
    assert abs(j.d1 + 2 / 8) < 1e-15
    assert abs(j.d2 - 6 / 16) < 1e-15


def test_domain_errors_report_subexpression():
    with pytest.raises(EvalError, match="log"):
        eval_jet2(parse("log(t - 2)"), 1.0)
    with pytest.raises(EvalError, match="division by zero"):
        eval_jet2(parse("1/(t - 1)"), 1.0)
    with pytest.raises(EvalError, match="sqrt"):
        eval_jet2(parse("sqrt(t)"), -1.0)


# ---------------------------------------------------------------------------
# randomized properties


def _random_expr(rng, depth):
    """Random AST over safe building blocks (bounded magnitudes)."""
    if depth == 0 or rng.random() < 0.3:
        choice = rng.integers(0, 3)
        if choice == 0:
            # parser-canonical literals are nonnegative; sign comes from Neg
            return Num(float(rng.uniform(0, 3)))
        return Var() if choice == 1 else Num(float(rng.integers(1, 4)))
    kind = rng.integers(0, 6)
    if kind == 0:
        return Add(_random_expr(rng, depth - 1), _random_expr(rng, depth - 1))
    if kind == 1:
        return exprfn.Sub(_random_expr(rng, depth - 1), _random_expr(rng, depth - 1))
    if kind == 2:
        return Mul(_random_expr(rng, depth - 1), _random_expr(rng, depth - 1))
    if kind == 3:
        return Pow(_random_expr(rng, depth - 1), int(rng.integers(0, 4)))
    if kind == 4:
        return exprfn.Neg(_random_expr(rng, depth - 1))
    name = ("sin", "cos", "exp")[rng.integers(0, 3)]
    return Call(name, _random_expr(rng, depth - 1))


def test_jets_agree_with_central_differences():
    rng = np.random.default_rng(20240817)
    checked = 0
    while checked < 200:
        e = _random_expr(rng, 3)
        t0 = float(rng.uniform(-1.5, 1.5))
        try:
            j = eval_jet2(e, t0)
        except EvalError:
            continue
        vals = [j.v, j.d1, j.d2]
        if any(not math.isfinite(v) or abs(v) > 1e6 for v in vals):
            continue
        h1 = 1e-5
        fd1 = (e(t0 + h1) - e(t0 - h1)) / (2 * h1)
        # wider step for the second difference: keeps rounding below 1e-6 rel
        h2 = 1e-4
        fd2 = (e(t0 + h2) - 2 * e(t0) + e(t0 - h2)) / h2**2
        scale1 = max(1.0, abs(j.d1))
        scale2 = max(1.0, abs(j.d2))
        assert abs(j.d1 - fd1) / scale1 < 1e-6
        assert abs(j.d2 - fd2) / scale2 < 1e-5
        checked += 1


def test_chain_rule_composition():
    # jet of f(g(t)) equals the composition of the two jets
    cases = [
        ("sin(exp(t))", "exp(t)", "sin"),
        ("exp(t^2)", "t^2", "exp"),
        ("cos(2*t + 1)", "2*t + 1", "cos"),
    ]
    for whole_src, inner_src, outer in cases:
        whole, inner = parse(whole_src), parse(inner_src)
        for t0 in (-0.7, 0.0, 0.4, 1.3):
            gj = eval_jet2(inner, t0)
            outer_at = eval_jet2(parse(f"{outer}(t)"), gj.v)
            composed = Jet2(
                outer_at.v,
                outer_at.d1 * gj.d1,
                outer_at.d2 * gj.d1**2 + outer_at.d1 * gj.d2,
            )
            direct = eval_jet2(whole, t0)
            assert abs(direct.v - composed.v) < 1e-12 * max(1, abs(composed.v))
            assert abs(direct.d1 - composed.d1) < 1e-12 * max(1, abs(composed.d1))
            assert abs(direct.d2 - composed.d2) < 1e-11 * max(1, abs(composed.d2))


def test_unparse_reparse_roundtrip():
    rng = np.random.default_rng(99)
    for _ in range(150):
        e = _random_expr(rng, 4)
        assert parse(unparse(e)) == e
    for src in ("1 + t^2", "sin(t)*exp(t)", "-(1 - t)/(2 + t)", "t^-3", "(t^2)^2"):
        e = parse(src)
        assert parse(unparse(e)) == e


def test_deterministic_evaluation():
    e = parse("sin(t)*exp(t) - t^3/7")
    assert eval_jet2(e, 0.8314) == eval_jet2(e, 0.8314)
