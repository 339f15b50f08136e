import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_expression, seeded_expressions
from parageo.expr import (
    Binary, DomainError, ExprSyntaxError, Num, UnknownIdentifierError, Var, VariableIndexError,
    apply, combine, compile_tape, eval_jet2, evaluate, parse, run_tape, to_string,
)
from parageo.verify import fd_jet_oracle, relative_error


def test_parse_sum_of_power():
    e = parse("x1^2 + 1", 2)
    assert e.root == Binary("+", Binary("^", Var(1), Num(2.0)), Num(1.0))


def test_variable_out_of_range_reports_offset():
    with pytest.raises(VariableIndexError) as err:
        parse("sin(x3)", 2)
    assert err.value.offset == 4


def test_sphere_conformal_factor_at_origin():
    e = parse("4/(1 + x1^2 + x2^2 + x3^2)^2", 3)
    assert evaluate(e, [0, 0, 0]) == 4.0


@pytest.mark.parametrize("text, offset", [("(x1", 3), ("1 +* 2", 3), ("x1 x2", 3), ("", 0)])
def test_syntax_errors_carry_byte_offset(text, offset):
    with pytest.raises(ExprSyntaxError) as err:
        parse(text, 2)
    assert err.value.offset == offset


def test_unknown_function():
    with pytest.raises(UnknownIdentifierError) as err:
        parse("1 + sinx(x1)", 1)
    assert err.value.offset == 4


def test_precedence_and_associativity():
    assert evaluate(parse("-x1^2", 1), [3]) == -9
    assert evaluate(parse("2^3^2", 1), [0]) == 512
    assert evaluate(parse("2^-1", 1), [0]) == 0.5
    assert evaluate(parse("x1 - -x1", 1), [2]) == 4
    assert evaluate(parse("8/2/2", 1), [0]) == 2


def test_evaluate_examples():
    assert evaluate(parse("x1*x2", 2), [2, 3]) == 6
    assert evaluate(parse("log(x1)", 1), [1]) == 0
    with pytest.raises(DomainError):
        evaluate(parse("1/x1", 1), [0])


@pytest.mark.parametrize("text, point", [("log(x1)", [-1]), ("sqrt(x1)", [-1]), ("x1^0.5", [-2]),
                                         ("x1^(-0.5)", [0]), ("exp(x1)", [1000])])
def test_domain_errors_in_both_evaluators(text, point):
    e = parse(text, 1)
    with pytest.raises(DomainError):
        evaluate(e, point)
    with pytest.raises(DomainError):
        eval_jet2(e, point)


def test_integer_power_of_negative_base():
    e = parse("x1^3", 1)
    assert evaluate(e, [-2]) == -8
    jet = eval_jet2(e, [-2])
    assert jet.grad[0] == 12 and jet.hess[0, 0] == -12


def test_jet_square():
    jet = eval_jet2(parse("x1^2", 2), [3, 0])
    assert jet.value == 9
    np.testing.assert_array_equal(jet.grad, [6, 0])
    np.testing.assert_array_equal(jet.hess, [[2, 0], [0, 0]])


def test_jet_sine():
    jet = eval_jet2(parse("sin(x1)", 2), [0, 0])
    assert jet.value == 0
    np.testing.assert_allclose(jet.grad, [1, 0])
    np.testing.assert_allclose(jet.hess, 0, atol=0)


def test_jet_exp_product_matches_fd_oracle():
    e = parse("exp(x1*x2)", 2)
    jet = eval_jet2(e, [1, 1])
    f0, g, H = fd_jet_oracle(e, [1, 1], 1e-4)
    E = math.e
    assert relative_error(jet.grad, g) <= 1e-6
    assert relative_error(jet.hess, H) <= 1e-6
    np.testing.assert_allclose(jet.grad, [E, E], rtol=1e-15)
    np.testing.assert_allclose(jet.hess, [[E, 2 * E], [2 * E, E]], rtol=1e-15)


def test_tape_dedups_shared_subexpressions():
    a = parse("sin(x1*x2) + sin(x1*x2)", 2)
    b = parse("sin(x1*x2)", 2)
    tape = compile_tape([a, b])
    # registers: x1, x2, x1*x2, sin(.), sum
    assert len(tape.ops) == 5
    val, _, _ = run_tape(tape, np.array([0.3, 0.4]))
    assert val[0] == pytest.approx(2 * val[1], rel=0, abs=0)


def test_combine_and_apply_build_the_same_tree_as_parsing():
    f = parse("x1*x2", 2)
    built = apply("exp", combine("*", 2.0, f, 2), 2)
    assert built == parse("exp(2*(x1*x2))", 2)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 4))
def test_printer_round_trip(seed, dim):
    text = random_expression(np.random.default_rng(seed), dim, 4)
    e = parse(text, dim)
    again = parse(to_string(e), dim)
    assert again == e
    assert to_string(again) == to_string(e)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 4),
       point=st.lists(st.floats(-1, 1), min_size=4, max_size=4))
def test_jets_agree_with_finite_differences(seed, dim, point):
    e = parse(random_expression(np.random.default_rng(seed), dim, 3), dim)
    x = np.array(point[:dim])
    jet = eval_jet2(e, x)
    f0, g, H = fd_jet_oracle(e, x, 1e-4)
    assert jet.value == pytest.approx(f0, rel=1e-12, abs=1e-12)
    assert relative_error(jet.grad, g) <= 1e-6
    assert relative_error(jet.hess, H) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), point=st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_hessian_exactly_symmetric(seed, point):
    e = parse(random_expression(np.random.default_rng(seed), 3, 4), 3)
    H = eval_jet2(e, point).hess
    assert np.array_equal(H, H.T)


def test_seeded_expressions_are_deterministic():
    assert seeded_expressions(5, 3, seed=7) == seeded_expressions(5, 3, seed=7)
