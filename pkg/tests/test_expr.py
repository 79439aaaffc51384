import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from windline.errors import ExpressionSyntaxError, NonHolomorphic, UnknownFunction
from windline.expr import (
    Binary,
    Call,
    Const,
    Expr,
    Unary,
    Var,
    evaluate_constant,
    parse,
    sinc_derivative,
    to_source,
)


@pytest.mark.parametrize(
    "src, expected",
    [
        ("2^3^2", 512),
        ("-2^2", -4),
        ("(-2)^2", 4),
        ("2*3+4", 10),
        ("2+3*4", 14),
        ("2-3-4", -5),
        ("8/4/2", 1),
        ("2^-1", 0.5),
        ("--3", 3),
        ("i^2", -1),
        ("pi/2", math.pi / 2),
        ("e", math.e),
        ("1.5e2", 150),
        (".5", 0.5),
        ("sqrt(-1)", 1j),
        ("exp(i*pi)", -1),
    ],
)
def test_constant_expressions(src, expected):
    assert evaluate_constant(src) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize(
    "src, code, pos",
    [
        ("2z", ExpressionSyntaxError, 1),
        ("1 +", ExpressionSyntaxError, 3),
        ("(1+z", ExpressionSyntaxError, 4),
        ("z $ 2", ExpressionSyntaxError, 2),
        ("foo(z)", UnknownFunction, 0),
        ("1 + conj(z)", NonHolomorphic, 4),
        ("abs(z)", NonHolomorphic, 0),
        ("w + 1", ExpressionSyntaxError, 0),
        ("z + t", ExpressionSyntaxError, 4),
        ("sin z", ExpressionSyntaxError, 4),
        ("", ExpressionSyntaxError, 0),
    ],
)
def test_parse_errors_carry_positions(src, code, pos):
    with pytest.raises(code) as info:
        parse(src)
    assert info.value.pos == pos
    assert info.value.exit_code == 2


def test_variable_is_inferred_or_pinned():
    assert parse("cos(t)").variable == "t"
    assert parse("1/z").variable == "z"
    with pytest.raises(ExpressionSyntaxError):
        parse("cos(z)", variable="t")


def test_hand_built_ast_evaluates_bit_identically():
    t = np.linspace(0, 2 * np.pi, 257)
    zeppelin = Binary(
        "+",
        Binary("+", Call("cos", Var("t")), Call("cos", Binary("*", Const(2.0), Var("t")))),
        Binary("*", Const(1j, "i"), Call("sin", Binary("*", Const(2.0), Var("t")))),
    )
    parsed = parse("cos(t)+cos(2*t)+i*sin(2*t)")
    assert parsed.node == zeppelin
    assert np.array_equal(parsed(t), Expr(zeppelin, "t")(t))

    z = np.exp(1j * t) * 3.0 + 0.5
    wedge = Binary(
        "/",
        Unary("-", Call("cos", Binary("/", Var("z"), Const(2.0)))),
        Binary("*", Var("z"), Call("cosh", Binary("/", Var("z"), Const(2.0)))),
    )
    parsed = parse("-cos(z/2)/(z*cosh(z/2))")
    assert parsed.node == wedge
    assert np.array_equal(parsed(z), Expr(wedge)(z))
    assert np.array_equal(parsed(z), -np.cos(z / 2) / (z * np.cosh(z / 2)))


def test_zeppelin_derivatives_print_cleanly():
    e = parse("cos(t)+cos(2*t)+i*sin(2*t)")
    assert str(e.derivative()) == "-sin(t)-2*sin(2*t)+i*(2*cos(2*t))"
    assert str(e.derivative().derivative()) == "-cos(t)-4*cos(2*t)-i*(4*sin(2*t))"


def test_scalar_input_returns_complex():
    v = parse("z^2")(1.5)
    assert isinstance(v, complex) and v == 2.25


def test_sinc_is_continuous_at_zero():
    w = np.array([0.0, 1e-9, 0.999999, 1.000001, 3.0])
    assert np.allclose(sinc_derivative(w), np.sinc(w / np.pi), rtol=1e-13)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
@pytest.mark.parametrize("w", [0.0, 0.3, 0.999, 1.001, 2.5, 1 + 2j])
def test_sinc_derivatives_against_mpmath(k, w):
    def sinc(x):
        return mpmath.sin(x) / x if x != 0 else mpmath.mpf(1)

    with mpmath.workdps(40):
        ref = complex(mpmath.diff(sinc, mpmath.mpc(w) if isinstance(w, complex) else mpmath.mpf(w), k))
    assert complex(sinc_derivative(w, k)) == pytest.approx(ref, rel=1e-11, abs=1e-13)


# -- random expressions ------------------------------------------------------

_leaves = st.one_of(
    st.just(Var("z")),
    st.floats(0.25, 3.0).map(lambda v: Const(round(v, 3))),
    st.sampled_from([Const(math.pi, "pi"), Const(1j, "i")]),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from("+-*"), children, children).map(lambda a: Binary(*a)),
        st.tuples(children, st.integers(1, 3)).map(lambda a: Binary("^", a[0], Const(float(a[1])))),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "sinh", "cosh", "sinc"]), children).map(lambda a: Call(*a)),
        children.map(lambda c: Unary("-", c)),
    )


expressions = st.recursive(_leaves, _extend, max_leaves=8)


@given(expressions)
@settings(max_examples=100, deadline=None)
def test_round_trip_preserves_value(node):
    src = to_source(node)
    again = parse(src, variable="z")
    z = np.array([0.3 + 0.2j, -0.7 + 0.1j, 0.5 - 0.4j])
    a, b = Expr(node)(z), again(z)
    ok = np.isfinite(a) & np.isfinite(b)
    assert np.allclose(a[ok], b[ok], rtol=1e-12, atol=1e-12)
    assert to_source(again.node) == to_source(parse(to_source(again.node), variable="z").node)


@given(expressions)
@settings(max_examples=100, deadline=None)
def test_derivative_matches_complex_step_differences(node):
    e = Expr(node)
    d = e.derivative()
    z0 = np.array([0.3 + 0.2j, -0.4 + 0.5j])
    h = 1e-5
    # central differences along two directions agree for holomorphic maps
    fd = (e(z0 + h) - e(z0 - h)) / (2 * h)
    fd_i = (e(z0 + 1j * h) - e(z0 - 1j * h)) / (2j * h)
    exact = d(z0)
    scale = np.maximum(1.0, np.abs(exact))
    values = e(z0)
    # overflowing values (exp of a large constant) leave nothing to difference
    if not np.all(np.isfinite(values)) or np.max(np.abs(values)) > 1e6:
        return
    if not np.all(np.isfinite(exact)) or np.max(np.abs(exact)) > 1e6:
        return
    assert np.all(np.abs(fd - exact) / scale < 1e-5)
    assert np.all(np.abs(fd_i - exact) / scale < 1e-5)
