import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from tribvp import expr as ex
from tribvp.expr import BinOp, Call, Neg, Num, Pow, Var

Z_SYM, ZB_SYM = sp.symbols("z zb")


def E(text):
    return ex.parse(text)


# --- parsing and evaluation ----------------------------------------------


def test_evaluate_examples():
    assert ex.evaluate(E("3*conj(z)^2"), 0.5) == pytest.approx(0.75)
    assert ex.evaluate(E("i*z"), 2) == 2j
    assert ex.evaluate(E("exp(0)"), 0.3) == 1


@pytest.mark.parametrize("theta", np.linspace(0, 2 * np.pi, 7))
def test_abs2_minus_one_vanishes_on_circle(theta):
    assert abs(ex.evaluate(E("abs2(z) - 1"), np.exp(1j * theta))) < 1e-15


def test_unknown_identifier_named():
    with pytest.raises(ex.UnknownIdentifier) as err:
        E("z + w")
    assert err.value.name == "w"


def test_division_by_zero_is_domain_error():
    with pytest.raises(ex.DomainError):
        ex.evaluate(E("1/z"), 0)


def test_log_of_zero_is_domain_error():
    with pytest.raises(ex.DomainError):
        ex.evaluate(E("log(z)"), 0)


@pytest.mark.parametrize("text,value", [
    ("-2^2", -4), ("2*3^2", 18), ("8/4/2", 1), ("2-3-4", -5), ("(1+i)*(1-i)", 2),
    ("re(3+4*i)", 3), ("im(3+4*i)", 4), ("abs2(3+4*i)", 25), ("1.5e1", 15),
])
def test_precedence_and_calls(text, value):
    assert ex.evaluate(E(text), 0) == pytest.approx(value)


@pytest.mark.parametrize("text", ["3*", "(z", "z^1.5", "z^z", "conj z", "2 3", ")", ""])
def test_syntax_errors_report_position(text):
    with pytest.raises(ex.ExprSyntaxError) as err:
        E(text)
    assert 0 <= err.value.position <= len(text)


def test_array_evaluation_matches_scalar():
    zs = np.array([0.1, 0.2j, -0.3 + 0.4j])
    e = E("z^2*conj(z) - 2*i")
    np.testing.assert_allclose(ex.evaluate(e, zs), [ex.evaluate(e, w) for w in zs], rtol=0, atol=1e-15)


# --- Wirtinger derivatives -----------------------------------------------


@pytest.mark.parametrize("text,want", [("conj(z)^3", "3*conj(z)^2"), ("z", "0"), ("z*conj(z)", "z")])
def test_dbar_examples(text, want):
    assert ex.dbar(E(text)) == ex.normalize(E(want))


@pytest.mark.parametrize("text,want", [("z^2", "2*z"), ("conj(z)", "0"), ("z*conj(z)", "conj(z)")])
def test_dz_examples(text, want):
    assert ex.dz(E(text)) == ex.normalize(E(want))


@pytest.mark.parametrize("text,want", [("conj(z)^3", "3*conj(z)^3"), ("5", "0"), ("z", "z")])
def test_normal_derivative_examples(text, want):
    got = ex.normal_derivative(E(text))
    pts = np.array([0.3, 0.2 - 0.5j, np.exp(0.4j)])
    np.testing.assert_allclose(ex.evaluate(got, pts), ex.evaluate(E(want), pts), atol=1e-14)


@pytest.mark.parametrize("text", ["log(z)", "exp(z)", "1/z", "z/conj(z)"])
def test_derivative_outside_polynomial_subset(text):
    with pytest.raises(ex.UnsupportedNode):
        ex.dbar(E(text))


def test_division_by_constant_is_polynomial():
    assert ex.dbar(E("conj(z)^2/2")) == ex.normalize(E("conj(z)"))


def test_restrict_to_circle_agrees_on_circle():
    e = E("z^2*conj(z)^3 + 2*z*conj(z) - i*z^3*conj(z)")
    r = ex.restrict_to_circle(e)
    s = np.exp(1j * np.linspace(0, 6, 11))
    np.testing.assert_allclose(ex.evaluate(r, s), ex.evaluate(e, s), atol=1e-14)
    assert all(a == 0 or b == 0 for a, b in ex.to_polynomial(r))


# --- property tests ------------------------------------------------------

small = st.integers(-3, 3).map(lambda n: Num(n)) | st.sampled_from([Num(0.5j), Num(1j)])
leaf = small | st.just(Var("z")) | st.just(Call("conj", Var("z")))


def _extend(children):
    return (st.tuples(st.sampled_from("+-*"), children, children).map(lambda t: BinOp(*t))
            | st.tuples(children, st.integers(0, 3)).map(lambda t: Pow(*t))
            | children.map(Neg))


poly_ast = st.recursive(leaf, _extend, max_leaves=8)


def _sympy(node):
    if isinstance(node, Num):
        return sp.nsimplify(node.value.real) + sp.I * sp.nsimplify(node.value.imag)
    if isinstance(node, Var):
        return Z_SYM
    if isinstance(node, Call):
        assert node.name == "conj" and isinstance(node.arg, Var)
        return ZB_SYM
    if isinstance(node, Neg):
        return -_sympy(node.arg)
    if isinstance(node, Pow):
        return _sympy(node.base) ** node.exponent
    a, b = _sympy(node.left), _sympy(node.right)
    return {"+": a + b, "-": a - b, "*": a * b}[node.op]


def _sympy_eval(e, w):
    return complex(e.subs({Z_SYM: w, ZB_SYM: w.conjugate()}))


POINTS = [0.3 - 0.2j, -0.55 + 0.1j, 0.05j]


@given(poly_ast)
def test_dbar_matches_symbolic_algebra(node):
    want = sp.diff(sp.expand(_sympy(node)), ZB_SYM)
    got = ex.dbar(node)
    for w in POINTS:
        assert abs(ex.evaluate(got, w) - _sympy_eval(want, w)) <= 1e-9 * (1 + abs(_sympy_eval(want, w)))


@given(poly_ast)
def test_dz_matches_symbolic_algebra(node):
    want = sp.diff(sp.expand(_sympy(node)), Z_SYM)
    got = ex.dz(node)
    for w in POINTS:
        assert abs(ex.evaluate(got, w) - _sympy_eval(want, w)) <= 1e-9 * (1 + abs(_sympy_eval(want, w)))


@given(poly_ast, st.complex_numbers(max_magnitude=0.7, allow_nan=False, allow_infinity=False))
def test_dbar_matches_finite_differences(node, w):
    h = 1e-5
    f = lambda s: ex.evaluate(node, s)
    fd = 0.5 * ((f(w + h) - f(w - h)) / (2 * h) + 1j * (f(w + 1j * h) - f(w - 1j * h)) / (2 * h))
    exact = ex.evaluate(ex.dbar(node), w)
    assert abs(fd - exact) <= 1e-6 * max(1.0, abs(exact))


@given(poly_ast)
def test_print_parse_round_trip(node):
    once = ex.parse(ex.to_string(node))
    assert ex.parse(ex.to_string(once)) == once
    for w in POINTS:
        assert abs(ex.evaluate(once, w) - ex.evaluate(node, w)) <= 1e-12 * (1 + abs(ex.evaluate(node, w)))


@given(poly_ast, st.floats(0, 2 * np.pi))
def test_normal_derivative_is_radial_derivative(node, theta):
    s = np.exp(1j * theta)
    h = 1e-5
    f = lambda r: ex.evaluate(node, r * s)
    radial = (f(1 + h) - f(1 - h)) / (2 * h)
    exact = ex.evaluate(ex.normal_derivative(node), s)
    assert abs(radial - exact) <= 1e-6 * max(1.0, abs(exact))


@given(poly_ast)
def test_polynomial_normal_form_round_trip(node):
    poly = ex.to_polynomial(node)
    assert ex.to_polynomial(ex.from_polynomial(poly)) == poly
