import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from usym.symbols import (
    X,
    Affine,
    CExp,
    Conj,
    Const,
    Poly,
    Pow,
    Prod,
    SymbolError,
    as_poly,
    closure_variants,
    conjugate_expr,
    evaluate,
    exponential_atoms,
    parse_symbol,
    to_json,
    to_text,
)

FIXTURES = ["x", "x^2", "x^2+1", "x^2-1", "exp(2ix)", "5", "-x^2+2ix+1", "-x^2+2ix+1.99",
            "conj(x^3)*x^3", "cos(x)", "sin(2x)", "3*exp(-0.5i*x) + 2i", "(x+1)^3*exp(ix)", "1e-3x^2"]
XS = np.linspace(-3, 3, 41)


def test_parse_polynomial_folds():
    assert parse_symbol("x^2+1") == Poly((1 + 0j, 0j, 1 + 0j))
    assert parse_symbol("x") == X


def test_parse_exponential():
    e = parse_symbol("exp(2i*x)")
    assert isinstance(e, CExp) and e.alpha == 2.0 and e.c == 1


def test_implicit_multiplication():
    assert evaluate(parse_symbol("2ix"), 1.5) == pytest.approx(3j)
    assert evaluate(parse_symbol("3(x+1)"), 1.0) == pytest.approx(6)


def test_conj_of_cube():
    assert evaluate(parse_symbol("conj(x^3)"), 2.0) == pytest.approx(8)
    assert evaluate(parse_symbol("conj(i*x^3)"), 2.0) == pytest.approx(-8j)


def test_cos_sugar():
    np.testing.assert_allclose(evaluate(parse_symbol("cos(x)"), XS), np.cos(XS), atol=1e-15)
    np.testing.assert_allclose(evaluate(parse_symbol("sin(2x)"), XS), np.sin(2 * XS), atol=1e-15)


@pytest.mark.parametrize("text, pos", [("x^", 2), ("x^2+", 4), ("(x+1", 4), ("x $ 2", 2), ("x^-1", 2)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(SymbolError) as info:
        parse_symbol(text)
    assert info.value.position == pos


def test_complex_frequency_rejected():
    with pytest.raises(SymbolError, match="frequency"):
        parse_symbol("exp(x)")


@pytest.mark.parametrize("text", FIXTURES)
def test_print_parse_roundtrip(text):
    e = parse_symbol(text)
    again = parse_symbol(to_text(e))
    np.testing.assert_allclose(evaluate(again, XS), evaluate(e, XS), rtol=1e-13, atol=1e-13)
    assert to_text(again) == to_text(e)


@pytest.mark.parametrize("text", FIXTURES)
def test_json_is_serializable(text):
    import json

    json.dumps(to_json(parse_symbol(text)))


def test_evaluate_scalar_and_vector():
    e = parse_symbol("-x^2+2ix+1")
    assert isinstance(evaluate(e, 0.5), complex)
    v = evaluate(e, XS)
    np.testing.assert_allclose(v, -XS**2 + 2j * XS + 1)


def test_as_poly_and_atoms():
    assert as_poly(parse_symbol("conj(x^3)*x^3")) == pytest.approx([0, 0, 0, 0, 0, 0, 1])
    assert as_poly(parse_symbol("exp(ix)")) is None
    atoms = exponential_atoms(parse_symbol("cos(x)"))
    assert sorted((round(a, 12), c) for c, a in atoms) == [(-1.0, 0.5), (1.0, 0.5)]
    assert exponential_atoms(parse_symbol("x*exp(ix)")) is None


def test_affine_as_poly():
    e = Affine(parse_symbol("x^2"), 2.0, 1.0)
    assert as_poly(e) == pytest.approx([1, 4, 4])


def test_closure_variants_shapes():
    F = parse_symbol("x^2+1")
    variants = closure_variants(F, 3, 2 - 1j, 0.5, -1.0)
    assert [type(v) for v in variants] == [Conj, Pow, Pow, Prod, Affine]
    x = 0.7
    f = evaluate(F, x)
    expected = [np.conj(f), f**3, abs(f) ** 6, (2 - 1j) * f, evaluate(F, 0.5 * x - 1.0)]
    np.testing.assert_allclose([evaluate(v, x) for v in variants], expected)


def test_pow_rejects_negative():
    with pytest.raises(SymbolError):
        Pow(X, -1)


def test_const_must_be_finite():
    with pytest.raises(SymbolError):
        Const(complex(float("nan"), 0))


coeff = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=6), st.floats(-5, 5))
def test_conjugate_expr_matches_pointwise_conj(coeffs, x):
    e = Prod(Poly(tuple(coeffs)), CExp(1 + 1j, 0.3))
    assert evaluate(conjugate_expr(e), x) == pytest.approx(np.conj(evaluate(e, x)), rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=5), st.floats(-3, 3))
def test_printed_polynomials_reparse(coeffs, x):
    e = Poly(tuple(coeffs))
    assert evaluate(parse_symbol(to_text(e)), x) == pytest.approx(evaluate(e, x), rel=1e-12, abs=1e-12)
