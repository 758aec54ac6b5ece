import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from usym.algebras import DiagLp, General, generator, op_norm, random_self_adjoint
from usym.calculus import (
    Measure,
    apply_symbol,
    bochner_apply,
    hausdorff,
    holomorphic_apply,
    linear_symbol_apply,
    linear_symbol_measure,
    norm_bound_check,
    quadratic_symbol_measure,
    shifted,
    spectral_mapping_check,
    triangle_tail,
)
from usym.symbols import SymbolError, X, evaluate, parse_symbol

COS_MEASURE = Measure(((1.0, 0.5), (-1.0, 0.5)))

atom = st.tuples(st.floats(-4, 4), st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
measures = st.lists(atom, min_size=1, max_size=5).map(lambda a: Measure(tuple(a)))


def eig_apply(f, A):
    w, V = np.linalg.eigh(A)
    return (V * f(w)) @ V.conj().T


def test_measure_sorted_and_tv():
    mu = Measure(((2.0, -1j), (-1.0, 0.5)))
    assert mu.locations.tolist() == [-1.0, 2.0]
    assert mu.tv == 1.5


def test_measure_transform_of_cos():
    xi = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(COS_MEASURE.transform(xi), np.cos(xi), atol=1e-15)


def test_measure_json_roundtrip():
    mu = Measure(((0.5, 1 + 2j), (-3.0, -0.25)))
    assert Measure.from_json(mu.to_json()) == mu


def test_measure_rejects_nonfinite():
    with pytest.raises(ValueError):
        Measure(((math.inf, 1.0),))


@settings(max_examples=50, deadline=None)
@given(measures, measures)
def test_tv_submultiplicative_under_convolution(mu, nu):
    assert mu.convolve(nu).tv <= mu.tv * nu.tv + 1e-12


@settings(max_examples=30, deadline=None)
@given(measures, measures, st.integers(0, 2**16))
def test_bochner_apply_is_linear(mu, nu, seed):
    A = random_self_adjoint(4, np.random.default_rng(seed))
    lhs = bochner_apply(mu + nu, A).matrix
    rhs = bochner_apply(mu, A).matrix + bochner_apply(nu, A).matrix
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_cos_measure_gives_matrix_cosine():
    A = random_self_adjoint(5, np.random.default_rng(2))
    np.testing.assert_allclose(bochner_apply(COS_MEASURE, A).matrix, eig_apply(np.cos, A.matrix), atol=1e-10)


def test_character_measure_on_generator_is_translation():
    out = bochner_apply(Measure.delta(0.3), generator(5))
    assert out.translations == ((0.3, 1 + 0j),)
    assert op_norm(out) == (1.0, 1.0)


def test_triangle_measure_reproduces_x():
    L, K = 2.0, 999
    mu = linear_symbol_measure(L, K)
    xs = np.linspace(-L, L, 101)
    np.testing.assert_allclose(-L * mu.transform(xs + L).real, xs, atol=L * triangle_tail(K))
    assert mu.tv == pytest.approx(1 - triangle_tail(K), abs=1e-12)


def test_triangle_tail_values():
    assert triangle_tail(1) == pytest.approx(1 - 8 / math.pi**2)
    # the tail behaves like 4 / (pi^2 K)
    assert triangle_tail(999) == pytest.approx(4 / (math.pi**2 * 999), rel=2e-3)


def test_even_cutoff_rejected():
    with pytest.raises(ValueError):
        linear_symbol_measure(2.0, 10)


@pytest.mark.parametrize("seed", range(3))
def test_linear_routes_agree(seed):
    L, K = 2.0, 999
    A = random_self_adjoint(6, np.random.default_rng(seed), spectrum=np.random.default_rng(seed).uniform(-L, L, 6))
    diff = np.linalg.norm(linear_symbol_apply(A, L, K).matrix - holomorphic_apply(X, A).matrix, 2)
    assert diff <= L * triangle_tail(K)
    assert norm_bound_check(linear_symbol_measure(L, K), shifted(A, L)) >= -1e-8


def test_quadratic_route_by_convolution():
    L, K = 1.0, 199
    rng = np.random.default_rng(7)
    A = random_self_adjoint(4, rng, spectrum=rng.uniform(-L, L, 4))
    mu2 = quadratic_symbol_measure(L, K)
    via_measure = L**2 * bochner_apply(mu2, shifted(A, L)).matrix
    diff = np.linalg.norm(via_measure - A.matrix @ A.matrix, 2)
    assert diff <= 2 * L**2 * triangle_tail(K)
    assert norm_bound_check(mu2, shifted(A, L)) >= -1e-8


def test_norm_bound_on_diagonal_kinds():
    mu = Measure(((0.5, 1j), (-2.0, 0.3), (1.0, -0.2)))
    for p in (1, 2, math.inf):
        assert norm_bound_check(mu, DiagLp(p, [0.1, -2.0, 3.5])) >= -1e-12


@pytest.mark.parametrize("text", ["x^3-2x", "exp(1.5ix)", "conj(x^2+ix)", "(x+i)^2*exp(-ix)", "cos(x)"])
def test_apply_symbol_matches_eigen_calculus(text):
    F = parse_symbol(text)
    A = random_self_adjoint(5, np.random.default_rng(11))
    out = apply_symbol(F, A)
    assert isinstance(out, General)
    np.testing.assert_allclose(out.matrix, eig_apply(lambda w: evaluate(F, w), A.matrix), atol=1e-10)


def test_holomorphic_route_needs_polynomial():
    with pytest.raises(SymbolError):
        holomorphic_apply(parse_symbol("exp(ix)"), DiagLp(2, [1.0]))


@pytest.mark.parametrize("text", ["x^2+2ix", "exp(2ix)", "conj(x^3)*x^3"])
def test_spectral_mapping(text):
    F = parse_symbol(text)
    assert spectral_mapping_check(F, DiagLp(2, [1.0, -0.5, 2.0])) <= 1e-12
    assert spectral_mapping_check(F, generator(8, 0.5)) <= 1e-12


def test_hausdorff():
    assert hausdorff(np.array([0, 1]), np.array([0, 1, 3])) == 2
