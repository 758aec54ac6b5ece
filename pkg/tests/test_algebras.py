import json
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from usym.algebras import (
    Bracket,
    DiagLp,
    General,
    Multiplier,
    SelfAdjointL2,
    element_from_json,
    element_to_json,
    exp_element,
    expm_taylor,
    gelfand_estimate,
    generator,
    hermitian_check,
    matrix_exp,
    matrix_norm,
    multiplier_apply,
    multiplier_norm_bracket,
    op_norm,
    power_norm2,
    random_self_adjoint,
    spectral_radius,
    spectrum,
    trig_grid,
    trig_sup,
)
from usym.errors import Inconclusive
from usym.symbols import parse_symbol

JORDAN = General(np.array([[0, 1], [0, 0]]), "l2")


def rand_matrix(rng, n, scale=1.0):
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


# --------------------------------------------------------------------------
# exponentials


@pytest.mark.parametrize("scale", [1e-3, 0.3, 2.0, 25.0])
def test_expm_against_scipy(scale):
    rng = np.random.default_rng(int(scale * 1000))
    X = rand_matrix(rng, 6, scale)
    ref = scipy.linalg.expm(X)
    np.testing.assert_allclose(expm_taylor(X), ref, rtol=1e-10, atol=1e-12 * np.abs(ref).max())


def test_swap_exponential_at_pi():
    A = np.array([[0, 1], [1, 0]])
    np.testing.assert_allclose(matrix_exp(A, math.pi), -np.eye(2), atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(0, 2**16))
def test_group_law(s, t, seed):
    A = random_self_adjoint(4, np.random.default_rng(seed)).matrix
    np.testing.assert_allclose(matrix_exp(A, s) @ matrix_exp(A, t), matrix_exp(A, s + t), atol=1e-11)


# --------------------------------------------------------------------------
# norms


@pytest.mark.parametrize("seed", range(5))
def test_power_norm2_matches_svd(seed):
    A = rand_matrix(np.random.default_rng(seed), 7)
    assert power_norm2(A) == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-8)


def test_induced_norms():
    A = np.array([[1, -2], [3, 4j]])
    assert matrix_norm(A, "l1") == 6
    assert matrix_norm(A, "linf") == 7
    assert matrix_norm(A, "l2") == pytest.approx(np.linalg.svd(A, compute_uv=False)[0])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["l1", "l2", "linf"]), st.integers(0, 2**16))
def test_submultiplicative(kind, seed):
    rng = np.random.default_rng(seed)
    A, B = rand_matrix(rng, 5), rand_matrix(rng, 5)
    assert matrix_norm(A @ B, kind) <= matrix_norm(A, kind) * matrix_norm(B, kind) * (1 + 1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**16))
def test_multiplier_submultiplicative(N, seed):
    rng = np.random.default_rng(seed)
    a = Multiplier(N, rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1))
    b = Multiplier(N, rng.standard_normal(2 * N + 1))
    ab = op_norm(Multiplier(N, a.values * b.values))
    # lower bound of the product never exceeds the product of upper bounds
    assert ab.lower <= op_norm(a).upper * op_norm(b).upper * (1 + 1e-12)


# --------------------------------------------------------------------------
# multiplier brackets


@pytest.mark.parametrize("N", [4, 8, 16])
def test_bernstein_anchor(N):
    D = generator(N)
    cos_c = np.zeros(2 * N + 1, dtype=complex)
    cos_c[0] = cos_c[-1] = 0.5
    M = 32 * N
    ratio = np.abs(trig_grid(D.values * cos_c, M)).max() / trig_sup(cos_c, M)
    assert ratio == pytest.approx(N, abs=1e-12)
    br = op_norm(D)
    assert br.lower == pytest.approx(N, abs=1e-12) and br.upper >= br.lower
    assert spectral_radius(D) == N


def test_character_multiplier_is_pinned():
    br = op_norm(multiplier_apply(parse_symbol("exp(ix)"), 8, 1.0))
    assert br == Bracket(1.0, 1.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**16))
def test_bracket_is_ordered_and_above_characters(N, seed):
    rng = np.random.default_rng(seed)
    m = Multiplier(N, rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1))
    br = multiplier_norm_bracket(m, seed=seed)
    assert br.lower <= br.upper
    assert br.lower >= np.abs(m.values).max()


def test_trig_sup_refines_grid():
    # normalized Dirichlet kernel centred off-grid at x = -0.37: true sup is exactly 1
    N = 5
    c = np.exp(0.37j * np.arange(-N, N + 1)) / (2 * N + 1)
    M = 32 * N
    assert np.abs(trig_grid(c, M)).max() < 1 - 1e-4
    assert trig_sup(c, M) == pytest.approx(1.0, abs=1e-12)


# --------------------------------------------------------------------------
# spectral radius


def test_spectral_radius_kinds():
    assert spectral_radius(DiagLp(1, [1, -3, 2])) == 3
    rng = np.random.default_rng(1)
    S = random_self_adjoint(5, rng, spectrum=[-4, 1, 2, 0.5, 3])
    assert spectral_radius(S) == pytest.approx(4)
    assert spectral_radius(JORDAN) == 0.0


def test_gelfand_matches_eigenvalues():
    rng = np.random.default_rng(3)
    A = rand_matrix(rng, 5)
    eig = np.abs(np.linalg.eigvals(A)).max()
    assert gelfand_estimate(A, 256) == pytest.approx(eig, rel=0.05)


def test_spectral_radius_flags_disagreement():
    # a large Jordan block: eigenvalues 1 but ||A^64||^(1/64) is far above 1
    n = 12
    A = np.eye(n) + 50 * np.eye(n, k=1)
    with pytest.raises(Inconclusive):
        spectral_radius(General(A, "l2"))


def test_spectrum_of_generator():
    np.testing.assert_array_equal(spectrum(generator(3)).real, np.arange(-3, 4))


# --------------------------------------------------------------------------
# Hermitian elements


def test_jordan_block_svd_oracle():
    E = matrix_exp(JORDAN.matrix, 1.0)  # = I + iA
    sv = np.linalg.svd(E, compute_uv=False)[0]
    assert sv == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-12)
    ok, dev = hermitian_check(JORDAN, t_grid=[1.0])
    assert not ok and dev == pytest.approx(0.6180339887, abs=1e-9)


@pytest.mark.parametrize("element", [
    DiagLp(1, [0.5, -2, 3]),
    DiagLp(2, [1.0, 2.0]),
    DiagLp(math.inf, [-1.5, 0.0, 4.0]),
    random_self_adjoint(4, np.random.default_rng(0)),
    random_self_adjoint(6, np.random.default_rng(1)),
    generator(8),
    generator(5, 0.25),
    Multiplier(4, 0.5 * np.arange(-4, 5) + 1.5),
], ids=["d1", "d2", "dinf", "sa4", "sa6", "D8", "D5s", "affine"])
def test_hermitian_fixtures_pass(element):
    ok, dev = hermitian_check(element)
    assert ok and dev <= 1e-8


def test_non_hermitian_fail():
    assert not hermitian_check(DiagLp(2, [1j, 1]))[0]
    assert not hermitian_check(Multiplier(2, [0, 1j, 0, 1, 2]))[0]


def test_exp_element_of_generator_is_translation():
    e = exp_element(generator(6), 0.7)
    assert e.translations == ((0.7, 1 + 0j),)
    assert op_norm(e) == Bracket(1.0, 1.0)


def test_self_adjoint_validation():
    with pytest.raises(ValueError):
        SelfAdjointL2(np.array([[0, 1], [0, 0]]))


# --------------------------------------------------------------------------
# JSON


@pytest.mark.parametrize("element", [
    DiagLp(math.inf, [1.0, -2.0]),
    random_self_adjoint(3, np.random.default_rng(5)),
    multiplier_apply(parse_symbol("2*exp(0.5ix)"), 4, 1.5),
    JORDAN,
])
def test_element_json_roundtrip(element):
    d = json.loads(json.dumps(element_to_json(element)))
    back = element_from_json(d)
    assert type(back) is type(element)
    assert element_to_json(back) == element_to_json(element)
