"""Functional calculus for Hermitian elements.

A finite atomic measure mu = sum_j w_j delta_{t_j} acts on a Hermitian
element through F(a) = sum_j w_j exp(i t_j a), the discrete form of
integrating exp(ita) against mu.  Its norm is at most the total variation
of mu.  Polynomials can also be applied directly (Horner), which gives
an independent route to compare against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebras import (
    AlgebraElement,
    Bracket,
    DiagLp,
    General,
    Multiplier,
    SelfAdjointL2,
    matrix_exp,
    op_norm,
    spectrum,
)
from .symbols import (
    Affine,
    CExp,
    Conj,
    Const,
    Poly,
    Pow,
    Prod,
    Sum,
    SymbolError,
    SymbolExpr,
    as_poly,
    conjugate_expr,
    evaluate,
    exponential_atoms,
)


@dataclass(frozen=True)
class Measure:
    """Atoms (t, w), kept sorted by t."""

    atoms: tuple[tuple[float, complex], ...]

    def __post_init__(self):
        atoms = tuple(sorted(((float(t), complex(w)) for t, w in self.atoms), key=lambda a: a[0]))
        for t, w in atoms:
            if not (math.isfinite(t) and math.isfinite(w.real) and math.isfinite(w.imag)):
                raise ValueError("measure atoms must be finite")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def delta(cls, t: float = 0.0, w: complex = 1.0) -> "Measure":
        return cls(((t, w),))

    @property
    def tv(self) -> float:
        return math.fsum(abs(w) for _, w in self.atoms)

    @property
    def locations(self) -> np.ndarray:
        return np.array([t for t, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=complex)

    def transform(self, xi):
        """Fourier-Stieltjes transform sum_j w_j exp(i xi t_j)."""
        xi = np.asarray(xi, dtype=float)
        return np.exp(1j * np.multiply.outer(xi, self.locations)) @ self.weights

    def __add__(self, other: "Measure") -> "Measure":
        return _merged(np.concatenate([self.locations, other.locations]),
                       np.concatenate([self.weights, other.weights]))

    def scaled(self, c: complex) -> "Measure":
        return Measure(tuple((t, c * w) for t, w in self.atoms))

    def convolve(self, other: "Measure") -> "Measure":
        t = np.add.outer(self.locations, other.locations).ravel()
        w = np.multiply.outer(self.weights, other.weights).ravel()
        return _merged(t, w)

    def to_json(self) -> list:
        return [[t, w.real, w.imag] for t, w in self.atoms]

    @classmethod
    def from_json(cls, data) -> "Measure":
        return cls(tuple((t, complex(re, im)) for t, re, im in data))


def _merged(t: np.ndarray, w: np.ndarray) -> Measure:
    # locations equal up to rounding of the sums are one atom
    key = np.round(t, 12)
    uniq, inv = np.unique(key, return_inverse=True)
    wr = np.bincount(inv, weights=w.real, minlength=len(uniq))
    wi = np.bincount(inv, weights=w.imag, minlength=len(uniq))
    first = np.zeros(len(uniq), dtype=int)
    first[inv[::-1]] = np.arange(len(t))[::-1]
    return Measure(tuple(zip(t[first].tolist(), (wr + 1j * wi).tolist())))


# --------------------------------------------------------------------------
# the triangle-wave construction for F(x) = x


def linear_symbol_measure(L: float, K: int) -> Measure:
    """Atoms of the anti-periodic triangle wave, truncated at odd K.

    phi(y) = 1 - y/L on [0, 2L], even, with phi(y + 2L) = -phi(y), has
    Fourier series sum_{k odd} 8/(pi^2 k^2) cos(k pi y / (2L)).  On [-L, L]
    x = -L phi(x + L), so F(x) = x is obtained from this positive measure.
    """
    if L <= 0:
        raise ValueError("L must be positive")
    if K < 1 or K % 2 == 0:
        raise ValueError(f"cutoff K must be odd and >= 1, got {K}")
    atoms = []
    for k in range(1, K + 1, 2):
        w = 4.0 / (math.pi**2 * k * k)
        t = k * math.pi / (2 * L)
        atoms.append((t, w))
        atoms.append((-t, w))
    return Measure(tuple(atoms))


def triangle_tail(K: int) -> float:
    """Total mass dropped by truncating at K: sum_{odd k > K} 8/(pi^2 k^2)."""
    # sum_{odd k} 1/k^2 = pi^2/8; the remainder is summed from the partial sum
    partial = math.fsum(1.0 / (k * k) for k in range(1, K + 1, 2))
    return max(8.0 / math.pi**2 * (math.pi**2 / 8 - partial), 0.0)


def quadratic_symbol_measure(L: float, K: int) -> Measure:
    """x^2 = L^2 phi(x + L)^2 on [-L, L]: the linear measure convolved with itself."""
    mu = linear_symbol_measure(L, K)
    return mu.convolve(mu)


def shifted(A: AlgebraElement, c: float) -> AlgebraElement:
    """A + c * 1."""
    if isinstance(A, DiagLp):
        return DiagLp(A.p, A.diag + c)
    if isinstance(A, Multiplier):
        return Multiplier(A.N, A.values + c)
    if isinstance(A, SelfAdjointL2):
        return SelfAdjointL2(A.matrix + c * np.eye(A.dim))
    if isinstance(A, General):
        return General(A.matrix + c * np.eye(A.dim), A.norm_kind)
    raise TypeError(f"not an algebra element: {A!r}")


def scaled(A: AlgebraElement, c: complex) -> AlgebraElement:
    if isinstance(A, DiagLp):
        return DiagLp(A.p, c * A.diag)
    if isinstance(A, Multiplier):
        trans = None if A.translations is None else tuple((t, c * w) for t, w in A.translations)
        return Multiplier(A.N, c * A.values, translations=trans)
    if isinstance(A, (SelfAdjointL2, General)):
        return General(c * A.matrix, getattr(A, "norm_kind", "l2"))
    raise TypeError(f"not an algebra element: {A!r}")


def linear_symbol_apply(A: AlgebraElement, L: float, K: int) -> AlgebraElement:
    """F(a) for F(x) = x through the measure route: -L * phi_K(a + L)."""
    return scaled(bochner_apply(linear_symbol_measure(L, K), shifted(A, L)), -L)


# --------------------------------------------------------------------------
# the two routes


def _norm_kind(A) -> str:
    return A.norm_kind if isinstance(A, General) else "l2"


def bochner_apply(mu: Measure, A: AlgebraElement) -> AlgebraElement:
    """sum_j w_j exp(i t_j A), atoms summed in ascending t.

    ``A`` is assumed Hermitian (see :func:`usym.algebras.hermitian_check`).
    """
    if isinstance(A, DiagLp):
        return DiagLp(A.p, np.exp(1j * np.multiply.outer(A.diag, mu.locations)) @ mu.weights)
    if isinstance(A, Multiplier):
        values = np.exp(1j * np.multiply.outer(A.values, mu.locations)) @ mu.weights
        form = A.affine_form()
        trans = None if form is None else tuple((t * form[0], w * np.exp(1j * t * form[1])) for t, w in mu.atoms)
        return Multiplier(A.N, values, translations=trans)
    if isinstance(A, (SelfAdjointL2, General)):
        acc = np.zeros((A.dim, A.dim), dtype=complex)
        for t, w in mu.atoms:
            acc += w * matrix_exp(A.matrix, t)
        return General(acc, _norm_kind(A))
    raise TypeError(f"not an algebra element: {A!r}")


def holomorphic_apply(F: SymbolExpr, A: AlgebraElement) -> AlgebraElement:
    """Polynomial F evaluated in the algebra by Horner's rule."""
    coeffs = as_poly(F)
    if coeffs is None:
        raise SymbolError("holomorphic_apply needs a polynomial symbol; use the measure route")
    if isinstance(A, DiagLp):
        return DiagLp(A.p, np.polyval(coeffs[::-1], A.diag.astype(complex)))
    if isinstance(A, Multiplier):
        return Multiplier(A.N, np.polyval(coeffs[::-1], A.values))
    if isinstance(A, (SelfAdjointL2, General)):
        return General(_horner(coeffs, A.matrix), _norm_kind(A))
    raise TypeError(f"not an algebra element: {A!r}")


def _horner(coeffs, M):
    n = M.shape[0]
    eye = np.eye(n, dtype=complex)
    acc = coeffs[-1] * eye
    for c in reversed(coeffs[:-1]):
        acc = acc @ M + c * eye
    return acc


def apply_symbol(F: SymbolExpr, A: AlgebraElement) -> AlgebraElement:
    """F(A) for any symbol expression.

    Diagonal and multiplier kinds are evaluated entrywise on the spectrum.
    Matrices go through the expression tree: polynomials by Horner,
    exponentials by the matrix exponential, conjugation rewritten away
    first (x is real, so conj(F) is again an expression in x).
    """
    if isinstance(A, DiagLp):
        return DiagLp(A.p, evaluate(F, A.diag.real))
    if isinstance(A, Multiplier):
        values = evaluate(F, A.values.real)
        form = A.affine_form()
        atoms = exponential_atoms(F) if form is not None else None
        trans = None
        if atoms is not None:
            s, b = form
            trans = tuple((a * s, c * np.exp(1j * a * b)) for c, a in atoms)
        return Multiplier(A.N, values, translations=trans)
    if isinstance(A, (SelfAdjointL2, General)):
        return General(_apply_matrix(F, np.asarray(A.matrix, dtype=complex)), _norm_kind(A))
    raise TypeError(f"not an algebra element: {A!r}")


def _apply_matrix(e: SymbolExpr, M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    if isinstance(e, Const):
        return e.c * np.eye(n, dtype=complex)
    if isinstance(e, Poly):
        return _horner(list(e.coeffs), M)
    if isinstance(e, CExp):
        return e.c * matrix_exp(M, e.alpha)
    if isinstance(e, Conj):
        return _apply_matrix(conjugate_expr(e.inner), M)
    if isinstance(e, Sum):
        return _apply_matrix(e.left, M) + _apply_matrix(e.right, M)
    if isinstance(e, Prod):
        return _apply_matrix(e.left, M) @ _apply_matrix(e.right, M)
    if isinstance(e, Pow):
        base = _apply_matrix(e.inner, M)
        return np.linalg.matrix_power(base, e.n)
    if isinstance(e, Affine):
        return _apply_matrix(e.inner, e.alpha * M + e.beta * np.eye(n))
    raise TypeError(f"not a symbol expression: {e!r}")


# --------------------------------------------------------------------------
# checks


def norm_bound_check(mu: Measure, A: AlgebraElement) -> float:
    """tv(mu) - ||mu^(A)||, using the upper end of a norm bracket."""
    norm = op_norm(bochner_apply(mu, A))
    if isinstance(norm, Bracket):
        norm = norm.upper
    return mu.tv - norm


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    d = np.abs(np.subtract.outer(a, b))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def spectral_mapping_check(F: SymbolExpr, A: AlgebraElement) -> float:
    """Hausdorff distance between sigma(F(A)) and F(sigma(A))."""
    if not isinstance(A, (DiagLp, Multiplier)):
        raise TypeError("spectral_mapping_check needs a diagonal or multiplier element")
    image = evaluate(F, spectrum(A).real)
    return hausdorff(spectrum(apply_symbol(F, A)), image)
