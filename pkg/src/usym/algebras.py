"""Concrete Banach algebras and their Hermitian elements.

Four kinds of element are supported:

* ``DiagLp``: diagonal operators on C^n with an l^p norm, p in {1, 2, inf};
* ``SelfAdjointL2``: self-adjoint matrices on l^2;
* ``Multiplier``: Fourier multipliers on trigonometric polynomials of degree
  <= N with the sup norm on the circle.  ``D_N`` (values m_k = k) is the
  discrete version of -i d/dx, whose exponentials are translations;
* ``General``: any square matrix with a chosen induced norm.

Norms of multipliers are returned as a :class:`Bracket`; everything else
is a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import Inconclusive
from .symbols import SymbolExpr, evaluate, exponential_atoms

NORM_KINDS = ("l1", "l2", "linf")
HERM_TOL = 1e-8
GELFAND_POWER = 64
GELFAND_REL_TOL = 0.05


class Bracket(NamedTuple):
    lower: float
    upper: float

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol


def _p_tag(p) -> str:
    if p in (1, "1", "l1"):
        return "l1"
    if p in (2, "2", "l2"):
        return "l2"
    if p in (math.inf, "inf", "linf", np.inf):
        return "linf"
    raise ValueError(f"unsupported p: {p!r}")


@dataclass(eq=False)
class DiagLp:
    p: float
    diag: np.ndarray

    def __post_init__(self):
        self.p = {"l1": 1, "l2": 2, "linf": math.inf}[_p_tag(self.p)]
        d = np.asarray(self.diag)
        self.diag = d.astype(float) if np.isrealobj(d) else d.astype(complex)

    @property
    def dim(self) -> int:
        return len(self.diag)


@dataclass(eq=False)
class SelfAdjointL2:
    matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        if not np.allclose(a, a.conj().T, rtol=0, atol=1e-12):
            raise ValueError("SelfAdjointL2 matrix is not Hermitian within 1e-12")
        self.matrix = a

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(eq=False)
class Multiplier:
    """Fourier multiplier with values m_k, k = -N..N.

    ``translations`` optionally records atoms (t_j, w_j) with
    m_k = sum_j w_j exp(i t_j k), i.e. the operator as a combination of
    translations; its total variation is then a norm upper bound.
    """

    N: int
    values: np.ndarray
    translations: tuple | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (2 * self.N + 1,):
            raise ValueError(f"expected {2 * self.N + 1} multiplier values, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("multiplier values must be finite")
        self.values = v

    @property
    def dim(self) -> int:
        return 2 * self.N + 1

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def affine_form(self) -> tuple[float, float] | None:
        """(s, b) if the values are exactly s*k + b with s, b real.

        Then exp(itA) is exp(itb) times translation by ts, an isometry.
        """
        if self.N < 1 or np.any(self.values.imag != 0):
            return None
        b = self.values[self.N].real
        s = self.values[self.N + 1].real - b
        expected = s * self.frequencies + b
        scale = max(1.0, abs(s), abs(b))
        if np.allclose(self.values.real, expected, rtol=0, atol=1e-12 * scale):
            return float(s), float(b)
        return None


@dataclass(eq=False)
class General:
    matrix: np.ndarray
    norm_kind: str = "l2"

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        if self.norm_kind not in NORM_KINDS:
            raise ValueError(f"norm_kind must be one of {NORM_KINDS}")
        self.matrix = a

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


AlgebraElement = DiagLp | SelfAdjointL2 | Multiplier | General


def generator(N: int, s: float = 1.0) -> Multiplier:
    """s * D_N, the scaled differentiation multiplier."""
    k = np.arange(-N, N + 1)
    return Multiplier(N, s * k, translations=None)


def random_self_adjoint(dim: int, rng: np.random.Generator, spectrum=None) -> SelfAdjointL2:
    """Haar-random unitary conjugate of diag(spectrum) (default: N(0,1) entries)."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    if spectrum is None:
        spectrum = rng.standard_normal(dim)
    a = (q * np.asarray(spectrum, dtype=float)) @ q.conj().T
    return SelfAdjointL2((a + a.conj().T) / 2)


# --------------------------------------------------------------------------
# matrix exponential


def expm_taylor(X: np.ndarray, degree: int = 18) -> np.ndarray:
    """exp(X) by scaling and squaring with a truncated Taylor series."""
    X = np.asarray(X, dtype=complex)
    n = X.shape[0]
    norm = np.abs(X).sum(axis=0).max() if n else 0.0
    s = 0
    if norm > 0.5:
        s = int(math.ceil(math.log2(norm / 0.5)))
    Y = X / 2.0**s
    eye = np.eye(n, dtype=complex)
    E = eye.copy()
    for k in range(degree, 0, -1):
        E = eye + (Y @ E) / k
    for _ in range(s):
        E = E @ E
    return E


def matrix_exp(A: np.ndarray, t: float) -> np.ndarray:
    """exp(i t A)."""
    return expm_taylor(1j * t * np.asarray(A, dtype=complex))


# --------------------------------------------------------------------------
# norms


def power_norm2(A: np.ndarray, tol: float = 1e-10, max_iter: int = 5000, seed: int = 0) -> float:
    """Largest singular value by power iteration on A*A."""
    A = np.asarray(A, dtype=complex)
    B = A.conj().T @ A
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(B.shape[0]) + 1j * rng.standard_normal(B.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = B @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        lam_new = float(np.real(np.vdot(v, w)))
        v = w / nw
        if abs(lam_new - lam) <= tol * abs(lam_new):
            return math.sqrt(max(lam_new, 0.0))
        lam = lam_new
    raise Inconclusive("power iteration for the l2 norm did not converge")


def matrix_norm(A: np.ndarray, kind: str) -> float:
    A = np.asarray(A)
    if kind == "l1":
        return float(np.abs(A).sum(axis=0).max())
    if kind == "linf":
        return float(np.abs(A).sum(axis=1).max())
    if kind == "l2":
        return float(np.linalg.norm(A, 2))
    raise ValueError(f"unknown norm kind {kind!r}")


def op_norm(A: AlgebraElement, seed: int = 0):
    """Operator norm; a :class:`Bracket` for multipliers."""
    if isinstance(A, DiagLp):
        return float(np.abs(A.diag).max()) if A.dim else 0.0
    if isinstance(A, SelfAdjointL2):
        return matrix_norm(A.matrix, "l2")
    if isinstance(A, General):
        return matrix_norm(A.matrix, A.norm_kind)
    if isinstance(A, Multiplier):
        return multiplier_norm_bracket(A, seed=seed)
    raise TypeError(f"not an algebra element: {A!r}")


# --------------------------------------------------------------------------
# trigonometric polynomials under the sup norm


def trig_grid(coeffs: np.ndarray, M: int) -> np.ndarray:
    """Values of sum_{|k|<=N} c_k e^{ikx} at x_j = 2 pi j / M."""
    N = (len(coeffs) - 1) // 2
    if M <= 2 * N:
        raise ValueError("grid too coarse for the polynomial degree")
    buf = np.zeros(M, dtype=complex)
    buf[np.arange(-N, N + 1) % M] = coeffs
    return np.fft.ifft(buf) * M


def trig_eval(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    N = (len(coeffs) - 1) // 2
    k = np.arange(-N, N + 1)
    return np.exp(1j * np.multiply.outer(x, k)) @ coeffs


def trig_sup(coeffs: np.ndarray, M: int, iters: int = 60) -> float:
    """Sup norm of a trigonometric polynomial, grid maximum refined locally.

    If S is the true maximum of |f| then some grid point within half a
    spacing has |f| >= S (1 - N^2 pi^2 / (2 M^2)) (second-order Bernstein
    bound on Re(e^{-i theta} f)); every such grid local maximum is refined
    by golden-section search on its two neighbouring cells.
    """
    N = (len(coeffs) - 1) // 2
    vals = np.abs(trig_grid(coeffs, M))
    gmax = float(vals.max())
    if gmax == 0.0 or N == 0:
        return gmax
    slack = (N * math.pi / M) ** 2 / 2
    is_peak = (vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1))
    cand = np.flatnonzero(is_peak & (vals >= gmax * (1 - 2 * slack)))
    if len(cand) > 256:
        cand = cand[np.argsort(vals[cand])[-256:]]
    h = 2 * math.pi / M
    lo = cand * h - h
    hi = cand * h + h
    g = (math.sqrt(5) - 1) / 2
    a = hi - g * (hi - lo)
    b = lo + g * (hi - lo)
    fa = np.abs(trig_eval(coeffs, a))
    fb = np.abs(trig_eval(coeffs, b))
    best = max(gmax, float(fa.max()), float(fb.max()))
    for _ in range(iters):
        left = fa > fb
        hi = np.where(left, b, hi)
        lo = np.where(left, lo, a)
        b_new = np.where(left, a, lo + g * (hi - lo))
        a_new = np.where(left, hi - g * (hi - lo), b)
        fb_new = np.where(left, fa, np.nan)
        fa_new = np.where(left, np.nan, fb)
        need_a = np.isnan(fa_new)
        need_b = np.isnan(fb_new)
        if need_a.any():
            fa_new[need_a] = np.abs(trig_eval(coeffs, a_new[need_a]))
        if need_b.any():
            fb_new[need_b] = np.abs(trig_eval(coeffs, b_new[need_b]))
        a, b, fa, fb = a_new, b_new, fa_new, fb_new
        best = max(best, float(fa.max()), float(fb.max()))
    return best


def vallee_poussin_extension(values: np.ndarray) -> np.ndarray:
    """Extend m_k, |k| <= N, to |k| <= 2N tapering linearly to zero."""
    N = (len(values) - 1) // 2
    out = np.zeros(4 * N + 1, dtype=complex)
    out[N:3 * N + 1] = values
    for j in range(1, N + 1):
        w = (N - j) / N
        out[3 * N + j] = values[-1] * w
        out[N - j] = values[0] * w
    return out


def _sign_pattern_coeffs(kernel: np.ndarray, N: int, M: int) -> np.ndarray:
    """Coefficients |k| <= N of y -> conj(K(-y)) / |K(-y)|."""
    vals = trig_grid(kernel, M)
    # K(-y_j) = K(y_{-j})
    reflected = vals[(-np.arange(M)) % M]
    mag = np.abs(reflected)
    pattern = np.where(mag > 0, np.conj(reflected) / np.where(mag > 0, mag, 1), 0)
    spec = np.fft.fft(pattern) / M
    return spec[np.arange(-N, N + 1) % M]


def multiplier_test_functions(A: Multiplier, seed: int = 0, n_random: int = 8) -> dict[str, np.ndarray]:
    """Named test polynomials (coefficient vectors) for the norm lower bound."""
    N = A.N
    k = np.arange(-N, N + 1)
    funcs: dict[str, np.ndarray] = {}
    cos_c = np.zeros(2 * N + 1, dtype=complex)
    cos_c[0] = cos_c[-1] = 0.5
    funcs["cos"] = cos_c
    sin_c = np.zeros(2 * N + 1, dtype=complex)
    sin_c[-1], sin_c[0] = -0.5j, 0.5j
    funcs["sin"] = sin_c
    rng = np.random.default_rng(seed)
    for r in range(n_random):
        funcs[f"random{r}"] = np.exp(2j * math.pi * rng.random(2 * N + 1))
    M = 16 * (4 * N + 1)
    fejer = 1 - np.abs(k) / (N + 1)
    vp = np.clip(2 - 2 * np.abs(k) / max(N, 1), 0, 1)
    for name, kernel in (("dirichlet", A.values), ("vp", vallee_poussin_extension(A.values))):
        pat = _sign_pattern_coeffs(kernel, N, M)
        funcs[f"sign_{name}_truncated"] = pat
        funcs[f"sign_{name}_fejer"] = pat * fejer
        funcs[f"sign_{name}_vp"] = pat * vp
    return funcs


def multiplier_norm_bracket(A: Multiplier, seed: int = 0, details: dict | None = None) -> Bracket:
    """Bracket for the sup-norm operator norm of a multiplier.

    Lower: the largest |m_k| (exponentials are eigenfunctions) and the ratio
    ||Tf|| / ||f|| over a family of test polynomials, numerator on a grid of
    32N points (never above the true sup), denominator refined to the true
    sup.  Upper: L^1 norm of a de la Vallee-Poussin kernel reproducing m on
    |k| <= N (Riemann sum inflated by its Bernstein error bound), and the
    total variation of the translation atoms when they are known.
    """
    N = A.N
    m = A.values
    lower = float(np.abs(m).max())
    best_name = "character"
    if N >= 1:
        M = 32 * N
        for name, f in multiplier_test_functions(A, seed=seed).items():
            den = trig_sup(f, M)
            if den == 0:
                continue
            num = float(np.abs(trig_grid(m * f, M)).max())
            if num / den > lower:
                lower, best_name = num / den, name
    kernel = vallee_poussin_extension(m) if N >= 1 else m
    D = 2 * N
    Mu = max(512 * max(N, 1), 64)
    riemann = float(np.abs(trig_grid(kernel, Mu)).mean())
    upper = riemann / (1 - 2 * math.pi * D / Mu)
    if A.translations is not None:
        upper = min(upper, float(sum(abs(w) for _, w in A.translations)))
    upper = max(upper, lower)
    if details is not None:
        details["best_test_function"] = best_name
    return Bracket(lower, upper)


# --------------------------------------------------------------------------
# spectral radius


def gelfand_estimate(A: np.ndarray, power: int = GELFAND_POWER, kind: str = "l2") -> float:
    """||A^power||^(1/power) by repeated squaring with rescaling."""
    if power & (power - 1):
        raise ValueError("power must be a power of two")
    B = np.asarray(A, dtype=complex)
    log_scale = 0.0
    k = 1
    while True:
        nb = matrix_norm(B, kind)
        if nb == 0:
            return 0.0
        if k == power:
            return math.exp((log_scale + math.log(nb)) / power)
        B = B / nb
        log_scale += math.log(nb)
        B = B @ B
        log_scale *= 2
        k *= 2


def spectral_radius(A: AlgebraElement) -> float:
    if isinstance(A, DiagLp):
        return float(np.abs(A.diag).max()) if A.dim else 0.0
    if isinstance(A, Multiplier):
        return float(np.abs(A.values).max())
    if isinstance(A, SelfAdjointL2):
        return float(np.abs(np.linalg.eigvalsh(A.matrix)).max())
    if isinstance(A, General):
        eig = float(np.abs(np.linalg.eigvals(A.matrix)).max())
        gel = gelfand_estimate(A.matrix, kind=A.norm_kind)
        scale = max(eig, gel)
        if scale > 1e-12 * max(1.0, matrix_norm(A.matrix, A.norm_kind)) and abs(eig - gel) > GELFAND_REL_TOL * scale:
            raise Inconclusive(f"eigenvalue radius {eig:.6g} and Gelfand estimate {gel:.6g} disagree")
        return eig
    raise TypeError(f"not an algebra element: {A!r}")


def spectrum(A: AlgebraElement) -> np.ndarray:
    if isinstance(A, DiagLp):
        return np.asarray(A.diag, dtype=complex)
    if isinstance(A, Multiplier):
        return A.values.copy()
    if isinstance(A, SelfAdjointL2):
        return np.linalg.eigvalsh(A.matrix).astype(complex)
    return np.linalg.eigvals(A.matrix)


# --------------------------------------------------------------------------
# Hermitian elements


def default_t_grid(seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.concatenate([np.linspace(-10.0, 10.0, 201), rng.uniform(-100.0, 100.0, 20)])


def exp_element(A: AlgebraElement, t: float) -> AlgebraElement:
    """exp(i t A) as an element of the same algebra."""
    if isinstance(A, DiagLp):
        return DiagLp(A.p, np.exp(1j * t * A.diag))
    if isinstance(A, Multiplier):
        form = A.affine_form()
        trans = None if form is None else ((t * form[0], complex(np.exp(1j * t * form[1]))),)
        return Multiplier(A.N, np.exp(1j * t * A.values), translations=trans)
    if isinstance(A, SelfAdjointL2):
        return General(matrix_exp(A.matrix, t), "l2")
    if isinstance(A, General):
        return General(matrix_exp(A.matrix, t), A.norm_kind)
    raise TypeError(f"not an algebra element: {A!r}")


def hermitian_deviation(A: AlgebraElement, t: float) -> float:
    """| ||exp(itA)|| - 1 |; for brackets, the distance of the bracket from 1."""
    norm = op_norm(exp_element(A, t))
    if isinstance(norm, Bracket):
        return max(norm.lower - 1.0, 1.0 - norm.upper, 0.0)
    return abs(norm - 1.0)


def hermitian_check(A: AlgebraElement, t_grid=None, tol: float = HERM_TOL) -> tuple[bool, float]:
    """Sampled test of ||exp(itA)|| = 1 for all real t.

    Multipliers of the form s*k + b are (rotated) translations of the circle, isometries of
    the sup norm, and pass with deviation 0 without sampling.  Other
    multipliers pass only if their norm bracket pins the norm to 1.
    """
    if isinstance(A, Multiplier):
        if A.affine_form() is not None:
            return True, 0.0
        if np.any(np.abs(A.values.imag) > 0):
            return False, math.inf
    if t_grid is None:
        t_grid = default_t_grid()
    if isinstance(A, Multiplier):
        worst = 0.0
        for t in t_grid:
            norm = op_norm(exp_element(A, t))
            worst = max(worst, abs(norm.lower - 1.0), abs(norm.upper - 1.0))
        return worst <= tol, worst
    worst = max(hermitian_deviation(A, float(t)) for t in t_grid)
    return worst <= tol, worst


def multiplier_apply(F: SymbolExpr, N: int, s: float) -> Multiplier:
    """F(s D_N): the multiplier with values F(s k), k = -N..N."""
    if N < 1 or s <= 0:
        raise ValueError("need N >= 1 and s > 0")
    k = np.arange(-N, N + 1)
    values = evaluate(F, s * k)
    atoms = exponential_atoms(F)
    trans = None if atoms is None else tuple((a * s, c) for c, a in atoms)
    return Multiplier(N, values, translations=trans)


# --------------------------------------------------------------------------
# JSON


def _cplx_rows(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def _from_rows(d: dict) -> np.ndarray:
    return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)


def element_to_json(A: AlgebraElement) -> dict:
    if isinstance(A, DiagLp):
        return {"kind": "DiagLp", "p": _p_tag(A.p), "dim": A.dim, "diag": _cplx_rows(A.diag)}
    if isinstance(A, SelfAdjointL2):
        return {"kind": "SelfAdjointL2", "dim": A.dim, "matrix": _cplx_rows(A.matrix)}
    if isinstance(A, Multiplier):
        out = {"kind": "Multiplier", "N": A.N, "dim": A.dim, "values": _cplx_rows(A.values)}
        if A.translations is not None:
            out["translations"] = [[t, w.real, w.imag] for t, w in A.translations]
        return out
    if isinstance(A, General):
        return {"kind": "General", "norm_kind": A.norm_kind, "dim": A.dim, "matrix": _cplx_rows(A.matrix)}
    raise TypeError(f"not an algebra element: {A!r}")


def element_from_json(d: dict) -> AlgebraElement:
    kind = d["kind"]
    if kind == "DiagLp":
        diag = _from_rows(d["diag"])
        if not np.any(diag.imag):
            diag = diag.real
        return DiagLp(d["p"], diag)
    if kind == "SelfAdjointL2":
        return SelfAdjointL2(_from_rows(d["matrix"]))
    if kind == "Multiplier":
        trans = d.get("translations")
        if trans is not None:
            trans = tuple((t, complex(re, im)) for t, re, im in trans)
        return Multiplier(int(d["N"]), _from_rows(d["values"]), translations=trans)
    if kind == "General":
        return General(_from_rows(d["matrix"]), d.get("norm_kind", "l2"))
    raise ValueError(f"unknown element kind {kind!r}")
