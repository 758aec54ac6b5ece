"""Positive-definite extension tests on intervals.

For a symbol F and an interval [a, b] the normalized restriction

    psi(x) = F(base + sign * x) / F(base),   0 <= x <= b - a,

is sampled on an equispaced grid, with base the endpoint where |F| is
largest (sign = -1 when that endpoint is b).  Extending by
psi(-x) = conj(psi(x)) gives a Hermitian Toeplitz Gram matrix
G[j, k] = psi((j - k) h).  A negative eigenvalue of G is a finite
violation of positive definiteness and is turned into a replayable
certificate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import Inconclusive
from .shape import ShapeVerdict, shape_verdict
from .symbols import SymbolExpr, evaluate

# Windows double with the grid so the step stays 1/16.  The two stages below
# W = 2 matter: non-universal quadratics fail there and nowhere above.
DEFAULT_SCHEDULE = ((0.5, 16), (1.0, 32), (2.0, 64), (4.0, 128), (8.0, 256), (16.0, 512))

CERT_TOL = 1e-8
TIE_RTOL = 1e-9
INTERIOR_RTOL = 1e-9
COEFF_CUTOFF = 1e-6
SAMP_TOL = 1e-9
CHAR_TOL = 1e-9


class ZeroMaximum(Exception):
    """|F| vanishes on the whole grid; extension is trivial."""


class InteriorMaximum(Exception):
    """|F| has a strict maximum inside the interval."""

    def __init__(self, x: float, value: float, endpoint_value: float):
        super().__init__(f"|F| = {value:.6g} at interior point {x:.6g} exceeds endpoint maximum {endpoint_value:.6g}")
        self.x = x
        self.value = value
        self.endpoint_value = endpoint_value


@dataclass
class ToeplitzSamples:
    alpha: float
    interval: tuple[float, float]
    h: float
    first_row: np.ndarray
    orientation: str = "left"

    @property
    def base(self) -> float:
        return self.interval[0] if self.orientation == "left" else self.interval[1]

    @property
    def sign(self) -> int:
        return 1 if self.orientation == "left" else -1

    @property
    def n(self) -> int:
        return len(self.first_row) - 1

    def psi(self, j: np.ndarray) -> np.ndarray:
        """psi(j h) for integer j of either sign."""
        j = np.asarray(j)
        vals = self.first_row[np.abs(j)]
        return np.where(j >= 0, vals, np.conj(vals))

    def gram(self) -> np.ndarray:
        # scipy's toeplitz(c) takes conj(c) as the first row: G[j,k] = psi(j-k)
        return scipy.linalg.toeplitz(self.first_row)


@dataclass
class GramCertificate:
    points: list[float]
    coeffs: list[complex]
    form_value: float
    base: float
    sign: int

    def to_json(self) -> dict:
        return {
            "points": list(self.points),
            "coeffs_re": [c.real for c in self.coeffs],
            "coeffs_im": [c.imag for c in self.coeffs],
            "form_value": self.form_value,
            "base": self.base,
            "sign": self.sign,
        }

    @classmethod
    def from_json(cls, d: dict) -> "GramCertificate":
        coeffs = [complex(a, b) for a, b in zip(d["coeffs_re"], d["coeffs_im"])]
        return cls(list(map(float, d["points"])), coeffs, float(d["form_value"]), float(d["base"]), int(d["sign"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass
class Stage:
    W: float
    n: int
    h: float
    base: float
    orientation: str
    min_eig: float | None
    method: str
    inequality_violation: float
    character_violations: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class PdVerdict:
    outcome: str  # accept_up_to | reject | inconclusive
    W_max: float | None = None
    n_max: int | None = None
    stage: str | None = None  # shape | gram, for rejections
    certificate: GramCertificate | None = None
    alternates: list[GramCertificate] = field(default_factory=list)
    reason: str = ""
    rejecting_stage: tuple[float, int, float] | None = None
    shape: ShapeVerdict | None = None
    stages: list[Stage] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"outcome": self.outcome, "reason": self.reason, "stages": [s.to_json() for s in self.stages]}
        if self.outcome == "accept_up_to":
            out.update(W_max=self.W_max, n_max=self.n_max)
        if self.outcome == "reject":
            out["stage"] = self.stage
            if self.rejecting_stage is not None:
                out["rejecting_stage"] = {"W": self.rejecting_stage[0], "n": self.rejecting_stage[1], "h": self.rejecting_stage[2]}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
            out["alternates"] = [c.to_json() for c in self.alternates]
        if self.shape is not None:
            out["shape"] = self.shape.to_json()
        return out


# --------------------------------------------------------------------------
# normalization


def normalize_at_max(F: SymbolExpr, interval: tuple[float, float], n: int, base: str | None = None) -> ToeplitzSamples:
    """Sample psi(jh), j = 0..n, h = (b - a)/n, normalized at the max endpoint.

    ``base`` forces "left" or "right"; by default the endpoint with the
    larger |F| is used, ties going to the left.  Raises ZeroMaximum when
    |F| is zero on the grid and InteriorMaximum when the grid maximum sits
    strictly inside and above both endpoints.
    """
    a, b = map(float, interval)
    if not b > a:
        raise ValueError("need b > a")
    if n < 1:
        raise ValueError("need n >= 1")
    h = (b - a) / n
    xs = a + h * np.arange(n + 1)
    xs[-1] = b
    mags = np.abs(evaluate(F, xs))
    fa, fb = mags[0], mags[-1]
    top = float(mags.max())
    if top == 0.0:
        raise ZeroMaximum()
    end = max(fa, fb)
    if top > end * (1 + INTERIOR_RTOL) + 1e-300:
        j = int(np.argmax(mags))
        raise InteriorMaximum(float(xs[j]), top, float(end))
    if base is None:
        base = "left" if fa >= fb * (1 - TIE_RTOL) else "right"
    offsets = h * np.arange(n + 1)
    if base == "left":
        vals = evaluate(F, a + offsets)
        origin = vals[0]
    elif base == "right":
        vals = evaluate(F, b - offsets)
        origin = vals[0]
    else:
        raise ValueError(f"base must be 'left' or 'right', got {base!r}")
    if origin == 0:
        raise ZeroMaximum()
    row = vals / origin
    row[0] = 1.0
    return ToeplitzSamples(a, (a, b), h, row, base)


def endpoint_tie(F: SymbolExpr, interval: tuple[float, float]) -> bool:
    fa, fb = np.abs(evaluate(F, np.array(interval, dtype=float)))
    return abs(fa - fb) <= TIE_RTOL * max(fa, fb)


# --------------------------------------------------------------------------
# eigen work


def gram_min_eig(T: ToeplitzSamples) -> tuple[float, np.ndarray]:
    """Smallest eigenpair of the Gram matrix, with a residual check."""
    if T.n < 1:
        raise ValueError("need at least two samples")
    G = T.gram()
    try:
        w, v = scipy.linalg.eigh(G, subset_by_index=[0, 0])
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise Inconclusive(f"Hermitian eigensolver failed: {exc}") from exc
    lam = float(w[0])
    vec = v[:, 0]
    gnorm = np.linalg.norm(G, 1)
    resid = np.linalg.norm(G @ vec - lam * vec)
    if resid > 1e-10 * max(gnorm, 1.0):
        raise Inconclusive(f"eigen residual {resid:.3g} exceeds 1e-10 ||G||")
    return lam, vec


def jacobi_eigh(A: np.ndarray, tol: float = 1e-14, max_sweeps: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigen-decomposition of a Hermitian matrix.

    Plain-numpy reference solver; quadratic convergence, O(n^3) per sweep,
    meant for small matrices.  Returns ascending eigenvalues and vectors.
    """
    A = np.array(A, dtype=complex)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(A), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(A) ** 2) - np.sum(np.abs(np.diag(A)) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                # remove the phase, then a real symmetric rotation
                phase = apq / abs(apq)
                app, aqq = A[p, p].real, A[q, q].real
                theta = 0.5 * math.atan2(2 * abs(apq), aqq - app)
                c, s = math.cos(theta), math.sin(theta)
                J = np.array([[c, s * phase], [-s * np.conj(phase), c]])
                # rotation acts on columns p, q: A <- J^H A J
                cols = A[:, [p, q]] @ J
                A[:, [p, q]] = cols
                rows = J.conj().T @ A[[p, q], :]
                A[[p, q], :] = rows
                V[:, [p, q]] = V[:, [p, q]] @ J
    w = np.real(np.diag(A))
    order = np.argsort(w)
    return w[order], V[:, order]


# --------------------------------------------------------------------------
# certificates


def replay_form(F: SymbolExpr, cert: GramCertificate) -> float:
    """Quadratic form sum psi(x_j - x_k) c_j conj(c_k), psi freshly evaluated."""
    x = np.asarray(cert.points, dtype=float)
    c = np.asarray(cert.coeffs, dtype=complex)
    d = np.subtract.outer(x, x)
    origin = evaluate(F, cert.base)
    vals = evaluate(F, cert.base + cert.sign * np.abs(d)) / origin
    vals = np.where(d >= 0, vals, np.conj(vals))
    form = c @ vals @ np.conj(c)
    return float(form.real)


def extract_certificate(F: SymbolExpr, T: ToeplitzSamples, eigvec: np.ndarray) -> GramCertificate:
    # v^H G v = sum_jk G_jk c_j conj(c_k) with c = conj(v)
    c = np.conj(eigvec) / np.linalg.norm(eigvec)
    keep = np.flatnonzero(np.abs(c) > COEFF_CUTOFF)
    points = [float(j * T.h) for j in keep]
    coeffs = [complex(z) for z in c[keep]]
    cert = GramCertificate(points, coeffs, 0.0, float(T.base), T.sign)
    cert.form_value = replay_form(F, cert)
    return cert


def certificate_is_valid(F: SymbolExpr, cert: GramCertificate, tol: float = CERT_TOL, rtol: float = 1e-10) -> bool:
    """Replay ``cert`` and confirm a negative form matching the stored value."""
    value = replay_form(F, cert)
    mass = sum(abs(c) ** 2 for c in cert.coeffs)
    matches = abs(value - cert.form_value) <= rtol * max(abs(cert.form_value), 1e-300)
    return value < -tol * mass and matches


# --------------------------------------------------------------------------
# cheap necessary / sufficient conditions


def necessary_inequality_check(T: ToeplitzSamples, pairs=None) -> float:
    """max |psi(x1) - psi(x2)|^2 - 2 |1 - Re psi(x1 - x2)| over grid pairs.

    A positive value contradicts positive definiteness.  Defaults to all
    pairs of nonnegative grid offsets.
    """
    if pairs is None:
        idx = np.arange(T.n + 1)
        j1, j2 = np.meshgrid(idx, idx, indexing="ij")
    else:
        pairs = np.asarray(pairs)
        j1, j2 = pairs[:, 0], pairs[:, 1]
    lhs = np.abs(T.psi(j1) - T.psi(j2)) ** 2
    rhs = 2 * np.abs(1 - np.real(T.psi(j1 - j2)))
    return float(np.max(lhs - rhs))


def character_check(T: ToeplitzSamples, tol: float = CHAR_TOL) -> list[tuple[float, float, float]]:
    """Points where |psi| = 1 must act as characters: psi(x+y) = psi(x) psi(y).

    Returns (x, y, defect) for every defect above ``tol`` with x, y, x+y in
    the sampled range [-(n h), n h].
    """
    n = T.n
    full = T.psi(np.arange(-n, n + 1))
    unit = np.flatnonzero(np.abs(full) >= 1 - tol) - n
    out = []
    for jx in unit:
        jy = np.arange(max(-n, -n - jx), min(n, n - jx) + 1)
        defect = np.abs(T.psi(jx + jy) - T.psi(jx) * T.psi(jy))
        for j, dft in zip(jy[defect > tol], defect[defect > tol]):
            out.append((float(jx * T.h), float(j * T.h), float(dft)))
    return out


def polya_certificate(T: ToeplitzSamples, tol: float = 1e-10) -> bool:
    """Real, nonnegative, nonincreasing and discretely convex samples.

    Such sequences interpolate to a convex decreasing nonnegative function
    that extends to a Polya-type positive-definite function, so the Gram
    test passes without eigen work.
    """
    r = T.first_row
    if np.any(np.abs(r.imag) > tol):
        return False
    v = r.real
    if np.any(v < -tol) or np.any(np.diff(v) > tol):
        return False
    return len(v) < 3 or bool(np.all(np.diff(v, 2) >= -tol))


# --------------------------------------------------------------------------
# the verdict


def _test_samples(F, T: ToeplitzSamples, W, n, stages, cert_tol):
    """Run one Gram test; returns a certificate on failure, else None."""
    violation = necessary_inequality_check(T)
    n_char = len(character_check(T)) if T.n <= 512 else -1
    if polya_certificate(T):
        stages.append(Stage(W, n, T.h, T.base, T.orientation, None, "polya", violation, n_char))
        return None
    lam, vec = gram_min_eig(T)
    stages.append(Stage(W, n, T.h, T.base, T.orientation, lam, "eigh", violation, n_char))
    if lam < -cert_tol * (T.n + 1):
        return extract_certificate(F, T, vec)
    return None


def pd_interval_verdict(F: SymbolExpr, schedule=DEFAULT_SCHEDULE, cert_tol: float = CERT_TOL,
                        run_shape: bool = True) -> PdVerdict:
    """Escalating positive-definite extension test on windows [-W, W].

    Shape conditions are checked first over the whole schedule.  Each stage
    (W, n) then tests the Gram matrices at steps 2W/n and 2W/(2n), from
    every tied base endpoint.  A stage rejects only if every tied base
    yields a certificate; the first rejecting stage decides.
    """
    schedule = [(float(W), int(n)) for W, n in schedule]
    if not schedule:
        raise ValueError("empty schedule")
    for (w0, n0), (w1, n1) in zip(schedule, schedule[1:]):
        if not (w1 > w0 and n1 >= n0):
            raise ValueError("schedule must increase in W and n")
    verdict = PdVerdict("accept_up_to")
    if run_shape:
        sv = shape_verdict(F, [(W, _shape_grid(n)) for W, n in schedule])
        verdict.shape = sv
        if sv.rejects:
            verdict.outcome, verdict.stage, verdict.reason = "reject", "shape", sv.reason
            return verdict
    for W, n in schedule:
        interval = (-W, W)
        for m in (n, 2 * n):
            try:
                T = normalize_at_max(F, interval, m)
            except ZeroMaximum:
                continue
            except InteriorMaximum as exc:
                verdict.outcome, verdict.stage = "reject", "shape"
                verdict.reason = f"interior maximum on [-{W}, {W}]: {exc}"
                verdict.rejecting_stage = (W, n, 2 * W / m)
                return verdict
            bases = ["left", "right"] if endpoint_tie(F, interval) else [T.orientation]
            certs = []
            for base in bases:
                Tb = T if base == T.orientation else normalize_at_max(F, interval, m, base=base)
                try:
                    cert = _test_samples(F, Tb, W, n, verdict.stages, cert_tol)
                except Inconclusive as exc:
                    verdict.outcome, verdict.reason = "inconclusive", str(exc)
                    return verdict
                certs.append(cert)
            if all(c is not None for c in certs):
                verdict.outcome, verdict.stage = "reject", "gram"
                verdict.certificate, verdict.alternates = certs[0], certs[1:]
                verdict.rejecting_stage = (W, n, 2 * W / m)
                verdict.reason = (f"Gram matrix on [-{W}, {W}] with step {2 * W / m:g} has a negative "
                                  f"quadratic form {certs[0].form_value:.6g}")
                return verdict
    verdict.W_max, verdict.n_max = schedule[-1]
    return verdict


def _shape_grid(n: int) -> int:
    return max(8 * n + 1, 1025)
