"""Verdict orchestration, the quadratic threshold, equality experiments, reports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebras import (
    AlgebraElement,
    Bracket,
    DiagLp,
    Multiplier,
    SelfAdjointL2,
    element_from_json,
    element_to_json,
    generator,
    hermitian_check,
    multiplier_apply,
    multiplier_norm_bracket,
    op_norm,
    random_self_adjoint,
    spectral_radius,
)
from .calculus import apply_symbol
from .errors import Inconclusive
from .pd_engine import CERT_TOL, DEFAULT_SCHEDULE, PdVerdict, pd_interval_verdict
from .shape import ShapeVerdict, shape_verdict
from .symbols import SymbolExpr, to_json, to_text

SCHEMA = "usym.report.v1"
EQ_TOL = 1e-7
EXIT_CODES = {"accept_up_to": 0, "reject": 2, "inconclusive": 3}


# --------------------------------------------------------------------------
# the threshold for -x^2 + 2ix + t


@dataclass
class ThresholdResult:
    lambda0: float
    t0: float
    iterations: int
    residual: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _threshold_equation(lam: float) -> float:
    return 1.0 - lam / math.tan(lam) - lam * lam


def quadratic_threshold(lo: float = 0.1, hi: float = math.pi - 1e-6) -> ThresholdResult:
    """Root of 1 - lam*cot(lam) = lam^2 in (0, pi) by bisection, and t0 = (2 lam^2 - 1)/lam^2.

    g(lam) = 1 - lam cot lam - lam^2 behaves like -2 lam^2 / 3 near 0 and
    tends to +inf as lam -> pi, so [0.1, pi) brackets a sign change.
    """
    g_lo, g_hi = _threshold_equation(lo), _threshold_equation(hi)
    if not (g_lo < 0 < g_hi):
        raise RuntimeError(f"no sign change on [{lo}, {hi}]: g = {g_lo}, {g_hi}")
    iterations = 0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        iterations += 1
        g_mid = _threshold_equation(mid)
        if g_mid == 0:
            lo = hi = mid
            break
        if g_mid < 0:
            lo = mid
        else:
            hi = mid
    lam = lo if abs(_threshold_equation(lo)) <= abs(_threshold_equation(hi)) else hi
    return ThresholdResult(lam, (2 * lam * lam - 1) / (lam * lam), iterations, abs(_threshold_equation(lam)))


# --------------------------------------------------------------------------
# equality experiments


@dataclass
class EqualityReport:
    symbol_id: str
    element_id: str
    norm: float | list | None
    rho: float | None
    gap: float | None
    tol: float
    passed: bool
    status: str = "ok"  # ok | inconclusive | not_hermitian
    note: str = ""

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SuiteElement:
    element_id: str
    element: AlgebraElement


def default_suite(seed: int = 42) -> list[SuiteElement]:
    """A few seeded Hermitian elements of every kind."""
    rng = np.random.default_rng(seed)
    suite = [
        SuiteElement("diag_l1", DiagLp(1, rng.uniform(-2, 2, 5))),
        SuiteElement("diag_l2", DiagLp(2, rng.uniform(-2, 2, 5))),
        SuiteElement("diag_linf", DiagLp(math.inf, rng.uniform(-2, 2, 5))),
        SuiteElement("selfadjoint_4", random_self_adjoint(4, rng)),
        SuiteElement("selfadjoint_6", random_self_adjoint(6, rng, spectrum=rng.uniform(-2, 2, 6))),
        SuiteElement("D_8", generator(8)),
        SuiteElement("D_4_scaled_0.5", generator(4, 0.5)),
    ]
    return suite


def load_suite(path: str | Path) -> list[SuiteElement]:
    data = json.loads(Path(path).read_text())
    items = data["elements"] if isinstance(data, dict) else data
    return [SuiteElement(d.get("id", f"element_{i}"), element_from_json(d)) for i, d in enumerate(items)]


def dump_suite(suite: list[SuiteElement]) -> str:
    return json.dumps({"elements": [dict(element_to_json(s.element), id=s.element_id) for s in suite]}, sort_keys=True)


def equality_report(symbol_id: str, element_id: str, FA: AlgebraElement, eq_tol: float = EQ_TOL,
                    seed: int = 0) -> EqualityReport:
    """Compare ||F(a)|| with the spectral radius of F(a).

    For brackets only the lower end is compared; it fails only when the
    lower bound exceeds the spectral radius, which is a genuine violation.
    """
    try:
        rho = spectral_radius(FA)
        norm = op_norm(FA, seed=seed)
    except Inconclusive as exc:
        return EqualityReport(symbol_id, element_id, None, None, None, eq_tol, False, "inconclusive", str(exc))
    if isinstance(norm, Bracket):
        gap = norm.lower - rho
        return EqualityReport(symbol_id, element_id, [norm.lower, norm.upper], rho, gap, eq_tol, gap <= eq_tol)
    gap = norm - rho
    return EqualityReport(symbol_id, element_id, norm, rho, gap, eq_tol, abs(gap) <= eq_tol)


def verify_equality(F: SymbolExpr, suite: list[SuiteElement], eq_tol: float = EQ_TOL, seed: int = 0,
                    symbol_id: str | None = None, check_hermitian: bool = True) -> list[EqualityReport]:
    """One report per suite element: apply F, then compare norm and spectral radius."""
    symbol_id = symbol_id or to_text(F)
    reports = []
    for item in suite:
        if check_hermitian:
            ok, dev = hermitian_check(item.element)
            if not ok:
                reports.append(EqualityReport(symbol_id, item.element_id, None, None, None, eq_tol, False,
                                              "not_hermitian", f"deviation {dev:.3g}"))
                continue
        FA = apply_symbol(F, item.element)
        reports.append(equality_report(symbol_id, item.element_id, FA, eq_tol, seed))
    return reports


def _equality_outcome(reports: list[EqualityReport]) -> str:
    if any(r.status == "ok" and not r.passed for r in reports):
        return "reject"
    if any(r.status != "ok" for r in reports):
        return "inconclusive"
    return "accept_up_to"


# --------------------------------------------------------------------------
# the overall verdict


@dataclass
class Config:
    schedule: tuple = DEFAULT_SCHEDULE
    suite: list | None = None
    seed: int = 42
    cert_tol: float = CERT_TOL
    eq_tol: float = EQ_TOL
    fail_fast: bool = False

    def resolved_suite(self) -> list[SuiteElement]:
        return self.suite if self.suite is not None else default_suite(self.seed)


@dataclass
class UniversalityVerdict:
    symbol: str
    outcome: str
    reject_tracks: list[str]
    shape: ShapeVerdict | None
    pd: PdVerdict | None
    equality: list[EqualityReport] = field(default_factory=list)
    equality_outcome: str | None = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.outcome]

    @property
    def certificate(self):
        return None if self.pd is None else self.pd.certificate

    def to_json(self) -> dict:
        out = {
            "schema": SCHEMA,
            "type": "verdict",
            "symbol": self.symbol,
            "outcome": self.outcome,
            "reject_tracks": self.reject_tracks,
            "shape": None if self.shape is None else self.shape.to_json(),
            "pd": None if self.pd is None else self.pd.to_json(),
            "equality_outcome": self.equality_outcome,
            "equality": [r.to_json() for r in self.equality],
        }
        if self.pd is not None and self.pd.outcome == "accept_up_to":
            out["W_max"], out["n_max"] = self.pd.W_max, self.pd.n_max
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def run_universality(F: SymbolExpr, config: Config | None = None, symbol_id: str | None = None) -> UniversalityVerdict:
    """Shape, positive-definite extension and equality tracks, all reported.

    Any rejecting track rejects overall; otherwise any inconclusive track
    makes the verdict inconclusive; otherwise accept up to the largest
    scheduled window.
    """
    config = config or Config()
    symbol_id = symbol_id or to_text(F)
    schedule = [(float(W), int(n)) for W, n in config.schedule]
    verdict = UniversalityVerdict(symbol_id, "accept_up_to", [], None, None)

    sv = shape_verdict(F, [(W, max(8 * n + 1, 1025)) for W, n in schedule])
    verdict.shape = sv
    if sv.rejects:
        verdict.reject_tracks.append("shape")
    if not (config.fail_fast and verdict.reject_tracks):
        pd = pd_interval_verdict(F, schedule, cert_tol=config.cert_tol, run_shape=False)
        pd.shape = None
        verdict.pd = pd
        if pd.outcome == "reject":
            verdict.reject_tracks.append("pd" if pd.stage == "gram" else "shape")
    if not (config.fail_fast and verdict.reject_tracks):
        verdict.equality = verify_equality(F, config.resolved_suite(), config.eq_tol, config.seed, symbol_id)
        verdict.equality_outcome = _equality_outcome(verdict.equality)
        if verdict.equality_outcome == "reject":
            verdict.reject_tracks.append("equality")
    verdict.reject_tracks = sorted(set(verdict.reject_tracks), key=["shape", "pd", "equality"].index)
    if verdict.reject_tracks:
        verdict.outcome = "reject"
    elif (verdict.pd is not None and verdict.pd.outcome == "inconclusive") or verdict.equality_outcome == "inconclusive":
        verdict.outcome = "inconclusive"
    return verdict


# --------------------------------------------------------------------------
# witness scan


@dataclass
class WitnessResult:
    symbol: str
    N: int
    best_margin: float
    s_star: float
    rows: list[dict]
    reports: list[EqualityReport]

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "type": "witness", "symbol": self.symbol, "N": self.N,
                "best_margin": self.best_margin, "s_star": self.s_star, "rows": self.rows}


def parse_scales(text: str) -> np.ndarray:
    """"a:b:step" (inclusive of b up to rounding) or a comma list."""
    if ":" in text:
        a, b, step = map(float, text.split(":"))
        count = int(math.floor((b - a) / step + 1e-9)) + 1
        return a + step * np.arange(count)
    return np.array([float(v) for v in text.split(",")])


def witness_scan(F: SymbolExpr, N: int, scales, eq_tol: float = EQ_TOL, seed: int = 0,
                 symbol_id: str | None = None) -> WitnessResult:
    """Search F(s D_N) over scales s for a norm lower bound above the spectral radius.

    margin(s) = lower bound of ||F(s D_N)|| minus its spectral radius.  A
    margin above eq_tol exhibits a Hermitian element with ||F(a)|| > |F(a)|.
    """
    if N < 4:
        raise ValueError("need N >= 4")
    symbol_id = symbol_id or to_text(F)
    rows, reports = [], []
    best, s_star = -math.inf, math.nan
    for s in scales:
        s = float(s)
        FA = multiplier_apply(F, N, s)
        info: dict = {}
        br = multiplier_norm_bracket(FA, seed=seed, details=info)
        rho = spectral_radius(FA)
        margin = br.lower - rho
        rows.append({"s": s, "lower": br.lower, "upper": br.upper, "rho": rho, "margin": margin,
                     "test_function": info["best_test_function"]})
        reports.append(EqualityReport(symbol_id, f"{s:g}*D_{N}", [br.lower, br.upper], rho, margin, eq_tol,
                                      margin <= eq_tol))
        if margin > best:
            best, s_star = margin, s
    return WitnessResult(symbol_id, N, best, s_star, rows, reports)


# --------------------------------------------------------------------------
# reports


def jsonl_lines(records) -> str:
    out = io.StringIO()
    for rec in records:
        payload = rec.to_json() if hasattr(rec, "to_json") else rec
        if "schema" not in payload:
            payload = dict(payload, schema=SCHEMA)
        out.write(json.dumps(payload, sort_keys=True) + "\n")
    return out.getvalue()


def csv_summary(verdicts: list[UniversalityVerdict]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["symbol", "outcome", "reject_tracks", "pd_outcome", "rejecting_W", "rejecting_n",
                "equality_outcome", "min_gap", "max_gap"])
    for v in verdicts:
        gaps = [r.gap for r in v.equality if r.gap is not None]
        rs = v.pd.rejecting_stage if v.pd is not None else None
        w.writerow([v.symbol, v.outcome, "+".join(v.reject_tracks), v.pd.outcome if v.pd else "",
                    rs[0] if rs else "", rs[1] if rs else "", v.equality_outcome or "",
                    repr(min(gaps)) if gaps else "", repr(max(gaps)) if gaps else ""])
    return out.getvalue()


def report_emit(records, path: str | Path, csv_path: str | Path | None = None) -> None:
    """Write JSONL (one record per line) and optionally a CSV summary of verdicts.

    Raises OSError naming the offending path.
    """
    path = Path(path)
    try:
        path.write_text(jsonl_lines(records))
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    if csv_path is not None:
        verdicts = [r for r in records if isinstance(r, UniversalityVerdict)]
        try:
            Path(csv_path).write_text(csv_summary(verdicts))
        except OSError as exc:
            raise OSError(f"cannot write summary to {csv_path}: {exc.strerror or exc}") from exc


def symbol_record(F: SymbolExpr) -> dict:
    return {"type": "symbol", "text": to_text(F), "ast": to_json(F)}
