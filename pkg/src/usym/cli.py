"""Command line entry point: ``usym check|threshold|calculus|witness|verify-cert``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import harness
from .algebras import random_self_adjoint
from .calculus import holomorphic_apply, linear_symbol_apply, linear_symbol_measure, norm_bound_check, shifted, triangle_tail
from .pd_engine import DEFAULT_SCHEDULE, GramCertificate, certificate_is_valid, replay_form
from .symbols import X, SymbolError, parse_symbol

EXIT_USAGE = 1


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def read_config(path: str | Path) -> dict[str, str]:
    """Flat ``key=value`` lines; ``#`` starts a comment; keys use the flag names."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Fill options not given on the command line from --config."""
    if not getattr(args, "config", None):
        return
    defaults = {a.dest: a.default for a in parser._actions}
    for key, value in read_config(args.config).items():
        if key not in defaults or key in ("command", "config", "help"):
            raise ValueError(f"{args.config}: unknown key {key!r}")
        if getattr(args, key) != defaults[key]:
            continue  # explicit flag wins
        if isinstance(defaults[key], bool):
            value = value.lower() in ("1", "true", "yes", "on")
        elif isinstance(defaults[key], int):
            value = int(value)
        elif isinstance(defaults[key], float):
            value = float(value)
        setattr(args, key, value)


def _schedule(args) -> tuple:
    if args.window_schedule is None and args.grid_schedule is None:
        return DEFAULT_SCHEDULE
    Ws = _floats(args.window_schedule) if args.window_schedule else [W for W, _ in DEFAULT_SCHEDULE]
    ns = _ints(args.grid_schedule) if args.grid_schedule else [n for _, n in DEFAULT_SCHEDULE]
    if len(Ws) != len(ns):
        raise ValueError(f"window schedule has {len(Ws)} entries but grid schedule has {len(ns)}")
    return tuple(zip(Ws, ns))


def cmd_check(args) -> int:
    F = parse_symbol(args.expr)
    suite = harness.default_suite(args.seed) if args.suite == "default" else harness.load_suite(args.suite)
    config = harness.Config(schedule=_schedule(args), suite=suite, seed=args.seed, cert_tol=args.tol,
                            fail_fast=args.fail_fast)
    verdict = harness.run_universality(F, config)
    line = f"{verdict.symbol}: {verdict.outcome}"
    if verdict.reject_tracks:
        line += f" ({', '.join(verdict.reject_tracks)})"
        reasons = [r for r in (verdict.shape and verdict.shape.reason, verdict.pd and verdict.pd.reason) if r]
        if reasons:
            line += " - " + "; ".join(reasons)
    elif verdict.pd is not None and verdict.pd.outcome == "accept_up_to":
        line += f" W={verdict.pd.W_max:g} n={verdict.pd.n_max}"
    print(line)
    if args.out:
        harness.report_emit([verdict], args.out, args.csv)
    if args.cert_out and verdict.certificate is not None:
        _write(args.cert_out, verdict.certificate.dumps())
    return verdict.exit_code


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def cmd_threshold(args) -> int:
    start = time.perf_counter()
    res = harness.quadratic_threshold()
    elapsed = time.perf_counter() - start
    print(json.dumps(dict(res.to_json(), seconds=elapsed), sort_keys=True))
    return 0


def cmd_calculus(args) -> int:
    """F(x) = x through the triangle-wave measure versus Horner, on seeded elements."""
    rng = np.random.default_rng(args.seed)
    mu = linear_symbol_measure(args.L, args.K)
    bound = args.L * triangle_tail(args.K)
    ok = True
    for i in range(args.count):
        A = random_self_adjoint(args.dim, rng, spectrum=rng.uniform(-args.L, args.L, args.dim))
        diff = np.linalg.norm(linear_symbol_apply(A, args.L, args.K).matrix - holomorphic_apply(X, A).matrix, 2)
        slack = norm_bound_check(mu, shifted(A, args.L))
        row_ok = diff <= bound and slack >= -1e-8
        ok &= row_ok
        print(json.dumps({"element": i, "route_difference": diff, "bound": bound, "tv_slack": slack,
                          "passed": bool(row_ok)}, sort_keys=True))
    return 0 if ok else 2


def cmd_witness(args) -> int:
    F = parse_symbol(args.expr)
    res = harness.witness_scan(F, args.N, harness.parse_scales(args.scales), seed=args.seed)
    print(json.dumps({"best_margin": res.best_margin, "s_star": res.s_star, "N": res.N}, sort_keys=True))
    if args.out:
        harness.report_emit([res] + res.reports, args.out)
    return 0


def cmd_verify_cert(args) -> int:
    F = parse_symbol(args.expr)
    try:
        cert = GramCertificate.from_json(json.loads(Path(args.cert).read_text()))
    except OSError as exc:
        raise OSError(f"cannot read {args.cert}: {exc.strerror or exc}") from exc
    value = replay_form(F, cert)
    valid = certificate_is_valid(F, cert)
    print(json.dumps({"valid": bool(valid), "replayed": value.real, "stored": cert.form_value}, sort_keys=True))
    return 0 if valid else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="usym", description="Numerical evidence for universality of symbols of Hermitian elements.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="three-track universality verdict")
    c.add_argument("expr")
    c.add_argument("--window-schedule", default=None, help="comma list of half-widths W")
    c.add_argument("--grid-schedule", default=None, help="comma list of grid sizes n")
    c.add_argument("--tol", type=float, default=1e-8, help="Gram eigenvalue tolerance per (n+1)")
    c.add_argument("--suite", default="default", help="'default' or a JSON suite file")
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--out", default=None, help="JSONL report path")
    c.add_argument("--csv", default=None, help="CSV summary path")
    c.add_argument("--cert-out", default=None, help="write the rejection certificate here")
    c.add_argument("--fail-fast", action="store_true", default=False)
    c.add_argument("--config", default=None, help="key=value file mirroring the flags")
    c.set_defaults(func=cmd_check)

    t = sub.add_parser("threshold", help="root of 1 - l cot l = l^2 and the quadratic threshold")
    t.set_defaults(func=cmd_threshold)

    k = sub.add_parser("calculus", help="compare measure and polynomial routes for F(x)=x")
    k.add_argument("--dim", type=int, default=6)
    k.add_argument("--L", type=float, default=2.0)
    k.add_argument("--K", type=int, default=999)
    k.add_argument("--seed", type=int, default=42)
    k.add_argument("--count", type=int, default=10)
    k.set_defaults(func=cmd_calculus)

    w = sub.add_parser("witness", help="scan F(s D_N) for norm > spectral radius")
    w.add_argument("expr")
    w.add_argument("--N", type=int, default=64)
    w.add_argument("--scales", default="0.1:3.0:0.05")
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--out", default=None)
    w.set_defaults(func=cmd_witness)

    v = sub.add_parser("verify-cert", help="replay a stored Gram certificate")
    v.add_argument("cert")
    v.add_argument("expr")
    v.set_defaults(func=cmd_verify_cert)
    return p


def _protect_negative_exprs(argv: list[str]) -> list[str]:
    # "-x^2+1" is an expression, not an option; a leading space keeps argparse from treating it as one
    return [" " + a if a.startswith("-") and not a.startswith("--") and a not in ("-h",) else a for a in argv]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_protect_negative_exprs(sys.argv[1:] if argv is None else list(argv)))
    try:
        if args.command == "check":
            _apply_config(args, parser._subparsers._group_actions[0].choices["check"])
        return args.func(args)
    except SymbolError as exc:
        print(f"usym: parse error: {exc}", file=sys.stderr)
    except (OSError, ValueError, KeyError) as exc:
        print(f"usym: error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
