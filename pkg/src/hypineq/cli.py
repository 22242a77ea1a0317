"""Command line front end: constants, verify, sweep.

Exit codes: 0 success (verify: every report passed), 1 at least one failed
report, 2 usage or configuration error.  With --no-timestamp the output is
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

from .constants import (
    LorentzIndex,
    frac_sobolev_constant,
    mt_exponent,
    poincare_constant,
    poincare_sobolev_constant,
    sobolev_constant_rn,
    sphere_area,
    unit_ball_volume,
)
from .geometry import surface_ratio_volume
from .verifiers import (
    BATTERY_SUITES,
    SweepResult,
    mt_lambda_sweep,
    run_battery,
    sharpness_sweep_poincare,
)

_SWEEP_KINDS = ("poincare-sharpness", "mt-lambda")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like min:max:count, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    count = int(parts[2])
    if count < 1:
        raise ValueError("grid count must be at least 1")
    if count == 1:
        return [lo]
    if hi <= lo:
        raise ValueError("grid needs max > min")
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _read_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line is not key=value: {raw.strip()!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


_CONFIG_TYPES = {
    "suite": str,
    "kind": str,
    "n": int,
    "p": float,
    "q": float,
    "l": float,
    "lambda": float,
    "seed": int,
    "threads": int,
    "rel_tol": float,
    "eps": float,
    "lnRa": str,
    "format": str,
    "output": str,
}


def _merge_config(args: argparse.Namespace) -> None:
    """Fill unset (None) options from --config; explicit flags win."""
    if not getattr(args, "config", None):
        return
    try:
        raw = _read_config(args.config)
    except OSError as exc:
        raise ValueError(f"cannot read config file: {exc}") from exc
    alias = {"lambda": "lam", "lnRa": "lnra"}
    for key, text in raw.items():
        if key not in _CONFIG_TYPES:
            raise ValueError(f"unknown config key {key!r}")
        dest = alias.get(key, key)
        if getattr(args, dest, None) is None:
            setattr(args, dest, _CONFIG_TYPES[key](text))


def _thread_count(requested: int | None) -> int | None:
    cap_text = os.environ.get("INEQ_VERIFY_THREADS")
    cap = None
    if cap_text:
        try:
            cap = max(1, int(cap_text))
        except ValueError:
            raise ValueError(f"INEQ_VERIFY_THREADS must be an integer, got {cap_text!r}")
    if requested is None:
        return cap if cap is not None and cap > 1 else None
    return min(requested, cap) if cap is not None else requested


def _emit(
    payload: dict,
    csv_text: str,
    output: str | None,
    fmt: str,
) -> None:
    text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if output:
        if fmt in ("json", "both"):
            with open(output + ".json", "w", encoding="utf-8") as fh:
                fh.write(text)
        if fmt in ("csv", "both"):
            with open(output + ".csv", "w", encoding="utf-8") as fh:
                fh.write(csv_text)
    if fmt == "csv":
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_constants(args: argparse.Namespace) -> int:
    n = args.n
    rows: list[tuple[str, float]] = []
    rows.append(("unit_ball_volume", unit_ball_volume(n)))
    rows.append(("sphere_area", sphere_area(n)))
    if args.p is not None and args.q is not None:
        idx = LorentzIndex(args.p, args.q)
        rows.append(("poincare_constant", poincare_constant(n, idx.p, idx.q)))
    if args.q is not None:
        rows.append(("mt_exponent", mt_exponent(n, args.q)))
        rows.append(("mt_threshold", ((n - 1.0) / n) ** args.q))
    if args.p is not None and args.p < n:
        rows.append(("sobolev_constant_rn", sobolev_constant_rn(n, args.p)))
    if args.l is not None:
        if args.p is None or args.q is None:
            raise ValueError("--l needs --p and --q")
        rows.append(
            ("poincare_sobolev_constant", poincare_sobolev_constant(n, args.p, args.q, args.l))
        )
    if args.beta is not None:
        if args.q is None:
            raise ValueError("--beta needs --q")
        rows.append(("frac_sobolev_constant", frac_sobolev_constant(args.beta, args.q)))
    if args.json:
        sys.stdout.write(json.dumps({k: v for k, v in rows}, indent=2) + "\n")
    else:
        for key, val in rows:
            sys.stdout.write(f"{key} = {_fmt(val)}\n")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    _merge_config(args)
    if args.suite is None:
        raise ValueError("--suite is required (via flag or config file)")
    if args.suite not in BATTERY_SUITES:
        raise ValueError(f"unknown suite {args.suite!r}; choose from {', '.join(BATTERY_SUITES)}")
    n = args.n if args.n is not None else 4
    p = args.p if args.p is not None else 3.5
    q = args.q if args.q is not None else 3.0
    seed = args.seed if args.seed is not None else 20240801
    reports = run_battery(
        args.suite,
        n=n,
        p=p,
        q=q,
        l=args.l,
        lam=args.lam,
        seed=seed,
        threads=_thread_count(args.threads),
        rel_tol=args.rel_tol,
    )
    all_pass = all(r.passed for r in reports)
    payload: dict = {"suite": args.suite, "n": n, "p": p, "q": q, "seed": seed}
    if not args.no_timestamp:
        payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    payload["reports"] = [r.to_dict() for r in reports]
    payload["all_pass"] = all_pass

    lines = ["name,lhs,rhs,margin,error_estimate,tolerance,pass"]
    for r in reports:
        lines.append(
            ",".join(
                [
                    r.name,
                    _fmt(r.lhs),
                    _fmt(r.rhs),
                    _fmt(r.margin),
                    _fmt(r.error_estimate),
                    _fmt(r.tolerance),
                    "1" if r.passed else "0",
                ]
            )
        )
    _emit(payload, "\n".join(lines) + "\n", args.output, args.format)
    return 0 if all_pass else 1


def _sweep_csv(sweep: SweepResult) -> str:
    lines = ["abscissa,value,target"]
    for x, v, tgt in sweep.rows():
        lines.append(f"{_fmt(x)},{_fmt(v)},{_fmt(tgt)}")
    return "\n".join(lines) + "\n"


def cmd_sweep(args: argparse.Namespace) -> int:
    _merge_config(args)
    if args.kind is None:
        raise ValueError("--kind is required (via flag or config file)")
    if args.kind not in _SWEEP_KINDS:
        raise ValueError(f"unknown sweep kind {args.kind!r}; choose from {', '.join(_SWEEP_KINDS)}")
    n = args.n if args.n is not None else 4
    q = args.q if args.q is not None else 3.0
    if args.kind == "poincare-sharpness":
        if args.lnra is None:
            raise ValueError("poincare-sharpness needs --lnRa min:max:count")
        p = args.p if args.p is not None else 3.5
        grid = _parse_grid(args.lnra)
        eps = args.eps if args.eps is not None else 1e-3
        a = surface_ratio_volume(n, eps)
        sweep = sharpness_sweep_poincare(n, LorentzIndex(p, q), a, grid)
        payload: dict = {"kind": args.kind, "n": n, "p": p, "q": q, "eps": eps, "a": a}
    else:
        if args.lam_grid is None:
            raise ValueError("mt-lambda needs --lambda min:max:count")
        grid = _parse_grid(args.lam_grid)
        sweep = mt_lambda_sweep(n, q, grid)
        payload = {"kind": args.kind, "n": n, "q": q}
    if not args.no_timestamp:
        payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    payload["abscissae"] = list(sweep.abscissae)
    payload["values"] = list(sweep.ratios)
    payload["target"] = sweep.target
    _emit(payload, _sweep_csv(sweep), args.output, args.format)
    return 0


# ---------------------------------------------------------------------------


def _add_output_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value file; explicit flags override")
    sub.add_argument("--output", help="write <prefix>.json / <prefix>.csv")
    sub.add_argument("--format", choices=("json", "csv", "both"), default="json")
    sub.add_argument("--no-timestamp", action="store_true", help="deterministic output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypineq",
        description="numerical checks of sharp Lorentz-Sobolev inequalities on hyperbolic space",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    c = subs.add_parser("constants", help="print the sharp constants for given parameters")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--p", type=float)
    c.add_argument("--q", type=float)
    c.add_argument("--l", type=float)
    c.add_argument("--beta", type=float)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_constants)

    v = subs.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite")
    v.add_argument("--n", type=int)
    v.add_argument("--p", type=float)
    v.add_argument("--q", type=float)
    v.add_argument("--l", type=float)
    v.add_argument("--lambda", dest="lam", type=float)
    v.add_argument("--seed", type=int)
    v.add_argument("--threads", type=int)
    v.add_argument("--rel-tol", dest="rel_tol", type=float)
    _add_output_options(v)
    v.set_defaults(func=cmd_verify)

    s = subs.add_parser("sweep", help="tabulate a sharpness or envelope sweep")
    s.add_argument("--kind")
    s.add_argument("--n", type=int)
    s.add_argument("--p", type=float)
    s.add_argument("--q", type=float)
    s.add_argument("--lnRa", dest="lnra", help="grid min:max:count")
    s.add_argument("--lambda", dest="lam_grid", help="grid min:max:count")
    s.add_argument("--eps", type=float, help="surface-ratio slack picking the head volume")
    _add_output_options(s)
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
