"""Command-line front end.

Exit status is 0 on success, 1 on a domain error (bad construction
parameters, unreadable files, exceeded LP budget, contract violations in a
campaign) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .channel import TrialConfig, append_csv, parse_magnitude, run_campaign
from .code import AnalogCode, coherence_profile, decoder_thresholds, gamma_upper_bound
from .errors import AnalogEccError, BudgetExceededError, RankError
from .height import m_height_exact, m_height_sample
from .sphere import (
    ASYMPTOTIC_CONSTANT,
    MIN_RINGS,
    construct_code,
    construct_code_for_length,
    construction_delta,
    construction_gamma_bound,
    rings_for_length,
)

TABLE_HEADER = ("n", "r", "t", "gamma2_bound", "delta_threshold", "ratio", "limit", "mds_r2_gamma2")


class DomainFailure(Exception):
    """Raised inside a command to exit with status 1 and a message."""


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return value


def _load(path):
    try:
        return AnalogCode.load(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise DomainFailure(f"cannot read code file {path}: {exc}") from None


def cmd_construct(args):
    if args.t is not None:
        code = construct_code(args.t)
        t = args.t
    else:
        code = construct_code_for_length(args.n)
        t = rings_for_length(args.n)
    code.save(args.out)
    print(f"wrote {args.out}: label={code.label} n={code.n} k={code.k} r={code.r}")
    print(f"rho={code.rho!r} bound cos(pi/2t)={math.cos(math.pi / (2 * t))!r}")
    return 0


def _bounds(code: AnalogCode, m: int) -> dict:
    out = {}
    try:
        rho_m = coherence_profile(code.H, m)
        out["rho_m"] = rho_m
        out["coherence_gamma_bound"] = gamma_upper_bound(code.n, rho_m) if rho_m < 1 else "inf"
    except RankError:
        out["rho_m"] = None
        out["coherence_gamma_bound"] = "inf"
    if code.r == 3 and code.label.startswith("sphere") and m == 2 and code.n >= 20:
        out["construction_gamma_bound"] = construction_gamma_bound(code.n)
    return out


def cmd_eval(args):
    code = _load(args.code)
    try:
        if args.mode == "exact":
            report = m_height_exact(code, args.m, budget=args.budget)
        else:
            report = m_height_sample(code, args.m, args.trials, args.seed)
    except BudgetExceededError as exc:
        raise DomainFailure(f"{exc} (LP count {exc.count})") from None
    payload = report.to_dict()
    payload["bounds"] = _bounds(code, args.m)
    print(json.dumps(payload))
    return 0


def cmd_simulate(args):
    code = _load(args.code)
    bounds = code.thresholds(args.delta)
    magnitude = parse_magnitude(args.magnitude, bounds.delta_threshold)
    cfg = TrialConfig(
        code=code,
        trials=args.trials,
        seed=args.seed,
        delta=args.delta,
        magnitude=magnitude,
        amplitude=args.amplitude,
        adversarial=args.adversarial,
    )
    stats = run_campaign(cfg)
    if args.out:
        append_csv(args.out, stats)
    print(
        f"{stats.label}: trials={stats.trials} exact={stats.exact} "
        f"safe_subset={stats.safe_subset} violation_d1={stats.violation_d1} "
        f"violation_d2={stats.violation_d2} theta={bounds.theta!r} Delta={stats.Delta!r} "
        f"time={stats.wall_time:.2f}s"
    )
    return 1 if stats.violations else 0


def cmd_bound(args):
    if args.code:
        code = _load(args.code)
        n, rho = code.n, code.rho
    else:
        n = args.n
        if args.rho is not None:
            rho = args.rho
        else:
            if rings_for_length(n) < MIN_RINGS:
                raise DomainFailure(f"n = {n} is below the construction range (n >= 20)")
            rho = math.cos(math.pi / (2 * rings_for_length(n)))
    bounds = decoder_thresholds(n, rho, args.delta)
    print(json.dumps({
        "n": n,
        "rho": rho,
        "delta": args.delta,
        "gamma2_bound": bounds.gamma_bound,
        "theta": bounds.theta,
        "Delta": bounds.delta_threshold,
    }))
    return 0


def table_rows(n_list):
    rows = []
    for n in n_list:
        if n < 20:
            raise DomainFailure(f"n = {n} is below the construction range (n >= 20)")
        t = rings_for_length(n)
        bound = construction_gamma_bound(n)
        rows.append({
            "n": n,
            "r": 3,
            "t": t,
            "gamma2_bound": bound,
            "delta_threshold": construction_delta(n),
            "ratio": bound / (n * math.sqrt(n)),
            "limit": ASYMPTOTIC_CONSTANT,
            "mds_r2_gamma2": "O(n^2)",
        })
    return rows


def cmd_table(args):
    rows = table_rows(args.n_list)
    print(",".join(TABLE_HEADER))
    for row in rows:
        print(",".join(repr(row[h]) if isinstance(row[h], float) else str(row[h]) for h in TABLE_HEADER))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="analog-ecc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a ring construction code and write it as JSON")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--t", type=int, help="ring count (> 3)")
    g.add_argument("--n", type=int, help="code length (>= 20)")
    p.add_argument("--out", required=True, help="output JSON path")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("eval", help="compute an m-height of a code file")
    p.add_argument("--code", required=True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--mode", choices=("exact", "sample"), default="exact")
    p.add_argument("--trials", type=_positive_int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=_positive_int, default=10**6)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="run a decoding campaign and append a CSV row")
    p.add_argument("--code", required=True)
    p.add_argument("--trials", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=_positive_float, default=1.0)
    p.add_argument("--magnitude", default="2xDelta", help='"KxDelta", "uniform:lo:hi" or "none"')
    p.add_argument("--amplitude", type=_positive_float, default=1.0)
    p.add_argument("--adversarial", action="store_true", help="extreme-point disturbances")
    p.add_argument("--out", help="CSV file to append to")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bound", help="print decoder thresholds and the height bound")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--code")
    g.add_argument("--n", type=_positive_int)
    p.add_argument("--rho", type=float, help="coherence to use with --n")
    p.add_argument("--delta", type=_positive_float, default=1.0)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("table", help="bounds of the ring construction for several lengths")
    p.add_argument("--n-list", type=int, nargs="*", default=[])
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(line_buffering=True, encoding="utf-8")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainFailure, AnalogEccError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
