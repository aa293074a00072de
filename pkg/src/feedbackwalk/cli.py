"""Command-line front end: ``feedbackwalk <subcommand> [flags]``.

Exit codes: 0 success, 1 failed check, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional, Sequence

from . import analytic as an
from . import montecarlo as mc
from . import validation
from .environment import Constant, EnvironmentSpec, Params, Periodic, Q, SiteConfig
from .errors import FeedbackWalkError
from .walk import FAR, run_until

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument parsing


def _pattern(text: str):
    """``q0`` is a constant tail; ``p0,p1,q0`` a periodic one."""
    try:
        cfgs = tuple(SiteConfig.from_token(t.strip()) for t in text.split(","))
    except FeedbackWalkError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return Constant(cfgs[0]) if len(cfgs) == 1 else Periodic(cfgs)


def _override(text: str) -> tuple[int, SiteConfig]:
    try:
        x, tok = text.split("=")
        return int(x), SiteConfig.from_token(tok.strip())
    except (ValueError, FeedbackWalkError):
        raise argparse.ArgumentTypeError(f"expected x=token, got {text!r}") from None


def _common(sub: argparse.ArgumentParser, default_format: str) -> None:
    sub.add_argument("--format", choices=("csv", "json"), default=default_format)
    sub.add_argument("--output", help="write here instead of stdout")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--threads", type=int, default=1)


def _params_flags(sub: argparse.ArgumentParser, required: bool = True) -> None:
    sub.add_argument("--p", type=float, required=required)
    sub.add_argument("--q", type=float, required=True)
    sub.add_argument("--R", type=int, default=1)
    sub.add_argument("--L", type=int, default=1)


def _env_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--right-tail", type=_pattern, default=Constant(Q(0)))
    sub.add_argument("--left-tail", type=_pattern, default=Constant(Q(0)))
    sub.add_argument("--override", type=_override, action="append", default=[])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="feedbackwalk", description="Random walk with site feedback.")
    subs = ap.add_subparsers(dest="command", required=True)

    s = subs.add_parser("alpha-scan", help="alpha(p) on a grid, as p,alpha rows")
    _common(s, "csv")
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--R", type=int, required=True)
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--p-min", type=float, default=0.001)
    s.add_argument("--p-max", type=float, default=0.999)
    s.add_argument("--steps", type=int, default=1000)

    s = subs.add_parser("classify", help="transience/recurrence verdict")
    _common(s, "json")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--critical-L1", action="store_true", help="L=1, p at the critical point")
    mode.add_argument("--RL2", action="store_true", help="R=L=2, p=1-q")
    mode.add_argument("--RL1", action="store_true", help="R=L=1, p=1-q")
    _params_flags(s, required=False)
    _env_flags(s)

    s = subs.add_parser("speed", help="closed-form ballistic speed")
    _common(s, "json")
    _params_flags(s)
    _env_flags(s)

    s = subs.add_parser("simulate", help="one run of the walk")
    _common(s, "csv")
    _params_flags(s)
    _env_flags(s)
    s.add_argument("--start", type=int, default=0)
    s.add_argument("--right-barrier", type=int, default=FAR)
    s.add_argument("--left-barrier", type=int, default=-FAR)
    s.add_argument("--max-steps", type=int, default=100_000)
    s.add_argument("--engine", choices=("direct", "coupled"), default="direct")
    s.add_argument("--record", choices=("trajectory", "counters", "summary"), default="trajectory")

    s = subs.add_parser("mc", help="Monte Carlo estimators")
    _common(s, "csv")
    _params_flags(s)
    _env_flags(s)
    s.add_argument("--estimator", choices=("speed", "direction", "E_Nx", "Z_survival", "escape"), default="speed")
    s.add_argument("--reps", type=int, default=100)
    s.add_argument("--n-steps", type=int, default=10**6)
    s.add_argument("--barrier", type=int, default=1000)
    s.add_argument("--max-steps", type=int, default=10**7)
    s.add_argument("--site", type=int, default=5)
    s.add_argument("--horizon", type=int, default=1000)
    s.add_argument("--engine", choices=("direct", "coupled"), default="direct")

    s = subs.add_parser("validate", help="run the acceptance checks")
    _common(s, "json")
    s.add_argument("--level", choices=("quick", "full"), default="quick")
    return ap


def _spec(args) -> EnvironmentSpec:
    overrides = dict(args.override)
    if overrides:
        return EnvironmentSpec.with_overrides(args.left_tail, args.right_tail, overrides)
    return EnvironmentSpec(args.left_tail, args.right_tail)


def _params(args) -> Params:
    if args.p is None:
        raise UsageError("--p is required unless a critical shorthand is given")
    return Params(args.p, args.q, args.R, args.L)


# ---------------------------------------------------------------------------
# output


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([json.dumps(v) if isinstance(v, (list, dict)) else v for v in row])
    return buf.getvalue()


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"


def _record(args, doc: dict) -> str:
    """A flat record as one-row CSV or as JSON."""
    if args.format == "json":
        return _json(doc)
    return _csv(list(doc), [list(doc.values())])


# ---------------------------------------------------------------------------
# subcommands


def cmd_alpha_scan(args) -> tuple[str, int]:
    if not 0.0 < args.p_min < args.p_max < 1.0:
        raise UsageError("need 0 < p-min < p-max < 1")
    if args.steps < 2:
        raise UsageError("need steps >= 2")
    Params(0.5, args.q, args.R, args.L)
    if args.format == "csv":
        return validation.alpha_scan_csv(args.q, args.R, args.L, args.p_min, args.p_max, args.steps), EXIT_OK
    ps, al = validation.alpha_scan(args.q, args.R, args.L, args.p_min, args.p_max, args.steps)
    doc = {"q": args.q, "R": args.R, "L": args.L, "p": ps.tolist(), "alpha": al.tolist()}
    return _json(doc), EXIT_OK


def cmd_classify(args) -> tuple[str, int]:
    if args.critical_L1:
        params = Params(an.critical_p0(args.q, args.R, 1), args.q, args.R, 1)
    elif args.RL2:
        params = Params(1.0 - args.q, args.q, 2, 2)
    elif args.RL1:
        params = Params(1.0 - args.q, args.q, 1, 1)
    else:
        params = _params(args)
    spec = _spec(args)
    spec.validate(params)
    c = an.classify(spec, params)
    doc = {"params": params.as_dict(), "spec": spec.to_dict(), **c.to_dict()}
    if args.format == "json":
        return _json(doc), EXIT_OK
    pr = params.as_dict()
    row = [c.verdict.value, c.rule, pr["p"], pr["q"], pr["R"], pr["L"], c.certificates]
    return _csv(["verdict", "rule", "p", "q", "R", "L", "certificates"], [row]), EXIT_OK


def cmd_speed(args) -> tuple[str, int]:
    params, spec = _params(args), _spec(args)
    spec.validate(params)
    signed, res = an.ballistic_speed(spec, params)
    doc = {**params.as_dict(), "alpha": an.alpha(params), **res.to_dict(), "speed": signed}
    return _record(args, doc), EXIT_OK


def cmd_simulate(args) -> tuple[str, int]:
    params, spec = _params(args), _spec(args)
    out = run_until(
        spec, params, args.start, args.right_barrier, args.left_barrier, args.max_steps, args.seed,
        engine=args.engine, record_trajectory=args.record == "trajectory",
    )
    summary = {**params.as_dict(), **out.summary(), "engine": args.engine}
    if args.record == "summary":
        return _record(args, summary), EXIT_OK
    if args.record == "counters":
        c = out.counters
        if args.format == "json":
            doc = {**summary, "x": c.sites.tolist(), "N": c.N.tolist(), "R": c.R.tolist(), "L": c.L.tolist()}
            return _json(doc), EXIT_OK
        return f"# seed={args.seed}\n" + c.to_csv(), EXIT_OK
    if args.format == "json":
        return _json({**summary, "trajectory": out.trajectory.tolist()}), EXIT_OK
    return f"# seed={args.seed}\n" + out.trajectory_csv(), EXIT_OK


def cmd_mc(args) -> tuple[str, int]:
    params, spec = _params(args), _spec(args)
    spec.validate(params)
    seed, th = args.seed, args.threads
    if args.estimator == "direction":
        d = mc.estimate_direction(spec, params, args.barrier, args.max_steps, args.reps, seed,
                                  engine=args.engine, threads=th)
        return _record(args, {**params.as_dict(), **d.to_dict()}), EXIT_OK
    if args.estimator == "speed":
        est = mc.estimate_speed(spec, params, args.n_steps, args.reps, seed, th)
    elif args.estimator == "E_Nx":
        est = mc.estimate_E_Nx(spec, params, args.site, args.reps, args.max_steps, seed, threads=th)
    elif args.estimator == "Z_survival":
        est = mc.estimate_Z_survival(spec, params, args.horizon, args.reps, seed, threads=th)
    else:
        est = mc.estimate_escape_from_one(spec, params, args.horizon, args.reps, seed,
                                          max_steps=args.max_steps, threads=th)
    if args.format == "json":
        return _json(est.to_dict()), EXIT_OK
    return est.CSV_HEADER + "\n" + est.csv_row() + "\n", EXIT_OK


def cmd_validate(args) -> tuple[str, int]:
    results = validation.run_validation(args.level, args.seed, args.threads)
    failed = [r.check_name for r in results if not r.passed]
    if args.format == "json":
        doc = {"level": args.level, "seed": args.seed, "passed": not failed, "failed": failed,
               "checks": [r.to_dict() for r in results]}
        text = _json(doc)
    else:
        text = _csv(["check_name", "status", "expected", "actual", "tolerance"],
                    [[r.check_name, r.status, r.expected, r.actual, r.tolerance] for r in results])
    for name in failed:
        print(f"FAILED: {name}", file=sys.stderr)
    return text, EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "alpha-scan": cmd_alpha_scan,
    "classify": cmd_classify,
    "speed": cmd_speed,
    "simulate": cmd_simulate,
    "mc": cmd_mc,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        text, code = COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
