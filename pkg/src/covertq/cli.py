"""Command-line front end.

Subcommands: simulate, detect, exponent, bound, campaign, sweep.

Exit codes are stable: 0 success, 2 argument or config error, 3 input
data error, 4 numeric failure.  Every randomized command either takes an
explicit --seed or prints the one it generated, so any published number
can be reproduced.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys

from . import covert, detect, experiment, exponent
from .model import Hypothesis, ModelParams, parse_config
from .sim import ObservationSequence, RngSeed, simulate_sequence

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NUMERIC = 4

SELF_CHECK_TOL = 1e-8


class InputDataError(Exception):
    pass


def _add_rate_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda-w", type=float, required=True, help="Willie arrival rate")
    p.add_argument("--lambda-b", type=float, required=True, help="Nillie arrival rate")
    p.add_argument("--mu", type=float, default=1.0, help="service rate (default 1)")


def _add_seed_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed; generated and printed when omitted")
    p.add_argument("--stream-id", type=int, default=0)


def _resolve_seed(args) -> RngSeed:
    if args.seed is None:
        args.seed = secrets.randbits(48)
        print(f"seed: {args.seed}", file=sys.stderr)
    return RngSeed(args.seed, args.stream_id)


def _default_threads() -> int:
    return int(os.environ.get("COVERTQ_THREADS", "1"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covertq",
        description="Covert queueing analysis for a bufferless M/M/1/1 server",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a busy/idle observation sequence")
    _add_rate_flags(p)
    p.add_argument("--n", type=int, required=True, help="number of arrivals")
    p.add_argument("--hyp", choices=["h0", "h1"], required=True)
    p.add_argument("--burn-in", type=int, default=1)
    p.add_argument("--out", default="-", help="output file ('-' for stdout)")
    _add_seed_flags(p)

    p = sub.add_parser("detect", help="run the likelihood-ratio test on a sequence")
    _add_rate_flags(p)
    p.add_argument("sequence", help="file holding one line of 0/1 characters")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--initial", choices=detect.INITIAL_MODES, default="stationary")

    p = sub.add_parser("exponent", help="error-exponent report for one rate triple")
    _add_rate_flags(p)
    p.add_argument("--output", choices=["json", "csv"], default="json")
    p.add_argument("--self-check", action="store_true",
                   help="exit 4 if closed-form and numeric exponents disagree")

    p = sub.add_parser("bound", help="covert-rate bound and scaling table")
    p.add_argument("--lambda-w", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n", type=int, default=None, help="single N to evaluate")
    p.add_argument("--n-values", default=None,
                   help="comma-separated increasing N list for the table")
    p.add_argument("--k-family", choices=covert.K_FAMILIES, default="constant")
    p.add_argument("--k0", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--output", choices=["json", "csv"], default="json")

    p = sub.add_parser("campaign", help="run an error-probability campaign")
    p.add_argument("config", help="key=value config file")
    p.add_argument("--out", required=True, help="output path stem (.json/.csv added)")
    p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("sweep", help="threshold sweep at fixed N")
    _add_rate_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--thresholds", required=True, help="comma-separated gamma values")
    p.add_argument("--trials", type=int, default=None,
                   help="Monte Carlo trials (default: exact binomial)")
    p.add_argument("--output", choices=["json", "csv"], default="json")
    _add_seed_flags(p)

    return parser


def _params_from_args(args) -> ModelParams:
    return ModelParams(args.lambda_w, args.lambda_b, args.mu)


def _read_sequence(path: str) -> ObservationSequence:
    try:
        with open(path) as fh:
            line = fh.readline()
    except OSError as exc:
        raise InputDataError(f"cannot read sequence file: {exc}")
    try:
        return ObservationSequence.from_line(line)
    except ValueError as exc:
        raise InputDataError(f"{path}: {exc}")


def _cmd_simulate(args) -> int:
    params = _params_from_args(args)
    seed = _resolve_seed(args)
    obs = simulate_sequence(
        params, Hypothesis.H1 if args.hyp == "h1" else Hypothesis.H0,
        args.n, seed, burn_in=args.burn_in,
    )
    line = obs.to_line()
    if args.out == "-":
        print(line)
    else:
        with open(args.out, "w") as fh:
            fh.write(line + "\n")
    print(f"busy_fraction: {obs.busy_fraction:.6f}", file=sys.stderr)
    return EXIT_OK


def _cmd_detect(args) -> int:
    params = _params_from_args(args)
    obs = _read_sequence(args.sequence)
    p_mat, q_mat = detect.matrices(params)
    result = detect.decide(obs, p_mat, q_mat, args.threshold, args.initial)
    print(json.dumps(
        {
            "llr": result.llr,
            "decision": result.decision.name,
            "threshold": result.threshold,
            "n": obs.n,
        },
        sort_keys=True,
    ))
    return EXIT_OK


def _cmd_exponent(args) -> int:
    params = _params_from_args(args)
    report = exponent.exponent_report(params)
    if args.output == "json":
        print(report.to_json())
    else:
        print("lambda_w,lambda_b,mu,v,i_err_closed,i_err_numeric,i_err_taylor")
        print(f"{params.lambda_w!r},{params.lambda_b!r},{params.mu!r},"
              f"{report.v_closed!r},{report.i_err_closed!r},"
              f"{report.i_err_numeric!r},{report.i_err_taylor!r}")
    if args.self_check:
        if (abs(report.v_closed - report.v_numeric) > SELF_CHECK_TOL
                or abs(report.i_err_closed - report.i_err_numeric) > SELF_CHECK_TOL):
            print("self-check failed: closed-form and numeric exponents disagree",
                  file=sys.stderr)
            return EXIT_NUMERIC
    return EXIT_OK


def _cmd_bound(args) -> int:
    k = covert.KFunction(family=args.k_family, k0=args.k0, alpha=args.alpha)
    if args.n_values is not None:
        n_values = [int(s) for s in args.n_values.split(",")]
        rows = covert.scaling_table(args.lambda_w, args.epsilon, k, n_values)
        if args.output == "csv":
            sys.stdout.write(covert.scaling_table_csv(rows))
        else:
            print(json.dumps(rows, sort_keys=True))
        return EXIT_OK
    if args.n is None:
        raise InputDataError("bound requires --n or --n-values")
    spec = covert.CovertnessSpec(epsilon=args.epsilon, n=args.n, k=k)
    bound = covert.max_covert_rate(args.lambda_w, spec)
    print(json.dumps(
        {"n": args.n, "bound": bound.value, "feasible": bound.feasible},
        sort_keys=True,
    ))
    return EXIT_OK


def _cmd_campaign(args) -> int:
    try:
        with open(args.config) as fh:
            kv = parse_config(fh.read())
    except OSError as exc:
        raise InputDataError(f"cannot read config: {exc}")
    try:
        params = ModelParams(
            float(kv["lambda_w"]), float(kv["lambda_b"]), float(kv.get("mu", 1.0))
        )
        cfg = experiment.CampaignConfig(
            params=params,
            n_grid=tuple(int(s) for s in kv["n_grid"].split(",")),
            trials_per_point=int(kv["trials_per_point"]),
            threshold=float(kv.get("threshold", 0.0)),
            master_seed=RngSeed(int(kv["master_seed"]), int(kv.get("stream_id", 0))),
            use_exact_when_feasible=kv.get("use_exact_when_feasible", "true").lower()
            in ("1", "true", "yes"),
            workers=args.threads if args.threads is not None else _default_threads(),
        )
    except KeyError as exc:
        raise InputDataError(f"config missing required key: {exc.args[0]}")
    except ValueError as exc:
        raise InputDataError(f"bad config value: {exc}")
    result = experiment.run_campaign(cfg)
    experiment.persist(result, args.out + ".json")
    with open(args.out + ".csv", "w") as fh:
        fh.write(experiment.rows_to_csv(result))
    print(f"wrote {args.out}.json and {args.out}.csv")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    params = _params_from_args(args)
    thresholds = [float(s) for s in args.thresholds.split(",")]
    seed = _resolve_seed(args) if args.trials is not None else None
    rows = experiment.threshold_sweep(params, args.n, thresholds, args.trials, seed)
    if args.output == "csv":
        print("gamma,p_f,p_m,p_e")
        for r in rows:
            print(f"{r['gamma']!r},{r['p_f']!r},{r['p_m']!r},{r['p_e']!r}")
    else:
        print(json.dumps(rows, sort_keys=True))
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "detect": _cmd_detect,
    "exponent": _cmd_exponent,
    "bound": _cmd_bound,
    "campaign": _cmd_campaign,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InputDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (detect.DegenerateModelError, detect.LlrUndefinedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except exponent.NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
