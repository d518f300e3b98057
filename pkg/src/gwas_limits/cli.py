"""Command-line interface: generate, decode, sweep, verify, report.

Exit codes: 0 success, 1 check failure, 2 infeasible instance, 3 bad config.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .decoders import DEFAULT_BUDGET, ml_decode, refine_in_ball, typicality_decode
from .exceptions import ConfigError, InfeasibleError
from .harness import experiments as ex
from .harness.config import SCHEMA_VERSION, load_config, spec_from_config
from .harness.report import format_summary, render_svg, summarize
from .harness.verify import SUITES, verify
from .model import ModelParams, generate_dataset, read_dataset, sample_function, write_dataset
from .rng import Stage, substream
from .subseq import dist, format_subsequence, parse_subsequence, sample_uniform_subsequence

EXIT_OK, EXIT_CHECK, EXIT_INFEASIBLE, EXIT_CONFIG = 0, 1, 2, 3


def _add_model_args(p, required=True):
    p.add_argument("--q", type=int, default=None if not required else 2)
    p.add_argument("--G", type=int, required=required)
    p.add_argument("--L", type=int, required=required)
    p.add_argument("--N", type=int, required=required)
    p.add_argument("--m", type=int, default=None if not required else 1)
    p.add_argument("--alpha", type=float, default=None if not required else 0.0)


def cmd_generate(args):
    params = ModelParams(q=args.q, G=args.G, L=args.L, N=args.N, m=args.m, alpha=args.alpha)
    rng = substream(args.seed, 0, Stage.SAMPLE)
    s = parse_subsequence(args.s, params.G) if args.s else sample_uniform_subsequence(rng, params.L, params.G)
    f = sample_function(rng, params.q, params.L, params.m)
    data = generate_dataset(substream(args.seed, 0, Stage.DATA), params, s, f)
    write_dataset(args.out, data, params, seed=args.seed, s=s, f=f)
    print(f"wrote {args.out}: s={format_subsequence(s)} f={list(f.patterns)}")
    return EXIT_OK


def cmd_decode(args):
    data, params, meta = read_dataset(args.data)
    rng = substream(args.seed, 0, Stage.TIEBREAK)
    if args.decoder == "ml":
        res = ml_decode(data, params, rng, args.budget)
    elif args.decoder == "typicality":
        res = typicality_decode(data, params, args.tau, rng, args.budget, args.n_jobs)
    else:
        if args.center:
            center = parse_subsequence(args.center, params.G)
        else:
            center = typicality_decode(data, params, args.tau, rng, args.budget, args.n_jobs).estimate
        res = refine_in_ball(data, center, args.ball_epsilon, params, args.tau,
                             substream(args.seed, 0, Stage.REFINE), args.budget, args.n_jobs)
    out = {
        "estimate": format_subsequence(res.estimate),
        "status": res.status,
        "candidates_examined": res.candidates_examined,
        "witness_function": list(res.witness_function.patterns) if res.witness_function else None,
        "n_accepted": len(res.accepted),
    }
    if res.score is not None:
        out["score"] = res.score
    if "s" in meta:
        out["true"] = format_subsequence(meta["s"])
        out["dist"] = dist(res.estimate, meta["s"])
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _sweep_config(args) -> dict:
    cfg = load_config(args.config) if args.config else {"schema_version": SCHEMA_VERSION, "model": {}}
    model = cfg.setdefault("model", {})
    for key in ("q", "G", "L", "N", "m", "alpha"):
        val = getattr(args, key)
        if val is not None:
            model[key] = val
    for key in ("decoder", "ball_epsilon", "tau", "epsilon", "trials", "error_mode", "wc_samples", "budget"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    grid = cfg.setdefault("grid", {})
    if args.N_values:
        grid["N"] = args.N_values
    if args.tau_values:
        grid["tau"] = args.tau_values
    if args.epsilon_values:
        grid["epsilon"] = args.epsilon_values
    return cfg


def cmd_sweep(args):
    cfg = _sweep_config(args)
    base, grid = spec_from_config(cfg, args.seed)
    rows = ex.sweep(base, grid, n_jobs=args.n_jobs)
    text = ex.rows_to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if any(r.status == "infeasible" for r in rows):
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_verify(args):
    suites = SUITES if args.suite == "all" else (args.suite,)
    failed = 0
    for name in suites:
        print(f"== {name}")
        for check in verify(name):
            print(check.line())
            failed += not check.passed
    print(f"{failed} failure(s)")
    return EXIT_CHECK if failed else EXIT_OK


def cmd_report(args):
    summary = summarize(ex.read_csv(args.csv))
    print(format_summary(summary))
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(render_svg(summary))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gwas-limits", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a dataset file")
    _add_model_args(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--s", help="causal subsequence, 1-based comma separated (default: uniform draw)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("decode", help="run one decoder on a dataset file")
    p.add_argument("--data", required=True)
    p.add_argument("--decoder", choices=ex.DECODERS, default="typicality")
    p.add_argument("--tau", type=float)
    p.add_argument("--ball-epsilon", type=float, default=1.0)
    p.add_argument("--center", help="refinement centre, 1-based (default: typicality estimate)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--n-jobs", type=int)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sweep", help="grid experiment to CSV")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, required=True, help="master seed (overrides config master_seed)")
    _add_model_args(p, required=False)
    p.add_argument("--decoder", choices=ex.DECODERS)
    p.add_argument("--ball-epsilon", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--error-mode", choices=ex.ERROR_MODES)
    p.add_argument("--wc-samples", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--N-values", type=int, nargs="+")
    p.add_argument("--tau-values", type=float, nargs="+")
    p.add_argument("--epsilon-values", type=float, nargs="+")
    p.add_argument("--n-jobs", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run property suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="threshold summary of a sweep CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--svg")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
