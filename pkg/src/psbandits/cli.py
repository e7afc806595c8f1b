"""Command-line front end.

Three subcommands:

  run        play policies on an environment, write regret.csv (+ svg)
  theory     evaluate the bound calculators
  check-env  validate a segment-table file

Environments are named ``builtin:synthetic``, ``builtin:hard``, or given
as a path to a segment-table file.
"""

import argparse
from dataclasses import replace
import pathlib
import sys

from . import env as envmod
from . import harness, theory
from .errors import InvalidConfigurationError, SegmentTableParseError
from .policies import POLICY_KINDS, default_params


def _load_env(spec: str, T: int, K: int, m: int, N: int,
              seed: int) -> envmod.Environment:
    if spec == "builtin:synthetic":
        return envmod.build_synthetic(T=T, K=K, m=m, N=N, seed=seed)
    if spec == "builtin:hard":
        return envmod.build_hard_instance(K=K, T=T, N=N, seed=seed)
    with open(spec) as fh:
        table = envmod.load_segment_table(fh)
    return envmod.Environment(table, seed)


def _cmd_run(args) -> int:
    env = _load_env(args.env, args.T, args.K, args.m, args.N, args.seed)
    K, T = env.num_arms, env.horizon
    N = env.table.num_segments

    kinds = [k.strip() for k in args.algos.split(",") if k.strip()]
    for kind in kinds:
        if kind not in POLICY_KINDS:
            raise InvalidConfigurationError(
                f"--algos: unknown policy {kind!r}; choose from "
                f"{','.join(POLICY_KINDS)}"
            )
    policies = []
    for kind in kinds:
        params = default_params(kind, T, K, args.m, N)
        overrides = {}
        if args.p is not None and kind in ("glr_cucb", "lr_glr_cucb"):
            overrides["p"] = args.p
        if args.delta is not None and kind in ("glr_cucb", "lr_glr_cucb"):
            overrides["delta"] = args.delta
        if args.check_every != 1 and kind in ("glr_cucb", "lr_glr_cucb"):
            overrides["check_every"] = args.check_every
        if args.gamma is not None and kind == "ducb":
            overrides["gamma"] = args.gamma
        if args.w is not None and kind == "mucb":
            overrides["w"] = args.w
        if overrides:
            params = replace(params, **overrides)
        policies.append((kind, params))

    cfg = harness.ExperimentConfig(
        env=env, m=args.m, policies=tuple(policies),
        replications=args.reps, base_seed=args.seed, alpha=args.alpha,
    )
    agg = harness.run_experiment(cfg)

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "regret.csv"
    csv_path.write_text(harness.export_csv(agg))
    written = [str(csv_path)]
    if args.plot:
        svg_path = out / "regret.svg"
        svg_path.write_text(harness.emit_svg(agg, show_band=True))
        written.append(str(svg_path))

    print(f"env: K={K} T={T} segments={N}  m={args.m}  "
          f"replications={args.reps}  seed={args.seed}")
    for label in agg.labels:
        mean, std = agg.final(label)
        print(f"  {label:<12} final regret {mean:10.2f} +- {std:.2f}")
    print("wrote " + ", ".join(written))
    return 0


def _cmd_theory(args) -> int:
    if args.bound == "d":
        d = theory.delay_bound_d(args.K, args.p, args.delta, args.T,
                                 args.delta_change)
        print(f"delay_bound_d(K={args.K}, p={args.p}, delta={args.delta}, "
              f"T={args.T}, delta_change={args.delta_change}) = {d}")
    elif args.bound == "lower":
        value = theory.minimax_lower_bound(args.N, args.K, args.T)
        print(f"minimax_lower_bound(N={args.N}, K={args.K}, T={args.T}) "
              f"= {value:.4f}")
    elif args.bound == "tuned":
        delta, p = theory.tuned_params(args.T, args.K, args.N_opt)
        print(f"tuned delta = {delta:.6g}")
        print(f"tuned p     = {p:.6g}")
    elif args.bound == "upper":
        env = _load_env(args.env, args.T, args.K, args.m, args.N, args.seed)
        bound = theory.regret_upper_bound(env.table, args.m, args.alpha,
                                          args.p, args.delta, args.L)
        print(f"ucb_term         = {bound.ucb_term:.4f}")
        print(f"uniform_term     = {bound.uniform_term:.4f}")
        print(f"delay_term       = {bound.delay_term:.4f}")
        print(f"false_alarm_term = {bound.false_alarm_term:.4f}")
        print(f"total            = {bound.total:.4f}")
    elif args.bound == "check-gap":
        env = _load_env(args.env, args.T, args.K, args.m, args.N, args.seed)
        report = theory.check_gap_assumption(env.table, args.p, args.delta)
        for rec in report.records:
            mark = "ok " if rec.satisfied else "BAD"
            print(f"  [{mark}] change {rec.index} at t={rec.change_point}: "
                  f"shift={rec.delta_change:.3g} delay={rec.delay} "
                  f"spacing={rec.spacing} required={rec.required}")
        mark = "ok " if report.final_spacing >= report.final_required else "BAD"
        print(f"  [{mark}] last segment: spacing={report.final_spacing} "
              f"required={report.final_required}")
        print(f"assumption {'satisfied' if report.satisfied else 'violated'}")
    return 0


def _cmd_check_env(args) -> int:
    with open(args.path) as fh:
        table = envmod.load_segment_table(fh)
    cps = ", ".join(str(c) for c in table.change_points) or "none"
    print(f"{args.path}: ok")
    print(f"  K={table.num_arms} T={table.horizon} "
          f"segments={table.num_segments}")
    print(f"  change points: {cps}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psbandits",
        description="piecewise-stationary combinatorial semi-bandit lab",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run policies and write regret curves")
    run.add_argument("--env", default="builtin:synthetic",
                     help="builtin:synthetic, builtin:hard, or a table file")
    run.add_argument("--m", type=int, default=2, help="super-arm size")
    run.add_argument("--algos", default=",".join(POLICY_KINDS),
                     help="comma-separated policy kinds")
    run.add_argument("--reps", type=int, default=100)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default="results")
    run.add_argument("--plot", action="store_true", help="also write regret.svg")
    run.add_argument("--alpha", type=float, default=1.0)
    run.add_argument("--T", type=int, default=5000)
    run.add_argument("--K", type=int, default=6)
    run.add_argument("--N", type=int, default=5)
    run.add_argument("--p", type=float, default=None,
                     help="override forced-exploration rate of the GLR variants")
    run.add_argument("--delta", type=float, default=None,
                     help="override detector confidence of the GLR variants")
    run.add_argument("--check-every", type=int, default=1, dest="check_every")
    run.add_argument("--gamma", type=float, default=None,
                     help="override the ducb discount")
    run.add_argument("--w", type=int, default=None,
                     help="override the mucb window")
    run.set_defaults(func=_cmd_run)

    th = sub.add_parser("theory", help="evaluate bound calculators")
    th.add_argument("--bound", required=True,
                    choices=["d", "upper", "lower", "tuned", "check-gap"])
    th.add_argument("--K", type=int, default=6)
    th.add_argument("--T", type=int, default=5000)
    th.add_argument("--N", type=int, default=5)
    th.add_argument("--N-known", type=int, default=None, dest="N_opt",
                    help="for --bound tuned: number of segments if known")
    th.add_argument("--m", type=int, default=2)
    th.add_argument("--p", type=float, default=0.05)
    th.add_argument("--delta", type=float, default=0.01)
    th.add_argument("--delta-change", type=float, default=0.5,
                    dest="delta_change")
    th.add_argument("--alpha", type=float, default=1.0)
    th.add_argument("--L", type=float, default=None)
    th.add_argument("--env", default="builtin:synthetic")
    th.add_argument("--seed", type=int, default=0)
    th.set_defaults(func=_cmd_theory)

    chk = sub.add_parser("check-env", help="validate a segment-table file")
    chk.add_argument("path")
    chk.set_defaults(func=_cmd_check_env)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SegmentTableParseError, InvalidConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
