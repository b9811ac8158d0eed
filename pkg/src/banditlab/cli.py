"""Command-line interface.

Subcommands cover instance arithmetic (``hardness``), bound evaluation
(``gamma-interval``, ``bounds``), simulation (``simulate``, ``pareto``),
lower-bound instance generation (``lower-bound``), and dataset ingestion
(``dataset``). Every run with an ``--out`` prefix echoes its fully
resolved configuration to ``<out>.meta.json``. Exit codes: 0 success,
1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys

from . import datasets, harness, theory
from .core import (
    bernoulli_line,
    gap_profile,
    hardness,
    load_instance,
    save_instance,
)
from .errors import BanditLabError, DomainError
from .hard_instances import adversarial_clipped_family, bern_family, gauss_family
from .policies import (
    BoBWParams,
    Exp3PParams,
    SHParams,
    UCBAlphaParams,
    UCBEParams,
    UPADVParams,
)
from .rng import RngStream


def _parse_beta(token: str) -> float:
    """Accept the literal ``e`` for the natural base."""
    if token.strip().lower() == "e":
        return math.e
    try:
        return float(token)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--beta expects a number or 'e', got {token!r}"
        ) from None


def _float_list(flag: str):
    def parse(token: str) -> list[float]:
        out = []
        for part in token.split(","):
            try:
                out.append(float(part))
            except ValueError:
                raise argparse.ArgumentTypeError(
                    f"{flag} expects comma-separated numbers, bad token {part!r}"
                ) from None
        return out

    return parse


def _load_cli_instance(spec: str):
    """Instance from inline shorthand ``bern:L=...,delta=...`` or a JSON
    spec file path."""
    if spec.startswith("bern:"):
        fields = dict(part.split("=", 1) for part in spec[5:].split(","))
        try:
            L = int(fields.pop("L"))
            delta = float(fields.pop("delta"))
        except (KeyError, ValueError):
            raise DomainError(
                f"shorthand must look like bern:L=64,delta=0.1, got {spec!r}"
            ) from None
        if fields:
            raise DomainError(f"unknown shorthand fields {sorted(fields)}")
        return bernoulli_line(L, delta)
    return load_instance(spec)


def _write_meta(out: str | None, config: dict) -> None:
    if out is None:
        return
    os.makedirs(os.path.dirname(os.path.abspath(out)) or ".", exist_ok=True)
    with open(out + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _cmd_hardness(args) -> int:
    means = args.means
    from .core import Bernoulli, Gaussian, StochasticInstance

    instance = StochasticInstance(tuple(Gaussian(m, 1.0) for m in means))
    profile = gap_profile(instance)
    h = hardness(profile, p=args.p)
    print(f"delta={profile.min_gap:g}")
    print(f"H1={h.h1:g}")
    print(f"H2={h.h2:g}")
    if args.p is not None:
        print(f"Hp_prime={h.hp_prime:g}")
        print(f"Cp={h.cp:g}")
    _write_meta(args.out, {"command": "hardness", "means": means, "p": args.p})
    return 0


def _cmd_gamma_interval(args) -> int:
    delta_lower = args.delta_lower if args.delta_lower is not None else args.delta
    h2_bar = (
        args.h2_bar
        if args.h2_bar is not None
        else (args.L - 1) / args.delta**2
    )
    rows = []
    for T in args.T:
        interval = theory.gamma_interval(
            args.L, args.sigma, T, args.eps, args.beta, delta_lower, h2_bar
        )
        rows.append((T, repr(interval.lo), repr(interval.hi), int(interval.empty)))
        marker = " (empty)" if interval.empty else ""
        print(f"T={T:g} lo={interval.lo:.6g} hi={interval.hi:.6g}{marker}")
    if args.out is not None:
        with open(args.out + ".csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["T", "lo", "hi", "empty"])
            writer.writerows(rows)
    _write_meta(
        args.out,
        {
            "command": "gamma-interval",
            "L": args.L,
            "delta": args.delta,
            "sigma": args.sigma,
            "eps": args.eps,
            "beta": args.beta,
            "T": args.T,
            "delta_lower": delta_lower,
            "h2_bar": h2_bar,
        },
    )
    return 0


def _cmd_bounds(args) -> int:
    inputs = theory.BoundInputs(
        T=args.T,
        L=args.L,
        sigma=args.sigma,
        eps=args.eps,
        beta=args.beta,
        gamma=args.gamma,
        gaps=args.gaps,
        h2=args.h2,
        h2_bar=args.h2_bar,
        delta_lower=args.delta_lower,
        reward_range=args.reward_range,
        variance_bound=args.variance_bound,
        phi=args.phi,
        psi=args.psi,
        alpha=args.alpha,
        confidence=args.confidence,
        eta=args.eta,
        emp_gap=args.emp_gap,
    )
    rows = []
    for kind in args.kind:
        if kind in theory.PARETO_KINDS:
            value = theory.pareto_lower_bounds(kind, inputs)
            rows.append((kind, repr(value), "", ""))
            print(f"{kind}={value:.6g}")
        else:
            result = theory.baseline_bounds(kind, inputs)
            rows.append(
                (
                    kind,
                    repr(result.value),
                    int(result.vacuous),
                    "" if result.condition_ok is None else int(result.condition_ok),
                )
            )
            suffix = " (vacuous)" if result.vacuous else ""
            if result.condition_ok is False:
                suffix += " (side condition violated)"
            print(f"{kind}={result.value:.6g}{suffix}")
    if args.out is not None:
        with open(args.out + ".csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["kind", "value", "vacuous", "condition_ok"])
            writer.writerows(rows)
    _write_meta(args.out, {"command": "bounds", **vars(args)})
    return 0


def _policy_from_args(args, instance) -> tuple:
    """Build (params, protocol) from simulate-style flags."""
    sigma = args.sigma if args.sigma is not None else instance.sub_gaussian_scale
    required = {
        "bobw": ["gamma"],
        "ucbe": ["a"],
        "sh": [],
        "exp3p": ["gamma", "eta"],
        "upadv": [],
        "ucbalpha": ["alpha"],
    }[args.algo]
    for name in required:
        if getattr(args, name) is None:
            raise DomainError(f"--{name} is required for --algo {args.algo}")
    if args.algo == "bobw":
        params = BoBWParams(sigma, args.eps, args.beta, args.gamma)
    elif args.algo == "ucbe":
        params = UCBEParams(args.a)
    elif args.algo == "sh":
        params = SHParams()
    elif args.algo == "exp3p":
        params = Exp3PParams(args.gamma, args.eta)
    elif args.algo == "upadv":
        params = UPADVParams()
    else:
        params = UCBAlphaParams(args.alpha, args.conf_delta)
    if args.algo == "ucbalpha":
        cap = args.cap if args.cap is not None else 100 * args.T
        protocol = harness.FixedConfidence(args.conf_delta, cap)
    else:
        protocol = harness.FixedBudget(args.T)
    return params, protocol


def _cmd_simulate(args) -> int:
    instance = _load_cli_instance(args.instance)
    params, protocol = _policy_from_args(args, instance)
    config = harness.ExperimentConfig(
        instance=instance,
        policies=[params],
        protocol=protocol,
        n_trials=args.trials,
        base_seed=args.seed,
        out=args.out,
        workers=args.workers,
    )
    results = harness.run_batch(config)
    _, agg, _ = results[0]
    print(
        f"mean_regret={agg.mean_regret:.6g} std_regret={agg.std_regret:.6g} "
        f"failure_probability={agg.failure_probability:.6g} "
        f"mean_stop_time={agg.mean_stop_time:.6g}"
    )
    _write_meta(
        args.out,
        {
            "command": "simulate",
            "algorithm": harness.algorithm_name(params),
            "params": dataclasses.asdict(params),
            "instance": args.instance,
            "protocol": protocol.describe(),
            "trials": args.trials,
            "seed": args.seed,
            "workers": args.workers,
        },
    )
    return 0


def _cmd_pareto(args) -> int:
    instance = _load_cli_instance(args.instance)
    sigma = args.sigma if args.sigma is not None else instance.sub_gaussian_scale
    template = BoBWParams(sigma, args.eps, args.beta, args.gammas[0])
    config = harness.ExperimentConfig(
        instance=instance,
        policies=[template],
        protocol=harness.FixedBudget(args.T),
        n_trials=args.trials,
        base_seed=args.seed,
        out=args.out,
        workers=args.workers,
    )
    points = harness.pareto_sweep(config, args.gammas)
    for g, regret, failure in points:
        print(f"gamma={g:g} mean_regret={regret:.6g} failure_probability={failure:.6g}")
    _write_meta(
        args.out,
        {
            "command": "pareto",
            "gammas": args.gammas,
            "sigma": sigma,
            "eps": args.eps,
            "beta": args.beta,
            "instance": args.instance,
            "T": args.T,
            "trials": args.trials,
            "seed": args.seed,
            "workers": args.workers,
        },
    )
    return 0


def _cmd_lower_bound(args) -> int:
    if args.family in ("bern", "gauss"):
        if args.d is None:
            raise DomainError("--d is required for stochastic families")
        if args.family == "bern":
            family = bern_family(args.L, args.d, args.b)
        else:
            family = gauss_family(args.L, args.d, args.sigma)
        paths = []
        for k, instance in enumerate(family, start=1):
            path = f"{args.out}.instance{k}.json"
            save_instance(instance, path)
            paths.append(path)
        print(f"wrote {len(paths)} instance spec files")
    else:
        table = adversarial_clipped_family(
            args.L,
            args.T,
            args.eps,
            args.sigma,
            args.instance_index,
            RngStream(args.seed),
        )
        path = f"{args.out}.table.csv"
        table.save_csv(path)
        print(
            f"wrote {path}: empirical optimum arm {table.emp_optimum}, "
            f"empirical min gap {table.emp_min_gap:.6g}"
        )
    _write_meta(args.out, {"command": "lower-bound", **vars(args)})
    return 0


def _cmd_dataset(args) -> int:
    if args.source == "movielens":
        instance = datasets.load_movielens(args.path, args.min_ratings)
    else:
        if args.kinase is None:
            raise DomainError("--kinase is required for pkis2")
        instance = datasets.load_pkis2(args.path, args.kinase, args.raw_scale)
    save_instance(instance, args.out + ".instance.json")
    print(f"L={instance.n_arms} label={instance.label}")
    _write_meta(args.out, {"command": "dataset", **vars(args)})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditlab",
        description="Bandit simulation, bound evaluation, and benchmarking.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hardness", help="gap and hardness arithmetic")
    p.add_argument("--means", type=_float_list("--means"), required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_hardness)

    p = sub.add_parser("gamma-interval", help="admissible exploration interval")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--beta", type=_parse_beta, default=math.e)
    p.add_argument("--T", type=float, nargs="+", required=True)
    p.add_argument("--delta-lower", type=float, default=None)
    p.add_argument("--h2-bar", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_gamma_interval)

    p = sub.add_parser("bounds", help="closed-form bound evaluation")
    all_kinds = list(theory.BASELINE_KINDS) + list(theory.PARETO_KINDS)
    p.add_argument(
        "--kind",
        type=lambda s: s.split(","),
        required=True,
        help=f"comma-separated subset of {all_kinds}",
    )
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--beta", type=_parse_beta, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--gaps", type=_float_list("--gaps"), default=None)
    p.add_argument("--h2", type=float, default=None)
    p.add_argument("--h2-bar", type=float, default=None)
    p.add_argument("--delta-lower", type=float, default=None)
    p.add_argument("--reward-range", type=float, default=None)
    p.add_argument("--variance-bound", type=float, default=None)
    p.add_argument("--phi", type=float, default=None)
    p.add_argument("--psi", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--confidence", type=float, default=None)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--emp-gap", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bounds)

    def add_sim_flags(p, algos):
        p.add_argument("--algo", choices=algos, required=True)
        p.add_argument("--instance", required=True)
        p.add_argument("--T", type=int, required=True)
        p.add_argument("--trials", type=int, required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)
        p.add_argument(
            "--workers",
            type=int,
            default=int(os.environ.get("BANDITLAB_WORKERS", "1")),
        )
        p.add_argument("--sigma", type=float, default=None)
        p.add_argument("--eps", type=float, default=0.01)
        p.add_argument("--beta", type=_parse_beta, default=math.e)
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--a", type=float, default=None)
        p.add_argument("--eta", type=float, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--conf-delta", type=float, default=0.01)
        p.add_argument("--cap", type=int, default=None)

    p = sub.add_parser("simulate", help="Monte-Carlo simulation of one policy")
    add_sim_flags(p, ["bobw", "ucbe", "sh", "exp3p", "upadv", "ucbalpha"])
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("pareto", help="gamma sweep with shared seeds")
    p.add_argument("--gammas", type=_float_list("--gammas"), required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument(
        "--workers",
        type=int,
        default=int(os.environ.get("BANDITLAB_WORKERS", "1")),
    )
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--beta", type=_parse_beta, default=math.e)
    p.set_defaults(func=_cmd_pareto)

    p = sub.add_parser("lower-bound", help="generate lower-bound families")
    p.add_argument("--family", choices=["bern", "gauss", "adv"], required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--d", type=_float_list("--d"), default=None)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--T", type=int, default=10000)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--instance-index", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_lower_bound)

    p = sub.add_parser("dataset", help="build instances from data files")
    p.add_argument("--source", choices=["movielens", "pkis2"], required=True)
    p.add_argument("--path", required=True)
    p.add_argument("--min-ratings", type=int, default=50000)
    p.add_argument("--kinase", default=None)
    p.add_argument("--raw-scale", type=float, default=100.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_dataset)

    return parser


def dispatch(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BanditLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
