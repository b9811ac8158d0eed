"""Seeded Monte-Carlo execution of (policy, instance) pairs.

Each trial owns the random stream ``(base_seed, trial_index)``; per-arm
reward sequences come from that stream's child keys, so the rewards an arm
would deliver on its k-th pull do not depend on pull interleaving. That
makes trials reproducible, parallelizable in any order, and pairable across
policy parameters (common random numbers).
"""

from __future__ import annotations

import dataclasses
import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import StochasticInstance, gap_profile
from .errors import DomainError
from .hard_instances import AdversarialInstance
from .policies import (
    BoBWParams,
    Exp3PParams,
    PolicyParams,
    SHParams,
    UCBAlphaParams,
    UCBEParams,
    UPADVParams,
    policy_init,
)
from .rng import RngStream

SCHEMA_VERSION = 1

TRIAL_COLUMNS = [
    "schema_version",
    "algorithm",
    "params_json",
    "instance_label",
    "protocol",
    "trial",
    "seed",
    "steps_used",
    "pseudo_regret",
    "realized_regret",
    "recommended_arm",
    "correct",
    "stopped_early",
]

AGG_COLUMNS = [
    "schema_version",
    "algorithm",
    "params_json",
    "instance_label",
    "protocol",
    "mean_regret",
    "std_regret",
    "failure_count",
    "failure_probability",
    "mean_stop_time",
    "std_stop_time",
    "n_trials",
]

_ALGO_NAMES = {
    BoBWParams: "bobw",
    UCBEParams: "ucbe",
    SHParams: "sh",
    Exp3PParams: "exp3p",
    UPADVParams: "upadv",
    UCBAlphaParams: "ucbalpha",
}


def algorithm_name(params: PolicyParams) -> str:
    return _ALGO_NAMES[type(params)]


def params_json(params: PolicyParams) -> str:
    return json.dumps(dataclasses.asdict(params), sort_keys=True)


@dataclass(frozen=True)
class FixedBudget:
    """Run for exactly ``T`` pulls (fewer only if the policy's schedule
    ends early), then recommend."""

    T: int

    def describe(self) -> str:
        return f"fixed_budget:T={self.T}"


@dataclass(frozen=True)
class FixedConfidence:
    """Run until the policy stops or ``step_cap`` pulls elapse."""

    delta: float
    step_cap: int

    def describe(self) -> str:
        return f"fixed_confidence:delta={self.delta:g},cap={self.step_cap}"


Protocol = FixedBudget | FixedConfidence


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one seeded trial."""

    trial_index: int
    seed: int
    steps_used: int
    pseudo_regret: float
    realized_regret: float | None
    recommended_arm: int
    correct: bool
    stopped_early: bool


@dataclass(frozen=True)
class AggregateResult:
    """Order-independent summary of a batch of trials.

    Standard deviations use the population convention (divide by n), since
    the trials fully enumerate the reported sample.
    """

    mean_regret: float
    std_regret: float
    failure_count: int
    failure_probability: float
    mean_stop_time: float
    std_stop_time: float
    n_trials: int
    metadata: dict


@dataclass
class ExperimentConfig:
    """One batch: an instance, a sweep of policy parameter records, a
    protocol, and seeding/output choices."""

    instance: StochasticInstance | AdversarialInstance
    policies: list[PolicyParams]
    protocol: Protocol
    n_trials: int
    base_seed: int
    out: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.n_trials < 1:
            raise DomainError("n_trials must be >= 1")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")


# ---------------------------------------------------------------------------
# Single trials


def _reward_buffers(
    instance: StochasticInstance, stream: RngStream, length: int
) -> np.ndarray:
    """Per-arm reward sequences: row i holds arm i's future pulls."""
    L = instance.n_arms
    buf = np.empty((L, length))
    for i in range(L):
        buf[i] = instance.arms[i].sample(stream.child(i), size=length)
    return buf


def _finish_stochastic(
    instance, trial_index, seed, steps, counts, recommended, stopped
) -> TrialRecord:
    profile = gap_profile(instance)
    gaps = np.array(profile.gaps)
    pseudo = float(np.sum(counts * gaps))
    return TrialRecord(
        trial_index=trial_index,
        seed=seed,
        steps_used=int(steps),
        pseudo_regret=pseudo,
        realized_regret=None,
        recommended_arm=int(recommended),
        correct=bool(recommended == profile.optimal_arm),
        stopped_early=bool(stopped),
    )


def run_trial(
    policy_params: PolicyParams,
    instance: StochasticInstance | AdversarialInstance,
    protocol: Protocol,
    stream: RngStream,
    trial_index: int = 0,
    force_generic: bool = False,
    check_means: np.ndarray | None = None,
) -> TrialRecord | tuple[TrialRecord, bool]:
    """Execute one seeded trial and score it.

    Long-horizon index policies route through compiled kernels unless
    ``force_generic`` is set; both routes consume the stream identically
    and produce identical records. With ``check_means`` given (compiled
    route only), also returns whether any empirical mean ever left its
    confidence radius around those means.
    """
    if isinstance(instance, AdversarialInstance):
        return _run_trial_adversarial(
            policy_params, instance, protocol, stream, trial_index
        )
    L = instance.n_arms
    seed = stream.seed

    fast = (
        not force_generic
        and (
            (
                isinstance(protocol, FixedBudget)
                and isinstance(policy_params, (BoBWParams, UCBEParams))
            )
            or (
                isinstance(protocol, FixedConfidence)
                and isinstance(policy_params, UCBAlphaParams)
            )
        )
    )
    if fast and isinstance(protocol, FixedBudget):
        T = protocol.T
        if T < L:
            raise DomainError(f"budget T={T} is below L={L}")
        rewards = _reward_buffers(instance, stream, T)
        tie_u = stream.child(L).random(T)
        if isinstance(policy_params, BoBWParams):
            p = policy_params
            do_check = check_means is not None
            cm = (
                np.asarray(check_means, dtype=np.float64)
                if do_check
                else np.zeros(L)
            )
            counts, sums, violated = kernels.bobw_trial(
                rewards, tie_u, T, p.sigma, p.eps, p.beta, p.gamma, cm, do_check
            )
        else:
            counts, sums = kernels.ucbe_trial(rewards, tie_u, T, policy_params.a)
            violated = False
        means = sums / counts
        recommended = int(np.argmax(means))
        record = _finish_stochastic(
            instance, trial_index, seed, T, counts, recommended, False
        )
        if check_means is not None:
            return record, bool(violated)
        return record
    if fast and isinstance(protocol, FixedConfidence):
        return _run_ucbalpha_fast(
            policy_params, instance, protocol, stream, trial_index
        )
    return _run_trial_generic(
        policy_params, instance, protocol, stream, trial_index
    )


def _run_ucbalpha_fast(
    params: UCBAlphaParams,
    instance: StochasticInstance,
    protocol: FixedConfidence,
    stream: RngStream,
    trial_index: int,
) -> TrialRecord:
    L = instance.n_arms
    cap = protocol.step_cap
    chunk = 1 << 14
    gens = [stream.child(i) for i in range(L)]
    tie_gen = stream.child(L)
    rewards = np.empty((L, chunk))
    widths = np.zeros(L, dtype=np.int64)
    for i in range(L):
        rewards[i] = instance.arms[i].sample(gens[i], size=chunk)
        widths[i] = chunk
    ptr = np.zeros(L, dtype=np.int64)
    tie_u = tie_gen.random(chunk)
    tie_box = np.zeros(1, dtype=np.int64)
    N = np.zeros(L, dtype=np.int64)
    s = np.zeros(L)
    t_box = np.zeros(2, dtype=np.int64)
    while True:
        code = kernels.ucbalpha_trial(
            rewards, ptr, tie_u, tie_box, N, s, t_box,
            params.alpha, params.delta, cap,
        )
        if code == kernels.RUN_REWARDS_EXHAUSTED:
            # Refill the exhausted arm's row in place with its next chunk;
            # each arm consumes its own stream strictly in order.
            a = int(t_box[1])
            rewards[a] = instance.arms[a].sample(gens[a], size=chunk)
            ptr[a] = 0
            continue
        if code == kernels.RUN_TIES_EXHAUSTED:
            extra = tie_gen.random(tie_u.shape[0])
            tie_u = np.concatenate([tie_u, extra])
            continue
        break
    stopped = code == kernels.RUN_STOPPED
    means = np.where(N > 0, s / np.maximum(N, 1), 0.0)
    recommended = int(np.argmax(means))
    return _finish_stochastic(
        instance, trial_index, stream.seed, int(t_box[0]), N, recommended, stopped
    )


def _run_trial_generic(
    policy_params: PolicyParams,
    instance: StochasticInstance,
    protocol: Protocol,
    stream: RngStream,
    trial_index: int,
) -> TrialRecord:
    L = instance.n_arms
    if isinstance(protocol, FixedBudget):
        horizon = protocol.T
        if horizon < L and not isinstance(policy_params, (UPADVParams, Exp3PParams)):
            raise DomainError(f"budget T={horizon} is below L={L}")
    else:
        horizon = protocol.step_cap
    policy = policy_init(policy_params, L, horizon)
    gens = [stream.child(i) for i in range(L)]
    select_gen = stream.child(L)
    steps = 0
    for _ in range(horizon):
        if policy.exhausted or policy.has_stopped():
            break
        arm = policy.select_arm(select_gen)
        reward = float(instance.arms[arm].sample(gens[arm]))
        policy.update(arm, reward)
        steps += 1
    recommended = policy.recommend()
    stopped = policy.has_stopped()
    return _finish_stochastic(
        instance, trial_index, stream.seed, steps, policy.pull_counts,
        recommended, stopped,
    )


def _run_trial_adversarial(
    policy_params: PolicyParams,
    instance: AdversarialInstance,
    protocol: Protocol,
    stream: RngStream,
    trial_index: int,
) -> TrialRecord:
    if not isinstance(protocol, FixedBudget):
        raise DomainError("adversarial tables run under a fixed budget")
    T = min(protocol.T, instance.T)
    L = instance.n_arms
    policy = policy_init(policy_params, L, T)
    select_gen = stream.child(L)
    collected = 0.0
    steps = 0
    for t in range(T):
        if policy.exhausted or policy.has_stopped():
            break
        arm = policy.select_arm(select_gen)
        reward = float(instance.rewards[t, arm])
        policy.update(arm, reward)
        collected += reward
        steps += 1
    recommended = policy.recommend()
    opt_gain = float(instance.rewards[:steps, instance.emp_optimum].sum())
    regret = opt_gain - collected
    return TrialRecord(
        trial_index=trial_index,
        seed=stream.seed,
        steps_used=steps,
        pseudo_regret=regret,
        realized_regret=regret,
        recommended_arm=int(recommended),
        correct=bool(recommended == instance.emp_optimum),
        stopped_early=bool(policy.has_stopped()),
    )


# ---------------------------------------------------------------------------
# Batches


def aggregate(records: list[TrialRecord], metadata: dict | None = None) -> AggregateResult:
    """Fold trial records into summary statistics.

    Records are sorted by trial index before folding, so the result is
    bit-identical no matter the arrival order or worker partition.
    """
    ordered = sorted(records, key=lambda r: r.trial_index)
    n = len(ordered)
    regrets = np.array([r.pseudo_regret for r in ordered])
    stops = np.array([r.steps_used for r in ordered], dtype=np.float64)
    failures = sum(1 for r in ordered if not r.correct)
    return AggregateResult(
        mean_regret=float(regrets.mean()),
        std_regret=float(regrets.std()),
        failure_count=failures,
        failure_probability=failures / n,
        mean_stop_time=float(stops.mean()),
        std_stop_time=float(stops.std()),
        n_trials=n,
        metadata=dict(metadata or {}),
    )


def merge(partitions: list[list[TrialRecord]], metadata: dict | None = None) -> AggregateResult:
    """Combine disjoint record partitions into one aggregate."""
    combined: list[TrialRecord] = []
    for part in partitions:
        combined.extend(part)
    return aggregate(combined, metadata)


def _trial_task(args) -> TrialRecord:
    policy_params, instance, protocol, base_seed, trial_index = args
    return run_trial(
        policy_params,
        instance,
        protocol,
        RngStream(base_seed, trial_index),
        trial_index=trial_index,
    )


def run_batch(
    config: ExperimentConfig,
) -> list[tuple[PolicyParams, AggregateResult, list[TrialRecord]]]:
    """Run every policy in the sweep over the shared trial streams.

    Returns one (params, aggregate, records) triple per policy; when
    ``config.out`` is set, also writes ``<out>.trials.csv`` and
    ``<out>.agg.csv``.
    """
    results = []
    for params in config.policies:
        tasks = [
            (params, config.instance, config.protocol, config.base_seed, k)
            for k in range(config.n_trials)
        ]
        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                records = list(pool.map(_trial_task, tasks, chunksize=16))
        else:
            records = [_trial_task(t) for t in tasks]
        meta = {
            "algorithm": algorithm_name(params),
            "params_json": params_json(params),
            "instance_label": getattr(config.instance, "label", ""),
            "protocol": config.protocol.describe(),
        }
        results.append((params, aggregate(records, meta), records))
    if config.out is not None:
        write_csvs(config.out, results)
    return results


def pareto_sweep(
    config: ExperimentConfig, gammas: list[float]
) -> list[tuple[float, float, float]]:
    """Sweep the exploration parameter of the index policy over a grid.

    All grid points share trial seeds (common random numbers), so the
    regret/failure frontier is comparable point to point. The sweep
    template is ``config.policies[0]``, which must be the index policy.
    """
    if sorted(gammas) != list(gammas):
        raise DomainError("gamma grid must be sorted ascending")
    template = config.policies[0]
    if not isinstance(template, BoBWParams):
        raise DomainError("pareto_sweep sweeps the index policy's gamma")
    sweep = [dataclasses.replace(template, gamma=g) for g in gammas]
    swept = dataclasses.replace(config, policies=sweep)
    results = run_batch(swept)
    return [
        (g, agg.mean_regret, agg.failure_probability)
        for g, (_, agg, _) in zip(gammas, results)
    ]


def write_csvs(
    out_prefix: str,
    results: list[tuple[PolicyParams, AggregateResult, list[TrialRecord]]],
) -> tuple[str, str]:
    """Write the per-trial and aggregate CSVs for a batch."""
    trials_path = out_prefix + ".trials.csv"
    agg_path = out_prefix + ".agg.csv"
    os.makedirs(os.path.dirname(os.path.abspath(trials_path)), exist_ok=True)
    try:
        with open(trials_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRIAL_COLUMNS)
            for params, agg, records in results:
                meta = agg.metadata
                for r in sorted(records, key=lambda r: r.trial_index):
                    writer.writerow(
                        [
                            SCHEMA_VERSION,
                            meta["algorithm"],
                            meta["params_json"],
                            meta["instance_label"],
                            meta["protocol"],
                            r.trial_index,
                            r.seed,
                            r.steps_used,
                            repr(r.pseudo_regret),
                            "" if r.realized_regret is None else repr(r.realized_regret),
                            r.recommended_arm,
                            int(r.correct),
                            int(r.stopped_early),
                        ]
                    )
        with open(agg_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(AGG_COLUMNS)
            for params, agg, records in results:
                meta = agg.metadata
                writer.writerow(
                    [
                        SCHEMA_VERSION,
                        meta["algorithm"],
                        meta["params_json"],
                        meta["instance_label"],
                        meta["protocol"],
                        repr(agg.mean_regret),
                        repr(agg.std_regret),
                        agg.failure_count,
                        repr(agg.failure_probability),
                        repr(agg.mean_stop_time),
                        repr(agg.std_stop_time),
                        agg.n_trials,
                    ]
                )
    except OSError:
        for path in (trials_path, agg_path):
            if os.path.exists(path):
                os.remove(path)
        raise
    return trials_path, agg_path
