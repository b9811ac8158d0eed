"""Multi-armed bandit simulation library, bound calculator, and harness."""

from .core import (
    ArmModel,
    Bernoulli,
    Gaussian,
    GapProfile,
    Hardness,
    LogDomainGaussian,
    StochasticInstance,
    bernoulli_line,
    default_scale,
    gap_profile,
    hardness,
    load_instance,
    sample_reward,
    save_instance,
)
from .datasets import load_movielens, load_pkis2
from .errors import (
    BanditLabError,
    BudgetTooSmall,
    ConditionViolated,
    DomainError,
    EmptySelection,
    Incomplete,
    NonUniqueOptimum,
    ParseError,
    SchemaMismatch,
    Stopped,
    UnknownKinase,
)
from .hard_instances import (
    AdversarialInstance,
    adversarial_clipped_family,
    bern_family,
    clip_gap_probability,
    gauss_family,
    load_adversarial_csv,
)
from .harness import (
    AggregateResult,
    ExperimentConfig,
    FixedBudget,
    FixedConfidence,
    TrialRecord,
    aggregate,
    merge,
    pareto_sweep,
    run_batch,
    run_trial,
)
from .policies import (
    BoBWParams,
    BoBWPolicy,
    Exp3PParams,
    Exp3PPolicy,
    SHParams,
    SHPolicy,
    UCBAlphaParams,
    UCBAlphaPolicy,
    UCBEParams,
    UCBEPolicy,
    UPADVParams,
    UPADVPolicy,
    argmax_random_tie,
    lil_radius,
    policy_init,
)
from .rng import RngStream
from .theory import (
    BoundInputs,
    BoundResult,
    GammaInterval,
    baseline_bounds,
    bobw_failure_bound,
    bobw_feasibility,
    bobw_regret_bound_explicit,
    gamma_1,
    gamma_interval,
    iterated_log_inversion,
    pareto_lower_bounds,
)

__version__ = "0.1.0"
