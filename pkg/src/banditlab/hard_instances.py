"""Generators for the lower-bound instance families.

Two stochastic families (coin-flip and Gaussian) produce, for each arm
index, a sibling instance in which that arm is flipped to be the unique
best; a clipped-Gaussian construction produces adversarial reward tables
whose columns share one noise sequence.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Bernoulli, Gaussian, StochasticInstance
from .errors import DomainError, NonUniqueOptimum
from .rng import RngStream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdversarialInstance:
    """A fixed T-by-L reward table with its empirical-gap summaries.

    ``emp_optimum`` is the unique arm with the highest cumulative gain and
    ``emp_min_gap`` the smallest per-step gain difference between it and
    any other arm.
    """

    rewards: np.ndarray  # shape (T, L), values in [0, 1]
    label: str = ""
    cumulative_gains: np.ndarray = field(init=False, repr=False)
    emp_optimum: int = field(init=False)
    emp_min_gap: float = field(init=False)

    def __post_init__(self):
        rewards = np.asarray(self.rewards, dtype=np.float64)
        if rewards.ndim != 2:
            raise DomainError("rewards must be a T-by-L table")
        if np.any(rewards < 0.0) or np.any(rewards > 1.0):
            raise DomainError("rewards must lie in [0, 1]")
        object.__setattr__(self, "rewards", rewards)
        gains = rewards.sum(axis=0)
        top = gains.max()
        ties = np.flatnonzero(gains == top)
        if ties.size > 1:
            raise NonUniqueOptimum(
                f"arms {ties.tolist()} tie for the highest cumulative gain"
            )
        opt = int(ties[0])
        T = rewards.shape[0]
        others = np.delete(gains, opt)
        min_gap = float((top - others.max()) / T) if others.size else math.inf
        object.__setattr__(self, "cumulative_gains", gains)
        object.__setattr__(self, "emp_optimum", opt)
        object.__setattr__(self, "emp_min_gap", min_gap)

    @property
    def T(self) -> int:
        return self.rewards.shape[0]

    @property
    def n_arms(self) -> int:
        return self.rewards.shape[1]

    def emp_gap(self, i: int, j: int) -> float:
        """Per-step cumulative-gain difference between arms ``i`` and ``j``."""
        return float(
            (self.cumulative_gains[i] - self.cumulative_gains[j]) / self.T
        )

    def save_csv(self, path: str) -> None:
        """Write the table as (t, arm, reward) rows."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "arm", "reward"])
            for t in range(self.T):
                for a in range(self.n_arms):
                    writer.writerow([t, a, repr(float(self.rewards[t, a]))])


def load_adversarial_csv(path: str, label: str = "") -> AdversarialInstance:
    """Read a table written by :meth:`AdversarialInstance.save_csv`."""
    entries: dict[tuple[int, int], float] = {}
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            entries[(int(row["t"]), int(row["arm"]))] = float(row["reward"])
    T = 1 + max(t for t, _ in entries)
    L = 1 + max(a for _, a in entries)
    rewards = np.empty((T, L))
    for (t, a), r in entries.items():
        rewards[t, a] = r
    return AdversarialInstance(rewards, label=label)


def bern_family(
    L: int, d: list[float], b: float = 1.0
) -> list[StochasticInstance]:
    """Coin-flip lower-bound family with payouts in {0, b}.

    ``d`` supplies the perturbations for arms 2..L (length L-1), each in
    (0, 1/4]. Instance 1 has success probabilities (1/2, 1/2-d_2, ...);
    instance l flips arm l up to 1/2 + d_l, making it the unique best.
    """
    if len(d) != L - 1:
        raise DomainError(f"d must have length L-1={L - 1}, got {len(d)}")
    if b <= 0:
        raise DomainError(f"b must be positive, got {b}")
    for dl in d:
        if not 0.0 < dl <= 0.25:
            raise DomainError(f"each d_l must lie in (0, 1/4], got {dl}")
    base = [0.5] + [0.5 - dl for dl in d]
    out = []
    for ell in range(L):
        probs = list(base)
        if ell > 0:
            probs[ell] = 0.5 + d[ell - 1]
        out.append(
            StochasticInstance(
                tuple(Bernoulli(p, b) for p in probs),
                label=f"bern-family:L={L},instance={ell + 1}",
            )
        )
    return out


def gauss_family(
    L: int, d: list[float], sigma: float
) -> list[StochasticInstance]:
    """Gaussian lower-bound family with common variance ``sigma**2``.

    Same flip structure as :func:`bern_family` but with no cap on ``d_l``.
    """
    if len(d) != L - 1:
        raise DomainError(f"d must have length L-1={L - 1}, got {len(d)}")
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    for dl in d:
        if dl <= 0:
            raise DomainError(f"each d_l must be positive, got {dl}")
    var = sigma**2
    base = [0.5] + [0.5 - dl for dl in d]
    out = []
    for ell in range(L):
        means = list(base)
        if ell > 0:
            means[ell] = 0.5 + d[ell - 1]
        out.append(
            StochasticInstance(
                tuple(Gaussian(m, var) for m in means),
                label=f"gauss-family:L={L},instance={ell + 1}",
            )
        )
    return out


def clip_gap_probability(eps: float, sigma: float) -> float:
    """Probability that a clipped-noise round keeps its full gap."""
    return 1.0 - math.exp(-((1.0 - 2.0 * eps) ** 2) / (8.0 * sigma**2))


def adversarial_clipped_family(
    L: int,
    T: int,
    eps: float,
    sigma: float,
    instance: int,
    rng: RngStream,
) -> AdversarialInstance:
    """Clipped-Gaussian adversarial reward table for 1-based ``instance``.

    Row 1 is deterministic: arm 1 pays 1/2, arm ``instance`` pays
    ``1/2 + eps`` (when not arm 1), every other arm ``1/2 - eps``. Later
    rows clip a shared Gaussian ``Z_t`` (mean 1/2, scale ``sigma``) to
    [0, 1], with the same ``+eps`` / ``-eps`` offsets before clipping. The
    same stream reproduces the same ``Z_t`` for every ``instance``, so
    sibling tables differ only in the flipped column.

    A tie for the empirical optimum (probability zero) regenerates the
    noise from the next child stream, logged.
    """
    if not 0.0 < eps < 0.5:
        raise DomainError(f"eps must lie in (0, 1/2), got {eps}")
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if not 1 <= instance <= L:
        raise DomainError(f"instance must lie in 1..{L}, got {instance}")
    if T < 1:
        raise DomainError(f"T must be >= 1, got {T}")
    flipped = instance - 1
    for attempt in range(16):
        gen = rng.child(attempt)
        z = 0.5 + sigma * gen.standard_normal(T - 1)
        rewards = np.empty((T, L))
        rewards[0, :] = 0.5 - eps
        rewards[0, 0] = 0.5
        if flipped != 0:
            rewards[0, flipped] = 0.5 + eps
        rewards[1:, :] = np.clip(z - eps, 0.0, 1.0)[:, None]
        rewards[1:, 0] = np.clip(z, 0.0, 1.0)
        if flipped != 0:
            rewards[1:, flipped] = np.clip(z + eps, 0.0, 1.0)
        try:
            return AdversarialInstance(
                rewards,
                label=f"adv-clip:L={L},T={T},eps={eps:g},instance={instance}",
            )
        except NonUniqueOptimum:
            logger.info(
                "adversarial table tie on attempt %d; regenerating", attempt
            )
    raise NonUniqueOptimum(
        "could not generate a table with a unique empirical optimum"
    )
