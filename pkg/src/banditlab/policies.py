"""Bandit policies behind a single sequential interface.

Every policy is a mutable state machine: ``select_arm`` proposes the next
pull, ``update`` ingests the observed reward, ``recommend`` names the final
arm, and ``has_stopped`` signals completion for fixed-confidence policies.
Selection ties are broken uniformly at random from the caller's stream;
recommendation ties deterministically by lowest index.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BudgetTooSmall, DomainError, Incomplete, Stopped


def lil_radius(n: int, sigma: float, eps: float, beta: float, gamma: float) -> float:
    """Iterated-logarithm confidence radius for an arm pulled ``n`` times.

    Strictly decreasing in ``n`` and in ``gamma``. The iterated-logarithm
    argument ``log(beta + (1+eps)*n) / gamma`` must exceed 1.
    """
    if n < 1:
        raise DomainError(f"pull count must be >= 1, got {n}")
    arg = math.log(beta + (1.0 + eps) * n) / gamma
    if arg <= 1.0:
        raise DomainError(
            f"iterated-logarithm argument must exceed 1, got {arg}"
        )
    return (
        5.0
        * sigma
        * (1.0 + math.sqrt(eps))
        * math.sqrt(2.0 * (1.0 + eps) / n * math.log(arg))
    )


def argmax_random_tie(values: np.ndarray, gen: np.random.Generator) -> int:
    """Index of the maximum, breaking exact ties uniformly at random.

    Consumes one uniform from ``gen`` only when a tie occurs, so callers
    that pre-generate tie randomness stay in lockstep.
    """
    ties = np.flatnonzero(values == values.max())
    if ties.size == 1:
        return int(ties[0])
    return int(ties[int(gen.random() * ties.size)])


# ---------------------------------------------------------------------------
# Parameter records


@dataclass(frozen=True)
class BoBWParams:
    """Parameters of the iterated-logarithm index policy."""

    sigma: float
    eps: float
    beta: float
    gamma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if not 0.0 < self.eps < 1.0:
            raise DomainError(f"eps must lie in (0,1), got {self.eps}")
        if self.beta < 0:
            raise DomainError(f"beta must be >= 0, got {self.beta}")
        if not 0.0 < self.gamma < 1.0:
            raise DomainError(f"gamma must lie in (0,1), got {self.gamma}")
        cap = min(math.log(self.beta + 1.0 + self.eps) / math.e, 1.0)
        if self.gamma >= cap:
            warnings.warn(
                f"gamma={self.gamma} is outside the analyzed range (< {cap:.4g}); "
                "the policy still runs but its guarantees do not apply",
                stacklevel=2,
            )


@dataclass(frozen=True)
class UCBEParams:
    """Exploration constant of the fixed-exploration UCB policy."""

    a: float

    def __post_init__(self):
        if self.a <= 0:
            raise DomainError(f"a must be positive, got {self.a}")


@dataclass(frozen=True)
class SHParams:
    """Sequential halving takes no tunable parameters."""


@dataclass(frozen=True)
class Exp3PParams:
    """Mixing weight and learning rate of the exponential-weights policy."""

    gamma: float
    eta: float

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise DomainError(f"gamma must lie in [0,1], got {self.gamma}")
        if self.eta <= 0:
            raise DomainError(f"eta must be positive, got {self.eta}")


@dataclass(frozen=True)
class UPADVParams:
    """Uniform play takes no tunable parameters."""


@dataclass(frozen=True)
class UCBAlphaParams:
    """Exploration rate and confidence level of the stopping UCB policy."""

    alpha: float
    delta: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta must lie in (0,1), got {self.delta}")


PolicyParams = (
    BoBWParams | UCBEParams | SHParams | Exp3PParams | UPADVParams | UCBAlphaParams
)


# ---------------------------------------------------------------------------
# Policies


class Policy:
    """Common bookkeeping: step counter, pull counts, empirical means."""

    def __init__(self, L: int):
        if L < 1:
            raise DomainError(f"L must be >= 1, got {L}")
        self.L = L
        self.t = 0
        self.pull_counts = np.zeros(L, dtype=np.int64)
        self.reward_sums = np.zeros(L, dtype=np.float64)

    @property
    def empirical_means(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.where(
                self.pull_counts > 0, self.reward_sums / self.pull_counts, 0.0
            )

    def _record(self, arm: int, reward: float) -> None:
        self.t += 1
        self.pull_counts[arm] += 1
        self.reward_sums[arm] += reward

    def has_stopped(self) -> bool:
        return False

    @property
    def exhausted(self) -> bool:
        """True once the policy has no further scheduled pulls."""
        return False


class _IndexPolicy(Policy):
    """Round-robin warm-up followed by argmax of an upper-confidence index."""

    def __init__(self, L: int):
        super().__init__(L)
        self.indices = np.full(L, np.inf)

    def _index(self, arm: int) -> float:
        raise NotImplementedError

    def select_arm(self, gen: np.random.Generator) -> int:
        if self.t < self.L:
            return self.t
        return argmax_random_tie(self.indices, gen)

    def update(self, arm: int, reward: float) -> None:
        self._record(arm, reward)
        self.indices[arm] = (
            self.reward_sums[arm] / self.pull_counts[arm] + self._index(arm)
        )

    def recommend(self) -> int:
        return int(np.argmax(self.empirical_means))


class BoBWPolicy(_IndexPolicy):
    """Budget-agnostic index policy with an iterated-logarithm radius.

    The exploration parameter trades pseudo-regret (small radius, large
    ``gamma``) against identification failure (wide radius, small
    ``gamma``). Runs for exactly the caller's budget; never stops early.
    """

    def __init__(self, params: BoBWParams, L: int):
        super().__init__(L)
        self.params = params

    def _index(self, arm: int) -> float:
        p = self.params
        return lil_radius(int(self.pull_counts[arm]), p.sigma, p.eps, p.beta, p.gamma)


class UCBEPolicy(_IndexPolicy):
    """Index policy with a fixed exploration constant ``a``: radius
    ``sqrt(a / N_i)``."""

    def __init__(self, params: UCBEParams, L: int):
        super().__init__(L)
        self.params = params

    def _index(self, arm: int) -> float:
        return math.sqrt(self.params.a / self.pull_counts[arm])


class UCBAlphaPolicy(_IndexPolicy):
    """Fixed-confidence UCB with index ``mean + sqrt(alpha*log(t)/(2N))``.

    Stops once the empirical best arm's lower confidence bound clears every
    other arm's upper confidence bound at level ``delta`` (union-bound
    threshold ``log(2L*t^2/delta)``).
    """

    def __init__(self, params: UCBAlphaParams, L: int):
        super().__init__(L)
        self.params = params
        self.stopped = False

    def _index(self, arm: int) -> float:
        t = max(self.t, 2)
        return math.sqrt(
            self.params.alpha * math.log(t) / (2.0 * self.pull_counts[arm])
        )

    def select_arm(self, gen: np.random.Generator) -> int:
        if self.stopped:
            raise Stopped("policy has already stopped")
        return super().select_arm(gen)

    def update(self, arm: int, reward: float) -> None:
        self._record(arm, reward)
        # The index depends on t for every arm; refresh all of them.
        counts = self.pull_counts
        if self.t >= self.L:
            t = max(self.t, 2)
            means = self.reward_sums / counts
            radii = np.sqrt(
                self.params.alpha * math.log(t) / (2.0 * counts)
            )
            self.indices = means + radii
            stop_radii = np.sqrt(
                math.log(2.0 * self.L * t * t / self.params.delta) / (2.0 * counts)
            )
            b = int(np.argmax(means))
            upper = means + stop_radii
            upper[b] = -np.inf
            if self.L == 1 or means[b] - stop_radii[b] >= upper.max():
                self.stopped = True

    def has_stopped(self) -> bool:
        return self.stopped

    def recommend(self) -> int:
        return int(np.argmax(self.empirical_means))


class UPADVPolicy(Policy):
    """Uniform exploration with cumulative-gain recommendation."""

    def __init__(self, params: UPADVParams, L: int):
        super().__init__(L)
        self.params = params
        self.gains = np.zeros(L, dtype=np.float64)

    def select_arm(self, gen: np.random.Generator) -> int:
        return int(gen.integers(self.L))

    def update(self, arm: int, reward: float) -> None:
        self._record(arm, reward)
        self.gains[arm] += reward

    def recommend(self) -> int:
        return int(np.argmax(self.gains))


class Exp3PPolicy(Policy):
    """Exponential weights with importance-weighted gain estimates.

    Maintains a probability vector mixing a softmax of the cumulative
    estimates with the uniform distribution; every probability stays at or
    above ``gamma / L``. With ``gamma = 1`` the selection law is exactly
    uniform.
    """

    def __init__(self, params: Exp3PParams, L: int):
        super().__init__(L)
        self.params = params
        self.est_gains = np.zeros(L, dtype=np.float64)
        self.probs = np.full(L, 1.0 / L)

    def select_arm(self, gen: np.random.Generator) -> int:
        u = gen.random()
        return int(np.searchsorted(np.cumsum(self.probs), u, side="right").clip(0, self.L - 1))

    def update(self, arm: int, reward: float) -> None:
        self._record(arm, reward)
        self.est_gains[arm] += reward / self.probs[arm]
        z = self.params.eta * self.est_gains
        w = np.exp(z - z.max())
        self.probs = (1.0 - self.params.gamma) * w / w.sum() + self.params.gamma / self.L

    def recommend(self) -> int:
        return int(np.argmax(self.est_gains))


class SHPolicy(Policy):
    """Sequential halving over a fixed budget.

    Splits the budget into ``ceil(log2 L)`` phases, pulls every surviving
    arm equally often within a phase, and keeps the top half by fresh
    within-phase means. Residual budget after the last phase is unused.
    """

    def __init__(self, params: SHParams, L: int, T: int):
        super().__init__(L)
        self.params = params
        self.T = T
        self.n_phases = math.ceil(math.log2(L)) if L > 1 else 0
        self.survivors = list(range(L))
        if self.n_phases > 0:
            first = T // (L * self.n_phases)
            if first == 0:
                raise BudgetTooSmall(
                    f"budget T={T} gives 0 pulls per arm in the first phase "
                    f"(need T >= {L * self.n_phases})"
                )
        self.phase = 0
        self._phase_pulls = self._pulls_per_arm()
        self._cursor = 0  # position within the current phase's pull sequence
        self._phase_sums = np.zeros(L)
        self._phase_counts = np.zeros(L, dtype=np.int64)

    def _pulls_per_arm(self) -> int:
        if self.phase >= self.n_phases:
            return 0
        return self.T // (len(self.survivors) * self.n_phases)

    @property
    def exhausted(self) -> bool:
        return self.phase >= self.n_phases

    def select_arm(self, gen: np.random.Generator) -> int:
        if self.exhausted:
            raise Stopped("halving schedule is complete")
        return self.survivors[self._cursor // self._phase_pulls]

    def update(self, arm: int, reward: float) -> None:
        self._record(arm, reward)
        self._phase_sums[arm] += reward
        self._phase_counts[arm] += 1
        self._cursor += 1
        if self._cursor == self._phase_pulls * len(self.survivors):
            self._finish_phase()

    def _finish_phase(self) -> None:
        keep = math.ceil(len(self.survivors) / 2)
        means = {
            a: self._phase_sums[a] / self._phase_counts[a] for a in self.survivors
        }
        ranked = sorted(self.survivors, key=lambda a: (-means[a], a))
        self.survivors = sorted(ranked[:keep])
        self.phase += 1
        self._cursor = 0
        self._phase_sums[:] = 0.0
        self._phase_counts[:] = 0
        if not self.exhausted:
            self._phase_pulls = self._pulls_per_arm()

    def recommend(self) -> int:
        if not self.exhausted:
            raise Incomplete("halving schedule has not finished")
        return self.survivors[0]


def policy_init(params: PolicyParams, L: int, T_or_cap: int) -> Policy:
    """Instantiate the policy matching a parameter record."""
    if isinstance(params, BoBWParams):
        return BoBWPolicy(params, L)
    if isinstance(params, UCBEParams):
        return UCBEPolicy(params, L)
    if isinstance(params, UCBAlphaParams):
        return UCBAlphaPolicy(params, L)
    if isinstance(params, SHParams):
        return SHPolicy(params, L, T_or_cap)
    if isinstance(params, Exp3PParams):
        return Exp3PPolicy(params, L)
    if isinstance(params, UPADVParams):
        return UPADVPolicy(params, L)
    raise DomainError(f"unknown policy parameters {params!r}")
