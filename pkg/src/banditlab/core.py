"""Instance representation, reward sampling, and gap/hardness arithmetic.

A stochastic instance is an ordered list of arm models plus a sub-Gaussian
scale. Every downstream module (policies, theory evaluators, harness)
consumes the types defined here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, NonUniqueOptimum
from .rng import RngStream


@dataclass(frozen=True)
class Bernoulli:
    """Rewards in {0, scale} with success probability ``p``.

    The ``scale`` field lets a Bernoulli arm pay out an arbitrary positive
    amount on success (default 1), so scaled coin-flip families stay within
    this family.
    """

    p: float
    scale: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"Bernoulli p must lie in [0, 1], got {self.p}")
        if self.scale <= 0.0:
            raise DomainError(f"Bernoulli scale must be positive, got {self.scale}")

    @property
    def mean(self) -> float:
        return self.p * self.scale

    @property
    def sub_gaussian_scale(self) -> float:
        # Bounded support of width `scale`.
        return self.scale / 2.0

    def sample(self, gen: np.random.Generator, size: int | None = None):
        draws = gen.random(size=size) < self.p
        if size is None:
            return self.scale if draws else 0.0
        return draws.astype(np.float64) * self.scale


@dataclass(frozen=True)
class Gaussian:
    """Normal rewards with the given mean and variance."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0.0:
            raise DomainError(f"Gaussian variance must be >= 0, got {self.variance}")
        if not math.isfinite(self.mean):
            raise DomainError("Gaussian mean must be finite")

    @property
    def sub_gaussian_scale(self) -> float:
        return math.sqrt(self.variance)

    def sample(self, gen: np.random.Generator, size: int | None = None):
        if self.variance == 0.0:
            if size is None:
                return self.mean
            return np.full(size, self.mean)
        std = math.sqrt(self.variance)
        if size is None:
            return self.mean + std * gen.standard_normal()
        return self.mean + std * gen.standard_normal(size)


@dataclass(frozen=True)
class LogDomainGaussian:
    """Unit-variance normal rewards centered at a log-transformed mean.

    Used for assay-derived arms whose native quantity is a log percentage.
    """

    log_mean: float

    def __post_init__(self):
        if not math.isfinite(self.log_mean):
            raise DomainError("log_mean must be finite")

    @property
    def mean(self) -> float:
        return self.log_mean

    @property
    def sub_gaussian_scale(self) -> float:
        return 1.0

    def sample(self, gen: np.random.Generator, size: int | None = None):
        if size is None:
            return self.log_mean + gen.standard_normal()
        return self.log_mean + gen.standard_normal(size)


ArmModel = Union[Bernoulli, Gaussian, LogDomainGaussian]

_FAMILY_NAMES = {
    Bernoulli: "bernoulli",
    Gaussian: "gaussian",
    LogDomainGaussian: "log_domain_gaussian",
}


@dataclass(frozen=True)
class StochasticInstance:
    """An ordered collection of arms with a common sub-Gaussian scale.

    If ``sub_gaussian_scale`` is omitted it defaults to :func:`default_scale`.
    """

    arms: tuple[ArmModel, ...]
    sub_gaussian_scale: float | None = None
    label: str = ""
    arm_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        arms = tuple(self.arms)
        object.__setattr__(self, "arms", arms)
        if len(arms) < 1:
            raise DomainError("an instance needs at least one arm")
        if self.arm_labels is not None:
            labels = tuple(self.arm_labels)
            if len(labels) != len(arms):
                raise DomainError("arm_labels must match the number of arms")
            object.__setattr__(self, "arm_labels", labels)
        if self.sub_gaussian_scale is None:
            object.__setattr__(self, "sub_gaussian_scale", default_scale(self))
        if self.sub_gaussian_scale <= 0.0:
            raise DomainError("sub_gaussian_scale must be positive")

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    @property
    def means(self) -> np.ndarray:
        return np.array([arm.mean for arm in self.arms], dtype=np.float64)


@dataclass(frozen=True)
class GapProfile:
    """Optimality gaps of an instance with a unique best arm.

    ``gaps[optimal_arm] == 0``; ``min_gap`` is the smallest nonzero gap
    (``inf`` for a single-arm instance). ``exceeds_unit`` flags instances
    whose largest gap is above 1, where analyses that assume rescaled
    rewards do not directly apply.
    """

    optimal_arm: int
    gaps: tuple[float, ...]
    min_gap: float
    exceeds_unit: bool = False


@dataclass(frozen=True)
class Hardness:
    """Scalar hardness summaries of a gap profile.

    ``h1`` is the sum of inverse gaps, ``h2`` the sum of inverse squared
    gaps. ``hp_prime`` and ``cp`` are the rank-weighted variants for a
    given exponent ``p`` (present only when ``p`` was supplied).
    """

    h1: float
    h2: float
    hp_prime: float | None = None
    cp: float | None = None


def default_scale(instance: StochasticInstance) -> float:
    """Default sub-Gaussian scale of an instance.

    Takes the maximum of the per-arm scales: half the payout range for a
    Bernoulli arm, the standard deviation for a Gaussian arm, and 1 for a
    log-domain Gaussian arm.
    """
    return max(arm.sub_gaussian_scale for arm in instance.arms)


def sample_reward(
    instance: StochasticInstance,
    arm: int,
    rng: RngStream | np.random.Generator,
) -> float:
    """Draw one independent reward from the given arm.

    Accepts either a live generator (which advances) or an ``RngStream``
    (which yields the first draw of that stream).
    """
    if not 0 <= arm < instance.n_arms:
        raise IndexError(f"arm index {arm} out of range for L={instance.n_arms}")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    return float(instance.arms[arm].sample(gen))


def gap_profile(instance: StochasticInstance) -> GapProfile:
    """Compute optimality gaps, requiring a unique best arm."""
    means = instance.means
    best = float(np.max(means))
    ties = np.flatnonzero(means == best)
    if ties.size > 1:
        raise NonUniqueOptimum(
            f"arms {ties.tolist()} tie for the maximal mean {best}"
        )
    optimal = int(ties[0])
    gaps = best - means
    nonzero = gaps[gaps > 0]
    min_gap = float(nonzero.min()) if nonzero.size else math.inf
    return GapProfile(
        optimal_arm=optimal,
        gaps=tuple(float(g) for g in gaps),
        min_gap=min_gap,
        exceeds_unit=bool(np.any(gaps > 1.0)),
    )


def hardness(profile: GapProfile, p: float | None = None) -> Hardness:
    """Closed-form hardness sums of a gap profile.

    With ``p`` given (``p > 0``), also computes the rank-weighted quantity
    ``max_i i^p / gap_i^2`` under the canonical non-increasing-mean
    ordering (1-based ranks, best arm first) and the companion constant
    ``2^-p + sum_{r=2..L} r^-p``.
    """
    gaps = np.array(profile.gaps, dtype=np.float64)
    nonzero = gaps[gaps > 0]
    h1 = float(np.sum(1.0 / nonzero)) if nonzero.size else 0.0
    h2 = float(np.sum(1.0 / nonzero**2)) if nonzero.size else 0.0
    hp_prime = None
    cp = None
    if p is not None:
        if p <= 0:
            raise DomainError(f"p must be positive, got {p}")
        ordered = np.sort(gaps)  # ascending gaps == non-increasing means
        ranks = np.arange(2, ordered.size + 1, dtype=np.float64)
        tail = ordered[1:]
        hp_prime = float(np.max(ranks**p / tail**2)) if tail.size else 0.0
        cp = float(2.0 ** (-p) + np.sum(ranks ** (-p)))
    return Hardness(h1=h1, h2=h2, hp_prime=hp_prime, cp=cp)


def save_instance(instance: StochasticInstance, path: str) -> None:
    """Write an instance to a JSON spec file (lossless round-trip).

    Only single-family instances are serializable; the schema stores the
    family name, the per-arm distribution parameters, and the scale.
    """
    families = {type(arm) for arm in instance.arms}
    if len(families) != 1:
        raise DomainError("only single-family instances can be serialized")
    fam = families.pop()
    doc: dict = {
        "label": instance.label,
        "family": _FAMILY_NAMES[fam],
        "sub_gaussian_scale": instance.sub_gaussian_scale,
    }
    if fam is Bernoulli:
        doc["means"] = [arm.p for arm in instance.arms]
        scales = [arm.scale for arm in instance.arms]
        if any(s != 1.0 for s in scales):
            doc["reward_scales"] = scales
    elif fam is Gaussian:
        doc["means"] = [arm.mean for arm in instance.arms]
        doc["variances"] = [arm.variance for arm in instance.arms]
    else:
        doc["means"] = [arm.log_mean for arm in instance.arms]
    if instance.arm_labels is not None:
        doc["arm_labels"] = list(instance.arm_labels)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_instance(path: str) -> StochasticInstance:
    """Read an instance spec file written by :func:`save_instance`."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    family = doc["family"]
    means = doc["means"]
    if family == "bernoulli":
        scales = doc.get("reward_scales", [1.0] * len(means))
        arms = tuple(Bernoulli(p, s) for p, s in zip(means, scales))
    elif family == "gaussian":
        arms = tuple(Gaussian(m, v) for m, v in zip(means, doc["variances"]))
    elif family == "log_domain_gaussian":
        arms = tuple(LogDomainGaussian(m) for m in means)
    else:
        raise DomainError(f"unknown family {family!r}")
    labels = doc.get("arm_labels")
    return StochasticInstance(
        arms=arms,
        sub_gaussian_scale=doc.get("sub_gaussian_scale"),
        label=doc.get("label", ""),
        arm_labels=tuple(labels) if labels is not None else None,
    )


def bernoulli_line(L: int, delta: float, top: float = 0.5) -> StochasticInstance:
    """The standard synthetic family: one arm at ``top``, the rest at
    ``top - delta``."""
    if L < 1:
        raise DomainError("L must be >= 1")
    if L > 1 and not 0 < delta <= top:
        raise DomainError(f"delta must lie in (0, {top}], got {delta}")
    arms = [Bernoulli(top)] + [Bernoulli(top - delta) for _ in range(L - 1)]
    return StochasticInstance(tuple(arms), label=f"bern:L={L},delta={delta:g}")
