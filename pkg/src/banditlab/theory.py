"""Closed-form bound, threshold, and interval evaluators.

Every function here is a pure evaluator of a displayed formula: failure and
regret bounds for the iterated-logarithm index policy, the admissible range
of its exploration parameter, and the matching bounds for the baseline
policies and lower-bound constructions. Nothing in this module simulates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError

# Inner confidence constant of the iterated-logarithm analysis. The tight
# value 1.4 appears in the threshold/inversion displays; the widened value 2
# appears in the sample-size (feasibility) display. Both are named here and
# never inlined.
A1_TIGHT = 1.4
A1_WIDE = 2.0


@dataclass
class BoundInputs:
    """Bag of named quantities consumed by the bound evaluators.

    Only the fields a given evaluator reads need to be set; evaluators
    raise ``DomainError`` when a required field is missing or out of range.
    """

    T: float | None = None
    L: int | None = None
    sigma: float | None = None
    eps: float | None = None
    beta: float | None = None
    gamma: float | None = None
    delta_min: float | None = None  # minimal optimality gap
    gaps: Sequence[float] | None = None
    h2: float | None = None
    h2_bar: float | None = None  # upper bound on h2
    delta_lower: float | None = None  # lower bound on the minimal gap
    reward_range: float | None = None
    variance_bound: float | None = None
    phi: float | None = None
    psi: float | None = None
    alpha: float | None = None
    confidence: float | None = None  # delta of a fixed-confidence run
    eta: float | None = None
    emp_gap: float | None = None  # empirical minimal gap of a reward table
    p: float | None = None


@dataclass(frozen=True)
class BoundResult:
    """A bound evaluation plus its side-condition bookkeeping.

    ``vacuous`` marks probability bounds exceeding 1; ``condition_ok`` is
    ``None`` for bounds without a side condition, otherwise whether the
    condition held (the value is reported either way).
    """

    value: float
    vacuous: bool = False
    condition_ok: bool | None = None


def _require(value, name: str) -> float:
    if value is None:
        raise DomainError(f"bound input {name!r} is required")
    return value


def gamma_1(
    delta: float,
    h2: float,
    sigma: float,
    eps: float,
    beta: float,
    T: float,
    L: int,
) -> float:
    """Smallest admissible exploration parameter for the failure bound.

    Strictly decreasing in ``T``; an underflowing exponential returns
    exactly 0.
    """
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if T <= L:
        raise DomainError(f"T must exceed L, got T={T}, L={L}")
    two_a1 = 2.0 * A1_TIGHT
    prefactor = math.sqrt(
        two_a1
        * math.log(6.0 * math.sqrt(two_a1) * sigma * (1.0 + eps) ** 2 / delta + beta)
    )
    exponent = -(T - L) / (144.0 * sigma**2 * (1.0 + eps) ** 3 * (h2 + delta**-2))
    return prefactor * math.exp(exponent)


@dataclass(frozen=True)
class GammaInterval:
    """Candidate range for the exploration parameter.

    ``empty`` is true when the lower endpoint exceeds the upper one; both
    endpoints are still reported for inspection.
    """

    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return self.lo > self.hi


def gamma_interval(
    L: int,
    sigma: float,
    T: float,
    eps: float,
    beta: float,
    delta_lower: float,
    h2_bar: float,
) -> GammaInterval:
    """Admissible interval for the exploration parameter.

    The lower endpoint is :func:`gamma_1` at the pessimistic gap/hardness
    pair; the upper endpoint is the minimum of ``log(beta+1+eps)/e``,
    ``log(T)/T``, and ``1/L``.
    """
    lo = gamma_1(delta_lower, h2_bar, sigma, eps, beta, T, L)
    hi = min(math.log(beta + 1.0 + eps) / math.e, math.log(T) / T, 1.0 / L)
    return GammaInterval(lo=lo, hi=hi)


def bobw_failure_bound(gamma: float, eps: float, L: int) -> float:
    """Failure-probability bound of the index policy (may be vacuous)."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0,1), got {eps}")
    if gamma <= 0.0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    return (2.0 * L * (2.0 + eps) / eps) * (gamma / math.log(1.0 + eps)) ** (1.0 + eps)


def bobw_feasibility(
    T: float,
    L: int,
    sigma: float,
    eps: float,
    beta: float,
    gamma: float,
    gaps: Sequence[float],
) -> bool:
    """Sample-size condition under which :func:`bobw_failure_bound` holds.

    Each gap is floored at the minimal nonzero gap before entering the sum,
    so the best arm contributes with that floor.
    """
    nonzero = [g for g in gaps if g > 0]
    if not nonzero:
        raise DomainError("at least one positive gap is required")
    delta = min(nonzero)
    total = 0.0
    for g in gaps:
        d = max(delta, g)
        inner = math.log(11.0 * sigma * (1.0 + eps) ** 2 / d + beta)
        total += (72.0 * sigma**2 / d**2) * math.log(
            (2.0 * A1_TIGHT / gamma**2) * inner
        )
    return (T - L) / (1.0 + eps) ** 3 >= total


def bobw_regret_bound_explicit(
    T: float,
    L: int,
    sigma: float,
    eps: float,
    beta: float,
    gamma: float,
    gaps: Sequence[float],
) -> float:
    """Explicit constant-bearing pseudo-regret upper bound.

    ``gaps`` are the nonzero optimality gaps of the suboptimal arms; an
    empty sequence (single-arm instance) leaves only the exploration-failure
    term.
    """
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0,1), got {gamma}")
    if any(g <= 0 for g in gaps):
        raise DomainError("all gaps must be positive")
    two_a1 = 2.0 * A1_TIGHT
    head = sum(2.0 * g for g in gaps)
    middle = 0.0
    for g in gaps:
        inner = math.log(
            10.0 * math.sqrt(two_a1) * sigma * (1.0 + math.sqrt(eps)) * (1.0 + eps)
            / (g * math.sqrt(gamma))
            + beta
        )
        middle += (
            200.0 * sigma**2 * (1.0 + math.sqrt(eps)) ** 2 * (1.0 + eps) / g
        ) * math.log((two_a1 / gamma) * inner)
    tail = (2.0 * T * L * (2.0 + eps) / eps) * (
        gamma / math.log(1.0 + eps)
    ) ** (1.0 + eps)
    return head + middle + tail


def iterated_log_inversion(c: float, a: float, rho: float, b: float) -> float:
    """Closed-form dominating value for the fixed-point relation
    ``tau <= c * log(log(a*tau + b) / rho)``.

    Requires ``1.4*a*c/rho + b >= e``.
    """
    arg = A1_TIGHT * a * c / rho + b
    if arg < math.e:
        raise DomainError(
            f"inversion requires 1.4*a*c/rho + b >= e, got {arg}"
        )
    return c * math.log((A1_TIGHT / rho) * math.log(arg))


BASELINE_KINDS = (
    "sh_failure",
    "ucbe_regret",
    "ucbe_failure",
    "carpentier_lower",
    "exp3p_regret",
    "exp3p_failure",
    "adv_bai_lower",
    "adv_tradeoff_lower",
)


def baseline_bounds(kind: str, inputs: BoundInputs) -> BoundResult:
    """Evaluate one of the baseline/lower-bound closed forms by name.

    Side conditions are evaluated and reported via ``condition_ok``; the
    bound value is returned regardless. Probability bounds above 1 are
    flagged vacuous, never clamped.
    """
    if kind == "sh_failure":
        T = _require(inputs.T, "T")
        L = _require(inputs.L, "L")
        h2 = _require(inputs.h2, "h2")
        log2L = math.log2(L)
        value = 3.0 * log2L * math.exp(-T / (8.0 * h2 * log2L))
        return BoundResult(value, vacuous=value > 1.0)
    if kind == "ucbe_regret":
        T = _require(inputs.T, "T")
        L = _require(inputs.L, "L")
        alpha = _require(inputs.alpha, "alpha")
        gaps = _require(inputs.gaps, "gaps")
        h2 = _require(inputs.h2, "h2")
        nonzero = [g for g in gaps if g > 0]
        value = 2.0 * alpha**2 * sum(math.log(T) / g for g in nonzero) + (
            1.0 + math.pi**2 / 3.0
        ) * sum(nonzero)
        ok = alpha * math.log(T) <= 25.0 * (T - L) / (36.0 * h2)
        return BoundResult(value, condition_ok=ok)
    if kind == "ucbe_failure":
        T = _require(inputs.T, "T")
        L = _require(inputs.L, "L")
        alpha = _require(inputs.alpha, "alpha")
        value = 2.0 * L * T ** (1.0 - 2.0 * alpha / 25.0)
        return BoundResult(value, vacuous=value > 1.0, condition_ok=alpha > 12.5)
    if kind == "carpentier_lower":
        T = _require(inputs.T, "T")
        L = _require(inputs.L, "L")
        h2 = _require(inputs.h2, "h2")
        value = (1.0 / 6.0) * math.exp(-400.0 * T / (h2 * math.log(L)))
        return BoundResult(value, vacuous=value > 1.0)
    if kind == "exp3p_regret":
        T = _require(inputs.T, "T")
        L = _require(inputs.L, "L")
        gamma = _require(inputs.gamma, "gamma")
        eta = _require(inputs.eta, "eta")
        conf = _require(inputs.confidence, "confidence")
        value = (
            gamma * T
            + eta * L * T
            + math.log(L**2 * T / (eta * conf))
            + math.log(L) / eta
        )
        return BoundResult(value)
    if kind == "exp3p_failure":
        T = _require(inputs.T, "T")
        L = _require(inputs.L, "L")
        gamma = _require(inputs.gamma, "gamma")
        gap = _require(inputs.emp_gap, "emp_gap")
        value = L * math.exp(-gamma * T * gap**2 / (4.0 * L))
        return BoundResult(value, vacuous=value > 1.0)
    if kind == "adv_bai_lower":
        T = _require(inputs.T, "T")
        L = _require(inputs.L, "L")
        gap = _require(inputs.emp_gap, "emp_gap")
        value = (2.0 / 65.0) * math.exp(-150.0 * T * gap**2 / L)
        return BoundResult(value, vacuous=value > 1.0)
    if kind == "adv_tradeoff_lower":
        L = _require(inputs.L, "L")
        psi = _require(inputs.psi, "psi")
        gap = _require(inputs.emp_gap, "emp_gap")
        value = psi * (L - 1) / (103.0 * gap)
        return BoundResult(value)
    raise DomainError(f"unknown bound kind {kind!r}")


PARETO_KINDS = ("b1", "b2", "b1_var", "b2_var")


def pareto_lower_bounds(kind: str, inputs: BoundInputs) -> float:
    """Regret lower bounds over bounded / variance-constrained instance sets.

    ``b1``/``b2`` use the reward-range form; ``b1_var``/``b2_var`` the
    variance form.
    """
    phi = _require(inputs.phi, "phi")
    delta_lower = _require(inputs.delta_lower, "delta_lower")
    if kind == "b1":
        L = _require(inputs.L, "L")
        r = _require(inputs.reward_range, "reward_range")
        return phi * (L - 1) * r / (8.0 * delta_lower)
    if kind == "b2":
        h2_bar = _require(inputs.h2_bar, "h2_bar")
        r = _require(inputs.reward_range, "reward_range")
        return phi * delta_lower * h2_bar * r**3 / 8.0
    if kind == "b1_var":
        L = _require(inputs.L, "L")
        v = _require(inputs.variance_bound, "variance_bound")
        return phi * (L - 1) * v / (2.0 * delta_lower)
    if kind == "b2_var":
        h2_bar = _require(inputs.h2_bar, "h2_bar")
        v = _require(inputs.variance_bound, "variance_bound")
        return phi * delta_lower * h2_bar * v / 2.0
    raise DomainError(f"unknown pareto bound kind {kind!r}")
