import math

import numpy as np
import pytest

from banditlab import (
    BoundInputs,
    DomainError,
    baseline_bounds,
    bobw_failure_bound,
    bobw_feasibility,
    bobw_regret_bound_explicit,
    gamma_1,
    gamma_interval,
    iterated_log_inversion,
    pareto_lower_bounds,
)

E = math.e


class TestGamma1:
    def test_strictly_decreasing_in_T(self):
        h2 = 255 / 0.05**2
        values = [
            gamma_1(0.05, h2, 0.5, 0.01, E, T, 256)
            for T in (1e6, 1e7, 1e8)
        ]
        assert values[0] > values[1] > values[2] > 0

    def test_boundary_equals_prefactor(self):
        # At T = L+1 the exponent is essentially 0.
        v = gamma_1(0.1, 100.0, 0.5, 0.01, E, 257, 256)
        prefactor = math.sqrt(
            2.8 * math.log(6 * math.sqrt(2.8) * 0.5 * 1.01**2 / 0.1 + E)
        )
        assert v == pytest.approx(prefactor, rel=1e-3)

    def test_underflow_returns_zero(self):
        assert gamma_1(0.1, 100.0, 0.5, 0.01, E, 1e12, 2) == 0.0

    def test_domain_error(self):
        with pytest.raises(DomainError):
            gamma_1(0.1, 100.0, 0.5, 0.01, E, 10, 10)
        with pytest.raises(DomainError):
            gamma_1(0.0, 100.0, 0.5, 0.01, E, 100, 10)

    def test_increasing_in_h2(self):
        lo = gamma_1(0.05, 1e4, 0.5, 0.01, E, 1e6, 64)
        hi = gamma_1(0.05, 5e4, 0.5, 0.01, E, 1e6, 64)
        assert hi > lo


class TestGammaInterval:
    H2_BAR = 255 / 0.05**2

    def interval(self, T):
        return gamma_interval(256, 0.5, T, 0.01, E, 0.05, self.H2_BAR)

    def test_upper_endpoints(self):
        for T, expected in [
            (1e6, 1.38e-5),
            (1e7, 1.61e-6),
            (1e8, 1.84e-7),
            (1e9, 2.07e-8),
        ]:
            hi = self.interval(T).hi
            assert hi == pytest.approx(math.log(T) / T, rel=1e-12)
            assert hi == pytest.approx(expected, rel=5e-3)

    def test_upper_endpoint_is_logT_over_T(self):
        for T in (1e6, 1e7, 1e8, 1e9):
            assert math.log(T) / T < min(math.log(E + 1.01) / E, 1 / 256)
            assert self.interval(T).hi == math.log(T) / T

    def test_empty_branch(self):
        assert self.interval(1e6).empty
        assert not self.interval(1e9).empty


class TestFailureBound:
    def test_power_law_in_gamma(self):
        small = bobw_failure_bound(1e-9, 0.01, 64)
        assert small < bobw_failure_bound(1e-6, 0.01, 64)
        assert small < 1e-2

    def test_frozen_value(self):
        # Independent transcription of the display.
        eps, gamma, L = 0.01, 1e-6, 64
        expected = (
            2.0 * L * ((2.0 + eps) / eps) * (gamma / math.log1p(eps)) ** (1.0 + eps)
        )
        got = bobw_failure_bound(gamma, eps, L)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(2.35, rel=5e-3)
        assert got > 1.0  # vacuous at these parameters

    def test_feasibility_at_T_equal_L(self):
        assert not bobw_feasibility(64, 64, 0.5, 0.01, E, 1e-3, [0.1] * 63)

    def test_feasibility_large_T(self):
        assert bobw_feasibility(1e8, 64, 0.5, 0.01, E, 1e-3, [0.0] + [0.1] * 63)


class TestRegretBoundExplicit:
    def test_single_arm_reduces_to_tail(self):
        eps, gamma, T = 0.01, 1e-3, 1e5
        got = bobw_regret_bound_explicit(T, 1, 0.5, eps, E, gamma, [])
        expected = (2.0 * T * 1 * (2.0 + eps) / eps) * (
            gamma / math.log(1.0 + eps)
        ) ** (1.0 + eps)
        assert got == pytest.approx(expected, rel=1e-12)

    def test_dual_transcription(self):
        T, L, sigma, eps, beta, gamma = 1e5, 2, 0.5, 0.01, E, 1e-3
        gaps = [0.1]
        got = bobw_regret_bound_explicit(T, L, sigma, eps, beta, gamma, gaps)
        # Second, independently written transcription.
        sq = math.sqrt(eps)
        total = 0.0
        for d in gaps:
            total += 2.0 * d
            inner = 10.0 * math.sqrt(2.8) * sigma * (1 + sq) * (1 + eps)
            inner = math.log(inner / (d * math.sqrt(gamma)) + beta)
            total += (200.0 * sigma**2 * (1 + sq) ** 2 * (1 + eps) / d) * math.log(
                (2.8 / gamma) * inner
            )
        total += (2.0 * T * L * (2 + eps) / eps) * (gamma / math.log(1 + eps)) ** (
            1 + eps
        )
        assert got == pytest.approx(total, rel=1e-12)
        assert got > 0

    def test_middle_term_decreasing_in_gamma(self):
        # Strip the tail term by subtracting it off.
        def middle(gamma):
            eps = 0.01
            full = bobw_regret_bound_explicit(1e5, 2, 0.5, eps, E, gamma, [0.1])
            tail = (2.0 * 1e5 * 2 * (2 + eps) / eps) * (
                gamma / math.log(1 + eps)
            ) ** (1 + eps)
            return full - tail

        assert middle(1e-6) > middle(1e-3) > middle(1e-1)

    def test_zero_gap_rejected(self):
        with pytest.raises(DomainError):
            bobw_regret_bound_explicit(1e5, 2, 0.5, 0.01, E, 1e-3, [0.0])

    def test_gap_scaling(self):
        base = bobw_regret_bound_explicit(1e3, 3, 0.5, 0.01, E, 1e-3, [0.1, 0.1])
        doubled = bobw_regret_bound_explicit(1e3, 3, 0.5, 0.01, E, 1e-3, [0.2, 0.2])
        # Doubling gaps roughly halves the dominant 1/gap factor.
        assert doubled < base


class TestIteratedLogInversion:
    def test_frozen_value(self):
        got = iterated_log_inversion(100.0, 1.01, 0.1, E)
        expected = 100.0 * math.log(
            (1.4 / 0.1) * math.log(1.4 * 1.01 * 100.0 / 0.1 + E)
        )
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(462.1, rel=1e-3)

    def test_monotone_in_rho(self):
        assert iterated_log_inversion(100.0, 1.01, 0.01, E) > iterated_log_inversion(
            100.0, 1.01, 0.1, E
        )

    def test_condition_guard(self):
        with pytest.raises(DomainError):
            iterated_log_inversion(1e-6, 1e-6, 10.0, 0.0)

    def test_dominates_fixed_points(self):
        gen = np.random.default_rng(1)
        for _ in range(200):
            c = gen.uniform(1.0, 200.0)
            a = gen.uniform(0.5, 2.0)
            rho = gen.uniform(0.01, 0.5)
            b = gen.uniform(E, 5.0)
            if 1.4 * a * c / rho + b < E:
                continue
            bound = iterated_log_inversion(c, a, rho, b)
            taus = np.linspace(1e-6, 5.0 * bound, 2000)
            ok = taus <= c * np.log(np.log(a * taus + b) / rho)
            assert taus[ok].max(initial=0.0) <= bound + 1e-9


class TestBaselineBounds:
    def test_carpentier_lower(self):
        got = baseline_bounds(
            "carpentier_lower", BoundInputs(T=100, L=10, h2=1000)
        )
        expected = math.exp(-400.0 * 100.0 / (1000.0 * math.log(10))) / 6.0
        assert got.value == pytest.approx(expected, rel=1e-12)
        assert got.value == pytest.approx(4.8e-9, rel=2e-2)

    def test_ucbe_failure(self):
        got = baseline_bounds("ucbe_failure", BoundInputs(T=1e4, L=2, alpha=13))
        assert got.value == pytest.approx(4.0 * (1e4) ** (-0.04), rel=1e-12)
        assert got.value == pytest.approx(2.77, rel=5e-3)
        assert got.vacuous
        assert got.condition_ok is True

    def test_ucbe_failure_condition(self):
        got = baseline_bounds("ucbe_failure", BoundInputs(T=1e4, L=2, alpha=10))
        assert got.condition_ok is False

    def test_sh_failure_boundary(self):
        got = baseline_bounds("sh_failure", BoundInputs(T=0, L=8, h2=100))
        assert got.value == pytest.approx(3.0 * math.log2(8), rel=1e-12)

    def test_sh_failure_value(self):
        got = baseline_bounds("sh_failure", BoundInputs(T=4000, L=4, h2=33.0))
        expected = 3.0 * 2.0 * math.exp(-4000.0 / (8.0 * 33.0 * 2.0))
        assert got.value == pytest.approx(expected, rel=1e-12)

    def test_ucbe_regret_with_condition(self):
        inputs = BoundInputs(
            T=1e5, L=3, alpha=2.0, gaps=[0.0, 0.1, 0.2], h2=125.0
        )
        got = baseline_bounds("ucbe_regret", inputs)
        expected = 2.0 * 4.0 * (math.log(1e5) / 0.1 + math.log(1e5) / 0.2) + (
            1.0 + math.pi**2 / 3.0
        ) * 0.3
        assert got.value == pytest.approx(expected, rel=1e-12)
        assert got.condition_ok is True

    def test_exp3p_regret(self):
        inputs = BoundInputs(T=1e4, L=4, gamma=0.1, eta=1e-3, confidence=0.01)
        got = baseline_bounds("exp3p_regret", inputs)
        expected = (
            0.1 * 1e4
            + 1e-3 * 4 * 1e4
            + math.log(16 * 1e4 / (1e-3 * 0.01))
            + math.log(4) / 1e-3
        )
        assert got.value == pytest.approx(expected, rel=1e-12)

    def test_exp3p_failure(self):
        inputs = BoundInputs(T=1e4, L=4, gamma=1.0, emp_gap=0.05)
        got = baseline_bounds("exp3p_failure", inputs)
        expected = 4.0 * math.exp(-1.0 * 1e4 * 0.05**2 / 16.0)
        assert got.value == pytest.approx(expected, rel=1e-12)

    def test_adversarial_lower_bounds(self):
        got = baseline_bounds("adv_bai_lower", BoundInputs(T=1e4, L=4, emp_gap=0.01))
        expected = (2.0 / 65.0) * math.exp(-150.0 * 1e4 * 1e-4 / 4.0)
        assert got.value == pytest.approx(expected, rel=1e-12)
        got = baseline_bounds(
            "adv_tradeoff_lower", BoundInputs(L=11, psi=10.0, emp_gap=0.1)
        )
        assert got.value == pytest.approx(10.0 * 10.0 / (103.0 * 0.1), rel=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            baseline_bounds("nope", BoundInputs())

    def test_missing_input(self):
        with pytest.raises(DomainError):
            baseline_bounds("sh_failure", BoundInputs(T=1.0, L=4))


class TestParetoLowerBounds:
    def test_b1_substitution(self):
        inputs = BoundInputs(phi=10.0, L=11, reward_range=1.0, delta_lower=0.1)
        assert pareto_lower_bounds("b1", inputs) == pytest.approx(125.0, rel=1e-12)

    def test_b2_reduces_to_b1_at_equality(self):
        # With delta * h2 = (L-1)/delta and unit range the two coincide.
        L, delta = 11, 0.1
        h2_bar = (L - 1) / delta**2
        inputs = BoundInputs(
            phi=10.0, L=L, reward_range=1.0, delta_lower=delta, h2_bar=h2_bar
        )
        assert pareto_lower_bounds("b2", inputs) == pytest.approx(
            pareto_lower_bounds("b1", inputs), rel=1e-12
        )

    def test_variance_forms(self):
        inputs = BoundInputs(
            phi=10.0,
            L=11,
            reward_range=1.0,
            variance_bound=0.25,
            delta_lower=0.1,
            h2_bar=1000.0,
        )
        b1v = pareto_lower_bounds("b1_var", inputs)
        assert b1v == pytest.approx(10.0 * 10 * 0.25 / 0.2, rel=1e-12)
        b2v = pareto_lower_bounds("b2_var", inputs)
        assert b2v == pytest.approx(10.0 * 0.1 * 1000.0 * 0.25 / 2.0, rel=1e-12)
        # With the variance bound of a unit-range variable, the variance
        # form matches the range form exactly (ratio = range).
        b1 = pareto_lower_bounds("b1", inputs)
        assert b1v == pytest.approx(b1 * inputs.reward_range, rel=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            pareto_lower_bounds("b3", BoundInputs(phi=1.0, delta_lower=0.1))
