import math

import numpy as np
import pytest

from banditlab import (
    AdversarialInstance,
    DomainError,
    NonUniqueOptimum,
    RngStream,
    adversarial_clipped_family,
    bern_family,
    clip_gap_probability,
    gap_profile,
    gauss_family,
    hardness,
    load_adversarial_csv,
)


class TestBernFamily:
    def test_flip_structure(self):
        family = bern_family(3, [0.1, 0.2], b=1.0)
        assert [a.p for a in family[0].arms] == pytest.approx([0.5, 0.4, 0.3])
        assert [a.p for a in family[1].arms] == pytest.approx([0.5, 0.6, 0.3])
        assert [a.p for a in family[2].arms] == pytest.approx([0.5, 0.4, 0.7])

    def test_unique_optimum_per_instance(self):
        family = bern_family(5, [0.05, 0.1, 0.15, 0.2])
        for ell, inst in enumerate(family):
            assert gap_profile(inst).optimal_arm == ell

    def test_gap_scales_with_b(self):
        family = bern_family(3, [0.1, 0.2], b=2.0)
        profile = gap_profile(family[0])
        assert profile.gaps[1] == pytest.approx(2.0 * 0.1, rel=1e-12)
        assert profile.gaps[2] == pytest.approx(2.0 * 0.2, rel=1e-12)

    def test_uniform_d_hardness(self):
        L, d, b = 8, 0.1, 2.0
        family = bern_family(L, [d] * (L - 1), b=b)
        h = hardness(gap_profile(family[0]))
        assert h.h2 == pytest.approx((L - 1) / (b**2 * d**2), rel=1e-12)

    def test_d_range_enforced(self):
        with pytest.raises(DomainError):
            bern_family(2, [0.3])
        with pytest.raises(DomainError):
            bern_family(2, [0.0])
        with pytest.raises(DomainError):
            bern_family(3, [0.1])  # wrong length


class TestGaussFamily:
    def test_flip_structure(self):
        family = gauss_family(2, [0.1], sigma=1.0)
        assert [a.mean for a in family[0].arms] == pytest.approx([0.5, 0.4])
        assert [a.mean for a in family[1].arms] == pytest.approx([0.5, 0.6])

    def test_shared_variance(self):
        family = gauss_family(4, [0.1, 0.2, 0.3], sigma=0.7)
        for inst in family:
            assert all(a.variance == pytest.approx(0.49) for a in inst.arms)

    def test_uniform_d_hardness(self):
        L, d = 6, 0.2
        family = gauss_family(L, [d] * (L - 1), sigma=1.0)
        h = hardness(gap_profile(family[0]))
        assert h.h2 == pytest.approx((L - 1) / d**2, rel=1e-12)


class TestAdversarialInstance:
    def test_rewards_range_enforced(self):
        with pytest.raises(DomainError):
            AdversarialInstance(np.array([[0.5, 1.5]]))

    def test_tie_rejected(self):
        with pytest.raises(NonUniqueOptimum):
            AdversarialInstance(np.array([[0.5, 0.5], [0.2, 0.2]]))

    def test_empirical_gap_identity(self):
        gen = np.random.default_rng(0)
        for _ in range(20):
            table = AdversarialInstance(gen.random((50, 4)))
            G = table.rewards.sum(axis=0)
            for i in range(4):
                for j in range(4):
                    assert table.emp_gap(i, j) == pytest.approx(
                        (G[i] - G[j]) / 50, rel=1e-12, abs=1e-12
                    )

    def test_csv_round_trip(self, tmp_path):
        gen = np.random.default_rng(1)
        table = AdversarialInstance(gen.random((20, 3)))
        path = str(tmp_path / "table.csv")
        table.save_csv(path)
        loaded = load_adversarial_csv(path)
        assert np.array_equal(loaded.rewards, table.rewards)
        assert loaded.emp_optimum == table.emp_optimum


class TestClippedFamily:
    def test_deterministic_first_row(self):
        table = adversarial_clipped_family(4, 100, 0.1, 1 / 3, 1, RngStream(0))
        assert table.rewards[0, 0] == 0.5
        assert np.all(table.rewards[0, 1:] == 0.4)
        table3 = adversarial_clipped_family(4, 100, 0.1, 1 / 3, 3, RngStream(0))
        assert table3.rewards[0, 2] == pytest.approx(0.6)
        assert table3.rewards[0, 1] == pytest.approx(0.4)

    def test_unclipped_rows_keep_exact_gap(self):
        table = adversarial_clipped_family(4, 1000, 0.1, 1 / 3, 1, RngStream(2))
        z = table.rewards[1:, 0]
        interior = (z >= 0.1) & (z <= 0.9)
        assert interior.sum() > 0
        diffs = table.rewards[1:, 0] - table.rewards[1:, 2]
        assert np.all(np.abs(diffs[interior] - 0.1) < 1e-12)

    def test_shared_noise_across_siblings(self):
        a = adversarial_clipped_family(5, 500, 0.1, 1 / 3, 2, RngStream(7))
        b = adversarial_clipped_family(5, 500, 0.1, 1 / 3, 4, RngStream(7))
        same = [i for i in range(5) if np.array_equal(a.rewards[:, i], b.rewards[:, i])]
        # Only the flipped columns (1 and 3) may differ.
        assert set(same) >= {0, 2, 4}
        assert not np.array_equal(a.rewards[:, 1], b.rewards[:, 1])

    def test_parameter_validation(self):
        with pytest.raises(DomainError):
            adversarial_clipped_family(4, 100, 0.6, 1.0, 1, RngStream(0))
        with pytest.raises(DomainError):
            adversarial_clipped_family(4, 100, 0.1, 0.0, 1, RngStream(0))
        with pytest.raises(DomainError):
            adversarial_clipped_family(4, 100, 0.1, 1.0, 5, RngStream(0))

    def test_gap_probability_value(self):
        p = clip_gap_probability(0.1, 1 / 3)
        expected = 1.0 - math.exp(-(0.8**2) / (8.0 / 9.0))
        assert p == pytest.approx(expected, rel=1e-12)
        assert p >= 0.5

    def test_optimum_is_flipped_arm(self):
        for ell in (1, 2, 4):
            table = adversarial_clipped_family(4, 2000, 0.1, 1 / 3, ell, RngStream(3))
            assert table.emp_optimum == ell - 1
            assert table.emp_min_gap > 0
