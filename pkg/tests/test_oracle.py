"""Geometric Monte-Carlo oracle: memberships, volumes, estimator agreement."""

from __future__ import annotations

import numpy as np
import pytest

from l2disc import (
    NoGeometricOracleError,
    PointSet,
    ValidationError,
    box_membership,
    even_subset_volume,
    iid_uniform,
    kernel_spec,
    local_discrepancy,
    mc_expected_iid,
    mc_squared_discrepancy,
    replicated_point,
    squared_discrepancy,
)
from l2disc.pathology import expected_iid_squared


class TestLocalDiscrepancy:
    def test_empty_box(self):
        pts = PointSet([[0.5, 0.5]])
        assert local_discrepancy(pts, [False], 0.0) == 0.0

    def test_full_cube(self):
        pts = PointSet([[0.2, 0.2], [0.8, 0.8]])
        assert local_discrepancy(pts, [True, True], 1.0) == 0.0

    def test_interval_count_minus_length(self):
        pts = PointSet([[0.5]])
        assert local_discrepancy(pts, [True], 0.75) == pytest.approx(0.25)

    def test_membership_length_mismatch(self):
        with pytest.raises(ValidationError):
            local_discrepancy(PointSet([[0.5]]), [True, False], 0.5)


class TestBoxMembership:
    def test_star(self):
        inside, volume = box_membership("star", (0.3, 0.3), (0.5, 0.5))
        assert inside is True
        assert volume == pytest.approx(0.25)

    def test_per_wraparound(self):
        inside, volume = box_membership("per", [0.05], [0.9], [0.2])
        assert inside is True
        assert volume == pytest.approx(0.3)

    def test_sym_even_orthant(self):
        inside, volume = box_membership("sym", (0.6, 0.6), (0.5, 0.5))
        assert inside is True
        assert volume == pytest.approx(even_subset_volume([0.5, 0.5]))

    def test_ext_rejected_pair(self):
        inside, volume = box_membership("ext", [0.5], [0.8], [0.2])
        assert inside is False and volume == 0.0

    def test_ext_valid_pair(self):
        inside, volume = box_membership("ext", [0.5], [0.2], [0.8])
        assert inside is True
        assert volume == pytest.approx(0.6)

    def test_ctr_nearest_vertex_box(self):
        # anchor 0.7 -> vertex 1; box [0.7, 1], membership is x >= a
        assert box_membership("ctr", [0.8], [0.7]) == (True, pytest.approx(0.3))
        assert box_membership("ctr", [0.6], [0.7])[0] is False

    def test_cad_center_anchored_box(self):
        # anchor 0.2 -> box [0.2, 0.5); anchor 0.9 -> box [0.5, 0.9)
        assert box_membership("cad", [0.3], [0.2]) == (True, pytest.approx(0.3))
        assert box_membership("cad", [0.6], [0.9]) == (True, pytest.approx(0.4))
        assert box_membership("cad", [0.1], [0.9])[0] is False

    def test_second_anchor_policy(self):
        with pytest.raises(ValidationError, match="second anchor"):
            box_membership("ext", [0.5], [0.2])
        with pytest.raises(ValidationError, match="single anchor"):
            box_membership("star", [0.5], [0.2], [0.8])

    def test_no_geometric_definition(self):
        with pytest.raises(NoGeometricOracleError):
            box_membership("mix", [0.5], [0.5])


class TestSymVolumeIdentity:
    def test_shortcut_equals_vertex_summation(self):
        rng = np.random.Generator(np.random.Philox(47))
        for trial in range(10_000):
            d = 1 + trial % 6
            a = rng.random(d)
            shortcut = (1.0 + np.prod(2.0 * a - 1.0)) / 2.0
            assert abs(shortcut - even_subset_volume(a)) < 1e-12

    def test_refuses_exponential_dimension(self):
        with pytest.raises(ValidationError):
            even_subset_volume(np.full(21, 0.5))


class TestMcSquaredDiscrepancy:
    def test_star_origin(self):
        est = mc_squared_discrepancy("star", PointSet([[0.0]]), 200_000, seed=1)
        assert abs(est.mean - 1 / 3) < 4 * est.stderr

    def test_ext_any_single_point(self):
        est = mc_squared_discrepancy("ext", PointSet([[0.37]]), 200_000, seed=2)
        assert abs(est.mean - 1 / 12) < 4 * est.stderr

    def test_cad_center_point(self):
        est = mc_squared_discrepancy("cad", PointSet([[0.5]]), 200_000, seed=3)
        assert abs(est.mean - 1 / 3) < 4 * est.stderr

    @pytest.mark.parametrize("tag", ["star", "ext", "per", "ctr", "cad", "sym"])
    def test_agrees_with_closed_form(self, tag):
        pts = iid_uniform(8, 2, 53)
        closed = squared_discrepancy(kernel_spec(tag, 2), pts).value
        est = mc_squared_discrepancy(tag, pts, 150_000, seed=5)
        assert est.agrees_with(closed), (
            f"{tag}: closed {closed} vs mc {est.mean} +- {est.stderr}"
        )

    def test_reproducible_bit_for_bit(self):
        pts = iid_uniform(5, 2, 59)
        a = mc_squared_discrepancy("sym", pts, 50_000, seed=7)
        b = mc_squared_discrepancy("sym", pts, 50_000, seed=7)
        assert a == b

    def test_seed_changes_estimate(self):
        pts = iid_uniform(5, 2, 59)
        a = mc_squared_discrepancy("sym", pts, 50_000, seed=7)
        b = mc_squared_discrepancy("sym", pts, 50_000, seed=8)
        assert a.mean != b.mean

    def test_rejects_mix_and_tiny_samples(self):
        with pytest.raises(NoGeometricOracleError):
            mc_squared_discrepancy("mix", PointSet([[0.5, 0.5]]), 1000, seed=0)
        with pytest.raises(ValidationError):
            mc_squared_discrepancy("star", PointSet([[0.5]]), 1, seed=0)


class TestMcExpectedIid:
    def test_star_matches_closed_expectation(self):
        est = mc_expected_iid("star", n=8, d=2, replications=30_000, seed=11)
        assert abs(est.mean - 5 / 288) < 4 * est.stderr

    def test_asd_matches_star_expectation(self):
        est = mc_expected_iid("asd", n=8, d=2, replications=30_000, seed=13)
        assert abs(est.mean - 5 / 288) < 4 * est.stderr

    def test_sym_expectation(self):
        est = mc_expected_iid("sym", n=4, d=3, replications=30_000, seed=17)
        expected = (4.0**-3 - 12.0**-3) / 4
        assert abs(est.mean - expected) < 4 * est.stderr

    def test_mix_agrees_with_constant_formula(self):
        est = mc_expected_iid("mix", n=6, d=2, replications=30_000, seed=19)
        assert abs(est.mean - expected_iid_squared("mix", 6, 2)) < 4 * est.stderr

    def test_weighted_measures_supported(self):
        est = mc_expected_iid(
            "sym_weighted", n=3, d=2, replications=20_000, seed=23, gamma=[4.0, 4.0]
        )
        expected = expected_iid_squared("sym_weighted", 3, 2, gamma=[4.0, 4.0])
        assert abs(est.mean - expected) < 4 * est.stderr

    def test_reproducible(self):
        a = mc_expected_iid("ctr", n=4, d=2, replications=5_000, seed=29)
        b = mc_expected_iid("ctr", n=4, d=2, replications=5_000, seed=29)
        assert a == b


class TestSingleReplicatedOracle:
    def test_per_replicated_point_value(self):
        # geometric check of the wraparound closed form on a degenerate set
        pts = replicated_point((0.3,), 4)
        closed = squared_discrepancy(kernel_spec("per", 1), pts).value
        est = mc_squared_discrepancy("per", pts, 200_000, seed=31)
        assert est.agrees_with(closed)
        assert closed == pytest.approx(2.0**-1 - 3.0**-1, rel=1e-12)
