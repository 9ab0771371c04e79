"""Construction: greedy extension, projected-gradient optimizer, cross-eval."""

from __future__ import annotations

import numpy as np
import pytest

from l2disc import (
    GreedyConfig,
    NonDifferentiableMeasureError,
    OptimizerConfig,
    PointSet,
    ValidationError,
    cross_evaluate,
    greedy_extend,
    iid_uniform,
    kernel_spec,
    optimize,
    sobol,
    squared_discrepancy,
)
from l2disc.construct import _candidate_grid


class TestConfigs:
    def test_greedy_defaults_valid(self):
        cfg = GreedyConfig()
        assert cfg.batch == 1 and cfg.grid_k == 65

    def test_greedy_rejects_bad_values(self):
        with pytest.raises(ValidationError):
            GreedyConfig(batch=0)
        with pytest.raises(ValidationError):
            GreedyConfig(grid_k=1)
        with pytest.raises(ValidationError):
            GreedyConfig(refine_shrink=1.0)
        with pytest.raises(ValidationError):
            GreedyConfig(max_refine_evaluations=-1)

    def test_optimizer_rejects_bad_values(self):
        with pytest.raises(ValidationError):
            OptimizerConfig(restarts=0)
        with pytest.raises(ValidationError):
            OptimizerConfig(iterations=0)
        with pytest.raises(ValidationError):
            OptimizerConfig(momentum=1.5)
        with pytest.raises(ValidationError):
            OptimizerConfig(projection="wrap")
        with pytest.raises(ValidationError):
            OptimizerConfig(tolerance=0.0)


class TestGreedyExtend:
    def test_ctr_from_center_degenerates(self):
        spec = kernel_spec("ctr", 2)
        start = PointSet([[0.5, 0.5]])
        cfg = GreedyConfig(grid_k=101)
        final, trace = greedy_extend(spec, start, steps=1, cfg=cfg)
        assert final.n == 2
        np.testing.assert_allclose(final.coords[1], [0.5, 0.5], atol=1e-12)
        assert trace.evaluations > 0

    def test_grid_argmin_matches_brute_force(self):
        spec = kernel_spec("star", 1)
        base = PointSet([[0.5]])
        cfg = GreedyConfig(grid_k=41, max_refine_evaluations=0)
        final, _ = greedy_extend(spec, base, steps=1, cfg=cfg)
        cands = _candidate_grid(1, 41)
        best = min(
            cands,
            key=lambda y: squared_discrepancy(
                spec, PointSet(np.vstack([base.coords, y[None, :]]))
            ).value,
        )
        assert final.coords[1, 0] == pytest.approx(best[0], abs=1e-15)

    def test_multiple_steps_track_values(self):
        spec = kernel_spec("star", 2)
        final, trace = greedy_extend(
            spec, sobol(4, 2), steps=3, cfg=GreedyConfig(grid_k=17)
        )
        assert final.n == 7
        assert len(trace.values) == 3
        fresh = squared_discrepancy(spec, final).value
        assert trace.final_value == pytest.approx(fresh, abs=1e-15)

    def test_batch_interaction_beats_doubled_single_candidate(self):
        # batch 2 must account for the within-batch pair term: both slots at
        # the single-best location is worse than the joint optimum it returns
        spec = kernel_spec("star", 1)
        base = PointSet([[0.5]])
        final, trace = greedy_extend(
            spec, base, steps=1, cfg=GreedyConfig(batch=2, grid_k=41)
        )
        assert final.n == 3
        single_best = greedy_extend(
            spec, base, steps=1,
            cfg=GreedyConfig(batch=1, grid_k=41, max_refine_evaluations=0),
        )[0].coords[1, 0]
        doubled = PointSet([[0.5], [single_best], [single_best]])
        assert trace.final_value < squared_discrepancy(spec, doubled).value

    def test_deterministic(self):
        spec = kernel_spec("sym", 2)
        start = iid_uniform(3, 2, 71)
        a, _ = greedy_extend(spec, start, steps=2, cfg=GreedyConfig(grid_k=15))
        b, _ = greedy_extend(spec, start, steps=2, cfg=GreedyConfig(grid_k=15))
        np.testing.assert_array_equal(a.coords, b.coords)

    def test_cad_is_accepted(self):
        spec = kernel_spec("cad", 2)
        final, _ = greedy_extend(
            spec, PointSet([[0.25, 0.25]]), steps=1, cfg=GreedyConfig(grid_k=9)
        )
        assert final.n == 2

    def test_rejects_bad_steps_and_dimension(self):
        spec = kernel_spec("star", 2)
        with pytest.raises(ValidationError):
            greedy_extend(spec, sobol(4, 2), steps=0)
        with pytest.raises(ValidationError):
            greedy_extend(spec, sobol(4, 3), steps=1)

    def test_candidate_grid_cap(self):
        with pytest.raises(ValidationError):
            _candidate_grid(8, 65)


class TestOptimize:
    def test_single_point_star_reaches_center(self):
        spec = kernel_spec("star", 1)
        cfg = OptimizerConfig(restarts=1, iterations=4000, seed=0)
        final, trace = optimize(spec, PointSet([[0.9]]), cfg)
        assert final.coords[0, 0] == pytest.approx(0.5, abs=1e-5)
        assert trace.final_value == pytest.approx(1 / 12, abs=1e-9)

    def test_improves_on_initial_set(self):
        spec = kernel_spec("ext", 2)
        init = iid_uniform(8, 2, 73)
        start_value = squared_discrepancy(spec, init).value
        _, trace = optimize(
            spec, init, OptimizerConfig(restarts=2, iterations=1500, seed=1)
        )
        assert trace.final_value < start_value

    def test_projection_invariant(self):
        spec = kernel_spec("ctr", 2)
        final, _ = optimize(
            spec,
            iid_uniform(6, 2, 79),
            OptimizerConfig(restarts=2, iterations=500, seed=2),
        )
        assert final.coords.min() >= 0.0 and final.coords.max() <= 1.0

    def test_trace_best_values_non_increasing(self):
        spec = kernel_spec("star", 2)
        _, trace = optimize(
            spec,
            iid_uniform(5, 2, 83),
            OptimizerConfig(restarts=1, iterations=800, seed=3),
        )
        best = np.asarray(trace.best_values)
        assert np.all(np.diff(best) <= 0.0)
        assert trace.final_value <= best[0]

    def test_final_value_is_fresh_reverification(self):
        spec = kernel_spec("asd", 2)
        final, trace = optimize(
            spec,
            iid_uniform(5, 2, 89),
            OptimizerConfig(restarts=2, iterations=400, seed=4),
        )
        fresh = squared_discrepancy(spec, final).value
        assert trace.final_value == fresh
        assert 0 <= trace.winner_restart < 2

    def test_deterministic_bit_for_bit(self):
        spec = kernel_spec("sym", 2)
        init = iid_uniform(4, 2, 97)
        cfg = OptimizerConfig(restarts=3, iterations=300, seed=5)
        a, ta = optimize(spec, init, cfg)
        b, tb = optimize(spec, init, cfg)
        np.testing.assert_array_equal(a.coords, b.coords)
        assert ta.values == tb.values
        assert ta.final_value == tb.final_value

    def test_cad_rejected(self):
        with pytest.raises(NonDifferentiableMeasureError):
            optimize(kernel_spec("cad", 2), sobol(4, 2), OptimizerConfig())

    def test_weighted_measure_optimizes(self):
        spec = kernel_spec("ctr_weighted", 2, gamma=[2.0, 2.0])
        init = iid_uniform(4, 2, 101)
        start_value = squared_discrepancy(spec, init).value
        _, trace = optimize(
            spec, init, OptimizerConfig(restarts=1, iterations=600, seed=6)
        )
        assert trace.final_value < start_value


class TestCrossEvaluate:
    def test_diagonal_is_exactly_one(self):
        sets = {"star": sobol(8, 2), "ext": iid_uniform(8, 2, 103)}
        ratios = cross_evaluate(sets, ["star", "ext"])
        assert ratios[0, 0] == 1.0 and ratios[1, 1] == 1.0

    def test_entries_match_direct_computation(self):
        sets = {"star": sobol(8, 2), "per": iid_uniform(8, 2, 107)}
        ratios = cross_evaluate(sets, ["star", "per"])
        star = kernel_spec("star", 2)
        expected = (
            squared_discrepancy(star, sets["per"]).root
            / squared_discrepancy(star, sets["star"]).root
        )
        assert ratios[0, 1] == pytest.approx(expected, rel=1e-15)

    def test_missing_measure_rejected(self):
        with pytest.raises(ValidationError):
            cross_evaluate({"star": sobol(4, 2)}, ["star", "ext"])

    def test_dimension_mismatch_rejected(self):
        sets = {"star": sobol(4, 2), "ext": sobol(4, 3)}
        with pytest.raises(ValidationError):
            cross_evaluate(sets, ["star", "ext"])
