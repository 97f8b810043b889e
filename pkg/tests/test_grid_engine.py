"""Tests for field evaluation and low-MD markers."""
from __future__ import annotations

import time

import numpy as np
import pytest

from src.descriptor import DescriptorParams
from src.errors import FewerThanK, ParameterError
from src.field import grid_engine
from src.field.grid_engine import FieldResult, GridSpec, _chunk_bounds, _run_chunks, evaluate_field, evaluate_points
from src.field.markers import low_md_components, low_md_mask, min_markers
from src.field.progress_tracker import ProgressTracker
from src.field.summary_generator import SummaryGenerator
from src.map_kernels import HenonKernel, HenonParams, MapKernelFactory, MapPoint, henon_fixed_points
from src.oracles import f_linear

HENON_PARAMS = DescriptorParams(p=0.05, N=5, escape_radius=50.0)


class TestGridSpec:
    def test_two_by_two(self):
        grid = GridSpec(-1.0, 1.0, -1.0, 1.0, 2, 2)
        assert grid.shape == (2, 2)
        assert list(grid.xs()) == [-1.0, 1.0]
        assert grid.node(1, 0) == MapPoint(1.0, -1.0)

    @pytest.mark.parametrize("args", [
        (-1.0, 1.0, -1.0, 1.0, 1, 5),
        (-1.0, 1.0, -1.0, 1.0, 5, 0),
        (-1.0, 1.0, -1.0, 1.0, 5.0, 5),
        (1.0, -1.0, -1.0, 1.0, 5, 5),
        (-1.0, 1.0, 1.0, 1.0, 5, 5),
        (-1.0, float('inf'), -1.0, 1.0, 5, 5),
    ])
    def test_rejects_invalid(self, args):
        with pytest.raises(ParameterError):
            GridSpec(*args)

    def test_from_spacing(self):
        grid = GridSpec.from_spacing(-0.5, 0.5, -0.5, 0.5, 0.005)
        assert (grid.nx, grid.ny) == (201, 201)
        assert grid.dx == pytest.approx(0.005)

    def test_nearest_node_is_clipped(self):
        grid = GridSpec(-1.0, 1.0, -1.0, 1.0, 11, 21)
        assert grid.nearest_node(MapPoint(0.0, 0.0)) == (5, 10)
        assert grid.nearest_node(MapPoint(5.0, -5.0)) == (10, 0)


class TestChunking:
    def test_single_chunk_for_one_worker(self):
        assert _chunk_bounds(201, 1) == [(0, 201)]

    def test_chunks_cover_every_row_once(self):
        bounds = _chunk_bounds(201, 8)
        assert bounds[0][0] == 0 and bounds[-1][1] == 201
        assert all(a[1] == b[0] for a, b in zip(bounds, bounds[1:]))

    def test_more_workers_than_rows(self):
        assert len(_chunk_bounds(3, 8)) == 3


class TestEvaluateField:
    def test_linear_saddle_matches_closed_form(self, linear_kernel):
        grid = GridSpec.from_spacing(-0.5, 0.5, -0.5, 0.5, 0.005)
        result = evaluate_field(linear_kernel, grid, DescriptorParams(p=0.5, N=20))
        gx, gy = np.meshgrid(grid.xs(), grid.ys())
        expected = (np.abs(gx) ** 0.5 + np.abs(gy) ** 0.5) * f_linear(1.1, 0.5, 20)
        np.testing.assert_allclose(result.values, expected, rtol=1e-12, atol=0)
        assert result.escape_fraction == 0.0
        assert result.kernel_name == 'linear-saddle'

    def test_layout_is_y_major(self, linear_kernel):
        grid = GridSpec(0.0, 1.0, 0.0, 2.0, 3, 5)
        result = evaluate_field(linear_kernel, grid, DescriptorParams(p=1.0, N=3))
        assert result.values.shape == (5, 3)
        assert result.value_at(MapPoint(1.0, 0.0)) == result.values[0, 2]

    @pytest.mark.parametrize("workers", [2, 8])
    def test_worker_count_is_bitwise_invisible(self, workers, henon_kernel):
        grid = GridSpec(-6.0, 6.0, -6.0, 6.0, 40, 30)
        serial = evaluate_field(henon_kernel, grid, HENON_PARAMS, workers=1)
        parallel = evaluate_field(henon_kernel, grid, HENON_PARAMS, workers=workers)
        assert np.array_equal(serial.values, parallel.values)
        assert np.array_equal(serial.escaped, parallel.escaped)

    def test_points_match_field(self, henon_kernel):
        grid = GridSpec(-6.0, 6.0, -6.0, 6.0, 12, 9)
        result = evaluate_field(henon_kernel, grid, HENON_PARAMS)
        gx, gy = np.meshgrid(grid.xs(), grid.ys())
        acc = evaluate_points(henon_kernel, gx.ravel(), gy.ravel(), HENON_PARAMS, workers=3)
        assert np.array_equal(acc.md_total.reshape(grid.shape), result.values)

    def test_rejects_zero_workers(self, linear_kernel):
        with pytest.raises(ParameterError):
            evaluate_field(linear_kernel, GridSpec(0, 1, 0, 1, 2, 2), DescriptorParams(p=0.5, N=2), workers=0)

    def test_field_result_shape_check(self):
        grid = GridSpec(0, 1, 0, 1, 3, 2)
        with pytest.raises(ParameterError):
            FieldResult(grid, np.zeros((3, 2)), np.zeros((3, 2), dtype=bool), DescriptorParams(p=0.5, N=2), 'x')


class TestHenonStructure:
    def test_fixed_point_below_median(self, henon_kernel):
        grid = GridSpec(-6.0, 6.0, -6.0, 6.0, 401, 401)
        result = evaluate_field(henon_kernel, grid, HENON_PARAMS, workers=2)
        saddle = henon_fixed_points(9.5, -1.0)[1]
        assert result.value_at(saddle) < np.median(result.non_escaped_values())
        assert 0.0 < result.escape_fraction < 1.0

    def test_nonautonomous_base_time_changes_the_field(self, nonautonomous_henon_kernel):
        grid = GridSpec(-6.0, 6.0, -6.0, 6.0, 60, 60)
        fields = [evaluate_field(nonautonomous_henon_kernel, grid,
                                 DescriptorParams(p=0.05, N=5, n0=n0, escape_radius=50.0)).values
                  for n0 in (-3, -1, 1, 3)]
        for a in range(len(fields)):
            for b in range(a + 1, len(fields)):
                assert not np.array_equal(fields[a], fields[b])

    def test_zero_forcing_reproduces_autonomous_field(self):
        grid = GridSpec(-6.0, 6.0, -6.0, 6.0, 50, 50)
        autonomous = MapKernelFactory.create_kernel('henon')
        unforced = MapKernelFactory.create_kernel('nonautonomous-henon', {'epsilon': 0.0})
        params = DescriptorParams(p=0.05, N=5, n0=4, escape_radius=50.0)
        assert np.array_equal(evaluate_field(autonomous, grid, params).values,
                              evaluate_field(unforced, grid, params).values)

    @pytest.mark.slow
    def test_chaotic_saddle_acceptance(self):
        kernel = HenonKernel(HenonParams(9.5, -1.0))
        grid = GridSpec(-6.0, 6.0, -6.0, 6.0, 800, 800)
        started = time.perf_counter()
        result = evaluate_field(kernel, grid, HENON_PARAMS, workers=8)
        elapsed = time.perf_counter() - started

        cutoff = np.quantile(result.non_escaped_values(), 0.10)
        for fixed in henon_fixed_points(9.5, -1.0):
            assert result.value_at(fixed) < cutoff
        assert low_md_mask(result, 0.05).any()
        assert low_md_components(result, 0.05) >= 2
        assert elapsed < 60.0

    @pytest.mark.slow
    @pytest.mark.parametrize("n0", [-3, -1, 1, 3])
    def test_forced_saddle_fixed_points_stay_low(self, n0, nonautonomous_henon_kernel):
        grid = GridSpec(-6.0, 6.0, -6.0, 6.0, 800, 800)
        params = DescriptorParams(p=0.05, N=5, n0=n0, escape_radius=50.0)
        result = evaluate_field(nonautonomous_henon_kernel, grid, params, workers=8)

        cutoff = np.quantile(result.non_escaped_values(), 0.10)
        for fixed in henon_fixed_points(9.5, -1.0):
            assert result.value_at(fixed) < cutoff

    def test_mostly_escaped_field_is_not_a_warning(self, henon_kernel, monkeypatch):
        warnings, infos = [], []
        monkeypatch.setattr(grid_engine.logger, 'warning', warnings.append)
        monkeypatch.setattr(grid_engine.logger, 'info', infos.append)
        result = evaluate_field(henon_kernel, GridSpec(-6.0, 6.0, -6.0, 6.0, 40, 40), HENON_PARAMS)
        assert result.escape_fraction > 0.5
        assert warnings == []
        assert any("escape radius 50" in message for message in infos)
        assert not any("larger escape radius" in message for message in infos)


class TestMarkers:
    def test_linear_minimum_at_fixed_point(self, linear_kernel):
        grid = GridSpec(-0.5, 0.5, -0.5, 0.5, 21, 21)
        result = evaluate_field(linear_kernel, grid, DescriptorParams(p=0.5, N=20))
        (point, value), = min_markers(result, 1)
        assert point == grid.node(10, 10)
        assert value == 0.0

    def test_markers_are_separated(self, linear_kernel):
        grid = GridSpec(-0.5, 0.5, -0.5, 0.5, 21, 21)
        result = evaluate_field(linear_kernel, grid, DescriptorParams(p=0.5, N=20))
        markers = min_markers(result, 5)
        values = [v for _, v in markers]
        assert values == sorted(values)
        nodes = [grid.nearest_node(p) for p, _ in markers]
        for a in range(len(nodes)):
            for b in range(a + 1, len(nodes)):
                assert max(abs(nodes[a][0] - nodes[b][0]), abs(nodes[a][1] - nodes[b][1])) >= 3

    def test_escaped_nodes_are_skipped(self):
        grid = GridSpec(0, 1, 0, 1, 4, 4)
        values = np.arange(16, dtype=np.float64).reshape(4, 4)
        escaped = np.zeros((4, 4), dtype=bool)
        escaped[0, 0] = True
        result = FieldResult(grid, values, escaped, DescriptorParams(p=0.5, N=2), 'test')
        (point, value), = min_markers(result, 1)
        assert value == 1.0
        assert point == grid.node(1, 0)

    def test_fewer_than_k(self):
        grid = GridSpec(0, 1, 0, 1, 4, 4)
        result = FieldResult(grid, np.zeros((4, 4)), np.zeros((4, 4), dtype=bool),
                             DescriptorParams(p=0.5, N=2), 'test')
        with pytest.raises(FewerThanK):
            min_markers(result, 5)
        with pytest.raises(ParameterError):
            min_markers(result, 0)

    def test_components(self):
        grid = GridSpec(0, 1, 0, 1, 6, 6)
        values = np.ones((6, 6))
        values[0, 0] = values[1, 1] = 0.0   # diagonal neighbours: one component
        values[4, 4] = 0.0
        result = FieldResult(grid, values, np.zeros((6, 6), dtype=bool), DescriptorParams(p=0.5, N=2), 'test')
        assert low_md_mask(result, 0.05).sum() == 3
        assert low_md_components(result, 0.05) == 2

    def test_mask_fraction_bounds(self, linear_kernel):
        result = evaluate_field(linear_kernel, GridSpec(0, 1, 0, 1, 3, 3), DescriptorParams(p=0.5, N=2))
        with pytest.raises(ParameterError):
            low_md_mask(result, 1.0)


class TestProgressAndSummary:
    def test_tracker_summary(self):
        with ProgressTracker(2) as tracker:
            tracker.complete_chunk(0, 10, 0.5)
            tracker.complete_chunk(10, 20, 1.5)
        summary = tracker.get_summary()
        assert summary['completed_chunks'] == 2
        assert summary['slowest_chunk'] == 1.5

    @pytest.mark.parametrize("workers", [1, 2])
    def test_tracker_records_row_ranges(self, workers, linear_kernel):
        grid = GridSpec(-0.5, 0.5, -0.5, 0.5, 7, 9)
        gx, gy = np.meshgrid(grid.xs(), grid.ys())
        row_bounds = _chunk_bounds(grid.ny, workers)
        bounds = [(lo * grid.nx, hi * grid.nx) for lo, hi in row_bounds]
        with ProgressTracker(len(bounds)) as tracker:
            _run_chunks(linear_kernel, gx.ravel(), gy.ravel(), DescriptorParams(p=0.5, N=5),
                        bounds, workers, tracker, row_width=grid.nx)
        rows = sorted(c['rows'] for c in tracker.get_summary()['chunk_details'])
        assert rows == row_bounds
        assert rows[-1][1] == grid.ny

    def test_field_summary(self, linear_kernel):
        result = evaluate_field(linear_kernel, GridSpec(-0.5, 0.5, -0.5, 0.5, 11, 11), DescriptorParams(p=0.5, N=20))
        text = SummaryGenerator().generate_field_summary(result, ['out.pgm'])
        assert "DESCRIPTOR FIELD SUMMARY" in text
        assert "Min MD" in text
        assert "out.pgm" in text

    @pytest.mark.parametrize("seconds, expected", [(0.25, "250 ms"), (2.5, "2.50 s"), (125.0, "2m 5s")])
    def test_format_duration(self, seconds, expected):
        assert SummaryGenerator.format_duration(seconds) == expected
