"""Tests for transect scans and the refinement check."""
from __future__ import annotations

import math

import numpy as np
import pytest

from src.descriptor import DescriptorParams
from src.errors import InsufficientSignal, ParameterError
from src.map_kernels import MapPoint, RotatedSaddleKernel, RotatedSaddleParams, RotationKernel, RotationParams
from src.singularity import (
    TransectSpec,
    _candidate_runs,
    default_spacings,
    refinement_exponent,
    scan_transect,
)

SPACINGS = [1e-2, 5e-3, 2.5e-3, 1.25e-3]


class TestTransectSpec:
    def test_direction_is_normalized(self):
        spec = TransectSpec(MapPoint(0, 0), (3.0, 4.0), 1.0, 5)
        assert spec.direction == pytest.approx((0.6, 0.8))

    def test_horizontal(self):
        spec = TransectSpec.horizontal(0.25, -0.5, 0.5, 401)
        assert spec.anchor == MapPoint(0.0, 0.25)
        assert spec.spacing == pytest.approx(0.0025)
        positions = spec.positions()
        assert positions[200] == pytest.approx(0.0, abs=1e-15)
        xs, ys = spec.coordinates(positions)
        assert xs[0] == pytest.approx(-0.5)
        assert np.all(ys == 0.25)

    @pytest.mark.parametrize("args", [
        ((1.0, 0.0), 1.0, 4),
        ((1.0, 0.0), 1.0, 1),
        ((1.0, 0.0), 1.0, 5.0),
        ((1.0, 0.0), 0.0, 5),
        ((0.0, 0.0), 1.0, 5),
        ((float('nan'), 1.0), 1.0, 5),
    ])
    def test_rejects_invalid(self, args):
        with pytest.raises(ParameterError):
            TransectSpec(MapPoint(0, 0), *args)

    def test_horizontal_rejects_empty_interval(self):
        with pytest.raises(ParameterError):
            TransectSpec.horizontal(0.25, 0.5, 0.5, 11)


class TestCandidateRuns:
    def test_merges_runs_one_sample_apart(self):
        flagged = np.array([False, True, False, True, False, False, False, True, True])
        assert _candidate_runs(flagged) == [(1, 3), (7, 8)]

    def test_nothing_flagged(self):
        assert _candidate_runs(np.zeros(10, dtype=bool)) == []


class TestRefinementExponent:
    @pytest.mark.parametrize("p", [0.25, 0.5, 0.75])
    def test_cusp_exponent(self, p, linear_kernel):
        exponent = refinement_exponent(linear_kernel, MapPoint(0.0, 0.25), (1.0, 0.0),
                                       DescriptorParams(p=p, N=20), SPACINGS)
        assert exponent == pytest.approx(p - 1.0, abs=0.05)

    def test_p_one_has_bounded_derivative(self, linear_kernel):
        exponent = refinement_exponent(linear_kernel, MapPoint(0.0, 0.25), (1.0, 0.0),
                                       DescriptorParams(p=1.0, N=20), SPACINGS)
        assert abs(exponent) < 1e-6

    def test_smooth_point(self, linear_kernel):
        with pytest.raises(InsufficientSignal):
            refinement_exponent(linear_kernel, MapPoint(0.3, 0.25), (1.0, 0.0),
                                DescriptorParams(p=0.5, N=20), SPACINGS)

    @pytest.mark.parametrize("spacings", [[1e-2, 5e-3], [1e-2, 1e-2, 5e-3], [1e-3, 5e-3, 1e-2], [1e-2, 0.0, -1e-2]])
    def test_rejects_bad_spacings(self, spacings, linear_kernel):
        with pytest.raises(ParameterError):
            refinement_exponent(linear_kernel, MapPoint(0.0, 0.25), (1.0, 0.0),
                                DescriptorParams(p=0.5, N=20), spacings)

    def test_default_spacings(self):
        assert default_spacings(0.01) == [0.01, 0.005, 0.0025, 0.00125]


class TestScanTransect:
    def test_linear_saddle_single_crossing(self, linear_kernel):
        spec = TransectSpec.horizontal(0.25, -0.5, 0.5, 401)
        report = scan_transect(linear_kernel, spec, DescriptorParams(p=0.5, N=20))
        assert len(report.crossings) == 1
        crossing = report.crossings[0]
        assert abs(crossing.point.x) < spec.spacing
        assert crossing.point.y == 0.25
        assert crossing.refinement_exponent == pytest.approx(-0.5, abs=0.05)
        assert report.md_values.shape == (401,)
        assert not report.escaped.any()

    def test_vertical_transect(self, linear_kernel):
        spec = TransectSpec(MapPoint(0.25, 0.0), (0.0, 1.0), 0.5, 401)
        report = scan_transect(linear_kernel, spec, DescriptorParams(p=0.5, N=20))
        assert len(report.crossings) == 1
        assert abs(report.crossings[0].point.y) < spec.spacing
        assert report.crossings[0].point.x == pytest.approx(0.25)

    def test_normal_form_crossing(self, normal_form_kernel):
        spec = TransectSpec.horizontal(0.25, -0.1, 0.1, 801)
        report = scan_transect(normal_form_kernel, spec, DescriptorParams(p=0.5, N=20))
        assert len(report.crossings) == 1
        assert abs(report.crossings[0].position) < spec.spacing

    def test_rotation_has_no_crossings(self):
        kernel = RotationKernel(RotationParams(0.7))
        spec = TransectSpec.horizontal(0.25, -0.5, 0.5, 401)
        report = scan_transect(kernel, spec, DescriptorParams(p=2.0, N=20))
        assert report.crossings == []

    def test_rotated_saddle_manifold_angles(self):
        kernel = RotatedSaddleKernel(RotatedSaddleParams(1.1))
        spec = TransectSpec.horizontal(0.25, -0.5, 0.5, 2001)
        report = scan_transect(kernel, spec, DescriptorParams(p=0.5, N=100))

        right = [c for c in report.crossings if c.point.x > 0]
        left = [c for c in report.crossings if c.point.x < 0]
        assert right and left
        strongest_right = max(right, key=lambda c: c.derivative_magnitude)
        strongest_left = max(left, key=lambda c: c.derivative_magnitude)
        assert math.degrees(math.atan2(0.25, strongest_right.point.x)) == pytest.approx(45.0, abs=2.0)
        assert math.degrees(math.atan2(0.25, strongest_left.point.x)) == pytest.approx(135.0, abs=2.0)

    def test_worker_count_does_not_change_the_report(self, linear_kernel):
        spec = TransectSpec.horizontal(0.25, -0.5, 0.5, 401)
        serial = scan_transect(linear_kernel, spec, DescriptorParams(p=0.5, N=20))
        parallel = scan_transect(linear_kernel, spec, DescriptorParams(p=0.5, N=20), workers=2)
        assert np.array_equal(serial.md_values, parallel.md_values)
        assert serial.crossings == parallel.crossings

    def test_rejects_non_positive_threshold(self, linear_kernel):
        spec = TransectSpec.horizontal(0.25, -0.5, 0.5, 11)
        with pytest.raises(ParameterError):
            scan_transect(linear_kernel, spec, DescriptorParams(p=0.5, N=20), threshold_factor=0.0)
