"""Tests for the descriptor accumulation."""
from __future__ import annotations

import math

import numpy as np
import pytest

from src.descriptor import (
    REGIME_ARCLENGTH,
    REGIME_ROOT,
    REGIME_SUM,
    DescriptorParams,
    accumulate,
    md_arclength,
    md_point,
    step_increment,
)
from src.errors import NonFiniteIterate, ParameterError
from src.map_kernels import (
    HenonKernel,
    HenonParams,
    LambdaSequence,
    LinearSaddleKernel,
    LinearSaddleParams,
    MapPoint,
    NonautonomousLinearKernel,
    henon_fixed_points,
)
from src.oracles import md_linear


class TestDescriptorParams:
    @pytest.mark.parametrize("kwargs", [
        {'p': 0.0, 'N': 5},
        {'p': -0.5, 'N': 5},
        {'p': float('nan'), 'N': 5},
        {'p': float('inf'), 'N': 5},
        {'p': 0.5, 'N': 0},
        {'p': 0.5, 'N': 2.5},
        {'p': 0.5, 'N': True},
        {'p': 0.5, 'N': 5, 'n0': 0.5},
        {'p': 0.5, 'N': 5, 'escape_radius': 0.0},
    ])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ParameterError):
            DescriptorParams(**kwargs)

    def test_numpy_integers_accepted(self):
        params = DescriptorParams(p=0.5, N=np.int64(5), n0=np.int32(-2))
        assert params.N == 5

    @pytest.mark.parametrize("p, regime", [
        (0.05, REGIME_SUM), (1.0, REGIME_SUM), (1.5, REGIME_ROOT), (2.0, REGIME_ARCLENGTH), (3.0, REGIME_ROOT),
    ])
    def test_norm_regime(self, p, regime):
        assert DescriptorParams(p=p, N=1).norm_regime == regime


class TestStepIncrement:
    def test_sum_regime(self):
        assert step_increment(4.0, -9.0, 0.5) == pytest.approx(5.0)

    def test_p_one_is_taxicab(self):
        assert step_increment(-1.5, 2.0, 1.0) == 3.5

    def test_arclength(self):
        assert step_increment(3.0, 4.0, 2.0) == 5.0

    def test_root_regime(self):
        assert step_increment(1.0, 1.0, 3.0) == pytest.approx(2.0 ** (1.0 / 3.0))

    def test_zero_step(self):
        assert step_increment(0.0, 0.0, 0.05) == 0.0


class TestMdPoint:
    def test_linear_saddle_arclength(self):
        kernel = LinearSaddleKernel(LinearSaddleParams(2.0))
        value = md_arclength(kernel, MapPoint(1.0, 0.0), DescriptorParams(p=2.0, N=1))
        assert value.md_plus == 1.0
        assert value.md_minus == 0.5
        assert value.md_total == 1.5

    def test_linear_saddle_taxicab(self):
        kernel = LinearSaddleKernel(LinearSaddleParams(2.0))
        value = md_point(kernel, MapPoint(1.0, 1.0), DescriptorParams(p=1.0, N=1))
        assert value.md_total == 3.0
        assert not value.escaped

    def test_arclength_requires_p_two(self):
        kernel = LinearSaddleKernel(LinearSaddleParams(2.0))
        with pytest.raises(ParameterError):
            md_arclength(kernel, MapPoint(1.0, 0.0), DescriptorParams(p=1.0, N=1))

    @pytest.mark.parametrize("point", [(0.3, -0.2), (-1.0, 0.7), (0.0, 0.25), (0.01, 0.0)])
    def test_matches_closed_form(self, point):
        kernel = LinearSaddleKernel(LinearSaddleParams(1.1))
        value = md_point(kernel, MapPoint(*point), DescriptorParams(p=0.5, N=20))
        assert value.md_total == pytest.approx(md_linear(*point, 1.1, 0.5, 20), rel=1e-12)

    def test_fixed_point_has_zero_descriptor(self, linear_kernel):
        assert md_point(linear_kernel, MapPoint(0.0, 0.0), DescriptorParams(p=0.5, N=20)).md_total == 0.0

    def test_henon_exact_fixed_point(self):
        # (2, 2) is a fixed point of the A = 8 map with no rounding at all
        kernel = HenonKernel(HenonParams(8.0, -1.0))
        value = md_point(kernel, MapPoint(2.0, 2.0), DescriptorParams(p=0.05, N=5))
        assert value.md_total == 0.0

    def test_henon_fixed_point_near_zero(self, henon_kernel):
        for fixed in henon_fixed_points(9.5, -1.0):
            value = md_point(henon_kernel, fixed, DescriptorParams(p=1.0, N=5, escape_radius=50.0))
            assert value.md_total < 1e-9
            assert not value.escaped

    def test_monotone_in_orbit_length(self, linear_kernel):
        q = MapPoint(0.2, -0.3)
        values = [md_point(linear_kernel, q, DescriptorParams(p=0.5, N=n)).md_total for n in range(1, 30)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_linear_saddle_symmetries(self, linear_kernel):
        params = DescriptorParams(p=0.5, N=20)
        base = md_point(linear_kernel, MapPoint(0.2, 0.3), params).md_total
        assert md_point(linear_kernel, MapPoint(-0.2, 0.3), params).md_total == base
        assert md_point(linear_kernel, MapPoint(0.2, -0.3), params).md_total == base
        assert md_point(linear_kernel, MapPoint(0.3, 0.2), params).md_total == pytest.approx(base, rel=1e-12)


class TestAccumulate:
    def test_array_matches_single_point(self, henon_kernel, rng):
        params = DescriptorParams(p=0.05, N=5, escape_radius=50.0)
        xs = rng.uniform(-6, 6, 64)
        ys = rng.uniform(-6, 6, 64)
        acc = accumulate(henon_kernel, xs, ys, params)
        for i in (0, 17, 63):
            single = md_point(henon_kernel, MapPoint(xs[i], ys[i]), params)
            assert single.md_total == pytest.approx(acc.md_total[i], rel=1e-14)
            assert single.escaped == acc.escaped[i]

    def test_shape_mismatch(self, linear_kernel):
        with pytest.raises(ParameterError):
            accumulate(linear_kernel, np.zeros(3), np.zeros(4), DescriptorParams(p=0.5, N=2))

    def test_constant_sequence_is_bitwise_autonomous(self, rng):
        xs = rng.uniform(-1, 1, 100)
        ys = rng.uniform(-1, 1, 100)
        params = DescriptorParams(p=0.5, N=20, n0=7)
        auto = accumulate(LinearSaddleKernel(LinearSaddleParams(1.1)), xs, ys, params)
        nonauto = accumulate(NonautonomousLinearKernel(LambdaSequence.constant(1.1)), xs, ys, params)
        assert np.array_equal(auto.md_total, nonauto.md_total)

    def test_base_time_matters_for_nonautonomous_kernels(self):
        kernel = NonautonomousLinearKernel(LambdaSequence.periodic([1.1, 1.3, 1.7]))
        q = MapPoint(0.4, 0.1)
        values = {md_point(kernel, q, DescriptorParams(p=0.5, N=4, n0=n0)).md_total for n0 in range(3)}
        assert len(values) == 3

    def test_unbounded_orbit_without_radius(self, henon_kernel):
        with pytest.raises(NonFiniteIterate):
            md_point(henon_kernel, MapPoint(50.0, 50.0), DescriptorParams(p=0.05, N=20))

    def test_escape_truncates_and_flags(self, henon_kernel):
        # H(5, 5) = (-20.5, 5) stays inside radius 50; the next iterate leaves it
        value = md_point(henon_kernel, MapPoint(5.0, 5.0), DescriptorParams(p=1.0, N=5, escape_radius=50.0))
        assert value.escaped_forward
        assert value.steps_completed_forward == 1
        assert value.md_plus == 25.5
        assert math.isfinite(value.md_total)

    def test_escape_free_orbit_completes_every_step(self, henon_kernel):
        fixed = henon_fixed_points(9.5, -1.0)[1]
        value = md_point(henon_kernel, fixed, DescriptorParams(p=0.05, N=5, escape_radius=50.0))
        assert value.steps_completed_forward == 5
        assert value.steps_completed_backward == 5
