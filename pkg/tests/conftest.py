"""Shared fixtures for the descriptor test suite."""
from __future__ import annotations

import numpy as np
import pytest
from click.testing import CliRunner

from src.map_kernels import (
    HenonKernel,
    HenonParams,
    LambdaSequence,
    LinearSaddleKernel,
    LinearSaddleParams,
    NonautonomousLinearKernel,
    NonautonomousNormalFormKernel,
    NormalFormKernel,
    NormalFormParams,
    RotatedSaddleKernel,
    RotatedSaddleParams,
    RotationKernel,
    RotationParams,
)


@pytest.fixture
def linear_kernel() -> LinearSaddleKernel:
    return LinearSaddleKernel(LinearSaddleParams(1.1))


@pytest.fixture
def normal_form_kernel() -> NormalFormKernel:
    return NormalFormKernel(NormalFormParams(1.1, 0.5))


@pytest.fixture
def henon_kernel() -> HenonKernel:
    return HenonKernel(HenonParams(9.5, -1.0))


@pytest.fixture
def nonautonomous_henon_kernel() -> HenonKernel:
    return HenonKernel(HenonParams(9.5, -1.0, 0.2))


@pytest.fixture
def all_kernels():
    """One instance of every built-in kernel."""
    return [
        LinearSaddleKernel(LinearSaddleParams(1.1)),
        RotatedSaddleKernel(RotatedSaddleParams(1.1)),
        NormalFormKernel(NormalFormParams(1.1, 0.5)),
        NonautonomousLinearKernel(LambdaSequence.cosine(1.2, 0.1)),
        NonautonomousNormalFormKernel(LambdaSequence.periodic([1.1, 1.3]), 0.5),
        HenonKernel(HenonParams(9.5, -1.0)),
        HenonKernel(HenonParams(9.5, -1.0, 0.2)),
        RotationKernel(RotationParams(0.7)),
    ]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()
