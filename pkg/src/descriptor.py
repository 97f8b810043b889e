"""
Discrete Lagrangian descriptor MD_p over orbits of length 2N+1.

The orbit window is centered at the base time n0: N forward steps
(indices n0 .. n0+N-1) feed MD+, N backward steps (indices n0-1 .. n0-N)
feed MD-. Per-step increments:

    p <= 1 : |dx|^p + |dy|^p
    p >  1 : (|dx|^p + |dy|^p)^(1/p)      (p = 2 is the arclength form)

All accumulation runs on numpy arrays of initial conditions in a fixed
order per element, so a single point and a whole grid row produce the
same bits for the same initial condition.
"""

import math
from dataclasses import dataclass
from numbers import Integral
from typing import Optional, Tuple

import numpy as np

from .errors import NonFiniteIterate, ParameterError
from .map_kernels import MapKernel, MapPoint
from .utils.logger import setup_logger

logger = setup_logger(__name__)

REGIME_SUM = 'lp-sum'          # p <= 1
REGIME_ROOT = 'lp-root'        # p > 1, p != 2
REGIME_ARCLENGTH = 'arclength'  # p = 2


@dataclass(frozen=True)
class DescriptorParams:
    p: float
    N: int
    n0: int = 0
    escape_radius: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.p) and self.p > 0.0):
            raise ParameterError(f"p must be a finite real > 0, got {self.p}")
        if isinstance(self.N, bool) or not isinstance(self.N, Integral) or self.N < 1:
            raise ParameterError(f"N must be a positive integer, got {self.N!r}")
        if isinstance(self.n0, bool) or not isinstance(self.n0, Integral):
            raise ParameterError(f"n0 must be an integer, got {self.n0!r}")
        if self.escape_radius is not None and not (self.escape_radius > 0.0):
            raise ParameterError(f"escape_radius must be > 0 or None, got {self.escape_radius}")

    @property
    def norm_regime(self) -> str:
        if self.p <= 1.0:
            return REGIME_SUM
        if self.p == 2.0:
            return REGIME_ARCLENGTH
        return REGIME_ROOT


@dataclass(frozen=True)
class DescriptorValue:
    md_total: float
    md_plus: float
    md_minus: float
    escaped_forward: bool
    escaped_backward: bool
    steps_completed_forward: int
    steps_completed_backward: int

    @property
    def escaped(self) -> bool:
        return self.escaped_forward or self.escaped_backward


@dataclass
class OrbitAccumulation:
    """Array form of DescriptorValue, one entry per initial condition."""
    md_plus: np.ndarray
    md_minus: np.ndarray
    escaped_forward: np.ndarray
    escaped_backward: np.ndarray
    steps_forward: np.ndarray
    steps_backward: np.ndarray

    @property
    def md_total(self) -> np.ndarray:
        return self.md_plus + self.md_minus

    @property
    def escaped(self) -> np.ndarray:
        return self.escaped_forward | self.escaped_backward


def step_increment(dx, dy, p: float):
    """Contribution of one step (dx, dy) under the l^p regime selected by p."""
    if p <= 1.0:
        return np.power(np.abs(dx), p) + np.power(np.abs(dy), p)
    if p == 2.0:
        return np.sqrt(dx * dx + dy * dy)
    return np.power(np.power(np.abs(dx), p) + np.power(np.abs(dy), p), 1.0 / p)


def _half_orbit(kernel: MapKernel, x: np.ndarray, y: np.ndarray,
                params: DescriptorParams, forward: bool) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    total = np.zeros_like(x)
    steps = np.zeros(x.shape, dtype=np.int64)
    escaped = np.zeros(x.shape, dtype=bool)
    active = np.ones(x.shape, dtype=bool)
    radius = params.escape_radius

    with np.errstate(over='ignore', invalid='ignore'):
        for k in range(params.N):
            if forward:
                xn, yn = kernel.forward_xy(x, y, params.n0 + k)
            else:
                xn, yn = kernel.inverse_xy(x, y, params.n0 - 1 - k)

            finite = np.isfinite(xn) & np.isfinite(yn)
            if radius is None:
                if not np.all(finite[active]):
                    direction = 'forward' if forward else 'backward'
                    raise NonFiniteIterate(
                        f"{kernel.name}: non-finite iterate after {k + 1} {direction} steps; "
                        f"set an escape radius for unbounded maps")
                inside = active
            else:
                inside = active & finite & (np.hypot(xn, yn) <= radius)
                escaped |= active & ~inside

            increment = step_increment(xn - x, yn - y, params.p)
            total = np.where(inside, total + increment, total)
            steps += inside
            # escaped entries stay frozen at their last in-range iterate
            x = np.where(inside, xn, x)
            y = np.where(inside, yn, y)
            active = inside
            if not active.any():
                break

    return total, steps, escaped


def accumulate(kernel: MapKernel, x0, y0, params: DescriptorParams) -> OrbitAccumulation:
    """MD+ and MD- for every initial condition in the arrays x0, y0."""
    x = np.array(x0, dtype=np.float64, copy=True)
    y = np.array(y0, dtype=np.float64, copy=True)
    if x.shape != y.shape:
        raise ParameterError(f"x0 and y0 shapes differ: {x.shape} vs {y.shape}")

    plus, steps_f, esc_f = _half_orbit(kernel, x, y, params, forward=True)
    minus, steps_b, esc_b = _half_orbit(kernel, x, y, params, forward=False)
    return OrbitAccumulation(plus, minus, esc_f, esc_b, steps_f, steps_b)


def md_point(kernel: MapKernel, q0: MapPoint, params: DescriptorParams) -> DescriptorValue:
    """MD_p of the orbit through q0 at base time params.n0."""
    acc = accumulate(kernel, np.array([q0.x]), np.array([q0.y]), params)
    return DescriptorValue(
        md_total=float(acc.md_total[0]),
        md_plus=float(acc.md_plus[0]),
        md_minus=float(acc.md_minus[0]),
        escaped_forward=bool(acc.escaped_forward[0]),
        escaped_backward=bool(acc.escaped_backward[0]),
        steps_completed_forward=int(acc.steps_forward[0]),
        steps_completed_backward=int(acc.steps_backward[0]),
    )


def md_arclength(kernel: MapKernel, q0: MapPoint, params: DescriptorParams) -> DescriptorValue:
    """Arclength descriptor MD_2: the p = 2 case of md_point."""
    if params.p != 2.0:
        raise ParameterError(f"md_arclength requires p = 2, got p = {params.p}")
    return md_point(kernel, q0, params)
