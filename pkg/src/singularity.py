"""
Singular crossings of the descriptor along 1D transects.

A manifold crossing shows up as a cusp of MD_p: the finite-difference
derivative across it grows without bound as the spacing shrinks. The
scan flags samples whose |derivative| stands far above the transect
median, localizes each flagged run to the bottom of its cusp, and keeps
the crossing only if the derivative really diverges under refinement.
"""

import math
from dataclasses import dataclass, field
from numbers import Integral
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .descriptor import DescriptorParams
from .errors import InsufficientSignal, ParameterError
from .field.grid_engine import evaluate_points
from .map_kernels import MapKernel, MapPoint
from .utils.logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_THRESHOLD_FACTOR = 10.0

# samples in each zoom level of the cusp localization
ZOOM_SAMPLES = 201
ZOOM_LEVELS = 3
ZOOM_SHRINK = 50.0

MONOTONE_RTOL = 1e-9
# exponents above this are treated as a bounded derivative
EXPONENT_TOL = 1e-6


def _unit(direction: Sequence[float]) -> Tuple[float, float]:
    dx, dy = (float(c) for c in direction)
    norm = math.hypot(dx, dy)
    if not (math.isfinite(norm) and norm > 0.0):
        raise ParameterError(f"direction must be a nonzero finite vector, got ({dx}, {dy})")
    return dx / norm, dy / norm


@dataclass(frozen=True)
class TransectSpec:
    """
    Line of ``samples`` equally spaced points anchor + s*direction,
    s in [-half_length, half_length]. The direction is normalized on
    construction; an odd sample count puts the anchor on a sample.
    """
    anchor: MapPoint
    direction: Tuple[float, float]
    half_length: float
    samples: int

    def __post_init__(self):
        object.__setattr__(self, 'direction', _unit(self.direction))
        if not (math.isfinite(self.half_length) and self.half_length > 0.0):
            raise ParameterError(f"half_length must be > 0, got {self.half_length}")
        if isinstance(self.samples, bool) or not isinstance(self.samples, Integral) or self.samples < 3:
            raise ParameterError(f"samples must be an integer >= 3, got {self.samples!r}")
        if self.samples % 2 == 0:
            raise ParameterError(f"samples must be odd so the anchor is sampled, got {self.samples}")

    @classmethod
    def horizontal(cls, y: float, xmin: float, xmax: float, samples: int) -> 'TransectSpec':
        """Transect along y = const between xmin and xmax."""
        if not xmax > xmin:
            raise ParameterError(f"xmax ({xmax}) must exceed xmin ({xmin})")
        centre = 0.5 * (xmin + xmax)
        return cls(MapPoint(centre, y), (1.0, 0.0), 0.5 * (xmax - xmin), samples)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / (self.samples - 1)

    def positions(self) -> np.ndarray:
        return np.linspace(-self.half_length, self.half_length, self.samples)

    def coordinates(self, positions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        ux, uy = self.direction
        s = np.asarray(positions, dtype=np.float64)
        return self.anchor.x + s * ux, self.anchor.y + s * uy

    def point_at(self, position: float) -> MapPoint:
        ux, uy = self.direction
        return MapPoint(self.anchor.x + position * ux, self.anchor.y + position * uy)


@dataclass(frozen=True)
class Crossing:
    position: float
    point: MapPoint
    derivative_magnitude: float
    refinement_exponent: float


@dataclass
class TransectReport:
    spec: TransectSpec
    positions: np.ndarray
    md_values: np.ndarray
    derivative: np.ndarray
    escaped: np.ndarray
    threshold: float
    crossings: List[Crossing] = field(default_factory=list)


def _candidate_runs(flagged: np.ndarray) -> List[Tuple[int, int]]:
    """Inclusive index runs of flagged samples, merging runs one sample apart."""
    idx = np.flatnonzero(flagged)
    if idx.size == 0:
        return []
    runs: List[List[int]] = [[int(idx[0]), int(idx[0])]]
    for i in idx[1:]:
        # the central difference vanishes on the axis of a symmetric cusp
        if i - runs[-1][1] <= 2:
            runs[-1][1] = int(i)
        else:
            runs.append([int(i), int(i)])
    return [(a, b) for a, b in runs]


def _localize_minimum(kernel: MapKernel, spec: TransectSpec, params: DescriptorParams,
                      start: float, workers: int) -> float:
    """Zoom onto the lowest MD near ``start`` (cusps of MD_p are local minima)."""
    centre = start
    width = spec.spacing
    for _ in range(ZOOM_LEVELS):
        offsets = np.linspace(-2.0 * width, 2.0 * width, ZOOM_SAMPLES)
        xs, ys = spec.coordinates(centre + offsets)
        acc = evaluate_points(kernel, xs, ys, params, workers)
        centre = float(centre + offsets[int(np.argmin(acc.md_total))])
        width /= ZOOM_SHRINK
    return centre


def default_spacings(h: float, levels: int = 4) -> List[float]:
    return [h / 2 ** k for k in range(levels)]


def refinement_exponent(kernel: MapKernel, crossing: MapPoint, direction: Sequence[float],
                        params: DescriptorParams, spacings: Sequence[float]) -> float:
    """
    Log-log slope of the difference quotient across ``crossing`` against the spacing.

    At each spacing s the quotient is the larger one-sided difference
    max(|MD(c+s) - MD(c)|, |MD(c) - MD(c-s)|) / s. Near an |x|^p cusp it
    scales like s^(p-1), so a negative slope marks a divergent derivative.

    Raises:
        ParameterError: fewer than three spacings, or not strictly decreasing
        InsufficientSignal: quotients vanish or shrink with the spacing
    """
    s = np.asarray(spacings, dtype=np.float64)
    if s.ndim != 1 or s.size < 3:
        raise ParameterError(f"need at least 3 spacings, got {list(spacings)}")
    if not (np.all(s > 0.0) and np.all(np.diff(s) < 0.0)):
        raise ParameterError(f"spacings must be positive and strictly decreasing, got {list(spacings)}")

    ux, uy = _unit(direction)
    offsets = np.concatenate(([0.0], s, -s))
    xs = crossing.x + offsets * ux
    ys = crossing.y + offsets * uy
    md = evaluate_points(kernel, xs, ys, params).md_total

    centre = md[0]
    ahead = md[1:1 + s.size]
    behind = md[1 + s.size:]
    quotient = np.maximum(np.abs(ahead - centre), np.abs(centre - behind)) / s

    if not np.all(np.isfinite(quotient)) or np.any(quotient <= 0.0):
        raise InsufficientSignal(f"difference quotients at ({crossing.x:.6g}, {crossing.y:.6g}) vanish")
    if np.any(quotient[1:] < quotient[:-1] * (1.0 - MONOTONE_RTOL)):
        raise InsufficientSignal(
            f"derivative at ({crossing.x:.6g}, {crossing.y:.6g}) does not grow under refinement")

    slope = np.polyfit(np.log(s), np.log(quotient), 1)[0]
    return float(slope)


def scan_transect(kernel: MapKernel, spec: TransectSpec, params: DescriptorParams,
                  threshold_factor: float = DEFAULT_THRESHOLD_FACTOR, workers: int = 1,
                  spacings: Optional[Sequence[float]] = None) -> TransectReport:
    """
    Sample MD_p along the transect and detect singular crossings.

    Args:
        kernel: Map kernel
        spec: Transect geometry
        params: Descriptor parameters
        threshold_factor: candidates exceed this multiple of the median |derivative|
        workers: Processes used for the per-sample descriptor evaluation
        spacings: Refinement spacings; defaults to the sample spacing halved three times

    Returns:
        TransectReport with every crossing whose refinement exponent is negative
    """
    if not threshold_factor > 0.0:
        raise ParameterError(f"threshold_factor must be > 0, got {threshold_factor}")
    if params.p > 1.0:
        logger.warning(f"p = {params.p} > 1: manifold cusps are only guaranteed for p <= 1")

    positions = spec.positions()
    xs, ys = spec.coordinates(positions)
    acc = evaluate_points(kernel, xs, ys, params, workers)
    md = acc.md_total
    derivative = np.gradient(md, spec.spacing)
    magnitude = np.abs(derivative)
    threshold = threshold_factor * float(np.median(magnitude))

    report = TransectReport(spec=spec, positions=positions, md_values=md, derivative=derivative,
                            escaped=acc.escaped, threshold=threshold)
    if acc.escaped.any():
        logger.debug(f"{int(acc.escaped.sum())} of {spec.samples} transect samples escaped")

    refine = list(spacings) if spacings is not None else default_spacings(spec.spacing)
    for first, last in _candidate_runs(magnitude > threshold):
        weights = magnitude[first:last + 1]
        centroid = float(np.sum(weights * positions[first:last + 1]) / np.sum(weights))
        position = _localize_minimum(kernel, spec, params, centroid, workers)
        point = spec.point_at(position)
        try:
            exponent = refinement_exponent(kernel, point, spec.direction, params, refine)
        except InsufficientSignal as e:
            logger.debug(f"Dropped candidate near s={centroid:.6g}: {e}")
            continue
        if exponent >= -EXPONENT_TOL:
            logger.debug(f"Dropped candidate near s={position:.6g}: bounded derivative (exponent {exponent:.3f})")
            continue
        report.crossings.append(Crossing(
            position=position,
            point=point,
            derivative_magnitude=float(weights.max()),
            refinement_exponent=exponent,
        ))

    logger.debug(f"Transect on {kernel.name}: {len(report.crossings)} crossings "
                 f"(threshold {threshold:.4g})")
    return report
