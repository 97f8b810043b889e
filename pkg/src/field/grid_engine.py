"""
Parallel evaluation of MD_p over rectangular node-centered grids.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from numbers import Integral
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..descriptor import DescriptorParams, OrbitAccumulation, accumulate
from ..errors import ParameterError
from ..map_kernels import MapKernel, MapPoint
from ..utils.logger import setup_logger
from .progress_tracker import ProgressTracker

logger = setup_logger(__name__)

# chunks per worker; more chunks only refine progress reporting
CHUNKS_PER_WORKER = 4


@dataclass(frozen=True)
class GridSpec:
    """
    Node-centered grid with inclusive endpoints.

    Node (i, j) sits at (xmin + i*dx, ymin + j*dy), dx = (xmax-xmin)/(nx-1).
    Arrays over the grid have shape (ny, nx): y-major, x fastest.
    """
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    nx: int
    ny: int

    def __post_init__(self):
        for name in ('nx', 'ny'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, Integral) or value < 2:
                raise ParameterError(f"{name} must be an integer >= 2, got {value!r}")
        if not all(math.isfinite(v) for v in (self.xmin, self.xmax, self.ymin, self.ymax)):
            raise ParameterError("grid bounds must be finite")
        if not self.xmax > self.xmin:
            raise ParameterError(f"xmax ({self.xmax}) must exceed xmin ({self.xmin})")
        if not self.ymax > self.ymin:
            raise ParameterError(f"ymax ({self.ymax}) must exceed ymin ({self.ymin})")

    @classmethod
    def from_spacing(cls, xmin: float, xmax: float, ymin: float, ymax: float, spacing: float) -> 'GridSpec':
        """Grid whose nodes are ``spacing`` apart (bounds must be multiples of it apart)."""
        if not spacing > 0.0:
            raise ParameterError(f"spacing must be > 0, got {spacing}")
        nx = int(round((xmax - xmin) / spacing)) + 1
        ny = int(round((ymax - ymin) / spacing)) + 1
        return cls(xmin, xmax, ymin, ymax, nx, ny)

    @property
    def dx(self) -> float:
        return (self.xmax - self.xmin) / (self.nx - 1)

    @property
    def dy(self) -> float:
        return (self.ymax - self.ymin) / (self.ny - 1)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.ny, self.nx)

    def xs(self) -> np.ndarray:
        return self.xmin + np.arange(self.nx) * self.dx

    def ys(self) -> np.ndarray:
        return self.ymin + np.arange(self.ny) * self.dy

    def node(self, i: int, j: int) -> MapPoint:
        return MapPoint(self.xmin + i * self.dx, self.ymin + j * self.dy)

    def nearest_node(self, point: MapPoint) -> Tuple[int, int]:
        """(i, j) of the node closest to ``point``, clipped to the grid."""
        i = int(round((point.x - self.xmin) / self.dx))
        j = int(round((point.y - self.ymin) / self.dy))
        return min(max(i, 0), self.nx - 1), min(max(j, 0), self.ny - 1)


@dataclass
class FieldResult:
    grid: GridSpec
    values: np.ndarray
    escaped: np.ndarray
    params: DescriptorParams
    kernel_name: str
    kernel_parameters: Dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0

    def __post_init__(self):
        if self.values.shape != self.grid.shape or self.escaped.shape != self.grid.shape:
            raise ParameterError(
                f"field arrays must have shape {self.grid.shape}, "
                f"got {self.values.shape} and {self.escaped.shape}")

    @property
    def escape_fraction(self) -> float:
        return float(self.escaped.mean())

    def non_escaped_values(self) -> np.ndarray:
        return self.values[~self.escaped]

    def value_at(self, point: MapPoint) -> float:
        i, j = self.grid.nearest_node(point)
        return float(self.values[j, i])


def _evaluate_chunk(kernel: MapKernel, xs: np.ndarray, ys: np.ndarray,
                    params: DescriptorParams) -> Tuple[OrbitAccumulation, float]:
    started = time.perf_counter()
    acc = accumulate(kernel, xs, ys, params)
    return acc, time.perf_counter() - started


def _chunk_bounds(count: int, workers: int) -> List[Tuple[int, int]]:
    n_chunks = min(count, workers * CHUNKS_PER_WORKER) if workers > 1 else 1
    edges = np.linspace(0, count, n_chunks + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _run_chunks(kernel: MapKernel, xs: np.ndarray, ys: np.ndarray, params: DescriptorParams,
                bounds: List[Tuple[int, int]], workers: int,
                tracker: Optional[ProgressTracker],
                row_width: int = 1) -> Dict[Tuple[int, int], OrbitAccumulation]:
    results: Dict[Tuple[int, int], OrbitAccumulation] = {}
    if workers == 1:
        for lo, hi in bounds:
            acc, duration = _evaluate_chunk(kernel, xs[lo:hi], ys[lo:hi], params)
            results[(lo, hi)] = acc
            if tracker is not None:
                tracker.complete_chunk(lo // row_width, hi // row_width, duration)
        return results

    with ProcessPoolExecutor(max_workers=workers) as ex:
        futures = {ex.submit(_evaluate_chunk, kernel, xs[lo:hi], ys[lo:hi], params): (lo, hi)
                   for lo, hi in bounds}
        for fut in as_completed(futures):
            lo, hi = futures[fut]
            acc, duration = fut.result()
            results[(lo, hi)] = acc
            if tracker is not None:
                tracker.complete_chunk(lo // row_width, hi // row_width, duration)
    return results


def evaluate_points(kernel: MapKernel, xs: np.ndarray, ys: np.ndarray, params: DescriptorParams,
                    workers: int = 1) -> OrbitAccumulation:
    """accumulate() over 1D point arrays, split into contiguous chunks across workers."""
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    bounds = _chunk_bounds(len(xs), workers)
    parts = _run_chunks(kernel, xs, ys, params, bounds, workers, None)
    ordered = [parts[b] for b in bounds]
    return OrbitAccumulation(
        md_plus=np.concatenate([a.md_plus for a in ordered]),
        md_minus=np.concatenate([a.md_minus for a in ordered]),
        escaped_forward=np.concatenate([a.escaped_forward for a in ordered]),
        escaped_backward=np.concatenate([a.escaped_backward for a in ordered]),
        steps_forward=np.concatenate([a.steps_forward for a in ordered]),
        steps_backward=np.concatenate([a.steps_backward for a in ordered]),
    )


def evaluate_field(kernel: MapKernel, grid: GridSpec, params: DescriptorParams, workers: int = 1,
                   tracker_console=None) -> FieldResult:
    """
    MD_p at every node of ``grid``.

    Rows are split into contiguous chunks; every node is computed
    independently with a fixed summation order, so the result does not
    depend on the worker count.
    """
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")

    logger.debug(f"Evaluating {kernel.describe()} on {grid.nx}x{grid.ny} nodes "
                 f"(p={params.p}, N={params.N}, n0={params.n0}, workers={workers})")
    started = time.perf_counter()

    gx, gy = np.meshgrid(grid.xs(), grid.ys())
    flat_x = gx.ravel()
    flat_y = gy.ravel()
    row_bounds = _chunk_bounds(grid.ny, workers)
    bounds = [(lo * grid.nx, hi * grid.nx) for lo, hi in row_bounds]

    values = np.empty(grid.nx * grid.ny, dtype=np.float64)
    escaped = np.empty(grid.nx * grid.ny, dtype=bool)

    with ProgressTracker(len(bounds), tracker_console, description=kernel.name) as tracker:
        parts = _run_chunks(kernel, flat_x, flat_y, params, bounds, workers, tracker, row_width=grid.nx)
        for (lo, hi), acc in parts.items():
            values[lo:hi] = acc.md_total
            escaped[lo:hi] = acc.escaped
        chunk_summary = tracker.get_summary()

    wall_time = time.perf_counter() - started
    result = FieldResult(
        grid=grid,
        values=values.reshape(grid.shape),
        escaped=escaped.reshape(grid.shape),
        params=params,
        kernel_name=kernel.name,
        kernel_parameters=dict(kernel.parameters),
        wall_time=wall_time,
    )
    logger.debug(f"Field done in {wall_time:.3f}s over {chunk_summary['completed_chunks']} chunks "
                 f"(slowest {chunk_summary['slowest_chunk']:.3f}s)")
    if result.escape_fraction > 0.5:
        logger.info(f"{result.escape_fraction:.2%} of the nodes left the escape radius {params.escape_radius:g}; "
                    f"their MD keeps only the steps taken inside it")
    return result
