"""
Low-MD structure of a computed field: the lowest isolated nodes and the
connectivity of the low-MD set.
"""

from typing import List, Tuple

import numpy as np
from scipy import ndimage

from ..errors import FewerThanK, ParameterError
from ..map_kernels import MapPoint
from ..utils.logger import setup_logger
from .grid_engine import FieldResult

logger = setup_logger(__name__)

# minimum pairwise separation of markers, in grid cells (Chebyshev distance)
MARKER_SEPARATION = 3


def min_markers(field: FieldResult, k: int) -> List[Tuple[MapPoint, float]]:
    """
    The k lowest non-escaped nodes, at least MARKER_SEPARATION cells apart.

    Nodes are visited in ascending value (ties broken by row-major index)
    and a node is accepted only if no accepted marker lies within the
    separation window.

    Raises:
        FewerThanK: fewer than k nodes survive escape filtering and suppression
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")

    grid = field.grid
    flat_values = field.values.ravel()
    candidates = np.flatnonzero(~field.escaped.ravel())
    if candidates.size < k:
        raise FewerThanK(f"requested {k} markers but only {candidates.size} nodes did not escape")

    order = candidates[np.argsort(flat_values[candidates], kind='stable')]
    chosen: List[Tuple[int, int]] = []
    for flat in order:
        j, i = divmod(int(flat), grid.nx)
        if any(max(abs(i - ci), abs(j - cj)) < MARKER_SEPARATION for ci, cj in chosen):
            continue
        chosen.append((i, j))
        if len(chosen) == k:
            break

    if len(chosen) < k:
        raise FewerThanK(
            f"requested {k} markers but only {len(chosen)} are {MARKER_SEPARATION} cells apart")

    return [(grid.node(i, j), float(field.values[j, i])) for i, j in chosen]


def low_md_mask(field: FieldResult, fraction: float) -> np.ndarray:
    """Boolean mask of the non-escaped nodes at or below the ``fraction`` quantile."""
    if not 0.0 < fraction < 1.0:
        raise ParameterError(f"fraction must lie in (0, 1), got {fraction}")
    kept = field.non_escaped_values()
    if kept.size == 0:
        return np.zeros(field.grid.shape, dtype=bool)
    cutoff = np.quantile(kept, fraction)
    return (~field.escaped) & (field.values <= cutoff)


def low_md_components(field: FieldResult, fraction: float = 0.05) -> int:
    """Number of 8-connected components of the low-MD set."""
    mask = low_md_mask(field, fraction)
    _, count = ndimage.label(mask, structure=np.ones((3, 3), dtype=bool))
    logger.debug(f"Low-MD set (bottom {fraction:.0%}): {int(mask.sum())} nodes in {count} components")
    return int(count)
