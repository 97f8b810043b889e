"""
Validation utilities for run parameters
"""

import math
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from ..errors import ParameterError


def validate_domain(domain: Sequence[float]) -> Tuple[float, float, float, float]:
    """
    Validate a rectangular domain.

    Args:
        domain: (xmin, xmax, ymin, ymax)

    Returns:
        The domain as a tuple of floats
    """
    if domain is None or len(domain) != 4:
        raise ParameterError(f"domain needs four values xmin xmax ymin ymax, got {domain!r}")
    xmin, xmax, ymin, ymax = (float(v) for v in domain)
    if not all(math.isfinite(v) for v in (xmin, xmax, ymin, ymax)):
        raise ParameterError("domain bounds must be finite")
    if not (xmax > xmin and ymax > ymin):
        raise ParameterError(f"domain must satisfy xmax > xmin and ymax > ymin, got {domain!r}")
    return xmin, xmax, ymin, ymax


def validate_workers(workers: int) -> int:
    if workers is None or int(workers) != workers or workers < 1:
        raise ParameterError(f"workers must be an integer >= 1, got {workers!r}")
    return int(workers)


def parse_lambdas(value: Union[None, str, Iterable[float]]) -> Optional[List[float]]:
    """
    Parse a periodic rate sequence given as "1.1,1.3" or as a list.

    Returns:
        List of rates, or None when no sequence is given
    """
    if value is None or value == '' or value == []:
        return None
    if isinstance(value, str):
        parts = [v.strip() for v in value.split(',') if v.strip()]
    else:
        parts = list(value)
    try:
        rates = [float(v) for v in parts]
    except (TypeError, ValueError):
        raise ParameterError(f"lambdas must be comma-separated numbers, got {value!r}")
    for lam in rates:
        if not (math.isfinite(lam) and lam > 1.0):
            raise ParameterError(f"every rate in lambdas must be > 1, got {lam}")
    return rates


def validate_output_path(path: str, allowed: Sequence[str]) -> str:
    """Check that the extension of ``path`` is one of ``allowed``."""
    suffix = path.rsplit('.', 1)[-1].lower() if '.' in path else ''
    if suffix not in allowed:
        raise ParameterError(
            f"unsupported output '{path}': extension must be one of {', '.join('.' + a for a in allowed)}")
    return path
