"""
Closed-form values of MD_p (p <= 1) for the analytic kernels.

These are the reference values the direct orbit summation in
``descriptor`` is checked against.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateRate, ParameterError
from .map_kernels import (
    LambdaSequence,
    LinearSaddleKernel,
    MapKernel,
    NonautonomousLinearKernel,
    NonautonomousNormalFormKernel,
    NormalFormKernel,
    NormalFormParams,
    RotatedSaddleKernel,
)
from .utils.logger import setup_logger

logger = setup_logger(__name__)

# exponent above which lambda^(Np) is handled in log space
LOG_SPACE_THRESHOLD = 600.0


def _check_regime(p: float, N: int) -> None:
    if not (0.0 < p <= 1.0):
        raise ParameterError(f"closed forms hold for 0 < p <= 1, got p = {p}")
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")


def _check_rate(lam: float) -> None:
    if not lam > 1.0:
        raise DegenerateRate(f"rate {lam} <= 1: geometric sums of the closed form degenerate")


def _expanding_sum(log_lam: float, p: float, N: int) -> float:
    """sum_{k<N} lam^(kp) = (lam^(Np) - 1)/(lam^p - 1)."""
    big = N * p * log_lam
    denom = math.expm1(p * log_lam)
    if big > LOG_SPACE_THRESHOLD:
        log_num = big + math.log1p(-math.exp(-big))
        try:
            return math.exp(log_num - math.log(denom))
        except OverflowError:
            return math.inf
    return math.expm1(big) / denom


def _contracting_sum(log_lam: float, p: float, N: int) -> float:
    """sum_{k<N} lam^(-kp) = (1 - lam^(-Np))/(1 - lam^(-p))."""
    return math.expm1(-N * p * log_lam) / math.expm1(-p * log_lam)


def f_linear(lam: float, p: float, N: int) -> float:
    """
    Bracketed factor of the linear saddle descriptor.

    MD_p(x0, y0) = (|x0|^p + |y0|^p) * f_linear(lam, p, N).
    """
    _check_regime(p, N)
    _check_rate(lam)
    log_lam = math.log(lam)
    expanding = abs(lam - 1.0) ** p * _expanding_sum(log_lam, p, N)
    contracting = abs(1.0 / lam - 1.0) ** p * _contracting_sum(log_lam, p, N)
    return expanding + contracting


def md_linear(x0: float, y0: float, lam: float, p: float, N: int) -> float:
    return (abs(x0) ** p + abs(y0) ** p) * f_linear(lam, p, N)


def _product_form(forward_rates: Sequence[float], backward_rates: Sequence[float],
                  p: float) -> Tuple[float, float]:
    """
    Coefficients (f(Lambda), g(Lambda*)) of |x0|^p and |y0|^p.

    forward_rates are lam_{n0}, ..., lam_{n0+N-1};
    backward_rates are lam_{n0-1}, ..., lam_{n0-N}.
    """
    for lam in list(forward_rates) + list(backward_rates):
        _check_rate(lam)

    f_coef = 0.0
    g_coef = 0.0
    grow = 1.0     # prod |lam_j|^p over the steps taken so far
    shrink = 1.0   # prod |1/lam_j|^p
    for lam in forward_rates:
        f_coef += grow * abs(lam - 1.0) ** p
        g_coef += shrink * abs(1.0 / lam - 1.0) ** p
        grow *= lam ** p
        shrink *= lam ** -p

    grow = 1.0
    shrink = 1.0
    for lam in backward_rates:
        f_coef += shrink * abs(1.0 - 1.0 / lam) ** p
        g_coef += grow * abs(1.0 - lam) ** p
        shrink *= lam ** -p
        grow *= lam ** p

    return f_coef, g_coef


def nonautonomous_coefficients(seq: LambdaSequence, p: float, N: int, n0: int = 0) -> Tuple[float, float]:
    """(f(Lambda, p, N), g(Lambda*, p, N)) for the window centered at n0."""
    _check_regime(p, N)
    forward = seq.window(n0, n0 + N - 1)
    backward = list(reversed(seq.window(n0 - N, n0 - 1)))
    return _product_form(forward, backward, p)


def md_nonautonomous_linear(x0: float, y0: float, seq: LambdaSequence, p: float, N: int,
                            n0: int = 0) -> float:
    """|x0|^p f(Lambda, p, N) + |y0|^p g(Lambda*, p, N)."""
    f_coef, g_coef = nonautonomous_coefficients(seq, p, N, n0)
    return abs(x0) ** p * f_coef + abs(y0) ** p * g_coef


def md_normal_form(xi0: float, eta0: float, params: NormalFormParams, p: float, N: int) -> float:
    """
    (|xi0|^p + |eta0|^p) f(U(xi0 eta0), p, N).

    U is constant along orbits of the truncated normal form, so it is
    evaluated once at the initial condition.
    """
    u = params.multiplier(xi0 * eta0)
    if not u > 1.0:
        raise DegenerateRate(f"U(xi0*eta0) = {u} <= 1: outside the hyperbolic neighborhood")
    return (abs(xi0) ** p + abs(eta0) ** p) * f_linear(u, p, N)


def md_nonautonomous_normal_form(xi0: float, eta0: float, seq: LambdaSequence, u2: float,
                                 p: float, N: int, n0: int = 0) -> float:
    """Nonautonomous product form with rates U_n = lam_n + u2 xi0 eta0."""
    _check_regime(p, N)
    s = xi0 * eta0
    forward = [lam + u2 * s for lam in seq.window(n0, n0 + N - 1)]
    backward = [lam + u2 * s for lam in reversed(seq.window(n0 - N, n0 - 1))]
    f_coef, g_coef = _product_form(forward, backward, p)
    return abs(xi0) ** p * f_coef + abs(eta0) ** p * g_coef


def md_rotated_saddle(x0: float, y0: float, lam: float, p: float, N: int) -> float:
    """
    Rotated saddle descriptor from the matrix powers of A.

    A^k - A^(k-1)       = (lam-1)/2 [[a_k, -b_k], [-b_k, a_k]]
    A^(-k) - A^(-(k-1)) = (lam-1)/2 [[a_k,  b_k], [ b_k, a_k]]
    with a_k = lam^(k-1) - lam^(-k) and b_k = lam^(k-1) + lam^(-k).
    """
    _check_regime(p, N)
    _check_rate(lam)
    half = (lam - 1.0) / 2.0
    total = 0.0
    for k in range(1, N + 1):
        a_k = lam ** (k - 1) - lam ** -k
        b_k = lam ** (k - 1) + lam ** -k
        total += abs(half * (a_k * x0 - b_k * y0)) ** p + abs(half * (a_k * y0 - b_k * x0)) ** p
    for k in range(1, N + 1):
        a_k = lam ** (k - 1) - lam ** -k
        b_k = lam ** (k - 1) + lam ** -k
        total += abs(half * (a_k * x0 + b_k * y0)) ** p + abs(half * (b_k * x0 + a_k * y0)) ** p
    return total


def slope_m(lam: float, i: int) -> float:
    """
    Slope m(lam, i) of the i-th singular line y = m x of the rotated saddle.

    Numerator and denominator of
    (lam^(2(i+1)) - lam^(2(i+1)-1) - lam + 1)/(lam^(2(i+1)) - lam^(2(i+1)-1) + lam - 1)
    share the factor (lam - 1); what remains is tanh((2i+1) ln(lam)/2).
    """
    if not lam > 1.0:
        raise ParameterError(f"slope_m requires lam > 1, got {lam}")
    if i < 0:
        raise ParameterError(f"slope_m requires i >= 0, got {i}")
    return math.tanh((2 * i + 1) * math.log1p(lam - 1.0) / 2.0)


def slope_minus_m(lam: float, i: int) -> float:
    """Companion singular line y = x/m(lam, i)."""
    return 1.0 / slope_m(lam, i)


@dataclass(frozen=True)
class ClosedFormContext:
    """Rate (or rate sequence), exponent and half-orbit length of a closed form."""
    p: float
    N: int
    lam: Optional[float] = None
    sequence: Optional[LambdaSequence] = None

    def __post_init__(self):
        _check_regime(self.p, self.N)
        if (self.lam is None) == (self.sequence is None):
            raise ParameterError("exactly one of lam and sequence must be given")
        if self.lam is not None:
            _check_rate(self.lam)

    def coefficients(self, n0: int = 0) -> Tuple[float, float]:
        """(f, g) weights of |x0|^p and |y0|^p for the window centered at n0."""
        if self.sequence is not None:
            return nonautonomous_coefficients(self.sequence, self.p, self.N, n0)
        coef = f_linear(self.lam, self.p, self.N)
        return coef, coef

    def oracle(self, n0: int = 0) -> Callable[[float, float], float]:
        f_coef, g_coef = self.coefficients(n0)
        if self.sequence is None:
            return lambda x0, y0: (abs(x0) ** self.p + abs(y0) ** self.p) * f_coef
        return lambda x0, y0: abs(x0) ** self.p * f_coef + abs(y0) ** self.p * g_coef

    def md(self, x0: float, y0: float, n0: int = 0) -> float:
        return self.oracle(n0)(x0, y0)


def closed_form_for(kernel: MapKernel, p: float, N: int, n0: int = 0) -> Callable[[float, float], float]:
    """
    Closed form matching ``kernel``, as a function of the initial condition.

    Raises:
        ParameterError: the kernel has no closed form (Henon, rotation)
    """
    _check_regime(p, N)
    if isinstance(kernel, LinearSaddleKernel):
        return ClosedFormContext(p, N, lam=kernel.params.lam).oracle(n0)
    if isinstance(kernel, RotatedSaddleKernel):
        return lambda x0, y0: md_rotated_saddle(x0, y0, kernel.params.lam, p, N)
    if isinstance(kernel, NormalFormKernel):
        return lambda x0, y0: md_normal_form(x0, y0, kernel.params, p, N)
    if isinstance(kernel, NonautonomousLinearKernel):
        return ClosedFormContext(p, N, sequence=kernel.sequence).oracle(n0)
    if isinstance(kernel, NonautonomousNormalFormKernel):
        return lambda x0, y0: md_nonautonomous_normal_form(x0, y0, kernel.sequence, kernel.u2, p, N, n0)
    raise ParameterError(f"no closed form is available for kernel '{kernel.name}'")


def sample_points(oracle: Callable[[float, float], float], count: int,
                  half_width: float = 1.0, seed: int = 0) -> List[Tuple[float, float]]:
    """
    Deterministic sample of initial conditions in [-w, w]^2 at which the
    closed form is defined (points outside the hyperbolic neighborhood of
    a normal form are redrawn).
    """
    rng = np.random.default_rng(seed)
    points: List[Tuple[float, float]] = []
    attempts = 0
    while len(points) < count:
        attempts += 1
        if attempts > 100 * count:
            raise ParameterError(
                f"could not draw {count} points inside the closed-form domain of [-{half_width}, {half_width}]^2")
        x0, y0 = (float(v) for v in rng.uniform(-half_width, half_width, size=2))
        try:
            oracle(x0, y0)
        except DegenerateRate:
            continue
        points.append((x0, y0))
    return points
