"""
Two dimensional map kernels with forward and inverse steps.

Every kernel works on plain floats and on numpy arrays alike, so the
descriptor can push a whole row of initial conditions through one call.

Time indexing contract for nonautonomous kernels: ``forward(q, n)`` maps a
point at time n to time n+1 using the parameters of index n, and
``inverse(q, n)`` maps a point at time n+1 back to time n using the same
index n. Stepping backward from time n therefore consumes index n-1.
"""

import math
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import IndexOutOfRange, NonPositiveMultiplier, ParameterError
from .utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class MapPoint:
    """A point (x, y) of the phase plane."""
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ParameterError(f"MapPoint coordinates must be finite, got ({self.x}, {self.y})")

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)


def _require_expanding(lam: float, what: str = 'lambda') -> None:
    if not (math.isfinite(lam) and lam > 1.0):
        raise ParameterError(f"{what} must be a finite real > 1, got {lam}")


@dataclass(frozen=True)
class LinearSaddleParams:
    lam: float

    def __post_init__(self):
        _require_expanding(self.lam)


@dataclass(frozen=True)
class RotatedSaddleParams:
    lam: float

    def __post_init__(self):
        _require_expanding(self.lam)


@dataclass(frozen=True)
class NormalFormParams:
    """Truncated normal form multiplier U(s) = lam + u2*s."""
    lam: float
    u2: float = 0.0

    def __post_init__(self):
        _require_expanding(self.lam)
        if not math.isfinite(self.u2):
            raise ParameterError(f"u2 must be finite, got {self.u2}")

    def multiplier(self, s):
        return self.lam + self.u2 * s


@dataclass(frozen=True)
class LambdaSequence:
    """
    Expansion rates lambda_n indexed by integer time.

    Built with one of the constructors below; every rule guarantees
    lambda_n > 1 for all n it is defined at.
    """
    kind: str
    values: Tuple[float, ...] = ()
    start: int = 0
    base: float = 0.0
    amplitude: float = 0.0

    def __post_init__(self):
        if self.kind == 'constant':
            _require_expanding(self.base, 'constant rate')
        elif self.kind in ('table', 'periodic'):
            if not self.values:
                raise ParameterError(f"{self.kind} lambda sequence needs at least one value")
            for v in self.values:
                _require_expanding(v, 'every lambda_n')
        elif self.kind == 'cosine':
            _require_expanding(self.base - abs(self.amplitude), 'base - |amplitude|')
        else:
            raise ParameterError(f"Unknown lambda sequence kind: {self.kind}")

    @classmethod
    def constant(cls, lam: float) -> 'LambdaSequence':
        return cls(kind='constant', base=lam)

    @classmethod
    def table(cls, values: Sequence[float], start: int = 0) -> 'LambdaSequence':
        """Explicit table covering n = start .. start+len(values)-1."""
        return cls(kind='table', values=tuple(float(v) for v in values), start=int(start))

    @classmethod
    def periodic(cls, values: Sequence[float]) -> 'LambdaSequence':
        """lambda_n = values[n mod len(values)]."""
        return cls(kind='periodic', values=tuple(float(v) for v in values))

    @classmethod
    def cosine(cls, base: float, amplitude: float) -> 'LambdaSequence':
        """lambda_n = base + amplitude*cos(n), n in radians."""
        return cls(kind='cosine', base=base, amplitude=amplitude)

    def __call__(self, n: int) -> float:
        n = int(n)
        if self.kind == 'constant':
            return self.base
        if self.kind == 'table':
            i = n - self.start
            if i < 0 or i >= len(self.values):
                raise IndexOutOfRange(
                    f"lambda_{n} requested but the table covers "
                    f"[{self.start}, {self.start + len(self.values) - 1}]")
            return self.values[i]
        if self.kind == 'periodic':
            return self.values[n % len(self.values)]
        return self.base + self.amplitude * math.cos(n)

    def window(self, first: int, last: int) -> List[float]:
        """Rates for n = first .. last inclusive."""
        return [self(n) for n in range(first, last + 1)]

    def describe(self) -> Dict[str, object]:
        info: Dict[str, object] = {'kind': self.kind}
        if self.kind in ('constant', 'cosine'):
            info['base'] = self.base
        if self.kind == 'cosine':
            info['amplitude'] = self.amplitude
        if self.kind in ('table', 'periodic'):
            info['values'] = list(self.values)
        if self.kind == 'table':
            info['start'] = self.start
        return info


@dataclass(frozen=True)
class HenonParams:
    """H(x, y) = (A_n + B*y - x^2, x) with A_n = A + epsilon*cos(n)."""
    A: float
    B: float = -1.0
    epsilon: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.A, self.B, self.epsilon)):
            raise ParameterError("Henon parameters must be finite")
        if self.B == 0.0:
            raise ParameterError("Henon map is not invertible for B = 0")
        if self.epsilon < 0.0:
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon}")
        if abs(self.B) != 1.0:
            warnings.warn(f"Henon map with |B| = {abs(self.B)} is not area preserving",
                          RuntimeWarning, stacklevel=3)
            logger.warning(f"Henon map with B = {self.B} is dissipative; area preservation does not hold")

    def a_at(self, n: int) -> float:
        if self.epsilon == 0.0:
            return self.A
        return self.A + self.epsilon * math.cos(n)


@dataclass(frozen=True)
class RotationParams:
    angle: float = 0.7

    def __post_init__(self):
        if not math.isfinite(self.angle):
            raise ParameterError(f"angle must be finite, got {self.angle}")


class MapKernel(ABC):
    """Base class for all map kernels."""

    name: str = ''
    autonomous: bool = True

    @abstractmethod
    def forward_xy(self, x, y, n: int = 0):
        """Map (x, y) at time n to time n+1."""
        pass

    @abstractmethod
    def inverse_xy(self, x, y, n: int = 0):
        """Map (x, y) at time n+1 back to time n."""
        pass

    @property
    @abstractmethod
    def parameters(self) -> Dict[str, object]:
        """Named parameter values, for metadata and display."""
        pass

    def forward(self, point: MapPoint, n: int = 0) -> MapPoint:
        x, y = self.forward_xy(point.x, point.y, n)
        return MapPoint(float(x), float(y))

    def inverse(self, point: MapPoint, n: int = 0) -> MapPoint:
        x, y = self.inverse_xy(point.x, point.y, n)
        return MapPoint(float(x), float(y))

    def describe(self) -> str:
        params = ', '.join(f"{k}={v}" for k, v in self.parameters.items())
        return f"{self.name}({params})"


class LinearSaddleKernel(MapKernel):
    """x' = lam*x, y' = y/lam."""

    name = 'linear-saddle'

    def __init__(self, params: LinearSaddleParams):
        self.params = params

    def forward_xy(self, x, y, n=0):
        lam = self.params.lam
        return lam * x, y / lam

    def inverse_xy(self, x, y, n=0):
        lam = self.params.lam
        return x / lam, lam * y

    @property
    def parameters(self):
        return {'lambda': self.params.lam}


class RotatedSaddleKernel(MapKernel):
    """
    q' = A q with A = (1/(2 lam)) [[1+lam^2, 1-lam^2], [1-lam^2, 1+lam^2]].

    Direct multiplication pins the eigen-convention: A(1,1) = (1/lam)(1,1)
    and A(1,-1) = lam(1,-1), so y = x is the stable direction and y = -x
    the unstable one. det A = 1.
    """

    name = 'rotated-saddle'

    def __init__(self, params: RotatedSaddleParams):
        self.params = params
        lam = params.lam
        self._diag = (1.0 + lam * lam) / (2.0 * lam)
        self._off = (1.0 - lam * lam) / (2.0 * lam)

    def forward_xy(self, x, y, n=0):
        a, b = self._diag, self._off
        return a * x + b * y, b * x + a * y

    def inverse_xy(self, x, y, n=0):
        # A^-1 = (1/(2 lam)) [[1+lam^2, lam^2-1], [lam^2-1, 1+lam^2]]
        a, b = self._diag, self._off
        return a * x - b * y, a * y - b * x

    @property
    def parameters(self):
        return {'lambda': self.params.lam}


def _checked_multiplier(u) -> None:
    if np.any(u <= 0.0):
        raise NonPositiveMultiplier(
            "U(xi*eta) <= 0: point lies outside the normal-form neighborhood")


class NormalFormKernel(MapKernel):
    """xi' = U(s) xi, eta' = eta/U(s) with s = xi*eta conserved."""

    name = 'normal-form'

    def __init__(self, params: NormalFormParams):
        self.params = params

    def forward_xy(self, x, y, n=0):
        u = self.params.multiplier(x * y)
        _checked_multiplier(u)
        return u * x, y / u

    def inverse_xy(self, x, y, n=0):
        u = self.params.multiplier(x * y)
        _checked_multiplier(u)
        return x / u, u * y

    @property
    def parameters(self):
        return {'lambda': self.params.lam, 'u2': self.params.u2}


class NonautonomousLinearKernel(MapKernel):
    """x' = lam_n x, y' = y/lam_n."""

    name = 'nonautonomous-linear'
    autonomous = False

    def __init__(self, sequence: LambdaSequence):
        self.sequence = sequence

    def forward_xy(self, x, y, n=0):
        lam = self.sequence(n)
        return lam * x, y / lam

    def inverse_xy(self, x, y, n=0):
        lam = self.sequence(n)
        return x / lam, lam * y

    @property
    def parameters(self):
        return {'sequence': self.sequence.describe()}


class NonautonomousNormalFormKernel(MapKernel):
    """xi' = U_n(s) xi, eta' = eta/U_n(s) with U_n(s) = lam_n + u2*s."""

    name = 'nonautonomous-normal-form'
    autonomous = False

    def __init__(self, sequence: LambdaSequence, u2: float = 0.0):
        if not math.isfinite(u2):
            raise ParameterError(f"u2 must be finite, got {u2}")
        self.sequence = sequence
        self.u2 = u2

    def multiplier(self, s, n: int):
        return self.sequence(n) + self.u2 * s

    def forward_xy(self, x, y, n=0):
        u = self.multiplier(x * y, n)
        _checked_multiplier(u)
        return u * x, y / u

    def inverse_xy(self, x, y, n=0):
        u = self.multiplier(x * y, n)
        _checked_multiplier(u)
        return x / u, u * y

    @property
    def parameters(self):
        return {'sequence': self.sequence.describe(), 'u2': self.u2}


class HenonKernel(MapKernel):
    """H(x, y) = (A_n + B y - x^2, x); autonomous when epsilon = 0."""

    def __init__(self, params: HenonParams):
        self.params = params
        self.autonomous = params.epsilon == 0.0
        self.name = 'henon' if self.autonomous else 'nonautonomous-henon'

    def forward_xy(self, x, y, n=0):
        a_n = self.params.a_at(n)
        return a_n + self.params.B * y - x * x, x

    def inverse_xy(self, x, y, n=0):
        a_n = self.params.a_at(n)
        return y, (x - a_n + y * y) / self.params.B

    @property
    def parameters(self):
        return {'A': self.params.A, 'B': self.params.B, 'epsilon': self.params.epsilon}


class RotationKernel(MapKernel):
    """Rigid rotation by a fixed angle; area preserving with no hyperbolicity."""

    name = 'rotation'

    def __init__(self, params: RotationParams):
        self.params = params
        self._c = math.cos(params.angle)
        self._s = math.sin(params.angle)

    def forward_xy(self, x, y, n=0):
        return self._c * x - self._s * y, self._s * x + self._c * y

    def inverse_xy(self, x, y, n=0):
        return self._c * x + self._s * y, self._c * y - self._s * x

    @property
    def parameters(self):
        return {'angle': self.params.angle}


def linear_saddle_step(q: MapPoint, params: LinearSaddleParams, inverse: bool = False) -> MapPoint:
    kernel = LinearSaddleKernel(params)
    return kernel.inverse(q) if inverse else kernel.forward(q)


def rotated_saddle_step(q: MapPoint, params: RotatedSaddleParams, inverse: bool = False) -> MapPoint:
    kernel = RotatedSaddleKernel(params)
    return kernel.inverse(q) if inverse else kernel.forward(q)


def normal_form_step(q: MapPoint, params: NormalFormParams, inverse: bool = False) -> MapPoint:
    kernel = NormalFormKernel(params)
    return kernel.inverse(q) if inverse else kernel.forward(q)


def nonautonomous_linear_step(q: MapPoint, n: int, seq: LambdaSequence, inverse: bool = False) -> MapPoint:
    kernel = NonautonomousLinearKernel(seq)
    return kernel.inverse(q, n) if inverse else kernel.forward(q, n)


def henon_step(q: MapPoint, n: int, params: HenonParams, inverse: bool = False) -> MapPoint:
    kernel = HenonKernel(params)
    return kernel.inverse(q, n) if inverse else kernel.forward(q, n)


def henon_chaos_threshold(B: float) -> float:
    """A_2 = (5 + 2 sqrt 5)(1 + |B|)^2 / 4; above it a chaotic saddle exists."""
    return (5.0 + 2.0 * math.sqrt(5.0)) * (1.0 + abs(B)) ** 2 / 4.0


def henon_fixed_points(A: float, B: float) -> Tuple[MapPoint, ...]:
    """Fixed points of the autonomous Henon map, (x*, x*) with x^2 + (1-B)x - A = 0."""
    disc = (B - 1.0) ** 2 + 4.0 * A
    if disc < 0.0:
        return ()
    root = math.sqrt(disc)
    xs = sorted({((B - 1.0) + root) / 2.0, ((B - 1.0) - root) / 2.0})
    return tuple(MapPoint(x, x) for x in xs)


def jacobian_determinant(kernel: MapKernel, q: MapPoint, n: int = 0, h: float = 1e-6) -> float:
    """Determinant of the forward Jacobian by central differences."""
    xp = kernel.forward_xy(q.x + h, q.y, n)
    xm = kernel.forward_xy(q.x - h, q.y, n)
    yp = kernel.forward_xy(q.x, q.y + h, n)
    ym = kernel.forward_xy(q.x, q.y - h, n)
    j11 = (xp[0] - xm[0]) / (2.0 * h)
    j21 = (xp[1] - xm[1]) / (2.0 * h)
    j12 = (yp[0] - ym[0]) / (2.0 * h)
    j22 = (yp[1] - ym[1]) / (2.0 * h)
    return float(j11 * j22 - j12 * j21)


@dataclass(frozen=True)
class KernelSpec:
    """Catalog entry: how to build a kernel from named parameters."""
    name: str
    description: str
    parameters: Tuple[str, ...]
    builder: Callable[[Dict[str, object]], MapKernel] = field(repr=False)
    analytic: bool = False


def _sequence_from(params: Dict[str, object]) -> LambdaSequence:
    lambdas = params.get('lambdas')
    if lambdas:
        return LambdaSequence.periodic([float(v) for v in lambdas])
    amplitude = float(params.get('amplitude', 0.0))
    if amplitude:
        return LambdaSequence.cosine(float(params['lambda']), amplitude)
    return LambdaSequence.constant(float(params['lambda']))


class MapKernelFactory:
    """Factory to create map kernels by name."""

    _registry: Dict[str, KernelSpec] = {}

    @classmethod
    def register(cls, spec: KernelSpec) -> None:
        cls._registry[spec.name] = spec

    @classmethod
    def available_kernels(cls) -> List[str]:
        return sorted(cls._registry)

    @classmethod
    def get_spec(cls, name: str) -> KernelSpec:
        key = (name or '').lower()
        if key not in cls._registry:
            raise ParameterError(
                f"Unknown map '{name}'. Available kernels: {', '.join(cls.available_kernels())}")
        return cls._registry[key]

    @classmethod
    def create_kernel(cls, name: str, params: Optional[Dict[str, object]] = None) -> MapKernel:
        """
        Create the kernel registered under ``name``.

        Args:
            name: Kernel name (see available_kernels)
            params: Parameter values; missing ones fall back to catalog defaults

        Returns:
            Configured kernel instance
        """
        from .config.map_catalog import kernel_defaults

        spec = cls.get_spec(name)
        merged = dict(kernel_defaults(spec.name))
        merged.update({k: v for k, v in (params or {}).items() if v is not None})
        kernel = spec.builder(merged)
        logger.debug(f"Created kernel {kernel.describe()}")
        return kernel


MapKernelFactory.register(KernelSpec(
    'linear-saddle', 'Linear saddle x\' = lam x, y\' = y/lam', ('lambda',),
    lambda p: LinearSaddleKernel(LinearSaddleParams(float(p['lambda']))), analytic=True))
MapKernelFactory.register(KernelSpec(
    'rotated-saddle', 'Linear saddle with manifolds on y = x and y = -x', ('lambda',),
    lambda p: RotatedSaddleKernel(RotatedSaddleParams(float(p['lambda']))), analytic=True))
MapKernelFactory.register(KernelSpec(
    'normal-form', 'Normal form xi\' = U(xi eta) xi, eta\' = eta/U(xi eta)', ('lambda', 'u2'),
    lambda p: NormalFormKernel(NormalFormParams(float(p['lambda']), float(p['u2']))), analytic=True))
MapKernelFactory.register(KernelSpec(
    'nonautonomous-linear', 'Linear saddle with time-dependent rate lam_n',
    ('lambda', 'amplitude', 'lambdas'),
    lambda p: NonautonomousLinearKernel(_sequence_from(p)), analytic=True))
MapKernelFactory.register(KernelSpec(
    'nonautonomous-normal-form', 'Normal form with time-dependent U_n(s) = lam_n + u2 s',
    ('lambda', 'amplitude', 'lambdas', 'u2'),
    lambda p: NonautonomousNormalFormKernel(_sequence_from(p), float(p['u2'])), analytic=True))
MapKernelFactory.register(KernelSpec(
    'henon', 'Henon map (A + B y - x^2, x)', ('A', 'B'),
    lambda p: HenonKernel(HenonParams(float(p['A']), float(p['B']), 0.0))))
MapKernelFactory.register(KernelSpec(
    'nonautonomous-henon', 'Henon map with A_n = A + epsilon cos(n)', ('A', 'B', 'epsilon'),
    lambda p: HenonKernel(HenonParams(float(p['A']), float(p['B']), float(p['epsilon'])))))
MapKernelFactory.register(KernelSpec(
    'rotation', 'Rigid rotation (no hyperbolic set)', ('angle',),
    lambda p: RotationKernel(RotationParams(float(p['angle'])))))
