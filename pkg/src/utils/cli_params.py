"""
CLI Parameter Groups

Organized parameter groups for click options, and the RunConfig container
that merges them with an optional configuration file.
"""

import json
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import click
import toml
import yaml
from click.core import ParameterSource

from ..config.map_catalog import MapCatalog
from ..descriptor import DescriptorParams
from ..errors import ParameterError
from ..field.grid_engine import GridSpec
from ..map_kernels import MapKernel, MapKernelFactory, MapPoint
from ..singularity import TransectSpec
from .validators import parse_lambdas, validate_domain, validate_output_path, validate_workers

# config-file key -> click parameter name
CONFIG_KEYS = {
    'map': 'map_name',
    'lambda': 'lam',
    'u2': 'u2',
    'A': 'henon_a',
    'B': 'henon_b',
    'epsilon': 'epsilon',
    'amplitude': 'amplitude',
    'lambdas': 'lambdas',
    'angle': 'angle',
    'p': 'p',
    'N': 'half_orbit',
    'n0': 'n0',
    'escape-radius': 'escape_radius',
    'domain': 'domain',
    'nx': 'nx',
    'ny': 'ny',
    'anchor': 'anchor',
    'direction': 'direction',
    'half-length': 'half_length',
    'samples': 'samples',
    'threshold-factor': 'threshold_factor',
    'out': 'out',
    'workers': 'workers',
    'seed': 'seed',
}

# click parameter name -> kernel parameter name
KERNEL_PARAMS = {
    'lam': 'lambda',
    'u2': 'u2',
    'henon_a': 'A',
    'henon_b': 'B',
    'epsilon': 'epsilon',
    'amplitude': 'amplitude',
    'lambdas': 'lambdas',
    'angle': 'angle',
}


def kernel_options(func: Callable) -> Callable:
    """Map selection and kernel parameters"""
    func = click.option('--map', 'map_name',
                        help='Map kernel name (see the kernels subcommand)')(func)
    func = click.option('--lambda', 'lam', type=float,
                        help='Expansion rate lambda > 1 (saddles and normal forms)')(func)
    func = click.option('--u2', type=float,
                        help='Quadratic coefficient of U(s) = lambda + u2*s')(func)
    func = click.option('--A', 'henon_a', type=float, help='Henon parameter A')(func)
    func = click.option('--B', 'henon_b', type=float, help='Henon parameter B')(func)
    func = click.option('--epsilon', type=float,
                        help='Amplitude of A_n = A + epsilon*cos(n) (nonautonomous Henon)')(func)
    func = click.option('--amplitude', type=float,
                        help='Amplitude of lambda_n = lambda + amplitude*cos(n)')(func)
    func = click.option('--lambdas',
                        help='Periodic rate sequence, comma separated (e.g. 1.1,1.3)')(func)
    func = click.option('--angle', type=float, help='Rotation angle in radians')(func)
    return func


def descriptor_options(func: Callable) -> Callable:
    """Descriptor exponent, orbit window and escape policy"""
    func = click.option('--p', 'p', type=float, help='Norm exponent p > 0')(func)
    func = click.option('--N', 'half_orbit', type=int, help='Half-orbit length N >= 1')(func)
    func = click.option('--n0', type=int, help='Base time of the orbit window (default: 0)')(func)
    func = click.option('--escape-radius', type=float,
                        help='Stop accumulating once an iterate leaves this radius')(func)
    return func


def grid_options(func: Callable) -> Callable:
    """Field grid options"""
    func = click.option('--domain', type=float, nargs=4,
                        help='Domain: XMIN XMAX YMIN YMAX')(func)
    func = click.option('--nx', type=int, help='Grid nodes along x (default: 201)')(func)
    func = click.option('--ny', type=int, help='Grid nodes along y (default: 201)')(func)
    return func


def transect_options(func: Callable) -> Callable:
    """Transect geometry and detection options"""
    func = click.option('--anchor', type=float, nargs=2,
                        help='Transect centre: X Y (default: 0 0.25)')(func)
    func = click.option('--direction', type=float, nargs=2,
                        help='Transect direction: DX DY (default: 1 0)')(func)
    func = click.option('--half-length', type=float,
                        help='Half length of the transect (default: 0.5, 0.1 for normal forms)')(func)
    func = click.option('--samples', type=int, help='Odd number of samples (default: 401, 801 for normal forms)')(func)
    func = click.option('--threshold-factor', type=float,
                        help='Candidate threshold as a multiple of the median |derivative| (default: 10)')(func)
    return func


def output_options(func: Callable) -> Callable:
    """Output file options"""
    func = click.option('--out', multiple=True,
                        help='Output file; format from the extension (.csv, .dldgrid, .pgm). Repeatable.')(func)
    return func


def runtime_options(func: Callable) -> Callable:
    """Execution options"""
    func = click.option('--workers', type=int, help='Worker processes (default: 1)')(func)
    func = click.option('--config', 'config_file', type=click.Path(exists=True, dir_okay=False),
                        help='JSON, YAML or TOML file with run options; flags override it')(func)
    func = click.option('--seed', help='Not supported: every computation is deterministic')(func)
    func = click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')(func)
    return func


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a run configuration file, keyed by flag names."""
    text = Path(path).read_text(encoding='utf-8')
    suffix = Path(path).suffix.lower()
    try:
        if suffix in ('.yaml', '.yml'):
            data = yaml.safe_load(text)
        elif suffix == '.toml':
            data = toml.loads(text)
        else:
            data = json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError, toml.TomlDecodeError) as e:
        raise ParameterError(f"cannot parse config file {path}: {e}")
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ParameterError(f"config file {path} must contain a mapping of options")

    options: Dict[str, Any] = {}
    for key, value in data.items():
        name = CONFIG_KEYS.get(key) or CONFIG_KEYS.get(key.replace('_', '-'))
        if name is None:
            raise ParameterError(f"unknown option '{key}' in config file {path}")
        if name == 'map_name' and not isinstance(value, str):
            raise ParameterError(f"'{key}' in config file {path} must be a kernel name, got {value!r}")
        options[name] = value
    return options


def merge_options(ctx: click.Context, cli_kwargs: Dict[str, Any]) -> Dict[str, Any]:
    """Config-file values, overridden by flags given on the command line."""
    merged = {k: v for k, v in cli_kwargs.items() if v not in (None, ())}
    config_file = cli_kwargs.get('config_file')
    if not config_file:
        return merged
    from_file = load_config_file(config_file)
    for name, value in from_file.items():
        source = ctx.get_parameter_source(name) if name in cli_kwargs else None
        if source != ParameterSource.COMMANDLINE:
            merged[name] = value
    return merged


class RunConfig:
    """Container for one CLI run: kernel, descriptor, geometry and outputs"""

    def __init__(self, **kwargs):
        if kwargs.get('seed') is not None:
            raise ParameterError("--seed is not supported: every computation is deterministic")

        self.map_name = kwargs.get('map_name')
        if not self.map_name:
            raise ParameterError(
                f"no map selected. Available kernels: {', '.join(MapKernelFactory.available_kernels())}")
        spec = MapKernelFactory.get_spec(self.map_name)
        self.map_name = spec.name
        catalog = MapCatalog(self.map_name)

        # Kernel options
        self.kernel_params: Dict[str, Any] = {}
        for option, key in KERNEL_PARAMS.items():
            if kwargs.get(option) is not None:
                self.kernel_params[key] = kwargs[option]
        if 'lambdas' in self.kernel_params:
            self.kernel_params['lambdas'] = parse_lambdas(self.kernel_params['lambdas'])

        # Descriptor options
        defaults = catalog.get_descriptor_defaults()
        self.p = float(kwargs.get('p', defaults['p']))
        self.N = kwargs.get('half_orbit', defaults['N'])
        self.n0 = kwargs.get('n0', 0)
        self.escape_radius = kwargs.get('escape_radius', catalog.get_escape_radius())

        # Grid options
        self.domain = validate_domain(kwargs.get('domain') or catalog.get_domain())
        self.nx = kwargs.get('nx', 201)
        self.ny = kwargs.get('ny', 201)

        # Transect options
        transect = catalog.get_transect_defaults()
        self.anchor = tuple(kwargs.get('anchor') or transect['anchor'])
        self.direction = tuple(kwargs.get('direction') or transect['direction'])
        self.half_length = kwargs.get('half_length', transect['half_length'])
        self.samples = kwargs.get('samples', transect['samples'])
        self.threshold_factor = kwargs.get('threshold_factor', 10.0)

        out = kwargs.get('out') or ()
        self.outputs: List[str] = [out] if isinstance(out, str) else list(out)
        self.workers = validate_workers(kwargs.get('workers', 1))
        self.verbose = kwargs.get('verbose', False)

    def kernel(self) -> MapKernel:
        return MapKernelFactory.create_kernel(self.map_name, self.kernel_params)

    def descriptor_params(self) -> DescriptorParams:
        return DescriptorParams(p=self.p, N=self.N, n0=self.n0, escape_radius=self.escape_radius)

    def grid_spec(self) -> GridSpec:
        return GridSpec(*self.domain, nx=self.nx, ny=self.ny)

    def transect_spec(self) -> TransectSpec:
        return TransectSpec(MapPoint(*self.anchor), self.direction, self.half_length, self.samples)

    def field_outputs(self) -> List[str]:
        return [validate_output_path(p, ('csv', 'dldgrid', 'pgm')) for p in self.outputs]

    def transect_output(self) -> Optional[str]:
        if len(self.outputs) > 1:
            raise ParameterError("a transect run writes a single CSV file")
        return validate_output_path(self.outputs[0], ('csv',)) if self.outputs else None

    def as_metadata(self, kernel: MapKernel, geometry: str) -> Dict[str, Any]:
        """Header lines written with every output file."""
        info: Dict[str, Any] = {
            'map': self.map_name,
            'kernel_parameters': kernel.parameters,
            'p': self.p,
            'N': self.N,
            'n0': self.n0,
            'escape_radius': self.escape_radius,
        }
        if geometry == 'grid':
            info.update({'domain': list(self.domain), 'nx': self.nx, 'ny': self.ny})
        else:
            info.update({'anchor': list(self.anchor), 'direction': list(self.direction),
                         'half_length': self.half_length, 'samples': self.samples,
                         'threshold_factor': self.threshold_factor})
        info['workers'] = self.workers
        return info
