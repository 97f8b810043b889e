"""
Map Catalog

Default parameters, domains and escape policy for the built-in kernels.
"""

from typing import Dict, Optional, Tuple


class MapCatalog:
    """Manages per-kernel defaults"""

    def __init__(self, map_name: str):
        self.map_name = map_name.lower()

        self._parameters = {
            'linear-saddle': {'lambda': 1.1},
            'rotated-saddle': {'lambda': 1.1},
            'normal-form': {'lambda': 1.1, 'u2': 0.5},
            'nonautonomous-linear': {'lambda': 1.2, 'amplitude': 0.1},
            'nonautonomous-normal-form': {'lambda': 1.2, 'amplitude': 0.1, 'u2': 0.5},
            'henon': {'A': 9.5, 'B': -1.0},
            # epsilon is not given for the nonautonomous saddle; 0.2 keeps it "small"
            'nonautonomous-henon': {'A': 9.5, 'B': -1.0, 'epsilon': 0.2},
            'rotation': {'angle': 0.7},
        }

        self._domains = {
            'henon': (-6.0, 6.0, -6.0, 6.0),
            'nonautonomous-henon': (-6.0, 6.0, -6.0, 6.0),
        }

        self._descriptor_defaults = {
            'henon': {'p': 0.05, 'N': 5},
            'nonautonomous-henon': {'p': 0.05, 'N': 5},
            # p < 1 sums are not rotation invariant
            'rotation': {'p': 2.0, 'N': 20},
        }

        # Fixed points sit at |x| ~ 4.24, so 50 contains the saddle region
        self._escape_radii = {
            'henon': 50.0,
            'nonautonomous-henon': 50.0,
        }

        # shorter, finer lines inside the normal-form neighborhood
        self._transects = {
            'normal-form': {'half_length': 0.1, 'samples': 801},
            'nonautonomous-normal-form': {'half_length': 0.1, 'samples': 801},
        }

    def get_parameters(self) -> Dict[str, float]:
        """Default parameter values for this kernel."""
        return dict(self._parameters.get(self.map_name, {}))

    def get_domain(self) -> Tuple[float, float, float, float]:
        """Default (xmin, xmax, ymin, ymax)."""
        return self._domains.get(self.map_name, (-0.5, 0.5, -0.5, 0.5))

    def get_descriptor_defaults(self) -> Dict[str, float]:
        """Default p and N (p = 0.5, N = 20 unless the kernel overrides them)."""
        return dict(self._descriptor_defaults.get(self.map_name, {'p': 0.5, 'N': 20}))

    def get_escape_radius(self) -> Optional[float]:
        """Default escape radius, None when orbits are unbounded-safe."""
        return self._escape_radii.get(self.map_name)

    def get_transect_defaults(self) -> Dict[str, object]:
        """Default transect: y = 0.25 across x = 0, half length 0.5 with 401 samples."""
        defaults = {'anchor': (0.0, 0.25), 'direction': (1.0, 0.0), 'half_length': 0.5, 'samples': 401}
        defaults.update(self._transects.get(self.map_name, {}))
        return defaults


def kernel_defaults(map_name: str) -> Dict[str, float]:
    return MapCatalog(map_name).get_parameters()
