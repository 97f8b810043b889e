"""
Output formatters for descriptor fields and transects
"""

import struct
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .descriptor import DescriptorParams
from .errors import FormatError
from .field.grid_engine import FieldResult, GridSpec
from .utils.logger import setup_logger

logger = setup_logger(__name__)

DLDGRID_MAGIC = b'DLD1'
# magic, nx, ny, xmin, xmax, ymin, ymax, p, N
DLDGRID_HEADER = struct.Struct('<4sIIdddddI')

PGM_MAXVAL = 65535


def _field_metadata(field: FieldResult) -> Dict[str, Any]:
    grid = field.grid
    return {
        'kernel': field.kernel_name,
        'parameters': field.kernel_parameters,
        'p': field.params.p,
        'N': field.params.N,
        'n0': field.params.n0,
        'escape_radius': field.params.escape_radius,
        'domain': [grid.xmin, grid.xmax, grid.ymin, grid.ymax],
        'nx': grid.nx,
        'ny': grid.ny,
    }


def _comment_lines(metadata: Dict[str, Any]) -> List[str]:
    return [f"# {key}: {value}" for key, value in metadata.items()]


class BaseFieldWriter(ABC):
    """Base class for field writers."""

    @abstractmethod
    def write(self, field: FieldResult, path: str, metadata: Optional[Dict[str, Any]] = None) -> None:
        """Write the field to ``path``."""
        pass

    @abstractmethod
    def get_format_name(self) -> str:
        """Get the format name."""
        pass


class CsvFieldWriter(BaseFieldWriter):
    """One row per y-line (ymin first), x increasing along the row."""

    def get_format_name(self) -> str:
        return "csv"

    def write(self, field: FieldResult, path: str, metadata: Optional[Dict[str, Any]] = None) -> None:
        header = dict(_field_metadata(field))
        header.update(metadata or {})
        header['escaped_nodes'] = int(field.escaped.sum())
        with open(path, 'w', encoding='utf-8') as fh:
            fh.write("\n".join(_comment_lines(header)) + "\n")
            np.savetxt(fh, field.values, delimiter=',', fmt='%.17g')


class DldgridWriter(BaseFieldWriter):
    """
    Binary layout, little-endian throughout:
    "DLD1", u32 nx, u32 ny, f64 xmin, xmax, ymin, ymax, f64 p, u32 N,
    nx*ny f64 values (y-major, x fastest), nx*ny u8 escape flags.
    """

    def get_format_name(self) -> str:
        return "dldgrid"

    def write(self, field: FieldResult, path: str, metadata: Optional[Dict[str, Any]] = None) -> None:
        grid = field.grid
        header = DLDGRID_HEADER.pack(DLDGRID_MAGIC, grid.nx, grid.ny, grid.xmin, grid.xmax,
                                     grid.ymin, grid.ymax, field.params.p, field.params.N)
        with open(path, 'wb') as fh:
            fh.write(header)
            fh.write(np.ascontiguousarray(field.values, dtype='<f8').tobytes())
            fh.write(np.ascontiguousarray(field.escaped, dtype=np.uint8).tobytes())


class PgmWriter(BaseFieldWriter):
    """
    16-bit binary PGM (P5). Gray levels are min-max normalized over the
    non-escaped nodes; escaped nodes take the maximum gray value. The top
    image row is y = ymax.
    """

    def get_format_name(self) -> str:
        return "pgm"

    @staticmethod
    def gray_levels(field: FieldResult) -> np.ndarray:
        kept = field.non_escaped_values()
        gray = np.full(field.grid.shape, PGM_MAXVAL, dtype=np.uint16)
        if kept.size == 0:
            return gray
        lo = float(kept.min())
        hi = float(kept.max())
        span = hi - lo
        if span > 0.0:
            scaled = np.rint((field.values - lo) / span * PGM_MAXVAL)
        else:
            scaled = np.zeros(field.grid.shape)
        scaled = np.clip(scaled, 0, PGM_MAXVAL).astype(np.uint16)
        return np.where(field.escaped, gray, scaled)

    def write(self, field: FieldResult, path: str, metadata: Optional[Dict[str, Any]] = None) -> None:
        image = self.gray_levels(field)[::-1]
        with open(path, 'wb') as fh:
            fh.write(f"P5\n{field.grid.nx} {field.grid.ny}\n{PGM_MAXVAL}\n".encode('ascii'))
            fh.write(image.astype('>u2').tobytes())


def read_dldgrid(path: str) -> FieldResult:
    """
    Read a dldgrid file back into a FieldResult.

    The format carries the grid, p and N only; n0, escape radius and the
    kernel identity are not stored.
    """
    data = Path(path).read_bytes()
    if len(data) < DLDGRID_HEADER.size:
        raise FormatError(f"{path}: truncated dldgrid header")
    magic, nx, ny, xmin, xmax, ymin, ymax, p, N = DLDGRID_HEADER.unpack_from(data, 0)
    if magic != DLDGRID_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {DLDGRID_MAGIC!r}")
    count = nx * ny
    expected = DLDGRID_HEADER.size + 8 * count + count
    if len(data) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for a {nx}x{ny} grid, found {len(data)}")

    offset = DLDGRID_HEADER.size
    values = np.frombuffer(data, dtype='<f8', count=count, offset=offset).astype(np.float64)
    flags = np.frombuffer(data, dtype=np.uint8, count=count, offset=offset + 8 * count)
    return FieldResult(
        grid=GridSpec(xmin, xmax, ymin, ymax, nx, ny),
        values=values.reshape(ny, nx),
        escaped=flags.reshape(ny, nx).astype(bool),
        params=DescriptorParams(p=p, N=N),
        kernel_name='',
    )


def read_pgm(path: str) -> Tuple[int, int, int, np.ndarray]:
    """Parse a binary P5 image: (width, height, maxval, pixels as stored, top row first)."""
    data = Path(path).read_bytes()
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b'#':
            while pos < len(data) and data[pos:pos + 1] != b'\n':
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated PGM header")
        tokens.append(data[start:pos])
    if tokens[0] != b'P5':
        raise FormatError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    width, height, maxval = (int(t) for t in tokens[1:])
    pos += 1  # single whitespace after maxval
    dtype = '>u2' if maxval > 255 else np.uint8
    itemsize = 2 if maxval > 255 else 1
    if len(data) - pos != width * height * itemsize:
        raise FormatError(f"{path}: pixel data does not match {width}x{height}")
    pixels = np.frombuffer(data, dtype=dtype, offset=pos).reshape(height, width)
    return width, height, maxval, pixels


def write_transect_csv(report, path: str, metadata: Optional[Dict[str, Any]] = None) -> None:
    """Columns position, md, derivative; detected crossings follow as `#` footer lines."""
    with open(path, 'w', encoding='utf-8') as fh:
        if metadata:
            fh.write("\n".join(_comment_lines(metadata)) + "\n")
        fh.write("position,md,derivative\n")
        table = np.column_stack((report.positions, report.md_values, report.derivative))
        np.savetxt(fh, table, delimiter=',', fmt='%.17g')
        fh.write(f"# crossings: {len(report.crossings)}\n")
        for crossing in report.crossings:
            fh.write(f"# crossing: position={crossing.position:.17g}, x={crossing.point.x:.17g}, "
                     f"y={crossing.point.y:.17g}, derivative={crossing.derivative_magnitude:.17g}, "
                     f"exponent={crossing.refinement_exponent:.6f}\n")


class OutputFormatterFactory:
    """Factory to create appropriate field writer."""

    _writers = {
        'csv': CsvFieldWriter,
        'dldgrid': DldgridWriter,
        'pgm': PgmWriter,
    }

    @staticmethod
    def create_writer(format_type: str) -> BaseFieldWriter:
        """
        Create the writer for the output type.

        Args:
            format_type: Type of output format (csv, dldgrid, pgm)

        Returns:
            Field writer instance
        """
        key = format_type.lower().lstrip('.')
        if key not in OutputFormatterFactory._writers:
            raise FormatError(
                f"Unsupported output format: {format_type} "
                f"(supported: {', '.join(OutputFormatterFactory.get_supported_formats())})")
        return OutputFormatterFactory._writers[key]()

    @staticmethod
    def format_for_path(path: str) -> str:
        """Output format implied by the file extension."""
        suffix = Path(path).suffix.lower().lstrip('.')
        if suffix not in OutputFormatterFactory._writers:
            raise FormatError(
                f"Cannot infer output format from '{path}' "
                f"(use one of: {', '.join('.' + f for f in OutputFormatterFactory.get_supported_formats())})")
        return suffix

    @staticmethod
    def get_supported_formats() -> List[str]:
        """Get list of supported output formats."""
        return list(OutputFormatterFactory._writers)

    @classmethod
    def write_field(cls, field: FieldResult, path: str, metadata: Optional[Dict[str, Any]] = None) -> str:
        writer = cls.create_writer(cls.format_for_path(path))
        writer.write(field, path, metadata)
        logger.debug(f"Wrote {writer.get_format_name()} field to {path}")
        return path
