"""Periodic-box grids, fields, and Fourier-multiplier operators.

The spatial domain is the torus [0, L)^dim sampled on a uniform grid with a
power-of-two number of points per axis.  The fractional Laplacian of order
s is diagonal in the discrete Fourier basis with symbol |xi|^(2s), where the
wavenumbers are xi = 2*pi*k/L for integer k in the usual FFT layout.  All
operators here act on real fields and return real fields; quadrature is the
trapezoidal rule on the periodic grid (cell volume times the sample sum),
which is spectrally accurate for smooth periodic integrands.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import fft as sfft

__all__ = [
    "Grid",
    "Field",
    "GridMismatch",
    "FieldFormatError",
    "make_grid",
    "apply_frac_laplacian",
    "hs_quadratic_form",
    "integrate",
    "lp_norm",
    "write_field",
    "read_field",
]


class GridMismatch(ValueError):
    """Operands live on different grids."""


class FieldFormatError(ValueError):
    """A field file violates the on-disk format."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, L)^dim.

    Instances are immutable; derived arrays (coordinates, multiplier
    symbols) are computed lazily and cached.
    """

    dim: int
    n_per_axis: int
    box_length: float
    cell_volume: float
    wavenumbers: tuple = dc_field(compare=False, repr=False, default=())

    def __post_init__(self):
        object.__setattr__(self, "_cache", {})

    @property
    def shape(self) -> tuple:
        return (self.n_per_axis,) * self.dim

    @property
    def npoints(self) -> int:
        return self.n_per_axis**self.dim

    @property
    def spacing(self) -> float:
        return self.box_length / self.n_per_axis

    def axis_coordinates(self) -> np.ndarray:
        """Sample positions along one axis (identical for all axes)."""
        return np.arange(self.n_per_axis) * self.spacing

    def coordinates(self) -> tuple:
        """dim arrays of shape ``grid.shape`` with point coordinates."""
        cache = self._cache
        if "coords" not in cache:
            axes = [self.axis_coordinates()] * self.dim
            cache["coords"] = tuple(np.meshgrid(*axes, indexing="ij"))
        return cache["coords"]

    def sq_wavenumber(self) -> np.ndarray:
        """|xi|^2 on the full FFT layout."""
        cache = self._cache
        if "k2" not in cache:
            k2 = np.zeros(self.shape)
            for axis, w in enumerate(self.wavenumbers):
                shape = [1] * self.dim
                shape[axis] = self.n_per_axis
                k2 = k2 + (w**2).reshape(shape)
            cache["k2"] = k2
        return cache["k2"]

    def symbol(self, s: float) -> np.ndarray:
        """Multiplier |xi|^(2s); the zero mode maps to 0."""
        cache = self._cache
        key = ("sym", float(s))
        if key not in cache:
            cache[key] = self.sq_wavenumber() ** float(s)
        return cache[key]


@dataclass(frozen=True)
class Field:
    """Real samples of a function on a grid, row-major layout."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != self.grid.shape:
            if vals.ndim == 1 and vals.size == self.grid.npoints:
                vals = vals.reshape(self.grid.shape)
            else:
                raise GridMismatch(
                    f"values shape {vals.shape} does not match grid shape "
                    f"{self.grid.shape}"
                )
        if not np.all(np.isfinite(vals)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", vals)


def make_grid(dim: int, n_per_axis: int, box_length: float) -> Grid:
    """Build a periodic grid.

    Parameters
    ----------
    dim : int
        Spatial dimension, 1 to 3.
    n_per_axis : int
        Points per axis; must be a power of two and at least 8.
    box_length : float
        Side length L of the periodic box, strictly positive.
    """
    if dim not in (1, 2, 3):
        raise ValueError(f"dim must be 1, 2, or 3, got {dim}")
    n = int(n_per_axis)
    if n != n_per_axis or n < 8 or (n & (n - 1)) != 0:
        raise ValueError(
            f"n_per_axis must be a power of two >= 8, got {n_per_axis}"
        )
    L = float(box_length)
    if not np.isfinite(L) or L <= 0.0:
        raise ValueError(f"box_length must be positive, got {box_length}")
    # n is a power of two, so dividing by n**dim and multiplying back is
    # exact: cell_volume * npoints == L**dim holds bit for bit.
    cell_volume = L**dim / n**dim
    w = 2.0 * np.pi * sfft.fftfreq(n, d=L / n)
    return Grid(dim, n, L, cell_volume, (w,) * dim)


def _check_same_grid(a: Field, b: Field) -> None:
    if a.grid != b.grid:
        raise GridMismatch("fields live on different grids")


def apply_frac_laplacian(u: Field, s: float) -> Field:
    """Apply (-Laplace)^s through the Fourier symbol |xi|^(2s).

    s must lie in (0, 1]; s = 1 reproduces the spectral classical
    Laplacian, fractional orders interpolate between identity-like and
    second-order behaviour per Fourier mode.
    """
    if not (0.0 < s <= 1.0):
        raise ValueError(f"fractional order s must be in (0, 1], got {s}")
    uh = sfft.fftn(u.values)
    out = sfft.ifftn(u.grid.symbol(s) * uh).real
    return Field(u.grid, out)


def integrate(w: Field) -> float:
    """Quadrature over the box: cell volume times the sample sum."""
    return w.grid.cell_volume * float(np.sum(w.values))


def lp_norm(u: Field, p: float) -> float:
    """L^p norm on the box, p >= 1."""
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    return float(
        (u.grid.cell_volume * np.sum(np.abs(u.values) ** p)) ** (1.0 / p)
    )


def hs_quadratic_form(u: Field, s: float, V: Field) -> float:
    """Quadratic form int |(-Lap)^(s/2) u|^2 + V u^2 dx.

    The half-order term is evaluated in physical space (apply the
    multiplier of order s/2, square, integrate), the potential term by
    plain quadrature.  V is any sampled weight; positivity is a modelling
    concern checked elsewhere.
    """
    _check_same_grid(u, V)
    half = apply_frac_laplacian(u, 0.5 * s)
    kinetic = u.grid.cell_volume * float(np.sum(half.values**2))
    potential = u.grid.cell_volume * float(np.sum(V.values * u.values**2))
    return kinetic + potential


def write_field(u: Field, path) -> None:
    """Write a field: 4-line ASCII header, then row-major little-endian f64."""
    g = u.grid
    header = f"dim={g.dim}\nn={g.n_per_axis}\nL={g.box_length!r}\ncount={g.npoints}\n"
    payload = np.ascontiguousarray(u.values, dtype="<f8").tobytes(order="C")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload)


def _read_header_line(fh, key: str, lineno: int) -> str:
    raw = fh.readline(256)
    if not raw.endswith(b"\n"):
        raise FieldFormatError(f"header line {lineno} is not newline-terminated")
    try:
        text = raw[:-1].decode("ascii")
    except UnicodeDecodeError as exc:
        raise FieldFormatError(f"header line {lineno} is not ASCII") from exc
    prefix = key + "="
    if not text.startswith(prefix):
        raise FieldFormatError(
            f"header line {lineno} must start with '{prefix}', got {text!r}"
        )
    return text[len(prefix):]


def read_field(path) -> Field:
    """Read a field written by :func:`write_field`; validates the header."""
    with open(path, "rb") as fh:
        try:
            dim = int(_read_header_line(fh, "dim", 1))
            n = int(_read_header_line(fh, "n", 2))
            L = float(_read_header_line(fh, "L", 3))
            count = int(_read_header_line(fh, "count", 4))
        except ValueError as exc:
            if isinstance(exc, FieldFormatError):
                raise
            raise FieldFormatError(f"malformed header value: {exc}") from exc
        try:
            grid = make_grid(dim, n, L)
        except ValueError as exc:
            raise FieldFormatError(f"header describes no valid grid: {exc}") from exc
        if count != grid.npoints:
            raise FieldFormatError(
                f"count={count} but a {dim}-d grid with n={n} has "
                f"{grid.npoints} points"
            )
        payload = fh.read(8 * count + 1)
        if len(payload) != 8 * count:
            raise FieldFormatError(
                f"expected exactly {8 * count} payload bytes, got {len(payload)}"
            )
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return Field(grid, values.reshape(grid.shape))
