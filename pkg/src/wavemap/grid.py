"""Uniform Cartesian grid with ghost layers, five-point stencils and quadrature.

Arrays are stored with shape (n + 2*GHOST, n + 2*GHOST); index [i, j] maps to
(x, y) with i the x index.  Interior nodes occupy the slice 2:-2 on both axes.
"""
from __future__ import annotations

import dataclasses
import enum

import numpy as np

GHOST = 2
INTERIOR = slice(GHOST, -GHOST)


class GridError(ValueError):
    """Invalid grid configuration."""


class Domain(enum.Enum):
    FULL = "full"
    QUARTER = "quarter"


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    NONE = "none"


class Axis(enum.Enum):
    X = 0
    Y = 1


class DerivOrder(enum.Enum):
    FIRST = 1
    SECOND = 2


@dataclasses.dataclass(frozen=True)
class Grid2D:
    """Equidistant grid on [-1,1]^2 (full) or [0,1]^2 (quarter), h_x = h_y."""

    n: int
    h: float
    domain: Domain
    x_min: float

    @property
    def shape(self) -> tuple[int, int]:
        m = self.n + 2 * GHOST
        return (m, m)

    def axis_coords(self) -> np.ndarray:
        """Coordinates of the interior nodes along either axis."""
        return self.x_min + self.h * np.arange(self.n)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Interior node coordinates as (X, Y) with indexing [ix, iy]."""
        c = self.axis_coords()
        return np.meshgrid(c, c, indexing="ij")

    def origin_index(self) -> tuple[int, int]:
        """Array index of the node at (0, 0), ghosts included."""
        if self.domain is Domain.FULL:
            c = GHOST + (self.n - 1) // 2
            return (c, c)
        return (GHOST, GHOST)


def build_grid(domain: Domain, n_per_axis: int) -> Grid2D:
    if n_per_axis < 9:
        raise GridError(f"n_per_axis must be >= 9, got {n_per_axis}")
    if n_per_axis % 2 == 0:
        raise GridError(f"n_per_axis must be odd, got {n_per_axis}")
    if domain is Domain.FULL:
        return Grid2D(n=n_per_axis, h=2.0 / (n_per_axis - 1), domain=domain, x_min=-1.0)
    return Grid2D(n=n_per_axis, h=1.0 / (n_per_axis - 1), domain=domain, x_min=0.0)


@dataclasses.dataclass
class ScalarField:
    """Grid function with two ghost layers and reflection parities.

    The parities describe the symmetry of the function across the low boundary
    of each axis; they are only consulted on the quarter domain, where odd
    parity encodes the homogeneous Dirichlet condition on the axis.
    """

    values: np.ndarray
    parity_x: Parity = Parity.NONE
    parity_y: Parity = Parity.NONE

    @property
    def interior(self) -> np.ndarray:
        return self.values[INTERIOR, INTERIOR]


def allocate_field(grid: Grid2D, parity_x: Parity = Parity.NONE,
                   parity_y: Parity = Parity.NONE) -> ScalarField:
    return ScalarField(np.zeros(grid.shape), parity_x, parity_y)


def _fill_axis(a: np.ndarray, axis: int, low_parity: Parity) -> None:
    v = a if axis == 0 else a.T
    if low_parity is Parity.ODD:
        v[GHOST, :] = 0.0
        v[1, :] = -v[3, :]
        v[0, :] = -v[4, :]
    else:
        v[1, :] = v[3, :]
        v[0, :] = v[4, :]
    # high side is always an even (Neumann) reflection
    v[-2, :] = v[-4, :]
    v[-1, :] = v[-5, :]


def fill_ghost_array(a: np.ndarray, parity_x: Parity, parity_y: Parity,
                     domain: Domain) -> None:
    """Set all ghost values of `a` in place by reflection."""
    if domain is Domain.FULL:
        parity_x = parity_y = Parity.EVEN
    _fill_axis(a, 0, parity_x if parity_x is not Parity.NONE else Parity.EVEN)
    _fill_axis(a, 1, parity_y if parity_y is not Parity.NONE else Parity.EVEN)


def fill_ghosts(field: ScalarField, grid: Grid2D) -> ScalarField:
    """Fill the ghost layers of `field` in place and return it."""
    fill_ghost_array(field.values, field.parity_x, field.parity_y, grid.domain)
    return field


def derivative(field: ScalarField, axis: Axis, order: DerivOrder,
               grid: Grid2D) -> ScalarField:
    """Centred five-point derivative; interior nodes only, ghosts left at 0."""
    a = field.values if axis is Axis.X else field.values.T
    out = np.zeros_like(field.values)
    o = out if axis is Axis.X else out.T
    I = INTERIOR
    if order is DerivOrder.FIRST:
        o[I, I] = (a[:-4, I] - 8.0 * a[1:-3, I]
                   + 8.0 * a[3:-1, I] - a[4:, I]) / (12.0 * grid.h)
    else:
        o[I, I] = (-a[:-4, I] + 16.0 * a[1:-3, I] - 30.0 * a[2:-2, I]
                   + 16.0 * a[3:-1, I] - a[4:, I]) / (12.0 * grid.h ** 2)
    return ScalarField(out)


def trapezoid_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def quadrature(field: ScalarField, grid: Grid2D) -> float:
    """2D trapezoidal rule over the grid's own domain (no symmetry factor)."""
    w = trapezoid_weights(grid.n)
    return float(grid.h ** 2 * (w @ field.interior @ w))


def quadrature_array(values_interior: np.ndarray, grid: Grid2D) -> float:
    w = trapezoid_weights(grid.n)
    return float(grid.h ** 2 * (w @ values_interior @ w))
