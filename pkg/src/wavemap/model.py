"""Wave-map system on the 2-sphere in the extrinsic formulation.

Fields (u, v, w) are the Cartesian sphere components, subject to the
pointwise constraint u^2 + v^2 + w^2 = 1 and its velocity counterpart
2(u u' + v v' + w w') = 0.
"""
from __future__ import annotations

import dataclasses
import enum

import numpy as np

from .grid import (Axis, DerivOrder, Domain, Grid2D, INTERIOR, Parity,
                   ScalarField, derivative, fill_ghost_array, fill_ghosts)

# parities of (u, v, w) across the low-x / low-y boundaries of the quarter
# domain; velocities share the parities of their fields
FIELD_PARITIES = {
    "u": (Parity.ODD, Parity.EVEN),
    "v": (Parity.EVEN, Parity.ODD),
    "w": (Parity.EVEN, Parity.EVEN),
}


class Pole(enum.Enum):
    SOUTH = 1.0
    NORTH = -1.0


@dataclasses.dataclass
class InitialDataParams:
    """Ring-shaped polynomial bump for the polar angle."""

    amplitude: float
    r1: float = 0.5
    r2: float = 1.0
    n: int = 4

    def __post_init__(self):
        if not (0.0 <= self.r1 < self.r2):
            raise ValueError(f"need 0 <= r1 < r2, got r1={self.r1}, r2={self.r2}")
        if self.n < 1:
            raise ValueError(f"exponent n must be >= 1, got {self.n}")


@dataclasses.dataclass
class FieldState:
    """Sphere components and their velocities at one instant."""

    u: ScalarField
    v: ScalarField
    w: ScalarField
    ut: ScalarField
    vt: ScalarField
    wt: ScalarField
    time: float = 0.0

    def positions(self) -> tuple[ScalarField, ScalarField, ScalarField]:
        return (self.u, self.v, self.w)

    def velocities(self) -> tuple[ScalarField, ScalarField, ScalarField]:
        return (self.ut, self.vt, self.wt)

    def fill_ghosts(self, grid: Grid2D) -> "FieldState":
        for f in (self.u, self.v, self.w, self.ut, self.vt, self.wt):
            fill_ghosts(f, grid)
        return self

    def copy(self) -> "FieldState":
        return FieldState(*(ScalarField(f.values.copy(), f.parity_x, f.parity_y)
                            for f in (self.u, self.v, self.w,
                                      self.ut, self.vt, self.wt)),
                          time=self.time)


def allocate_state(grid: Grid2D, time: float = 0.0) -> FieldState:
    fields = []
    for name in ("u", "v", "w"):
        px, py = FIELD_PARITIES[name]
        fields.append(ScalarField(np.zeros(grid.shape), px, py))
    vels = [ScalarField(np.zeros(grid.shape), f.parity_x, f.parity_y)
            for f in fields]
    return FieldState(*fields, *vels, time=time)


def theta0(r, p: InitialDataParams):
    """Polar-angle bump A*(4(r-r1)(r2-r)/(r2-r1)^2)^n on [r1, r2], else 0."""
    r = np.asarray(r, dtype=float)
    bracket = 4.0 * (r - p.r1) * (p.r2 - r) / (p.r2 - p.r1) ** 2
    inside = (r >= p.r1) & (r <= p.r2)
    out = np.where(inside, p.amplitude * np.where(inside, bracket, 0.0) ** p.n, 0.0)
    return out if out.ndim else float(out)


def theta0_prime(r, p: InitialDataParams):
    """Radial derivative of theta0 (zero outside the ring)."""
    r = np.asarray(r, dtype=float)
    denom = (p.r2 - p.r1) ** 2
    bracket = 4.0 * (r - p.r1) * (p.r2 - r) / denom
    dbracket = 4.0 * (p.r1 + p.r2 - 2.0 * r) / denom
    inside = (r > p.r1) & (r < p.r2)
    safe = np.where(inside, bracket, 1.0)
    out = np.where(inside,
                   p.amplitude * p.n * safe ** (p.n - 1) * dbracket, 0.0)
    return out if out.ndim else float(out)


def intrinsic_to_extrinsic(theta, phi_angle):
    """(theta, phi) on the sphere -> Cartesian (u, v, w)."""
    st = np.sin(theta)
    return (st * np.cos(phi_angle), st * np.sin(phi_angle), np.cos(theta))


def initial_state(p: InitialDataParams, grid: Grid2D) -> FieldState:
    """Ingoing ring initial data; satisfies both constraints analytically."""
    state = allocate_state(grid)
    X, Y = grid.mesh()
    r = np.hypot(X, Y)
    th = theta0(r, p)
    thp = theta0_prime(r, p)
    with np.errstate(invalid="ignore", divide="ignore"):
        cx = np.where(r > 0.0, X / np.where(r > 0.0, r, 1.0), 0.0)
        cy = np.where(r > 0.0, Y / np.where(r > 0.0, r, 1.0), 0.0)
    st, ct = np.sin(th), np.cos(th)
    I = INTERIOR
    state.u.values[I, I] = st * cx
    state.v.values[I, I] = st * cy
    state.w.values[I, I] = ct
    state.ut.values[I, I] = ct * thp * cx
    state.vt.values[I, I] = ct * thp * cy
    state.wt.values[I, I] = -st * thp
    return state.fill_ghosts(grid)


def static_solution(grid: Grid2D, pole: Pole = Pole.SOUTH) -> FieldState:
    """Stereographic projection from the chosen pole; zero velocities."""
    state = allocate_state(grid)
    X, Y = grid.mesh()
    r2 = X ** 2 + Y ** 2
    I = INTERIOR
    state.u.values[I, I] = 2.0 * X / (1.0 + r2)
    state.v.values[I, I] = 2.0 * Y / (1.0 + r2)
    state.w.values[I, I] = pole.value * (1.0 - r2) / (1.0 + r2)
    return state.fill_ghosts(grid)


def static_w(r):
    """w component of the south-pole static solution at radius r."""
    r = np.asarray(r, dtype=float)
    out = (1.0 - r ** 2) / (1.0 + r ** 2)
    return out if out.ndim else float(out)


def lambda_field(state: FieldState, grid: Grid2D) -> ScalarField:
    """Multiplier lambda = -1/2 (|U'|^2 - |dU/dx|^2 - |dU/dy|^2), nodewise."""
    state.fill_ghosts(grid)
    acc = np.zeros((grid.n, grid.n))
    for f in state.velocities():
        acc += f.interior ** 2
    for f in state.positions():
        for ax in (Axis.X, Axis.Y):
            acc -= derivative(f, ax, DerivOrder.FIRST, grid).interior ** 2
    out = np.zeros(grid.shape)
    out[INTERIOR, INTERIOR] = -0.5 * acc
    return ScalarField(out)


def rhs_free(state: FieldState, grid: Grid2D) -> FieldState:
    """Rates of the multiplier-eliminated first-order system.

    Position rates are the velocities; velocity rates are
    Lap(U) + 2 lambda U with the five-point Laplacian.  Reference numpy
    implementation; the integrators use the fused kernels for speed.
    """
    state.fill_ghosts(grid)
    lam = lambda_field(state, grid).interior
    rates = allocate_state(grid, time=state.time)
    I = INTERIOR
    for pos, vel, dpos, dvel in zip(state.positions(), state.velocities(),
                                    rates.positions(), rates.velocities()):
        lap = (derivative(pos, Axis.X, DerivOrder.SECOND, grid).interior
               + derivative(pos, Axis.Y, DerivOrder.SECOND, grid).interior)
        dpos.values[I, I] = vel.interior
        dvel.values[I, I] = lap + 2.0 * lam * pos.interior
    return rates


def constraint_phi(state: FieldState) -> ScalarField:
    """u^2 + v^2 + w^2 - 1, nodewise on the interior."""
    out = np.zeros_like(state.u.values)
    I = INTERIOR
    out[I, I] = (state.u.interior ** 2 + state.v.interior ** 2
                 + state.w.interior ** 2 - 1.0)
    return ScalarField(out)


def constraint_psi(state: FieldState) -> ScalarField:
    """2(u u' + v v' + w w'), nodewise on the interior."""
    out = np.zeros_like(state.u.values)
    I = INTERIOR
    out[I, I] = 2.0 * (state.u.interior * state.ut.interior
                       + state.v.interior * state.vt.interior
                       + state.w.interior * state.wt.interior)
    return ScalarField(out)
