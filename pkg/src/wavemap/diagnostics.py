"""Measured quantities: constraint norms, origin monitor, energies, scaling."""
from __future__ import annotations

import dataclasses

import numpy as np

from .grid import (Axis, DerivOrder, Domain, GHOST, Grid2D, derivative,
                   fill_ghosts, quadrature_array)
from .model import FieldState, constraint_phi, constraint_psi, static_w

# below this curvature the scaling function is reported as undefined
CURVATURE_FLOOR = 1e-12

# Blow-up indicator: the solution wraps through the south pole, w -> -1,
# at the nodes next to the origin.  The origin node itself cannot leave the
# north pole when its tangential components are pinned to zero by symmetry,
# so the wrap is detected on the minimum of w over the whole grid.  Near the
# threshold, runs that do not blow up bottom out around w = -0.91, so the
# cut sits between the two behaviours with a wide margin on both sides.
WRAP_THRESHOLD = -0.99


@dataclasses.dataclass
class DiagnosticsRecord:
    t: float
    phi_max: float
    psi_max: float
    origin_dev: float
    energy: float
    energy_rel: float
    delta_e: float
    s: float | None
    min_w: float


def _domain_factor(grid: Grid2D) -> float:
    # the quarter grid covers one symmetric quadrant of the full domain
    return 4.0 if grid.domain is Domain.QUARTER else 1.0


def max_norms(state: FieldState) -> tuple[float, float]:
    phi = constraint_phi(state).interior
    psi = constraint_psi(state).interior
    return float(np.abs(phi).max()), float(np.abs(psi).max())


def origin_deviation(state: FieldState, grid: Grid2D) -> float:
    j, k = grid.origin_index()
    return float(abs(state.w.values[j, k] - 1.0))


def _gradient_and_velocity_squares(state: FieldState, grid: Grid2D):
    state.fill_ghosts(grid)
    vel2 = np.zeros((grid.n, grid.n))
    for f in state.velocities():
        vel2 += f.interior ** 2
    grad2 = np.zeros((grid.n, grid.n))
    for f in state.positions():
        for ax in (Axis.X, Axis.Y):
            grad2 += derivative(f, ax, DerivOrder.FIRST, grid).interior ** 2
    return vel2, grad2


def total_energy(state: FieldState, grid: Grid2D,
                 include_constraint_term: bool = True) -> float:
    """E = 1/2 integral of |U'|^2 + |dU/dx|^2 + |dU/dy|^2 - lambda*phi."""
    vel2, grad2 = _gradient_and_velocity_squares(state, grid)
    integrand = vel2 + grad2
    if include_constraint_term:
        lam = -0.5 * (vel2 - grad2)
        integrand = integrand - lam * constraint_phi(state).interior
    return _domain_factor(grid) * 0.5 * quadrature_array(integrand, grid)


def energy_correction_rate(state: FieldState, grid: Grid2D) -> float:
    """Integral of lambda*psi; the Neumann boundary flux term vanishes."""
    vel2, grad2 = _gradient_and_velocity_squares(state, grid)
    lam = -0.5 * (vel2 - grad2)
    psi = constraint_psi(state).interior
    return _domain_factor(grid) * quadrature_array(lam * psi, grid)


def accumulate_correction(delta_e_prev: float, rate_prev: float,
                          rate_curr: float, dt: float) -> float:
    """Trapezoidal accumulation of the energy-deviation integral in time."""
    return delta_e_prev + 0.5 * dt * (rate_prev + rate_curr)


def radial_curvature_at_origin(state: FieldState, grid: Grid2D) -> float:
    """d^2 w / dr^2 at the origin via the five-point stencil on the x-axis.

    On the quarter domain the ghost fill provides the even extension of w
    across the origin.
    """
    fill_ghosts(state.w, grid)
    j, k = grid.origin_index()
    a = state.w.values
    return float((-a[j - 2, k] + 16.0 * a[j - 1, k] - 30.0 * a[j, k]
                  + 16.0 * a[j + 1, k] - a[j + 2, k]) / (12.0 * grid.h ** 2))


def scaling_function(state: FieldState, grid: Grid2D) -> float | None:
    """s = 2 / sqrt(|d_rr w(t,0)|); None when the curvature is below floor."""
    d = radial_curvature_at_origin(state, grid)
    if abs(d) < CURVATURE_FLOOR:
        return None
    return 2.0 / np.sqrt(abs(d))


def _axis_profile(state: FieldState, grid: Grid2D) -> np.ndarray:
    """w along the non-negative x-axis (y = 0), starting at the origin."""
    j, k = grid.origin_index()
    return state.w.values[j:grid.n + GHOST, k].copy()


def rescaled_profile(state: FieldState, grid: Grid2D, s: float,
                     radii) -> list[tuple[float, float, float]]:
    """Sample (r, w(t, s*r, 0), w_static(r)) by cubic interpolation on the axis."""
    w_axis = _axis_profile(state, grid)
    m = w_axis.size
    r_max = (m - 1) * grid.h
    # even extension across the origin so every sample has 4 bracketing nodes
    ext = np.concatenate([w_axis[3:0:-1], w_axis])
    out = []
    for r in radii:
        q = s * float(r)
        if q < 0.0 or q > r_max:
            raise ValueError(f"rescaled radius {q} outside grid extent {r_max}")
        jf = q / grid.h
        j0 = min(max(int(np.floor(jf)), 0), m - 3)
        # nodes j0-1 .. j0+2 in axis numbering; +3 offsets into `ext`
        idx = np.arange(j0 - 1, j0 + 3)
        xs = idx.astype(float)
        ys = ext[idx + 3]
        val = 0.0
        for a in range(4):
            num = 1.0
            for b in range(4):
                if a != b:
                    num *= (jf - xs[b]) / (xs[a] - xs[b])
            val += num * ys[a]
        out.append((float(r), float(val), static_w(r)))
    return out


def lightcone_energies(state: FieldState, grid: Grid2D,
                       radius: float) -> tuple[float, float]:
    """Kinetic and potential energies over the disk r <= radius (sharp mask)."""
    vel2, grad2 = _gradient_and_velocity_squares(state, grid)
    X, Y = grid.mesh()
    mask = (X ** 2 + Y ** 2) <= radius ** 2
    f = _domain_factor(grid)
    e_kin = f * 0.5 * quadrature_array(vel2 * mask, grid)
    e_pot = f * 0.5 * quadrature_array(grad2 * mask, grid)
    return e_kin, e_pot


def sample(state: FieldState, grid: Grid2D, delta_e: float,
           include_constraint_term: bool = True) -> DiagnosticsRecord:
    """One full diagnostics record at the state's current time."""
    phi_max, psi_max = max_norms(state)
    energy = total_energy(state, grid, include_constraint_term)
    return DiagnosticsRecord(
        t=state.time,
        phi_max=phi_max,
        psi_max=psi_max,
        origin_dev=origin_deviation(state, grid),
        energy=energy,
        energy_rel=0.0,  # filled by the driver relative to E(0)
        delta_e=delta_e,
        s=scaling_function(state, grid),
        min_w=float(state.w.interior.min()),
    )
