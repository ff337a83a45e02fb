"""Time steppers: free RK4 and constraint-projecting Rattle, plus the driver."""
from __future__ import annotations

import dataclasses
import enum

import numpy as np

from . import diagnostics
from .config import RunConfig
from .grid import Grid2D, INTERIOR, fill_ghosts
from . import kernels
from .kernels import accel3, laplacian3
from .model import FieldState, allocate_state, initial_state, static_solution


class Method(enum.Enum):
    RK4 = "rk4"
    RATTLE = "rattle"


class Status(enum.Enum):
    COMPLETED = "completed"
    PROJECTION_FAILED = "projection_failed"
    NON_FINITE = "non_finite"


class ProjectionError(RuntimeError):
    """Constraint projection did not converge within the iteration cap."""


@dataclasses.dataclass
class StepperConfig:
    method: Method = Method.RATTLE
    cfl: float = 0.2
    tol: float = 1e-12
    max_iter: int = 100


@dataclasses.dataclass
class RunRecord:
    samples: list[diagnostics.DiagnosticsRecord]
    final_state: FieldState | None
    status: Status
    snapshots: dict[float, FieldState] = dataclasses.field(default_factory=dict)
    failure_time: float | None = None
    min_w_overall: float = 1.0
    t_min_w: float = 0.0
    max_position_iters: int = 0
    max_velocity_iters: int = 0


def _fill_positions(state: FieldState, grid: Grid2D) -> None:
    for f in state.positions():
        fill_ghosts(f, grid)


def _accel(state: FieldState, grid: Grid2D, out: FieldState) -> None:
    """Velocity rates Lap(U) + 2*lambda*U into `out`'s velocity arrays."""
    _fill_positions(state, grid)
    accel3(state.u.values, state.v.values, state.w.values,
           state.ut.values, state.vt.values, state.wt.values,
           grid.h, out.ut.values, out.vt.values, out.wt.values)


def _laplacian(state: FieldState, grid: Grid2D):
    _fill_positions(state, grid)
    shape = state.u.values.shape
    lu, lv, lw = (np.zeros(shape) for _ in range(3))
    laplacian3(state.u.values, state.v.values, state.w.values, grid.h, lu, lv, lw)
    return lu[INTERIOR, INTERIOR], lv[INTERIOR, INTERIOR], lw[INTERIOR, INTERIOR]


def rk4_step(state: FieldState, dt: float, grid: Grid2D) -> FieldState:
    """Classical RK4 on the multiplier-eliminated first-order system."""
    I = INTERIOR
    y = state
    rates = [allocate_state(grid) for _ in range(4)]
    stage = allocate_state(grid)

    def eval_rates(src: FieldState, dst: FieldState) -> None:
        for pos_rate, vel in zip(dst.positions(), src.velocities()):
            pos_rate.values[I, I] = vel.interior
        _accel(src, grid, dst)

    eval_rates(y, rates[0])
    for i, c in ((1, 0.5), (2, 0.5), (3, 1.0)):
        for f, f0, k in zip(stage.positions() + stage.velocities(),
                            y.positions() + y.velocities(),
                            rates[i - 1].positions() + rates[i - 1].velocities()):
            f.values[I, I] = f0.interior + c * dt * k.interior
        eval_rates(stage, rates[i])

    new = allocate_state(grid, time=state.time + dt)
    for f, f0, k1, k2, k3, k4 in zip(
            new.positions() + new.velocities(),
            y.positions() + y.velocities(),
            rates[0].positions() + rates[0].velocities(),
            rates[1].positions() + rates[1].velocities(),
            rates[2].positions() + rates[2].velocities(),
            rates[3].positions() + rates[3].velocities()):
        f.values[I, I] = f0.interior + (dt / 6.0) * (
            k1.interior + 2.0 * k2.interior + 2.0 * k3.interior + k4.interior)
    new.fill_ghosts(grid)
    return new


def rattle_step(state: FieldState, dt: float, grid: Grid2D,
                cfg: StepperConfig) -> tuple[FieldState, tuple[int, int]]:
    """One kick-drift-kick step with nodewise constraint projections.

    The position-stage multiplier is found by per-node Newton iteration on
    |U_n + dt*P*(Lam)|^2 - 1 = 0, the velocity-stage multiplier on the linear
    velocity-constraint equation.  Raises ProjectionError past the cap.
    """
    if kernels.HAVE_NUMBA:
        return _rattle_step_kernel(state, dt, grid, cfg)
    return _rattle_step_numpy(state, dt, grid, cfg)


def _rattle_step_kernel(state: FieldState, dt: float, grid: Grid2D,
                        cfg: StepperConfig) -> tuple[FieldState, tuple[int, int]]:
    _fill_positions(state, grid)
    new = allocate_state(grid, time=state.time + dt)
    shape = state.u.values.shape
    pu, pv, pw = (np.zeros(shape) for _ in range(3))
    pos_iters, pos_fail = kernels.rattle_positions(
        state.u.values, state.v.values, state.w.values,
        state.ut.values, state.vt.values, state.wt.values,
        grid.h, dt, cfg.tol, cfg.max_iter,
        new.u.values, new.v.values, new.w.values, pu, pv, pw)
    if pos_fail:
        raise ProjectionError(
            f"position projection exceeded {cfg.max_iter} iterations "
            f"at {pos_fail} nodes, t={state.time}")
    _fill_positions(new, grid)
    vel_iters, vel_fail = kernels.rattle_velocities(
        new.u.values, new.v.values, new.w.values, pu, pv, pw,
        grid.h, dt, cfg.tol, cfg.max_iter,
        new.ut.values, new.vt.values, new.wt.values)
    if vel_fail:
        raise ProjectionError(
            f"velocity projection exceeded {cfg.max_iter} iterations "
            f"at {vel_fail} nodes, t={state.time}")
    new.fill_ghosts(grid)
    return new, (pos_iters, vel_iters)


def _rattle_step_numpy(state: FieldState, dt: float, grid: Grid2D,
                       cfg: StepperConfig) -> tuple[FieldState, tuple[int, int]]:
    I = INTERIOR
    lap = _laplacian(state, grid)
    Un = [f.interior.copy() for f in state.positions()]
    P0 = [f.interior + 0.5 * dt * l
          for f, l in zip(state.velocities(), lap)]
    B = [q + dt * p for q, p in zip(Un, P0)]
    c = dt * dt

    lam = np.zeros_like(B[0])
    pos_iters = 0
    while True:
        X = [b + c * lam * q for b, q in zip(B, Un)]
        g = X[0] ** 2 + X[1] ** 2 + X[2] ** 2 - 1.0
        if float(np.abs(g).max()) <= cfg.tol:
            break
        if pos_iters >= cfg.max_iter:
            raise ProjectionError(
                f"position projection exceeded {cfg.max_iter} iterations at t={state.time}")
        gp = 2.0 * c * (X[0] * Un[0] + X[1] * Un[1] + X[2] * Un[2])
        lam -= g / gp
        pos_iters += 1

    new = allocate_state(grid, time=state.time + dt)
    for f, x in zip(new.positions(), X):
        f.values[I, I] = x
    _fill_positions(new, grid)

    Pstar = [p + dt * lam * q for p, q in zip(P0, Un)]
    lap1 = _laplacian(new, grid)
    D = [p + 0.5 * dt * l for p, l in zip(Pstar, lap1)]
    U1 = [f.interior for f in new.positions()]

    mu = np.zeros_like(D[0])
    vel_iters = 0
    while True:
        V = [d + dt * mu * q for d, q in zip(D, U1)]
        g = 2.0 * (U1[0] * V[0] + U1[1] * V[1] + U1[2] * V[2])
        if float(np.abs(g).max()) <= cfg.tol:
            break
        if vel_iters >= cfg.max_iter:
            raise ProjectionError(
                f"velocity projection exceeded {cfg.max_iter} iterations at t={state.time}")
        gp = 2.0 * dt * (U1[0] ** 2 + U1[1] ** 2 + U1[2] ** 2)
        mu -= g / gp
        vel_iters += 1

    for f, x in zip(new.velocities(), V):
        f.values[I, I] = x
    new.fill_ghosts(grid)
    return new, (pos_iters, vel_iters)


def _is_finite(state: FieldState) -> bool:
    return all(np.isfinite(f.interior).all()
               for f in state.positions() + state.velocities())


def build_initial_state(config: RunConfig, grid: Grid2D) -> FieldState:
    if config.initial == "static":
        return static_solution(grid)
    return initial_state(config.initial_params(), grid)


def evolve(config: RunConfig, grid: Grid2D,
           store_final_state: bool = True) -> RunRecord:
    """Run one evolution from t=0 to t_end, sampling diagnostics on the way.

    dt = cfl*h, with the final partial step shortened to land on t_end exactly.
    Snapshots are stored at the first sample time at or after each requested
    snapshot time.
    """
    cfg = StepperConfig(method=Method(config.method), cfl=config.cfl,
                        tol=config.tol, max_iter=config.max_iter)
    state = build_initial_state(config, grid)
    dt = cfg.cfl * grid.h
    n_steps = int(np.ceil(config.t_end / dt - 1e-12))

    record = RunRecord(samples=[], final_state=None, status=Status.COMPLETED)
    use_correction = config.energy_correction
    delta_e = 0.0
    rate_prev = diagnostics.energy_correction_rate(state, grid) if use_correction else 0.0

    first = diagnostics.sample(state, grid, delta_e)
    e0 = first.energy
    record.samples.append(first)
    record.min_w_overall = first.min_w
    record.t_min_w = 0.0
    pending_snapshots = sorted(config.snapshot_times)
    jo, ko = grid.origin_index()

    def take_snapshot_if_due(st: FieldState) -> None:
        while pending_snapshots and st.time >= pending_snapshots[0] - 1e-12:
            record.snapshots[pending_snapshots.pop(0)] = st.copy()

    take_snapshot_if_due(state)

    for i in range(1, n_steps + 1):
        step_dt = dt if i < n_steps else config.t_end - (n_steps - 1) * dt
        try:
            if cfg.method is Method.RK4:
                state = rk4_step(state, step_dt, grid)
            else:
                state, iters = rattle_step(state, step_dt, grid, cfg)
                record.max_position_iters = max(record.max_position_iters, iters[0])
                record.max_velocity_iters = max(record.max_velocity_iters, iters[1])
        except ProjectionError:
            record.status = Status.PROJECTION_FAILED
            record.failure_time = state.time
            break
        state.time = i * dt if i < n_steps else config.t_end

        origin_w = float(state.w.values[jo, ko])
        if not np.isfinite(origin_w) or not _is_finite(state):
            record.status = Status.NON_FINITE
            record.failure_time = state.time
            break

        min_w = float(state.w.interior.min())
        if min_w < record.min_w_overall:
            record.min_w_overall = min_w
            record.t_min_w = state.time

        if use_correction:
            rate = diagnostics.energy_correction_rate(state, grid)
            delta_e = diagnostics.accumulate_correction(delta_e, rate_prev, rate, step_dt)
            rate_prev = rate

        if i % config.sample_stride == 0 or i == n_steps:
            rec = diagnostics.sample(state, grid, delta_e)
            rec.energy_rel = abs(1.0 - rec.energy / e0) if e0 != 0.0 else 0.0
            record.samples.append(rec)
            take_snapshot_if_due(state)

        if config.stop_on_flip and min_w < diagnostics.WRAP_THRESHOLD:
            if record.samples[-1].t != state.time:
                rec = diagnostics.sample(state, grid, delta_e)
                rec.energy_rel = abs(1.0 - rec.energy / e0) if e0 != 0.0 else 0.0
                record.samples.append(rec)
            break

    if store_final_state:
        record.final_state = state
    return record
