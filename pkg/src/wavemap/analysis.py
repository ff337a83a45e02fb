"""Post-processing: run classification, critical search, scaling-law fit."""
from __future__ import annotations

import dataclasses
import enum
import math

import numpy as np

from .config import RunConfig
from .diagnostics import WRAP_THRESHOLD
from .integrate import RunRecord, Status, evolve

# fixed prefactor of the blow-up scaling law
SCALING_PREFACTOR = 1.04 / math.e


class Classification(enum.Enum):
    SUBCRITICAL = "subcritical"
    FLIP = "flip"
    FAILED = "failed"


@dataclasses.dataclass
class FitResult:
    T: float
    b: float
    residual: float
    iterations: int
    converged: bool


@dataclasses.dataclass
class CriticalSearchResult:
    a_star: float
    bracket: tuple[float, float]
    runs: int
    classifications: list[tuple[float, Classification]]


def classify_run(record: RunRecord) -> Classification:
    """Flip iff the solution wraps through the south pole; Failed on aborts.

    The wrap is read off the per-step minimum of w (see WRAP_THRESHOLD);
    a flipped origin value, origin_dev > 1, also counts when present.
    """
    if record.status is not Status.COMPLETED:
        return Classification.FAILED
    if record.min_w_overall < WRAP_THRESHOLD:
        return Classification.FLIP
    if any(r.origin_dev > 1.0 for r in record.samples):
        return Classification.FLIP
    return Classification.SUBCRITICAL


def critical_search(base_config: RunConfig, a_lo: float, a_hi: float,
                    tol_a: float, verbose: bool = False) -> CriticalSearchResult:
    """Bisect on the amplitude for the subcritical/blow-up threshold.

    Failed runs are treated as supercritical for bracketing but kept in the
    classification log.
    """
    if not (a_lo < a_hi) or tol_a <= 0.0:
        raise ValueError(f"invalid bracket [{a_lo}, {a_hi}] or tol {tol_a}")

    def run(amplitude: float) -> Classification:
        config = dataclasses.replace(base_config, amplitude=amplitude,
                                     stop_on_flip=True, energy_correction=False)
        grid = config.build_grid()
        cls = classify_run(evolve(config, grid, store_final_state=False))
        if verbose:
            print(f"  A = {amplitude:.8f} -> {cls.value}", flush=True)
        return cls

    log: list[tuple[float, Classification]] = []
    lo_cls = run(a_lo)
    log.append((a_lo, lo_cls))
    if lo_cls is not Classification.SUBCRITICAL:
        raise ValueError(f"lower bracket A={a_lo} is not subcritical ({lo_cls.value})")
    hi_cls = run(a_hi)
    log.append((a_hi, hi_cls))
    if hi_cls is Classification.SUBCRITICAL:
        raise ValueError(f"upper bracket A={a_hi} is subcritical")

    lo, hi = a_lo, a_hi
    while hi - lo > tol_a:
        mid = 0.5 * (lo + hi)
        cls = run(mid)
        log.append((mid, cls))
        if cls is Classification.SUBCRITICAL:
            lo = mid
        else:
            hi = mid
    return CriticalSearchResult(a_star=hi, bracket=(lo, hi), runs=len(log),
                                classifications=log)


def scaling_model(t: np.ndarray, T: float, b: float) -> np.ndarray:
    """s(t) = (1.04/e) (T-t) exp(-sqrt(-ln(T-t) + b))."""
    tau = T - t
    q = np.sqrt(-np.log(tau) + b)
    return SCALING_PREFACTOR * tau * np.exp(-q)


def _model_and_jacobian(t: np.ndarray, T: float, b: float):
    tau = T - t
    if np.any(tau <= 0.0):
        return None
    L = -np.log(tau) + b
    if np.any(L <= 0.0):
        return None
    q = np.sqrt(L)
    m = SCALING_PREFACTOR * tau * np.exp(-q)
    dm_dT = SCALING_PREFACTOR * np.exp(-q) * (1.0 + 1.0 / (2.0 * q))
    dm_db = -m / (2.0 * q)
    return m, np.column_stack([dm_dT, dm_db])


def fit_scaling(series, window: tuple[float, float],
                max_iterations: int = 200) -> FitResult:
    """Damped Gauss-Newton fit of (T, b) to the scaling-law samples.

    `series` is an iterable of (t, s) pairs; samples outside `window` or with
    undefined s are dropped.
    """
    t_a, t_b = window
    pts = [(t, s) for t, s in series if s is not None and t_a <= t <= t_b]
    if len(pts) < 5:
        raise ValueError(f"need at least 5 samples in window, got {len(pts)}")
    t = np.array([p[0] for p in pts])
    s = np.array([p[1] for p in pts])

    T, b = t_b + 0.1, 0.0
    if _model_and_jacobian(t, T, b) is None:
        raise ValueError("scaling model undefined at the initial guess")
    mj = _model_and_jacobian(t, T, b)
    res = mj[0] - s
    sse = float(res @ res)
    mu = 1e-3
    converged = False
    it = 0
    for it in range(1, max_iterations + 1):
        m, J = mj
        res = m - s
        A = J.T @ J + mu * np.eye(2)
        g = J.T @ res
        try:
            step = np.linalg.solve(A, g)
        except np.linalg.LinAlgError:
            break
        T_new, b_new = T - step[0], b - step[1]
        mj_new = _model_and_jacobian(t, T_new, b_new)
        if mj_new is None:
            mu *= 10.0  # stepped outside the model domain; damp harder
            continue
        res_new = mj_new[0] - s
        sse_new = float(res_new @ res_new)
        if sse_new <= sse:
            rel_drop = abs(sse - sse_new) / max(sse, 1e-300)
            T, b, mj = T_new, b_new, mj_new
            sse = sse_new
            mu = max(mu * 0.3, 1e-14)
            if float(np.abs(step).max()) < 1e-12 or rel_drop < 1e-14:
                converged = True
                break
        else:
            mu *= 10.0
            if mu > 1e12:
                break
    return FitResult(T=T, b=b, residual=sse, iterations=it, converged=converged)


def convergence_order(errors) -> float:
    """Least-squares slope of ln(error) against ln(h)."""
    pts = list(errors)
    if len(pts) < 2:
        raise ValueError("need at least 2 (h, error) pairs")
    h = np.array([p[0] for p in pts], dtype=float)
    e = np.array([p[1] for p in pts], dtype=float)
    if np.any(e <= 0.0) or np.any(h <= 0.0):
        raise ValueError("h and errors must be positive")
    slope, _ = np.polyfit(np.log(h), np.log(e), 1)
    return float(slope)
