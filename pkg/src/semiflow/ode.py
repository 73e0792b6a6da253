"""Classical RK4 for autonomous systems ``y' = f(y)`` with step-doubling control.

Each trial step of size ``h`` is compared with two steps of size ``h/2``;
the Richardson difference ``|y_half - y_full| / 15`` estimates the local
error.  A step is accepted when that estimate is below ``tol * h`` (error
per unit time), the step is halved otherwise and doubled after a very
accurate step.  Accepted states use the locally extrapolated value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NoConvergence

MAX_STEPS = 2**20


@dataclass
class ODEResult:
    t: float
    y: np.ndarray
    ts: list = field(default_factory=list)
    ys: list = field(default_factory=list)
    steps: int = 0
    event_time: float | None = None


def rk4_step(f: Callable, y, h: float):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _err(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _locate_event(f, y0, h, event, iters=60):
    # bisection on the sub-step length using single RK4 steps from y0
    lo, hi = 0.0, h
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if event(rk4_step(f, y0, mid)) >= 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-14 * max(1.0, h):
            break
    return hi


def integrate(
    f: Callable,
    y0,
    t_end: float,
    *,
    tol: float = 1e-10,
    t_eval: Sequence[float] | None = None,
    event: Callable | None = None,
    steps: int | None = None,
    h0: float | None = None,
    max_steps: int = MAX_STEPS,
) -> ODEResult:
    """Integrate from ``t = 0`` to ``t_end >= 0``.

    ``t_eval`` lists checkpoints (within ``[0, t_end]``) whose states are
    recorded exactly on the step grid.  ``event(y) >= 0`` stops the
    integration; the crossing time is bisected and stored in
    ``event_time``.  With ``steps`` given, each interval between
    checkpoints is covered by that many equal steps and no error control is
    applied (used for convergence-order studies).
    """
    if t_end < 0:
        raise ValueError("t_end must be >= 0; integrate -f for backward time")
    y = np.array(y0, dtype=complex, copy=True)
    marks = sorted(set(float(t) for t in (t_eval or [])) | {float(t_end)})
    if marks and marks[0] < 0:
        raise ValueError("checkpoints must be >= 0")
    out = ODEResult(t=0.0, y=y)
    t = 0.0
    if 0.0 in marks:
        out.ts.append(0.0)
        out.ys.append(y.copy())
    if t_end == 0:
        out.y = y
        return out

    h = h0 if h0 is not None else min(t_end, 0.1)
    h_min = max(t_end, 1.0) * 2.0**-40
    nsteps = 0
    for mark in marks:
        if mark <= t:
            continue
        if steps is not None:
            hh = (mark - t) / steps
            for _ in range(steps):
                y_new = rk4_step(f, y, hh)
                nsteps += 1
                if event is not None and event(y_new) >= 0:
                    out.event_time = t + _locate_event(f, y, hh, event)
                    out.t, out.y, out.steps = t, y, nsteps
                    return out
                y = y_new
                t += hh
            t = mark
        else:
            while t < mark:
                h_try = min(h, mark - t)
                full = rk4_step(f, y, h_try)
                half = rk4_step(f, rk4_step(f, y, 0.5 * h_try), 0.5 * h_try)
                nsteps += 3
                if nsteps > max_steps:
                    raise NoConvergence(f"RK4 exceeded {max_steps} steps at t = {t:.6g}",
                                        estimate=y)
                err = _err(half, full) / 15.0
                if not np.isfinite(err):
                    err = np.inf
                if err > tol * h_try:
                    h = 0.5 * h_try
                    if h < h_min:
                        raise NoConvergence(f"step size underflow at t = {t:.6g}", estimate=y)
                    continue
                y_new = half + (half - full) / 15.0
                if event is not None and event(y_new) >= 0:
                    out.event_time = t + _locate_event(f, y, h_try, event)
                    out.t, out.y, out.steps = t, y, nsteps
                    return out
                y = y_new
                t = mark if mark - t <= h_try * (1 + 1e-12) else t + h_try
                if err < tol * h_try / 32.0 and h_try == h:
                    h = 2.0 * h
        out.ts.append(mark)
        out.ys.append(y.copy())
    out.t, out.y, out.steps = t, y, nsteps
    return out
