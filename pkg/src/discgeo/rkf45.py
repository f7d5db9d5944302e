"""Adaptive Runge-Kutta-Fehlberg 4(5) integration for autonomous ODEs.

The embedded pair of Fehlberg (1969): six stages, a 4th and a 5th order
solution sharing them. The difference of the two drives step-size control;
the 5th order solution is propagated (local extrapolation).

Steps are clipped so that every requested output time is hit exactly, so no
interpolation error enters the output grid. Between accepted steps a cubic
Hermite interpolant is available through :func:`hermite`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# Butcher tableau
C = np.array([0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2])
A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
B4 = np.array([25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0])
B5 = np.array([16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55])
E = B5 - B4

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


class StepSizeUnderflow(RuntimeError):
    """The controller asked for a step below floating point resolution.

    ``times``/``states`` hold the accepted part of the solution; the last row
    is the last valid state.
    """

    def __init__(self, message: str, times: np.ndarray, states: np.ndarray):
        super().__init__(message)
        self.times = times
        self.states = states

    @property
    def last_state(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class RKFResult:
    step_times: np.ndarray
    step_states: np.ndarray
    times: np.ndarray
    states: np.ndarray
    n_rejected: int
    n_evals: int


def rkf45_step(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, h: float, k1: np.ndarray | None = None):
    """One Fehlberg step. Returns (5th order solution, error estimate, k1)."""
    k = np.empty((6, y.size))
    k[0] = f(y) if k1 is None else k1
    for s in range(1, 6):
        k[s] = f(y + h * np.dot(A[s], k[:s]))
    return y + h * (B5 @ k), h * (E @ k), k[0]


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    y0: Sequence[float],
    t_end: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    max_step: float | None = None,
    t_eval: Sequence[float] | None = None,
    first_step: float | None = None,
    max_steps: int = 1_000_000,
) -> RKFResult:
    """Integrate ``y' = f(y)`` on ``[0, t_end]``.

    ``t_eval`` defaults to ``[0, t_end]``; every value must lie in that
    interval. ``max_step`` defaults to ``t_end / 50``.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    y = np.asarray(y0, dtype=float).copy()
    if not np.all(np.isfinite(y)):
        raise ValueError(f"non-finite initial state {y}")
    max_step = t_end / 50 if max_step is None else float(max_step)
    stops = np.array([0.0, t_end] if t_eval is None else sorted(set(float(t) for t in t_eval)))
    if stops[0] < 0 or stops[-1] > t_end * (1 + 1e-14):
        raise ValueError("t_eval outside [0, t_end]")

    h = min(max_step, first_step or max_step * 0.1, t_end)
    t = 0.0
    step_t, step_y = [t], [y.copy()]
    out_t, out_y = [], []
    stop_idx = 0
    if stops[0] == 0.0:
        out_t.append(0.0)
        out_y.append(y.copy())
        stop_idx = 1
    n_rej = 0
    n_eval = 0
    k1 = None
    steps = 0
    while stop_idx < len(stops):
        target = stops[stop_idx]
        tiny = 16 * np.finfo(float).eps * max(abs(t), t_end)
        h_try = min(h, max_step, target - t)
        # never leave a sliver below resolution before an output time
        if target - t - h_try < tiny:
            h_try = target - t
        hit = h_try >= target - t
        if h_try < tiny and not hit:
            raise StepSizeUnderflow(f"step size underflow at t={t!r}", np.array(step_t), np.array(step_y))
        n_eval += 6 if k1 is None else 5
        y_new, err, k1 = rkf45_step(f, y, h_try, k1)
        if not np.all(np.isfinite(y_new)):
            err_norm = np.inf
        else:
            scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = float(np.max(np.abs(err) / scale))
        if err_norm <= 1.0:
            t = target if hit else t + h_try
            y = y_new
            k1 = None
            step_t.append(t)
            step_y.append(y.copy())
            if hit:
                out_t.append(t)
                out_y.append(y.copy())
                stop_idx += 1
            factor = MAX_FACTOR if err_norm == 0 else min(MAX_FACTOR, SAFETY * err_norm ** -0.2)
            # a step clipped to an output time says nothing about the natural step
            if not hit or h_try >= h:
                h = h_try * max(1.0, factor)
        else:
            n_rej += 1
            factor = MIN_FACTOR if not np.isfinite(err_norm) else max(MIN_FACTOR, SAFETY * err_norm ** -0.2)
            h = h_try * factor
        steps += 1
        if steps > max_steps:
            raise StepSizeUnderflow("maximum number of steps exceeded", np.array(step_t), np.array(step_y))
    return RKFResult(np.array(step_t), np.array(step_y), np.array(out_t), np.array(out_y), n_rej, n_eval)


def hermite(t: float, t0: float, t1: float, y0, y1, dy0, dy1) -> np.ndarray:
    """Cubic Hermite interpolant between two accepted steps."""
    h = t1 - t0
    s = (t - t0) / h
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return h00 * np.asarray(y0) + h10 * h * np.asarray(dy0) + h01 * np.asarray(y1) + h11 * h * np.asarray(dy1)
