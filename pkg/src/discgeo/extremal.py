"""Normal extremals of the disc and of its nilpotent approximation.

States are arrays ``(x, y, theta, h1, h2, h3)``; the h's are the vertical
coordinates, i.e. the covector paired with the left-invariant frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import rkf45

STATE_NAMES = ("x", "y", "theta", "h1", "h2", "h3")
ORIGINAL = "original"
NILPOTENT = "nilpotent"


def make_state(x=0.0, y=0.0, theta=0.0, h1=0.0, h2=0.0, h3=0.0) -> np.ndarray:
    s = np.array([x, y, theta, h1, h2, h3], dtype=float)
    if not np.all(np.isfinite(s)):
        raise ValueError(f"non-finite state {s}")
    return s


def rhs_original(s: np.ndarray) -> np.ndarray:
    _, _, th, h1, h2, h3 = s
    return np.array([h2 * np.cos(th), h2 * np.sin(th), h1, -h3 * h2, h3 * h1, -h1 * h2])


def rhs_nilpotent(s: np.ndarray) -> np.ndarray:
    _, _, th, h1, h2, h3 = s
    return np.array([h2, th * h2, h1, -h3 * h2, h3 * h1, 0.0])


RHS: dict[str, Callable[[np.ndarray], np.ndarray]] = {ORIGINAL: rhs_original, NILPOTENT: rhs_nilpotent}


def hamiltonian(states: np.ndarray) -> np.ndarray:
    states = np.atleast_2d(states)
    return 0.5 * (states[:, 3] ** 2 + states[:, 4] ** 2)


def casimir(states: np.ndarray, system: str) -> np.ndarray:
    """``h3^2 - h1^2`` for the disc, ``h3`` for the approximation."""
    states = np.atleast_2d(states)
    if system == ORIGINAL:
        return states[:, 5] ** 2 - states[:, 3] ** 2
    if system == NILPOTENT:
        return states[:, 5]
    raise ValueError(f"unknown system {system!r}")


def is_arclength(s0: Sequence[float], tol: float = 1e-12) -> bool:
    return abs(s0[3] ** 2 + s0[4] ** 2 - 1.0) <= tol


@dataclass(frozen=True)
class Diagnostics:
    hamiltonian_drift: float
    casimir_drift: float
    arclength: bool
    n_steps: int
    n_rejected: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    method: str
    system: str
    rel_tol: float
    abs_tol: float
    diagnostics: Diagnostics | None = None
    step_times: np.ndarray = field(default=None, repr=False)
    step_states: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.times) != len(self.states) or len(self.times) < 1:
            raise ValueError("times and states must be non-empty and of equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def end(self) -> np.ndarray:
        return self.states[-1]

    def at(self, t: float) -> np.ndarray:
        """Dense output by cubic Hermite interpolation between accepted steps."""
        ts = self.times if self.step_times is None else self.step_times
        ys = self.states if self.step_states is None else self.step_states
        if not ts[0] <= t <= ts[-1]:
            raise ValueError(f"t={t} outside [{ts[0]}, {ts[-1]}]")
        i = min(int(np.searchsorted(ts, t, side="right")) - 1, len(ts) - 2)
        if i < 0:
            return ys[0].copy()
        f = RHS[self.system]
        return rkf45.hermite(t, ts[i], ts[i + 1], ys[i], ys[i + 1], f(ys[i]), f(ys[i + 1]))


class IntegrationFailure(RuntimeError):
    """Step size underflow; ``partial`` holds the accepted part."""

    def __init__(self, message: str, partial: Trajectory):
        super().__init__(message)
        self.partial = partial


def conserved_diagnostics(traj: Trajectory, system: str | None = None) -> Diagnostics:
    system = system or traj.system
    states = traj.states if traj.step_states is None else np.vstack([traj.states, traj.step_states])
    H = hamiltonian(states)
    C = casimir(states, system)
    return Diagnostics(
        hamiltonian_drift=float(np.max(np.abs(H - H[0]))),
        casimir_drift=float(np.max(np.abs(C - C[0]))),
        arclength=is_arclength(traj.states[0]),
        n_steps=0 if traj.step_times is None else len(traj.step_times) - 1,
        n_rejected=0,
    )


def integrate_rkf45(
    system: str,
    s0: Sequence[float],
    t_end: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    max_step: float | None = None,
    grid: int | Sequence[float] = 2,
) -> Trajectory:
    """Integrate the extremal equations of ``system`` from ``s0``.

    ``grid`` is either a number of equally spaced output times including both
    ends, or an explicit list of times.
    """
    if system not in RHS:
        raise ValueError(f"unknown system {system!r}")
    f = RHS[system]
    if isinstance(grid, (int, np.integer)):
        if grid < 2:
            raise ValueError("grid must have at least 2 points")
        t_eval = np.linspace(0.0, t_end, int(grid))
    else:
        t_eval = np.asarray(grid, dtype=float)
    try:
        res = rkf45.integrate(f, s0, t_end, rel_tol, abs_tol, max_step, t_eval)
    except rkf45.StepSizeUnderflow as exc:
        partial = Trajectory(exc.times, exc.states, "rkf45", system, rel_tol, abs_tol, None, exc.times, exc.states)
        raise IntegrationFailure(str(exc), partial) from exc
    traj = Trajectory(res.times, res.states, "rkf45", system, rel_tol, abs_tol, None, res.step_times, res.step_states)
    d = conserved_diagnostics(traj)
    d = Diagnostics(d.hamiltonian_drift, d.casimir_drift, d.arclength, d.n_steps, res.n_rejected)
    return Trajectory(res.times, res.states, "rkf45", system, rel_tol, abs_tol, d, res.step_times, res.step_states)
