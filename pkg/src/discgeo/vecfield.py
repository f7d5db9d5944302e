"""Vector fields on a coordinate chart and their numerical calculus.

Points are plain float arrays in the order (x, y, theta) or
(x, y, theta, phi). Angles are never wrapped.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import rkf45

DEFAULT_STEP = 1e-5
DEFAULT_SEED = 20240917
RANK_TOL = 1e-6

Point = np.ndarray


def default_seed() -> int:
    """Seed for sample sweeps; ``TOOL_SEED`` overrides the built-in value."""
    raw = os.environ.get("TOOL_SEED")
    return int(raw) if raw not in (None, "") else DEFAULT_SEED


def sample_points(dim: int, n: int, seed: int | None = None, low: float = -1.0, high: float = 1.0) -> np.ndarray:
    """``n`` points drawn uniformly from ``[low, high]^dim``."""
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    return rng.uniform(low, high, size=(n, dim))


def as_point(p, dim: int | None = None) -> Point:
    q = np.asarray(p, dtype=float)
    if q.ndim != 1 or (dim is not None and q.size != dim):
        raise ValueError(f"expected a point of dimension {dim}, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ValueError(f"non-finite point {q}")
    return q


def wrap_angle(theta: float) -> float:
    """Reduce an angle to [-pi, pi). Display only."""
    return (theta + np.pi) % (2 * np.pi) - np.pi


@dataclass(frozen=True)
class VectorField:
    """A smooth field given by coefficient functions on a chart."""

    dim: int
    func: Callable[[Point], Sequence[float]]
    label: str = "V"
    jacobian_func: Callable[[Point], np.ndarray] | None = field(default=None, compare=False)

    def __call__(self, p) -> np.ndarray:
        q = as_point(p, self.dim)
        v = np.asarray(self.func(q), dtype=float)
        if v.shape != (self.dim,):
            raise ValueError(f"{self.label}: expected {self.dim} components, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"{self.label}: non-finite value at point {q.tolist()}")
        return v

    def jacobian(self, p, step: float = DEFAULT_STEP) -> np.ndarray:
        """``J[c, a] = d V^c / d x^a``; analytic when available."""
        if self.jacobian_func is not None:
            return np.asarray(self.jacobian_func(as_point(p, self.dim)), dtype=float)
        return fd_jacobian(self, p, step)

    def __add__(self, other: "VectorField") -> "VectorField":
        _same_dim(self, other)
        return VectorField(self.dim, lambda p: self(p) + other(p), f"{self.label}+{other.label}")

    def __sub__(self, other: "VectorField") -> "VectorField":
        _same_dim(self, other)
        return VectorField(self.dim, lambda p: self(p) - other(p), f"{self.label}-{other.label}")

    def __rmul__(self, c: float) -> "VectorField":
        return VectorField(self.dim, lambda p: c * self(p), f"{c:g}*{self.label}")

    def __neg__(self) -> "VectorField":
        return VectorField(self.dim, lambda p: -self(p), f"-{self.label}")

    def named(self, label: str) -> "VectorField":
        return VectorField(self.dim, self.func, label, self.jacobian_func)


def _same_dim(V: VectorField, W: VectorField) -> None:
    if V.dim != W.dim:
        raise ValueError(f"dimension mismatch: {V.label} has {V.dim}, {W.label} has {W.dim}")


def linear_combination(coeffs: Sequence[float], fields: Sequence[VectorField], label: str = "V") -> VectorField:
    dim = fields[0].dim
    cs = [float(c) for c in coeffs]
    return VectorField(dim, lambda p: sum(c * F(p) for c, F in zip(cs, fields)), label)


def fd_jacobian(F: Callable[[Point], Sequence[float]], p, step: float = DEFAULT_STEP) -> np.ndarray:
    """Central-difference Jacobian of a map ``R^n -> R^m``."""
    if step <= 0:
        raise ValueError("step must be positive")
    q = np.asarray(p, dtype=float)
    cols = []
    for a in range(q.size):
        e = np.zeros_like(q)
        e[a] = step
        cols.append((np.asarray(F(q + e), dtype=float) - np.asarray(F(q - e), dtype=float)) / (2 * step))
    return np.column_stack(cols)


def lie_bracket_fd(V: VectorField, W: VectorField, p, step: float = DEFAULT_STEP) -> np.ndarray:
    """``[V, W](p) = J_W V - J_V W``."""
    _same_dim(V, W)
    if step <= 0:
        raise ValueError("step must be positive")
    q = as_point(p, V.dim)
    return W.jacobian(q, step) @ V(q) - V.jacobian(q, step) @ W(q)


def bracket_field(V: VectorField, W: VectorField, step: float = DEFAULT_STEP, label: str | None = None) -> VectorField:
    """The bracket as a field in its own right (its Jacobian is numeric)."""
    _same_dim(V, W)
    return VectorField(V.dim, lambda p: lie_bracket_fd(V, W, p, step), label or f"[{V.label},{W.label}]")


def check_jacobian(V: VectorField, points, step: float = DEFAULT_STEP) -> float:
    """Max deviation between the analytic Jacobian and central differences."""
    if V.jacobian_func is None:
        return 0.0
    return max(float(np.max(np.abs(V.jacobian(p) - fd_jacobian(V, p, step)))) for p in points)


def jacobi_matrix(fields: Sequence[VectorField], p) -> np.ndarray:
    """Row ``i`` holds the coefficients of ``fields[i]`` at ``p``."""
    if not fields:
        raise ValueError("no fields given")
    dim = fields[0].dim
    if len(fields) != dim or any(F.dim != dim for F in fields):
        raise ValueError(f"need exactly {dim} fields of dimension {dim}, got {len(fields)}")
    return np.vstack([F(p) for F in fields])


def numeric_rank(M: np.ndarray, tol: float = RANK_TOL) -> int:
    s = np.linalg.svd(np.atleast_2d(M), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * max(1.0, s[0])))


def bracket_closure(generators: Sequence[VectorField], depth: int, step: float = DEFAULT_STEP) -> list[VectorField]:
    """Generators plus iterated brackets ``[g, f]`` with up to ``depth`` nestings.

    Fields are identified by label only, so numerically equal but distinct
    expressions are all kept.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    out = list(generators)
    seen = {F.label for F in out}
    level = list(generators)
    for _ in range(depth):
        nxt = []
        for g in generators:
            for f in level:
                if g.label == f.label:
                    continue
                label = f"[{g.label},{f.label}]"
                mirror = f"[{f.label},{g.label}]"
                if label in seen or mirror in seen:
                    continue
                B = bracket_field(g, f, step, label)
                seen.add(label)
                nxt.append(B)
        out.extend(nxt)
        level = nxt
    return out


@dataclass(frozen=True)
class ControllabilityReport:
    dim: int
    n_points: int
    ranks: tuple[int, ...]
    field_labels: tuple[str, ...]

    @property
    def min_rank(self) -> int:
        return min(self.ranks) if self.ranks else 0

    @property
    def n_full(self) -> int:
        return sum(r == self.dim for r in self.ranks)

    @property
    def controllable(self) -> bool:
        return bool(self.ranks) and self.n_full == self.n_points

    def summary(self) -> str:
        return f"rank {self.min_rank}/{self.dim} at {self.n_full}/{self.n_points} points"

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "n_points": self.n_points,
            "min_rank": self.min_rank,
            "full_rank_points": self.n_full,
            "controllable": self.controllable,
            "fields": list(self.field_labels),
        }


def controllability_check(
    fields: Sequence[VectorField], sample_points, bracket_depth: int = 1, step: float = DEFAULT_STEP
) -> ControllabilityReport:
    """Rank of the bracket closure at each sample point."""
    if bracket_depth < 1:
        raise ValueError("bracket_depth must be at least 1")
    closure = bracket_closure(fields, bracket_depth, step)
    dim = fields[0].dim
    ranks = tuple(numeric_rank(np.vstack([F(p) for F in closure])) for p in sample_points)
    return ControllabilityReport(dim, len(ranks), ranks, tuple(F.label for F in closure))


def flow(V: VectorField, p, s: float, tol: float = 1e-10) -> np.ndarray:
    """Time-``s`` flow of ``V`` from ``p`` (``s`` may be negative).

    Raises :class:`rkf45.StepSizeUnderflow` carrying the last valid state.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    q = as_point(p, V.dim)
    if s == 0:
        return q.copy()
    sign = 1.0 if s > 0 else -1.0
    res = rkf45.integrate(lambda y: sign * V(y), q, abs(s), rel_tol=tol, abs_tol=tol * 1e-2)
    return res.states[-1]


def pushforward(forward: Callable, inverse: Callable, V: VectorField, step: float = DEFAULT_STEP) -> VectorField:
    """``T_* V`` at ``q`` is ``DT(T^{-1} q) V(T^{-1} q)``."""

    def func(q):
        p = np.asarray(inverse(q), dtype=float)
        return fd_jacobian(forward, p, step) @ V(p)

    return VectorField(V.dim, func, f"T*{V.label}")


def decompose(values: np.ndarray, basis_values: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares coefficients of ``values`` in the rows of ``basis_values``.

    Returns ``(coeffs, residual)`` with the max-abs residual.
    """
    B = np.asarray(basis_values, dtype=float).T
    v = np.asarray(values, dtype=float)
    c, *_ = np.linalg.lstsq(B, v, rcond=None)
    return c, float(np.max(np.abs(B @ c - v)))


def constant_decomposition(target: VectorField, basis: Sequence[VectorField], points) -> tuple[np.ndarray, float]:
    """Constant coefficients ``c`` with ``target = sum c_k basis_k`` on ``points``.

    Stacks all points into one least-squares problem; the residual measures
    how far ``target`` is from the constant span.
    """
    rows, rhs = [], []
    for p in points:
        rows.append(np.column_stack([F(p) for F in basis]))
        rhs.append(target(p))
    A = np.vstack(rows)
    b = np.concatenate(rhs)
    c, *_ = np.linalg.lstsq(A, b, rcond=None)
    return c, float(np.max(np.abs(A @ c - b)))


def numeric_structure_constants(
    fields: Sequence[VectorField], points, step: float = DEFAULT_STEP
) -> tuple[np.ndarray, float]:
    """``c[i, j, k]`` with ``[F_i, F_j] = sum_k c[i, j, k] F_k``, plus the worst residual.

    Coefficients are assumed constant (true for frames of Lie algebras).
    """
    n = len(fields)
    c = np.zeros((n, n, n))
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            B = bracket_field(fields[i], fields[j], step)
            coeffs, res = constant_decomposition(B, fields, points)
            c[i, j], c[j, i] = coeffs, -coeffs
            worst = max(worst, res)
    return c, worst
