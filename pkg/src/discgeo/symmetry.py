"""Symmetries of the Heisenberg model: fields, flows and their actions.

Candidate fields are written down in closed form and verified numerically
through Lie derivatives; nothing here solves the symmetry PDEs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
import sympy

from . import lie
from .models import (
    TH,
    X,
    Y,
    ControlSystem,
    disc3d,
    disc_contact_form,
    disc_metric_k,
    frame_coefficients,
    heis_metric_r,
    heis_system,
)
from .nilgeo import VerticalConstants, constants_from_initial, eval_horizontal, eval_vertical
from .vecfield import (
    DEFAULT_STEP,
    VectorField,
    bracket_field,
    constant_decomposition,
    fd_jacobian,
    flow,
    pushforward,
    sample_points,
)

_x, _y, _th = sympy.symbols("x y theta", real=True)
_VARS = (_x, _y, _th)


def polynomial_field(label: str, components: Sequence) -> VectorField:
    """Field from sympy expressions in (x, y, theta), with exact Jacobian."""
    exprs = [sympy.sympify(c) for c in components]
    f = sympy.lambdify(_VARS, exprs, "numpy")
    J = sympy.lambdify(_VARS, sympy.Matrix(exprs).jacobian(_VARS).tolist(), "numpy")
    return VectorField(
        3,
        lambda p: np.array(f(*p), dtype=float),
        label,
        lambda p: np.array(J(*p), dtype=float),
    )


@dataclass(frozen=True)
class SymmetryField:
    field: VectorField
    kind: str  # "metric", "lagrangian" or "contact"
    degree: int | None = None

    @property
    def label(self) -> str:
        return self.field.label


_half = sympy.Rational(1, 2)
T_EXPRS = {
    "t0": (_th, (_th**2 - _x**2) * _half, -_x),
    "t1": (1, 0, 0),
    "t2": (0, _x, 1),
    "t3": (0, 1, 0),
    "t4": (_x, 2 * _y, _th),
    "t5": (-_x, 0, _th),
    "t6": (_y * _half, 0, -(_th**2) * _half),
    "t7": (_x**2, _x * _y, _y - _th * _x),
    "t8": (_x * _y * _half, _y**2 * _half, _th * _half * (_y - _th * _x)),
}
GRADING = {"t1": -1, "t2": -1, "t3": -2, "t4": 0, "t5": 0, "t6": 1, "t7": 1, "t8": 2}


def t_field(label: str) -> VectorField:
    return polynomial_field(label, T_EXPRS[label])


def metric_symmetry_fields() -> list[SymmetryField]:
    """Symmetries of the distribution together with the metric r."""
    return [SymmetryField(t_field(k), "metric") for k in ("t0", "t1", "t2", "t3")]


def lagrangian_symmetry_fields() -> list[SymmetryField]:
    """Symmetries of the splitting E + F, graded by their action degree."""
    return [SymmetryField(t_field(f"t{i}"), "lagrangian", GRADING[f"t{i}"]) for i in range(1, 9)]


def disc_translation_fields() -> list[VectorField]:
    """Left translations of the disc group: a rotation and the two shifts."""
    return [
        polynomial_field("rot", (-_y, _x, 1)),
        polynomial_field("dx", (1, 0, 0)),
        polynomial_field("dy", (0, 1, 0)),
    ]


def contact_symmetry_from_potential(
    f3: Callable[[np.ndarray], float], label: str = "V", step: float = 1e-4
) -> VectorField:
    """The field ``f1 n1 + f2 n2 + f3 n3`` generated by the potential ``f3``."""

    def grad(p):
        return fd_jacobian(lambda q: np.atleast_1d(f3(q)), p, step)[0]

    def func(p):
        g = grad(p)
        f1 = p[TH] * g[Y] + g[X]
        f2 = -g[TH]
        c = f3(p)
        # n1 = d_theta, n2 = d_x + theta d_y, n3 = d_y
        return np.array([f2, f2 * p[TH] + c, f1])

    return VectorField(3, func, label)


def potential_field(label: str, f3_expr) -> VectorField:
    """Exact version of :func:`contact_symmetry_from_potential` via sympy."""
    f3 = sympy.sympify(f3_expr)
    f1 = _th * sympy.diff(f3, _y) + sympy.diff(f3, _x)
    f2 = -sympy.diff(f3, _th)
    return polynomial_field(label, (f2, f2 * _th + f3, f1))


# --- Lie derivatives -------------------------------------------------------


def lie_derivative_tensor(v: VectorField, G: Callable, p, step: float = DEFAULT_STEP) -> np.ndarray:
    """``L_v G`` of a symmetric (0,2) tensor at ``p``."""
    p = np.asarray(p, dtype=float)
    vp = v(p)
    J = v.jacobian(p, step)
    dG = sum(vp[a] * (np.asarray(G(p + step * e)) - np.asarray(G(p - step * e))) / (2 * step) for a, e in enumerate(np.eye(p.size)))
    Gp = np.asarray(G(p))
    return dG + J.T @ Gp + Gp @ J


STRUCTURES = ("N", "r", "E+F", "k")


def symmetry_residual(v: VectorField, structure: str, p, step: float = DEFAULT_STEP) -> float:
    p = np.asarray(p, dtype=float)
    if structure == "k":
        X1, X2 = disc3d().generators
        res = [abs(disc_contact_form(p) @ bracket_field(v, F, step)(p)) for F in (X1, X2)]
        res.append(np.max(np.abs(lie_derivative_tensor(v, disc_metric_k, p, step))))
        return float(max(res))
    n1, n2, _ = heis_system().full_frame
    b1 = frame_coefficients(p, bracket_field(v, n1, step)(p))
    b2 = frame_coefficients(p, bracket_field(v, n2, step)(p))
    if structure == "N":
        return float(max(abs(b1[2]), abs(b2[2])))
    if structure == "r":
        L = lie_derivative_tensor(v, heis_metric_r, p, step)
        return float(max(abs(b1[2]), abs(b2[2]), np.max(np.abs(L))))
    if structure == "E+F":
        return float(max(abs(b1[1]), abs(b1[2]), abs(b2[0]), abs(b2[2])))
    raise ValueError(f"unknown structure {structure!r}; choose from {STRUCTURES}")


def verify_symmetry(v: VectorField, structure: str, sample_points, step: float = DEFAULT_STEP) -> float:
    """Max symmetry residual of ``v`` over ``sample_points``.

    ``N``: the contact form kills ``L_v n1`` and ``L_v n2``.
    ``r``: additionally ``L_v r = 0``.
    ``E+F``: ``L_v n1`` stays in E and ``L_v n2`` stays in F.
    ``k``: the disc distribution and the metric k are preserved.
    """
    return max(symmetry_residual(v, structure, p, step) for p in sample_points)


# --- point transformations -------------------------------------------------


@dataclass(frozen=True)
class PointTransformation:
    forward: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    label: str
    s: float
    domain: Callable[[np.ndarray], bool] | None = None
    inverse_domain: Callable[[np.ndarray], bool] | None = None

    def admissible(self, p) -> bool:
        return True if self.domain is None else bool(self.domain(np.asarray(p, dtype=float)))

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if not self.admissible(p):
            raise ValueError(f"{self.label}: point {p.tolist()} outside the domain at s={self.s}")
        return np.asarray(self.forward(p), dtype=float)

    def inverted(self) -> "PointTransformation":
        return PointTransformation(self.inverse, self.forward, f"{self.label}^-1", self.s, self.inverse_domain, self.domain)


def _t0_map(s: float):
    c, sn = np.cos(s), np.sin(s)

    def f(p):
        x, y, th = p
        return np.array([th * sn + x * c, 0.5 * (th * th - x * x) * sn * c - x * th * sn * sn + y, th * c - x * sn])

    return f


def _t4_map(s: float):
    return lambda p: np.array([np.exp(s) * p[X], np.exp(2 * s) * p[Y], np.exp(s) * p[TH]])


def _t6_map(s: float):
    return lambda p: np.array([p[X] + 0.5 * s * p[Y], p[Y], 2 * p[TH] / (s * p[TH] + 2)])


def _t6_domain(s: float):
    # the flow line through p survives up to time s only while s theta + 2 > 0
    return lambda p: s * p[TH] + 2 > 1e-12


def translation_flow(b1: float, b2: float, b3: float, s: float) -> PointTransformation:
    def f(sign):
        def m(p):
            x, y, th = p
            u = sign * s
            return np.array([x + b1 * u, y + b2 * u * x + 0.5 * b1 * b2 * u * u + b3 * u, th + b2 * u])

        return m

    return PointTransformation(f(1), f(-1), "translation", s)


CLOSED_FORM_FLOWS = {"t0": _t0_map, "t4": _t4_map, "t6": _t6_map}


def flow_closed_form(label: str, s: float, b: Sequence[float] = (1.0, 0.0, 0.0)) -> PointTransformation:
    """Closed-form flow of ``t0``, ``t4``, ``t6`` or of a translation ``b``."""
    if label == "translation":
        return translation_flow(*b, s)
    if label not in CLOSED_FORM_FLOWS:
        raise ValueError(f"no closed-form flow for {label!r}")
    mk = CLOSED_FORM_FLOWS[label]
    if label == "t6":
        fwd, inv = mk(s), mk(-s)
        return PointTransformation(fwd, inv, label, s, _t6_domain(s), _t6_domain(-s))
    return PointTransformation(mk(s), mk(-s), label, s)


def flow_numeric(v: VectorField, s: float, tol: float = 1e-11) -> PointTransformation:
    return PointTransformation(lambda p: flow(v, p, s, tol), lambda p: flow(v, p, -s, tol), v.label, s)


def flow_transformation(label: str, s: float) -> PointTransformation:
    """Closed form when known, otherwise numerical integration of the field."""
    if label in CLOSED_FORM_FLOWS:
        return flow_closed_form(label, s)
    return flow_numeric(t_field(label), s)


def pushforward_frame(T: PointTransformation, fields: Sequence[VectorField], step: float = DEFAULT_STEP) -> list[VectorField]:
    """``T_* V`` for each field; pass ``T.inverted()`` for the pullback."""
    return [pushforward(T.forward, T.inverse, V, step).named(f"{T.label}_*{V.label}") for V in fields]


def transformed_metric(label: str, s: float) -> tuple[ControlSystem, PointTransformation]:
    """Pullback ``f_s^* r`` of the metric r by the flow behind ``label``.

    ``tau`` uses the flow of t6, ``mu`` the flow of t4. The returned system has
    the pulled-back frame as orthonormal generators; its geodesics are the
    images of ordinary geodesics under ``f_{-s}``.
    """
    field = {"tau": "t6", "mu": "t4"}.get(label)
    if field is None:
        raise ValueError(f"unknown metric family {label!r}; choose 'tau' or 'mu'")
    T = flow_closed_form(field, s)
    frame = pushforward_frame(T.inverted(), heis_system().full_frame)
    sys = ControlSystem(f"{label}_s", 3, tuple(frame[:2]), tuple(frame), f"{label}_s")
    return sys, T


def tau_metric(s: float, p) -> np.ndarray:
    """``(dx + s/2 dy)^2 + (4/w^2 dtheta)^2`` with ``w = s theta + 2``."""
    w = s * p[TH] + 2
    a = np.array([1.0, 0.5 * s, 0.0])
    b = np.array([0.0, 0.0, 4 / w**2])
    return np.outer(a, a) + np.outer(b, b)


# --- orbits of geodesics ---------------------------------------------------


@dataclass(frozen=True)
class OrbitCurve:
    s: float
    times: np.ndarray
    points: np.ndarray
    truncated: bool


def orbit_of_geodesic(
    C: VerticalConstants, label: str, s_values: Sequence[float], times: Sequence[float]
) -> list[OrbitCurve]:
    """Images of the geodesic ``C`` under the flow of ``label`` at each ``s``.

    Sampling stops at the first inadmissible point; the curve is then flagged.
    """
    times = np.asarray(times, dtype=float)
    base = np.column_stack(eval_horizontal(C, times))
    out = []
    for s in s_values:
        T = flow_transformation(label, float(s))
        pts = []
        for p in base:
            if not T.admissible(p):
                break
            pts.append(T(p))
        n = len(pts)
        out.append(OrbitCurve(float(s), times[:n], np.array(pts).reshape(n, 3), n < len(times)))
    return out


def t0_image_constants(C: VerticalConstants, s: float) -> VerticalConstants:
    """Constants of the image of ``C`` under the rotation flow of t0."""
    h1, h2, h3 = (float(a) for a in eval_vertical(C, 0.0))
    c, sn = np.cos(s), np.sin(s)
    return constants_from_initial(h1 * c - h2 * sn, h2 * c + h1 * sn, h3)


# --- algebraic consequences ------------------------------------------------


def degree_zero_action(step: float = DEFAULT_STEP, points=None) -> tuple[np.ndarray, np.ndarray]:
    """Matrices of ``ad t4`` and ``ad t5`` on span(t1, t2), columns = images."""
    pts = sample_points(3, 10) if points is None else points
    basis = [t_field("t1"), t_field("t2")]
    mats = []
    for a in ("t4", "t5"):
        cols = []
        for b in basis:
            c, res = constant_decomposition(bracket_field(t_field(a), b, step), basis, pts)
            if res > 1e-6:
                raise ArithmeticError(f"[{a},{b.label}] leaves span(t1, t2)")
            cols.append(c)
        mats.append(np.column_stack(cols))
    return mats[0], mats[1]


def rationalize(M: np.ndarray, max_den: int = 1000) -> list[list[Fraction]]:
    return [[Fraction(float(v)).limit_denominator(max_den) for v in row] for row in np.atleast_2d(M)]


def invariant_symmetric_forms(mats: Sequence[Sequence[Sequence[Fraction]]]) -> list[tuple[Fraction, ...]]:
    """Exact basis of symmetric ``B`` with ``a B + B a^T = 0`` for every ``a``.

    Unknowns are the upper triangle of ``B`` in row-major order.
    """
    n = len(mats[0])
    idx = [(i, j) for i in range(n) for j in range(i, n)]
    pos = {ij: k for k, ij in enumerate(idx)}

    def var(i, j):
        return pos[(min(i, j), max(i, j))]

    rows = []
    for a in mats:
        for i in range(n):
            for j in range(i, n):
                row = [Fraction(0)] * len(idx)
                for k in range(n):
                    row[var(k, j)] += Fraction(a[i][k])
                    row[var(i, k)] += Fraction(a[j][k])
                rows.append(row)
    return lie.nullspace(rows, len(idx))
