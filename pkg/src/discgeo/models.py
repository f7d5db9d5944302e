"""Closed-form frames, the Heisenberg group and the sub-Riemannian metrics.

Chart order is (x, y, theta) in 3D and (x, y, theta, phi) in 4D. Group
elements of the Heisenberg group are written (theta, x, y) as in its group
law, and converted at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .vecfield import VectorField, as_point

X, Y, TH, PHI = 0, 1, 2, 3


def _vf(dim: int, label: str, func: Callable, jac: Callable) -> VectorField:
    return VectorField(dim, func, label, jac)


def _zeros(n: int) -> np.ndarray:
    return np.zeros((n, n))


def _const(dim: int, label: str, vec: Sequence[float]) -> VectorField:
    v = np.array(vec, dtype=float)
    return _vf(dim, label, lambda p: v, lambda p: _zeros(dim))


def _theta_field(dim: int, label: str, f: Callable[[float], Sequence[float]], df: Callable[[float], Sequence[float]]):
    """Field whose coefficients depend on theta only."""

    def jac(p):
        J = _zeros(dim)
        J[:, TH] = df(p[TH])
        return J

    return _vf(dim, label, lambda p: np.array(f(p[TH]), dtype=float), jac)


@dataclass(frozen=True)
class ControlSystem:
    """An orthonormal frame of a distribution plus bracket completions."""

    name: str
    chart_dim: int
    generators: tuple[VectorField, ...]
    full_frame: tuple[VectorField, ...]
    metric_label: str

    def frame_matrix(self, p) -> np.ndarray:
        return np.vstack([F(p) for F in self.full_frame])

    def coframe(self, p) -> np.ndarray:
        """Row ``i`` is the covector dual to ``full_frame[i]``."""
        M = self.frame_matrix(p)
        if M.shape[0] != self.chart_dim:
            raise ValueError(f"{self.name}: full frame is not a basis")
        return np.linalg.inv(M.T)

    def metric(self, p) -> np.ndarray:
        """Quadratic form ``sum alpha_i (x) alpha_i`` over the generator coframe."""
        A = self.coframe(p)[: len(self.generators)]
        return A.T @ A

    def cometric(self, p) -> np.ndarray:
        G = np.vstack([F(p) for F in self.generators])
        return G.T @ G

    def inner(self, p, u, v) -> float:
        return float(np.asarray(u) @ self.metric(p) @ np.asarray(v))


# --- the disc in R^2 x S^1 x S^1 -------------------------------------------


def disc4d() -> ControlSystem:
    Y1 = _const(4, "Y1", (0, 0, 1, 0))
    Y2 = _theta_field(4, "Y2", lambda t: (np.cos(t), np.sin(t), 0, 1), lambda t: (-np.sin(t), np.cos(t), 0, 0))
    Y12 = _theta_field(4, "Y12", lambda t: (-np.sin(t), np.cos(t), 0, 0), lambda t: (-np.cos(t), -np.sin(t), 0, 0))
    Y112 = _theta_field(4, "Y112", lambda t: (-np.cos(t), -np.sin(t), 0, 0), lambda t: (np.sin(t), -np.cos(t), 0, 0))
    return ControlSystem("disc4d", 4, (Y1, Y2), (Y1, Y2, Y12, Y112), "dtheta^2 + dphi^2 restricted")


def disc3d() -> ControlSystem:
    X1 = _const(3, "X1", (0, 0, 1))
    X2 = _theta_field(3, "X2", lambda t: (np.cos(t), np.sin(t), 0), lambda t: (-np.sin(t), np.cos(t), 0))
    X12 = _theta_field(3, "X12", lambda t: (-np.sin(t), np.cos(t), 0), lambda t: (-np.cos(t), -np.sin(t), 0))
    return ControlSystem("disc3d", 3, (X1, X2), (X1, X2, X12), "k")


def disc_metric_k(p) -> np.ndarray:
    """``k = dtheta^2 + (cos theta dx + sin theta dy)^2`` as a 3x3 tensor."""
    c, s = np.cos(p[TH]), np.sin(p[TH])
    return np.array([[c * c, c * s, 0.0], [c * s, s * s, 0.0], [0.0, 0.0, 1.0]])


def disc_contact_form(p) -> np.ndarray:
    """Annihilator ``cos theta dy - sin theta dx`` of the disc distribution."""
    return np.array([-np.sin(p[TH]), np.cos(p[TH]), 0.0])


# --- kinematic car ---------------------------------------------------------

SINGULAR_COS = 1e-9


def _cos_phi(p) -> float:
    c = np.cos(p[PHI])
    if abs(c) < SINGULAR_COS:
        raise ValueError(f"steering angle singular (cos phi = 0) at point {list(p)}")
    return c


def car(ell: float = 1.0) -> ControlSystem:
    """Car with steering angle phi as the fourth coordinate."""
    if ell <= 0:
        raise ValueError("car length must be positive")
    Z1 = _const(4, "Z1", (0, 0, 0, 1))

    def z2(p):
        c = _cos_phi(p)
        return (np.cos(p[TH]), np.sin(p[TH]), np.sin(p[PHI]) / (c * ell), 0.0)

    def z2_jac(p):
        c = _cos_phi(p)
        J = _zeros(4)
        J[X, TH], J[Y, TH] = -np.sin(p[TH]), np.cos(p[TH])
        J[TH, PHI] = 1 / (ell * c * c)
        return J

    def z12(p):
        c = _cos_phi(p)
        return (0.0, 0.0, 1 / (ell * c * c), 0.0)

    def z12_jac(p):
        c = _cos_phi(p)
        J = _zeros(4)
        J[TH, PHI] = 2 * np.sin(p[PHI]) / (ell * c**3)
        return J

    def z212(p):
        c = _cos_phi(p)
        f = 1 / (ell * c * c)
        return (np.sin(p[TH]) * f, -np.cos(p[TH]) * f, 0.0, 0.0)

    def z212_jac(p):
        c = _cos_phi(p)
        f = 1 / (ell * c * c)
        df = 2 * np.sin(p[PHI]) / (ell * c**3)
        J = _zeros(4)
        J[X, TH], J[Y, TH] = np.cos(p[TH]) * f, np.sin(p[TH]) * f
        J[X, PHI], J[Y, PHI] = np.sin(p[TH]) * df, -np.cos(p[TH]) * df
        return J

    Z2 = _vf(4, "Z2", z2, z2_jac)
    Z12 = _vf(4, "Z12", z12, z12_jac)
    Z212 = _vf(4, "Z212", z212, z212_jac)
    return ControlSystem("car", 4, (Z1, Z2), (Z1, Z2, Z12, Z212), "Z1, Z2 orthonormal")


def car_fixed_phi(ell: float = 1.0) -> ControlSystem:
    """The car with frozen front wheels: fields Zb1, Zb2 and their bracket."""
    if ell <= 0:
        raise ValueError("car length must be positive")
    Zb1 = _theta_field(3, "Zb1", lambda t: (np.cos(t), np.sin(t), 0), lambda t: (-np.sin(t), np.cos(t), 0))
    Zb2 = _theta_field(3, "Zb2", lambda t: (-np.sin(t), np.cos(t), -1 / ell), lambda t: (-np.cos(t), -np.sin(t), 0))
    Zb12 = _theta_field(
        3, "Zb12", lambda t: (-np.sin(t) / ell, np.cos(t) / ell, 0), lambda t: (-np.cos(t) / ell, -np.sin(t) / ell, 0)
    )
    return ControlSystem("car-fixed-phi", 3, (Zb1, Zb2), (Zb1, Zb2, Zb12), "Zb1, Zb2 orthonormal")


# --- Heisenberg approximation ----------------------------------------------


def heis_system() -> ControlSystem:
    n1 = _const(3, "n1", (0, 0, 1))

    def n2_jac(p):
        J = _zeros(3)
        J[Y, TH] = 1.0
        return J

    n2 = _vf(3, "n2", lambda p: np.array([1.0, p[TH], 0.0]), n2_jac)
    n3 = _const(3, "n3", (0, 1, 0))
    return ControlSystem("heisenberg", 3, (n1, n2), (n1, n2, n3), "r")


def heis_metric_r(p=None) -> np.ndarray:
    """``r = dx^2 + dtheta^2``."""
    return np.diag([1.0, 0.0, 1.0])


def heis_contact_form(p) -> np.ndarray:
    """``dy - theta dx``, annihilating n1 and n2."""
    return np.array([-p[TH], 1.0, 0.0])


def frame_coefficients(p, w) -> np.ndarray:
    """Coefficients ``(a1, a2, a3)`` of ``w`` in the frame (n1, n2, n3)."""
    w = np.asarray(w, dtype=float)
    return np.array([w[TH], w[X], w[Y] - p[TH] * w[X]])


def right_invariant_frame() -> tuple[VectorField, VectorField, VectorField]:
    def r1_jac(p):
        J = _zeros(3)
        J[Y, X] = 1.0
        return J

    R1 = _vf(3, "R1", lambda p: np.array([0.0, p[X], 1.0]), r1_jac)
    return R1, _const(3, "R2", (1, 0, 0)), _const(3, "R3", (0, 1, 0))


@dataclass(frozen=True)
class HeisenbergElement:
    theta: float
    x: float
    y: float

    def __post_init__(self):
        if not all(np.isfinite((self.theta, self.x, self.y))):
            raise ValueError("Heisenberg element with non-finite entries")

    @classmethod
    def from_point(cls, p) -> "HeisenbergElement":
        q = as_point(p, 3)
        return cls(float(q[TH]), float(q[X]), float(q[Y]))

    def to_point(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta])

    def __matmul__(self, other: "HeisenbergElement") -> "HeisenbergElement":
        return heis_mul(self, other)


IDENTITY = HeisenbergElement(0.0, 0.0, 0.0)


def heis_mul(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(g.theta + h.theta, g.x + h.x, g.y + h.y + g.theta * h.x)


def heis_inv(g: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(-g.theta, -g.x, -g.y + g.theta * g.x)


def left_translation(g: HeisenbergElement) -> Callable[[np.ndarray], np.ndarray]:
    """Point map ``p -> g p`` in chart order."""
    return lambda p: heis_mul(g, HeisenbergElement.from_point(p)).to_point()


def right_translation(g: HeisenbergElement) -> Callable[[np.ndarray], np.ndarray]:
    return lambda p: heis_mul(HeisenbergElement.from_point(p), g).to_point()


def coords_2nd_to_1st(p) -> np.ndarray:
    """``y -> y + theta x / 2``."""
    q = as_point(p, 3).copy()
    q[Y] += 0.5 * q[TH] * q[X]
    return q


def coords_1st_to_2nd(p) -> np.ndarray:
    q = as_point(p, 3).copy()
    q[Y] -= 0.5 * q[TH] * q[X]
    return q


SYSTEMS: dict[str, Callable[[], ControlSystem]] = {
    "disc4d": disc4d,
    "disc3d": disc3d,
    "car": car,
    "car-fixed-phi": car_fixed_phi,
    "heisenberg": heis_system,
}


def get_system(name: str, ell: float = 1.0) -> ControlSystem:
    try:
        factory = SYSTEMS[name]
    except KeyError:
        raise ValueError(f"unknown system {name!r}; choose from {sorted(SYSTEMS)}") from None
    return factory(ell) if name.startswith("car") else factory()
