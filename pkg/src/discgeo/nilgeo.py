"""Closed-form geodesics of the Heisenberg approximation.

Geodesics start at the origin; any other start point is reached by left
translation in the group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import HeisenbergElement, heis_mul

DEGENERATE_TOL = 1e-9
_SERIES_CUTOFF = 1e-2


@dataclass(frozen=True)
class VerticalConstants:
    C1: float
    C2: float
    C3: float
    degenerate: bool

    @classmethod
    def of(cls, C1: float, C2: float, C3: float) -> "VerticalConstants":
        return cls(float(C1), float(C2), float(C3), abs(C1) < DEGENERATE_TOL)


class DegenerateGeodesic(ValueError):
    pass


def constants_from_initial(h1: float, h2: float, h3: float) -> VerticalConstants:
    """Constants with ``h(0) = (h1, h2, h3)``.

    In the degenerate branch (``h3 = 0``) the vertical data are constant and
    the constants are ``(h1, h2, 0)``.
    """
    if abs(h3) < DEGENERATE_TOL:
        return VerticalConstants(float(h1), float(h2), 0.0, True)
    return VerticalConstants(float(h3), 0.0 - float(h2), float(h1), False)


def eval_vertical(C: VerticalConstants, t):
    t = np.asarray(t, dtype=float)
    if C.degenerate:
        return np.full_like(t, C.C1), np.full_like(t, C.C2), np.zeros_like(t)
    u = C.C1 * t
    su, cu = np.sin(u), np.cos(u)
    return C.C2 * su + C.C3 * cu, C.C3 * su - C.C2 * cu, np.full_like(t, C.C1)


def _s(v):
    """``v - sin v`` without cancellation for small ``v``."""
    v = np.asarray(v, dtype=float)
    flat = np.atleast_1d(v)
    out = flat - np.sin(flat)
    small = np.abs(flat) < _SERIES_CUTOFF
    if np.any(small):
        w = flat[small]
        w2 = w * w
        out[small] = w * w2 / 6 * (1 - w2 / 20 * (1 - w2 / 42 * (1 - w2 / 72)))
    return out.reshape(v.shape)


def eval_horizontal(C: VerticalConstants, t):
    """``(x, y, theta)`` at time ``t`` (scalar or array), starting at the origin."""
    t = np.asarray(t, dtype=float)
    if C.degenerate:
        return C.C2 * t, 0.5 * C.C2 * C.C1 * t * t, C.C1 * t
    C1, C2, C3 = C.C1, C.C2, C.C3
    u = C1 * t
    su, cu = np.sin(u), np.cos(u)
    one_minus_cos = 2 * np.sin(u / 2) ** 2
    x = (C3 * one_minus_cos - C2 * su) / C1
    th = (C2 * one_minus_cos + C3 * su) / C1
    # y = int theta h2 dt, grouped so that every term is O(u^3) for small u
    y = (C2 * C2 * (4 * _s(u) - _s(2 * u)) + C3 * C3 * _s(2 * u) - 4 * C2 * C3 * cu * one_minus_cos) / (4 * C1 * C1)
    return x, y, th


def eval_state(C: VerticalConstants, t) -> np.ndarray:
    """Full states ``(x, y, theta, h1, h2, h3)`` as rows."""
    return np.column_stack([np.atleast_1d(a) for a in (*eval_horizontal(C, t), *eval_vertical(C, t))])


def is_arclength(C: VerticalConstants, tol: float = 1e-12) -> bool:
    r2 = C.C1**2 + C.C2**2 if C.degenerate else C.C2**2 + C.C3**2
    return abs(r2 - 1.0) <= tol


def _check_cut(C: VerticalConstants) -> None:
    if C.degenerate or C.C1 == 0:
        raise DegenerateGeodesic("degenerate geodesic: a straight line without cut point")
    if C.C2 == 0 and C.C3 == 0:
        raise DegenerateGeodesic("C2 = C3 = 0: the curve stays in the fixed-point set")


def cut_time(C: VerticalConstants) -> float:
    _check_cut(C)
    return 2 * math.pi / abs(C.C1)


def cut_point(C: VerticalConstants) -> np.ndarray:
    _check_cut(C)
    return np.array([0.0, math.pi * (C.C2**2 + C.C3**2) / (C.C1 * abs(C.C1)), 0.0])


def translation_offset(b1: float, b2: float, b3: float, s: float) -> np.ndarray:
    """Image of the origin under the flow of ``b1 t1 + b2 t2 + b3 t3``."""
    return np.array([b1 * s, 0.5 * b1 * b2 * s * s + b3 * s, b2 * s])


def translated_geodesic(C: VerticalConstants, b1: float, b2: float, b3: float, s: float, t) -> np.ndarray:
    """The geodesic moved by the translation flow, via the closed form."""
    x, y, th = (np.asarray(a, dtype=float) for a in eval_horizontal(C, t))
    ox, oy, oth = translation_offset(b1, b2, b3, s)
    return np.stack([x + ox, y + oy + oth * x, th + oth], axis=-1)


def translated_geodesic_group(C: VerticalConstants, b1: float, b2: float, b3: float, s: float, t) -> np.ndarray:
    """Same curve obtained pointwise by left multiplication in the group."""
    g = HeisenbergElement.from_point(translation_offset(b1, b2, b3, s))
    x, y, th = (np.atleast_1d(np.asarray(a, dtype=float)) for a in eval_horizontal(C, t))
    pts = [heis_mul(g, HeisenbergElement(a, b, c)).to_point() for b, c, a in zip(x, y, th)]
    out = np.array(pts)
    return out[0] if np.ndim(t) == 0 else out


def geodesic_from(start, h1: float, h2: float, h3: float, t) -> np.ndarray:
    """Geodesic with initial covector ``h`` starting at ``start`` (chart order)."""
    C = constants_from_initial(h1, h2, h3)
    g = HeisenbergElement.from_point(start)
    x, y, th = (np.atleast_1d(np.asarray(a, dtype=float)) for a in eval_horizontal(C, t))
    return np.array([heis_mul(g, HeisenbergElement(a, b, c)).to_point() for b, c, a in zip(x, y, th)])
