"""Algebraic Tanaka prolongation of a graded nilpotent algebra.

The input is ``m + g0`` where ``m = g^-mu + ... + g^-1`` is generated by
``g^-1`` and ``g0`` acts on ``m`` by grading-preserving derivations. Each step
adds ``g^{p+1}``: the degree ``p+1`` derivations ``u`` of ``m`` into the
algebra built so far, with ``[u, v] = u(v)`` for ``v`` in ``m``.

Everything is exact (``fractions.Fraction``).
"""

from __future__ import annotations

import importlib.resources
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np
import sympy

from . import lie
from .lie import StructureConstants, StructureError, nullspace, solve_exact
from .symmetry import polynomial_field, t_field
from .vecfield import (
    VectorField,
    bracket_field,
    constant_decomposition,
    numeric_structure_constants,
    sample_points,
)

Sparse = dict[int, Fraction]
ZERO = Fraction(0)


def _dense(vec: Sparse, n: int) -> list[Fraction]:
    return [vec.get(i, ZERO) for i in range(n)]


def _sparse(vec: Sequence[Fraction]) -> Sparse:
    return {i: Fraction(v) for i, v in enumerate(vec) if v}


@dataclass(frozen=True)
class GradedAlgebraState:
    """A graded algebra known through degree ``top``.

    Brackets whose degree would exceed ``top`` are not known yet and are
    stored as zero; ``complete`` is set once a step produced nothing.
    """

    algebra: StructureConstants
    top: int
    complete: bool = False

    def __post_init__(self):
        if self.algebra.grading is None:
            raise StructureError("a grading is required")

    @property
    def grading(self) -> tuple[int, ...]:
        return self.algebra.grading

    def indices(self, d: int) -> list[int]:
        return self.algebra.indices_of_degree(d)

    @property
    def min_degree(self) -> int:
        return min(self.grading)

    @property
    def negative(self) -> list[int]:
        return [i for i, g in enumerate(self.grading) if g < 0]

    def dims(self) -> tuple[int, ...]:
        return tuple(len(self.indices(d)) for d in range(self.min_degree, self.top + 1))

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def safe_triples(self) -> list[tuple[int, int, int]]:
        """Triples whose Jacobi identity only involves known brackets."""
        g = self.grading
        return [
            (i, j, k)
            for i, j, k in combinations(range(self.dim), 3)
            if g[i] + g[j] <= self.top and g[j] + g[k] <= self.top and g[i] + g[k] <= self.top
        ]

    def check(self) -> None:
        A = self.algebra
        bad = A.antisymmetry_violations()
        if bad:
            raise StructureError(f"antisymmetry fails at {bad[0]}", bad[0])
        bad = A.grading_violations()
        if bad:
            raise StructureError(f"grading violated at {bad[0]}", bad[0])
        viol = A.jacobi_violation(self.safe_triples())
        if viol is not None:
            raise StructureError(f"Jacobi identity fails for triple {viol}", viol)

    def check_generated(self) -> None:
        """The negative part must be generated by degree -1."""
        A = self.algebra
        for d in range(-2, self.min_degree - 1, -1):
            spans = [
                tuple(_dense(A.bracket_basis(i, j), A.dim))
                for i in self.indices(-1)
                for j in self.indices(d + 1)
            ]
            if lie.rank(spans) != len(self.indices(d)):
                raise StructureError(f"degree {d} is not generated by degree -1")


def with_degree_zero(
    m: StructureConstants, matrices: Sequence[Sequence[Sequence]], labels: Sequence[str] = ()
) -> GradedAlgebraState:
    """Attach ``g0`` given by matrices acting on ``g^-1``.

    ``matrices[a][i][j]`` is the coefficient of the ``i``-th degree -1 basis
    vector in the image of the ``j``-th. The action on lower degrees follows
    from the derivation rule; a matrix that is not a derivation, or a set that
    does not close under commutators, is rejected.
    """
    if m.grading is None or any(g >= 0 for g in m.grading):
        raise StructureError("m must be negatively graded")
    n = m.dim
    neg1 = m.indices_of_degree(-1)
    maps = []
    for M in matrices:
        M = [[Fraction(x) for x in row] for row in M]
        if len(M) != len(neg1) or any(len(r) != len(neg1) for r in M):
            raise StructureError("degree-zero matrices must be square on g^-1")
        D: dict[int, Sparse] = {j: _sparse([ZERO] * n) for j in range(n)}
        for col, j in enumerate(neg1):
            D[j] = {neg1[r]: M[r][col] for r in range(len(neg1)) if M[r][col]}
        maps.append(_extend_derivation(m, D))
    k = len(maps)
    dim = n + k
    grading = tuple(m.grading) + (0,) * k
    labs = tuple(m.labels) + (tuple(labels) or tuple(f"L0_{a + 1}" for a in range(k)))
    table: dict[tuple[int, int], Sparse] = {}
    for (i, j), v in m.brackets.items():
        table[(i, j)] = dict(v)
    for a, D in enumerate(maps):
        for j in range(n):
            if D[j]:
                table[(n + a, j)] = dict(D[j])
                table[(j, n + a)] = {t: -c for t, c in D[j].items()}
    # commutators inside g0, matched through the action on m
    columns = [[c for j in range(n) for c in _dense(D[j], n)] for D in maps]
    for a, b in combinations(range(k), 2):
        comm = []
        for j in range(n):
            ab = _apply(maps[a], maps[b][j])
            ba = _apply(maps[b], maps[a][j])
            comm += _dense({t: ab.get(t, ZERO) - ba.get(t, ZERO) for t in set(ab) | set(ba)}, n)
        x = solve_exact(columns, comm) if any(comm) else tuple([ZERO] * k)
        if x is None:
            raise StructureError(f"degree-zero part does not close: commutator of {a + 1} and {b + 1}")
        vec = {n + c: v for c, v in enumerate(x) if v}
        if vec:
            table[(n + a, n + b)] = vec
            table[(n + b, n + a)] = {t: -c for t, c in vec.items()}
    A = StructureConstants(dim, table, labs, grading)
    return GradedAlgebraState(A, 0)


def _apply(D: dict[int, Sparse], v: Sparse) -> Sparse:
    out: Sparse = {}
    for i, c in v.items():
        for t, d in D.get(i, {}).items():
            out[t] = out.get(t, ZERO) + c * d
    return {t: c for t, c in out.items() if c}


def _extend_derivation(m: StructureConstants, D: dict[int, Sparse]) -> dict[int, Sparse]:
    """Extend a map given on degree -1 to all of ``m`` as a derivation."""
    n = m.dim
    D = {j: dict(v) for j, v in D.items()}
    for d in range(-2, min(m.grading) - 1, -1):
        idx = m.indices_of_degree(d)
        # unknown matrix entries D[t][s] for s, t in idx
        unknowns = [(s, t) for s in idx for t in idx]
        pos = {st: u for u, st in enumerate(unknowns)}
        rows, rhs = [], []
        for i in m.indices_of_degree(-1):
            for j in m.indices_of_degree(d + 1):
                vw = m.bracket_basis(i, j)
                lhs = _add(m.bracket_sparse(D[i], {j: Fraction(1)}), m.bracket_sparse({i: Fraction(1)}, D[j]))
                for t in idx:
                    row = [ZERO] * len(unknowns)
                    for s, c in vw.items():
                        row[pos[(s, t)]] += c
                    rows.append(row)
                    rhs.append(lhs.get(t, ZERO))
                if any(t not in idx for t in lhs):
                    raise StructureError("degree-zero map does not preserve the grading")
        x = solve_exact(list(zip(*rows)) if rows else [], rhs) if rows else tuple([ZERO] * len(unknowns))
        if x is None:
            raise StructureError("degree-zero map is not a derivation of m")
        for (s, t), v in zip(unknowns, x):
            if v:
                D.setdefault(s, {})[t] = v
    return D


def _add(a: Sparse, b: Sparse, scale: Fraction = Fraction(1)) -> Sparse:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, ZERO) + scale * v
    return {k: v for k, v in out.items() if v}


def prolong_step(G: GradedAlgebraState) -> GradedAlgebraState:
    """Compute ``g^{p+1}`` and return the enlarged algebra."""
    if G.complete:
        return G
    A = G.algebra
    n = A.dim
    q = G.top + 1
    neg = G.negative
    # unknowns: u(e_j) in g^{deg e_j + q} for each negative e_j
    slots = [(j, t) for j in neg for t in G.indices(A.degree(j) + q)]
    pos = {s: k for k, s in enumerate(slots)}
    rows = []
    for a, i in enumerate(neg):
        for j in neg[a + 1 :]:
            # u([e_i, e_j]) - [u(e_i), e_j] - [e_i, u(e_j)] = 0, componentwise
            comps: dict[int, list[Fraction]] = {}

            def row_for(target):
                if target not in comps:
                    comps[target] = [ZERO] * len(slots)
                return comps[target]

            for s, c in A.bracket_basis(i, j).items():
                for t in G.indices(A.degree(s) + q):
                    row_for(t)[pos[(s, t)]] += c
            for t in G.indices(A.degree(i) + q):
                for r, c in A.bracket_basis(t, j).items():
                    row_for(r)[pos[(i, t)]] -= c
            for t in G.indices(A.degree(j) + q):
                for r, c in A.bracket_basis(i, t).items():
                    row_for(r)[pos[(j, t)]] -= c
            rows.extend(comps.values())
    basis = nullspace(rows, len(slots)) if slots else []
    if not basis:
        return GradedAlgebraState(A, G.top, complete=True)

    k = len(basis)
    dim = n + k
    new = list(range(n, dim))
    table: dict[tuple[int, int], Sparse] = {key: dict(v) for key, v in A.brackets.items()}
    actions: list[dict[int, Sparse]] = []
    for b in basis:
        act: dict[int, Sparse] = {}
        for (j, t), c in zip(slots, b):
            if c:
                act.setdefault(j, {})[t] = c
        actions.append(act)
    for u, act in zip(new, actions):
        for j in neg:
            v = act.get(j, {})
            if v:
                table[(u, j)] = dict(v)
                table[(j, u)] = {t: -c for t, c in v.items()}
    grading = tuple(A.grading) + (q,) * k
    labels = tuple(A.labels) + tuple(f"L{q}_{a + 1}" for a in range(k))
    B = StructureConstants(dim, table, labels, grading, validate=False)

    # brackets [x, y] with deg x + deg y = q, both non-negative
    columns = [[c for j in neg for c in _dense(act.get(j, {}), dim)] for act in actions]
    for x in range(dim):
        for y in range(x + 1, dim):
            dx, dy = grading[x], grading[y]
            if dx < 0 or dy < 0 or dx + dy != q:
                continue
            target = []
            for v in neg:
                xv = B.bracket_basis(x, v)
                yv = B.bracket_basis(y, v)
                val = _add(B.bracket_sparse({x: Fraction(1)}, yv), B.bracket_sparse({y: Fraction(1)}, xv), Fraction(-1))
                target += _dense(val, dim)
            if not any(target):
                continue
            sol = solve_exact(columns, target)
            if sol is None:
                raise StructureError(f"bracket of {labels[x]} and {labels[y]} does not close in degree {q}", (x, y))
            vec = {new[a]: c for a, c in enumerate(sol) if c}
            table[(x, y)] = vec
            table[(y, x)] = {t: -c for t, c in vec.items()}
    out = GradedAlgebraState(StructureConstants(dim, table, labels, grading, validate=False), q)
    out.check()
    return out


def prolong(G: GradedAlgebraState, max_depth: int) -> GradedAlgebraState:
    """Prolong until a step is trivial or degree ``max_depth`` is reached."""
    G.check()
    while not G.complete and G.top < max_depth:
        G = prolong_step(G)
    return G


# --- bundled data ------------------------------------------------------------


def _data(name: str) -> dict:
    return json.loads(importlib.resources.files("discgeo.data").joinpath(name).read_text())


def load_fixture(name: str = "heisenberg_lagrangian.json") -> StructureConstants:
    return StructureConstants.from_json(_data(name))


def fixture_state(name: str = "heisenberg_lagrangian.json") -> GradedAlgebraState:
    A = load_fixture(name)
    return GradedAlgebraState(A, max(0, max(A.grading)))


def sl3_table() -> StructureConstants:
    """The eight-dimensional graded algebra ``e1..e8`` (corrected table)."""
    return load_fixture("sl3_graded.json")


def heisenberg_m() -> StructureConstants:
    """``m`` in the ordering (n3, n1, n2) used by the prolongation fixture."""
    return StructureConstants.from_brackets(3, {(1, 2): {0: 1}}, ("n3", "n1", "n2"), (-2, -1, -1))


GL2 = (
    ((1, 0), (0, 1)),
    ((1, 0), (0, -1)),
    ((0, 1), (1, 0)),
    ((0, 1), (-1, 0)),
)


# --- matching against a reference table --------------------------------------


def match_basis(computed: StructureConstants, reference: StructureConstants) -> list[list[Fraction]] | None:
    """Find ``P`` with ``computed.change_basis(P) == reference``.

    Negative degrees are identified directly (same positions); each
    non-negative reference element is located through its action on ``m``,
    degree by degree. Returns ``None`` if no such graded basis change exists.
    """
    if computed.dim != reference.dim or computed.grading != reference.grading:
        return None
    n = computed.dim
    g = computed.grading
    neg = [i for i in range(n) if g[i] < 0]
    P = [[ZERO] * n for _ in range(n)]
    for i in neg:
        P[i][i] = Fraction(1)

    def image(vec: Sparse) -> Sparse:
        out: Sparse = {}
        for k, c in vec.items():
            for i in range(n):
                if P[i][k]:
                    out[i] = out.get(i, ZERO) + c * P[i][k]
        return {i: c for i, c in out.items() if c}

    for d in range(0, max(g) + 1):
        cand = [i for i in range(n) if g[i] == d]
        cols = [[c for v in neg for c in _dense(computed.bracket_basis(i, v), n)] for i in cand]
        for r in reference.indices_of_degree(d):
            target = [c for v in neg for c in _dense(image(reference.bracket_basis(r, v)), n)]
            sol = solve_exact(cols, target)
            if sol is None:
                return None
            for i, c in zip(cand, sol):
                P[i][r] = c
    if sympy.Matrix(P).det() == 0:
        return None
    try:
        matched = computed.change_basis(P, reference.labels)
    except StructureError:
        return None
    return P if matched.equals(reference) else None


# --- geometric realization ---------------------------------------------------

_x, _y, _th = sympy.symbols("x y theta", real=True)
_alpha = sympy.Symbol("alpha", real=True)

REALIZATION_EXPRS = {
    "Y_e1": (0, 1, 0),
    "Y_e2": (0, _x, 1),
    "Y_e3": (1, 0, 0),
    "Y_e4": (_x, 2 * _y, _th),
    "Y_e5": (-_x, 0, _th),
    "Y_e6": (-2 * _y, 0, 2 * _th**2),
    "Y_e7": (2 * _x**2, 2 * _x * _y, 2 * _y - _alpha * _x * _th),
    "Y_e8": (2 * _x * _y, 2 * _y**2, 2 * _y * _th - 2 * _x * _th**2),
}
PRINTED_ALPHA = 1
T_PARTNER = ("t3", "t2", "t1", "t4", "t5", "t6", "t7", "t8")


def _ye7(alpha: float) -> VectorField:
    return polynomial_field("Y_e7", [sympy.sympify(c).subs(_alpha, alpha) for c in REALIZATION_EXPRS["Y_e7"]])


def resolve_ye7_coefficient(points=None) -> tuple[float, float, float]:
    """Solve ``[Y_e2, Y_e7] = 0`` (table entry ``[e2, e7] = 0``) for the ``x theta`` coefficient.

    The bracket is affine in the coefficient, so two evaluations determine it.
    Returns ``(alpha, residual at alpha, residual of the printed value)``.
    """
    pts = sample_points(3, 20) if points is None else points
    Y2 = polynomial_field("Y_e2", REALIZATION_EXPRS["Y_e2"])

    def br(a):
        return np.concatenate([bracket_field(Y2, _ye7(a))(p) for p in pts])

    b0, b1 = br(0.0), br(1.0) - br(0.0)
    alpha = float(-(b1 @ b0) / (b1 @ b1))
    return alpha, float(np.max(np.abs(br(alpha)))), float(np.max(np.abs(br(PRINTED_ALPHA))))


def realization_fields(alpha: float | None = None) -> list[VectorField]:
    """``Y_e1 .. Y_e8``; the ``Y_e7`` coefficient is resolved when not given."""
    if alpha is None:
        alpha = round(resolve_ye7_coefficient()[0], 9)
    out = []
    for name, comps in REALIZATION_EXPRS.items():
        out.append(_ye7(alpha) if name == "Y_e7" else polynomial_field(name, comps))
    return out


def realization_structure(points=None) -> tuple[np.ndarray, float]:
    """Numeric ``c[i, j, k]`` of the realization fields and the worst residual."""
    pts = sample_points(3, 10) if points is None else points
    return numeric_structure_constants(realization_fields(), pts)


def realization_multiples(points=None) -> list[tuple[str, str, float, float]]:
    """For each ``Y_ei`` the constant ``c`` with ``Y_ei = c t_k`` and the fit residual."""
    pts = sample_points(3, 10) if points is None else points
    out = []
    for Y, t in zip(realization_fields(), T_PARTNER):
        c, res = constant_decomposition(Y, [t_field(t)], pts)
        out.append((Y.label, t, float(c[0]), res))
    return out


def report(G: GradedAlgebraState) -> dict:
    A = G.algebra
    return {
        "degrees": list(range(G.min_degree, G.top + 1)),
        "dims": list(G.dims()),
        "total_dim": A.dim,
        "complete": G.complete,
        "killing_determinant": str(lie.killing_determinant(A)),
        "semisimple": lie.is_semisimple(A),
        "structure_constants": A.to_json(),
    }
