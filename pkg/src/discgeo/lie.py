"""Exact finite-dimensional Lie algebras from structure constants.

Structure constants are stored sparsely with :class:`fractions.Fraction`
coefficients. ``c[i][j][k]`` is the coefficient of ``e_k`` in ``[e_i, e_j]``.
Indices are 0-based in code; the JSON exchange format is 1-based so that the
labels line up with the usual ``e_1, ..., e_n`` naming.

Adjoint convention: ``adjoint_matrix(a)[k][j]`` is the ``e_k`` coefficient of
``[a, e_j]``, i.e. column ``j`` holds ``[a, e_j]``. With a row vector of
vertical coordinates ``h`` the coadjoint equation reads ``dh/dt = h @ M``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import sympy

__all__ = [
    "AlgebraElement",
    "StructureConstants",
    "StructureError",
    "adjoint_matrix",
    "bracket",
    "disc_algebra",
    "disc4d_algebra",
    "format_element",
    "heisenberg_algebra",
    "is_nilpotent",
    "is_semisimple",
    "is_solvable",
    "killing_form",
    "killing_signature",
    "multiplication_table",
    "nullspace",
    "rank",
    "span_basis",
]


class StructureError(ValueError):
    """Structure constants violate antisymmetry, Jacobi or the grading."""

    def __init__(self, message: str, indices: tuple[int, ...] | None = None):
        super().__init__(message)
        self.indices = indices


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"exact coefficient expected, got {type(value).__name__}: {value!r}")


# --- exact linear algebra (sympy backs the elimination) ---------------------


def _to_sympy(rows: Sequence[Sequence], ncols: int | None = None) -> sympy.Matrix:
    if not rows:
        return sympy.zeros(0, ncols or 0)
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) if isinstance(x, Fraction) else x
                          for x in row] for row in rows])


def _from_sympy_vector(v) -> tuple[Fraction, ...]:
    return tuple(to_fraction(sympy.Rational(x)) for x in v)


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[tuple[Fraction, ...]]:
    """Exact kernel basis of the matrix with the given rows.

    The basis vectors are the reduced-echelon kernel vectors (free variable
    set to one, the other free variables zero).
    """
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    M = _to_sympy(rows)
    return [_from_sympy_vector(v) for v in M.nullspace()]


def span_basis(vectors: Iterable[Sequence[Fraction]], ncols: int) -> list[tuple[Fraction, ...]]:
    """Row-reduced basis of the span of ``vectors``."""
    rows = [list(v) for v in vectors if any(x != 0 for x in v)]
    if not rows:
        return []
    R, pivots = _to_sympy(rows).rref()
    return [_from_sympy_vector(R.row(i)) for i in range(len(pivots))]


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    return _to_sympy(rows).rank()


def solve_exact(columns: Sequence[Sequence[Fraction]], target: Sequence[Fraction]) -> tuple[Fraction, ...] | None:
    """Coefficients ``x`` with ``sum_k x_k columns[k] == target``, or None."""
    n = len(target)
    if not columns:
        return () if all(t == 0 for t in target) else None
    A = _to_sympy([[col[i] for col in columns] for i in range(n)])
    b = _to_sympy([[t] for t in target])
    try:
        sol, params = A.gauss_jordan_solve(b)
    except ValueError:
        return None
    if params.shape[0]:
        sol = sol.subs({p: 0 for p in params})
    return _from_sympy_vector(sol)


# --- structure constants -----------------------------------------------------

Sparse = dict[int, Fraction]


def _add_into(acc: Sparse, vec: Mapping[int, Fraction], scale: Fraction = Fraction(1)) -> None:
    for k, v in vec.items():
        s = acc.get(k, Fraction(0)) + scale * v
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """Bracket table of a Lie algebra, optionally graded.

    Validated on construction: antisymmetry, the Jacobi identity and (if a
    grading is given) ``deg[e_i, e_j] = deg e_i + deg e_j``.
    """

    dim: int
    brackets: Mapping[tuple[int, int], Mapping[int, Fraction]]
    labels: tuple[str, ...] = ()
    grading: tuple[int, ...] | None = None
    validate: bool = True

    def __post_init__(self):
        if self.dim < 1:
            raise StructureError("dimension must be positive")
        clean: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j), vec in self.brackets.items():
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise StructureError(f"bracket index out of range: {(i, j)}", (i, j))
            entry = {}
            for k, v in dict(vec).items():
                if not 0 <= k < self.dim:
                    raise StructureError(f"result index out of range: {k}", (i, j, k))
                v = to_fraction(v)
                if v:
                    entry[k] = v
            if entry:
                clean[(i, j)] = entry
        object.__setattr__(self, "brackets", clean)
        labels = tuple(self.labels) or tuple(f"e{i + 1}" for i in range(self.dim))
        if len(labels) != self.dim:
            raise StructureError("one label per basis element expected")
        object.__setattr__(self, "labels", labels)
        if self.grading is not None:
            grading = tuple(int(g) for g in self.grading)
            if len(grading) != self.dim:
                raise StructureError("one degree per basis element expected")
            object.__setattr__(self, "grading", grading)
        if self.validate:
            self.check()

    # construction helpers
    @classmethod
    def from_brackets(
        cls,
        dim: int,
        table: Mapping[tuple[int, int], Mapping[int, object]],
        labels: Sequence[str] = (),
        grading: Sequence[int] | None = None,
        one_based: bool = False,
    ) -> "StructureConstants":
        """Build from the nonzero brackets ``[e_i, e_j]`` with ``i != j``.

        Only one of each antisymmetric pair needs to be given; if both are
        given they must agree.
        """
        off = 1 if one_based else 0
        full: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j), vec in table.items():
            i0, j0 = i - off, j - off
            entry = {k - off: to_fraction(v) for k, v in vec.items()}
            entry = {k: v for k, v in entry.items() if v}
            neg = {k: -v for k, v in entry.items()}
            for key, val in (((i0, j0), entry), ((j0, i0), neg)):
                if key in full and full[key] != val:
                    raise StructureError(f"conflicting entries for bracket {key}", key)
                full[key] = val
        return cls(dim, full, tuple(labels), None if grading is None else tuple(grading))

    @classmethod
    def from_json(cls, doc: Mapping | str | Path) -> "StructureConstants":
        """Load ``{"dim": n, "brackets": [[i, j, [[k, "p/q"], ...]], ...], "grading": [...]}``.

        Indices are 1-based.
        """
        if isinstance(doc, (str, Path)):
            doc = json.loads(Path(doc).read_text())
        table: dict[tuple[int, int], dict[int, object]] = {}
        for i, j, terms in doc["brackets"]:
            entry = table.setdefault((int(i), int(j)), {})
            for k, coef in terms:
                entry[int(k)] = to_fraction(coef)
        return cls.from_brackets(int(doc["dim"]), table, doc.get("labels", ()), doc.get("grading"),
                                 one_based=True)

    def to_json(self) -> dict:
        entries = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                vec = self.brackets.get((i, j))
                if vec:
                    entries.append([i + 1, j + 1, [[k + 1, str(v)] for k, v in sorted(vec.items())]])
        doc = {"dim": self.dim, "labels": list(self.labels), "brackets": entries}
        if self.grading is not None:
            doc["grading"] = list(self.grading)
        return doc

    # queries
    def bracket_basis(self, i: int, j: int) -> dict[int, Fraction]:
        return dict(self.brackets.get((i, j), {}))

    def coefficient(self, i: int, j: int, k: int) -> Fraction:
        return self.brackets.get((i, j), {}).get(k, Fraction(0))

    @property
    def c(self) -> tuple[tuple[tuple[Fraction, ...], ...], ...]:
        """Dense three-index table ``c[i][j][k]``."""
        n = self.dim
        return tuple(tuple(tuple(self.coefficient(i, j, k) for k in range(n)) for j in range(n))
                     for i in range(n))

    def bracket_sparse(self, a: Mapping[int, Fraction], b: Mapping[int, Fraction]) -> Sparse:
        out: Sparse = {}
        for i, ai in a.items():
            for j, bj in b.items():
                vec = self.brackets.get((i, j))
                if vec:
                    _add_into(out, vec, ai * bj)
        return out

    def degree(self, i: int) -> int:
        if self.grading is None:
            raise StructureError("algebra carries no grading")
        return self.grading[i]

    def indices_of_degree(self, d: int) -> list[int]:
        return [i for i in range(self.dim) if self.degree(i) == d]

    def element(self, coeffs: Sequence) -> "AlgebraElement":
        return AlgebraElement(self, tuple(coeffs))

    def basis(self, i: int) -> "AlgebraElement":
        return AlgebraElement(self, tuple(Fraction(int(k == i)) for k in range(self.dim)))

    # validation
    def antisymmetry_violations(self) -> list[tuple[int, int]]:
        bad = []
        for (i, j), vec in self.brackets.items():
            if i == j:
                bad.append((i, j))
                continue
            other = self.brackets.get((j, i), {})
            if {k: -v for k, v in vec.items()} != other:
                bad.append((i, j))
        return bad

    def jacobi_violation(self, triples: Iterable[tuple[int, int, int]] | None = None) -> tuple[int, int, int] | None:
        """First triple ``(i, j, k)`` whose Jacobi sum is nonzero, or None."""
        if triples is None:
            triples = combinations(range(self.dim), 3)
        for i, j, k in triples:
            total: Sparse = {}
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                inner = self.brackets.get((b, c))
                if inner:
                    _add_into(total, self.bracket_sparse({a: Fraction(1)}, inner))
            if total:
                return (i, j, k)
        return None

    def grading_violations(self) -> list[tuple[int, int, int]]:
        if self.grading is None:
            return []
        g = self.grading
        return [(i, j, k) for (i, j), vec in self.brackets.items() for k in vec if g[k] != g[i] + g[j]]

    def check(self) -> None:
        bad = self.antisymmetry_violations()
        if bad:
            raise StructureError(f"antisymmetry fails for bracket {bad[0]}", bad[0])
        graded = self.grading_violations()
        if graded:
            raise StructureError(f"grading fails for {graded[0]}", graded[0])
        viol = self.jacobi_violation()
        if viol is not None:
            raise StructureError(f"Jacobi identity fails for triple {viol}", viol)

    def relabel(self, labels: Sequence[str]) -> "StructureConstants":
        return StructureConstants(self.dim, self.brackets, tuple(labels), self.grading, validate=False)

    def change_basis(self, P: Sequence[Sequence[Fraction]], labels: Sequence[str] = ()) -> "StructureConstants":
        """Structure constants in the basis ``f_j = sum_i P[i][j] e_i``."""
        n = self.dim
        Pm = _to_sympy([[to_fraction(x) for x in row] for row in P])
        if Pm.shape != (n, n) or Pm.det() == 0:
            raise StructureError("change of basis must be an invertible n x n matrix")
        Pinv = Pm.inv()
        cols = [{i: to_fraction(Pm[i, j]) for i in range(n) if Pm[i, j] != 0} for j in range(n)]
        table = {}
        for a in range(n):
            for b in range(a + 1, n):
                vec = self.bracket_sparse(cols[a], cols[b])
                if not vec:
                    continue
                x = Pinv * _to_sympy([[vec.get(i, Fraction(0))] for i in range(n)])
                table[(a, b)] = {k: to_fraction(x[k]) for k in range(n) if x[k] != 0}
        grading = None
        if self.grading is not None:
            grading = []
            for j in range(n):
                degs = {self.grading[i] for i in cols[j]}
                grading.append(degs.pop() if len(degs) == 1 else None)
            if None in grading:
                grading = None
        return StructureConstants.from_brackets(n, table, labels, grading)

    def equals(self, other: "StructureConstants") -> bool:
        return self.dim == other.dim and self.brackets == other.brackets


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Coordinates of an element in the basis of ``algebra``.

    Coefficients are exact fractions unless floats are supplied, in which case
    :attr:`exact` is False and all results are floating point.
    """

    algebra: StructureConstants
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.algebra.dim:
            raise ValueError(f"expected {self.algebra.dim} coefficients, got {len(self.coeffs)}")
        coeffs = tuple(x if isinstance(x, (float, np.floating)) else to_fraction(x) for x in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in self.coeffs)

    def _check(self, other: "AlgebraElement"):
        if other.algebra is not self.algebra and (other.algebra.dim != self.algebra.dim
                                                  or not other.algebra.equals(self.algebra)):
            raise ValueError("elements belong to different algebras")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "AlgebraElement":
        if not isinstance(scalar, (float, np.floating)):
            scalar = to_fraction(scalar)
        return AlgebraElement(self.algebra, tuple(scalar * a for a in self.coeffs))

    def __neg__(self) -> "AlgebraElement":
        return (-1) * self

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraElement) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.coeffs)

    def __str__(self) -> str:
        return format_element(self.coeffs, self.algebra.labels)


def bracket(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """``[a, b]_k = sum_ij a_i b_j c[i][j][k]``."""
    a._check(b)
    A = a.algebra
    exact = a.exact and b.exact
    out = [Fraction(0) if exact else 0.0] * A.dim
    for (i, j), vec in A.brackets.items():
        w = a.coeffs[i] * b.coeffs[j]
        if w:
            for k, v in vec.items():
                out[k] = out[k] + w * (v if exact else float(v))
    return AlgebraElement(A, tuple(out))


def adjoint_matrix(a: AlgebraElement) -> np.ndarray:
    """Matrix of ``ad(a)``; column ``j`` holds the coordinates of ``[a, e_j]``."""
    A = a.algebra
    M = np.empty((A.dim, A.dim), dtype=object if a.exact else float)
    for j in range(A.dim):
        M[:, j] = bracket(a, A.basis(j)).coeffs
    return M


def _ad_dense(A: StructureConstants, i: int) -> list[list[Fraction]]:
    n = A.dim
    M = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        for k, v in A.brackets.get((i, j), {}).items():
            M[k][j] = v
    return M


def _bracket_span(A: StructureConstants, left: list, right: list) -> list[tuple[Fraction, ...]]:
    vecs = []
    for u in left:
        su = {i: x for i, x in enumerate(u) if x}
        for v in right:
            sv = {i: x for i, x in enumerate(v) if x}
            w = A.bracket_sparse(su, sv)
            vecs.append(tuple(w.get(k, Fraction(0)) for k in range(A.dim)))
    return span_basis(vecs, A.dim)


def _identity(n: int) -> list[tuple[Fraction, ...]]:
    return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]


def derived_series(A: StructureConstants) -> list[int]:
    """Dimensions of g, [g,g], [[g,g],[g,g]], ... until stabilisation."""
    D = _identity(A.dim)
    dims = [A.dim]
    while D:
        nxt = _bracket_span(A, D, D)
        if len(nxt) == len(D):
            break
        D = nxt
        dims.append(len(D))
    return dims


def lower_central_series(A: StructureConstants) -> list[int]:
    g = _identity(A.dim)
    C = g
    dims = [A.dim]
    while C:
        nxt = _bracket_span(A, g, C)
        if len(nxt) == len(C):
            break
        C = nxt
        dims.append(len(C))
    return dims


def is_solvable(A: StructureConstants) -> bool:
    return derived_series(A)[-1] == 0


def is_nilpotent(A: StructureConstants) -> bool:
    return lower_central_series(A)[-1] == 0


def killing_form(A: StructureConstants) -> np.ndarray:
    """``K[i][j] = trace(ad e_i . ad e_j)`` as an object array of fractions."""
    n = A.dim
    ads = [np.array(_ad_dense(A, i), dtype=object) for i in range(n)]
    K = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(i, n):
            K[i, j] = K[j, i] = Fraction(np.sum(ads[i] * ads[j].T))
    return K


def killing_determinant(A: StructureConstants) -> Fraction:
    return to_fraction(_to_sympy(killing_form(A).tolist()).det())


def is_semisimple(A: StructureConstants) -> bool:
    return killing_determinant(A) != 0


def killing_signature(A: StructureConstants) -> tuple[int, int, int]:
    """(positive, negative, zero) eigenvalue counts of the Killing form.

    Exact: the Killing form is symmetric so all roots of its characteristic
    polynomial are real and Descartes' rule of signs counts them exactly.
    """
    lam = sympy.Symbol("lam")
    p = _to_sympy(killing_form(A).tolist()).charpoly(lam)
    coeffs = list(p.all_coeffs())

    def sign_changes(cs):
        signs = [c for c in cs if c != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))

    n = len(coeffs) - 1
    zero = 0
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
        zero += 1
    pos = sign_changes(coeffs)
    neg = sign_changes([c * (-1) ** (len(coeffs) - 1 - i) for i, c in enumerate(coeffs)])
    assert pos + neg + zero == n
    return pos, neg, zero


def format_element(coeffs: Sequence, labels: Sequence[str]) -> str:
    parts = []
    for c, lab in zip(coeffs, labels):
        if c == 0:
            continue
        if isinstance(c, Fraction) and c.denominator != 1:
            mag = f"({abs(c)})"
        else:
            mag = "" if abs(c) == 1 else f"{abs(c):g}" if isinstance(c, float) else str(abs(c))
        sign = "-" if c < 0 else "+"
        parts.append((sign, f"{mag}{lab}"))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, term in parts[1:]:
        out += f" {sign} {term}"
    return out


def multiplication_table(A: StructureConstants) -> str:
    """Plain-text table; row ``i``, column ``j`` shows ``[e_i, e_j]``."""
    labels = A.labels
    cells = [[format_element(A.c[i][j], labels) for j in range(A.dim)] for i in range(A.dim)]
    width = max([len(x) for row in cells for x in row] + [len(x) for x in labels])
    head = " " * width + " | " + " | ".join(lab.rjust(width) for lab in labels)
    lines = [head, "-" * len(head)]
    for lab, row in zip(labels, cells):
        lines.append(lab.rjust(width) + " | " + " | ".join(x.rjust(width) for x in row))
    return "\n".join(lines)


# --- algebras of the rolling disc --------------------------------------------


def disc_algebra() -> StructureConstants:
    """The controllability algebra of the 3D disc: [X1,X2]=X12, [X1,X12]=-X2."""
    return StructureConstants.from_brackets(
        3, {(0, 1): {2: 1}, (0, 2): {1: -1}}, labels=("X1", "X2", "X12"))


def disc4d_algebra() -> StructureConstants:
    """Controllability algebra of the 4D disc frame (Y1, Y2, Y12, Y112).

    [Y1,Y2]=Y12, [Y1,Y12]=Y112, [Y1,Y112]=-Y12, all other brackets vanish.
    """
    return StructureConstants.from_brackets(
        4, {(0, 1): {2: 1}, (0, 2): {3: 1}, (0, 3): {2: -1}}, labels=("Y1", "Y2", "Y12", "Y112"))


def heisenberg_algebra() -> StructureConstants:
    """[n1, n2] = n3 with grading (-1, -1, -2)."""
    return StructureConstants.from_brackets(
        3, {(0, 1): {2: 1}}, labels=("n1", "n2", "n3"), grading=(-1, -1, -2))


def car_fixed_phi_algebra() -> StructureConstants:
    """Frozen-steering car frame with unit length: [Zb1,Zb2]=Zb12, [Zb2,Zb12]=Zb1."""
    return StructureConstants.from_brackets(
        3, {(0, 1): {2: 1}, (1, 2): {0: 1}}, labels=("Zb1", "Zb2", "Zb12"))
