"""The twelve acceptance criteria, each at its stated tolerance.

Every check returns ``(passed, detail)``. Under pytest one PASS/FAIL line per
criterion is printed in the terminal summary; ``python tests/test_acceptance.py``
prints the same lines directly.
"""

import math
import sys

import numpy as np
import pytest
from scipy.optimize import brentq

from discgeo import extremal, lie, models, nilgeo, symmetry, tanaka
from discgeo.cli import compare_curves
from discgeo.vecfield import jacobi_matrix, numeric_structure_constants, pushforward, sample_points

EX1 = (0.5, math.sqrt(3) / 2, 2.0)
EX2 = (0.5, math.sqrt(3) / 2, 20.0)
SEED = 20240917


def exact_array(A):
    n = A.dim
    return np.array([[[float(A.coefficient(i, j, k)) for k in range(n)] for j in range(n)] for i in range(n)])


def closed_form_fd_residual(C, times, h=1e-6):
    S = lambda t: nilgeo.eval_state(C, t)
    d = (S(times + h) - S(times - h)) / (2 * h)
    rhs = np.array([extremal.rhs_nilpotent(s) for s in S(times)])
    return float(np.max(np.abs(d - rhs)))


def criterion_1():
    pts4, pts3 = sample_points(4, 100, SEED), sample_points(3, 100, SEED)
    d4 = max(abs(np.linalg.det(jacobi_matrix(models.disc4d().full_frame, p)) - 1) for p in pts4)
    d3 = max(abs(np.linalg.det(jacobi_matrix(models.disc3d().full_frame, p)) - 1) for p in pts3)
    return d4 <= 1e-9 and d3 <= 1e-9, f"max |det-1|: 4x4 {d4:.2e}, 3x3 {d3:.2e}"


def criterion_2():
    cases = [
        ("disc", models.disc3d().full_frame, lie.disc_algebra(), 3),
        ("Y", models.disc4d().full_frame, lie.disc4d_algebra(), 4),
        ("Zbar", models.car_fixed_phi(1.0).full_frame, lie.car_fixed_phi_algebra(), 3),
        ("n", models.heis_system().full_frame, lie.heisenberg_algebra(), 3),
    ]
    worst = 0.0
    for _, frame, A, dim in cases:
        c, res = numeric_structure_constants(frame, sample_points(dim, 20, SEED))
        worst = max(worst, res, float(np.max(np.abs(c - exact_array(A)))))
    K, M = lie.disc_algebra(), lie.heisenberg_algebra()
    queries = (lie.is_solvable(K), lie.is_nilpotent(K), lie.is_solvable(M), lie.is_nilpotent(M))
    ok = worst <= 1e-6 and queries == (True, False, True, True)
    return ok, f"max deviation {worst:.2e}; k solvable/nilpotent {queries[:2]}, m {queries[2:]}"


def criterion_3():
    rng = np.random.default_rng(SEED)
    Cs = [nilgeo.constants_from_initial(*EX1)]
    while len(Cs) < 21:
        c1 = rng.uniform(-3, 3)
        if abs(c1) > 0.1:
            Cs.append(nilgeo.VerticalConstants.of(c1, rng.uniform(-2, 2), rng.uniform(-2, 2)))
    worst = max(closed_form_fd_residual(C, np.linspace(0, 2 * math.pi / abs(C.C1), 100)) for C in Cs)
    return worst <= 1e-6, f"max residual {worst:.2e} over {len(Cs)} constant sets"


def criterion_4():
    s0 = extremal.make_state(0, 0, 0, *EX1)
    o = extremal.integrate_rkf45(extremal.ORIGINAL, s0, math.pi, grid=201).diagnostics
    n = extremal.integrate_rkf45(extremal.NILPOTENT, s0, math.pi, grid=201).diagnostics
    ok = o.hamiltonian_drift <= 1e-8 and o.casimir_drift <= 1e-8 and n.casimir_drift <= 1e-10
    return ok, f"original dH {o.hamiltonian_drift:.1e}, d(h3^2-h1^2) {o.casimir_drift:.1e}; nilpotent dh3 {n.casimir_drift:.1e}"


def criterion_5():
    gaps = [compare_curves(EX2, math.pi / k, 201)[2] for k in (5, 10, 20)]
    ratios = [gaps[i] / gaps[i + 1] for i in range(2)]
    return all(r >= 2 for r in ratios), "gaps " + ", ".join(f"{g:.3e}" for g in gaps) + "; ratios " + ", ".join(f"{r:.3f}" for r in ratios)


def criterion_6():
    C = nilgeo.constants_from_initial(*EX1)
    x = lambda t: float(nilgeo.eval_horizontal(C, t)[0])
    th = lambda t: float(nilgeo.eval_horizontal(C, t)[2])
    grid = np.linspace(1e-3, 4 * math.pi, 4001)
    vals = [x(t) for t in grid]
    t_star = None
    for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]):
        if fa * fb < 0:
            r = brentq(x, a, b, xtol=1e-14)
            if abs(th(r)) < 1e-8:
                t_star = r
                break
    if t_star is None:
        return False, "no common zero of x and theta found"
    y = float(nilgeo.eval_horizontal(C, t_star)[1])
    ok = abs(t_star - math.pi) <= 1e-6 and abs(y - math.pi / 4) <= 1e-6
    return ok, f"t* - pi = {t_star - math.pi:.1e}, y(t*) - pi/4 = {y - math.pi / 4:.1e}"


def criterion_7():
    pts = sample_points(3, 50, SEED)
    met = max(symmetry.verify_symmetry(symmetry.t_field(f"t{i}"), s, pts) for i in range(4) for s in ("N", "r"))
    ef = max(symmetry.verify_symmetry(symmetry.t_field(f"t{i}"), "E+F", pts) for i in range(1, 9))
    not_r = [symmetry.verify_symmetry(symmetry.t_field(f"t{i}"), "r", pts) for i in range(4, 9)]
    ok = met <= 1e-8 and ef <= 1e-8 and min(not_r) > 1e-2
    return ok, f"t0..t3 (N,r) {met:.1e}; t1..t8 E+F {ef:.1e}; t4..t8 vs r min {min(not_r):.2f}"


def criterion_8():
    C = nilgeo.constants_from_initial(*EX1)
    times = np.linspace(0, math.pi, 201)
    h = 1e-6
    worst_res, worst_start, worst_end = 0.0, 0.0, 0.0
    for s in (0.3, 1.0, 2.0):
        T = symmetry.flow_closed_form("t0", s)
        curve = lambda t: np.array([T(q) for q in np.column_stack(nilgeo.eval_horizontal(C, t))])
        inner = times[1:-1]
        d = (curve(inner + h) - curve(inner - h)) / (2 * h)
        h1, h2, _ = nilgeo.eval_vertical(symmetry.t0_image_constants(C, s), inner)
        pts = curve(inner)
        res = np.max(np.abs(d - np.column_stack([h2, pts[:, 2] * h2, h1])))
        full = curve(times)
        worst_res = max(worst_res, float(res))
        worst_start = max(worst_start, float(np.max(np.abs(full[0]))))
        worst_end = max(worst_end, float(np.max(np.abs(full[-1] - [0, math.pi / 4, 0]))))
    ok = worst_res <= 1e-6 and worst_start <= 1e-12 and worst_end <= 1e-10
    return ok, f"ODE residual {worst_res:.1e}; start {worst_start:.1e}; end vs (0,pi/4,0) {worst_end:.1e}"


def criterion_9():
    s = 1.0
    T = symmetry.flow_closed_form("t6", s)
    n1, n2, _ = models.heis_system().full_frame
    rng = np.random.default_rng(SEED)
    pts = []
    while len(pts) < 20:
        p = rng.uniform(-1, 1, 3)
        if T.admissible(p) and T.inverted().admissible(p):
            pts.append(p)
    # both transport directions; the expected factors use w at the evaluation point
    out = {}
    for name, (fwd, inv) in {"pullback": (T.inverse, T.forward), "pushforward": (T.forward, T.inverse)}.items():
        P1, P2 = pushforward(fwd, inv, n1), pushforward(fwd, inv, n2)
        e1 = max(np.max(np.abs(P1(p) - (s * p[2] + 2) ** 2 / 4 * n1(p))) for p in pts)
        e2 = max(np.max(np.abs(P2(p) + 2 / (s * p[2] + 2) * n2(p))) for p in pts)
        out[name] = (e1, e2)
    ok = any(e1 <= 1e-6 and e2 <= 1e-6 for e1, e2 in out.values())
    detail = "; ".join(f"{k}: n1 err {a:.1e}, n2 err {b:.1e}" for k, (a, b) in out.items())
    return ok, detail + " (n2 scales by +2/w, not -2/w)" if not ok else detail


def criterion_10():
    G = tanaka.prolong(tanaka.fixture_state(), 2)
    A = G.algebra
    det = lie.killing_determinant(A)
    P = tanaka.match_basis(A, tanaka.sl3_table())
    step3 = tanaka.prolong_step(G)
    new3 = step3.dim - G.dim
    ok = G.dims() == (1, 2, 2, 2, 1) and A.dim == 8 and det != 0 and P is not None and new3 == 0
    return ok, f"dims {G.dims()}, total {A.dim}, Killing det {det}, table match {P is not None}, degree-3 dim {new3}"


def criterion_11():
    a1, a2 = symmetry.degree_zero_action()
    A1, A2 = symmetry.rationalize(a1), symmetry.rationalize(a2)
    expected = ([[-1, 0], [0, -1]], [[1, 0], [0, -1]])
    kernel = symmetry.invariant_symmetric_forms([A1, A2])
    ok = (A1, A2) == expected and kernel == []
    return ok, f"a1 {[[int(v) for v in r] for r in A1]}, a2 {[[int(v) for v in r] for r in A2]}, kernel dim {len(kernel)}"


def criterion_12():
    rng = np.random.default_rng(SEED)
    H = models.HeisenbergElement
    worst = 0.0
    for _ in range(1000):
        a, b, c = (H(*rng.uniform(-10, 10, 3)) for _ in range(3))
        worst = max(worst, float(np.max(np.abs(((a @ b) @ c).to_point() - (a @ (b @ c)).to_point()))))
    inv_res = 0.0
    for g in (H(*rng.uniform(-2, 2, 3)) for _ in range(10)):
        L, Li = models.left_translation(g), models.left_translation(models.heis_inv(g))
        for F in models.heis_system().full_frame:
            PF = pushforward(L, Li, F)
            inv_res = max(inv_res, max(float(np.max(np.abs(PF(q) - F(q)))) for q in sample_points(3, 10, SEED)))
    ok = worst <= 1e-12 and inv_res <= 1e-6
    return ok, f"associativity {worst:.1e}; left-invariance residual {inv_res:.1e}"


CRITERIA = {
    1: ("controllability determinants", criterion_1),
    2: ("bracket tables", criterion_2),
    3: ("closed-form verification", criterion_3),
    4: ("conservation", criterion_4),
    5: ("approximation quality", criterion_5),
    6: ("cut point", criterion_6),
    7: ("symmetry residuals", criterion_7),
    8: ("orbit invariance", criterion_8),
    9: ("pushforward factors", criterion_9),
    10: ("Tanaka prolongation", criterion_10),
    11: ("no invariant metric", criterion_11),
    12: ("group law", criterion_12),
}


def line(n, name, ok, detail):
    return f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {name}: {detail}"


@pytest.mark.parametrize("n", list(CRITERIA))
def test_criterion(n, record_property):
    name, fn = CRITERIA[n]
    ok, detail = fn()
    record_property("acceptance", line(n, name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, (name, fn) in CRITERIA.items():
        ok, detail = fn()
        failed += not ok
        print(line(n, name, ok, detail))
    sys.exit(1 if failed else 0)
