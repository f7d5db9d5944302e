import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discgeo import models
from discgeo.models import HeisenbergElement as H
from discgeo.vecfield import bracket_field, lie_bracket_fd, numeric_structure_constants, pushforward, sample_points

coord = st.floats(-3, 3)
elem = st.builds(H, coord, coord, coord)
point3 = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).map(np.array)


def test_disc4d_values():
    Y1, Y2, Y12, Y112 = models.disc4d().full_frame
    assert np.allclose(Y2([0, 0, np.pi / 2, 0]), [0, 1, 0, 1])
    assert np.allclose(Y12([0, 0, 0, 0]), [0, 1, 0, 0])
    assert np.allclose(Y112([0, 0, 0, 0]), [-1, 0, 0, 0])


@given(st.floats(-6, 6))
def test_disc3d_orthonormal_in_k(th):
    S = models.disc3d()
    X1, X2 = S.generators
    p = np.array([0.2, -0.1, th])
    k = models.disc_metric_k(p)
    assert X1(p) @ k @ X1(p) == pytest.approx(1)
    assert X2(p) @ k @ X2(p) == pytest.approx(1)
    assert X1(p) @ k @ X2(p) == pytest.approx(0, abs=1e-15)
    # the coframe-derived metric is k itself
    assert np.allclose(S.metric(p), k)


def test_disc3d_basics():
    X1, X2, X12 = models.disc3d().full_frame
    assert np.allclose(X2([0, 0, 0]), [1, 0, 0])
    p = [0.3, 0.5, 0.8]
    assert np.allclose(lie_bracket_fd(X1, X12, p), -X2(p), atol=1e-10)


def test_car_fixed_phi_table():
    S = models.car_fixed_phi(1.0)
    assert np.allclose(S.full_frame[2]([0, 0, 0]), [0, 1, 0])
    c, worst = numeric_structure_constants(S.full_frame, sample_points(3, 20))
    assert worst < 1e-8
    assert c[0, 1] == pytest.approx([0, 0, 1], abs=1e-8)
    assert c[1, 2] == pytest.approx([1, 0, 0], abs=1e-8)
    assert c[0, 2] == pytest.approx([0, 0, 0], abs=1e-8)


def test_car_singular_steering():
    Z2 = models.car().generators[1]
    with pytest.raises(ValueError):
        Z2([0, 0, 0, np.pi / 2])
    with pytest.raises(ValueError):
        models.car(0.0)


def test_heisenberg_frame():
    S = models.heis_system()
    n1, n2, n3 = S.full_frame
    assert np.allclose(n2([0, 0, 3]), [1, 3, 0])
    p = np.array([0.1, 0.2, 0.7])
    r = models.heis_metric_r(p)
    assert n1(p) @ r @ n2(p) == 0
    assert np.allclose(S.metric(p), r)
    N12 = lie_bracket_fd(n1, n2, p)
    assert np.allclose(bracket_field(n1, bracket_field(n1, n2))(p), 0, atol=1e-9)
    assert np.allclose(N12, n3(p))
    assert models.heis_contact_form(p) @ n1(p) == 0 and models.heis_contact_form(p) @ n2(p) == 0


def test_group_law_examples():
    assert models.heis_mul(H(1, 2, 3), H(4, 5, 6)) == H(5, 7, 14)
    g = H(1.5, -2.0, 0.25)
    assert models.heis_mul(models.IDENTITY, g) == g
    assert models.heis_inv(g) == H(-1.5, 2.0, -0.25 + 1.5 * -2.0)
    e = models.heis_mul(g, models.heis_inv(g))
    assert (e.theta, e.x, e.y) == pytest.approx((0, 0, 0))


@given(elem, elem, elem)
def test_associativity(a, b, c):
    lhs = ((a @ b) @ c).to_point()
    rhs = (a @ (b @ c)).to_point()
    assert np.allclose(lhs, rhs, atol=1e-12, rtol=1e-12)


def test_nonfinite_element_rejected():
    with pytest.raises(ValueError):
        H(np.nan, 0, 0)


@given(elem, point3)
def test_left_translation_preserves_n_frame(g, q):
    L, Linv = models.left_translation(g), models.left_translation(models.heis_inv(g))
    for F in models.heis_system().full_frame:
        assert np.allclose(pushforward(L, Linv, F)(q), F(q), atol=1e-6)


@given(elem, point3)
def test_right_translation_preserves_r_frame(g, q):
    R, Rinv = models.right_translation(g), models.right_translation(models.heis_inv(g))
    for F in models.right_invariant_frame():
        assert np.allclose(pushforward(R, Rinv, F)(q), F(q), atol=1e-6)


def test_right_invariant_frame():
    R1, R2, R3 = models.right_invariant_frame()
    assert np.allclose(R1([2, 0, 0]), [0, 2, 1])
    p = [0.3, -0.4, 0.9]
    assert np.allclose(lie_bracket_fd(R1, R2, p), -R3(p))
    assert np.allclose(lie_bracket_fd(R2, R3, p), 0)


def test_coordinate_change():
    assert np.allclose(models.coords_2nd_to_1st([0, 5, 2]), [0, 5, 2])
    assert np.allclose(models.coords_2nd_to_1st([2, 1, 3]), [2, 4, 3])


@given(point3)
def test_coordinate_round_trip(p):
    assert np.allclose(models.coords_1st_to_2nd(models.coords_2nd_to_1st(p)), p)


@pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-3])
def test_weighted_maclaurin(eps):
    # X2 - n2 is second order in theta on the x, y components
    X2 = models.disc3d().generators[1]
    n2 = models.heis_system().generators[1]
    p = np.array([eps, eps**2, eps])
    d = X2(p) - n2(p)
    assert np.max(np.abs(d[:2])) <= eps**2
    assert np.allclose(X2([0, 0, 0]), n2([0, 0, 0]))


def test_registry():
    assert models.get_system("car", 2.0).name == "car"
    with pytest.raises(ValueError):
        models.get_system("bicycle")
