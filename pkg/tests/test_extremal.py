import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discgeo import extremal, nilgeo, rkf45
from discgeo.extremal import NILPOTENT, ORIGINAL, make_state

from conftest import EX1

R3 = math.sqrt(3)


def test_rhs_original_examples():
    d = extremal.rhs_original(make_state(h1=1))
    assert np.allclose(d, [0, 0, 1, 0, 0, 0])
    d = extremal.rhs_original(make_state(0, 0, 0, *EX1))
    assert np.allclose(d[3:], [-R3, 1, -R3 / 4])
    assert np.allclose(d[:3], [R3 / 2, 0, 0.5])


def test_rhs_original_equilibrium():
    assert not np.any(extremal.rhs_original(make_state(1, 2, 3, 0, 0, 5)))


def test_rhs_nilpotent_examples():
    assert np.allclose(extremal.rhs_nilpotent(make_state(0, 0, 0, *EX1)), [R3 / 2, 0, 0.5, -R3, 1, 0])
    d = extremal.rhs_nilpotent(make_state(1, 1, 1, 0.3, 0.0, 2))
    assert d[0] == 0 and d[1] == 0


@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_nilpotent_h3_static(s):
    assert extremal.rhs_nilpotent(np.array(s))[5] == 0


@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_casimir_derivative_vanishes(s):
    # d/dt (h3^2 - h1^2) along the original vertical system
    s = np.array(s)
    d = extremal.rhs_original(s)
    assert 2 * s[5] * d[5] - 2 * s[3] * d[3] == pytest.approx(0, abs=1e-12)


def test_zero_rhs_trajectory_constant():
    traj = extremal.integrate_rkf45(ORIGINAL, make_state(1, 2, 3), 2.0, grid=5)
    assert np.all(traj.states == make_state(1, 2, 3))
    assert traj.diagnostics.hamiltonian_drift == 0


@pytest.mark.parametrize("system", [ORIGINAL, NILPOTENT])
def test_conservation_example1(system):
    traj = extremal.integrate_rkf45(system, make_state(0, 0, 0, *EX1), math.pi, grid=101)
    d = traj.diagnostics
    assert d.hamiltonian_drift <= 1e-8
    assert d.casimir_drift <= (1e-10 if system == NILPOTENT else 1e-8)
    assert d.arclength
    assert np.max(np.abs(traj.states[:, 3] ** 2 + traj.states[:, 4] ** 2 - 1)) < 1e-8


def test_nilpotent_matches_closed_form():
    traj = extremal.integrate_rkf45(NILPOTENT, make_state(0, 0, 0, *EX1), math.pi, grid=101)
    closed = nilgeo.eval_state(nilgeo.constants_from_initial(*EX1), traj.times)
    assert np.max(np.abs(traj.states - closed)) < 1e-8


def test_time_reversal():
    s0 = make_state(0.1, -0.2, 0.3, *EX1)
    fwd = extremal.integrate_rkf45(ORIGINAL, s0, 2.0)
    back = rkf45.integrate(lambda s: -extremal.rhs_original(s), fwd.end, 2.0)
    assert np.max(np.abs(back.states[-1] - s0)) < 1e-6


def test_halving_tolerance_never_hurts():
    s0 = make_state(0, 0, 0, *EX1)
    ref = extremal.integrate_rkf45(ORIGINAL, s0, math.pi, 1e-13, 1e-15).end
    errs = [np.max(np.abs(extremal.integrate_rkf45(ORIGINAL, s0, math.pi, tol, tol * 1e-2, max_step=math.pi).end - ref))
            for tol in (1e-6, 5e-7, 2.5e-7, 1.25e-7)]
    assert all(a >= b for a, b in zip(errs, errs[1:]))


@settings(max_examples=15)
@given(st.floats(0, 2 * math.pi), st.floats(-3, 3))
def test_arclength_preserved(phi, h3):
    s0 = make_state(0, 0, 0, math.cos(phi), math.sin(phi), h3)
    traj = extremal.integrate_rkf45(ORIGINAL, s0, 1.0, grid=11)
    assert np.max(np.abs(extremal.hamiltonian(traj.states) - 0.5)) < 1e-9


def test_dense_output_between_steps():
    traj = extremal.integrate_rkf45(NILPOTENT, make_state(0, 0, 0, *EX1), math.pi)
    C = nilgeo.constants_from_initial(*EX1)
    t = 1.2345
    assert np.max(np.abs(traj.at(t) - nilgeo.eval_state(C, t)[0])) < 1e-6


def test_bad_inputs():
    with pytest.raises(ValueError):
        make_state(np.nan)
    with pytest.raises(ValueError):
        extremal.integrate_rkf45("bogus", make_state(), 1.0)
    with pytest.raises(ValueError):
        extremal.integrate_rkf45(ORIGINAL, make_state(), 1.0, grid=1)
