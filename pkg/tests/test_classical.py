import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conic_spectra.classical import (ClassicalState, OrbitSpec, detect_closure,
                                     integrate_orbit, orbit_radial_momentum, orbit_radius,
                                     runge_lenz_classical, runge_lenz_length_identity,
                                     runge_lenz_power, state_on_orbit)
from conic_spectra.exceptions import DegenerateOrbitError, NoBoundMotionError
from conic_spectra.system import PhysicalSystem


def coulomb_E(system, L, e):
    return (e * e - 1) * system.M * system.kappa ** 2 * system.s ** 2 / (2 * L * L)


def harmonic_E(system, L, f):
    return system.omega * abs(L) / (system.s * math.sqrt(1 - f * f))


def bound_spec(system, L=1.0, ecc=0.5, phi0=0.0):
    E = coulomb_E(system, L, ecc) if system.is_coulomb else harmonic_E(system, L, ecc)
    return OrbitSpec(E, L, phi0)


def test_circular_orbits():
    c = PhysicalSystem.coulomb(1)
    spec = OrbitSpec(-0.5, 1.0)
    assert spec.shape(c) == 0.0
    assert np.allclose(orbit_radius(spec, c, np.linspace(0, 7, 9)), 1.0)
    assert np.allclose(orbit_radial_momentum(spec, c, np.linspace(0, 7, 9)), 0.0)
    h = PhysicalSystem.harmonic(1)
    assert np.allclose(orbit_radius(OrbitSpec(1.0, 1.0), h, [0.1, 2.0]), 1.0)


def test_kepler_perihelion_aphelion():
    c = PhysicalSystem.coulomb(1)
    spec = OrbitSpec(-3 / 8, 1.0)
    assert spec.shape(c) == pytest.approx(0.5)
    assert orbit_radius(spec, c, 0.0) == pytest.approx(2 / 3)
    assert orbit_radius(spec, c, math.pi) == pytest.approx(2.0)
    assert orbit_radial_momentum(spec, c, 0.0) == 0.0
    assert orbit_radial_momentum(spec, c, math.pi / 2) == pytest.approx(0.5)


def test_degenerate_and_unbound():
    c = PhysicalSystem.coulomb(1)
    with pytest.raises(DegenerateOrbitError):
        orbit_radius(OrbitSpec(-0.5, 0.0), c, 0.0)
    with pytest.raises(NoBoundMotionError):
        OrbitSpec(0.1, 1.0).shape(c)


@pytest.mark.parametrize("make", [PhysicalSystem.coulomb, PhysicalSystem.harmonic])
@pytest.mark.parametrize("s", ["1", "1/2", "3", "2/3"])
def test_closed_form_conserves_energy(make, s):
    sy = make(s)
    spec = bound_spec(sy, L=1.3, ecc=0.6, phi0=0.4)
    phi = np.random.default_rng(1).uniform(-20, 20, 200)
    r = orbit_radius(spec, sy, phi)
    p = orbit_radial_momentum(spec, sy, phi)
    assert np.max(np.abs(sy.hamiltonian(r, p, spec.L) / spec.E - 1)) < 1e-10


@pytest.mark.parametrize("make", [PhysicalSystem.coulomb, PhysicalSystem.harmonic])
@pytest.mark.parametrize("s", ["1", "1/2", "3", "2/3"])
def test_integrator_matches_closed_form(make, s):
    sy = make(s)
    spec = bound_spec(sy, L=1.0, ecc=0.5)
    start = state_on_orbit(spec, sy, 0.2)
    w = sy.angular_shift
    traj = integrate_orbit(start, spec.L, sy, phi_advance=5 * 2 * math.pi / w, tol=1e-11)
    r_closed = orbit_radius(spec, sy, traj.phi)
    assert np.max(np.abs(traj.r - r_closed)) < 1e-6
    assert traj.drift("E") < 1e-9
    assert max(np.max(np.abs(traj.monitors[k] - traj.monitors[k][0])) for k in ("R_x", "R_y")) < 1e-8


def test_circular_initial_data_stays_circular():
    sy = PhysicalSystem.coulomb("3/2")
    r0 = 1.0 ** 2 / (sy.M * sy.kappa * sy.s ** 2)
    traj = integrate_orbit(ClassicalState(r0, 0.0, 0.0), 1.0, sy, t_end=50.0)
    assert np.max(np.abs(traj.r - r0)) < 1e-9


def test_runge_lenz_examples():
    c = PhysicalSystem.coulomb(1)
    circ = state_on_orbit(OrbitSpec(-0.5, 1.0), c, 0.7)
    assert np.allclose(runge_lenz_classical(circ, 1.0, c), (0, 0), atol=1e-14)
    st_ = state_on_orbit(OrbitSpec(-3 / 8, 1.0), c, 1.1)
    assert np.allclose(runge_lenz_classical(st_, 1.0, c), (0.5, 0.0), atol=1e-14)
    lhs, rhs = runge_lenz_length_identity(circ, 1.0, c)
    assert abs(lhs) < 1e-14 and abs(rhs) < 1e-14


@settings(max_examples=60, deadline=None)
@given(r=st.floats(0.05, 20), p=st.floats(-3, 3), phi=st.floats(-50, 50),
       L=st.floats(0.1, 4), s=st.sampled_from([0.5, 1.0, 1.5, 3.0, 0.37]),
       coulomb=st.booleans())
def test_length_identity_random_points(r, p, phi, L, s, coulomb):
    sy = PhysicalSystem.coulomb(s) if coulomb else PhysicalSystem.harmonic(s)
    lhs, rhs = runge_lenz_length_identity(ClassicalState(r, p, phi), L, sy)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs), abs(rhs))


@pytest.mark.parametrize("s,q,coulomb,invariant", [
    ("1", 1, True, True), ("1/2", 2, True, True), ("1/2", 1, True, False),
    ("3/2", 2, True, True), ("3/2", 1, True, False),
    ("1/4", 2, False, True), ("1/4", 1, False, False), ("3/4", 2, False, True),
])
def test_runge_lenz_power_winding(s, q, coulomb, invariant):
    sy = PhysicalSystem.coulomb(s) if coulomb else PhysicalSystem.harmonic(s)
    a = ClassicalState(1.3, 0.4, 0.9)
    b = ClassicalState(1.3, 0.4, 0.9 + 2 * math.pi)
    va, vb = runge_lenz_power(a, 1.1, sy, q), runge_lenz_power(b, 1.1, sy, q)
    assert bool(abs(va - vb) <= 1e-12 * abs(va)) == invariant


@pytest.mark.parametrize("make,s,n", [(PhysicalSystem.coulomb, "3/2", 2),
                                      (PhysicalSystem.coulomb, "1/2", 2),
                                      (PhysicalSystem.harmonic, "1/2", 1),
                                      (PhysicalSystem.harmonic, "3", 1)])
def test_closure_detected_at_predicted_revolution(make, s, n):
    sy = make(s)
    spec = bound_spec(sy)
    res = detect_closure(state_on_orbit(spec, sy, 0.3), spec.L, sy, n_max=n + 1)
    assert res.predicted == n and res.revolutions == n
    assert res.distances[n - 1] < 1e-6


def test_irrational_orbit_never_closes():
    sy = PhysicalSystem.coulomb(math.sqrt(2))
    spec = bound_spec(sy)
    res = detect_closure(state_on_orbit(spec, sy, 0.0), spec.L, sy, n_max=20)
    assert res.predicted is None and res.revolutions is None
    assert res.min_distance > 10 * 1e-6
