"""Classical bound orbits on the cone.

Closed-form orbits for both potentials, a Hamilton's-equations integrator
used as an independent check of them, and the classical Runge-Lenz
quantities.  The rescaled angle ``phi`` is always kept unwrapped: the
Runge-Lenz components depend on the number of windings around the tip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .exceptions import DegenerateOrbitError, IntegrationError, NoBoundMotionError
from .geometry import closure_revolutions
from .system import PhysicalSystem

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ClassicalState:
    r: float
    p_r: float
    phi: float  # unwrapped rescaled angle
    t: float = 0.0


@dataclass(frozen=True)
class OrbitSpec:
    """Bound orbit labelled by energy, angular momentum and perihelion angle."""

    E: float
    L: float
    phi0: float = 0.0

    def shape(self, system: PhysicalSystem) -> float:
        """Eccentricity ``e`` (Coulomb) or ``f`` (oscillator)."""
        return orbit_shape(self.E, self.L, system)


def orbit_shape(E: float, L: float, system: PhysicalSystem) -> float:
    M, s = system.M, system.s
    if system.is_coulomb:
        if not E < 0:
            raise NoBoundMotionError(f"Coulomb orbit with E = {E} >= 0 is unbound")
        arg = 1.0 + 2.0 * E * L ** 2 / (M * system.kappa ** 2 * s ** 2)
    else:
        if not E > 0:
            raise NoBoundMotionError(f"oscillator orbit needs E > 0, got {E}")
        arg = 1.0 - system.omega ** 2 * L ** 2 / (E ** 2 * s ** 2)
    if arg < -1e-12:
        raise NoBoundMotionError("energy below the minimum of the effective potential")
    return math.sqrt(max(arg, 0.0))


def _check_L(L: float):
    if L == 0:
        raise DegenerateOrbitError("L = 0 is a radial plunge; orbit formulas do not apply")


def orbit_radius(spec: OrbitSpec, system: PhysicalSystem, phi):
    """Radius on the closed-form orbit at (unwrapped) angle ``phi``."""
    _check_L(spec.L)
    M, s, L = system.M, system.s, spec.L
    ecc = spec.shape(system)
    phi = np.asarray(phi, dtype=float)
    if system.is_coulomb:
        inv_r = M * system.kappa * s ** 2 / L ** 2 * (1.0 + ecc * np.cos(s * (phi - spec.phi0)))
        return 1.0 / inv_r
    inv_r2 = M * spec.E * s ** 2 / L ** 2 * (1.0 + ecc * np.cos(2.0 * s * (phi - spec.phi0)))
    return 1.0 / np.sqrt(inv_r2)


def orbit_radial_momentum(spec: OrbitSpec, system: PhysicalSystem, phi):
    _check_L(spec.L)
    M, s, L = system.M, system.s, spec.L
    ecc = spec.shape(system)
    phi = np.asarray(phi, dtype=float)
    if system.is_coulomb:
        return M * system.kappa * s / L * ecc * np.sin(s * (phi - spec.phi0))
    r = orbit_radius(spec, system, phi)
    return r * M * spec.E * s / L * ecc * np.sin(2.0 * s * (phi - spec.phi0))


def state_on_orbit(spec: OrbitSpec, system: PhysicalSystem, phi: float) -> ClassicalState:
    r = float(orbit_radius(spec, system, phi))
    p = float(orbit_radial_momentum(spec, system, phi))
    return ClassicalState(r, p, float(phi), 0.0)


# ---------------------------------------------------------------- Runge-Lenz

def runge_lenz_classical(state: ClassicalState, L: float, system: PhysicalSystem):
    """Return ``(R_x, R_y)``; works elementwise on array-valued states."""
    M, s = system.M, system.s
    r, p, phi = np.asarray(state.r), np.asarray(state.p_r), np.asarray(state.phi)
    if system.is_coulomb:
        a = L ** 2 / (M * r * s ** 2) - system.kappa
        b = p * L / (M * s)
        c, sn = np.cos(s * phi), np.sin(s * phi)
    else:
        H = system.hamiltonian(r, p, L)
        a = L ** 2 / (M * r ** 2 * s ** 2) - H
        b = p * L / (M * r * s)
        c, sn = np.cos(2.0 * s * phi), np.sin(2.0 * s * phi)
    return a * c + b * sn, a * sn - b * c


def runge_lenz_power(state: ClassicalState, L: float, system: PhysicalSystem,
                     q: int, sign: int = +1):
    """``(R_x + sign i R_y)**q``.

    Invariant under ``phi -> phi + 2 pi`` exactly when ``q s`` (Coulomb) or
    ``2 q s`` (oscillator) is an integer.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    rx, ry = runge_lenz_classical(state, L, system)
    return (rx + sign * 1j * ry) ** q


def runge_lenz_length_identity(state: ClassicalState, L: float, system: PhysicalSystem):
    """``(R_x^2 + R_y^2, closed form)`` with the closed form in terms of H and L."""
    rx, ry = runge_lenz_classical(state, L, system)
    H = system.hamiltonian(np.asarray(state.r), np.asarray(state.p_r), L)
    lhs = rx ** 2 + ry ** 2
    if system.is_coulomb:
        rhs = 2.0 * H * L ** 2 / (system.M * system.s ** 2) + system.kappa ** 2
    else:
        rhs = H ** 2 - (system.omega * L / system.s) ** 2
    return lhs, rhs


# ---------------------------------------------------------------- integration

@dataclass
class Trajectory:
    t: np.ndarray
    r: np.ndarray
    p_r: np.ndarray
    phi: np.ndarray
    E: float
    L: float
    monitors: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def samples(self) -> list[ClassicalState]:
        return [ClassicalState(*row) for row in zip(self.r, self.p_r, self.phi, self.t)]

    def drift(self, name: str) -> float:
        """Maximum relative deviation of a monitor from its initial value."""
        v = self.monitors[name]
        scale = max(abs(v[0]), 1e-300)
        return float(np.max(np.abs(v - v[0])) / scale)

    @property
    def xy(self) -> tuple[np.ndarray, np.ndarray]:
        phi = np.mod(self.phi, TWO_PI)
        return self.r * np.cos(phi), self.r * np.sin(phi)


def _rhs(system: PhysicalSystem, L: float):
    M, s = system.M, system.s

    def f(t, y):
        r, p, _ = y
        return [p / M,
                L ** 2 / (M * r ** 3 * s ** 2) - system.dV(r),
                L / (M * r ** 2 * s ** 2)]
    return f


def integrate_orbit(initial: ClassicalState, L: float, system: PhysicalSystem,
                    t_end: float | None = None, tol: float = 1e-10,
                    phi_advance: float | None = None,
                    t_eval=None, max_step: float = np.inf) -> Trajectory:
    """Integrate Hamilton's equations from ``initial`` with angular momentum ``L``.

    Stops at ``t_end`` or, if ``phi_advance`` is given, when the unwrapped
    angle has advanced by that amount (whichever comes first).
    """
    if not initial.r > 0:
        raise ValueError("initial radius must be positive")
    E = float(system.hamiltonian(initial.r, initial.p_r, L))
    if system.is_coulomb and not E < 0:
        raise NoBoundMotionError("Coulomb integration requires E < 0")
    if t_end is None:
        if phi_advance is None:
            raise ValueError("give t_end or phi_advance")
        if L == 0:
            raise DegenerateOrbitError("phi does not advance for L = 0")
        # generous upper bound: angular speed is at least L / (M r_max^2 s^2)
        r_far = _outer_radius(E, L, system)
        t_end = abs(phi_advance) * system.M * r_far ** 2 * system.s ** 2 / abs(L) * 1.5
    events = None
    if phi_advance is not None:
        target = initial.phi + phi_advance

        def reached(t, y):
            return y[2] - target
        reached.terminal = True
        events = [reached]
    y0 = [initial.r, initial.p_r, initial.phi]
    sol = solve_ivp(_rhs(system, L), (initial.t, initial.t + t_end), y0,
                    method="DOP853", rtol=tol * 1e-2, atol=tol * 1e-4,
                    events=events, t_eval=t_eval, max_step=max_step, dense_output=False)
    if sol.status == -1:
        raise IntegrationError(sol.message)
    t, (r, p, phi) = sol.t, sol.y
    if events is not None and len(sol.t_events[0]):
        # append the exact stopping point when sampling on a fixed t_eval
        te, ye = sol.t_events[0][0], sol.y_events[0][0]
        if t[-1] != te:
            t = np.append(t, te)
            r, p, phi = (np.append(a, v) for a, v in zip((r, p, phi), ye))
    if np.any(r <= 0):
        raise IntegrationError("trajectory reached r <= 0")
    traj = Trajectory(t, r, p, phi, E, L)
    rx, ry = runge_lenz_classical(ClassicalState(r, p, phi), L, system)
    traj.monitors = {"E": system.hamiltonian(r, p, L), "L": np.full_like(r, L),
                     "R_x": rx, "R_y": ry}
    return traj


def _outer_radius(E: float, L: float, system: PhysicalSystem) -> float:
    from .semiclassical import turning_points
    return turning_points(E, L, system)[1]


@dataclass(frozen=True)
class ClosureResult:
    revolutions: int | None
    distances: tuple[float, ...]  # phase-space distance after each revolution
    predicted: int | None

    @property
    def min_distance(self) -> float:
        return min(self.distances)


def detect_closure(initial: ClassicalState, L: float, system: PhysicalSystem,
                   n_max: int | None = None, tol: float = 1e-6,
                   rtol: float = 1e-10) -> ClosureResult:
    """Integrate ``n_max`` revolutions and find the first return of ``(r, p_r)``.

    Distances are measured whenever the unwrapped angle has advanced by a
    whole multiple of ``2 pi``, where the reduced angle coincides with the
    initial one.
    """
    predicted = closure_revolutions(system.geometry, system.kind)
    if n_max is None:
        n_max = predicted if predicted is not None else 10
    direction = 1.0 if L > 0 else -1.0
    distances = []
    state = initial
    for _ in range(n_max):
        traj = integrate_orbit(state, L, system, phi_advance=direction * TWO_PI, tol=rtol)
        state = ClassicalState(float(traj.r[-1]), float(traj.p_r[-1]),
                               float(traj.phi[-1]), float(traj.t[-1]))
        distances.append(math.hypot(state.r - initial.r, state.p_r - initial.p_r))
    first = next((k + 1 for k, d in enumerate(distances) if d <= tol), None)
    return ClosureResult(first, tuple(distances), predicted)
