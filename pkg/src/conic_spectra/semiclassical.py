"""Bohr-Sommerfeld quantization of the radial motion.

The radial action ``oint p_r dr`` is computed by quadrature between the
classical turning points.  The substitution ``r = r_min + (r_max - r_min)
sin^2(theta)`` removes the inverse-square-root behaviour of the integrand at
both turning points.  An independent route integrates over the rescaled angle
along the closed-form orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad
from scipy.optimize import brentq

from .exceptions import DegenerateOrbitError, NoBoundMotionError
from .system import PhysicalSystem


@dataclass(frozen=True)
class ActionResult:
    action: float
    turning_points: tuple[float, float]
    quadrature_error_estimate: float


def effective_minimum(L: float, system: PhysicalSystem) -> float:
    """Radius of the minimum of the effective potential."""
    M, s = system.M, system.s
    if system.is_coulomb:
        if L == 0:
            raise DegenerateOrbitError("Coulomb effective potential has no minimum for L = 0")
        return L ** 2 / (M * system.kappa * s ** 2)
    return (L ** 2 / (M ** 2 * system.omega ** 2 * s ** 2)) ** 0.25


def turning_points(E: float, L: float, system: PhysicalSystem) -> tuple[float, float]:
    """Roots of ``E - V_eff(r)`` bracketing the classically allowed region."""
    r0 = effective_minimum(L, system)
    g = lambda r: E - float(system.V_eff(r, L))
    if r0 == 0.0:  # oscillator with L = 0
        if not E > 0:
            raise NoBoundMotionError("E below the potential minimum")
        return 0.0, math.sqrt(2.0 * E / system.M) / system.omega
    excess = g(r0)
    if excess < 0:
        if excess > -1e-13 * abs(E):
            return r0, r0
        raise NoBoundMotionError(f"E = {E} lies below min V_eff = {E - excess}")
    if excess <= 1e-14 * abs(E):
        return r0, r0
    a = r0
    while g(a) > 0:
        a *= 0.5
    b = r0
    while g(b) > 0:
        b *= 2.0
        if b > 1e300:
            raise NoBoundMotionError("motion is unbounded at this energy")
    rmin = brentq(g, a, r0, xtol=1e-15 * r0, rtol=1e-15, maxiter=500)
    rmax = brentq(g, r0, b, xtol=1e-15 * r0, rtol=1e-15, maxiter=500)
    return rmin, rmax


def radial_action(E: float, L: float, system: PhysicalSystem) -> ActionResult:
    """``oint p_r dr`` over one radial libration at energy ``E``."""
    rmin, rmax = turning_points(E, L, system)
    width = rmax - rmin
    if width <= 0:
        return ActionResult(0.0, (rmin, rmax), 0.0)
    M = system.M

    def integrand(theta):
        sn, cs = math.sin(theta), math.cos(theta)
        r = rmin + width * sn * sn
        kin = 2.0 * M * (E - float(system.V_eff(r, L))) if r > 0 else 2.0 * M * E
        return math.sqrt(max(kin, 0.0)) * 2.0 * width * sn * cs

    val, err = quad(integrand, 0.0, 0.5 * math.pi, epsabs=1e-14, epsrel=1e-13, limit=200)
    return ActionResult(2.0 * val, (rmin, rmax), 2.0 * err)


def radial_action_angular(E: float, L: float, system: PhysicalSystem) -> float:
    """Same action from a quadrature over the rescaled angle along the orbit."""
    if L == 0:
        raise DegenerateOrbitError("angular representation requires L != 0")
    from .classical import orbit_shape
    s = system.s
    ecc = orbit_shape(E, L, system)
    w = s if system.is_coulomb else 2.0 * s

    def integrand(phi):
        return abs(L) * ecc ** 2 * math.sin(w * phi) ** 2 / (1.0 + ecc * math.cos(w * phi)) ** 2

    val, _ = quad(integrand, 0.0, 2.0 * math.pi / w, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def radial_action_closed_form(E: float, L: float, system: PhysicalSystem) -> float:
    s = system.s
    if system.is_coulomb:
        return 2.0 * math.pi * (math.sqrt(-system.M * system.kappa ** 2 / (2.0 * E)) - abs(L) / s)
    return math.pi * (E / system.omega - abs(L) / s)


def bohr_sommerfeld_energy(n_r: int, m: int, system: PhysicalSystem,
                           method: str = "formula", xtol: float = 1e-14) -> float:
    """Semiclassical energy from ``oint p_r dr = 2 pi (n_r + 1/2)`` with ``L = m``.

    ``method="formula"`` returns the closed-form result, ``method="root"``
    solves the quantization condition numerically with :func:`radial_action`.
    """
    if n_r < 0:
        raise ValueError("n_r must be non-negative")
    s, M = system.s, system.M
    if method == "formula":
        if system.is_coulomb:
            return -M * system.kappa ** 2 / (2.0 * (n_r + abs(m) / s + 0.5) ** 2)
        return system.omega * (2 * n_r + abs(m) / s + 1.0)
    if method != "root":
        raise ValueError(f"unknown method {method!r}")
    L = float(abs(m))
    target = 2.0 * math.pi * (n_r + 0.5)
    if system.is_coulomb:
        r0 = effective_minimum(L, system)
        lo = float(system.V_eff(r0, L))
        hi = lo * 1e-12
        while radial_action(hi, L, system).action < target:
            hi *= 1e-3
    else:
        lo = float(system.V_eff(effective_minimum(L, system), L)) if L else 0.0
        hi = max(lo, system.omega) * 2.0
        while radial_action(hi, L, system).action < target:
            hi *= 2.0
    f = lambda E: radial_action(E, L, system).action - target
    a = lo + abs(lo) * 1e-15 if lo != 0.0 else 1e-300
    return brentq(f, a, hi, xtol=xtol, rtol=1e-15, maxiter=200)
