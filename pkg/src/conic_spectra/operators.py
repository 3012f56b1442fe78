"""Radial reductions of H, L and the Runge-Lenz ladder operators.

Acting on ``f(r) exp(i mu phi)`` every operator here maps to a single angular
sector, so its action reduces to a radial differential expression.  The
functions are generic over the radial representation: anything with
``d_dr()``, ``mul_r(j)``, ``scale(c)`` and ``+`` works (closed forms, exact
derivative jets, sampled grids).

Sector shifts: ``R+`` sends ``mu -> mu + w`` and ``R-`` sends ``mu -> mu - w``
with ``w = s`` (Coulomb) or ``w = 2 s`` (oscillator).
"""

from __future__ import annotations

from functools import reduce

from .system import PhysicalSystem


def _sum(terms):
    return reduce(lambda a, b: a + b, terms)


def hamiltonian_terms(f, mu: float, system: PhysicalSystem):
    M, s = system.M, system.s
    d1 = f.d_dr()
    terms = [d1.d_dr().scale(-0.5 / M), d1.mul_r(-1).scale(-0.5 / M)]
    if mu != 0:
        terms.append(f.mul_r(-2).scale(mu ** 2 / (2.0 * M * s ** 2)))
    if system.is_coulomb:
        terms.append(f.mul_r(-1).scale(-system.kappa))
    else:
        terms.append(f.mul_r(2).scale(0.5 * M * system.omega ** 2))
    return terms


def radial_hamiltonian(f, mu: float, system: PhysicalSystem):
    """Radial part of ``H (f e^{i mu phi})``."""
    return _sum(hamiltonian_terms(f, mu, system))


def ladder_terms(f, mu: float, sign: int, system: PhysicalSystem):
    """Individual terms of ``R_sign (f e^{i mu phi})``; the result lives at ``mu + sign w``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    M = system.M
    if system.is_coulomb:
        ell = mu / system.s
        c = (ell + 0.5 * sign) / M
        terms = []
        if ell != 0:
            terms.append(f.mul_r(-1).scale(c * ell))
        terms.append(f.d_dr().scale(-sign * c))
        terms.append(f.scale(-system.kappa))
        return terms
    lam = sign * mu / system.s
    d1 = f.d_dr()
    terms = [d1.d_dr().scale(0.5 / M)]
    if lam ** 2 + 2 * lam != 0:
        terms.append(f.mul_r(-2).scale((lam ** 2 + 2 * lam) / (2.0 * M)))
    terms.append(d1.mul_r(-1).scale(-(2 * lam + 1) / (2.0 * M)))
    terms.append(f.mul_r(2).scale(-0.5 * M * system.omega ** 2))
    return terms


def radial_ladder(f, mu: float, sign: int, system: PhysicalSystem):
    return _sum(ladder_terms(f, mu, sign, system))


def ladder_rescaling(system: PhysicalSystem, energy: float) -> float:
    """Factor turning R into the su(2) generator: sqrt(-M/2E) or 1/(2 omega)."""
    if system.is_coulomb:
        if not energy < 0:
            raise ValueError("Coulomb rescaling needs a bound-state energy")
        return (-system.M / (2.0 * energy)) ** 0.5
    return 1.0 / (2.0 * system.omega)


def angular_rescaling(system: PhysicalSystem) -> float:
    """``L~ = L * factor``: 1/s (Coulomb) or 1/(2s) (oscillator)."""
    return 1.0 / system.s if system.is_coulomb else 1.0 / (2.0 * system.s)


# ---------------------------------------------------------------- sector sums

class SectorFunction:
    """Finite sum ``sum_mu f_mu(r) exp(i mu phi)``."""

    def __init__(self, parts: dict[float, object] | None = None):
        self.parts = {}
        for mu, f in (parts or {}).items():
            self._put(mu, f)

    @staticmethod
    def _key(mu: float) -> float:
        return round(float(mu), 10) + 0.0

    def _put(self, mu, f):
        k = self._key(mu)
        self.parts[k] = self.parts[k] + f if k in self.parts else f

    def __add__(self, other: "SectorFunction") -> "SectorFunction":
        out = SectorFunction(dict(self.parts))
        for mu, f in other.parts.items():
            out._put(mu, f)
        return out

    def scale(self, c) -> "SectorFunction":
        return SectorFunction({mu: f.scale(c) for mu, f in self.parts.items()})

    def __sub__(self, other):
        return self + other.scale(-1.0)


def apply_L(psi: SectorFunction) -> SectorFunction:
    return SectorFunction({mu: f.scale(mu) for mu, f in psi.parts.items()})


def apply_H(psi: SectorFunction, system: PhysicalSystem) -> SectorFunction:
    return SectorFunction({mu: radial_hamiltonian(f, mu, system) for mu, f in psi.parts.items()})


def apply_R(psi: SectorFunction, sign: int, system: PhysicalSystem) -> SectorFunction:
    w = system.angular_shift
    out = SectorFunction()
    for mu, f in psi.parts.items():
        out._put(mu + sign * w, radial_ladder(f, mu, sign, system))
    return out


def apply_Rx(psi, system):
    return (apply_R(psi, 1, system) + apply_R(psi, -1, system)).scale(0.5)


def apply_Ry(psi, system):
    return (apply_R(psi, 1, system) - apply_R(psi, -1, system)).scale(-0.5j)
