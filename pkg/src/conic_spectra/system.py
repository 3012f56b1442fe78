"""Physical systems: a particle of mass M on a cone, bound by 1/r or r^2."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .geometry import ConeGeometry, Number


@dataclass(frozen=True)
class Coulomb:
    """Attractive ``V(r) = -kappa / r``."""

    kappa: float = 1.0

    name = "coulomb"

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")


@dataclass(frozen=True)
class Harmonic:
    """Oscillator ``V(r) = M omega^2 r^2 / 2``."""

    omega: float = 1.0

    name = "harmonic"

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")


@dataclass(frozen=True)
class PhysicalSystem:
    potential: Coulomb | Harmonic
    geometry: ConeGeometry
    M: float = 1.0

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError("mass must be positive")

    @classmethod
    def coulomb(cls, s: Number | ConeGeometry = 1, kappa: float = 1.0,
                M: float = 1.0) -> "PhysicalSystem":
        geo = s if isinstance(s, ConeGeometry) else ConeGeometry(s)
        return cls(Coulomb(kappa), geo, M)

    @classmethod
    def harmonic(cls, s: Number | ConeGeometry = 1, omega: float = 1.0,
                 M: float = 1.0) -> "PhysicalSystem":
        geo = s if isinstance(s, ConeGeometry) else ConeGeometry(s)
        return cls(Harmonic(omega), geo, M)

    @property
    def kind(self) -> str:
        return self.potential.name

    @property
    def is_coulomb(self) -> bool:
        return isinstance(self.potential, Coulomb)

    @property
    def s(self) -> float:
        return self.geometry.s

    @property
    def kappa(self) -> float:
        return self.potential.kappa

    @property
    def omega(self) -> float:
        return self.potential.omega

    @property
    def angular_shift(self) -> float:
        """Shift of m under one R+- application: s (Coulomb) or 2s (oscillator)."""
        return self.s if self.is_coulomb else 2.0 * self.s

    @property
    def angular_shift_fraction(self) -> Fraction | None:
        f = self.geometry.fraction
        if f is None:
            return None
        return f if self.is_coulomb else 2 * f

    def V(self, r):
        r = np.asarray(r, dtype=float)
        if self.is_coulomb:
            return -self.kappa / r
        return 0.5 * self.M * self.omega ** 2 * r ** 2

    def dV(self, r):
        r = np.asarray(r, dtype=float)
        if self.is_coulomb:
            return self.kappa / r ** 2
        return self.M * self.omega ** 2 * r

    def V_eff(self, r, L: float):
        """Effective radial potential including the centrifugal term."""
        r = np.asarray(r, dtype=float)
        return L ** 2 / (2.0 * self.M * r ** 2 * self.s ** 2) + self.V(r)

    def hamiltonian(self, r, p_r, L: float):
        return p_r ** 2 / (2.0 * self.M) + self.V_eff(r, L)

    def with_geometry(self, geometry: ConeGeometry) -> "PhysicalSystem":
        return PhysicalSystem(self.potential, geometry, self.M)
