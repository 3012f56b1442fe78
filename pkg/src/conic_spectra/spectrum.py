"""Bound-state energies, Casimir spin and degeneracy grouping."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .exceptions import FormulaNotApplicableError
from .geometry import ConeGeometry, RationalApprox
from .system import PhysicalSystem

Rational = Union[Fraction, float]

LEVEL_TOL = 1e-12


@dataclass(frozen=True, order=True)
class QuantumNumbers:
    n_r: int
    m: int

    def __post_init__(self):
        if int(self.n_r) != self.n_r or self.n_r < 0:
            raise ValueError(f"n_r must be a non-negative integer, got {self.n_r!r}")
        if int(self.m) != self.m:
            raise ValueError(f"m must be an integer, got {self.m!r}")
        object.__setattr__(self, "n_r", int(self.n_r))
        object.__setattr__(self, "m", int(self.m))

    def as_list(self) -> list[int]:
        return [self.n_r, self.m]


@dataclass
class EnergyLevel:
    E: float
    states: list[QuantumNumbers]
    casimir_spin: Rational
    key: Rational
    truncated: bool = False

    @property
    def degeneracy(self) -> int:
        return len(self.states)


def _qn(qn) -> QuantumNumbers:
    return qn if isinstance(qn, QuantumNumbers) else QuantumNumbers(*qn)


def _abs_m_over_s(m, system: PhysicalSystem) -> Rational:
    frac = system.geometry.fraction
    if frac is not None and isinstance(m, (int, Fraction)):
        return abs(Fraction(m)) / frac
    return abs(float(m)) / system.s


def level_key(qn, system: PhysicalSystem) -> Rational:
    """``n_r + |m|/s`` (Coulomb) or ``2 n_r + |m|/s`` (oscillator); exact when possible."""
    qn = _qn(qn)
    factor = 1 if system.is_coulomb else 2
    return factor * qn.n_r + _abs_m_over_s(qn.m, system)


def energy_from_key(key: Rational, system: PhysicalSystem) -> float:
    if system.is_coulomb:
        return -system.M * system.kappa ** 2 / (2.0 * (float(key) + 0.5) ** 2)
    return system.omega * (float(key) + 1.0)


def energy(qn, system: PhysicalSystem) -> float:
    return energy_from_key(level_key(qn, system), system)


def casimir_spin(qn, system: PhysicalSystem) -> Rational:
    """``S = n_r + |m|/s`` (Coulomb) or ``n_r + |m|/(2s)`` (oscillator).

    ``qn`` may carry a non-integer ``m`` (as a Fraction or float) for states
    generated by the ladder operators.
    """
    n_r, m = (qn.n_r, qn.m) if isinstance(qn, QuantumNumbers) else qn
    ratio = _abs_m_over_s(m, system)
    return n_r + (ratio if system.is_coulomb else ratio / 2)


def _would_join(key, system, n_r_max, m_max, exact) -> bool:
    """Does some state just outside the box share ``key``?"""
    s = system.geometry.fraction if exact else system.s
    factor = 1 if system.is_coulomb else 2
    # states outside the box: n_r > n_r_max (any |m|) or |m| > m_max (any n_r).
    # key = factor n_r + |m|/s is increasing in both, so only candidates with
    # key' <= key matter; solve for the free variable.
    for n_r in range(n_r_max + 1, int(float(key) / factor) + 2):
        rest = key - factor * n_r
        if float(rest) < -LEVEL_TOL:
            break
        m = rest * s
        if _is_integer(m, exact):
            return True
    for n_r in range(0, int(float(key) / factor) + 1):
        m = (key - factor * n_r) * s
        if float(m) > m_max and _is_integer(m, exact):
            return True
    return False


def _is_integer(x, exact) -> bool:
    if exact:
        return Fraction(x).denominator == 1
    return abs(x - round(x)) <= 1e-9 * max(1.0, abs(x))


def enumerate_levels(system: PhysicalSystem, n_r_max: int, m_max: int) -> list[EnergyLevel]:
    """Group every state with ``n_r <= n_r_max``, ``|m| <= m_max`` into levels."""
    if n_r_max < 0 or m_max < 0:
        raise ValueError("enumeration bounds must be non-negative")
    exact = system.geometry.fraction is not None
    states = [QuantumNumbers(n, m) for n in range(n_r_max + 1) for m in range(-m_max, m_max + 1)]
    keyed = [(level_key(q, system), q) for q in states]
    groups: list[tuple[Rational, list[QuantumNumbers]]] = []
    if exact:
        table = defaultdict(list)
        for k, q in keyed:
            table[k].append(q)
        groups = sorted(table.items(), key=lambda kv: kv[0])
    else:
        keyed.sort(key=lambda kq: kq[0])
        for k, q in keyed:
            if groups and abs(k - groups[-1][0]) <= LEVEL_TOL * max(1.0, abs(k)):
                groups[-1][1].append(q)
            else:
                groups.append((k, [q]))
    levels = []
    for k, qs in groups:
        qs = sorted(qs, key=lambda q: (q.n_r, -q.m))
        levels.append(EnergyLevel(
            E=energy_from_key(k, system),
            states=qs,
            casimir_spin=casimir_spin(qs[0], system),
            key=k,
            truncated=_would_join(k, system, n_r_max, m_max, exact),
        ))
    return levels


def degeneracy_formula(S, s) -> int:
    """``g = floor(2S/q) + 1`` for ``s = p/q`` (Coulomb), applicable when ``s S`` is a natural number."""
    S = Fraction(S) if not isinstance(S, str) else Fraction(S)
    if isinstance(s, RationalApprox):
        if not s.exact:
            raise FormulaNotApplicableError("scale factor is not rational")
        frac = s.fraction
    elif isinstance(s, ConeGeometry):
        if s.fraction is None:
            raise FormulaNotApplicableError("scale factor is not rational")
        frac = s.fraction
    else:
        frac = Fraction(s)
    product = frac * S
    if product.denominator != 1 or product < 0:
        raise FormulaNotApplicableError(f"s*S = {product} is not a natural number")
    return math.floor(2 * S / frac.denominator) + 1


def level_table(levels: list[EnergyLevel]) -> list[dict]:
    """Export records ``{E, S, states, degeneracy, truncated}``."""
    out = []
    for lv in levels:
        S = lv.casimir_spin
        out.append({
            "E": float(lv.E),
            "S": format_rational(S),
            "states": [q.as_list() for q in lv.states],
            "degeneracy": lv.degeneracy,
            "truncated": bool(lv.truncated),
        })
    return out


def format_rational(x) -> str | float:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return f"{x}/1"
    return float(x)
