"""Cone geometry: scale factor, deficit angle and rational classification of s.

A cone with deficit angle ``delta`` is described by the scale factor
``s = 1 - delta / (2 pi)``.  The rescaled polar angle ``phi = chi / s`` runs
over ``[0, 2 pi]``.  Whether ``s`` (or ``2 s`` for the oscillator) is rational
decides if classical orbits close and if the spectrum has accidental
degeneracies, so the geometry carries an exact :class:`~fractions.Fraction`
whenever one is known.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

from .exceptions import InvalidGeometryError

DEFAULT_MAX_DENOMINATOR = 1000
DEFAULT_TOL = 1e-9

Number = Union[int, float, Fraction, str]


@dataclass(frozen=True)
class RationalApprox:
    """Continued-fraction convergent ``p/q`` of a positive real.

    ``exact`` is False when no convergent with ``q <= max_denominator`` is
    within the tolerance; the instance then acts as the irrational marker and
    carries the closest convergent found.
    """

    p: int
    q: int
    exact: bool

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def irrational(self) -> bool:
        return not self.exact

    def __float__(self) -> float:
        return self.p / self.q


def convergents(x: Fraction) -> Iterator[tuple[int, int]]:
    """Yield the continued-fraction convergents of a rational ``x`` in order."""
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    num, den = x.numerator, x.denominator
    while den:
        a, rem = divmod(num, den)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        yield h, k
        num, den = den, rem


def rationalize(x: float, max_denominator: int = DEFAULT_MAX_DENOMINATOR,
                tol: float = DEFAULT_TOL) -> RationalApprox:
    """Classify ``x > 0`` as rational (within ``tol``) or irrational.

    Returns the first convergent within ``tol`` of ``x``; if none exists with
    denominator ``<= max_denominator``, returns the last admissible convergent
    with ``exact=False``.
    """
    if not x > 0:
        raise ValueError(f"rationalize expects x > 0, got {x!r}")
    if max_denominator < 1 or tol <= 0:
        raise ValueError("max_denominator must be >= 1 and tol > 0")
    exact_x = Fraction(x)
    best = None
    for p, q in convergents(exact_x):
        if q > max_denominator:
            break
        best = (p, q)
        if abs(exact_x - Fraction(p, q)) <= tol:
            return RationalApprox(p, q, True)
    # best is never None: the first convergent always has q = 1
    return RationalApprox(best[0], best[1], False)


def parse_scale(value: Number) -> tuple[float, Fraction | None]:
    """Turn user input into ``(float value, exact fraction or None)``.

    Strings containing ``/`` and :class:`Fraction`/``int`` inputs force exact
    mode; decimals are classified with :func:`rationalize`.
    """
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            frac = Fraction(text)
            return float(frac), frac
        value = float(text)
    if isinstance(value, bool):
        raise TypeError("scale factor must be numeric")
    if isinstance(value, (int, Fraction)):
        frac = Fraction(value)
        return float(frac), frac
    x = float(value)
    if not x > 0:
        return x, None
    approx = rationalize(x)
    return x, (approx.fraction if approx.exact else None)


@dataclass(frozen=True)
class ConeGeometry:
    """Cone described by its scale factor ``s > 0``.

    Build with ``ConeGeometry(s)`` where ``s`` may be an int, a
    :class:`Fraction`, a ``"p/q"`` string or a float.  ``fraction`` holds the
    exact rational value of ``s`` when known, else None.
    """

    s: float
    fraction: Fraction | None = field(default=None, compare=False)

    def __init__(self, s: Number, fraction: Fraction | None = None):
        value, frac = parse_scale(s)
        if fraction is not None:
            frac = Fraction(fraction)
        if not value > 0 or not math.isfinite(value):
            raise InvalidGeometryError(f"scale factor must be positive, got {s!r}")
        object.__setattr__(self, "s", value)
        object.__setattr__(self, "fraction", frac)

    @property
    def delta(self) -> float:
        """Deficit angle in radians, ``2 pi (1 - s)``."""
        return 2.0 * math.pi * (1.0 - self.s)

    @property
    def is_rational(self) -> bool:
        return self.fraction is not None

    def rational(self, max_denominator: int = DEFAULT_MAX_DENOMINATOR,
                 tol: float = DEFAULT_TOL) -> RationalApprox:
        if self.fraction is not None and self.fraction.denominator <= max_denominator:
            return RationalApprox(self.fraction.numerator, self.fraction.denominator, True)
        return rationalize(self.s, max_denominator, tol)

    def wrap(self, phi):
        """Reduce an unwrapped rescaled angle to ``[0, 2 pi)``."""
        return phi % (2.0 * math.pi)

    def chi(self, phi):
        """Original polar angle on the unrolled cone, ``chi = s phi``."""
        return self.s * phi


def scale_from_deficit(delta: float) -> ConeGeometry:
    """Geometry for deficit angle ``delta`` (radians), ``s = 1 - delta/2pi``."""
    if not delta < 2.0 * math.pi:
        raise InvalidGeometryError(
            f"deficit angle {delta!r} >= 2 pi leaves no cone (s <= 0)")
    s = 1.0 - delta / (2.0 * math.pi)
    # Recognise deficits that are exact rational multiples of pi.
    ratio = Fraction(delta / math.pi).limit_denominator(DEFAULT_MAX_DENOMINATOR)
    frac = None
    if abs(float(ratio) * math.pi - delta) <= 1e-12 * max(1.0, abs(delta)):
        frac = 1 - ratio / 2
        s = float(frac)
    return ConeGeometry(s, fraction=frac) if frac is not None else ConeGeometry(s)


def closure_revolutions(geometry: ConeGeometry, kind: str,
                        max_denominator: int = DEFAULT_MAX_DENOMINATOR,
                        tol: float = DEFAULT_TOL) -> int | None:
    """Number of revolutions after which every bound orbit closes.

    Coulomb: smallest ``n`` with ``n s`` integer.  Harmonic: smallest ``n``
    with ``2 n s`` integer.  Returns None when the relevant ratio is classified
    irrational.
    """
    kind = kind.lower()
    if kind == "coulomb":
        factor = 1
    elif kind == "harmonic":
        factor = 2
    else:
        raise ValueError(f"unknown potential kind {kind!r}")
    if geometry.fraction is not None:
        return (factor * geometry.fraction).denominator
    approx = rationalize(factor * geometry.s, max_denominator, tol)
    return approx.q if approx.exact else None
