"""Closed-form radial wavefunctions.

Every radial solution used here has the shape

    psi(r) = exp(-y/2) * x**nu * sum_j c_j y**j,   x = alpha r,  y = x**k

with ``k = 1`` for the 1/r potential and ``k = 2`` for the oscillator.  The
class :class:`RadialForm` stores exactly these data, which keeps derivatives,
products with powers of ``r`` and inner products in closed form.  Regular
eigenfunctions have ``nu = +|m|/s``, singular ones ``nu = -|m|/s``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import roots_genlaguerre

from .exceptions import ConicSpectraError, DenominatorPoleError, DivergentNormError
from .system import PhysicalSystem

EXPONENT_TOL = 1e-9


# ---------------------------------------------------------------- 1F1

def kummer_coefficients(n: int, b: float) -> np.ndarray:
    """Coefficients ``(-n)_k / ((b)_k k!)`` of the terminating series 1F1(-n, b, x)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    for k in range(n):
        if abs(b + k) < 1e-12:
            raise DenominatorPoleError(f"(b)_{k + 1} vanishes for b = {b}")
        coeffs[k + 1] = coeffs[k] * (k - n) / ((b + k) * (k + 1))
    return coeffs


def kummer_terminating(n: int, b: float, x):
    """Evaluate 1F1(-n, b, x) as a finite sum."""
    return P.polyval(np.asarray(x, dtype=float), kummer_coefficients(n, b))


# ---------------------------------------------------------------- RadialForm

@dataclass(frozen=True, eq=False)
class RadialForm:
    """``exp(-y/2) x**nu sum_j coeffs[j] y**j`` with ``x = alpha r``, ``y = x**k``."""

    nu: float
    coeffs: np.ndarray
    alpha: float
    k: int

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs))
        if not np.iscomplexobj(c):
            c = c.astype(float)
        object.__setattr__(self, "coeffs", c)

    # evaluation
    def __call__(self, r):
        x = self.alpha * np.asarray(r, dtype=float)
        y = x ** self.k
        return np.exp(-0.5 * y) * x ** self.nu * P.polyval(y, self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def max_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if len(self.coeffs) else 0.0

    # algebra
    def scale(self, c) -> "RadialForm":
        return RadialForm(self.nu, self.coeffs * c, self.alpha, self.k)

    def __neg__(self):
        return self.scale(-1.0)

    def mul_r(self, j: int) -> "RadialForm":
        """Multiply by ``r**j``."""
        return RadialForm(self.nu + j, self.coeffs / self.alpha ** j, self.alpha, self.k)

    def d_dr(self) -> "RadialForm":
        c = self.coeffs
        k = self.k
        shifted = np.concatenate([[0.0], c])  # y * P(y)
        dp = np.concatenate([[0.0], P.polyder(c) if len(c) > 1 else [0.0]])  # y * P'(y)
        q = _padd(self.nu * c, k * dp[:len(c) + 1])
        q = _padd(q, -0.5 * k * shifted)
        return RadialForm(self.nu - 1.0, self.alpha * q, self.alpha, self.k)

    def _offset(self, other: "RadialForm") -> int:
        if other.k != self.k or not math.isclose(other.alpha, self.alpha, rel_tol=1e-12):
            raise ValueError("cannot combine forms with different scales")
        d = (other.nu - self.nu) / self.k
        n = round(d)
        if abs(d - n) > EXPONENT_TOL:
            raise ValueError(f"exponents {self.nu} and {other.nu} are not aligned")
        return n

    def aligned(self, nu_base: float) -> np.ndarray:
        """Coefficients re-expressed on the base exponent ``nu_base <= nu``."""
        n = round((self.nu - nu_base) / self.k)
        return np.concatenate([np.zeros(n, dtype=self.coeffs.dtype), self.coeffs])

    def __add__(self, other: "RadialForm") -> "RadialForm":
        if isinstance(other, (int, float)) and other == 0:
            return self
        n = self._offset(other)
        lo, hi = (self, other) if n >= 0 else (other, self)
        c = _padd(lo.coeffs, hi.aligned(lo.nu))
        return RadialForm(lo.nu, c, self.alpha, self.k)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def trim(self, atol) -> "RadialForm":
        """Drop coefficients below ``atol`` (scalar or per coefficient) at both ends.

        Dropping at the low end shifts ``nu``.
        """
        c = self.coeffs
        keep = np.nonzero(np.abs(c) > atol)[0]
        if len(keep) == 0:
            return RadialForm(self.nu, np.zeros(1, dtype=c.dtype), self.alpha, self.k)
        lo, hi = keep[0], keep[-1]
        return RadialForm(self.nu + self.k * lo, c[lo:hi + 1], self.alpha, self.k)

    def is_zero(self, atol: float) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= atol))

    # integrals with measure r dr
    def inner(self, other: "RadialForm") -> complex | float:
        """``int_0^inf conj(self) other r dr``, exact for these forms.

        In ``y`` the integrand is ``y**a exp(-y)`` times a polynomial, so
        generalized Gauss-Laguerre quadrature with enough nodes is exact.
        Summing closed-form Gamma moments instead cancels catastrophically
        once the polynomial degree passes ~10.
        """
        if other.k != self.k or not math.isclose(other.alpha, self.alpha, rel_tol=1e-12):
            raise ValueError("inner product needs a common scale")
        a = (self.nu + other.nu + 2.0) / self.k - 1.0
        if a <= -1.0 + EXPONENT_TOL:
            raise DivergentNormError("integral diverges at r = 0")
        n = (len(self.coeffs) + len(other.coeffs)) // 2 + 1
        y, w = roots_genlaguerre(n, a)
        vals = np.conj(P.polyval(y, self.coeffs)) * P.polyval(y, other.coeffs)
        val = np.sum(w * vals) / (self.k * self.alpha ** 2)
        return val if np.iscomplexobj(val) else float(val)

    def norm(self) -> float:
        return math.sqrt(abs(self.inner(self)))

    @property
    def normalizable(self) -> bool:
        lead = self.trim(0.0)
        return 2.0 * lead.nu + 2.0 > EXPONENT_TOL

    def to_grid(self, r):
        """Values and first derivative on ``r``."""
        return self(r), self.d_dr()(r)


def _padd(a, b):
    n = max(len(a), len(b))
    dtype = np.result_type(a, b)
    out = np.zeros(n, dtype=dtype)
    out[:len(a)] += a
    out[:len(b)] += b
    return out


def combine(terms) -> tuple[RadialForm, np.ndarray]:
    """Sum forms on a common base; also return the per-power term scale.

    ``scale[j]`` is the largest magnitude any single term contributes to
    coefficient ``j`` of the sum.  Round-off from cancellation at that power
    is relative to it, which is what termination tests and trimming need;
    a single global scale would wipe out small but genuine coefficients of
    high-degree polynomials.
    """
    terms = list(terms)
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    scale = np.zeros(len(total.coeffs))
    for t in terms:
        c = np.abs(t.aligned(total.nu))
        scale[:len(c)] = np.maximum(scale[:len(c)], c)
    return total, scale


def overlap(a: RadialForm, b: RadialForm) -> float:
    """``|<a|b>| / (|a| |b|)``; cosine of aligned coefficients if either diverges."""
    if a.normalizable and b.normalizable:
        return abs(a.inner(b)) / (a.norm() * b.norm())
    base = min(a.nu, b.nu)
    ca, cb = a.aligned(base), b.aligned(base)
    n = max(len(ca), len(cb))
    ca = np.pad(ca, (0, n - len(ca)))
    cb = np.pad(cb, (0, n - len(cb)))
    return float(abs(np.vdot(ca, cb)) / (np.linalg.norm(ca) * np.linalg.norm(cb)))


# ---------------------------------------------------------------- eigenfunctions

class Branch(str, enum.Enum):
    REGULAR = "regular"
    SINGULAR = "singular"


class BoundaryClass(str, enum.Enum):
    PHYSICAL = "physical"
    VIOLATES_BOUNDARY = "violates_boundary"
    NON_NORMALIZABLE = "non_normalizable"


def branch_energy(n_r: int, nu: float, system: PhysicalSystem) -> float:
    """Energy of the polynomial solution with leading exponent ``nu``."""
    if system.is_coulomb:
        denom = n_r + nu + 0.5
        if denom <= 0:
            raise ConicSpectraError("no decaying Coulomb solution for this exponent")
        return -system.M * system.kappa ** 2 / (2.0 * denom ** 2)
    return system.omega * (2 * n_r + nu + 1.0)


@dataclass(frozen=True, eq=False)
class RadialWavefunction:
    kind: str
    n_r: int
    m: float
    branch: Branch
    alpha: float
    A: float
    poly: np.ndarray  # 1F1 coefficients in y, poly[0] = 1
    nu: float
    energy: float

    @property
    def form(self) -> RadialForm:
        return RadialForm(self.nu, self.A * self.poly, self.alpha, 1 if self.kind == "coulomb" else 2)

    def __call__(self, r):
        return self.form(r)

    def derivative(self, r):
        return self.form.d_dr()(r)


def build_wavefunction(n_r: int, m: float, system: PhysicalSystem,
                       branch: Branch | str = Branch.REGULAR,
                       normalized: bool = True, validate: bool = True) -> RadialWavefunction:
    """Closed-form radial solution with ``n_r`` radial quanta and angular number ``m``.

    ``m`` may be non-integer (ladder-generated states).  Singular states that
    are not square integrable are returned with ``A = 1``.  The oscillator
    singular branch is checked against the radial equation before use.
    """
    branch = Branch(branch)
    ell = abs(m) / system.s
    nu = ell if branch is Branch.REGULAR else -ell
    if system.is_coulomb:
        b = 2.0 * nu + 1.0
        E = branch_energy(n_r, nu, system)
        alpha = math.sqrt(8.0 * system.M * abs(E))
        k = 1
    else:
        b = nu + 1.0
        E = branch_energy(n_r, nu, system)
        alpha = math.sqrt(system.M * system.omega)
        k = 2
    poly = kummer_coefficients(n_r, b)
    A = 1.0
    base = RadialForm(nu, poly, alpha, k)
    if normalized and base.normalizable:
        A = 1.0 / base.norm()
    wf = RadialWavefunction(system.kind, n_r, float(m), branch, alpha, A, poly, nu, E)
    if validate and branch is Branch.SINGULAR and not system.is_coulomb:
        res = schrodinger_residual(wf, E, system)
        if res > 1e-8:
            raise ConicSpectraError(
                f"oscillator singular branch failed validation (residual {res:.2e})")
    return wf


def normalize(wf: RadialWavefunction | RadialForm) -> float:
    """Constant ``A > 0`` giving unit norm with measure ``r dr``."""
    form = wf.form if isinstance(wf, RadialWavefunction) else wf
    unit = RadialForm(form.nu, form.coeffs / (wf.A if isinstance(wf, RadialWavefunction) else 1.0),
                      form.alpha, form.k)
    if not unit.normalizable:
        raise DivergentNormError(f"leading exponent {unit.trim(0).nu:.6g} <= -1: not normalizable")
    return 1.0 / unit.norm()


def default_grid(form: RadialForm | RadialWavefunction, n: int = 2000) -> np.ndarray:
    """Radial grid covering the region where the function is appreciable."""
    if isinstance(form, RadialWavefunction):
        form = form.form
    deg, nu = form.degree, max(form.nu, 0.0)
    if form.k == 1:
        x_hi = 4.0 * (deg + nu) + 50.0
    else:
        x_hi = math.sqrt(2.0 * (2 * deg + nu) + 1.0) + 7.0
    x = np.linspace(x_hi / n, x_hi, n)
    return x / form.alpha


def count_nodes(wf: RadialWavefunction, r_max: float | None = None,
                samples: int = 20001) -> int:
    """Sign changes of ``psi`` on ``(0, r_max)``.

    The prefactor ``exp(-y/2) x**nu`` is positive, so the sign is that of the
    polynomial in ``y``; sampling the polynomial directly avoids underflow of
    ``psi`` far out.  Without ``r_max`` the Cauchy bound on its roots sets the
    interval so every node is enclosed.
    """
    poly = wf.poly
    k = 1 if wf.kind == "coulomb" else 2
    if r_max is None:
        if len(poly) < 2:
            return 0
        y_max = 1.05 * (1.0 + np.max(np.abs(poly[:-1] / poly[-1])))
    else:
        y_max = (wf.alpha * r_max) ** k
    y = np.geomspace(y_max * 1e-12, y_max, samples)
    signs = np.sign(P.polyval(y, poly))
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def schrodinger_residual(wf: RadialWavefunction | RadialForm, E: float,
                         system: PhysicalSystem, grid=None, m: float | None = None) -> float:
    """``max |H psi - E psi| / max |E psi|`` with analytic derivatives."""
    from .operators import radial_hamiltonian
    if isinstance(wf, RadialWavefunction):
        form, mu = wf.form, wf.m
    else:
        form, mu = wf, m
    if mu is None:
        raise ValueError("angular number m required for a bare RadialForm")
    hpsi = radial_hamiltonian(form, mu, system)
    res, _ = combine([hpsi, form.scale(-E)])
    r = default_grid(form) if grid is None else np.asarray(grid, dtype=float)
    return float(np.max(np.abs(res(r))) / np.max(np.abs(E * form(r))))


def boundary_classify(wf: RadialWavefunction | RadialForm, atol: float = 0.0) -> BoundaryClass:
    """Friedrichs test ``lim r psi'(r) = 0`` plus square integrability.

    With leading behaviour ``r**nu``, ``r psi' ~ nu r**nu`` vanishes iff
    ``nu > 0`` (``nu = 0`` has a bounded derivative), and the norm
    ``int r**(2 nu + 1) dr`` converges at the tip iff ``nu > -1``.
    """
    form = wf.form if isinstance(wf, RadialWavefunction) else wf
    lead = form.trim(atol * form.max_coeff)
    if lead.nu >= -EXPONENT_TOL:
        return BoundaryClass.PHYSICAL
    if lead.nu > -1.0 + EXPONENT_TOL:
        return BoundaryClass.VIOLATES_BOUNDARY
    return BoundaryClass.NON_NORMALIZABLE


def sample_wavefunction(wf: RadialWavefunction | RadialForm, r) -> dict[str, np.ndarray]:
    """Columns ``r, psi, dpsi_dr, r_dpsi_dr`` (boundary diagnostic)."""
    form = wf.form if isinstance(wf, RadialWavefunction) else wf
    r = np.asarray(r, dtype=float)
    psi, dpsi = form.to_grid(r)
    return {"r": r, "psi": psi, "dpsi_dr": dpsi, "r_dpsi_dr": r * dpsi}
