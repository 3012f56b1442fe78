"""Runge-Lenz ladder operators acting on closed-form eigenstates.

``R+-`` act analytically on :class:`RadialForm` objects.  After each
application the product is identified with a closed-form solution: the
branch is read off the leading exponent, ``n_r`` off the polynomial degree.
States with non-integer ``m_eff`` are carried along exactly like periodic
ones; periodicity is only a classification flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import operators as ops
from .exceptions import ConicSpectraError
from .spectrum import casimir_spin
from .system import PhysicalSystem
from .wavefunctions import (BoundaryClass, Branch, RadialForm,
                            boundary_classify, build_wavefunction, combine,
                            default_grid, overlap)

ZERO_TOL = 1e-12
FD_FLOOR = 1e-9


class _Zero:
    """Marker returned when a ladder operator annihilates its input."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ZERO"

    def __bool__(self):
        return False


ZERO = _Zero()


@dataclass(frozen=True, eq=False)
class LadderState:
    form: RadialForm
    m_eff: float
    energy: float
    n_r: int | None
    branch: Branch | None
    classification: BoundaryClass
    m_exact: Fraction | None = None
    overlap: float | None = None  # with the closed form at (n_r, m_eff, branch)
    grid_check: float | None = None  # analytic vs finite-difference product
    constant: complex | None = None  # product / unit-normalized closed form

    @property
    def periodic(self) -> bool:
        if self.m_exact is not None:
            return self.m_exact.denominator == 1
        return abs(self.m_eff - round(self.m_eff)) <= 1e-9

    @property
    def physical(self) -> bool:
        return self.periodic and self.classification is BoundaryClass.PHYSICAL

    @property
    def wf(self) -> RadialForm:
        return self.form

    def label(self) -> str:
        if self.m_exact is not None:
            m = str(self.m_exact)
        else:
            m = f"{self.m_eff:g}"
        return f"({self.n_r}, {m})"


def state(n_r: int, m, system: PhysicalSystem, branch: Branch | str = Branch.REGULAR) -> LadderState:
    """Closed-form eigenstate wrapped as a ladder state."""
    m_exact = Fraction(m) if isinstance(m, (int, Fraction)) else None
    wf = build_wavefunction(n_r, float(m), system, branch)
    return LadderState(wf.form, float(m), wf.energy, n_r, wf.branch,
                       boundary_classify(wf), m_exact, 1.0, None, None)


def _identify(form: RadialForm, m_eff: float, system: PhysicalSystem):
    ell = abs(m_eff) / system.s
    if abs(form.nu - ell) <= 1e-8:
        return Branch.REGULAR
    if abs(form.nu + ell) <= 1e-8:
        return Branch.SINGULAR
    return None


def _grid_check(src: LadderState, sign: int, system: PhysicalSystem,
                product: RadialForm, scale: float) -> float:
    """Relative deviation between analytic and 4th-order FD ladder products."""
    r = default_grid(src.form, 4001)
    r = r[r > 0.05 * r[-1]]  # stay off the tip where singular branches blow up
    g = GridFunction(r, src.form(r))
    num = ops.radial_ladder(g, src.m_eff, sign, system)
    inner = slice(4, -4)
    exact = product(r)[inner] * scale
    ref = np.max(np.abs(exact)) if np.max(np.abs(exact)) > 0 else 1.0
    return float(np.max(np.abs(num.values[inner] - exact)) / ref)


def apply_ladder(src: LadderState, direction: int, system: PhysicalSystem,
                 rescaled: bool = True, grid_check: bool = True,
                 zero_tol: float = ZERO_TOL):
    """Apply ``R+`` (``direction=+1``) or ``R-`` (``-1``) to ``src``.

    Returns a new :class:`LadderState` or :data:`ZERO` when every coefficient
    of the product is below ``zero_tol`` relative to the largest term feeding
    that coefficient.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    terms = ops.ladder_terms(src.form, src.m_eff, direction, system)
    total, scale = combine(terms)
    if total.is_zero(zero_tol * scale):
        return ZERO
    factor = ops.ladder_rescaling(system, src.energy) if rescaled else 1.0
    product = total.trim(zero_tol * scale).scale(factor)
    w = system.angular_shift
    m_new = src.m_eff + direction * w
    m_exact = None
    shift_frac = system.angular_shift_fraction
    if src.m_exact is not None and shift_frac is not None:
        m_exact = src.m_exact + direction * shift_frac
        m_new = float(m_exact)
    branch = _identify(product, m_new, system)
    n_r = product.degree if branch is not None else None
    ov, const = None, None
    if branch is not None:
        try:
            ref = build_wavefunction(n_r, m_new, system, branch, validate=False).form
        except ConicSpectraError:
            ref = None
        if ref is not None:
            ov = overlap(product, ref)
            unit = ref.scale(1.0 / ref.norm()) if ref.normalizable else ref
            const = complex(product.coeffs[0] / unit.coeffs[0])
    gc = _grid_check(src, direction, system, total, 1.0) if grid_check else None
    return LadderState(product, m_new, src.energy, n_r, branch,
                       boundary_classify(product), m_exact, ov, gc, const)


def ladder_step_bookkeeping(qn, direction: int, kind: str, s):
    """Label bookkeeping for one ladder step, following the three sign cases.

    ``m > 0``: R+ gives (n_r - 1, m + w), R- gives (n_r + 1, m - w);
    ``m < 0``: R+ gives (n_r + 1, m + w), R- gives (n_r - 1, m - w);
    ``m = 0``: R+- gives (n_r - 1, +-w); ``w = s`` or ``2s``.
    Returns :data:`ZERO` when ``n_r`` would become negative.
    """
    n_r, m = qn
    w = s if kind == "coulomb" else 2 * s
    if m > 0:
        dn = -direction
    elif m < 0:
        dn = direction
    else:
        dn = -1
    n_new = n_r + dn
    if n_new < 0:
        return ZERO
    return n_new, m + direction * w


def check_termination(src: LadderState, system: PhysicalSystem,
                      direction: int | None = None) -> bool:
    """True when ``R+`` (top state) or ``R-`` (bottom state) annihilates ``src``."""
    if direction is None:
        direction = 1 if src.m_eff >= 0 else -1
    return apply_ladder(src, direction, system, grid_check=False) is ZERO


@dataclass
class Multiplet:
    S: Fraction | float
    members: list[LadderState]
    terminated: bool
    truncated: bool
    stop_reason: str = ""

    @property
    def physical_count(self) -> int:
        return sum(1 for m in self.members if m.physical)


def _spin_of(top: LadderState, system: PhysicalSystem):
    m = top.m_exact if top.m_exact is not None else top.m_eff
    return casimir_spin((top.n_r, m), system)


def build_multiplet(top: LadderState, system: PhysicalSystem, max_steps: int = 50) -> Multiplet:
    """Lower from ``top`` until the chain vanishes, turns singular or hits ``max_steps``.

    Once a member leaves the regular branch every further lowering stays
    singular, so the first such member is kept (it is the one that shows the
    boundary failure) and the chain stops there.  ``truncated`` marks every
    chain that did not end in an exact zero.
    """
    if not check_termination(top, system, +1):
        raise ConicSpectraError(
            f"state {top.label()} is not a top state: check_termination found R+ nonzero")
    members = [top]
    cur = top
    reason = "max_steps"
    for _ in range(max_steps):
        nxt = apply_ladder(cur, -1, system, grid_check=False)
        if nxt is ZERO:
            reason = "zero"
            break
        members.append(nxt)
        if nxt.classification is not BoundaryClass.PHYSICAL:
            reason = "singular"
            break
        cur = nxt
    terminated = reason == "zero"
    return Multiplet(_spin_of(top, system), members, terminated, not terminated, reason)


def top_state(n_r: int, m: int, system: PhysicalSystem) -> LadderState:
    """Raise a physical state with ``m >= 0`` to the top of its chain."""
    cur = state(n_r, m, system)
    while True:
        nxt = apply_ladder(cur, 1, system, grid_check=False)
        if nxt is ZERO:
            return cur
        cur = nxt


def casimir_apply(src: LadderState, system: PhysicalSystem, grid=None) -> tuple[float, float]:
    """Return ``(c, deviation)`` with ``C psi ~ c psi`` fitted by least squares.

    ``C = (R+R- + R-R+)/2 + L~^2`` in rescaled generators.
    """
    mu, f = src.m_eff, src.form
    w = system.angular_shift
    lowered = ops.radial_ladder(f, mu, -1, system)
    raised = ops.radial_ladder(f, mu, 1, system)
    pm = ops.radial_ladder(lowered, mu - w, 1, system)
    mp = ops.radial_ladder(raised, mu + w, -1, system)
    c_r = ops.ladder_rescaling(system, src.energy) ** 2
    c_l = (mu * ops.angular_rescaling(system)) ** 2
    cpsi, _ = combine([pm.scale(0.5 * c_r), mp.scale(0.5 * c_r), f.scale(c_l)])
    r = default_grid(f) if grid is None else np.asarray(grid, dtype=float)
    a, b = f(r), cpsi(r)
    c = float(np.dot(a, b) / np.dot(a, a))
    dev = float(np.max(np.abs(b - c * a)) / max(np.max(np.abs(c * a)), 1e-300))
    return c, dev


# ---------------------------------------------------------------- algebra checks

class GridFunction:
    """Samples on a uniform grid; derivatives by 4th-order central differences."""

    def __init__(self, r, values):
        self.r = np.asarray(r, dtype=float)
        self.values = np.asarray(values)

    @property
    def h(self) -> float:
        return float(self.r[1] - self.r[0])

    def d_dr(self):
        v, h = self.values, self.h
        d = np.zeros_like(v)
        d[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
        d[1] = (v[2] - v[0]) / (2 * h)
        d[-2] = (v[-1] - v[-3]) / (2 * h)
        d[0] = (v[1] - v[0]) / h
        d[-1] = (v[-1] - v[-2]) / h
        return GridFunction(self.r, d)

    def mul_r(self, j):
        return GridFunction(self.r, self.values * self.r ** j)

    def scale(self, c):
        return GridFunction(self.r, self.values * c)

    def __add__(self, other):
        return GridFunction(self.r, self.values + other.values)

    def samples(self):
        return self.values


class Jet:
    """Exact derivative jet: ``rows[j]`` holds the j-th derivative on ``r``."""

    def __init__(self, r, rows):
        self.r = np.asarray(r, dtype=float)
        self.rows = np.asarray(rows)

    def d_dr(self):
        if len(self.rows) < 2:
            raise ValueError("jet exhausted; build the bump with more derivatives")
        return Jet(self.r, self.rows[1:])

    def mul_r(self, j):
        n = len(self.rows)
        out = np.zeros_like(self.rows, dtype=np.result_type(self.rows, float))
        for order in range(n):
            acc = 0
            for i in range(order + 1):
                # i-th derivative of r**j
                coef = 1.0
                for t in range(i):
                    coef *= (j - t)
                if coef == 0:
                    continue
                acc = acc + math.comb(order, i) * coef * self.r ** (j - i) * self.rows[order - i]
            out[order] = acc
        return Jet(self.r, out)

    def scale(self, c):
        return Jet(self.r, self.rows * c)

    def __add__(self, other):
        n = min(len(self.rows), len(other.rows))
        return Jet(self.r, self.rows[:n] + other.rows[:n])

    def samples(self):
        return self.rows[0]


@dataclass(frozen=True)
class Bump:
    """``f(r) = exp(w / ((r - a)(r - b)))`` on ``(a, b)``, zero elsewhere (C-infinity)."""

    a: float = 1.0
    b: float = 3.0
    w: float = 1.0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        inside = (r > self.a) & (r < self.b)
        ri = r[inside]
        out[inside] = np.exp(self.w / ((ri - self.a) * (ri - self.b)))
        return out

    def jet(self, r, order: int) -> Jet:
        """Derivatives up to ``order`` from ``f' = g' f`` by Leibniz recursion.

        ``g = w/((r-a)(r-b)) = c (1/(r-b) - 1/(r-a))`` with ``c = w/(b-a)``,
        so ``g^(n) = c (-1)^n n! ((r-b)^(-n-1) - (r-a)^(-n-1))``.
        """
        r = np.asarray(r, dtype=float)
        inside = (r > self.a) & (r < self.b)
        ri = r[inside]
        c = self.w / (self.b - self.a)
        g = [c * (-1) ** n * math.factorial(n) * ((ri - self.b) ** (-n - 1) - (ri - self.a) ** (-n - 1))
             for n in range(order + 1)]
        f = [np.exp(self.w / ((ri - self.a) * (ri - self.b)))]
        for n in range(order):
            f.append(sum(math.comb(n, k) * g[k + 1] * f[n - k] for k in range(n + 1)))
        rows = np.zeros((order + 1, len(r)))
        rows[:, inside] = np.array(f)
        return Jet(r, rows)


def _sector_norm(psi: ops.SectorFunction, weight) -> float:
    tot = 0.0
    for f in psi.parts.values():
        v = f.samples()
        tot += float(np.sum(np.abs(v) ** 2 * weight))
    return math.sqrt(tot)


def _commutator(A, B, psi):
    return A(B(psi)) - B(A(psi))


def _relation_residuals(psi: ops.SectorFunction, system: PhysicalSystem, weight,
                        rescale: float) -> dict[str, float]:
    """Relative residuals of the commutation relations on ``psi``."""
    H = lambda f: ops.apply_H(f, system)
    L = ops.apply_L
    Rx = lambda f: ops.apply_Rx(f, system).scale(rescale)
    Ry = lambda f: ops.apply_Ry(f, system).scale(rescale)
    lt = ops.angular_rescaling(system)
    Lt = lambda f: ops.apply_L(f).scale(lt)
    M = system.M

    def rel(lhs, rhs):
        num = _sector_norm(lhs - rhs, weight)
        den = max(_sector_norm(lhs, weight), _sector_norm(rhs, weight), 1e-300)
        return num / den

    out = {
        "[R_x,H]": rel(Rx(H(psi)), H(Rx(psi))),
        "[R_y,H]": rel(Ry(H(psi)), H(Ry(psi))),
        "[L,H]": rel(L(H(psi)), H(L(psi))),
        "[Ry~,L~]-iRx~": rel(_commutator(Ry, Lt, psi), Rx(psi).scale(1j)),
        "[L~,Rx~]-iRy~": rel(_commutator(Lt, Rx, psi), Ry(psi).scale(1j)),
    }
    if system.is_coulomb:
        # [R~x,R~y] = i L~ with R~ = sqrt(-M/2H) R; on non-eigenstates use
        # the equivalent -(M/2)[Rx,Ry] = i H L~ (rescale is ignored here)
        Rx0 = lambda f: ops.apply_Rx(f, system)
        Ry0 = lambda f: ops.apply_Ry(f, system)
        out["[Rx~,Ry~]-iL~"] = rel(_commutator(Rx0, Ry0, psi).scale(-0.5 * M),
                                   H(Lt(psi)).scale(1j))
    else:
        out["[Rx~,Ry~]-iL~"] = rel(_commutator(Rx, Ry, psi), Lt(psi).scale(1j))
    return out


@dataclass
class AlgebraReport:
    residuals: dict[str, float]  # analytic (exact-jet) route
    fd_residuals: tuple[dict[str, float], dict[str, float]]  # grids h and h/2
    mu: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def fd_ratios(self) -> dict[str, float]:
        a, b = self.fd_residuals
        return {k: a[k] / b[k] if b[k] > 0 else math.inf for k in a}

    @property
    def converged(self) -> bool:
        """Each FD residual either falls at the 4th-order rate or sits at round-off."""
        return all(12.0 <= ratio <= 20.0 or self.fd_residuals[1][k] <= FD_FLOOR
                   for k, ratio in self.fd_ratios.items())


def algebra_residuals(mu: float, system: PhysicalSystem, bump: Bump = Bump(),
                      n_points: int = 4001, fd_points: int = 2001) -> AlgebraReport:
    """Commutator residuals on ``bump(r) exp(i mu phi)`` via exact jets and FD grids."""
    resc = 1.0 / (2.0 * system.omega) if not system.is_coulomb else 1.0
    r = np.linspace(bump.a, bump.b, n_points)
    weight = r * (r[1] - r[0])
    jet = bump.jet(r, 8)
    psi = ops.SectorFunction({mu: jet})
    analytic = _relation_residuals(psi, system, weight, resc)
    fd = []
    for n in (fd_points, 2 * fd_points - 1):
        pad = 0.1 * (bump.b - bump.a)
        rg = np.linspace(bump.a - pad, bump.b + pad, n)
        g = ops.SectorFunction({mu: GridFunction(rg, bump(rg))})
        fd.append(_relation_residuals(g, system, rg * (rg[1] - rg[0]), resc))
    return AlgebraReport(analytic, (fd[0], fd[1]), mu)


def eigenstate_algebra_residuals(src: LadderState, system: PhysicalSystem) -> dict[str, float]:
    """Rescaled su(2) relations on an eigenstate, including the Coulomb ``1/H`` factor."""
    psi = ops.SectorFunction({src.m_eff: src.form})
    resc = ops.ladder_rescaling(system, src.energy)
    r = default_grid(src.form)
    weight = r * (r[1] - r[0])

    def sampled(sf):
        out = ops.SectorFunction()
        for mu, f in sf.parts.items():
            out.parts[mu] = GridSamples(f(r))
        return out

    Rx = lambda f: ops.apply_Rx(f, system).scale(resc)
    Ry = lambda f: ops.apply_Ry(f, system).scale(resc)
    Lt = lambda f: ops.apply_L(f).scale(ops.angular_rescaling(system))

    def rel(lhs, rhs):
        lhs, rhs = sampled(lhs), sampled(rhs)
        num = _sector_norm(lhs - rhs, weight)
        den = max(_sector_norm(lhs, weight), _sector_norm(rhs, weight), 1e-300)
        return num / den

    return {
        "[Rx~,Ry~]-iL~": rel(_commutator(Rx, Ry, psi), Lt(psi).scale(1j)),
        "[Ry~,L~]-iRx~": rel(_commutator(Ry, Lt, psi), Rx(psi).scale(1j)),
        "[L~,Rx~]-iRy~": rel(_commutator(Lt, Rx, psi), Ry(psi).scale(1j)),
    }


class GridSamples:
    def __init__(self, values):
        self.values = np.asarray(values)

    def scale(self, c):
        return GridSamples(self.values * c)

    def __add__(self, other):
        return GridSamples(self.values + other.values)

    def samples(self):
        return self.values
