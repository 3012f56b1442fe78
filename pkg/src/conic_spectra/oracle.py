"""Finite-difference radial eigensolver used as an independent reference.

With ``t = ln r`` the radial equation in the sector ``exp(i mu phi)`` reads

    -(1/2M) psi_tt + (ell^2 / 2M) psi + r^2 V psi = E r^2 psi,   ell = mu/s,

which removes the centrifugal singularity from the stencil.  A 3-point
stencil on a uniform ``t`` grid gives a symmetric tridiagonal pencil.  At the
inner end the Neumann condition ``psi_t = r psi' = 0`` is imposed (the
Friedrichs condition); at the outer end ``psi = 0``.  Eigenvalues come from
Sturm-sequence bisection and are Richardson-extrapolated over three grids.

Nothing here shares code with the closed-form solutions.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal, solve_banded

from .system import PhysicalSystem

DEFAULT_H = 0.01
INNER_OFFSET = 28.0  # e-folds of r below the characteristic inner scale
MAX_INNER_OFFSET = 120.0


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid ``t_j = t_min + j h`` in ``t = ln r``, ``j = 0 .. N-1``.

    The Dirichlet node sits one step past the last point.
    """

    t_min: float
    h: float
    N: int

    @property
    def t(self) -> np.ndarray:
        return self.t_min + self.h * np.arange(self.N)

    @property
    def r(self) -> np.ndarray:
        return np.exp(self.t)

    @property
    def r_min(self) -> float:
        return math.exp(self.t_min)

    @property
    def r_max(self) -> float:
        return math.exp(self.t_min + self.h * self.N)

    def refined(self, factor: int) -> "RadialGrid":
        return RadialGrid(self.t_min, self.h / factor, self.N * factor)


@dataclass
class OracleResult:
    m: float
    energies: np.ndarray  # extrapolated, ascending
    raw: np.ndarray  # shape (levels, num_states), coarse to fine
    convergence_estimate: np.ndarray  # per-level absolute error estimate
    order_ratio: np.ndarray  # (E_h - E_h/2) / (E_h/2 - E_h/4)
    converged: np.ndarray
    grid: RadialGrid  # finest grid
    psi: np.ndarray  # normalized psi_k on grid.r (measure r dr)
    weights: np.ndarray  # quadrature weights for int f r dr on grid.r

    @property
    def eigenvectors(self) -> np.ndarray:
        """``u_k(r) = sqrt(r) psi_k(r)``."""
        return self.psi * np.sqrt(self.grid.r)

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    def overlap(self, k: int, values: np.ndarray) -> float:
        """Normalized overlap of eigenvector ``k`` with samples on ``grid.r``."""
        a, b, w = self.psi[k], np.asarray(values, dtype=float), self.weights
        return float(abs(np.sum(w * a * b)) / math.sqrt(np.sum(w * a * a) * np.sum(w * b * b)))


def inner_offset(ell: float) -> float:
    """Grid extent below the inner scale; small ``ell`` needs more room.

    The Neumann condition at ``r_min`` perturbs levels by ~(r_min/r_c)^(2 ell).
    """
    if ell == 0 or ell >= 0.5:
        return INNER_OFFSET
    return max(INNER_OFFSET, min(14.0 / ell, MAX_INNER_OFFSET))


def default_grid(m: float, system: PhysicalSystem, num_states: int = 4,
                 h: float = DEFAULT_H) -> RadialGrid:
    """Grid reaching 10x the outer turning point of the highest requested state."""
    ell = abs(m) / system.s
    n = num_states - 1
    M = system.M
    if system.is_coulomb:
        n_eff = n + ell + 0.5
        r_c = n_eff / (2.0 * M * system.kappa)
        r_turn = 2.0 * n_eff ** 2 / (M * system.kappa)
        r_max = max(10.0 * r_turn, r_turn + 60.0 * n_eff / (M * system.kappa))
    else:
        r_c = 1.0 / math.sqrt(M * system.omega)
        r_turn = math.sqrt(2.0 * (2 * n + ell + 1.0) / (M * system.omega))
        r_max = max(10.0 * r_turn, math.sqrt(r_turn ** 2 + 80.0 / (M * system.omega)))
    t_min = math.log(r_c) - inner_offset(ell)
    N = int(math.ceil((math.log(r_max) - t_min) / h))
    return RadialGrid(t_min, h, N)


def _pencil(grid: RadialGrid, ell: float, system: PhysicalSystem):
    M, h = system.M, grid.h
    r = grid.r
    r2V = -system.kappa * r if system.is_coulomb else 0.5 * M * system.omega ** 2 * r ** 4
    d = 1.0 / (M * h * h) + ell * ell / (2.0 * M) + r2V
    off = np.full(grid.N - 1, -0.5 / (M * h * h))
    w = r * r
    # Neumann: ghost node psi_{-1} = psi_1, row halved to keep symmetry
    d[0] *= 0.5
    w[0] *= 0.5
    return d, off, w


def _energy_scale(system: PhysicalSystem) -> float:
    return system.M * system.kappa ** 2 if system.is_coulomb else system.omega


def _eigenvalues(grid, ell, system, num_states):
    d, off, w = _pencil(grid, ell, system)
    sc = 1.0 / np.sqrt(w)
    # bisection needs an absolute tolerance; LAPACK's default eps*||T|| is
    # useless here because ||T|| ~ e^(2 offset)
    return eigh_tridiagonal(d * sc * sc, off * sc[:-1] * sc[1:], eigvals_only=True,
                            select="i", select_range=(0, num_states - 1),
                            lapack_driver="stebz", tol=1e-14 * _energy_scale(system))


def _eigenvector(grid, ell, system, E, iterations=3):
    d, off, w = _pencil(grid, ell, system)
    sigma = E + 1e-11 * max(abs(E), _energy_scale(system))
    ab = np.zeros((3, grid.N))
    ab[0, 1:] = off
    ab[1] = d - sigma * w
    ab[2, :-1] = off
    x = np.ones(grid.N)
    for _ in range(iterations):
        x = solve_banded((1, 1), ab, w * x)
        x /= np.max(np.abs(x))
    return x


def solve_radial_sector(m: float, system: PhysicalSystem, num_states: int = 4,
                        grid: RadialGrid | None = None, rtol: float = 1e-6,
                        vectors: bool = True) -> OracleResult:
    """Lowest ``num_states`` levels of the sector with angular number ``m``.

    ``grid`` is the coarsest of three grids (``h``, ``h/2``, ``h/4``).
    ``m`` may be non-integer.  A level is flagged unconverged when the
    Richardson estimate or the inner-boundary error exceeds ``rtol |E|``.
    """
    if num_states < 1:
        raise ValueError("num_states must be >= 1")
    ell = abs(m) / system.s
    if grid is None:
        grid = default_grid(m, system, num_states)
    grids = [grid, grid.refined(2), grid.refined(4)]
    raw = np.array([_eigenvalues(g, ell, system, num_states) for g in grids])
    r1 = (4.0 * raw[1] - raw[0]) / 3.0
    r2 = (4.0 * raw[2] - raw[1]) / 3.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (raw[0] - raw[1]) / (raw[1] - raw[2])
    estimate = np.abs(r2 - r1)
    if ell > 0:
        boundary = math.exp(-2.0 * ell * inner_offset(ell))
        estimate = np.maximum(estimate, boundary * np.abs(r2))
    converged = estimate <= rtol * np.abs(r2)
    fine = grids[-1]
    weights = fine.r ** 2 * fine.h
    weights[0] *= 0.5
    psi = np.zeros((num_states, fine.N))
    if vectors:
        for k, E in enumerate(raw[2]):
            v = _eigenvector(fine, ell, system, E)
            v /= math.sqrt(np.sum(weights * v * v))
            psi[k] = v if v[0] >= 0 else -v
    return OracleResult(float(m), r2, raw, estimate, ratio, converged, fine, psi, weights)


def worker_count(single_thread: bool = False) -> int:
    if single_thread:
        return 1
    env = os.environ.get("CONIC_SPECTRA_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def solve_sectors(ms, system: PhysicalSystem, num_states: int = 4,
                  threads: int | None = None, **kwargs) -> list[OracleResult]:
    """Solve several sectors; results are returned in the order of ``ms``."""
    ms = list(ms)
    threads = worker_count() if threads is None else threads
    if threads <= 1 or len(ms) < 2:
        return [solve_radial_sector(m, system, num_states, **kwargs) for m in ms]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda m: solve_radial_sector(m, system, num_states, **kwargs), ms))
