"""Invariant suites run by the ``verify`` command.

Each check reports the measured quantity next to its tolerance.  Suites are
plain functions returning lists of :class:`Check`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict
from fractions import Fraction

import numpy as np

from . import ladder as lad
from .classical import (OrbitSpec, detect_closure, integrate_orbit,
                        runge_lenz_length_identity, state_on_orbit)
from .geometry import ConeGeometry, closure_revolutions
from .oracle import RadialGrid, default_grid, solve_radial_sector
from .semiclassical import radial_action
from .spectrum import degeneracy_formula, energy, enumerate_levels
from .system import PhysicalSystem
from .wavefunctions import build_wavefunction, schrodinger_residual

SWEEP_S = ("1", "1/2", "2", "3", "2/3")


@dataclass
class Check:
    name: str
    passed: bool
    measured: float | int | str | None
    tolerance: float | int | str | None
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class VerifyConfig:
    oracle_h: float | None = None  # coarsest oracle step in ln r
    oracle_points: int | None = None  # alternatively, coarse point count
    oracle_rtol: float = 1e-5
    bs_tol: float = 1e-7
    casimir_tol: float = 1e-7
    algebra_tol: float = 1e-7
    closure_tol: float = 1e-6
    geometry: ConeGeometry | None = None  # extra degeneracy probe
    threads: int = 1


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        checks = fn(*args, **kwargs)
        dt = time.perf_counter() - t0
        for c in checks:
            c.seconds = dt / len(checks)
        return checks
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _systems(s):
    return [PhysicalSystem.coulomb(s), PhysicalSystem.harmonic(s)]


# ---------------------------------------------------------------- suites

@_timed
def suite_spectrum(cfg: VerifyConfig) -> list[Check]:
    out = []
    lv = enumerate_levels(PhysicalSystem.coulomb(3), 3, 9)
    degs = [x.degeneracy for x in lv[:4]]
    states = sorted(q.as_list() for q in lv[3].states)
    ok = degs == [1, 2, 2, 3] and states == [[0, -3], [0, 3], [1, 0]]
    out.append(Check("coulomb s=3 lowest degeneracies", ok, str(degs), "[1, 2, 2, 3]"))
    lv = enumerate_levels(PhysicalSystem.harmonic("1/2"), 4, 4)
    degs = [x.degeneracy for x in lv[:3]]
    out.append(Check("harmonic s=1/2 lowest degeneracies", degs == [1, 3, 5], str(degs), "[1, 3, 5]"))
    # formula vs enumeration where the multiplet is two-sided (S in Z/2)
    bad = []
    total = 0
    for p in range(1, 6):
        for q in range(1, 6):
            s = Fraction(p, q)
            if s.denominator != q:
                continue
            sy = PhysicalSystem.coulomb(s)
            levels = {x.key: x for x in enumerate_levels(sy, 6, int(6 * s) + 2)}
            for N in range(0, int(6 * s) + 1):
                S = Fraction(N) / s
                if (2 * S).denominator != 1 or S > 6:
                    continue
                total += 1
                g = degeneracy_formula(S, s)
                level = levels[S]
                if level.truncated or level.degeneracy != g:
                    bad.append(f"s={s} S={S}: {level.degeneracy} vs {g}")
    out.append(Check("degeneracy formula vs enumeration (S in Z/2)", not bad, len(bad), 0,
                     detail={"cases": total, "mismatches": bad}))
    if cfg.geometry is not None:
        sy = PhysicalSystem(PhysicalSystem.coulomb().potential, cfg.geometry)
        lv = enumerate_levels(sy, 4, 8)
        worst = max(x.degeneracy for x in lv if not x.truncated)
        if cfg.geometry.fraction is None:
            out.append(Check("irrational s: only parity doublets", worst <= 2, worst, 2))
        else:
            out.append(Check("configured s: degeneracy table", True, worst, None))
    return out


def _oracle_grid(m, sy, cfg: VerifyConfig) -> RadialGrid | None:
    if cfg.oracle_h is None and cfg.oracle_points is None:
        return None
    base = default_grid(m, sy, 4)
    span = base.h * base.N
    if cfg.oracle_points is not None:
        return RadialGrid(base.t_min, span / cfg.oracle_points, cfg.oracle_points)
    n = max(2, int(math.ceil(span / cfg.oracle_h)))
    return RadialGrid(base.t_min, span / n, n)


@_timed
def suite_oracle(cfg: VerifyConfig) -> list[Check]:
    worst, worst_ov, count, unconv = 0.0, 0.0, 0, 0
    for s in SWEEP_S:
        for sy in _systems(s):
            for m in range(7):
                res = solve_radial_sector(m, sy, 4, grid=_oracle_grid(m, sy, cfg))
                unconv += int(np.count_nonzero(~res.converged))
                for n in range(4):
                    E = energy((n, m), sy)
                    worst = max(worst, abs(res.energies[n] / E - 1.0))
                    wf = build_wavefunction(n, m, sy)
                    worst_ov = max(worst_ov, 1.0 - res.overlap(n, wf(res.grid.r)))
                    count += 1
    return [
        Check("oracle vs closed-form energies", worst <= cfg.oracle_rtol, worst, cfg.oracle_rtol,
              detail={"eigenvalues": count, "unconverged_flags": unconv}),
        Check("oracle eigenvector overlap", worst_ov <= 1e-6, worst_ov, 1e-6),
    ]


@_timed
def suite_wavefunctions(cfg: VerifyConfig) -> list[Check]:
    worst, nodes_ok = 0.0, True
    from .wavefunctions import count_nodes
    for s in ("1", "1/2", "2", "3"):
        for sy in _systems(s):
            for n in range(4):
                for m in range(-6, 7):
                    wf = build_wavefunction(n, m, sy)
                    worst = max(worst, schrodinger_residual(wf, wf.energy, sy))
                    nodes_ok &= count_nodes(wf) == n
    return [Check("regular eigenstates solve the radial equation", worst <= 1e-10, worst, 1e-10),
            Check("node count equals n_r", nodes_ok, str(nodes_ok), "True")]


@_timed
def suite_semiclassical(cfg: VerifyConfig) -> list[Check]:
    worst = 0.0
    for s in SWEEP_S:
        for sy in _systems(s):
            for n in range(4):
                for m in range(7):
                    if m == 0 and sy.is_coulomb:
                        continue
                    E = energy((n, m), sy)
                    a = radial_action(E, float(m), sy).action
                    worst = max(worst, abs(a - 2 * math.pi * (n + 0.5)))
    return [Check("Bohr-Sommerfeld action at exact energies", worst <= cfg.bs_tol, worst, cfg.bs_tol)]


CLOSURE_CASES = (("coulomb", "1"), ("coulomb", "1/2"), ("coulomb", "3/2"), ("coulomb", "3"),
                 ("harmonic", "1/2"), ("harmonic", "1"), ("harmonic", "3/2"))


def closure_case(kind: str, s: str, tol: float = 1e-6):
    sy = PhysicalSystem.coulomb(s) if kind == "coulomb" else PhysicalSystem.harmonic(s)
    L = 1.0
    if sy.is_coulomb:
        E = -0.5 * sy.M * sy.kappa ** 2 * sy.s ** 2 / L ** 2 * (1 - 0.5 ** 2)
    else:
        E = sy.omega * L / sy.s / math.sqrt(1 - 0.5 ** 2)
    spec = OrbitSpec(E, L, 0.0)
    st = state_on_orbit(spec, sy, 0.3)
    n = closure_revolutions(sy.geometry, kind)
    clo = detect_closure(st, L, sy, n_max=n, tol=tol, rtol=1e-11)
    traj = integrate_orbit(st, L, sy, phi_advance=2 * math.pi * n, tol=1e-11)
    drift = max(float(np.max(np.abs(traj.monitors[k] - traj.monitors[k][0])))
                / max(1.0, abs(traj.monitors[k][0])) for k in ("R_x", "R_y"))
    lhs, rhs = runge_lenz_length_identity(traj, L, sy)
    ident = float(np.max(np.abs(lhs - rhs)) / max(1.0, float(np.max(np.abs(rhs)))))
    return clo, drift, ident


@_timed
def suite_classical(cfg: VerifyConfig) -> list[Check]:
    out = []
    for kind, s in CLOSURE_CASES:
        clo, drift, ident = closure_case(kind, s, cfg.closure_tol)
        ok = clo.revolutions == clo.predicted and drift <= 1e-8 and ident <= 1e-12
        out.append(Check(f"{kind} s={s} closure/monitors", ok, clo.distances[-1], cfg.closure_tol,
                         detail={"revolutions": clo.revolutions, "predicted": clo.predicted,
                                 "runge_lenz_drift": drift, "length_identity": ident}))
    return out


@_timed
def suite_ladder(cfg: VerifyConfig) -> list[Check]:
    out = []
    for sy, m0, expect in ((PhysicalSystem.coulomb(3), 4, [(1, 1), (2, -2)]),
                           (PhysicalSystem.harmonic(3), 7, [(1, 1), (2, -5)])):
        cur = lad.state(0, m0, sy)
        got, ovs = [], []
        for _ in range(2):
            cur = lad.apply_ladder(cur, -1, sy)
            got.append((cur.n_r, int(cur.m_eff)))
            ovs.append(cur.overlap)
        ok = got == expect and min(ovs) >= 1 - 1e-8 and not cur.physical
        out.append(Check(f"{sy.kind} s=3 top (0,{m0}) lowering sequence", ok, str(got), str(expect),
                         detail={"overlaps": ovs, "third_member": cur.classification}))
    worst = 0.0
    for s in ("1", "1/2", "3", "3/2"):
        for sy in _systems(s):
            for n, m in ((0, 0), (0, 1), (1, 2), (0, 4), (2, 1)):
                c, _ = lad.casimir_apply(lad.state(n, m, sy), sy)
                S = float(lad.casimir_spin((n, m), sy))
                worst = max(worst, abs(c - S * (S + 1)) / max(1.0, S * (S + 1)))
    out.append(Check("Casimir eigenvalue S(S+1)", worst <= cfg.casimir_tol, worst, cfg.casimir_tol))
    worst, certified = 0.0, True
    for s in ("1", "3", "1/2"):
        for sy in _systems(s):
            rep = lad.algebra_residuals(1.7, sy)
            worst = max(worst, rep.max_residual)
            certified &= rep.converged
    out.append(Check("algebra residuals on bump functions", worst <= cfg.algebra_tol and certified,
                     worst, cfg.algebra_tol, detail={"fd_certified": certified}))
    tops_ok = all(lad.check_termination(lad.state(0, m, sy), sy)
                  for s in ("1", "3", "1/2") for sy in _systems(s) for m in range(0, 7))
    out.append(Check("R+ annihilates top states", tops_ok, str(tops_ok), "True"))
    sy = PhysicalSystem.coulomb(3)
    cur, nonzero = lad.state(0, 4, sy), 0
    for _ in range(4):
        cur = lad.apply_ladder(cur, -1, sy, grid_check=False)
        if cur is lad.ZERO:
            break
        nonzero += 1
    out.append(Check("S=4/3 chain does not terminate downward", nonzero == 4, nonzero, 4))
    return out


SUITES = {
    "spectrum": suite_spectrum,
    "wavefunctions": suite_wavefunctions,
    "semiclassical": suite_semiclassical,
    "classical": suite_classical,
    "ladder": suite_ladder,
    "oracle": suite_oracle,
}


def run_all(cfg: VerifyConfig | None = None, suites=None) -> list[Check]:
    cfg = cfg or VerifyConfig()
    names = list(SUITES) if suites is None else list(suites)
    checks = []
    for name in names:
        checks.extend(SUITES[name](cfg))
    return checks
