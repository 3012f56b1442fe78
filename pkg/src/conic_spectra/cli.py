"""Command-line front end: ``python -m conic_spectra <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 computation error, 3 verification
failure.  Options can also come from ``--config FILE`` (``key = value`` lines,
keys named like the long options with ``-`` or ``_``); command-line flags
take precedence over the file, which takes precedence over defaults.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from . import export
from . import ladder as lad
from .classical import OrbitSpec, detect_closure, integrate_orbit, state_on_orbit
from .exceptions import ConicSpectraError
from .geometry import ConeGeometry, closure_revolutions, scale_from_deficit
from .oracle import solve_sectors, worker_count
from .semiclassical import bohr_sommerfeld_energy, radial_action
from .spectrum import energy, enumerate_levels, level_table
from .system import Coulomb, Harmonic, PhysicalSystem
from .wavefunctions import (build_wavefunction, boundary_classify, default_grid,
                            sample_wavefunction)

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3

DEFAULTS = {
    "potential": "coulomb", "s": None, "delta": None, "mass": 1.0, "kappa": 1.0,
    "omega": 1.0, "format": None, "output": None, "single_thread": False,
    "nr_max": 3, "m_max": 6, "oracle": False,
    "E": None, "eccentricity": None, "L": 1.0, "phi0": 0.0, "revolutions": None,
    "samples": 400, "closure_tol": 1e-6,
    "nr": 0, "m": 0, "branch": "regular", "r_max": None, "points": 400,
    "max_steps": 50, "direction": "-", "steps": 1,
    "oracle_h": None, "oracle_points": None, "suites": None,
}

FLOAT_KEYS = {"mass", "kappa", "omega", "E", "eccentricity", "L", "phi0", "closure_tol",
              "r_max", "oracle_h"}
INT_KEYS = {"nr_max", "m_max", "revolutions", "samples", "nr", "m", "points", "max_steps",
            "steps", "oracle_points"}
BOOL_KEYS = {"single_thread", "oracle"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p: argparse.ArgumentParser):
    S = argparse.SUPPRESS
    p.add_argument("--potential", choices=("coulomb", "harmonic"), default=S)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--s", default=S, help="scale factor; 'p/q' forces exact mode")
    g.add_argument("--delta", default=S, help="deficit angle in radians (or 'p/q' times pi: 'pi*p/q')")
    p.add_argument("--mass", type=float, default=S)
    p.add_argument("--kappa", type=float, default=S)
    p.add_argument("--omega", type=float, default=S)
    p.add_argument("--format", choices=("csv", "json"), default=S)
    p.add_argument("--output", "-o", default=S)
    p.add_argument("--config", default=S)
    p.add_argument("--single-thread", action="store_true", default=S)


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = _Parser(prog="conic-spectra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("spectrum", help="level table with degeneracies")
    _common(p)
    p.add_argument("--nr-max", type=int, default=S)
    p.add_argument("--m-max", type=int, default=S)
    p.add_argument("--oracle", action="store_true", default=S,
                   help="add finite-difference energies for every state")

    p = sub.add_parser("orbit", help="integrated classical orbit")
    _common(p)
    e = p.add_mutually_exclusive_group()
    e.add_argument("--E", type=float, default=S)
    e.add_argument("--eccentricity", type=float, default=S)
    p.add_argument("--L", type=float, default=S)
    p.add_argument("--phi0", type=float, default=S)
    p.add_argument("--revolutions", type=int, default=S)
    p.add_argument("--samples", type=int, default=S, help="samples per revolution")
    p.add_argument("--closure-tol", type=float, default=S)

    p = sub.add_parser("action", help="Bohr-Sommerfeld radial action")
    _common(p)
    p.add_argument("--nr-max", type=int, default=S)
    p.add_argument("--m-max", type=int, default=S)

    p = sub.add_parser("wavefunction", help="sampled closed-form radial wavefunction")
    _common(p)
    p.add_argument("--nr", type=int, default=S)
    p.add_argument("--m", type=int, default=S)
    p.add_argument("--branch", choices=("regular", "singular"), default=S)
    p.add_argument("--r-max", type=float, default=S)
    p.add_argument("--points", type=int, default=S)

    p = sub.add_parser("multiplet", help="lowering chain from a top state")
    _common(p)
    p.add_argument("--nr", type=int, default=S)
    p.add_argument("--m", type=int, default=S)
    p.add_argument("--max-steps", type=int, default=S)
    p.add_argument("--points", type=int, default=S)

    p = sub.add_parser("ladder", help="repeated R+ or R- applications")
    _common(p)
    p.add_argument("--nr", type=int, default=S)
    p.add_argument("--m", type=int, default=S)
    p.add_argument("--direction", choices=("+", "-"), default=S)
    p.add_argument("--steps", type=int, default=S)

    p = sub.add_parser("verify", help="run the invariant suites")
    _common(p)
    p.add_argument("--oracle-h", type=float, default=S)
    p.add_argument("--oracle-points", type=int, default=S)
    p.add_argument("--suites", default=S, help="comma-separated subset")
    return parser


def read_config(path: str) -> dict:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(key, value):
    if value is None or not isinstance(value, str):
        return value
    try:
        if key in FLOAT_KEYS:
            return float(value)
        if key in INT_KEYS:
            return int(value)
    except ValueError as exc:
        raise UsageError(f"invalid value for {key}: {value!r}") from exc
    if key in BOOL_KEYS:
        low = value.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"invalid boolean for {key}: {value!r}")
    return value


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags (flags win)."""
    cfg = dict(DEFAULTS)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    if getattr(args, "config", None):
        filed = read_config(args.config)
        if ("s" in filed and "delta" in filed) or \
                ("s" in flags and "delta" in filed) or ("delta" in flags and "s" in filed):
            # a flag for one of them overrides the file's other one
            if "s" in flags:
                filed.pop("delta", None)
            elif "delta" in flags:
                filed.pop("s", None)
            else:
                raise UsageError("config gives both s and delta")
        cfg.update({k: _coerce(k, v) for k, v in filed.items()})
    cfg.update(flags)
    cfg["command"] = args.command
    if cfg["potential"] not in ("coulomb", "harmonic"):
        raise UsageError(f"unknown potential {cfg['potential']!r}")
    return cfg


def _parse_delta(text) -> ConeGeometry:
    t = str(text).strip().replace(" ", "")
    if t.startswith("pi*") or t.endswith("*pi"):
        from fractions import Fraction
        frac = Fraction(t.replace("pi*", "").replace("*pi", ""))
        geo = ConeGeometry(1 - frac / 2)
        return geo
    return scale_from_deficit(float(t))


def make_system(cfg: dict) -> PhysicalSystem:
    try:
        if cfg["delta"] is not None:
            geo = _parse_delta(cfg["delta"])
        else:
            geo = ConeGeometry(cfg["s"] if cfg["s"] is not None else 1)
        pot = Coulomb(float(cfg["kappa"])) if cfg["potential"] == "coulomb" else Harmonic(float(cfg["omega"]))
        return PhysicalSystem(pot, geo, float(cfg["mass"]))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid system parameters: {exc}") from exc


def _check_nonneg(cfg, *keys):
    for k in keys:
        if cfg[k] is not None and cfg[k] < 0:
            raise UsageError(f"{k.replace('_', '-')} must be non-negative")


# ---------------------------------------------------------------- commands

def cmd_spectrum(cfg, system):
    _check_nonneg(cfg, "nr_max", "m_max")
    levels = enumerate_levels(system, cfg["nr_max"], cfg["m_max"])
    table = level_table(levels)
    if cfg["oracle"]:
        ms = list(range(0, cfg["m_max"] + 1))
        results = solve_sectors(ms, system, cfg["nr_max"] + 1, threads=cfg["threads"])
        by_m = dict(zip(ms, results))
        for rec, lv in zip(table, levels):
            vals = [float(by_m[abs(q.m)].energies[q.n_r]) for q in lv.states]
            rec["oracle_E"] = vals
            rec["oracle_max_rel_err"] = max(abs(v / lv.E - 1.0) for v in vals)
    if cfg["format"] == "csv":
        rows = {"E": [], "S": [], "n_r": [], "m": [], "degeneracy": [], "truncated": []}
        for rec in table:
            for n_r, m in rec["states"]:
                rows["E"].append(rec["E"])
                rows["S"].append(rec["S"])
                rows["n_r"].append(n_r)
                rows["m"].append(m)
                rows["degeneracy"].append(rec["degeneracy"])
                rows["truncated"].append(int(rec["truncated"]))
        return _csv_mixed(rows)
    return export.to_json(table)


def _csv_mixed(rows: dict) -> str:
    names = list(rows)
    lines = [",".join(names)]
    for i in range(len(rows[names[0]])):
        cells = []
        for n in names:
            v = rows[n][i]
            cells.append("%.17g" % v if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _orbit_energy(cfg, system) -> float:
    L = cfg["L"]
    if L == 0:
        raise UsageError("orbit needs L != 0")
    if cfg["E"] is not None:
        return cfg["E"]
    ecc = 0.5 if cfg["eccentricity"] is None else cfg["eccentricity"]
    if not 0 <= ecc < 1:
        raise UsageError("eccentricity must lie in [0, 1)")
    M, s = system.M, system.s
    if system.is_coulomb:
        return (ecc ** 2 - 1.0) * M * system.kappa ** 2 * s ** 2 / (2.0 * L ** 2)
    return system.omega * abs(L) / (s * math.sqrt(1.0 - ecc ** 2))


def cmd_orbit(cfg, system):
    E = _orbit_energy(cfg, system)
    L = cfg["L"]
    spec = OrbitSpec(E, L, cfg["phi0"])
    spec.shape(system)  # raises for unbound energies
    start = state_on_orbit(spec, system, cfg["phi0"])
    predicted = closure_revolutions(system.geometry, system.kind)
    n_rev = cfg["revolutions"] or predicted or 10
    if n_rev < 1 or cfg["samples"] < 2:
        raise UsageError("revolutions and samples must be positive")
    sweep = math.copysign(2.0 * math.pi * n_rev, L)
    probe = integrate_orbit(start, L, system, phi_advance=sweep)
    t_eval = np.linspace(0.0, probe.t[-1], cfg["samples"] * n_rev + 1)
    traj = integrate_orbit(start, L, system, t_end=probe.t[-1] * (1 + 1e-12), t_eval=t_eval)
    closure = detect_closure(start, L, system, n_max=n_rev, tol=cfg["closure_tol"])
    summary = {"E": E, "L": L, "predicted_revolutions": predicted,
               "closed_after": closure.revolutions, "return_distances": closure.distances,
               "drift": {k: traj.drift(k) for k in ("E", "R_x", "R_y")}}
    print(f"closure: predicted {predicted}, detected {closure.revolutions}, "
          f"min distance {closure.min_distance:.3g}", file=sys.stderr)
    cols = export.trajectory_columns(traj)
    if cfg["format"] == "json":
        return export.to_json({"summary": summary, "samples": cols})
    return export.to_csv(cols)


def cmd_action(cfg, system):
    _check_nonneg(cfg, "nr_max", "m_max")
    rows = {k: [] for k in ("n_r", "m", "E", "E_root", "action", "target", "abs_err", "quad_err")}
    for n in range(cfg["nr_max"] + 1):
        for m in range(cfg["m_max"] + 1):
            if m == 0 and system.is_coulomb:
                continue  # L = 0 plunge has no libration
            E = energy((n, m), system)
            res = radial_action(E, float(m), system)
            target = 2.0 * math.pi * (n + 0.5)
            for k, v in (("n_r", n), ("m", m), ("E", E),
                         ("E_root", bohr_sommerfeld_energy(n, m, system, method="root")),
                         ("action", res.action), ("target", target),
                         ("abs_err", abs(res.action - target)),
                         ("quad_err", res.quadrature_error_estimate)):
                rows[k].append(v)
    if cfg["format"] == "json":
        return export.to_json([dict(zip(rows, vals)) for vals in zip(*rows.values())])
    return _csv_mixed(rows)


def cmd_wavefunction(cfg, system):
    if cfg["nr"] < 0:
        raise UsageError("nr must be non-negative")
    wf = build_wavefunction(cfg["nr"], cfg["m"], system, cfg["branch"])
    r_max = cfg["r_max"] if cfg["r_max"] is not None else float(default_grid(wf)[-1])
    if not r_max > 0 or cfg["points"] < 2:
        raise UsageError("r-max must be positive and points >= 2")
    r = np.linspace(r_max / cfg["points"], r_max, cfg["points"])
    cols = sample_wavefunction(wf, r)
    if cfg["format"] == "json":
        meta = {"n_r": wf.n_r, "m": cfg["m"], "branch": wf.branch, "energy": wf.energy,
                "alpha": wf.alpha, "A": wf.A, "exponent": wf.nu,
                "classification": boundary_classify(wf)}
        return export.to_json({"meta": meta, "samples": cols})
    return export.to_csv(cols)


def cmd_multiplet(cfg, system):
    top = lad.state(cfg["nr"], cfg["m"], system)
    if cfg["nr"] != 0 or cfg["m"] < 0 or not lad.check_termination(top, system, +1):
        raise UsageError(f"({cfg['nr']}, {cfg['m']}) is not a top state: "
                         "check_termination failed (R+ does not annihilate it)")
    mp = lad.build_multiplet(top, system, cfg["max_steps"])
    rec = export.multiplet_record(mp)
    r = default_grid(top.form, cfg["points"])
    samples = {"r": r}
    for k, mem in enumerate(mp.members):
        samples[f"psi_{k}"] = np.real(mem.form(r))
    if cfg["format"] == "csv":
        return export.to_csv(samples)
    rec["samples"] = samples
    return export.to_json(rec)


def cmd_ladder(cfg, system):
    direction = 1 if cfg["direction"] == "+" else -1
    if cfg["steps"] < 1:
        raise UsageError("steps must be >= 1")
    cur = lad.state(cfg["nr"], cfg["m"], system)
    f = system.geometry.fraction
    s_val = f if f is not None else system.s
    book = (cfg["nr"], cfg["m"])
    steps = [dict(export.ladder_state_record(cur), step=0)]
    for k in range(1, cfg["steps"] + 1):
        if book is not lad.ZERO:
            book = lad.ladder_step_bookkeeping(book, direction, system.kind, s_val)
        nxt = lad.apply_ladder(cur, direction, system)
        predicted = None if book is lad.ZERO else [book[0], export.angular_number(book[1])]
        if nxt is lad.ZERO:
            steps.append({"step": k, "zero": True, "bookkeeping": predicted})
            break
        rec = dict(export.ladder_state_record(nxt), step=k, zero=False, bookkeeping=predicted)
        rec["constant"] = nxt.constant
        steps.append(rec)
        cur = nxt
    return export.to_json(steps)


def cmd_verify(cfg, system):
    from .verification import SUITES, VerifyConfig, run_all
    suites = None
    if cfg["suites"]:
        suites = [x.strip() for x in cfg["suites"].split(",") if x.strip()]
        unknown = [x for x in suites if x not in SUITES]
        if unknown:
            raise UsageError(f"unknown suites: {', '.join(unknown)}")
    vc = VerifyConfig(oracle_h=cfg["oracle_h"], oracle_points=cfg["oracle_points"],
                      threads=cfg["threads"])
    if cfg["s"] is not None or cfg["delta"] is not None:
        vc.geometry = system.geometry
    t0 = time.perf_counter()
    checks = run_all(vc, suites)
    failed = [c.name for c in checks if not c.passed]
    report = {"passed": not failed, "failed": failed,
              "seconds": time.perf_counter() - t0,
              "checks": [c.as_dict() for c in checks]}
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.measured} (tol {c.tolerance})",
              file=sys.stderr)
    return export.to_json(report), (EXIT_VERIFY if failed else EXIT_OK)


COMMANDS = {
    "spectrum": (cmd_spectrum, "json"),
    "orbit": (cmd_orbit, "csv"),
    "action": (cmd_action, "csv"),
    "wavefunction": (cmd_wavefunction, "csv"),
    "multiplet": (cmd_multiplet, "json"),
    "ladder": (cmd_ladder, "json"),
    "verify": (cmd_verify, "json"),
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        cfg = resolve(args)
        fn, fmt = COMMANDS[cfg["command"]]
        cfg["format"] = cfg["format"] or fmt
        if cfg["command"] in ("ladder", "verify") and cfg["format"] != "json":
            raise UsageError(f"{cfg['command']} only writes JSON")
        cfg["threads"] = worker_count(cfg["single_thread"])
        system = make_system(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = fn(cfg, system)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConicSpectraError, ValueError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    text, code = result if isinstance(result, tuple) else (result, EXIT_OK)
    try:
        export.write_text(text, cfg["output"])
    except BrokenPipeError:
        sys.stderr.close()  # downstream reader went away; not an error
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
