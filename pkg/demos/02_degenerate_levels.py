"""Level tables on cones, with the accidental degeneracies marked.

A level is accidental when it mixes different |m|; parity pairs (m, -m) are
always degenerate and do not count.

Run: python3 demos/02_degenerate_levels.py
"""

from fractions import Fraction

from conic_spectra.spectrum import enumerate_levels
from conic_spectra.system import PhysicalSystem

for sy in (PhysicalSystem.coulomb(3), PhysicalSystem.harmonic("1/2"), PhysicalSystem.coulomb(2 ** 0.5)):
    print(f"\n{sy.kind}, s = {sy.s:g}")
    levels = [lv for lv in enumerate_levels(sy, 6, 12) if not lv.truncated]
    for lv in levels[:6]:
        S = lv.casimir_spin
        S = str(S) if isinstance(S, Fraction) else f"{S:.4f}"
        states = ", ".join(f"({q.n_r},{q.m:+d})" for q in lv.states)
        mark = "  accidental" if len({abs(q.m) for q in lv.states}) > 1 else ""
        print(f"  E = {lv.E:+.6f}  S = {S:>6}  g = {lv.degeneracy}  {states}{mark}")
