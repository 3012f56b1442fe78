"""Runge-Lenz ladders: where a chain stays physical and where it leaves the domain.

Run: python3 demos/03_ladder_chains.py
"""

from conic_spectra import ladder as lad
from conic_spectra.system import PhysicalSystem

cases = [(PhysicalSystem.coulomb(1), 2), (PhysicalSystem.coulomb(3), 3),
         (PhysicalSystem.coulomb(3), 4), (PhysicalSystem.harmonic(3), 7),
         (PhysicalSystem.coulomb("1/2"), 1)]
for sy, m in cases:
    mp = lad.build_multiplet(lad.state(0, m, sy), sy)
    print(f"\n{sy.kind} s={sy.s:g}, top (0,{m}), S = {mp.S}: "
          f"{mp.physical_count} physical, stop: {mp.stop_reason}")
    for x in mp.members:
        print(f"  {x.label():12s} periodic={x.periodic!s:5s} {x.classification.value:18s} "
              f"overlap={x.overlap:.12f}")
    c, _ = lad.casimir_apply(mp.members[0], sy)
    print(f"  Casimir {c:.12f} vs S(S+1) = {float(mp.S * (mp.S + 1)):.12f}")
