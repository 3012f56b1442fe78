"""Bound orbits on cones: which ones close, and after how many turns.

Run: python3 demos/01_closed_orbits.py
"""

import math

from conic_spectra.classical import OrbitSpec, detect_closure, state_on_orbit
from conic_spectra.geometry import closure_revolutions
from conic_spectra.system import PhysicalSystem

for make, scales in ((PhysicalSystem.coulomb, ["1", "1/2", "3/2", "3", math.sqrt(2)]),
                     (PhysicalSystem.harmonic, ["1/2", "1/4", "3"])):
    for s in scales:
        sy = make(s)
        L, e = 1.0, 0.5
        if sy.is_coulomb:
            E = (e * e - 1) * sy.s ** 2 / 2
        else:
            E = 1 / (sy.s * math.sqrt(1 - e * e))
        start = state_on_orbit(OrbitSpec(E, L), sy, 0.0)
        predicted = closure_revolutions(sy.geometry, sy.kind)
        res = detect_closure(start, L, sy, n_max=predicted or 12)
        print(f"{sy.kind:8s} s={sy.s:<8.5g} predicted={predicted}  detected={res.revolutions}"
              f"  closest return={res.min_distance:.1e}")
