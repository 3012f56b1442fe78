"""Closed-form energies against the finite-difference oracle.

Run: python3 demos/04_oracle_check.py
"""

from conic_spectra.oracle import solve_radial_sector
from conic_spectra.spectrum import energy
from conic_spectra.system import PhysicalSystem

for sy in (PhysicalSystem.coulomb("2/3"), PhysicalSystem.harmonic(3)):
    print(f"\n{sy.kind}, s = {sy.s:g}")
    for m in (0, 1, 4):
        res = solve_radial_sector(m, sy, 3)
        for n in range(3):
            exact = energy((n, m), sy)
            print(f"  (n_r={n}, m={m})  oracle {res.energies[n]:+.10f}  exact {exact:+.10f}"
                  f"  rel {abs(res.energies[n] / exact - 1):.1e}  h-ratio {res.order_ratio[n]:.3f}")
