import numpy as np
import pytest

from conic_spectra.oracle import (RadialGrid, default_grid, solve_radial_sector, solve_sectors,
                                  worker_count)
from conic_spectra.spectrum import energy
from conic_spectra.system import PhysicalSystem
from conic_spectra.wavefunctions import build_wavefunction


def test_coulomb_plane_ground_state():
    res = solve_radial_sector(0, PhysicalSystem.coulomb(1), 2)
    assert res.energies[0] == pytest.approx(-2.0, rel=1e-5)
    assert res.all_converged


def test_harmonic_half_first_excited():
    res = solve_radial_sector(1, PhysicalSystem.harmonic("1/2"), 1)
    assert res.energies[0] == pytest.approx(3.0, abs=1e-6)


@pytest.mark.parametrize("make,m", [(PhysicalSystem.coulomb, 0), (PhysicalSystem.coulomb, 2),
                                    (PhysicalSystem.harmonic, 0), (PhysicalSystem.harmonic, 3)])
def test_second_order_convergence(make, m):
    res = solve_radial_sector(m, make("2/3"), 3)
    assert np.all((res.order_ratio >= 3.6) & (res.order_ratio <= 4.4))


@pytest.mark.parametrize("s", ["1", "1/2", "2", "3", "2/3"])
@pytest.mark.parametrize("make", [PhysicalSystem.coulomb, PhysicalSystem.harmonic])
def test_agreement_with_closed_form(make, s):
    sy = make(s)
    for res in solve_sectors(range(7), sy, 4):
        m = int(res.m)
        for n in range(4):
            assert res.energies[n] == pytest.approx(energy((n, m), sy), rel=1e-5)
            wf = build_wavefunction(n, m, sy)
            assert res.overlap(n, wf(res.grid.r)) >= 1 - 1e-6


def test_non_integer_sector_matches_branch_energy():
    sy = PhysicalSystem.coulomb(3)
    res = solve_radial_sector(2.5, sy, 2)
    for n in range(2):
        assert res.energies[n] == pytest.approx(build_wavefunction(n, 2.5, sy).energy, rel=1e-6)


def test_coarse_grid_is_flagged():
    sy = PhysicalSystem.coulomb(1)
    base = default_grid(0, sy, 4)
    coarse = RadialGrid(base.t_min, base.h * base.N / 60, 60)
    res = solve_radial_sector(0, sy, 4, grid=coarse)
    assert not res.all_converged


def test_eigenvectors_are_sqrt_r_scaled():
    res = solve_radial_sector(1, PhysicalSystem.harmonic(1), 2)
    assert np.allclose(res.eigenvectors, res.psi * np.sqrt(res.grid.r))


def test_threaded_results_match_serial():
    sy = PhysicalSystem.harmonic("3/2")
    a = solve_sectors(range(4), sy, 2, threads=1)
    b = solve_sectors(range(4), sy, 2, threads=4)
    for x, y in zip(a, b):
        assert np.array_equal(x.energies, y.energies)


def test_worker_count(monkeypatch):
    monkeypatch.setenv("CONIC_SPECTRA_THREADS", "3")
    assert worker_count() == 3
    assert worker_count(single_thread=True) == 1


def test_rejects_empty_request():
    with pytest.raises(ValueError):
        solve_radial_sector(0, PhysicalSystem.coulomb(1), 0)
