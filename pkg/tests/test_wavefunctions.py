import math

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from conic_spectra.exceptions import DenominatorPoleError, DivergentNormError
from conic_spectra.system import PhysicalSystem
from conic_spectra.wavefunctions import (BoundaryClass, Branch, build_wavefunction,
                                         count_nodes, kummer_terminating, normalize,
                                         sample_wavefunction, schrodinger_residual,
                                         boundary_classify)

SWEEP = ("1", "1/2", "2", "3", "2/3")


def systems(s):
    return [PhysicalSystem.coulomb(s), PhysicalSystem.harmonic(s)]


def test_kummer_examples():
    assert kummer_terminating(0, 2.5, 7.0) == 1.0
    assert kummer_terminating(1, 2, 3) == -0.5


@pytest.mark.parametrize("n,b,x", [(3, 7 / 3, 1.7), (5, 0.3, 4.2), (2, -2.5, 0.9), (6, 11.0, 12.0)])
def test_kummer_against_mpmath(n, b, x):
    with mpmath.workdps(40):
        ref = float(mpmath.hyp1f1(-n, b, x))
    assert kummer_terminating(n, b, x) == pytest.approx(ref, rel=1e-13, abs=1e-15)


def test_kummer_pole():
    with pytest.raises(DenominatorPoleError):
        kummer_terminating(3, -1.0, 0.5)


def test_coulomb_ground_state_plane():
    wf = build_wavefunction(0, 0, PhysicalSystem.coulomb(1))
    r = np.linspace(0.01, 5, 50)
    assert np.allclose(wf(r) / wf(r[0]), np.exp(-wf.alpha * (r - r[0]) / 2))
    val, _ = quad(lambda x: wf(x) ** 2 * x, 0, np.inf)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_coulomb_s3_top_state_shape():
    wf = build_wavefunction(0, 4, PhysicalSystem.coulomb(3))
    a = wf.alpha
    r = np.linspace(0.1, 6, 30)
    ratio = wf(r) / (np.exp(-a * r / 2) * (a * r) ** (4 / 3))
    assert np.allclose(ratio, ratio[0], rtol=1e-13)


def test_harmonic_s3_first_excited_polynomial():
    sy = PhysicalSystem.harmonic(3)
    wf = build_wavefunction(1, 1, sy)
    a = wf.alpha
    r = np.linspace(0.05, 3, 40)
    y = (a * r) ** 2
    expected = np.exp(-y / 2) * (a * r) ** (1 / 3) * (1 - y / (1 / 3 + 1))
    assert np.allclose(wf(r) / expected, wf(r[0]) / expected[0], rtol=1e-12)
    assert schrodinger_residual(wf, wf.energy, sy) < 1e-8


def test_harmonic_gaussian_normalization():
    wf = build_wavefunction(0, 0, PhysicalSystem.harmonic(1))
    assert wf.alpha == 1.0
    assert wf.A == pytest.approx(math.sqrt(2) * wf.alpha, rel=1e-14)
    assert normalize(wf) == pytest.approx(wf.A, rel=1e-14)


def test_singular_three_halves_diverges():
    wf = build_wavefunction(2, 3, PhysicalSystem.coulomb(2), branch=Branch.SINGULAR)
    assert wf.nu == -1.5
    with pytest.raises(DivergentNormError):
        normalize(wf)


@pytest.mark.parametrize("s", SWEEP)
def test_norm_against_quadrature(s):
    for sy in systems(s):
        for n, m in ((0, 0), (2, 1), (3, -4)):
            wf = build_wavefunction(n, m, sy)
            val, _ = quad(lambda x: wf(x) ** 2 * x, 0, np.inf, limit=200)
            assert val == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("s", SWEEP)
def test_regular_residual_and_nodes_sweep(s):
    for sy in systems(s):
        for n in range(5):
            for m in range(-6, 7):
                wf = build_wavefunction(n, m, sy)
                assert schrodinger_residual(wf, wf.energy, sy) <= 1e-9
                assert count_nodes(wf) == n


def test_node_examples():
    assert count_nodes(build_wavefunction(0, 5, PhysicalSystem.coulomb(2))) == 0
    assert count_nodes(build_wavefunction(1, 1, PhysicalSystem.coulomb(3))) == 1
    assert count_nodes(build_wavefunction(2, 0, PhysicalSystem.coulomb(1))) == 2


def test_perturbed_energy_is_detected():
    sy = PhysicalSystem.coulomb(3)
    wf = build_wavefunction(1, 2, sy)
    res = schrodinger_residual(wf, wf.energy * (1 + 1e-3), sy)
    assert 1e-4 < res < 1e-2


@pytest.mark.parametrize("make,n,m", [(PhysicalSystem.coulomb, 2, 1), (PhysicalSystem.coulomb, 1, 1),
                                      (PhysicalSystem.harmonic, 2, 1), (PhysicalSystem.harmonic, 0, 4)])
def test_singular_branch_solves_radial_equation(make, n, m):
    sy = make(3)
    wf = build_wavefunction(n, m, sy, branch=Branch.SINGULAR)
    assert schrodinger_residual(wf, wf.energy, sy) <= 1e-10


@pytest.mark.parametrize("s", SWEEP)
def test_orthogonality(s):
    for sy in systems(s):
        for m in (0, 1, -3):
            wfs = [build_wavefunction(n, m, sy) for n in range(4)]
            for i in range(4):
                for j in range(i):
                    val, _ = quad(lambda x: wfs[i](x) * wfs[j](x) * x, 0, np.inf, limit=200)
                    assert abs(val) < 1e-8


def test_finite_difference_derivative_second_order():
    wf = build_wavefunction(2, 1, PhysicalSystem.coulomb("3/2"))
    errs = []
    for n in (400, 800):
        r = np.linspace(0.5, 8.0, n + 1)
        h = r[1] - r[0]
        fd = (wf(r[2:]) - wf(r[:-2])) / (2 * h)
        errs.append(np.max(np.abs(fd - wf.derivative(r[1:-1]))))
    assert 3.6 <= errs[0] / errs[1] <= 4.4


def test_boundary_classification():
    c3 = PhysicalSystem.coulomb(3)
    assert boundary_classify(build_wavefunction(1, 2, c3)) is BoundaryClass.PHYSICAL
    assert boundary_classify(build_wavefunction(2, 2, c3, branch="singular")) is BoundaryClass.VIOLATES_BOUNDARY
    assert boundary_classify(build_wavefunction(3, 5, c3, branch="singular")) is BoundaryClass.NON_NORMALIZABLE
    assert boundary_classify(build_wavefunction(1, 3, c3, branch="singular")) is BoundaryClass.NON_NORMALIZABLE


def test_sample_columns_show_boundary_behaviour():
    wf = build_wavefunction(2, 2, PhysicalSystem.coulomb(3), branch="singular")
    cols = sample_wavefunction(wf, np.array([1e-8, 1e-6, 1e-4]))
    assert set(cols) == {"r", "psi", "dpsi_dr", "r_dpsi_dr"}
    assert np.all(np.diff(np.abs(cols["r_dpsi_dr"])) < 0)
