import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conic_spectra.exceptions import FormulaNotApplicableError
from conic_spectra.spectrum import (QuantumNumbers, casimir_spin, degeneracy_formula,
                                    energy, enumerate_levels, level_table)
from conic_spectra.system import PhysicalSystem


def brute_force_degeneracy(S, s, box=60):
    """Count lattice points with n_r + |m|/s = S directly in rationals."""
    return sum(1 for n in range(box) for m in range(-box, box + 1) if n + Fraction(abs(m)) / s == S)


def test_energy_examples():
    c = PhysicalSystem.coulomb(1)
    assert energy((0, 0), c) == -2.0
    for qn in ((0, 1), (0, -1), (1, 0)):
        assert energy(qn, c) == pytest.approx(-2 / 9, rel=1e-15)


def test_casimir_spin_examples():
    assert casimir_spin((0, 1), PhysicalSystem.coulomb(1)) == 1
    assert casimir_spin((0, 4), PhysicalSystem.coulomb(3)) == Fraction(4, 3)
    assert casimir_spin((0, 7), PhysicalSystem.harmonic(3)) == Fraction(7, 6)


def test_quantum_numbers_validation():
    with pytest.raises(ValueError):
        QuantumNumbers(-1, 0)
    with pytest.raises(ValueError):
        QuantumNumbers(0, 0.5)


def test_coulomb_s3_levels():
    lv = enumerate_levels(PhysicalSystem.coulomb(3), 3, 9)
    assert [x.degeneracy for x in lv[:4]] == [1, 2, 2, 3]
    assert sorted(q.as_list() for q in lv[3].states) == [[0, -3], [0, 3], [1, 0]]
    assert not any(x.truncated for x in lv[:4])


def test_harmonic_half_levels():
    lv = enumerate_levels(PhysicalSystem.harmonic("1/2"), 4, 4)
    assert [x.degeneracy for x in lv[:3]] == [1, 3, 5]
    assert sorted(q.as_list() for q in lv[1].states) == [[0, -1], [0, 1], [1, 0]]
    assert sorted(q.as_list() for q in lv[2].states) == [[0, -2], [0, 2], [1, -1], [1, 1], [2, 0]]


def test_truncation_flag_set_at_box_edge():
    lv = enumerate_levels(PhysicalSystem.coulomb(1), 2, 2)
    by_key = {x.key: x for x in lv}
    assert not by_key[2].truncated
    assert by_key[3].truncated


def test_plane_degeneracies():
    lv = enumerate_levels(PhysicalSystem.coulomb(1), 6, 6)
    for x in lv:
        if not x.truncated:
            assert x.degeneracy == 2 * x.casimir_spin + 1


def test_irrational_scale_only_parity_doublets():
    lv = enumerate_levels(PhysicalSystem.coulomb(math.sqrt(2)), 5, 8)
    assert max(x.degeneracy for x in lv) <= 2


@given(n=st.integers(0, 30), m=st.integers(-30, 30),
       s=st.sampled_from(["1", "1/2", "2/3", "3", "5/4"]), coulomb=st.booleans())
def test_parity_and_monotonicity(n, m, s, coulomb):
    sy = PhysicalSystem.coulomb(s) if coulomb else PhysicalSystem.harmonic(s)
    assert energy((n, m), sy) == energy((n, -m), sy)
    assert energy((n + 1, m), sy) > energy((n, m), sy)
    assert energy((n, abs(m) + 1), sy) > energy((n, m), sy)


def test_degeneracy_formula_examples():
    assert degeneracy_formula(2, 1) == 5
    assert degeneracy_formula(1, 3) == 3
    assert degeneracy_formula(2, Fraction(1, 2)) == 3
    lv = {x.key: x for x in enumerate_levels(PhysicalSystem.coulomb("1/2"), 4, 4)}
    assert sorted(q.as_list() for q in lv[2].states) == [[0, -1], [0, 1], [2, 0]]


def test_degeneracy_formula_rejects_non_natural_product():
    with pytest.raises(FormulaNotApplicableError):
        degeneracy_formula(Fraction(1, 2), 3)
    with pytest.raises(FormulaNotApplicableError):
        degeneracy_formula(1, math.sqrt(2))


def half_integer_cases():
    for p in range(1, 6):
        for q in range(1, 6):
            s = Fraction(p, q)
            if s.denominator != q:
                continue
            for N in range(0, 6 * p + 1):
                S = Fraction(N) / s
                if S <= 6 and (2 * S).denominator == 1:
                    yield s, S


@pytest.mark.parametrize("s,S", list(half_integer_cases()), ids=str)
def test_formula_matches_brute_force_for_half_integer_spin(s, S):
    assert degeneracy_formula(S, s) == brute_force_degeneracy(S, s)


def test_formula_undercounts_fractional_spin_levels():
    # S = 4/3 at s = 3: (0, +-4) and (1, +-1) are degenerate but lie in two
    # parity-related chains, so the count exceeds floor(2S/q) + 1
    s, S = Fraction(3), Fraction(4, 3)
    assert brute_force_degeneracy(S, s) == 4
    assert degeneracy_formula(S, s) == 3


def test_enumeration_matches_brute_force():
    for s in (Fraction(3), Fraction(1, 2), Fraction(2, 3), Fraction(5, 4)):
        sy = PhysicalSystem.coulomb(s)
        for x in enumerate_levels(sy, 8, 12):
            if not x.truncated:
                assert x.degeneracy == brute_force_degeneracy(x.key, s)


def test_harmonic_levels_group_exactly():
    sy = PhysicalSystem.harmonic("2/3")
    lv = enumerate_levels(sy, 6, 6)
    counts = Counter(x.key for x in lv)
    assert max(counts.values()) == 1
    assert all(isinstance(x.key, Fraction) for x in lv)


def test_level_table_records():
    rows = level_table(enumerate_levels(PhysicalSystem.coulomb(3), 1, 3))
    assert rows[0]["degeneracy"] == 1 and rows[0]["states"] == [[0, 0]]
    assert set(rows[0]) >= {"E", "S", "states", "degeneracy", "truncated"}
