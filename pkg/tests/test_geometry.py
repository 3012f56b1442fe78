import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conic_spectra.exceptions import InvalidGeometryError
from conic_spectra.geometry import (ConeGeometry, closure_revolutions, convergents,
                                    parse_scale, rationalize, scale_from_deficit)


def brute_force_best(x, qmax):
    best = None
    for q in range(1, qmax + 1):
        p = round(x * q)
        if p < 1:
            continue
        err = abs(x - p / q)
        if best is None or err < best[0]:
            best = (err, p, q)
    return best[1:], best[0]


def test_rationalize_finite_decimal():
    ra = rationalize(0.75, 100, 1e-12)
    assert (ra.p, ra.q, ra.exact) == (3, 4, True)


def test_rationalize_integer():
    ra = rationalize(3.0)
    assert (ra.p, ra.q, ra.exact) == (3, 1, True)


def test_rationalize_sqrt2_is_irrational_with_best_convergent():
    x = math.sqrt(2)
    ra = rationalize(x, 50, 1e-12)
    assert ra.irrational and (ra.p, ra.q) == (41, 29)
    (p, q), _ = brute_force_best(x, 50)
    assert (p, q) == (41, 29)


def test_convergents_of_known_fraction():
    assert list(convergents(Fraction(415, 93))) == [(4, 1), (9, 2), (58, 13), (415, 93)]


@pytest.mark.parametrize("p", range(1, 101, 7))
@pytest.mark.parametrize("q", range(1, 101, 9))
def test_rationalize_recovers_coprime_pairs(p, q):
    g = math.gcd(p, q)
    ra = rationalize(p / q, max_denominator=100, tol=1e-9)
    assert ra.exact and (ra.p, ra.q) == (p // g, q // g)


def test_rationalize_rejects_bad_input():
    with pytest.raises(ValueError):
        rationalize(-1.0)
    with pytest.raises(ValueError):
        rationalize(1.0, max_denominator=0)


def test_parse_scale_modes():
    assert parse_scale("3/2") == (1.5, Fraction(3, 2))
    assert parse_scale(2) == (2.0, Fraction(2))
    assert parse_scale(0.5) == (0.5, Fraction(1, 2))
    value, frac = parse_scale(math.sqrt(2))
    assert frac is None and value == math.sqrt(2)


@pytest.mark.parametrize("delta,s", [(0.0, 1), (math.pi, Fraction(1, 2)), (-2 * math.pi, 2)])
def test_scale_from_deficit_examples(delta, s):
    geo = scale_from_deficit(delta)
    assert geo.s == float(s)
    assert geo.fraction == s


def test_scale_from_deficit_rejects_full_angle():
    with pytest.raises(InvalidGeometryError):
        scale_from_deficit(2 * math.pi)
    with pytest.raises(InvalidGeometryError):
        ConeGeometry(0)


@given(st.floats(min_value=1e-3, max_value=50.0))
def test_deficit_round_trip(s):
    geo = scale_from_deficit(2 * math.pi * (1 - s))
    assert math.isclose(geo.s, s, rel_tol=1e-13, abs_tol=1e-14)


def test_delta_is_derived():
    geo = ConeGeometry("2/3")
    assert geo.delta == pytest.approx(2 * math.pi / 3)


@pytest.mark.parametrize("kind,s,n", [("coulomb", 1, 1), ("coulomb", "1/2", 2),
                                      ("harmonic", "1/2", 1), ("harmonic", "3/2", 1), ("harmonic", "1/4", 2),
                                      ("coulomb", "3/2", 2)])
def test_closure_revolutions_examples(kind, s, n):
    assert closure_revolutions(ConeGeometry(s), kind) == n


def test_closure_revolutions_equals_denominator():
    for p in range(1, 21):
        for q in range(1, 21):
            if math.gcd(p, q) == 1:
                assert closure_revolutions(ConeGeometry(Fraction(p, q)), "coulomb") == q


def test_closure_irrational_is_none():
    assert closure_revolutions(ConeGeometry(math.sqrt(2)), "coulomb") is None
