#!/usr/bin/env python3
"""
Tests for torus geometry: spaces, labels, exact phases and polygon areas
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from exceptions import DomainError
from qps_lattice import (
    CenterIndex, ChordIndex, Phase, TorusSpace, as_exact_angle, center_polygon_numerator,
    center_polygon_phase, chord_polygon_numerator, chord_polygon_phase, exact_phase, f_n,
    f_n_values, fundamental_chords, lattice_phase, n_periodic_delta, parity_sign, quarter_centers,
    symplectic_product
)
from torus_operators import translation

small_ints = st.integers(min_value=-12, max_value=12)
points = st.tuples(small_ints, small_ints).map(lambda v: (Fraction(v[0], 4), Fraction(v[1], 4)))


def test_space_validation():
    """Test that malformed spaces are rejected"""
    with pytest.raises(DomainError):
        TorusSpace(0)
    with pytest.raises(DomainError):
        TorusSpace(3, 1.0, 0.0)
    with pytest.raises(DomainError):
        TorusSpace(3, 0.0, -0.1)
    with pytest.raises(DomainError):
        TorusSpace(6, period=2)


def test_space_hbar_and_cells():
    """Test hbar from the number of states per unit cell"""
    assert TorusSpace(3).hbar == pytest.approx(1 / (6 * math.pi))
    nested = TorusSpace(12, period=2)
    assert nested.n_cell == 3
    assert nested.hbar == pytest.approx(TorusSpace(3).hbar)
    assert TorusSpace(5).is_odd and not TorusSpace(4).is_odd


def test_exact_angles():
    """Test that decimal Floquet angles are carried as fractions"""
    assert as_exact_angle(0.3) == Fraction(3, 10)
    assert as_exact_angle(Fraction(1, 7)) == Fraction(1, 7)
    assert TorusSpace(3, 0.3, 0.7).exact_chi == (Fraction(3, 10), Fraction(7, 10))
    assert as_exact_angle(math.sqrt(2) - 1) is None


def test_same_as_compares_exact_angles():
    """A chi read back as 0.2999999999999999 is still the 0.3 torus"""
    assert TorusSpace(3, 0.2999999999999999, 0.7).same_as(TorusSpace(3, 0.3, 0.7))
    assert not TorusSpace(3, 0.3001, 0.7).same_as(TorusSpace(3, 0.3, 0.7))
    assert not TorusSpace(4, 0.3, 0.7).same_as(TorusSpace(3, 0.3, 0.7))
    irrational = math.sqrt(2) - 1
    assert TorusSpace(3, irrational).same_as(TorusSpace(3, irrational))
    assert not TorusSpace(3, irrational).same_as(TorusSpace(3, 0.3))


def test_chord_and_center_labels():
    """Test label arithmetic and reduction into the fundamental block"""
    space = TorusSpace(3)
    assert ChordIndex(1, 2) + ChordIndex(2, 2) == ChordIndex(3, 4)
    assert -ChordIndex(1, -2) == ChordIndex(-1, 2)
    assert ChordIndex(4, -1).reduced(space) == (1, 2, 1, -1)
    assert CenterIndex(1, 1).shifted(ChordIndex(2, -1)) == CenterIndex(3, 0)
    assert CenterIndex(7, 2).reduced(space) == (1, 2, 2, 0)
    assert CenterIndex(1, 2).as_vector(space) == (Fraction(1, 6), Fraction(1, 3))


def test_f_n_table():
    """Test the four values of the reflection trace by parity"""
    odd = TorusSpace(3)
    assert f_n(odd, CenterIndex(0, 0)) == 1
    assert f_n(odd, CenterIndex(1, 0)) == 1
    assert f_n(odd, CenterIndex(1, 1)) == -1
    even = TorusSpace(4)
    assert f_n(even, CenterIndex(0, 0)) == 2
    assert f_n(even, CenterIndex(2, 2)) == 2
    assert f_n(even, CenterIndex(1, 0)) == 0
    assert f_n(even, CenterIndex(1, 1)) == 0

    a2, b2 = np.meshgrid(np.arange(10), np.arange(10), indexing='ij')
    assert set(np.unique(f_n_values(5, a2, b2))) == {-1, 1}
    assert set(np.unique(f_n_values(6, a2, b2))) == {0, 2}


def test_parity_sign_negative_exponents():
    assert list(parity_sign([-3, -2, 0, 1, 4])) == [-1, 1, 1, -1, 1]


def test_lattice_phase_exact_and_float_paths_agree():
    """Test rational and irrational Floquet angles against direct evaluation"""
    for chi in ((0.3, 0.7), (math.sqrt(2) - 1, math.pi - 3)):
        space = TorusSpace(5, *chi)
        numerator = np.arange(-7, 8)
        phase = lattice_phase(space, numerator, 10, 3, -2)
        expected = np.exp(2j * np.pi * (numerator + 3 * chi[0] - 2 * chi[1]) / 10)
        assert np.allclose(phase, expected, rtol=0, atol=1e-12)
    assert complex(lattice_phase(TorusSpace(3), 1, 3)) == pytest.approx(np.exp(2j * np.pi / 3))


def test_lattice_phase_large_chi_denominators():
    """denominator * lcm^2 just under 2**62: three residues would overflow int64 on the exact path"""
    space = TorusSpace(16, 16383 / 16384, 19682 / 19683)
    modulus = 32 * 16384 * 19683
    coeffs = np.array([modulus - 1, modulus - 2, 12345])
    phase = lattice_phase(space, coeffs, 32, coeffs, coeffs)
    for value, coeff in zip(phase, coeffs):
        expected = exact_phase(space, int(coeff), 32, int(coeff), int(coeff)).to_complex()
        assert abs(value - expected) < 1e-5


def test_exact_phase_arithmetic():
    space = TorusSpace(4, 0.25, 0.5)
    phase = exact_phase(space, 1, 4, 1, 0)
    assert phase.turns == Fraction(5, 16)
    assert (Phase(Fraction(3, 4)) * Phase(Fraction(1, 2))).turns == Fraction(1, 4)
    assert Phase(Fraction(1, 3)).conjugate().turns == Fraction(2, 3)
    assert exact_phase(TorusSpace(4, math.sqrt(2) - 1), 1, 4) is None


def test_n_periodic_delta():
    assert n_periodic_delta(7, 3, 4) == 1
    assert n_periodic_delta(7, 3, 3) == 0
    assert n_periodic_delta(0.5, -3.5, 2) == 1
    assert n_periodic_delta(1.5, -0.5, 1.0) == 1
    assert n_periodic_delta(1.5, 0.0, 1.0) == 0
    with pytest.raises(DomainError):
        n_periodic_delta(0.0, 0.0, 0.0)


def test_chord_polygon_phase():
    """Test the triangle area and its invariance under the closing chord"""
    assert chord_polygon_phase([(1, 0), (0, 1)]) == Fraction(1, 2)
    assert chord_polygon_phase([(1, 0), (0, 1), (-1, -1)]) == Fraction(1, 2)
    assert chord_polygon_numerator([ChordIndex(1, 0), ChordIndex(0, 1)]) == 1
    with pytest.raises(DomainError):
        chord_polygon_phase([])


@pytest.mark.parametrize('n', [2, 3])
@pytest.mark.parametrize('chi', [(0.0, 0.0), (0.3, 0.7)])
def test_chord_polygon_phase_matches_translation_triples(n, chi):
    """T(xi1) T(xi2) T(xi3) = exp(i 2 pi N D) T(xi1 + xi2 + xi3) for every chord triple"""
    space = TorusSpace(n, *chi)
    chords = fundamental_chords(space)
    ops = {c: translation(space, c) for c in chords}
    for first in chords:
        for second in chords:
            for third in chords:
                area = chord_polygon_phase([c.as_vector(space) for c in (first, second, third)])
                expected = np.exp(2j * np.pi * n * float(area)) * translation(space, first + second + third).matrix
                product = ops[first] @ ops[second] @ ops[third]
                assert np.allclose(product.matrix, expected, atol=1e-10)
                numerator = chord_polygon_numerator([first, second, third])
                assert 2 * n * n * area == numerator


@seed(1)
@settings(max_examples=50, deadline=None)
@given(reference=points, first=points, second=points)
def test_center_polygon_reduces_to_triangle(reference, first, second):
    """Delta for two centers is 2 (x1 ^ x2 + x2 ^ x + x ^ x1)"""
    expected = 2 * (
        symplectic_product(first, second)
        + symplectic_product(second, reference)
        + symplectic_product(reference, first)
    )
    assert center_polygon_phase(reference, [first, second]) == expected


@seed(2)
@settings(max_examples=50, deadline=None)
@given(labels=st.lists(st.tuples(small_ints, small_ints), min_size=5, max_size=5))
def test_center_polygon_numerator_matches_area(labels):
    """Integer numerator on doubled labels equals 2N^2 Delta at chi = 0"""
    n = 5
    reference, *centers = [CenterIndex(a2, b2) for a2, b2 in labels]
    vectors = [c.as_vector(TorusSpace(n)) for c in [reference] + centers]
    area = center_polygon_phase(vectors[0], vectors[1:])
    assert center_polygon_numerator(reference, centers) == 2 * n * n * area


def test_center_polygon_rejects_odd_count():
    with pytest.raises(DomainError):
        center_polygon_numerator(CenterIndex(0, 0), [CenterIndex(1, 1)])


def test_fundamental_label_sets():
    space = TorusSpace(3)
    assert len(fundamental_chords(space)) == 9
    assert quarter_centers(space)[1] == CenterIndex(0, 1)
