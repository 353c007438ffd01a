#!/usr/bin/env python3
"""
Tests for propagators, the discrete path sum and quantum cat maps
"""

import numpy as np
import pytest

from exceptions import DomainError
from qps_lattice import ChordIndex, TorusSpace
from torus_operators import TorusOperator, nested_projector, nested_space, translation
from weyl_symbols import center_symbol, chord_symbol, qps_reflection, recenter_odd_n, symbol_distance
from symbol_products import center_product, center_product_multi
from plane_projection import PeriodicPlaneSymbol, quantize_hamiltonian
from dynamics import (
    CatMapSpec, cat_chord_form, cat_map_unitary, cayley_to_matrix, chord_cayley, covariance_defect,
    feline_conjugate, matrix_to_cayley, path_integral_center, propagator_exact, propagator_trotter,
    short_time_center_symbol, transport_chord_symbol, transport_qps_symbol
)
from verification import run_suite

TOLERANCE = 1e-10


@pytest.fixture
def harper_n3():
    return quantize_hamiltonian(TorusSpace(3), PeriodicPlaneSymbol.harper())


def test_propagator_group_law(space):
    h = quantize_hamiltonian(space, PeriodicPlaneSymbol.harper())
    u_t, u_s = propagator_exact(h, 0.07), propagator_exact(h, -0.02)
    assert u_t.is_unitary()
    assert (u_t @ u_s).distance(propagator_exact(h, 0.05)) < TOLERANCE
    assert propagator_exact(h, 0.0).distance(TorusOperator.identity(space)) < TOLERANCE


def test_propagator_sign(harper_n3):
    """U_t = exp(+i t H / hbar) by default, the flag flips the exponent"""
    forward = propagator_exact(harper_n3, 0.1)
    backward = propagator_exact(harper_n3, 0.1, sign=-1)
    assert forward.distance(backward.dagger()) < TOLERANCE
    derivative = (propagator_exact(harper_n3, 1e-7).matrix - np.eye(3)) / 1e-7
    expected = 1j * harper_n3.matrix / harper_n3.space.hbar
    assert np.allclose(derivative, expected, atol=1e-4)


def test_trotter_of_single_hamiltonian_is_exact(harper_n3):
    exact = propagator_exact(harper_n3, 0.3)
    assert propagator_trotter(harper_n3, 0.3, 5).distance(exact) < TOLERANCE
    with pytest.raises(DomainError):
        propagator_trotter(harper_n3, 0.3, 0)


def test_propagator_needs_hermitian_hamiltonian():
    space = TorusSpace(3)
    with pytest.raises(DomainError):
        propagator_exact(translation(space, ChordIndex(1, 0)), 0.1)


def test_short_time_symbols():
    space = TorusSpace(3)
    h = quantize_hamiltonian(space, PeriodicPlaneSymbol.harper())
    weyl = short_time_center_symbol(center_symbol(h), 0.0)
    assert np.allclose(weyl.values, center_symbol(TorusOperator.identity(space)).values)
    qps = short_time_center_symbol(recenter_odd_n(center_symbol(h)), 0.0)
    assert qps.on_qps and np.allclose(qps.values, 1)


def test_path_sum_with_one_step_is_product_of_two_slices(harper_n3):
    h_symbol = center_symbol(harper_n3)
    t = 0.05
    short = short_time_center_symbol(h_symbol, t / 2)
    path = path_integral_center(h_symbol, t, 1)
    assert symbol_distance(path, center_product(short, short)) < TOLERANCE
    assert symbol_distance(path, center_product_multi([short, short])) < TOLERANCE


def test_path_sum_error_decreases(harper_n3):
    """Going from M=1 to M=2 moves the path sum toward the exact propagator"""
    t = 0.05
    exact = center_symbol(propagator_exact(harper_n3, t))
    errors = [
        symbol_distance(path_integral_center(center_symbol(harper_n3), t, steps), exact)
        for steps in (1, 2)
    ]
    assert errors[1] < errors[0]


def test_qps_path_sum(harper_n3):
    """On QPS the slices carry exp(i dt H / hbar) and no f_N factor"""
    qps_h = recenter_odd_n(center_symbol(harper_n3))
    short = short_time_center_symbol(qps_h, 0.025)
    assert np.allclose(np.abs(short.values), 1)
    path = path_integral_center(qps_h, 0.05, 1)
    assert path.on_qps
    assert symbol_distance(path, center_product(short, short)) < TOLERANCE


def test_path_sum_validation(harper_n3):
    with pytest.raises(DomainError):
        path_integral_center(center_symbol(harper_n3), 0.05, 0)
    with pytest.raises(DomainError):
        path_integral_center(center_symbol(harper_n3), 0.05, 3, budget=100)


def test_nested_propagator_commutes_with_projector():
    small = TorusSpace(2)
    big = nested_space(small, 2)
    u = propagator_exact(quantize_hamiltonian(big, PeriodicPlaneSymbol.harper()), 0.1)
    projector = nested_projector(big, small, 2)
    assert (u @ projector).distance(projector @ u) < TOLERANCE


def test_cayley_parametrization():
    """B = identity gives the quarter turn M = [[0, 1], [-1, 0]]"""
    assert cayley_to_matrix(((1, 0), (0, 1))) == ((0, 1), (-1, 0))
    assert matrix_to_cayley(((0, 1), (-1, 0))) == ((1, 0), (0, 1))
    assert matrix_to_cayley(((1, 0), (0, 1))) == ((0, 0), (0, 0))
    beta = chord_cayley(((0, 1), (-1, 0)))
    assert beta == ((-1, 0), (0, -1))


def test_cat_map_spec_validation():
    spec = CatMapSpec.from_cayley(((1, 0), (0, 1)))
    assert spec.m == ((0, 1), (-1, 0))
    assert CatMapSpec.from_matrix(((0, 1), (-1, 0))).b == ((1, 0), (0, 1))
    with pytest.raises(DomainError):
        CatMapSpec.from_cayley(((1, 2), (0, 1)))
    with pytest.raises(DomainError):
        # (1 + M) has determinant 5, so the Cayley matrix is not integer
        CatMapSpec.from_matrix(((2, 1), (1, 1)))
    with pytest.raises(DomainError):
        CatMapSpec(((2, 0), (0, 1)), ((0, 0), (0, 0)))


@pytest.mark.parametrize('n', [3, 5, 7])
def test_cat_map_is_unitary_and_covariant(n, make_operator):
    space = TorusSpace(n)
    spec = CatMapSpec.from_cayley(((1, 0), (0, 1)))
    unitary = cat_map_unitary(space, spec)
    assert unitary.is_unitary()
    for _ in range(20):
        assert covariance_defect(make_operator(space), spec, symbols=('center', 'chord')) < TOLERANCE


@pytest.mark.parametrize('n', [3, 5])
def test_cat_map_moves_reflections(n):
    """U R_X U^-1 = R_{M X} on quantum phase space"""
    space = TorusSpace(n)
    spec = CatMapSpec.from_cayley(((1, 0), (0, 1)))
    for alpha in range(n):
        for beta in range(n):
            image = spec.apply(alpha, beta, n)
            moved = feline_conjugate(qps_reflection(space, alpha, beta), spec)
            assert moved.distance(qps_reflection(space, int(image[0]), int(image[1]))) < TOLERANCE


def test_transported_symbols(make_operator):
    space = TorusSpace(5)
    spec = CatMapSpec.from_cayley(((1, 0), (0, 1)))
    op = make_operator(space)
    conjugated = feline_conjugate(op, spec)
    expected = transport_qps_symbol(recenter_odd_n(center_symbol(op)), spec)
    assert symbol_distance(recenter_odd_n(center_symbol(conjugated)), expected) < TOLERANCE
    assert symbol_distance(chord_symbol(conjugated), transport_chord_symbol(chord_symbol(op), spec)) < TOLERANCE


def test_zero_cayley_matrix_gives_identity():
    space = TorusSpace(5)
    unitary = cat_map_unitary(space, CatMapSpec.from_cayley(((0, 0), (0, 0))))
    assert unitary.distance(TorusOperator.identity(space)) < TOLERANCE


def test_cat_chord_form_up_to_global_phase():
    space = TorusSpace(5)
    spec = CatMapSpec.from_cayley(((1, 0), (0, 1)))
    chord = chord_symbol(cat_map_unitary(space, spec))
    doubled = np.array([[chord.extend(2 * r, 2 * s) for s in range(5)] for r in range(5)])
    ratio = doubled / cat_chord_form(space, spec)
    assert np.allclose(ratio, ratio[0, 0], atol=TOLERANCE)
    assert abs(ratio[0, 0]) == pytest.approx(1)


def test_cat_map_domain():
    spec = CatMapSpec.from_cayley(((1, 0), (0, 1)))
    with pytest.raises(DomainError):
        cat_map_unitary(TorusSpace(4), spec)
    with pytest.raises(DomainError):
        cat_map_unitary(TorusSpace(3, 0.3, 0.0), spec)


@pytest.mark.parametrize('suite', ['feline', 'dynamics'])
def test_dynamics_suites(suite):
    table = run_suite(suite, TorusSpace(3))
    assert table['passed'].all(), table[~table['passed']].to_string()


def test_dynamics_suite_on_a_single_state():
    """At N=1 both path sums are exact to rounding, which counts as a pass"""
    table = run_suite('dynamics', TorusSpace(1))
    assert table['passed'].all(), table[~table['passed']].to_string()
