"""
Periodic plane observables projected onto the torus.

A periodic plane observable is a finite Fourier series over integer chords.
Its Weyl quantization on the torus is the matching combination of
translation operators, and its torus symbols are phase-weighted sums of the
plane symbol over lattice-equivalent points.

Normalization between plane and torus symbols is fixed by the identity:
the chord projection carries the factor N (Tr 1 = N) and the center
projection averages one period of half-lattice translates (factor 1/2 on
the sum over k in {0, 1}^2).
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Tuple

import numpy as np

from exceptions import DomainError
from qps_lattice import CenterIndex, ChordIndex, TorusSpace, lattice_phase, parity_sign
from torus_operators import TorusOperator, translation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PeriodicPlaneSymbol:
    """
    Finite Fourier series H(x) = sum_{r,s} H_{r,s} exp(-i 2 pi N x ^ xi_{r,s}),
    i.e. the plane Weyl symbol of sum_{r,s} H_{r,s} T_{xi_{r,s}}.
    """
    coefficients: Dict[Tuple[int, int], complex] = field(default_factory=dict)

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[int, int, complex]]) -> 'PeriodicPlaneSymbol':
        """Collect (r, s, value) triples, summing repeated chords"""
        coefficients: Dict[Tuple[int, int], complex] = {}
        for r, s, value in terms:
            key = (int(r), int(s))
            coefficients[key] = coefficients.get(key, 0j) + complex(value)
        return cls(coefficients)

    @classmethod
    def harper(cls) -> 'PeriodicPlaneSymbol':
        """H = cos(2 pi p) + cos(2 pi q)"""
        return cls({(1, 0): 0.5, (-1, 0): 0.5, (0, 1): 0.5, (0, -1): 0.5})

    def is_hermitian(self, tolerance: float = 1e-12) -> bool:
        """H_{-r,-s} = H_{r,s}^*"""
        for (r, s), value in self.coefficients.items():
            mirrored = self.coefficients.get((-r, -s), 0j)
            if abs(mirrored - np.conj(value)) > tolerance:
                return False
        return True

    def evaluate(self, p, q):
        """
        Plane symbol at (p, q): sum H_{r,s} exp(i 2 pi (r q - s p)).

        This is exp(-i 2 pi N x ^ xi) for xi = (r/N, s/N), the Weyl symbol of T_xi,
        so quantize_hamiltonian is the Weyl quantization of this function.
        """
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        total = np.zeros(np.broadcast(p, q).shape, dtype=complex)
        for (r, s), value in self.coefficients.items():
            total += value * np.exp(2j * np.pi * (r * q - s * p))
        return total


def quantize_hamiltonian(space: TorusSpace, h: PeriodicPlaneSymbol) -> TorusOperator:
    """
    H = sum_{r,s} H_{r,s} T_{xi_{r,s}}, xi_{r,s} = (r/N, s/N) in units of the unit cell.

    On a nu-fold torus the chord labels are scaled by nu, which lifts the
    unit-torus Hamiltonian to the bigger torus.
    """
    nu = space.period
    matrix = np.zeros((space.n_states, space.n_states), dtype=complex)
    for (r, s), value in h.coefficients.items():
        if value == 0:
            continue
        matrix += value * translation(space, ChordIndex(nu * r, nu * s)).matrix
    operator = TorusOperator(space, matrix)
    if h.is_hermitian() and not operator.is_hermitian(1e-12):
        logger.warning(f"Quantized Hamiltonian on {space} is not Hermitian to 1e-12")
    return operator


def _check_unit_torus(space: TorusSpace):
    if space.period != 1:
        raise DomainError("plane projections are defined on the unit torus")


def plane_chord_weight(space: TorusSpace, chord: ChordIndex, k: Tuple[int, int]) -> complex:
    """
    exp(i 2 pi N [(xi/2 - chi/N) ^ k + 1/4 k J k]) for integer k, which equals
    (-1)^(r k_q + s k_p + N k_p k_q) exp(i 2 pi (k_p chi_q - k_q chi_p)).
    """
    k_p, k_q = k
    n = space.n_states
    numerator = chord.r * k_q - chord.s * k_p + n * k_p * k_q
    return complex(lattice_phase(space, numerator, 2, -2 * k_q, 2 * k_p))


def project_plane_chord_symbol(space: TorusSpace, h: PeriodicPlaneSymbol, chord: ChordIndex) -> complex:
    """
    Torus chord symbol from a periodic plane symbol:
    A(xi) = N sum_k exp(i 2 pi N [(xi/2 - chi/N) ^ k + 1/4 k J k]) H(xi + k).

    Only the finitely many k with a coefficient at chord xi + k contribute.
    Matches chord_symbol(quantize_hamiltonian(space, h)) at every integer chord.
    """
    _check_unit_torus(space)
    n = space.n_states
    total = 0j
    for (r, s), value in h.coefficients.items():
        if (r - chord.r) % n or (s - chord.s) % n:
            continue
        k = ((r - chord.r) // n, (s - chord.s) // n)
        total += plane_chord_weight(space, chord, k) * value
    return n * total


def plane_center_weights(space: TorusSpace, center: CenterIndex) -> np.ndarray:
    """
    Weights exp(i 2 pi N [(x - chi/N) ^ k + 1/4 k J k]) for k in {0, 1}^2, indexed [k_p, k_q].

    They reduce to (-1)^(a2 k_q + b2 k_p + N k_p k_q) and never involve chi.
    """
    k_p, k_q = np.meshgrid(np.arange(2), np.arange(2), indexing='ij')
    return parity_sign(center.a2 * k_q - center.b2 * k_p + space.n_states * k_p * k_q).astype(float)


def project_plane_center_symbol(space: TorusSpace, h: PeriodicPlaneSymbol, center: CenterIndex) -> complex:
    """
    Torus center symbol from a periodic plane symbol:
    A(x) = 1/2 sum_{k in {0,1}^2} w_k(x) H(x + k/2).

    The summand has period 2 in each component of k, so one period carries
    the full average; the factor 1/2 makes the constant symbol 1 project to f_N.
    Matches center_symbol(quantize_hamiltonian(space, h)) at every center.
    """
    _check_unit_torus(space)
    if not h.coefficients:
        return 0j
    weights = plane_center_weights(space, center)
    p, q = (float(c) for c in center.as_vector(space))
    total = 0j
    for k_p in range(2):
        for k_q in range(2):
            total += weights[k_p, k_q] * complex(h.evaluate(p + k_p / 2, q + k_q / 2))
    return total / 2


def project_plane_chord_block(space: TorusSpace, h: PeriodicPlaneSymbol) -> np.ndarray:
    """Chord projection on the whole fundamental domain"""
    n = space.n_states
    values = np.zeros((n, n), dtype=complex)
    for r in range(n):
        for s in range(n):
            values[r, s] = project_plane_chord_symbol(space, h, ChordIndex(r, s))
    return values


def project_plane_center_block(space: TorusSpace, h: PeriodicPlaneSymbol) -> np.ndarray:
    """Center projection on the whole quarter torus"""
    n = space.n_states
    values = np.zeros((n, n), dtype=complex)
    for a2 in range(n):
        for b2 in range(n):
            values[a2, b2] = project_plane_center_symbol(space, h, CenterIndex(a2, b2))
    return values
