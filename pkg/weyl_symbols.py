"""
Chord and center (Weyl) symbols of torus operators.

    chord symbol   A(xi) = Tr(A T_{-xi}),   A = (1/N) sum_xi A(xi) T_xi
    center symbol  A(x)  = Tr(A R_x),       A = (1/N) sum_x A(x) R_x

Symbols store only the fundamental block (N x N values). Values at other
lattice labels are produced by extend_chord / extend_center, which apply the
exact periodicity phases of the operator bases.

For odd N the center symbol can be re-labelled onto the integer points X of
quantum phase space, where every reflection has trace one.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from config import config
from exceptions import DomainError
from qps_lattice import (
    CenterIndex, ChordIndex, TorusSpace, f_n_values, lattice_phase, parity_sign
)
from torus_operators import TorusOperator, TorusState, reflection, translation

logger = logging.getLogger(__name__)


class SymbolKind(str, Enum):
    CHORD = 'chord'
    CENTER = 'center'
    CENTER_QPS = 'center_qps'


@dataclass(frozen=True)
class ChordSymbol:
    """Chord symbol values on the fundamental domain r, s in [0, N)"""
    space: TorusSpace
    values: np.ndarray = field(repr=False)
    kind = SymbolKind.CHORD

    def __post_init__(self):
        object.__setattr__(self, 'values', _checked_block(self.space, self.values))

    def extend(self, r: int, s: int) -> complex:
        return extend_chord(self, r, s)

    def trace(self) -> complex:
        """Tr A = A(0)"""
        return complex(self.values[0, 0])


@dataclass(frozen=True)
class CenterSymbol:
    """
    Center symbol values on a fundamental set of centers.

    On the Weyl lattice (on_qps=False) values[a2, b2] holds A at the doubled
    labels a2, b2 in [0, N). On the quantum phase space of odd N (on_qps=True)
    values[alpha, beta] holds A(X) at X = ((alpha + chi_p)/N, (beta + chi_q)/N),
    i.e. doubled labels (2 alpha, 2 beta).
    """
    space: TorusSpace
    values: np.ndarray = field(repr=False)
    on_qps: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'values', _checked_block(self.space, self.values))
        if self.on_qps and not self.space.is_odd:
            raise DomainError("QPS center symbols need odd N")

    @property
    def kind(self) -> SymbolKind:
        return SymbolKind.CENTER_QPS if self.on_qps else SymbolKind.CENTER

    def doubled_labels(self):
        """Doubled (a2, b2) label grids matching values"""
        n = self.space.n_states
        step = 2 if self.on_qps else 1
        return np.meshgrid(step * np.arange(n), step * np.arange(n), indexing='ij')

    def extend(self, a2: int, b2: int) -> complex:
        return extend_center(self, a2, b2)

    def extended_grid(self) -> np.ndarray:
        """Values at all doubled labels a2, b2 in [0, 2N), the full torus"""
        n = self.space.n_states
        a2, b2 = np.meshgrid(np.arange(2 * n), np.arange(2 * n), indexing='ij')
        return _extend_center_values(self, a2, b2)

    def trace(self) -> complex:
        """Tr A = (1/N) sum_x A(x) f_N(x) over the fundamental set"""
        a2, b2 = self.doubled_labels()
        n = self.space.n_states
        return complex(np.sum(self.values * f_n_values(n, a2, b2)) / n)


def _checked_block(space: TorusSpace, values) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    n = space.n_states
    if values.shape != (n, n):
        raise DomainError(f"symbol block has shape {values.shape}, expected ({n}, {n})")
    return values


def _check_representation(space: TorusSpace):
    if space.period != 1:
        raise DomainError("symbols are defined on the unit torus only")


def _extend_chord_values(sym: ChordSymbol, r, s) -> np.ndarray:
    """
    Vectorized A(xi + k) = (-1)^(s k_p + r k_q + k_p k_q N) exp(-i 2 pi (k_p chi_q - k_q chi_p)) A(xi),
    with (r, s) = (r0 + k_p N, s0 + k_q N).
    """
    n = sym.space.n_states
    k_p, r0 = np.divmod(np.asarray(r), n)
    k_q, s0 = np.divmod(np.asarray(s), n)
    sign = parity_sign(s0 * k_p + r0 * k_q + k_p * k_q * n)
    phase = lattice_phase(sym.space, 0, 1, k_q, -k_p)
    return sym.values[r0, s0] * sign * phase


def extend_chord(sym: ChordSymbol, r: int, s: int) -> complex:
    """Chord symbol value at an arbitrary integer chord"""
    return complex(_extend_chord_values(sym, r, s))


def _extend_center_values(sym: CenterSymbol, a2, b2) -> np.ndarray:
    """Vectorized A(x + k/2) = (-1)^(b2 k_p + a2 k_q + k_p k_q N) A(x) on doubled labels"""
    n = sym.space.n_states
    a2 = np.asarray(a2)
    b2 = np.asarray(b2)
    if sym.on_qps:
        # X labels are exactly N-periodic in alpha, beta
        if np.any(np.mod(a2, 2)) or np.any(np.mod(b2, 2)):
            raise DomainError("QPS symbols are defined on even doubled labels only")
        return sym.values[np.mod(a2 // 2, n), np.mod(b2 // 2, n)]
    k_p, a0 = np.divmod(a2, n)
    k_q, b0 = np.divmod(b2, n)
    sign = parity_sign(b0 * k_p + a0 * k_q + k_p * k_q * n)
    return sym.values[a0, b0] * sign


def extend_center(sym: CenterSymbol, a2: int, b2: int) -> complex:
    """Center symbol value at arbitrary doubled labels"""
    return complex(_extend_center_values(sym, a2, b2))


def chord_symbol(op: TorusOperator) -> ChordSymbol:
    """
    Chord symbol through the position-basis sum
    A(xi) = sum_n <q_{n+s}|A|q_n> exp(-i 2 pi r (n + s/2 + chi_q) / N),
    where a bra past the window picks up <q_{t+jN}| = exp(+i 2 pi j chi_p) <q_t|.
    """
    space = op.space
    _check_representation(space)
    n = space.n_states
    r, s, col = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing='ij')
    winding, row = np.divmod(col + s, n)
    phase = lattice_phase(
        space,
        numerator=-r * (2 * col + s),
        denominator=2 * n,
        chi_p_coeff=2 * n * winding,
        chi_q_coeff=-2 * r,
    )
    values = np.sum(op.matrix[row, col] * phase, axis=2)
    return ChordSymbol(space, values)


def chord_symbol_from_traces(op: TorusOperator) -> ChordSymbol:
    """Chord symbol straight from the definition Tr(A T_{-xi})"""
    space = op.space
    n = space.n_states
    values = np.zeros((n, n), dtype=complex)
    for r in range(n):
        for s in range(n):
            values[r, s] = np.trace(op.matrix @ translation(space, ChordIndex(-r, -s)).matrix)
    return ChordSymbol(space, values)


def position_matrix_from_chord(sym: ChordSymbol) -> np.ndarray:
    """
    <q_m|A|q_n> = (1/N) sum_r A(r, m - n) exp(+i 2 pi r ((m + n)/2 + chi_q) / N),
    with negative m - n supplied by extend_chord.
    """
    space = sym.space
    n = space.n_states
    m_idx, n_idx, r = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing='ij')
    values = _extend_chord_values(sym, r, m_idx - n_idx)
    phase = lattice_phase(space, r * (m_idx + n_idx), 2 * n, 0, 2 * r)
    return np.sum(values * phase, axis=2) / n


def operator_from_chord(sym: ChordSymbol) -> TorusOperator:
    """A = (1/N) sum_xi A(xi) T_xi"""
    _check_representation(sym.space)
    return TorusOperator(sym.space, position_matrix_from_chord(sym))


def center_symbol(op: TorusOperator) -> CenterSymbol:
    """
    Center symbol through the position-basis sum
    A(x) = Tr(A R_x) = sum_n <q_n|A|q_{b2-n}> exp(i 2 pi (b2 - 2n)(a2/2 + chi_p) / N),
    with the winding of b2 - n applied as in reflection().
    """
    space = op.space
    _check_representation(space)
    n = space.n_states
    a2, b2, col = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing='ij')
    winding, row = np.divmod(b2 - col, n)
    step = b2 - 2 * col
    phase = lattice_phase(
        space,
        numerator=step * a2,
        denominator=2 * n,
        chi_p_coeff=2 * step - 2 * n * winding,
    )
    # (A R)_{nn} = A[n, t(n)] * phase(n)
    values = np.sum(op.matrix[col, row] * phase, axis=2)
    return CenterSymbol(space, values)


def center_symbol_from_traces(op: TorusOperator) -> CenterSymbol:
    """Center symbol straight from the definition Tr(A R_x)"""
    space = op.space
    n = space.n_states
    values = np.zeros((n, n), dtype=complex)
    for a2 in range(n):
        for b2 in range(n):
            values[a2, b2] = np.trace(op.matrix @ reflection(space, CenterIndex(a2, b2)).matrix)
    return CenterSymbol(space, values)


def position_matrix_from_center(sym: CenterSymbol) -> np.ndarray:
    """
    <q_m|A|q_n> = (1/N) sum_{a2 < N} A(a2, m + n) exp(i 2 pi (m - n)(a2 + 2 chi_p) / (2N)),
    with m + n >= N supplied by extend_center.
    """
    if sym.on_qps:
        sym = qps_to_center(sym)
    space = sym.space
    n = space.n_states
    m_idx, n_idx, a2 = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing='ij')
    values = _extend_center_values(sym, a2, m_idx + n_idx)
    diff = m_idx - n_idx
    phase = lattice_phase(space, diff * a2, 2 * n, 2 * diff)
    return np.sum(values * phase, axis=2) / n


def operator_from_center(sym: CenterSymbol) -> TorusOperator:
    """A = (1/N) sum_x A(x) R_x over the fundamental set of centers"""
    _check_representation(sym.space)
    return TorusOperator(sym.space, position_matrix_from_center(sym))


def _chord_center_kernel(space: TorusSpace, sign: int) -> np.ndarray:
    """
    K[(a2, b2), (r, s)] = f_N(x + xi/2) exp(sign i 2 pi N x ^ xi) on the fundamental blocks.
    """
    n = space.n_states
    a2, b2, r, s = np.meshgrid(*(np.arange(n),) * 4, indexing='ij')
    corner = f_n_values(n, a2 + r, b2 + s)
    numerator = a2 * s - b2 * r
    phase = lattice_phase(space, sign * numerator, 2 * n, sign * 2 * s, -sign * 2 * r)
    return (corner * phase).reshape(n * n, n * n)


def chord_to_center(sym: ChordSymbol) -> CenterSymbol:
    """A(x) = (1/N) sum_xi A(xi) f_N(x + xi/2) exp(-i 2 pi N x ^ xi)"""
    space = sym.space
    n = space.n_states
    kernel = _chord_center_kernel(space, -1)
    values = kernel @ sym.values.reshape(-1) / n
    return CenterSymbol(space, values.reshape(n, n))


def center_to_chord(sym: CenterSymbol) -> ChordSymbol:
    """A(xi) = (1/N) sum_x A(x) f_N(x + xi/2) exp(+i 2 pi N x ^ xi)"""
    if sym.on_qps:
        sym = qps_to_center(sym)
    space = sym.space
    n = space.n_states
    kernel = _chord_center_kernel(space, +1)
    values = kernel.T @ sym.values.reshape(-1) / n
    return ChordSymbol(space, values.reshape(n, n))


def identity_chord_symbol(space: TorusSpace) -> ChordSymbol:
    """N delta_xi: value N at the origin"""
    values = np.zeros((space.n_states, space.n_states), dtype=complex)
    values[0, 0] = space.n_states
    return ChordSymbol(space, values)


def identity_center_symbol(space: TorusSpace, on_qps: bool = False) -> CenterSymbol:
    """f_N(x) on the Weyl lattice, the constant 1 on QPS"""
    n = space.n_states
    if on_qps:
        return CenterSymbol(space, np.ones((n, n), dtype=complex), on_qps=True)
    a2, b2 = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    return CenterSymbol(space, f_n_values(n, a2, b2).astype(complex))


def _qps_windings(n: int):
    """For every quarter label, the half-period shift k with 2*alpha = label + k N"""
    labels = np.arange(n)
    shift = np.mod(labels, 2)
    alpha = (labels + shift * n) // 2
    return alpha, shift


def recenter_odd_n(sym: CenterSymbol) -> CenterSymbol:
    """
    Re-label a center symbol onto the integer points of quantum phase space.

    For odd N each QPS point X_{alpha,beta} has doubled labels (2 alpha, 2 beta);
    its value is the extension A(2 alpha, 2 beta), carrying the reflection sign
    relating R_X to the quarter-torus reflection. Tr R_X = 1 for every X.
    """
    space = sym.space
    if not space.is_odd:
        raise DomainError(f"N={space.n_states} is even: the Weyl lattice cannot be recentered onto QPS")
    if sym.on_qps:
        return sym
    n = space.n_states
    alpha, beta = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    values = _extend_center_values(sym, 2 * alpha, 2 * beta)
    return CenterSymbol(space, values, on_qps=True)


def qps_to_center(sym: CenterSymbol) -> CenterSymbol:
    """Inverse of recenter_odd_n"""
    if not sym.on_qps:
        return sym
    space = sym.space
    n = space.n_states
    alpha, k_p = _qps_windings(n)
    beta, k_q = _qps_windings(n)
    a0, b0 = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    kp_grid, kq_grid = np.meshgrid(k_p, k_q, indexing='ij')
    alpha_grid, beta_grid = np.meshgrid(alpha, beta, indexing='ij')
    sign = parity_sign(b0 * kp_grid + a0 * kq_grid + kp_grid * kq_grid * n)
    values = sym.values[alpha_grid, beta_grid] * sign
    return CenterSymbol(space, values)


def qps_reflection(space: TorusSpace, alpha: int, beta: int) -> TorusOperator:
    """R_X at the QPS point X_{alpha,beta}"""
    if not space.is_odd:
        raise DomainError("QPS reflections need odd N")
    return reflection(space, CenterIndex(2 * alpha, 2 * beta))


def wigner(state: TorusState) -> CenterSymbol:
    """
    Center symbol Tr(rho R_x) of the density operator of a state.

    The state is normalized first, so the quarter-torus sum of W(x) f_N(x) is one.
    """
    norm = state.norm()
    if norm == 0:
        raise DomainError("Wigner function of the zero vector is undefined")
    if abs(norm - 1) > config.TOLERANCE:
        logger.debug(f"Normalizing state with norm {norm:.6g} before computing its Wigner function")
    return center_symbol(state.normalize().density_operator())


def symbol_distance(first, second) -> float:
    """Largest pointwise deviation between two symbols of the same kind"""
    if first.kind != second.kind or not first.space.same_as(second.space):
        raise DomainError("symbols of different kind or space cannot be compared")
    return float(np.max(np.abs(first.values - second.values)))


def make_symbol(kind: SymbolKind, space: TorusSpace, values: np.ndarray):
    """Build a symbol of the given kind around a value block"""
    kind = SymbolKind(kind)
    if kind == SymbolKind.CHORD:
        return ChordSymbol(space, values)
    return CenterSymbol(space, values, on_qps=kind == SymbolKind.CENTER_QPS)


def symbol_of(op: TorusOperator, kind: SymbolKind):
    """Chord, center or QPS center symbol of an operator"""
    kind = SymbolKind(kind)
    if kind == SymbolKind.CHORD:
        return chord_symbol(op)
    if kind == SymbolKind.CENTER:
        return center_symbol(op)
    return recenter_odd_n(center_symbol(op))


def operator_of(sym) -> TorusOperator:
    """Operator reconstructed from a symbol of any kind"""
    if isinstance(sym, ChordSymbol):
        return operator_from_chord(sym)
    return operator_from_center(sym)


def hermitian_defect(sym) -> Optional[float]:
    """
    Deviation from the Hermiticity rules: extended center values real,
    or A(-xi) = A(xi)* for chords.
    """
    if isinstance(sym, ChordSymbol):
        n = sym.space.n_states
        r, s = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
        mirrored = _extend_chord_values(sym, -r, -s)
        return float(np.max(np.abs(mirrored - sym.values.conj())))
    if sym.on_qps:
        sym = qps_to_center(sym)
    return float(np.max(np.abs(sym.extended_grid().imag)))
