"""
Time evolution on the torus.

Exact and product-form propagators of a torus Hamiltonian, the discrete
path sum in the center representation, and quantum cat maps given by an
integer Cayley matrix, together with their classical action on symbols.

The propagator keeps the sign U_t = exp(+i t H / hbar); set
TORUS_PROPAGATOR_SIGN=-1 to use exp(-i t H / hbar) instead.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from config import config
from exceptions import DomainError, ToleranceError
from qps_lattice import TorusSpace, f_n_values, lattice_phase
from torus_operators import TorusOperator
from weyl_symbols import (
    CenterSymbol, ChordSymbol, _extend_chord_values, center_symbol, chord_symbol,
    operator_from_center, recenter_odd_n
)
from symbol_products import center_product_multi

logger = logging.getLogger(__name__)

IntMatrix = Tuple[Tuple[int, int], Tuple[int, int]]

# J maps (p, q) to (-q, p)
J = ((0, -1), (1, 0))


def _generator_scale(space: TorusSpace, sign: Optional[int]) -> float:
    sign = config.PROPAGATOR_SIGN if sign is None else sign
    return sign / space.hbar


def propagator_exact(h: TorusOperator, t: float, sign: Optional[int] = None) -> TorusOperator:
    """
    U_t = exp(+i t H / hbar) with 1/hbar = 2 pi N, through the eigendecomposition of H.

    Args:
        h: Hermitian torus Hamiltonian
        t: Evolution time
        sign: +1 or -1 for the exponent sign; defaults to config.PROPAGATOR_SIGN

    Returns:
        Unitary propagator on the same space
    """
    if not h.is_hermitian():
        raise DomainError("propagator_exact needs a Hermitian Hamiltonian")
    energies, vectors = linalg.eigh(h.matrix)
    phases = np.exp(1j * t * _generator_scale(h.space, sign) * energies)
    return TorusOperator(h.space, (vectors * phases) @ vectors.conj().T)


def propagator_trotter(h: TorusOperator, t: float, steps: int, sign: Optional[int] = None) -> TorusOperator:
    """(U_{t/M})^M built from M short-time propagators"""
    if int(steps) != steps or steps < 1:
        raise DomainError(f"steps must be a positive integer, got {steps}")
    step = propagator_exact(h, t / steps, sign=sign)
    return TorusOperator(h.space, np.linalg.matrix_power(step.matrix, int(steps)))


def short_time_center_symbol(h_symbol: CenterSymbol, dt: float, sign: Optional[int] = None) -> CenterSymbol:
    """
    Center symbol of the propagator over a short time dt.

    On QPS points, where the identity has symbol 1, this is exp(i dt H(X) / hbar).
    On the Weyl lattice the identity has symbol f_N(x), so the first-order
    correction is added to it: f_N(x) + exp(i dt H(x) / hbar) - 1.
    """
    scale = _generator_scale(h_symbol.space, sign)
    kernel = np.exp(1j * dt * scale * h_symbol.values)
    if h_symbol.on_qps:
        return CenterSymbol(h_symbol.space, kernel, on_qps=True)
    a2, b2 = h_symbol.doubled_labels()
    identity = f_n_values(h_symbol.space.n_states, a2, b2)
    return CenterSymbol(h_symbol.space, identity + kernel - 1)


def path_integral_center(h_symbol: CenterSymbol, t: float, steps: int,
                         budget: Optional[int] = None, sign: Optional[int] = None) -> CenterSymbol:
    """
    Discrete path sum for the center symbol of U_t.

    The time is split into 2M slices of length t/(2M); the sum over the 2M
    intermediate centers with phase Delta_{2M+1} is the center product of the
    2M short-time symbols. QPS input (odd N) gives the QPS form without f_N.

    Args:
        h_symbol: Center symbol of the Hamiltonian (Weyl lattice or QPS)
        t: Evolution time
        steps: M, half the number of slices
        budget: Maximum number of lattice terms, default config.TERM_BUDGET

    Returns:
        Center symbol of the same kind as h_symbol
    """
    if int(steps) != steps or steps < 1:
        raise DomainError(f"steps must be a positive integer, got {steps}")
    if h_symbol.on_qps and not h_symbol.space.is_odd:
        raise DomainError("the QPS path sum needs odd N")
    slices = 2 * int(steps)
    short_time = short_time_center_symbol(h_symbol, t / slices, sign=sign)
    logger.info(f"Path sum on {h_symbol.space}: t={t}, {slices} slices")
    return center_product_multi([short_time] * slices, budget=budget)


def _mat_mul(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)) for i in range(2)
    )


def _mat_add(a, b, sign=1):
    return tuple(tuple(a[i][j] + sign * b[i][j] for j in range(2)) for i in range(2))


def _mat_inverse(a):
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if det == 0:
        raise DomainError(f"matrix {a} is singular")
    return ((a[1][1] / det, -a[0][1] / det), (-a[1][0] / det, a[0][0] / det))


def _as_fraction_matrix(a):
    return tuple(tuple(Fraction(v) for v in row) for row in a)


def _as_int_matrix(a, label: str) -> IntMatrix:
    if any(Fraction(v).denominator != 1 for row in a for v in row):
        raise DomainError(f"{label} {a} is not an integer matrix")
    return tuple(tuple(int(v) for v in row) for row in a)


IDENTITY = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))


def cayley_to_matrix(b) -> IntMatrix:
    """M = (1 - J B)(1 + J B)^{-1}, computed in exact rationals"""
    jb = _mat_mul(_as_fraction_matrix(J), _as_fraction_matrix(b))
    m = _mat_mul(_mat_add(IDENTITY, jb, -1), _mat_inverse(_mat_add(IDENTITY, jb)))
    return _as_int_matrix(m, "Cayley image")


def matrix_to_cayley(m) -> IntMatrix:
    """B with M = (1 - J B)(1 + J B)^{-1}: J B = (1 - M)(1 + M)^{-1}, B = -J (1 - M)(1 + M)^{-1}"""
    m = _as_fraction_matrix(m)
    jb = _mat_mul(_mat_add(IDENTITY, m, -1), _mat_inverse(_mat_add(IDENTITY, m)))
    minus_j = _as_fraction_matrix(((0, 1), (-1, 0)))
    return _as_int_matrix(_mat_mul(minus_j, jb), "Cayley matrix")


def chord_cayley(m) -> Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]:
    """beta with M = (1 + J beta)(1 - J beta)^{-1}: J beta = (1 + M)^{-1}(M - 1)"""
    m = _as_fraction_matrix(m)
    j_beta = _mat_mul(_mat_inverse(_mat_add(IDENTITY, m)), _mat_add(m, IDENTITY, -1))
    minus_j = _as_fraction_matrix(((0, 1), (-1, 0)))
    return _mat_mul(minus_j, j_beta)


@dataclass(frozen=True)
class CatMapSpec:
    """
    Linear symplectic map of the torus with an integer Cayley matrix.

    Args:
        m: Integer 2x2 matrix with determinant 1
        b: Integer symmetric 2x2 matrix with M = (1 - J B)(1 + J B)^{-1}
    """
    m: IntMatrix
    b: IntMatrix

    def __post_init__(self):
        m = _as_int_matrix(self.m, "cat map")
        b = _as_int_matrix(self.b, "Cayley matrix")
        if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 1:
            raise DomainError(f"cat map {m} does not have determinant 1")
        if b[0][1] != b[1][0]:
            raise DomainError(f"Cayley matrix {b} is not symmetric")
        if cayley_to_matrix(b) != m:
            raise DomainError(f"Cayley matrix {b} does not generate {m}")
        object.__setattr__(self, 'm', m)
        object.__setattr__(self, 'b', b)

    @classmethod
    def from_cayley(cls, b) -> 'CatMapSpec':
        return cls(cayley_to_matrix(b), b)

    @classmethod
    def from_matrix(cls, m) -> 'CatMapSpec':
        return cls(m, matrix_to_cayley(m))

    def apply(self, alpha, beta, n: int):
        """M (alpha, beta) reduced modulo n"""
        m = self.m
        return (
            np.mod(m[0][0] * alpha + m[0][1] * beta, n),
            np.mod(m[1][0] * alpha + m[1][1] * beta, n),
        )


def _check_cat_space(space: TorusSpace):
    if not space.is_odd:
        raise DomainError(f"cat maps require odd N, got N={space.n_states}")
    if not space.has_zero_chi:
        raise DomainError("cat maps are quantized here with chi = 0 only")
    if space.period != 1:
        raise DomainError("cat maps act on the unit torus")


def cat_map_unitary(space: TorusSpace, spec: CatMapSpec) -> TorusOperator:
    """
    Quantum cat map from its QPS center symbol exp(i 2 pi N X B X).

    The symbol is taken with unit modulus, N^{1/2} times the 1/sqrt(N) plane
    normalization, which is what makes the torus operator unitary; its
    global phase is then a quadratic Gauss sum and is left as it comes out.
    The result satisfies U T_xi U^{-1} = T_{M xi}.
    """
    _check_cat_space(space)
    n = space.n_states
    b = spec.b
    alpha, beta = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    # N X B X with X = (alpha, beta) / N
    quadratic = b[0][0] * alpha * alpha + 2 * b[0][1] * alpha * beta + b[1][1] * beta * beta
    symbol = CenterSymbol(space, lattice_phase(space, quadratic, n), on_qps=True)
    unitary = operator_from_center(symbol)
    if not unitary.is_unitary():
        defect = float(np.max(np.abs(unitary.matrix @ unitary.matrix.conj().T - np.eye(n))))
        raise ToleranceError(
            f"cat map with B={b} is not unitary at N={n} (defect {defect:.3g})"
        )
    return unitary


def cat_chord_form(space: TorusSpace, spec: CatMapSpec) -> np.ndarray:
    """
    Quadratic chord form exp(i 2 pi N eta beta eta) on the doubled chords
    xi = 2 eta, eta = (r, s)/N, with beta from the chord Cayley relation.

    For B = identity the chord symbol of cat_map_unitary at labels (2r, 2s)
    is this form times one global phase.
    """
    _check_cat_space(space)
    beta = chord_cayley(spec.m)
    beta = _as_int_matrix(beta, "chord Cayley matrix")
    n = space.n_states
    r, s = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    quadratic = beta[0][0] * r * r + 2 * beta[0][1] * r * s + beta[1][1] * s * s
    return lattice_phase(space, quadratic, n)


def feline_conjugate(a: TorusOperator, spec: CatMapSpec) -> TorusOperator:
    """U_M A U_M^{-1}; its symbols are those of A transported along M"""
    unitary = cat_map_unitary(a.space, spec)
    return unitary @ a @ unitary.dagger()


def transport_qps_symbol(sym: CenterSymbol, spec: CatMapSpec) -> CenterSymbol:
    """Classical transport on QPS: the returned symbol takes at M X the value sym has at X"""
    if not sym.on_qps:
        raise DomainError("transport_qps_symbol expects a QPS center symbol")
    _check_cat_space(sym.space)
    n = sym.space.n_states
    alpha, beta = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    image_alpha, image_beta = spec.apply(alpha, beta, n)
    values = np.zeros_like(sym.values)
    values[image_alpha, image_beta] = sym.values
    return CenterSymbol(sym.space, values, on_qps=True)


def transport_chord_symbol(sym: ChordSymbol, spec: CatMapSpec) -> ChordSymbol:
    """Classical transport of chords: the returned symbol takes at M xi the value sym has at xi"""
    _check_cat_space(sym.space)
    n = sym.space.n_states
    m = spec.m
    r, s = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    image_r = m[0][0] * r + m[0][1] * s
    image_s = m[1][0] * r + m[1][1] * s
    # Undo the extension phase that relates the stored block to the image chord
    unit = ChordSymbol(sym.space, np.ones((n, n), dtype=complex))
    ratio = _extend_chord_values(unit, image_r, image_s)
    values = np.zeros_like(sym.values)
    values[np.mod(image_r, n), np.mod(image_s, n)] = sym.values / ratio
    return ChordSymbol(sym.space, values)


def covariance_defect(a: TorusOperator, spec: CatMapSpec,
                      symbols: Sequence[str] = ('center',)) -> float:
    """Largest pointwise deviation between the symbol of U A U^-1 and the transported symbol of A"""
    conjugated = feline_conjugate(a, spec)
    defect = 0.0
    if 'center' in symbols:
        expected = transport_qps_symbol(recenter_odd_n(center_symbol(a)), spec)
        actual = recenter_odd_n(center_symbol(conjugated))
        defect = max(defect, float(np.max(np.abs(actual.values - expected.values))))
    if 'chord' in symbols:
        expected = transport_chord_symbol(chord_symbol(a), spec)
        actual = chord_symbol(conjugated)
        defect = max(defect, float(np.max(np.abs(actual.values - expected.values))))
    return defect
