"""
Torus phase-space geometry.

Holds the Hilbert-space description of a quantized torus (number of states,
Floquet angles), the chord and center lattice labels, exact phase arithmetic,
the symplectic product and the polygon areas that enter the product rules.

Conventions:
    chord label (r, s)     -> xi = (r/N, s/N)
    center label (a2, b2)  -> x = ((a2/2 + chi_p)/N, (b2/2 + chi_q)/N)
    u ^ v = u_p v_q - u_q v_p
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from config import config
from exceptions import DomainError

logger = logging.getLogger(__name__)

Angle = Union[float, Fraction]
Vector = Sequence[Union[int, float, Fraction]]


def as_exact_angle(value: Angle) -> Optional[Fraction]:
    """
    Return an angle as an exact fraction when it has a short rational form.

    Decimal literals such as 0.3 come back as 3/10. Returns None for angles
    that only make sense as floats (irrational values).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    candidate = Fraction(repr(float(value)))
    if candidate.denominator <= config.MAX_CHI_DENOMINATOR:
        return candidate
    approx = candidate.limit_denominator(config.MAX_CHI_DENOMINATOR)
    if abs(float(approx) - float(value)) < 1e-15:
        return approx
    return None


@dataclass(frozen=True)
class TorusSpace:
    """
    Hilbert space of a torus with N states and Floquet angles chi.

    Args:
        n_states: Number of position states N on the torus
        chi_p: Floquet angle picked up around the momentum circuit, in [0, 1)
        chi_q: Floquet angle picked up around the position circuit, in [0, 1)
        period: Side length nu of the torus in unit cells; n_states must be
            nu**2 times the number of states of a unit cell
    """
    n_states: int
    chi_p: Angle = 0.0
    chi_q: Angle = 0.0
    period: int = 1

    def __post_init__(self):
        if int(self.n_states) != self.n_states or self.n_states < 1:
            raise DomainError(f"n_states must be a positive integer, got {self.n_states}")
        for name in ('chi_p', 'chi_q'):
            value = getattr(self, name)
            if not 0 <= value < 1:
                raise DomainError(f"{name} must lie in [0, 1), got {value}")
        if int(self.period) != self.period or self.period < 1:
            raise DomainError(f"period must be a positive integer, got {self.period}")
        if self.n_states % (self.period ** 2):
            raise DomainError(
                f"n_states={self.n_states} is not a multiple of period**2={self.period ** 2}"
            )

    @property
    def n_cell(self) -> int:
        """States per unit cell; fixes hbar through 2*pi*hbar*n_cell = 1"""
        return self.n_states // (self.period ** 2)

    @property
    def hbar(self) -> float:
        return 1.0 / (2 * math.pi * self.n_cell)

    @property
    def is_odd(self) -> bool:
        return self.n_states % 2 == 1

    @property
    def chi(self) -> Tuple[float, float]:
        return float(self.chi_p), float(self.chi_q)

    @property
    def exact_chi(self) -> Optional[Tuple[Fraction, Fraction]]:
        """Both Floquet angles as fractions, or None if either one is irrational"""
        chi_p = as_exact_angle(self.chi_p)
        chi_q = as_exact_angle(self.chi_q)
        if chi_p is None or chi_q is None:
            return None
        return chi_p, chi_q

    @property
    def has_zero_chi(self) -> bool:
        return self.chi_p == 0 and self.chi_q == 0

    def same_as(self, other: 'TorusSpace') -> bool:
        """Same N and period, and Floquet angles equal as exact fractions when both are rational"""
        if self.n_states != other.n_states or self.period != other.period:
            return False
        mine, theirs = self.exact_chi, other.exact_chi
        if mine is not None and theirs is not None:
            return mine == theirs
        return self.chi == other.chi

    def __str__(self) -> str:
        return f"TorusSpace(N={self.n_states}, chi=({float(self.chi_p):g}, {float(self.chi_q):g}), nu={self.period})"


@dataclass(frozen=True)
class ChordIndex:
    """Integer chord label; represents xi = (r/N, s/N)"""
    r: int
    s: int

    def __add__(self, other: 'ChordIndex') -> 'ChordIndex':
        return ChordIndex(self.r + other.r, self.s + other.s)

    def __sub__(self, other: 'ChordIndex') -> 'ChordIndex':
        return ChordIndex(self.r - other.r, self.s - other.s)

    def __neg__(self) -> 'ChordIndex':
        return ChordIndex(-self.r, -self.s)

    def as_vector(self, space: TorusSpace) -> Tuple[Fraction, Fraction]:
        n = space.n_states
        return Fraction(self.r, n), Fraction(self.s, n)

    def reduced(self, space: TorusSpace) -> Tuple[int, int, int, int]:
        """Split into fundamental labels and torus windings (r0, s0, k_p, k_q)"""
        n = space.n_states
        k_p, r0 = divmod(self.r, n)
        k_q, s0 = divmod(self.s, n)
        return r0, s0, k_p, k_q


@dataclass(frozen=True)
class CenterIndex:
    """Doubled half-integer center label; represents x = ((a2/2 + chi_p)/N, (b2/2 + chi_q)/N)"""
    a2: int
    b2: int

    def shifted(self, chord: ChordIndex) -> 'CenterIndex':
        """Center x + xi/2"""
        return CenterIndex(self.a2 + chord.r, self.b2 + chord.s)

    def as_vector(self, space: TorusSpace) -> Tuple[Fraction, Fraction]:
        n = space.n_states
        chi = space.exact_chi
        if chi is None:
            return (self.a2 / 2 + float(space.chi_p)) / n, (self.b2 / 2 + float(space.chi_q)) / n
        return (Fraction(self.a2, 2) + chi[0]) / n, (Fraction(self.b2, 2) + chi[1]) / n

    def reduced(self, space: TorusSpace) -> Tuple[int, int, int, int]:
        """Split into quarter-torus labels and half-period windings (a0, b0, k_p, k_q)"""
        n = space.n_states
        k_p, a0 = divmod(self.a2, n)
        k_q, b0 = divmod(self.b2, n)
        return a0, b0, k_p, k_q


@dataclass(frozen=True)
class Phase:
    """Exact phase exp(i 2 pi * turns), turns kept reduced into [0, 1)"""
    turns: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'turns', Fraction(self.turns) % 1)

    @property
    def numerator(self) -> int:
        return self.turns.numerator

    @property
    def denominator(self) -> int:
        return self.turns.denominator

    def __mul__(self, other: 'Phase') -> 'Phase':
        return Phase(self.turns + other.turns)

    def conjugate(self) -> 'Phase':
        return Phase(-self.turns)

    def to_complex(self) -> complex:
        return complex(np.exp(2j * np.pi * float(self.turns)))


def exact_phase(space: TorusSpace, numerator: int, denominator: int,
                chi_p_coeff: int = 0, chi_q_coeff: int = 0) -> Optional[Phase]:
    """Phase of (numerator + chi_p_coeff*chi_p + chi_q_coeff*chi_q)/denominator, None for irrational chi"""
    chi = space.exact_chi
    if chi is None:
        return None
    return Phase((numerator + chi_p_coeff * chi[0] + chi_q_coeff * chi[1]) / Fraction(denominator))


def lattice_phase(space: TorusSpace, numerator, denominator: int,
                  chi_p_coeff=0, chi_q_coeff=0) -> np.ndarray:
    """
    Vectorized exp(i 2 pi (numerator + chi_p_coeff*chi_p + chi_q_coeff*chi_q) / denominator).

    Integer arrays are reduced modulo the common denominator before the
    exponential, so phases stay exact up to a single rounding when chi is
    rational.

    Args:
        space: Torus whose Floquet angles enter the phase
        numerator: Integer array (or scalar) of turn numerators
        denominator: Positive integer denominator shared by every entry
        chi_p_coeff: Integer array multiplying chi_p
        chi_q_coeff: Integer array multiplying chi_q

    Returns:
        Complex array broadcast over the inputs
    """
    numerator = np.asarray(numerator, dtype=np.int64)
    chi_p_coeff = np.asarray(chi_p_coeff, dtype=np.int64)
    chi_q_coeff = np.asarray(chi_q_coeff, dtype=np.int64)
    chi = space.exact_chi
    if chi is not None:
        common = math.lcm(chi[0].denominator, chi[1].denominator)
        if denominator * common * common >= 2 ** 60:
            # int64 would overflow, keep the float path
            chi = None

    if chi is not None:
        p_num = chi[0].numerator * (common // chi[0].denominator)
        q_num = chi[1].numerator * (common // chi[1].denominator)
        modulus = denominator * common
        total = np.mod(numerator, modulus) * common
        total = total + np.mod(chi_p_coeff, modulus) * p_num + np.mod(chi_q_coeff, modulus) * q_num
        total = np.mod(total, modulus)
        return np.exp(2j * np.pi * total / modulus)

    # Irrational angles: exact integer part, floating chi part
    turns = np.mod(numerator, denominator) / denominator
    turns = turns + (chi_p_coeff * float(space.chi_p) + chi_q_coeff * float(space.chi_q)) / denominator
    return np.exp(2j * np.pi * np.mod(turns, 1.0))


def parity_sign(k) -> np.ndarray:
    """(-1)**k for integer arrays, negative exponents included"""
    return 1 - 2 * np.mod(np.asarray(k, dtype=np.int64), 2)


def symplectic_product(u: Vector, v: Vector):
    """Return u ^ v = u_p v_q - u_q v_p"""
    return u[0] * v[1] - u[1] * v[0]


def n_periodic_delta(x: float, y: float, period: float) -> int:
    """1 iff x - y is an integer multiple of period (tolerance 1e-9), else 0"""
    if period <= 0:
        raise DomainError(f"period must be positive, got {period}")
    difference = x - y
    return int(abs(difference - round(difference / period) * period) < 1e-9)


def f_n_values(n_states: int, a2, b2) -> np.ndarray:
    """Vectorized f_N over doubled center labels"""
    total = 1 + parity_sign(a2) + parity_sign(b2) + parity_sign(np.asarray(a2) + np.asarray(b2) + n_states)
    return total // 2


def f_n(space: TorusSpace, center: CenterIndex) -> int:
    """
    Trace of the reflection through center, i.e. the signed number of fixed
    points of the classical reflection on the torus.

    Returns 2 or 0 for even N and +1 or -1 for odd N; independent of chi.
    """
    return int(f_n_values(space.n_states, center.a2, center.b2))


def _as_pair(chord) -> Tuple:
    if isinstance(chord, ChordIndex):
        return chord.r, chord.s
    return chord[0], chord[1]


def chord_polygon_phase(chords: Sequence[Vector]):
    """
    Symplectic area D of the polygon spanned by consecutive chords, defined so that
    T_{xi_1} ... T_{xi_j} = T_{xi_1 + ... + xi_j} exp(i 2 pi N D).

    Evaluated by splitting off the first chord, D(xi_1, ...) = 1/2 xi_1 ^ (xi_2 + ...) + D(xi_2, ...),
    which makes D = 1/2 sum_{i<k} xi_i ^ xi_k. Appending the closing chord
    -(xi_1 + ... + xi_j) leaves D unchanged.
    """
    if len(chords) == 0:
        raise DomainError("chord_polygon_phase needs at least one chord")
    vectors = [_as_pair(chord) for chord in chords]
    half = Fraction(1, 2) if all(_is_exact(v) for v in vectors) else 0.5
    area = 0
    rest = [0, 0]
    for vector in reversed(vectors):
        area = area + half * symplectic_product(vector, rest)
        rest = [rest[0] + vector[0], rest[1] + vector[1]]
    return area


def _is_exact(vector) -> bool:
    return all(isinstance(c, (int, np.integer, Fraction)) for c in vector)


def _as_labels(center) -> Tuple:
    if isinstance(center, CenterIndex):
        return center.a2, center.b2
    return center[0], center[1]


def chord_polygon_numerator(chords: Sequence):
    """
    Integer K = sum_{i<k} (r_i s_k - s_i r_k) with 2 pi N D = 2 pi K / (2N) for integer chord labels.

    Chords are ChordIndex values or (r, s) pairs; the labels may be integer
    arrays, which broadcast.
    """
    total = 0
    rest_r, rest_s = 0, 0
    for chord in reversed(chords):
        r, s = _as_pair(chord)
        total = total + (r * rest_s - s * rest_r)
        rest_r = rest_r + r
        rest_s = rest_s + s
    return total


def center_polygon_phase(reference: Vector, centers: Sequence[Vector]):
    """
    Symplectic area Delta of the polygon circumscribed around an even list of centers.

    With eta_k = 2 (x_{2k} - x_{2k-1}),
        Delta = -2 sum_k x_{2k} ^ x_{2k-1} + 1/2 sum_{i>k} eta_i ^ eta_k - x ^ sum_k eta_k,
    which for two centers is Delta_3 = 2 (x1 ^ x2 + x2 ^ x + x ^ x1).
    """
    if len(centers) == 0 or len(centers) % 2:
        raise DomainError(f"center_polygon_phase needs an even, non-empty list of centers, got {len(centers)}")
    exact = _is_exact(reference) and all(_is_exact(c) for c in centers)
    half = Fraction(1, 2) if exact else 0.5

    area = 0
    etas = []
    for k in range(0, len(centers), 2):
        first, second = centers[k], centers[k + 1]
        area = area - 2 * symplectic_product(second, first)
        etas.append((2 * (second[0] - first[0]), 2 * (second[1] - first[1])))

    total_eta = [0, 0]
    for eta in etas:
        # eta_i ^ (sum of the earlier etas)
        area = area + half * symplectic_product(eta, total_eta)
        total_eta = [total_eta[0] + eta[0], total_eta[1] + eta[1]]

    return area - symplectic_product(reference, total_eta)


def center_polygon_numerator(reference, centers: Sequence):
    """
    Integer K with 2 pi N Delta = 2 pi K / (2N), from doubled labels only.

    The Floquet angles cancel between the three groups of terms, so K never
    depends on chi. With E_k = A_{2k} - A_{2k-1},
        K = -sum_k A_{2k} ^ A_{2k-1} + sum_{i>k} E_i ^ E_k - A_x ^ sum_k E_k.
    Labels are CenterIndex values or (a2, b2) pairs of integers or integer arrays.
    """
    if len(centers) == 0 or len(centers) % 2:
        raise DomainError(f"center_polygon_numerator needs an even, non-empty list of centers, got {len(centers)}")
    total = 0
    sum_a, sum_b = 0, 0
    for k in range(0, len(centers), 2):
        first_a, first_b = _as_labels(centers[k])
        second_a, second_b = _as_labels(centers[k + 1])
        total = total - (second_a * first_b - second_b * first_a)
        e_a, e_b = second_a - first_a, second_b - first_b
        total = total + (e_a * sum_b - e_b * sum_a)
        sum_a, sum_b = sum_a + e_a, sum_b + e_b
    ref_a, ref_b = _as_labels(reference)
    return total - (ref_a * sum_b - ref_b * sum_a)


def center_polygon_corner(reference, centers: Sequence) -> Tuple:
    """Doubled labels of x + sum_j (-1)^j x_j, the center whose f_N enters the product rules"""
    corner_a, corner_b = _as_labels(reference)
    for k, center in enumerate(centers):
        a2, b2 = _as_labels(center)
        sign = 1 if k % 2 else -1
        corner_a, corner_b = corner_a + sign * a2, corner_b + sign * b2
    return corner_a, corner_b


def fundamental_chords(space: TorusSpace):
    """All chord labels of the fundamental domain, row-major in (r, s)"""
    n = space.n_states
    return [ChordIndex(r, s) for r in range(n) for s in range(n)]


def quarter_centers(space: TorusSpace):
    """All center labels of the quarter torus, row-major in (a2, b2)"""
    n = space.n_states
    return [CenterIndex(a2, b2) for a2 in range(n) for b2 in range(n)]
