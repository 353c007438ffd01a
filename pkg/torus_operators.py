"""
Operators on the torus Hilbert space.

Builds the finite Fourier kernel, the translation (chord) and reflection
(center) operator bases, their Fourier relations, traces and periodicity
phases, and the projector that embeds a unit torus into a nu-fold torus.

Matrices are assembled from the action on position states,
    T_{r,s} |q_n> = exp(i 2 pi r (n + chi_q + s/2) / N) |q_{n+s}>
    R_{a2,b2} |q_n> = exp(i 2 pi (b2 - 2n)(a2/2 + chi_p) / N) |q_{b2-n}>
with indices outside [0, N-1] brought back through |q_{n+jN}> = exp(-i 2 pi j chi_p) |q_n>.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from config import config
from exceptions import DomainError
from qps_lattice import (
    CenterIndex, ChordIndex, TorusSpace, as_exact_angle, exact_phase,
    f_n, lattice_phase, parity_sign
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TorusOperator:
    """Dense N x N matrix in the |q_n> basis of a torus space"""
    space: TorusSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        n = self.space.n_states
        if matrix.shape != (n, n):
            raise DomainError(f"operator matrix has shape {matrix.shape}, expected ({n}, {n})")
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def identity(cls, space: TorusSpace) -> 'TorusOperator':
        return cls(space, np.eye(space.n_states, dtype=complex))

    def _check_space(self, other: 'TorusOperator'):
        if not self.space.same_as(other.space):
            raise DomainError(f"operators live on different spaces: {self.space} vs {other.space}")

    def __matmul__(self, other: 'TorusOperator') -> 'TorusOperator':
        self._check_space(other)
        return TorusOperator(self.space, self.matrix @ other.matrix)

    def __add__(self, other: 'TorusOperator') -> 'TorusOperator':
        self._check_space(other)
        return TorusOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: 'TorusOperator') -> 'TorusOperator':
        self._check_space(other)
        return TorusOperator(self.space, self.matrix - other.matrix)

    def __rmul__(self, scalar: complex) -> 'TorusOperator':
        return TorusOperator(self.space, scalar * self.matrix)

    def dagger(self) -> 'TorusOperator':
        return TorusOperator(self.space, self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def distance(self, other: 'TorusOperator') -> float:
        """Largest entrywise deviation from another operator"""
        self._check_space(other)
        return float(np.max(np.abs(self.matrix - other.matrix)))

    def is_unitary(self, tolerance: Optional[float] = None) -> bool:
        tolerance = config.TOLERANCE if tolerance is None else tolerance
        product = self.matrix @ self.matrix.conj().T
        return bool(np.allclose(product, np.eye(self.space.n_states), rtol=0, atol=tolerance))

    def is_hermitian(self, tolerance: Optional[float] = None) -> bool:
        tolerance = config.TOLERANCE if tolerance is None else tolerance
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0, atol=tolerance))


@dataclass(frozen=True)
class TorusState:
    """State vector in the |q_n> basis; normalization is left to normalize()"""
    space: TorusSpace
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape != (self.space.n_states,):
            raise DomainError(
                f"state has {amplitudes.shape[0]} amplitudes, expected {self.space.n_states}"
            )
        object.__setattr__(self, 'amplitudes', amplitudes)

    @classmethod
    def position(cls, space: TorusSpace, n: int) -> 'TorusState':
        """Position eigenstate |q_n>"""
        amplitudes = np.zeros(space.n_states, dtype=complex)
        amplitudes[n % space.n_states] = 1.0
        return cls(space, amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> 'TorusState':
        norm = self.norm()
        if norm == 0:
            raise DomainError("cannot normalize the zero vector")
        return TorusState(self.space, self.amplitudes / norm)

    def density_operator(self) -> TorusOperator:
        """|psi><psi|"""
        return TorusOperator(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))


def fourier_kernel(space: TorusSpace) -> TorusOperator:
    """
    Finite Fourier transform between position and momentum states:
    F_{m,n} = N^{-1/2} exp(i 2 pi (m + chi_p)(n + chi_q) / N).
    """
    n = space.n_states
    m_idx, n_idx = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    chi = space.exact_chi
    if chi is not None:
        cross = chi[0] * chi[1]
        # chi_p chi_q is rational; fold it into a shared denominator
        scale = cross.denominator
        numerator = np.mod(m_idx * n_idx, n) * scale + cross.numerator
        phase = lattice_phase(space, numerator, n * scale, n_idx * scale, m_idx * scale)
    else:
        chi_p, chi_q = space.chi
        turns = (np.mod(m_idx * n_idx, n) + m_idx * chi_q + n_idx * chi_p + chi_p * chi_q) / n
        phase = np.exp(2j * np.pi * turns)
    return TorusOperator(space, phase / math.sqrt(n))


def translation(space: TorusSpace, chord: ChordIndex) -> TorusOperator:
    """
    Translation operator T_{r,s} for any integer chord.

    The image |q_{n+s}> is reduced to row t = (n+s) mod N with winding
    j = floor((n+s)/N), which contributes exp(-i 2 pi j chi_p).
    """
    n = space.n_states
    columns = np.arange(n)
    shifted = columns + chord.s
    winding, rows = np.divmod(shifted, n)
    phase = lattice_phase(
        space,
        numerator=chord.r * (2 * columns + chord.s),
        denominator=2 * n,
        chi_p_coeff=-2 * n * winding,
        chi_q_coeff=2 * chord.r,
    )
    matrix = np.zeros((n, n), dtype=complex)
    matrix[rows, columns] = phase
    return TorusOperator(space, matrix)


def reflection(space: TorusSpace, center: CenterIndex) -> TorusOperator:
    """
    Reflection operator R_x through the center with doubled labels (a2, b2).

    Maps |q_n> onto |q_{b2-n}>; the winding of b2 - n is handled as in translation().
    """
    n = space.n_states
    columns = np.arange(n)
    image = center.b2 - columns
    winding, rows = np.divmod(image, n)
    step = center.b2 - 2 * columns
    phase = lattice_phase(
        space,
        numerator=step * center.a2,
        denominator=2 * n,
        chi_p_coeff=2 * step - 2 * n * winding,
    )
    matrix = np.zeros((n, n), dtype=complex)
    matrix[rows, columns] = phase
    return TorusOperator(space, matrix)


def schwinger_tq(space: TorusSpace) -> TorusOperator:
    """Minimal position shift T_{0,1}"""
    return translation(space, ChordIndex(0, 1))


def schwinger_tp(space: TorusSpace) -> TorusOperator:
    """Minimal momentum shift T_{1,0}"""
    return translation(space, ChordIndex(1, 0))


def wedge_turns(space: TorusSpace, center: CenterIndex, chord: ChordIndex):
    """
    N x ^ xi as (numerator, chi_p_coeff, chi_q_coeff) over the denominator 2N:
    N x ^ xi = [(a2 + 2 chi_p) s - (b2 + 2 chi_q) r] / (2N).
    """
    return (center.a2 * chord.s - center.b2 * chord.r, 2 * chord.s, -2 * chord.r)


def translation_from_reflections(space: TorusSpace, chord: ChordIndex) -> TorusOperator:
    """T_xi = (1/2N) sum over a2, b2 in [0, 2N) of exp(-i 2 pi N x ^ xi) R_x"""
    n = space.n_states
    matrix = np.zeros((n, n), dtype=complex)
    for a2 in range(2 * n):
        for b2 in range(2 * n):
            center = CenterIndex(a2, b2)
            numerator, chi_p_coeff, chi_q_coeff = wedge_turns(space, center, chord)
            weight = lattice_phase(space, -numerator, 2 * n, -chi_p_coeff, -chi_q_coeff)
            matrix += weight * reflection(space, center).matrix
    return TorusOperator(space, matrix / (2 * n))


def reflection_from_translations(space: TorusSpace, center: CenterIndex) -> TorusOperator:
    """R_x = (1/2N) sum over r, s in [0, 2N) of exp(+i 2 pi N x ^ xi) T_xi"""
    n = space.n_states
    matrix = np.zeros((n, n), dtype=complex)
    for r in range(2 * n):
        for s in range(2 * n):
            chord = ChordIndex(r, s)
            numerator, chi_p_coeff, chi_q_coeff = wedge_turns(space, center, chord)
            weight = lattice_phase(space, numerator, 2 * n, chi_p_coeff, chi_q_coeff)
            matrix += weight * translation(space, chord).matrix
    return TorusOperator(space, matrix / (2 * n))


def translation_element(space: TorusSpace, chord: ChordIndex, m: int, n: int) -> complex:
    """
    Closed form of <q_m| T_xi |q_n> for m, n in [0, N):
    delta(m, n+s mod N) exp(i 2 pi [r((m+n)/2 + chi_q) + (chi_p - r/2)(m - n - s)] / N).
    """
    size = space.n_states
    if (m - n - chord.s) % size:
        return 0j
    chi_p, chi_q = space.chi
    turns = (chord.r * ((m + n) / 2 + chi_q) + (chi_p - chord.r / 2) * (m - n - chord.s)) / size
    return complex(np.exp(2j * np.pi * turns))


def reflection_element(space: TorusSpace, center: CenterIndex, m: int, n: int) -> complex:
    """
    Closed form of <q_m| R_x |q_n> for m, n in [0, N):
    delta(m, 2b - n mod N) exp(i 2 pi (m - n)(a + chi_p) / N) exp(i 2 pi a (2b - n - m) / N).
    """
    size = space.n_states
    if (m + n - center.b2) % size:
        return 0j
    chi_p, _ = space.chi
    a = center.a2 / 2
    turns = ((m - n) * (a + chi_p) + a * (center.b2 - n - m)) / size
    return complex(np.exp(2j * np.pi * turns))


def translation_periodicity_phase(space: TorusSpace, chord: ChordIndex, k: Tuple[int, int]) -> complex:
    """
    Factor in T_{xi + k} = phase * T_xi for a lattice vector k (chord labels shifted by k N):
    (-1)^(s k_p + r k_q + k_p k_q N) exp(i 2 pi (k_p chi_q - k_q chi_p)).
    """
    k_p, k_q = k
    sign = int(parity_sign(chord.s * k_p + chord.r * k_q + k_p * k_q * space.n_states))
    exact = exact_phase(space, 0, 1, -k_q, k_p)
    if exact is not None:
        return sign * exact.to_complex()
    return sign * complex(lattice_phase(space, 0, 1, -k_q, k_p))


def reflection_periodicity_sign(space: TorusSpace, center: CenterIndex, k: Tuple[int, int]) -> int:
    """
    Sign in R_{x + k/2} = sign * R_x (doubled labels shifted by k N):
    (-1)^(b2 k_p + a2 k_q + k_p k_q N).
    """
    k_p, k_q = k
    return int(parity_sign(center.b2 * k_p + center.a2 * k_q + k_p * k_q * space.n_states))


def translation_trace(space: TorusSpace, chord: ChordIndex) -> complex:
    """
    Tr T_xi: N (-1)^(i j N) exp(i 2 pi (i chi_q - j chi_p)) when xi = (i, j) is an
    integer chord (r = iN, s = jN), zero otherwise.
    """
    n = space.n_states
    if chord.r % n or chord.s % n:
        return 0j
    i, j = chord.r // n, chord.s // n
    sign = int(parity_sign(i * j * n))
    return n * sign * complex(lattice_phase(space, 0, 1, -j, i))


def reflection_trace(space: TorusSpace, center: CenterIndex) -> int:
    """Tr R_x = f_N(x)"""
    return f_n(space, center)


def nested_space(small: TorusSpace, nu: int) -> TorusSpace:
    """
    Torus of side nu whose Floquet angles chi' = nu chi - k lie in [0, 1).
    """
    if int(nu) != nu or nu < 2:
        raise DomainError(f"nesting factor must be an integer > 1, got {nu}")
    if small.period != 1:
        raise DomainError("only unit tori can be nested")
    chi = small.exact_chi
    if chi is not None:
        big_chi = tuple((nu * c) % 1 for c in chi)
    else:
        big_chi = tuple((nu * c) % 1.0 for c in small.chi)
    return TorusSpace(nu * nu * small.n_states, big_chi[0], big_chi[1], period=nu)


def _winding_vector(big: TorusSpace, small: TorusSpace, nu: int) -> Tuple[int, int]:
    """Integer k with chi' = nu chi - k; raises when no such k exists"""
    windings = []
    for small_angle, big_angle in ((small.chi_p, big.chi_p), (small.chi_q, big.chi_q)):
        exact_small, exact_big = as_exact_angle(small_angle), as_exact_angle(big_angle)
        if exact_small is not None and exact_big is not None:
            k = nu * exact_small - exact_big
            if k.denominator != 1:
                raise DomainError(f"chi'={big_angle} is not nu*chi - k for chi={small_angle}, nu={nu}")
            windings.append(int(k))
        else:
            k = nu * float(small_angle) - float(big_angle)
            if abs(k - round(k)) > 1e-9:
                raise DomainError(f"chi'={big_angle} is not nu*chi - k for chi={small_angle}, nu={nu}")
            windings.append(int(round(k)))
    return windings[0], windings[1]


def embedding_matrix(big: TorusSpace, small: TorusSpace, nu: int) -> np.ndarray:
    """
    Columns are the unit-torus position states inside the nu-fold torus,
    |q_n, N> = nu^{-1/2} sum_{j<nu} exp(i 2 pi chi_p j) |q'_{nu n + k_q + j nu N}>.

    Args:
        big: Torus of side nu with nu**2 N states and angles chi'
        small: Unit torus with N states and angles chi
        nu: Nesting factor

    Returns:
        (nu**2 N) x N matrix with orthonormal columns
    """
    if int(nu) != nu or nu < 2:
        raise DomainError(f"nesting factor must be an integer > 1, got {nu}")
    if big.n_states != nu * nu * small.n_states:
        raise DomainError(
            f"big torus has {big.n_states} states, expected nu^2 N = {nu * nu * small.n_states}"
        )
    _, k_q = _winding_vector(big, small, nu)

    n = small.n_states
    embedding = np.zeros((big.n_states, n), dtype=complex)
    blocks = np.arange(nu)
    weights = lattice_phase(small, 0, 1, blocks, 0) / math.sqrt(nu)
    for column in range(n):
        index = nu * column + k_q + blocks * nu * n
        winding, rows = np.divmod(index, big.n_states)
        # k_q may push the last block past the end of the big torus
        wrap = lattice_phase(big, 0, 1, -winding, 0)
        embedding[rows, column] = weights * wrap
    return embedding


def nested_projector(big: TorusSpace, small: TorusSpace, nu: int) -> TorusOperator:
    """Rank-N projector sum_n |q_n,N><q_n,N| onto the embedded unit-torus space"""
    embedding = embedding_matrix(big, small, nu)
    logger.debug(f"Nested projector for {small} inside {big}")
    return TorusOperator(big, embedding @ embedding.conj().T)


def nested_translation(big: TorusSpace, chord: ChordIndex) -> TorusOperator:
    """Translation by the unit-torus chord (r/N, s/N) acting on the nu-fold torus"""
    nu = big.period
    return translation(big, ChordIndex(nu * chord.r, nu * chord.s))


def restrict_to_embedding(big_operator: TorusOperator, small: TorusSpace, nu: int) -> TorusOperator:
    """V^dagger A V, the block of a big-torus operator seen by the embedded unit torus"""
    embedding = embedding_matrix(big_operator.space, small, nu)
    return TorusOperator(small, embedding.conj().T @ big_operator.matrix @ embedding)
