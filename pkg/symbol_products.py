"""
Product rules for chord and center symbols.

Every rule is a finite lattice sum whose phases are built from integer
polygon areas (see qps_lattice.chord_polygon_numerator and
center_polygon_numerator) and exponentiated once per term. Sums run in a
fixed row-major order over the fundamental labels.
"""

import itertools
import logging
from typing import List, Optional, Sequence

import numpy as np

from config import config
from exceptions import BudgetExceededError, DomainError
from qps_lattice import (
    TorusSpace, center_polygon_corner, center_polygon_numerator, chord_polygon_numerator, f_n_values,
    lattice_phase
)
from weyl_symbols import (
    CenterSymbol, ChordSymbol, _extend_chord_values, identity_center_symbol, recenter_odd_n
)

logger = logging.getLogger(__name__)


def _check_same_space(symbols: Sequence):
    if len(symbols) == 0:
        raise DomainError("product of an empty list of symbols")
    first = symbols[0].space
    for sym in symbols[1:]:
        if not sym.space.same_as(first):
            raise DomainError(f"symbols live on different spaces: {first} vs {sym.space}")


def _check_budget(estimated_terms: int, budget: Optional[int], label: str):
    budget = config.TERM_BUDGET if budget is None else budget
    if estimated_terms > budget:
        raise BudgetExceededError(
            f"{label} needs about {estimated_terms:.3g} terms, budget is {budget:.3g}"
        )
    logger.debug(f"{label}: {estimated_terms} terms")


def chord_product(a: ChordSymbol, b: ChordSymbol) -> ChordSymbol:
    """
    Chord symbol of the operator product A B:
    AB(xi) = (1/N) sum_{xi1} A(xi1) B(xi - xi1) exp(i pi N xi1 ^ xi).

    The phase is the area of the closed triangle (xi1, xi - xi1, -xi).
    """
    _check_same_space([a, b])
    space = a.space
    n = space.n_states
    r, s, r1, s1 = np.meshgrid(*(np.arange(n),) * 4, indexing='ij')
    b_values = _extend_chord_values(b, r - r1, s - s1)
    phase = lattice_phase(space, chord_polygon_numerator([(r1, s1), (r - r1, s - s1)]), 2 * n)
    terms = a.values[r1, s1] * b_values * phase
    values = terms.reshape(n, n, n * n).sum(axis=2) / n
    return ChordSymbol(space, values)


def chord_product_multi(symbols: Sequence[ChordSymbol], budget: Optional[int] = None) -> ChordSymbol:
    """
    Chord symbol of S_1 S_2 ... S_n:
    (1/N^(n-1)) sum S_1(xi_1) ... S_{n-1}(xi_{n-1}) S_n(xi - sum) exp(i 2 pi N D(xi_1, ..., xi_{n-1}, xi - sum)).

    The leading n-2 chords are looped over; the last free chord and the
    output chord are vectorized.
    """
    _check_same_space(symbols)
    if len(symbols) == 1:
        return ChordSymbol(symbols[0].space, symbols[0].values.copy())
    if len(symbols) == 2:
        return chord_product(symbols[0], symbols[1])

    space = symbols[0].space
    n = space.n_states
    count = len(symbols)
    _check_budget(n ** 2 * n ** (2 * (count - 1)), budget, f"{count}-fold chord product")

    r, s, r_last, s_last = np.meshgrid(*(np.arange(n),) * 4, indexing='ij')
    last_values = symbols[-2].values[r_last, s_last]
    result = np.zeros((n, n), dtype=complex)
    chords = [(i, j) for i in range(n) for j in range(n)]

    for leading in itertools.product(chords, repeat=count - 2):
        weight = 1 + 0j
        for sym, (ri, si) in zip(symbols, leading):
            weight *= sym.values[ri, si]
        if weight == 0:
            continue
        total_r = sum(ri for ri, _ in leading) + r_last
        total_s = sum(si for _, si in leading) + s_last
        numerator = chord_polygon_numerator([*leading, (r_last, s_last), (r - total_r, s - total_s)])
        closing = _extend_chord_values(symbols[-1], r - total_r, s - total_s)
        terms = weight * last_values * closing * lattice_phase(space, numerator, 2 * n)
        result += terms.reshape(n, n, n * n).sum(axis=2)

    return ChordSymbol(space, result / n ** (count - 1))


def _center_polygon_sum(space: TorusSpace, ordered: List[np.ndarray], labels: np.ndarray,
                        with_corner: bool) -> np.ndarray:
    """
    Shared engine of the center product rules.

    Args:
        space: Torus of the symbols
        ordered: Flattened value blocks A_1 ... A_2n, A_j sitting at center x_j
            (the rightmost operator first)
        labels: (N^2, 2) doubled labels of the fundamental centers, also used for the output
        with_corner: Multiply by f_N(x + sum_j (-1)^j x_j); off on QPS where it is one

    Returns:
        Flattened sum over all centers without the 1/N^(2n) prefactor
    """
    n = space.n_states
    points = labels.shape[0]
    pairs = len(ordered) // 2

    out_a = labels[:, 0][:, None, None]
    out_b = labels[:, 1][:, None, None]
    odd_a = labels[:, 0][None, :, None]
    odd_b = labels[:, 1][None, :, None]
    even_a = labels[:, 0][None, None, :]
    even_b = labels[:, 1][None, None, :]
    last_pair = ordered[-2][None, :, None] * ordered[-1][None, None, :]

    result = np.zeros(points, dtype=complex)
    for leading in itertools.product(range(points), repeat=2 * (pairs - 1)):
        weight = 1 + 0j
        for values, index in zip(ordered, leading):
            weight *= values[index]
        if weight == 0:
            continue

        centers = [tuple(labels[index]) for index in leading] + [(odd_a, odd_b), (even_a, even_b)]
        numerator = center_polygon_numerator((out_a, out_b), centers)
        terms = weight * last_pair * lattice_phase(space, numerator, 2 * n)
        if with_corner:
            terms = terms * f_n_values(n, *center_polygon_corner((out_a, out_b), centers))
        result += terms.reshape(points, -1).sum(axis=1)
    return result


def _quarter_labels(n: int, step: int) -> np.ndarray:
    a2, b2 = np.meshgrid(step * np.arange(n), step * np.arange(n), indexing='ij')
    return np.stack([a2.reshape(-1), b2.reshape(-1)], axis=1)


def center_product(a: CenterSymbol, b: CenterSymbol) -> CenterSymbol:
    """
    Center symbol of A B on the Weyl lattice:
    AB(x) = (1/N^2) sum_{x1, x2} A(x2) B(x1) exp(i 2 pi N Delta_3(x, x1, x2)) f_N(x + x2 - x1),
    both sums over the quarter torus.
    """
    if a.on_qps or b.on_qps:
        return center_product_odd_n(a, b)
    return center_product_multi([a, b])


def center_product_multi(symbols: Sequence[CenterSymbol], budget: Optional[int] = None) -> CenterSymbol:
    """
    Center symbol of S_1 ... S_m.

    An odd count is padded on the right with the identity (f_N, or 1 on QPS),
    then operator S_j sits at center x_{m+1-j} of the 2n-fold sum with phase
    Delta_{2n+1} and corner factor f_N(x + sum_j (-1)^j x_j).
    """
    _check_same_space(symbols)
    space = symbols[0].space
    on_qps = symbols[0].on_qps
    if any(sym.on_qps != on_qps for sym in symbols):
        raise DomainError("cannot mix Weyl-lattice and QPS center symbols in one product")

    padded = list(symbols)
    if len(padded) % 2:
        padded.append(identity_center_symbol(space, on_qps=on_qps))

    n = space.n_states
    _check_budget(n ** 2 * n ** (2 * len(padded)), budget, f"{len(padded)}-fold center product")

    ordered = [sym.values.reshape(-1) for sym in reversed(padded)]
    labels = _quarter_labels(n, 2 if on_qps else 1)
    values = _center_polygon_sum(space, ordered, labels, with_corner=not on_qps)
    values = values / n ** len(padded)
    return CenterSymbol(space, values.reshape(n, n), on_qps=on_qps)


def center_product_odd_n(a: CenterSymbol, b: CenterSymbol) -> CenterSymbol:
    """
    Simplified center rule on the QPS points of odd N:
    AB(X) = (1/N^2) sum_{X1, X2} A(X2) B(X1) exp(i 2 pi N Delta_3(X, X1, X2)), no f_N factor.
    Weyl-lattice inputs are recentered first.
    """
    return qps_center_product_multi([a, b])


def qps_center_product_multi(symbols: Sequence[CenterSymbol], budget: Optional[int] = None) -> CenterSymbol:
    """Product of any number of symbols on the QPS points of odd N"""
    _check_same_space(symbols)
    if not symbols[0].space.is_odd:
        raise DomainError(f"N={symbols[0].space.n_states} is even: no QPS product rule")
    recentered = [recenter_odd_n(sym) for sym in symbols]
    return center_product_multi(recentered, budget=budget)


def chord_trace_product(a: ChordSymbol, b: ChordSymbol) -> complex:
    """Tr(A B) = (1/N) sum_{xi1} A(xi1) B(-xi1)"""
    _check_same_space([a, b])
    n = a.space.n_states
    r, s = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    return complex(np.sum(a.values * _extend_chord_values(b, -r, -s)) / n)


def center_trace_product(a: CenterSymbol, b: CenterSymbol) -> complex:
    """Tr(A B) = (1/N) sum_{x1} A(x1) B(x1) over the fundamental centers"""
    _check_same_space([a, b])
    if a.on_qps != b.on_qps:
        a, b = recenter_odd_n(a), recenter_odd_n(b)
    return complex(np.sum(a.values * b.values) / a.space.n_states)
