"""
Identity suites behind `torus_cli.py verify`.

Each suite checks a family of exact identities on one torus space and
returns a pandas table with one row per identity: the number of cases
checked, the largest deviation found and whether it stays within the
tolerance.
"""

import logging
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from config import config
from exceptions import DomainError
from qps_lattice import (
    CenterIndex, ChordIndex, TorusSpace, f_n, fundamental_chords, lattice_phase, quarter_centers
)
from torus_operators import (
    TorusOperator, embedding_matrix, nested_projector, nested_space, nested_translation,
    reflection, reflection_from_translations, reflection_periodicity_sign, reflection_trace,
    restrict_to_embedding, schwinger_tp, schwinger_tq, translation, translation_from_reflections,
    translation_periodicity_phase, translation_trace, wedge_turns
)
from weyl_symbols import (
    center_symbol, center_symbol_from_traces, center_to_chord, chord_symbol,
    chord_symbol_from_traces, chord_to_center, hermitian_defect, identity_center_symbol,
    identity_chord_symbol, operator_from_center, operator_from_chord, position_matrix_from_center,
    position_matrix_from_chord, qps_reflection, recenter_odd_n
)
from symbol_products import (
    center_product, center_product_multi, center_trace_product, chord_product,
    chord_product_multi, chord_trace_product, qps_center_product_multi
)
from dynamics import (
    CatMapSpec, cat_chord_form, cat_map_unitary, covariance_defect, path_integral_center,
    propagator_exact, propagator_trotter, short_time_center_symbol
)
from plane_projection import PeriodicPlaneSymbol, quantize_hamiltonian

logger = logging.getLogger(__name__)

RANDOM_OPERATORS = 20
F_N_CASES = (2, 1, 0, -1)


def random_operator(space: TorusSpace, rng: np.random.Generator, hermitian: bool = False) -> TorusOperator:
    """Dense operator with independent standard normal real and imaginary parts"""
    n = space.n_states
    matrix = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    if hermitian:
        matrix = (matrix + matrix.conj().T) / 2
    return TorusOperator(space, matrix)


class SuiteReport:
    """Collects per-identity results for one suite run"""

    def __init__(self, suite: str, space: TorusSpace, tolerance: Optional[float] = None):
        self.suite = suite
        self.space = space
        self.tolerance = config.TOLERANCE if tolerance is None else tolerance
        self.rows: List[Dict] = []

    def record(self, identity: str, errors, cases: Optional[int] = None):
        errors = np.atleast_1d(np.asarray(errors, dtype=float))
        max_error = float(errors.max()) if errors.size else 0.0
        self.rows.append({
            'suite': self.suite,
            'identity': identity,
            'cases': len(errors) if cases is None else cases,
            'max_error': max_error,
            'passed': bool(max_error <= self.tolerance),
        })

    def table(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=['suite', 'identity', 'cases', 'max_error', 'passed'])


def run_cocycle_suite(space: TorusSpace, rng: np.random.Generator, budget: Optional[int] = None) -> pd.DataFrame:
    """Group law of translations and reflections, periodicity, Schwinger powers"""
    report = SuiteReport('cocycle', space)
    n = space.n_states
    chords = fundamental_chords(space)
    centers = quarter_centers(space)
    translations = {(c.r, c.s): translation(space, c) for c in chords}
    reflections = {(x.a2, x.b2): reflection(space, x) for x in centers}

    errors = []
    for c1 in chords:
        for c2 in chords:
            phase = lattice_phase(space, c1.r * c2.s - c1.s * c2.r, 2 * n)
            expected = complex(phase) * translation(space, c1 + c2)
            errors.append((translations[(c1.r, c1.s)] @ translations[(c2.r, c2.s)]).distance(expected))
    report.record('T(xi1) T(xi2) = exp(i pi N xi1^xi2) T(xi1+xi2)', errors)

    errors = [translation(space, -c).distance(translations[(c.r, c.s)].dagger()) for c in chords]
    report.record('T(-xi) = T(xi)^dagger', errors)

    tp, tq = schwinger_tp(space), schwinger_tq(space)
    report.record(
        'T_p T_q = exp(2 pi i / N) T_q T_p',
        (tp @ tq).distance(complex(lattice_phase(space, 1, n)) * (tq @ tp)),
    )
    identity = TorusOperator.identity(space)
    tq_power = TorusOperator(space, np.linalg.matrix_power(tq.matrix, n))
    tp_power = TorusOperator(space, np.linalg.matrix_power(tp.matrix, n))
    report.record('T_q^N = exp(-2 pi i chi_p)', tq_power.distance(complex(lattice_phase(space, 0, 1, -1, 0)) * identity))
    report.record('T_p^N = exp(+2 pi i chi_q)', tp_power.distance(complex(lattice_phase(space, 0, 1, 0, 1)) * identity))

    rt_errors, tr_errors = [], []
    for x in centers:
        for c in chords:
            numerator, chi_p_coeff, chi_q_coeff = wedge_turns(space, x, c)
            phase = complex(lattice_phase(space, -numerator, 2 * n, -chi_p_coeff, -chi_q_coeff))
            r_op, t_op = reflections[(x.a2, x.b2)], translations[(c.r, c.s)]
            rt_errors.append((r_op @ t_op).distance(phase * reflection(space, x.shifted(-c))))
            tr_errors.append((t_op @ r_op).distance(phase * reflection(space, x.shifted(c))))
    report.record('R(x) T(xi) = exp(-i 2 pi N x^xi) R(x - xi/2)', rt_errors)
    report.record('T(xi) R(x) = exp(-i 2 pi N x^xi) R(x + xi/2)', tr_errors)

    errors = []
    for x1 in centers:
        for x2 in centers:
            numerator = -(x1.a2 * x2.b2 - x1.b2 * x2.a2)
            phase = lattice_phase(space, numerator, 2 * n, -2 * (x2.b2 - x1.b2), -2 * (x1.a2 - x2.a2))
            expected = complex(phase) * translation(space, ChordIndex(x1.a2 - x2.a2, x1.b2 - x2.b2))
            errors.append((reflections[(x1.a2, x1.b2)] @ reflections[(x2.a2, x2.b2)]).distance(expected))
    report.record('R(x1) R(x2) = exp(-i 4 pi N x1^x2) T(2(x1 - x2))', errors)

    report.record('R(x)^2 = 1', [(r_op @ r_op).distance(identity) for r_op in reflections.values()])

    t_errors, r_errors = [], []
    windings = [(k_p, k_q) for k_p in (-1, 0, 1) for k_q in (-1, 0, 1)]
    for k in windings:
        for c in chords:
            shifted = translation(space, ChordIndex(c.r + k[0] * n, c.s + k[1] * n))
            t_errors.append(shifted.distance(translation_periodicity_phase(space, c, k) * translations[(c.r, c.s)]))
        for x in centers:
            shifted = reflection(space, CenterIndex(x.a2 + k[0] * n, x.b2 + k[1] * n))
            r_errors.append(shifted.distance(reflection_periodicity_sign(space, x, k) * reflections[(x.a2, x.b2)]))
    report.record('T(xi + k) periodicity phase, k in {-1,0,1}^2', t_errors)
    report.record('R(x + k/2) periodicity sign, k in {-1,0,1}^2', r_errors)

    report.record(
        'T(xi) from the reflection sum',
        [translation_from_reflections(space, c).distance(translations[(c.r, c.s)]) for c in chords],
    )
    report.record(
        'R(x) from the translation sum',
        [reflection_from_translations(space, x).distance(reflections[(x.a2, x.b2)]) for x in centers],
    )
    return report.table()


def run_traces_suite(space: TorusSpace, rng: np.random.Generator, budget: Optional[int] = None) -> pd.DataFrame:
    """Traces of translations over two periods and the f_N table of reflection traces"""
    report = SuiteReport('traces', space)
    n = space.n_states
    errors = []
    for r in range(-n, 2 * n + 1):
        for s in range(-n, 2 * n + 1):
            chord = ChordIndex(r, s)
            errors.append(abs(translation(space, chord).trace() - translation_trace(space, chord)))
    report.record('Tr T(xi) = N (-1)^(ijN) exp(i 2 pi (i chi_q - j chi_p)) delta', errors)

    by_case = {value: [] for value in F_N_CASES}
    for a2 in range(2 * n):
        for b2 in range(2 * n):
            center = CenterIndex(a2, b2)
            expected = f_n(space, center)
            by_case.setdefault(expected, []).append(abs(reflection(space, center).trace() - expected))
    for value in F_N_CASES:
        report.record(f'Tr R(x) = f_N(x) = {value}', by_case[value], cases=len(by_case[value]))

    report.record(
        'Tr R(x) from reflection_trace',
        [abs(reflection(space, x).trace() - reflection_trace(space, x)) for x in quarter_centers(space)],
    )
    if space.is_odd:
        errors = [
            abs(qps_reflection(space, alpha, beta).trace() - 1)
            for alpha in range(n) for beta in range(n)
        ]
        report.record('Tr R(X) = 1 on quantum phase space', errors)
    return report.table()


def run_symbols_suite(space: TorusSpace, rng: np.random.Generator, budget: Optional[int] = None) -> pd.DataFrame:
    """Symbol bijections on random operators"""
    report = SuiteReport('symbols', space)
    operators = [random_operator(space, rng) for _ in range(RANDOM_OPERATORS)]
    chord_round, center_round, chord_paths, center_paths = [], [], [], []
    chord_matrix, center_matrix, to_center, to_chord = [], [], [], []
    qps_round = []
    for op in operators:
        chord = chord_symbol(op)
        center = center_symbol(op)
        chord_round.append(operator_from_chord(chord).distance(op))
        center_round.append(operator_from_center(center).distance(op))
        chord_paths.append(np.max(np.abs(chord.values - chord_symbol_from_traces(op).values)))
        center_paths.append(np.max(np.abs(center.values - center_symbol_from_traces(op).values)))
        chord_matrix.append(np.max(np.abs(position_matrix_from_chord(chord) - op.matrix)))
        center_matrix.append(np.max(np.abs(position_matrix_from_center(center) - op.matrix)))
        to_center.append(np.max(np.abs(chord_to_center(chord).values - center.values)))
        to_chord.append(np.max(np.abs(center_to_chord(center).values - chord.values)))
        if space.is_odd:
            qps_round.append(operator_from_center(recenter_odd_n(center)).distance(op))

    report.record('operator -> chord -> operator', chord_round)
    report.record('operator -> center -> operator', center_round)
    report.record('chord symbol: position sum = Tr(A T(-xi))', chord_paths)
    report.record('center symbol: position sum = Tr(A R(x))', center_paths)
    report.record('position matrix from chord symbol', chord_matrix)
    report.record('position matrix from center symbol', center_matrix)
    report.record('chord -> center conversion', to_center)
    report.record('center -> chord conversion', to_chord)
    if space.is_odd:
        report.record('reconstruction from QPS center symbol', qps_round)

    hermitian = [random_operator(space, rng, hermitian=True) for _ in range(RANDOM_OPERATORS)]
    report.record('Hermitian operator: real center symbol', [hermitian_defect(center_symbol(h)) for h in hermitian])
    report.record('Hermitian operator: A(-xi) = A(xi)*', [hermitian_defect(chord_symbol(h)) for h in hermitian])

    identity = TorusOperator.identity(space)
    report.record(
        'identity: chord symbol N delta',
        np.max(np.abs(chord_symbol(identity).values - identity_chord_symbol(space).values)),
    )
    report.record(
        'identity: center symbol f_N',
        np.max(np.abs(center_symbol(identity).values - identity_center_symbol(space).values)),
    )
    return report.table()


def run_products_suite(space: TorusSpace, rng: np.random.Generator, budget: Optional[int] = None) -> pd.DataFrame:
    """Product rules against the matrix product"""
    report = SuiteReport('products', space)
    pairs = [(random_operator(space, rng), random_operator(space, rng)) for _ in range(RANDOM_OPERATORS)]
    chord_errors, center_errors, chord_traces, center_traces = [], [], [], []
    for a, b in pairs:
        product = a @ b
        chord_errors.append(np.max(np.abs(
            chord_product(chord_symbol(a), chord_symbol(b)).values - chord_symbol(product).values
        )))
        center_errors.append(np.max(np.abs(
            center_product(center_symbol(a), center_symbol(b)).values - center_symbol(product).values
        )))
        chord_traces.append(abs(chord_trace_product(chord_symbol(a), chord_symbol(b)) - product.trace()))
        center_traces.append(abs(center_trace_product(center_symbol(a), center_symbol(b)) - product.trace()))
    report.record('chord product rule', chord_errors)
    report.record('center product rule', center_errors)
    report.record('Tr(AB) from chord symbols', chord_traces)
    report.record('Tr(AB) from center symbols', center_traces)

    ops = [random_operator(space, rng) for _ in range(4)]
    triple = ops[0] @ ops[1] @ ops[2]
    multi = chord_product_multi([chord_symbol(op) for op in ops[:3]], budget=budget)
    report.record('three-fold chord product', np.max(np.abs(multi.values - chord_symbol(triple).values)))
    multi = center_product_multi([center_symbol(op) for op in ops[:3]], budget=budget)
    report.record('three-fold center product', np.max(np.abs(multi.values - center_symbol(triple).values)))
    quadruple = triple @ ops[3]
    multi = center_product_multi([center_symbol(op) for op in ops], budget=budget)
    report.record('four-fold center product', np.max(np.abs(multi.values - center_symbol(quadruple).values)))

    if space.is_odd:
        errors = []
        for a, b in pairs:
            expected = recenter_odd_n(center_symbol(a @ b))
            qps = qps_center_product_multi([center_symbol(a), center_symbol(b)], budget=budget)
            errors.append(np.max(np.abs(qps.values - expected.values)))
        report.record('QPS product rule after recentering', errors)
    return report.table()


def run_feline_suite(space: TorusSpace, rng: np.random.Generator, budget: Optional[int] = None,
                     cat_map: Optional[CatMapSpec] = None) -> pd.DataFrame:
    """Cat map quantization (B = identity unless given): unitarity and covariance of symbols"""
    if not space.is_odd:
        raise DomainError(f"feline suite requires odd N, got N={space.n_states}")
    report = SuiteReport('feline', space)
    n = space.n_states
    spec = cat_map or CatMapSpec.from_cayley(((1, 0), (0, 1)))
    unitary = cat_map_unitary(space, spec)
    report.record(
        'cat map U U^dagger = 1',
        np.max(np.abs(unitary.matrix @ unitary.matrix.conj().T - np.eye(n))),
    )

    m = spec.m
    errors = []
    for c in fundamental_chords(space):
        image = ChordIndex(m[0][0] * c.r + m[0][1] * c.s, m[1][0] * c.r + m[1][1] * c.s)
        errors.append((unitary @ translation(space, c) @ unitary.dagger()).distance(translation(space, image)))
    report.record('U T(xi) U^dagger = T(M xi)', errors)

    operators = [random_operator(space, rng) for _ in range(RANDOM_OPERATORS)]
    report.record('center symbol covariance', [covariance_defect(op, spec) for op in operators])
    report.record('chord symbol covariance', [covariance_defect(op, spec, symbols=('chord',)) for op in operators])

    if spec.b != ((1, 0), (0, 1)):
        return report.table()
    # U(xi) at doubled labels equals the quadratic chord form up to one global phase
    chord = chord_symbol(unitary)
    doubled = np.array([
        [chord.extend(2 * r, 2 * s) for s in range(n)] for r in range(n)
    ])
    ratio = doubled / cat_chord_form(space, spec)
    report.record('chord form of the cat map', np.max(np.abs(ratio - ratio[0, 0])))
    return report.table()


def run_nested_suite(space: TorusSpace, rng: np.random.Generator, budget: Optional[int] = None) -> pd.DataFrame:
    """Unit torus embedded in its 2- and 3-fold covers"""
    report = SuiteReport('nested', space)
    n = space.n_states
    for nu in (2, 3):
        big = nested_space(space, nu)
        projector = nested_projector(big, space, nu)
        embedding = embedding_matrix(big, space, nu)
        report.record(f'nu={nu}: P^2 = P', (projector @ projector).distance(projector))
        report.record(f'nu={nu}: P Hermitian', projector.distance(projector.dagger()))
        report.record(f'nu={nu}: Tr P = N', abs(projector.trace() - n))
        report.record(f'nu={nu}: embedded states orthonormal', np.max(np.abs(embedding.conj().T @ embedding - np.eye(n))))

        lifted, foreign = [], []
        for c in fundamental_chords(space):
            restricted = restrict_to_embedding(nested_translation(big, c), space, nu)
            lifted.append(restricted.distance(translation(space, c)))
        for r in range(nu * n):
            for s in range(nu * n):
                if r % nu == 0 and s % nu == 0:
                    continue
                sandwiched = projector @ translation(big, ChordIndex(r, s)) @ projector
                foreign.append(float(np.max(np.abs(sandwiched.matrix))))
        report.record(f'nu={nu}: lifted translations restrict to T(xi)', lifted)
        report.record(f'nu={nu}: non-commensurate translations project to zero', foreign)
    return report.table()


def run_dynamics_suite(space: TorusSpace, rng: np.random.Generator, budget: Optional[int] = None) -> pd.DataFrame:
    """Propagator group law and the discrete path sum for the Harper Hamiltonian"""
    report = SuiteReport('dynamics', space)
    hamiltonian = quantize_hamiltonian(space, PeriodicPlaneSymbol.harper())
    u_1 = propagator_exact(hamiltonian, 0.03)
    u_2 = propagator_exact(hamiltonian, 0.05)
    report.record('U(t) U(s) = U(t + s)', (u_1 @ u_2).distance(propagator_exact(hamiltonian, 0.08)))
    report.record('U(t) unitary', np.max(np.abs(u_2.matrix @ u_2.matrix.conj().T - np.eye(space.n_states))))
    report.record(
        'Trotter product of one step is exact',
        propagator_trotter(hamiltonian, 0.05, 1).distance(u_2),
    )

    h_symbol = center_symbol(hamiltonian)
    t = 0.05
    single = path_integral_center(h_symbol, t, 1, budget=budget)
    short = short_time_center_symbol(h_symbol, t / 2)
    report.record(
        'path sum with M=1 is the product of two short-time symbols',
        np.max(np.abs(single.values - center_product(short, short).values)),
    )
    exact = center_symbol(propagator_exact(hamiltonian, t)).values
    error_1 = float(np.max(np.abs(single.values - exact)))
    error_2 = float(np.max(np.abs(path_integral_center(h_symbol, t, 2, budget=budget).values - exact)))
    logger.info(f"Path sum error at t={t}: M=1 {error_1:.3e}, M=2 {error_2:.3e}")
    report.rows.append({
        'suite': 'dynamics',
        'identity': 'path sum error decreases from M=1 to M=2',
        'cases': 1,
        'max_error': error_2,
        'passed': bool(error_2 < error_1 or error_1 <= report.tolerance),
    })
    return report.table()


SUITES: Dict[str, Callable[..., pd.DataFrame]] = {
    'cocycle': run_cocycle_suite,
    'traces': run_traces_suite,
    'symbols': run_symbols_suite,
    'products': run_products_suite,
    'feline': run_feline_suite,
    'nested': run_nested_suite,
    'dynamics': run_dynamics_suite,
}


def run_suite(name: str, space: TorusSpace, seed: Optional[int] = None,
              budget: Optional[int] = None, cat_map: Optional[CatMapSpec] = None) -> pd.DataFrame:
    """Run one named suite with a seeded generator; cat_map only applies to the feline suite"""
    if name not in SUITES:
        raise KeyError(name)
    seed = config.DEFAULT_SEED if seed is None else seed
    rng = np.random.default_rng(seed)
    logger.info(f"Running {name} suite on {space} with seed {seed}")
    if name == 'feline' and cat_map is not None:
        return run_feline_suite(space, rng, budget=budget, cat_map=cat_map)
    return SUITES[name](space, rng, budget=budget)
