#!/usr/bin/env python3
"""
Command-line front end for the torus Weyl representation library.

    torus_cli.py wigner  --in state.json --n 3 --out w.pgm --format pgm
    torus_cli.py verify  --suite cocycle --n 3 --chi-p 0.3 --chi-q 0.7
    torus_cli.py verify  --suite feline --n 5 --cat-map cat.json
    torus_cli.py evolve  --in harper.json --n 3 --t 0.1 --mode exact --out u.json --format json
    torus_cli.py product --in a.csv b.csv --representation center --out ab.csv
    torus_cli.py symbol  --in op.json --representation chord --out a.csv

Exit codes: 0 success, 1 usage or parse error, 2 domain error, 3 failed tolerance check.
"""

import sys
import argparse
import logging
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from config import config
from exceptions import DomainError, TorusError, TorusFormatError, ToleranceError
from qps_lattice import TorusSpace
from schemas import EvolutionJob, JobConfig, SpaceConfig
from torus_operators import TorusOperator, TorusState
from weyl_symbols import SymbolKind, center_symbol, make_symbol, operator_of, symbol_of, wigner
from symbol_products import center_product_multi, chord_product_multi, qps_center_product_multi
from dynamics import CatMapSpec, path_integral_center, propagator_exact, propagator_trotter
from plane_projection import PeriodicPlaneSymbol, quantize_hamiltonian
from verification import SUITES, run_suite
from utils.file_handler import file_handler

logger = logging.getLogger(__name__)

USAGE_ERROR = 1
TOLERANCE_FAILURE = ToleranceError.exit_code


class TorusArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _add_space_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('--n', type=int, help='Number of states N')
    parser.add_argument('--chi-p', type=float, default=None, help='Floquet angle chi_p in [0, 1)')
    parser.add_argument('--chi-q', type=float, default=None, help='Floquet angle chi_q in [0, 1)')


def _add_output_arguments(parser: argparse.ArgumentParser, default_format: str = 'csv'):
    parser.add_argument('--out', type=str, help='Output file (default: outputs/<command>.<format>)')
    parser.add_argument('--format', type=str, default=default_format, help='csv, json or pgm')


def build_parser() -> TorusArgumentParser:
    parser = TorusArgumentParser(description='Weyl and chord representations on the quantized torus')
    commands = parser.add_subparsers(dest='command', required=True)

    wigner_parser = commands.add_parser('wigner', help='Wigner function of a state on the 2N x 2N grid')
    wigner_parser.add_argument('--in', dest='inputs', nargs=1, required=True, help='State JSON')
    _add_space_arguments(wigner_parser)
    _add_output_arguments(wigner_parser)

    verify_parser = commands.add_parser('verify', help='Check a suite of exact identities')
    verify_parser.add_argument('--suite', type=str, required=True, help=f"One of {', '.join(SUITES)}")
    verify_parser.add_argument('--seed', type=int, default=None, help='Seed for random operators')
    verify_parser.add_argument('--budget', type=float, default=None, help='Term cap for lattice sums')
    verify_parser.add_argument('--cat-map', type=str, default=None,
                               help='Cat map JSON {"b": [[..], [..]]} or {"m": [[..], [..]]} for the feline suite')
    _add_space_arguments(verify_parser)

    evolve_parser = commands.add_parser('evolve', help='Propagator of a periodic Hamiltonian')
    evolve_parser.add_argument('--in', dest='inputs', nargs=1, required=True,
                               help='Hamiltonian JSON {"terms": [...]} or an evolution job JSON')
    evolve_parser.add_argument('--t', type=float, default=None, help='Evolution time')
    evolve_parser.add_argument('--steps', type=int, default=None, help='Trotter steps M, or M for 2M path slices')
    evolve_parser.add_argument('--mode', type=str, default=None, choices=['exact', 'trotter', 'path'])
    evolve_parser.add_argument('--representation', type=str, default='operator',
                               choices=['operator'] + [kind.value for kind in SymbolKind])
    evolve_parser.add_argument('--budget', type=float, default=None, help='Term cap for the path sum')
    _add_space_arguments(evolve_parser)
    _add_output_arguments(evolve_parser, default_format='json')

    product_parser = commands.add_parser('product', help='Symbol of a product of operators given by symbols')
    product_parser.add_argument('--in', dest='inputs', nargs='+', required=True, help='Symbol files, leftmost first')
    product_parser.add_argument('--representation', type=str, default='center',
                                choices=[kind.value for kind in SymbolKind])
    product_parser.add_argument('--budget', type=float, default=None, help='Term cap for the product sum')
    _add_space_arguments(product_parser)
    _add_output_arguments(product_parser)

    symbol_parser = commands.add_parser('symbol', help='Chord or center symbol of an operator')
    symbol_parser.add_argument('--in', dest='inputs', nargs=1, required=True, help='Operator JSON')
    symbol_parser.add_argument('--representation', type=str, default='center',
                               choices=[kind.value for kind in SymbolKind])
    _add_space_arguments(symbol_parser)
    _add_output_arguments(symbol_parser)
    return parser


def _space_config(args) -> Optional[SpaceConfig]:
    if args.n is None:
        return None
    return SpaceConfig(n=args.n, chi_p=args.chi_p or 0.0, chi_q=args.chi_q or 0.0)


def _job_config(args) -> JobConfig:
    output = getattr(args, 'out', None)
    fmt = getattr(args, 'format', 'csv')
    if output is None and args.command != 'verify':
        output = config.get_output_path(f"{args.command}.{fmt}")
    return JobConfig(
        command=args.command,
        space=_space_config(args),
        inputs=getattr(args, 'inputs', None) or [],
        output=output,
        format=fmt,
    )


def _resolve_space(job: JobConfig, from_file: Optional[TorusSpace] = None) -> TorusSpace:
    """Space from the command line, the input file, or both when they agree"""
    if job.space is None:
        if from_file is None:
            raise TorusFormatError("--n is required when the input file does not record N")
        return from_file
    space = TorusSpace(job.space.n, job.space.chi_p, job.space.chi_q)
    if from_file is not None and not space.same_as(from_file):
        raise DomainError(f"command line space {space} does not match the input file ({from_file})")
    return space


def _budget(value: Optional[float]) -> Optional[int]:
    return None if value is None else int(value)


def _write_symbol(job: JobConfig, sym) -> None:
    kind = sym.kind.value
    if job.format == 'json':
        file_handler.write_symbol_json(kind, sym.space, sym.values, job.output)
    elif job.format == 'csv':
        file_handler.write_symbol_csv(kind, sym.space, sym.values, job.output)
    else:
        if np.max(np.abs(sym.values.imag)) > config.TOLERANCE:
            logger.warning("Symbol has an imaginary part; the graymap shows the real part only")
        file_handler.write_pgm(sym.values.real, job.output, {'kind': kind, 'n': sym.space.n_states})
    logger.info(f"Wrote {kind} symbol to {job.output}")


def cmd_wigner(job: JobConfig) -> int:
    recorded_space, amplitudes = file_handler.read_state(job.inputs[0])
    space = _resolve_space(job, recorded_space)
    state = TorusState(space, amplitudes)
    sym = wigner(state)
    grid = sym.extended_grid()
    normalization = float(sym.trace().real)

    if job.format == 'pgm':
        if np.max(np.abs(grid.imag)) > config.TOLERANCE:
            raise ToleranceError("Wigner function is not real")
        file_handler.write_pgm(grid.real, job.output, {
            'kind': 'wigner',
            'n': space.n_states,
            'chi': [float(space.chi_p), float(space.chi_q)],
            'normalization': normalization,
        })
    elif job.format == 'json':
        file_handler.write_symbol_json(sym.kind.value, space, grid, job.output)
    else:
        file_handler.write_symbol_csv(sym.kind.value, space, grid, job.output)
    logger.info(f"Wigner grid {grid.shape[0]}x{grid.shape[1]} written to {job.output}, normalization {normalization:.12g}")
    return 0


def _load_cat_map(path: Optional[str]) -> Optional[CatMapSpec]:
    if path is None:
        return None
    parsed = file_handler.read_cat_map(path)
    if parsed.b is not None:
        return CatMapSpec.from_cayley(parsed.b)
    return CatMapSpec.from_matrix(parsed.m)


def cmd_verify(job: JobConfig, suite: str, seed: Optional[int], budget: Optional[int],
               cat_map_path: Optional[str] = None) -> int:
    if suite not in SUITES:
        logger.error(f"Unknown suite '{suite}', expected one of {', '.join(SUITES)}")
        return USAGE_ERROR
    space = _resolve_space(job)
    if suite == 'feline' and not space.is_odd:
        logger.error(f"verify feline requires odd N, got N={space.n_states}")
        return USAGE_ERROR

    table = run_suite(suite, space, seed=seed, budget=budget, cat_map=_load_cat_map(cat_map_path))
    with pd.option_context('display.max_colwidth', None, 'display.width', 200):
        print(table.to_string(index=False, float_format=lambda value: f"{value:.3e}"))
    failed = table[~table['passed']]
    if len(failed):
        logger.error(f"{len(failed)} of {len(table)} identities failed in the {suite} suite on {space}")
        return TOLERANCE_FAILURE
    logger.info(f"All {len(table)} identities of the {suite} suite passed on {space}")
    return 0


def _load_evolution(path: str, args):
    """Hamiltonian terms plus t, steps and mode, from a job file or the flags"""
    data = file_handler.read_json(path)
    if 'hamiltonian' in data:
        job = file_handler.read_evolution_job(path)
        hamiltonian = file_handler.read_hamiltonian(job.hamiltonian)
        t = job.t if args.t is None else args.t
        steps = job.m_steps if args.steps is None else args.steps
        mode = job.mode if args.mode is None else args.mode
    else:
        hamiltonian = file_handler.read_hamiltonian(path)
        if args.t is None:
            raise TorusFormatError("--t is required with a bare Hamiltonian file")
        t = args.t
        steps = 1 if args.steps is None else args.steps
        mode = args.mode or 'exact'
    try:
        EvolutionJob(hamiltonian=path, t=t, m_steps=steps, mode=mode)
    except ValidationError as e:
        raise TorusFormatError(f"invalid evolution settings: {e.errors()[0]['msg']}") from e
    terms = [(term.r, term.s, complex(term.re, term.im)) for term in hamiltonian.terms]
    return PeriodicPlaneSymbol.from_terms(terms), t, steps, mode


def cmd_evolve(job: JobConfig, args) -> int:
    plane, t, steps, mode = _load_evolution(job.inputs[0], args)
    space = _resolve_space(job)
    hamiltonian = quantize_hamiltonian(space, plane)
    logger.info(f"Evolving on {space}: t={t}, mode={mode}, steps={steps}")

    if mode == 'path':
        h_symbol = center_symbol(hamiltonian)
        result = path_integral_center(h_symbol, t, steps, budget=_budget(args.budget))
        propagator = operator_of(result)
        if not propagator.is_unitary(1e-6):
            logger.warning(f"Path sum with M={steps} is not unitary to 1e-6")
    elif mode == 'trotter':
        propagator = propagator_trotter(hamiltonian, t, steps)
    else:
        propagator = propagator_exact(hamiltonian, t)

    if args.representation == 'operator':
        if job.format != 'json':
            raise TorusFormatError("operators are written as JSON, use --format json")
        if mode != 'path' and not propagator.is_unitary():
            raise ToleranceError(f"propagator on {space} is not unitary at tolerance {config.TOLERANCE}")
        file_handler.write_operator(space, propagator.matrix, job.output)
        logger.info(f"Wrote propagator to {job.output}")
    else:
        _write_symbol(job, symbol_of(propagator, SymbolKind(args.representation)))
    return 0


def cmd_product(job: JobConfig, representation: str, budget: Optional[int]) -> int:
    kind = SymbolKind(representation)
    symbols = []
    for path in job.inputs:
        file_kind, file_space, values = file_handler.read_symbol(path)
        if file_kind != kind.value:
            raise DomainError(f"{path} holds a {file_kind} symbol, expected {kind.value}")
        symbols.append(make_symbol(kind, _resolve_space(job, file_space), values))

    if kind == SymbolKind.CHORD:
        result = chord_product_multi(symbols, budget=budget)
    elif kind == SymbolKind.CENTER_QPS:
        result = qps_center_product_multi(symbols, budget=budget)
    else:
        result = center_product_multi(symbols, budget=budget)
    _write_symbol(job, result)
    return 0


def cmd_symbol(job: JobConfig, representation: str) -> int:
    file_space, matrix = file_handler.read_operator(job.inputs[0])
    space = _resolve_space(job, file_space)
    _write_symbol(job, symbol_of(TorusOperator(space, matrix), SymbolKind(representation)))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        job = _job_config(args)
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e.errors()[0]['msg']}")
        return USAGE_ERROR

    try:
        if job.command == 'wigner':
            return cmd_wigner(job)
        if job.command == 'verify':
            return cmd_verify(job, args.suite, args.seed, _budget(args.budget), args.cat_map)
        if job.command == 'evolve':
            return cmd_evolve(job, args)
        if job.command == 'product':
            return cmd_product(job, args.representation, _budget(args.budget))
        return cmd_symbol(job, args.representation)
    except TorusError as e:
        logger.error(f"{job.command} failed: {e}")
        return e.exit_code


if __name__ == '__main__':
    sys.exit(main())
