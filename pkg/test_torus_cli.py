#!/usr/bin/env python3
"""
Tests for the command-line front end: exit codes, file formats and round trips
"""

import json
import logging

import numpy as np
import pandas as pd
import pytest

from exceptions import TorusFormatError
from qps_lattice import TorusSpace
from torus_operators import TorusOperator
from weyl_symbols import center_symbol
from torus_cli import main
from utils.file_handler import file_handler


def write_json(path, data):
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture
def harper_file(tmp_path):
    terms = [
        {'r': 1, 's': 0, 're': 0.5, 'im': 0.0},
        {'r': -1, 's': 0, 're': 0.5, 'im': 0.0},
        {'r': 0, 's': 1, 're': 0.5, 'im': 0.0},
        {'r': 0, 's': -1, 're': 0.5, 'im': 0.0},
    ]
    return write_json(tmp_path / 'harper.json', {'terms': terms})


def test_verify_cocycle_passes(capsys):
    assert main(['verify', '--suite', 'cocycle', '--n', '3']) == 0
    assert 'T(xi1) T(xi2)' in capsys.readouterr().out


def test_verify_traces_lists_f_n_cases(capsys):
    assert main(['verify', '--suite', 'traces', '--n', '4']) == 0
    out = capsys.readouterr().out
    for value in (2, 1, 0, -1):
        assert f'f_N(x) = {value}' in out


def test_verify_feline_rejects_even_n(caplog):
    with caplog.at_level(logging.ERROR):
        assert main(['verify', '--suite', 'feline', '--n', '4']) == 1
    assert 'requires odd N' in caplog.text


def test_verify_feline_with_chi_is_domain_error():
    assert main(['verify', '--suite', 'feline', '--n', '3', '--chi-p', '0.3']) == 2


def test_verify_usage_errors():
    assert main(['verify', '--suite', 'nonsense', '--n', '3']) == 1
    assert main(['verify', '--suite', 'cocycle']) == 1
    assert main(['verify', '--suite', 'cocycle', '--n', '3', '--chi-p', '1.5']) == 1
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 1
    with pytest.raises(SystemExit) as excinfo:
        main(['verify', '--n', 'three', '--suite', 'cocycle'])
    assert excinfo.value.code == 1


def test_wigner_csv_grid(tmp_path):
    state = write_json(tmp_path / 'q0.json', {'re': [1, 0, 0], 'im': [0, 0, 0]})
    out = tmp_path / 'w.csv'
    assert main(['wigner', '--in', state, '--n', '3', '--out', str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == 'kind,n,chi_p,chi_q'
    rows = pd.read_csv(out, skiprows=2)
    assert len(rows) == 36
    kind, space, values = file_handler.read_symbol_csv(str(out))
    assert kind == 'center' and space.n_states == 3 and values.shape == (3, 3)


def test_wigner_pgm_and_sidecar(tmp_path):
    state = write_json(tmp_path / 'psi.json', {'n': 4, 'chi': [0.3, 0.7], 're': [1, 0.5, 0, -1], 'im': [0, 1, 0, 0]})
    out = tmp_path / 'w.pgm'
    assert main(['wigner', '--in', state, '--out', str(out), '--format', 'pgm']) == 0
    assert out.read_bytes().startswith(b'P5\n8 8\n255\n')
    image = file_handler.read_pgm(str(out))
    assert image.shape == (8, 8)
    assert image.min() == 0 and image.max() == 255
    sidecar = json.loads((tmp_path / 'w.json').read_text())
    assert sidecar['normalization'] == pytest.approx(1.0, abs=1e-10)
    assert sidecar['min'] < sidecar['max']


def test_wigner_errors(tmp_path):
    broken = tmp_path / 'broken.json'
    broken.write_text('{"re": [1, 0')
    assert main(['wigner', '--in', str(broken), '--n', '3']) == 1
    state = write_json(tmp_path / 'short.json', {'re': [1, 0]})
    assert main(['wigner', '--in', state, '--n', '3', '--out', str(tmp_path / 'w.csv')]) == 2
    assert main(['wigner', '--in', str(tmp_path / 'missing.json'), '--n', '3']) == 1


def test_operator_json_round_trip_is_bit_exact(tmp_path, make_operator):
    space = TorusSpace(5, 0.3, 0.7)
    op = make_operator(space)
    path = str(tmp_path / 'op.json')
    file_handler.write_operator(space, op.matrix, path)
    read_space, matrix = file_handler.read_operator(path)
    assert read_space.same_as(space)
    assert np.array_equal(matrix, op.matrix)


def test_symbol_csv_round_trip(tmp_path, make_operator):
    space = TorusSpace(4, 0.3, 0.7)
    sym = center_symbol(make_operator(space))
    path = str(tmp_path / 'a.csv')
    file_handler.write_symbol_csv('center', space, sym.values, path)
    kind, read_space, values = file_handler.read_symbol_csv(path)
    assert kind == 'center' and read_space.same_as(space)
    assert np.max(np.abs(values - sym.values)) < 1e-12


def test_symbol_of_identity(tmp_path):
    op = write_json(tmp_path / 'id.json', {'n': 3, 'chi': [0, 0], 're': np.eye(3).tolist(), 'im': np.zeros((3, 3)).tolist()})
    out = tmp_path / 'id_chord.json'
    assert main(['symbol', '--in', op, '--representation', 'chord', '--out', str(out), '--format', 'json']) == 0
    kind, _, values = file_handler.read_symbol_json(str(out))
    expected = np.zeros((3, 3))
    expected[0, 0] = 3
    assert kind == 'chord'
    assert np.allclose(values, expected, atol=1e-12)


def test_symbol_rejects_mismatched_space(tmp_path):
    op = write_json(tmp_path / 'id.json', {'n': 3, 'chi': [0, 0], 're': np.eye(3).tolist(), 'im': np.zeros((3, 3)).tolist()})
    assert main(['symbol', '--in', op, '--n', '4', '--out', str(tmp_path / 'a.csv')]) == 2


def test_product_of_center_csvs(tmp_path, make_operator):
    space = TorusSpace(3, 0.3, 0.7)
    a, b = make_operator(space), make_operator(space)
    paths = []
    for name, op in (('a', a), ('b', b)):
        path = str(tmp_path / f'{name}.csv')
        file_handler.write_symbol_csv('center', space, center_symbol(op).values, path)
        paths.append(path)
    out = tmp_path / 'ab.csv'
    assert main(['product', '--in', *paths, '--representation', 'center', '--out', str(out)]) == 0
    _, _, values = file_handler.read_symbol_csv(str(out))
    assert np.max(np.abs(values - center_symbol(a @ b).values)) < 1e-10

    assert main(['product', '--in', *paths, '--representation', 'chord', '--out', str(out)]) == 2
    assert main(['product', '--in', *paths, '--budget', '10', '--out', str(out)]) == 2


def test_product_of_center_csvs_with_chi_flags(tmp_path, make_operator):
    space = TorusSpace(3, 0.3, 0.7)
    a, b = make_operator(space), make_operator(space)
    paths = []
    for name, op in (('a', a), ('b', b)):
        path = str(tmp_path / f'{name}.csv')
        file_handler.write_symbol_csv('center', space, center_symbol(op).values, path)
        paths.append(path)
    out = tmp_path / 'ab.csv'
    assert main(['product', '--in', *paths, '--n', '3', '--chi-p', '0.3', '--chi-q', '0.7',
                 '--out', str(out)]) == 0
    _, read_space, values = file_handler.read_symbol_csv(str(out))
    assert read_space.same_as(space)
    assert np.max(np.abs(values - center_symbol(a @ b).values)) < 1e-10
    assert main(['product', '--in', *paths, '--n', '3', '--chi-p', '0.4', '--chi-q', '0.7',
                 '--out', str(out)]) == 2


def test_symbol_with_chi_flags_matching_the_operator(tmp_path, make_operator):
    space = TorusSpace(4, 0.3, 0.7)
    op = make_operator(space)
    path = str(tmp_path / 'op.json')
    file_handler.write_operator(space, op.matrix, path)
    out = tmp_path / 'a.csv'
    assert main(['symbol', '--in', path, '--n', '4', '--chi-p', '0.3', '--chi-q', '0.7', '--out', str(out)]) == 0
    _, _, values = file_handler.read_symbol_csv(str(out))
    assert np.max(np.abs(values - center_symbol(op).values)) < 1e-12


@pytest.mark.parametrize('n, chi', [(3, [0.0, 0.0]), (4, [0.3, 0.7])])
def test_wigner_json_reads_back_as_symbol(tmp_path, n, chi):
    amplitudes = np.arange(1, n + 1, dtype=float)
    state = write_json(tmp_path / 'psi.json', {'n': n, 'chi': chi, 're': amplitudes.tolist(), 'im': [0.0] * n})
    as_json, as_csv = tmp_path / 'w.json', tmp_path / 'w.csv'
    assert main(['wigner', '--in', state, '--out', str(as_json), '--format', 'json']) == 0
    assert main(['wigner', '--in', state, '--out', str(as_csv), '--format', 'csv']) == 0
    assert len(json.loads(as_json.read_text())['re']) == 2 * n
    kind, space, values = file_handler.read_symbol_json(str(as_json))
    _, _, from_csv = file_handler.read_symbol_csv(str(as_csv))
    assert kind == 'center' and space.same_as(TorusSpace(n, *chi))
    assert values.shape == (n, n)
    assert np.max(np.abs(values - from_csv)) < 1e-12

    out = tmp_path / 'ww.csv'
    assert main(['product', '--in', str(as_json), str(as_json), '--out', str(out)]) == 0
    _, _, squared = file_handler.read_symbol_csv(str(out))
    assert squared.shape == (n, n)


def test_evolve_exact_writes_unitary(tmp_path, harper_file):
    out = tmp_path / 'u.json'
    assert main(['evolve', '--in', harper_file, '--n', '3', '--t', '0.1', '--mode', 'exact',
                 '--out', str(out), '--format', 'json']) == 0
    space, matrix = file_handler.read_operator(str(out))
    assert TorusOperator(space, matrix).is_unitary()


def test_evolve_from_job_file(tmp_path, harper_file):
    job = write_json(tmp_path / 'job.json', {'hamiltonian': harper_file, 't': 0.05, 'm_steps': 1, 'mode': 'path'})
    out = tmp_path / 'u.csv'
    assert main(['evolve', '--in', job, '--n', '3', '--representation', 'center',
                 '--out', str(out), '--format', 'csv']) == 0
    kind, space, values = file_handler.read_symbol_csv(str(out))
    assert kind == 'center' and values.shape == (3, 3)


def test_evolve_errors(tmp_path, harper_file):
    assert main(['evolve', '--in', harper_file, '--n', '3']) == 1
    assert main(['evolve', '--in', harper_file, '--n', '3', '--t', '0.1', '--format', 'csv',
                 '--out', str(tmp_path / 'u.csv')]) == 1
    job = write_json(tmp_path / 'job.json', {'hamiltonian': harper_file, 't': 0.05, 'm_steps': 0})
    assert main(['evolve', '--in', job, '--n', '3', '--out', str(tmp_path / 'u.json')]) == 1


def test_cat_map_file_validation(tmp_path):
    good = write_json(tmp_path / 'cat.json', {'b': [[1, 0], [0, 1]]})
    assert file_handler.read_cat_map(good).b == [[1, 0], [0, 1]]
    both = write_json(tmp_path / 'both.json', {'b': [[1, 0], [0, 1]], 'm': [[0, 1], [-1, 0]]})
    with pytest.raises(TorusFormatError):
        file_handler.read_cat_map(both)
    fractional = write_json(tmp_path / 'frac.json', {'m': [[0.5, 1], [-1, 0]]})
    with pytest.raises(TorusFormatError):
        file_handler.read_cat_map(fractional)


def test_verify_feline_with_cat_map_file(tmp_path):
    quarter_turn = write_json(tmp_path / 'cat.json', {'m': [[0, 1], [-1, 0]]})
    assert main(['verify', '--suite', 'feline', '--n', '5', '--cat-map', quarter_turn]) == 0
    # (1 + M) is not unimodular, so the Cayley matrix is not integer
    fractional = write_json(tmp_path / 'arnold.json', {'m': [[2, 1], [1, 1]]})
    assert main(['verify', '--suite', 'feline', '--n', '5', '--cat-map', fractional]) == 2
    assert main(['verify', '--suite', 'feline', '--n', '5', '--cat-map', str(tmp_path / 'none.json')]) == 1
