import os
import io
import json
import logging
from typing import Any, Dict, Optional, Tuple
import sys
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pandas as pd
from pydantic import ValidationError

from exceptions import TorusFormatError
from qps_lattice import TorusSpace
from schemas import CatMapFile, EvolutionJob, HamiltonianFile, OperatorFile, StateFile, SymbolFile

logger = logging.getLogger(__name__)

SYMBOL_HEADER = ['kind', 'n', 'chi_p', 'chi_q']
VALUE_COLUMNS = ['i', 'j', 're', 'im']
CSV_FLOAT_FORMAT = '%.17g'


class FileHandler:
    """Reads and writes operators, states, symbols and images on the local filesystem"""

    def read_json(self, path: str) -> Dict[str, Any]:
        """Read JSON data from a local file"""
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except FileNotFoundError as e:
            logger.error(f"Error reading JSON from {path}: {e}")
            raise TorusFormatError(f"file not found: {path}") from e
        except json.JSONDecodeError as e:
            logger.error(f"Error reading JSON from {path}: {e}")
            raise TorusFormatError(f"malformed JSON in {path}: {e}") from e

    def write_json(self, data: Dict[str, Any], path: str) -> bool:
        """Write JSON data to a local file"""
        self._ensure_parent(path)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, ensure_ascii=False)
        logger.debug(f"Wrote {path}")
        return True

    def file_exists(self, path: str) -> bool:
        return os.path.exists(path)

    def _ensure_parent(self, path: str):
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)

    def _validate(self, model, data: Dict[str, Any], path: str):
        try:
            return model.model_validate(data)
        except ValidationError as e:
            logger.error(f"Invalid {model.__name__} in {path}: {e}")
            raise TorusFormatError(f"invalid {model.__name__} in {path}: {e.errors()[0]['msg']}") from e

    # Operators and states

    def read_operator(self, path: str) -> Tuple[TorusSpace, np.ndarray]:
        """
        Read {"n", "chi", "re", "im"} into a space and a complex matrix.

        JSON floats are written with their shortest round-trip repr, so
        write_operator followed by read_operator is bit-exact.
        """
        parsed = self._validate(OperatorFile, self.read_json(path), path)
        matrix = np.array(parsed.re, dtype=float) + 1j * np.array(parsed.im, dtype=float)
        return TorusSpace(parsed.n, parsed.chi[0], parsed.chi[1]), matrix

    def write_operator(self, space: TorusSpace, matrix: np.ndarray, path: str) -> bool:
        matrix = np.asarray(matrix, dtype=complex)
        data = {
            'n': space.n_states,
            'chi': [float(space.chi_p), float(space.chi_q)],
            're': matrix.real.tolist(),
            'im': matrix.imag.tolist(),
        }
        return self.write_json(data, path)

    def read_state(self, path: str) -> Tuple[Optional[TorusSpace], np.ndarray]:
        """State amplitudes plus the space recorded in the file, if any"""
        parsed = self._validate(StateFile, self.read_json(path), path)
        amplitudes = np.array(parsed.re, dtype=float).astype(complex)
        if parsed.im is not None:
            amplitudes = amplitudes + 1j * np.array(parsed.im, dtype=float)
        space = None
        if parsed.n is not None:
            chi = parsed.chi or [0.0, 0.0]
            space = TorusSpace(parsed.n, chi[0], chi[1])
        return space, amplitudes

    def read_hamiltonian(self, path: str) -> HamiltonianFile:
        return self._validate(HamiltonianFile, self.read_json(path), path)

    def read_cat_map(self, path: str) -> CatMapFile:
        return self._validate(CatMapFile, self.read_json(path), path)

    def read_evolution_job(self, path: str) -> EvolutionJob:
        return self._validate(EvolutionJob, self.read_json(path), path)

    # Symbols

    def write_symbol_csv(self, kind: str, space: TorusSpace, values: np.ndarray, path: str) -> bool:
        """
        Symbol CSV: a "kind,n,chi_p,chi_q" header line and its values, then
        one "i,j,re,im" row per grid entry with 17 significant digits.
        """
        values = np.asarray(values, dtype=complex)
        i, j = np.meshgrid(np.arange(values.shape[0]), np.arange(values.shape[1]), indexing='ij')
        header = pd.DataFrame(
            [[kind, space.n_states, float(space.chi_p), float(space.chi_q)]], columns=SYMBOL_HEADER
        )
        rows = pd.DataFrame({
            'i': i.reshape(-1),
            'j': j.reshape(-1),
            're': values.real.reshape(-1),
            'im': values.imag.reshape(-1),
        })
        self._ensure_parent(path)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            header.to_csv(f, index=False, float_format=CSV_FLOAT_FORMAT)
            rows.to_csv(f, index=False, float_format=CSV_FLOAT_FORMAT)
        logger.debug(f"Wrote {len(rows)} symbol rows to {path}")
        return True

    def read_symbol_csv(self, path: str) -> Tuple[str, TorusSpace, np.ndarray]:
        """
        Read a symbol CSV back as (kind, space, N x N block).

        Grids larger than the fundamental block, such as the 2N x 2N Wigner
        grid, are cut down to the labels i, j in [0, N).
        """
        try:
            with open(path, 'r', encoding='utf-8') as f:
                text = f.read()
            header = pd.read_csv(io.StringIO(text), nrows=1, float_precision='round_trip')
            rows = pd.read_csv(io.StringIO(text), skiprows=2, float_precision='round_trip')
        except FileNotFoundError as e:
            raise TorusFormatError(f"file not found: {path}") from e
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            logger.error(f"Error reading symbol CSV {path}: {e}")
            raise TorusFormatError(f"malformed symbol CSV {path}: {e}") from e

        if list(header.columns) != SYMBOL_HEADER or list(rows.columns) != VALUE_COLUMNS:
            raise TorusFormatError(f"{path} is not a symbol CSV (expected headers {SYMBOL_HEADER} and {VALUE_COLUMNS})")
        kind = str(header['kind'].iloc[0])
        n = int(header['n'].iloc[0])
        space = TorusSpace(n, float(header['chi_p'].iloc[0]), float(header['chi_q'].iloc[0]))

        block = rows[(rows['i'] < n) & (rows['j'] < n)]
        if len(block) != n * n:
            raise TorusFormatError(f"{path} holds {len(block)} values on the fundamental block, expected {n * n}")
        values = np.zeros((n, n), dtype=complex)
        values[block['i'].to_numpy(), block['j'].to_numpy()] = (
            block['re'].to_numpy(dtype=float) + 1j * block['im'].to_numpy(dtype=float)
        )
        return kind, space, values

    def write_symbol_json(self, kind: str, space: TorusSpace, values: np.ndarray, path: str) -> bool:
        values = np.asarray(values, dtype=complex)
        data = {
            'kind': kind,
            'n': space.n_states,
            'chi': [float(space.chi_p), float(space.chi_q)],
            're': values.real.tolist(),
            'im': values.imag.tolist(),
        }
        return self.write_json(data, path)

    def read_symbol_json(self, path: str) -> Tuple[str, TorusSpace, np.ndarray]:
        """Read a symbol JSON back as (kind, space, N x N block), cutting larger grids like the CSV reader"""
        parsed = self._validate(SymbolFile, self.read_json(path), path)
        n = parsed.n
        values = np.array(parsed.re, dtype=float)[:n, :n] + 1j * np.array(parsed.im, dtype=float)[:n, :n]
        return parsed.kind, TorusSpace(n, parsed.chi[0], parsed.chi[1]), values

    def read_symbol(self, path: str) -> Tuple[str, TorusSpace, np.ndarray]:
        """Symbol file in either format, chosen by extension"""
        if path.lower().endswith('.json'):
            return self.read_symbol_json(path)
        return self.read_symbol_csv(path)

    # Images

    def write_pgm(self, grid: np.ndarray, path: str, extra: Optional[Dict[str, Any]] = None) -> bool:
        """
        Binary P5 graymap of a real grid, mapped linearly from [min, max] to [0, 255].

        The range and any extra fields go to a sidecar JSON next to the image.
        """
        grid = np.asarray(grid, dtype=float)
        rows, cols = grid.shape
        low, high = float(grid.min()), float(grid.max())
        if high > low:
            gray = np.rint(255 * (grid - low) / (high - low)).astype(np.uint8)
        else:
            gray = np.zeros(grid.shape, dtype=np.uint8)
        self._ensure_parent(path)
        with open(path, 'wb') as f:
            f.write(f"P5\n{cols} {rows}\n255\n".encode('ascii'))
            f.write(gray.tobytes())

        sidecar = {'min': low, 'max': high, 'rows': rows, 'cols': cols}
        sidecar.update(extra or {})
        self.write_json(sidecar, self.sidecar_path(path))
        return True

    def sidecar_path(self, path: str) -> str:
        return os.path.splitext(path)[0] + '.json'

    def read_pgm(self, path: str) -> np.ndarray:
        """Parse a binary P5 graymap into a uint8 array"""
        with open(path, 'rb') as f:
            content = f.read()
        tokens = []
        position = 0
        while len(tokens) < 4:
            while position < len(content) and content[position:position + 1].isspace():
                position += 1
            if content[position:position + 1] == b'#':
                position = content.index(b'\n', position) + 1
                continue
            start = position
            while position < len(content) and not content[position:position + 1].isspace():
                position += 1
            tokens.append(content[start:position])
        if tokens[0] != b'P5':
            raise TorusFormatError(f"{path} is not a binary P5 graymap")
        cols, rows, max_value = (int(token) for token in tokens[1:])
        if max_value > 255:
            raise TorusFormatError(f"{path} uses 16-bit gray levels")
        # exactly one whitespace byte separates the header from the raster
        data = np.frombuffer(content[position + 1:], dtype=np.uint8)
        if data.size != rows * cols:
            raise TorusFormatError(f"{path} holds {data.size} pixels, expected {rows * cols}")
        return data.reshape(rows, cols)


# Global file handler instance
file_handler = FileHandler()
