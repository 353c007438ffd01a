"""
Pydantic models for the files and jobs the CLI reads and writes.
"""

import os
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class SpaceConfig(BaseModel):
    n: int = Field(ge=1)
    chi_p: float = 0.0
    chi_q: float = 0.0

    @field_validator('chi_p', 'chi_q')
    @classmethod
    def angle_in_unit_interval(cls, value: float) -> float:
        if not 0 <= value < 1:
            raise ValueError(f"Floquet angle must lie in [0, 1), got {value}")
        return value


class OperatorFile(BaseModel):
    """{"n": N, "chi": [chi_p, chi_q], "re": [[...]], "im": [[...]]}, row-major"""
    n: int = Field(ge=1)
    chi: List[float] = Field(default_factory=lambda: [0.0, 0.0], min_length=2, max_length=2)
    re: List[List[float]]
    im: List[List[float]]

    @model_validator(mode='after')
    def square_blocks(self) -> 'OperatorFile':
        for name in ('re', 'im'):
            block = getattr(self, name)
            if len(block) != self.n or any(len(row) != self.n for row in block):
                raise ValueError(f"'{name}' must be a {self.n} x {self.n} array")
        return self


class SymbolFile(BaseModel):
    """
    {"kind": ..., "n": N, "chi": [..], "re": [[...]], "im": [[...]]}.

    The grid may be larger than N x N (the 2N x 2N Wigner grid); readers
    keep the fundamental block i, j < N.
    """
    kind: str
    n: int = Field(ge=1)
    chi: List[float] = Field(default_factory=lambda: [0.0, 0.0], min_length=2, max_length=2)
    re: List[List[float]]
    im: List[List[float]]

    @model_validator(mode='after')
    def square_grids(self) -> 'SymbolFile':
        size = len(self.re)
        if size < self.n:
            raise ValueError(f"grid has {size} rows, fewer than n={self.n}")
        for name in ('re', 'im'):
            block = getattr(self, name)
            if len(block) != size or any(len(row) != size for row in block):
                raise ValueError(f"'{name}' must be a {size} x {size} array")
        return self


class StateFile(BaseModel):
    """{"re": [...], "im": [...]} with optional "n" and "chi" mirroring the operator schema"""
    n: Optional[int] = Field(default=None, ge=1)
    chi: Optional[List[float]] = Field(default=None, min_length=2, max_length=2)
    re: List[float]
    im: Optional[List[float]] = None

    @model_validator(mode='after')
    def matching_lengths(self) -> 'StateFile':
        if self.im is not None and len(self.im) != len(self.re):
            raise ValueError("'re' and 'im' must have the same length")
        return self


class HamiltonianTerm(BaseModel):
    r: int
    s: int
    re: float = 0.0
    im: float = 0.0


class HamiltonianFile(BaseModel):
    """{"terms": [{"r": int, "s": int, "re": float, "im": float}, ...]}"""
    terms: List[HamiltonianTerm]


class CatMapFile(BaseModel):
    """{"b": [[..], [..]]} or {"m": [[..], [..]]}"""
    b: Optional[List[List[int]]] = None
    m: Optional[List[List[int]]] = None

    @model_validator(mode='after')
    def exactly_one_matrix(self) -> 'CatMapFile':
        if (self.b is None) == (self.m is None):
            raise ValueError("give exactly one of 'b' (Cayley matrix) or 'm' (map matrix)")
        matrix = self.b if self.b is not None else self.m
        if len(matrix) != 2 or any(len(row) != 2 for row in matrix):
            raise ValueError("cat map matrices are 2 x 2")
        return self


class EvolutionJob(BaseModel):
    """{"hamiltonian": <file>, "t": float, "m_steps": int, "mode": "exact"|"trotter"|"path"}"""
    hamiltonian: str
    t: float
    m_steps: int = Field(default=1, ge=1)
    mode: Literal['exact', 'trotter', 'path'] = 'exact'


class JobConfig(BaseModel):
    """One CLI invocation after argument parsing"""
    command: Literal['wigner', 'verify', 'evolve', 'product', 'symbol']
    space: Optional[SpaceConfig] = None
    inputs: List[str] = Field(default_factory=list)
    output: Optional[str] = None
    format: Literal['csv', 'json', 'pgm'] = 'csv'

    @field_validator('inputs')
    @classmethod
    def inputs_exist(cls, paths: List[str]) -> List[str]:
        missing = [path for path in paths if not os.path.exists(path)]
        if missing:
            raise ValueError(f"input files not found: {', '.join(missing)}")
        return paths
