"""Explicit minimum-storage regenerating codes over prime fields.

Modules: :mod:`gf` (field arithmetic), :mod:`linalg` (matrices),
:mod:`cauchy`, :mod:`miser` (MISER code), :mod:`dk1` (d = k+1 code),
:mod:`verifier` (property checks) and :mod:`storage` / :mod:`cli`.
"""

from .errors import RegenError
from .gf import FieldElement, PrimeField
from .linalg import MatrixGF
from .params import CodeParams

__all__ = ["CodeParams", "FieldElement", "MatrixGF", "PrimeField", "RegenError"]
