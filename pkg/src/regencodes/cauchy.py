"""Cauchy matrices over prime fields.

Entry ``(i, j)`` is ``1 / (x_i - y_j)`` for an injective sequence
``x_1..x_s, y_1..y_t``; every square submatrix of such a matrix is
nonsingular, which is what the MISER parity design relies on.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import FieldTooSmallError, InjectivityError
from .gf import PrimeField, as_field
from .linalg import MatrixGF


@dataclass(frozen=True)
class CauchySpec:
    x: tuple[int, ...]
    y: tuple[int, ...]
    field: PrimeField

    def __post_init__(self) -> None:
        q = self.field.q
        object.__setattr__(self, "x", tuple(int(v) % q for v in self.x))
        object.__setattr__(self, "y", tuple(int(v) % q for v in self.y))
        s, t = len(self.x), len(self.y)
        if s + t > q:
            raise FieldTooSmallError(f"a {s}x{t} Cauchy matrix needs q >= {s + t}, got q = {q}")
        values = self.x + self.y
        repeated = sorted(v for v, c in Counter(values).items() if c > 1)
        if repeated:
            raise InjectivityError(f"values {repeated} repeated in x/y sequence {values}")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.x), len(self.y)

    def to_dict(self) -> dict:
        return {"x": list(self.x), "y": list(self.y)}


def make_spec(x: Sequence[int], y: Sequence[int], field: PrimeField | int) -> CauchySpec:
    return CauchySpec(tuple(x), tuple(y), as_field(field))


def default_spec(s: int, t: int, field: PrimeField | int) -> CauchySpec:
    """``x = (t, t+1, ..., t+s-1)`` and ``y = (0, 1, ..., t-1)``."""
    field = as_field(field)
    if s + t > field.q:
        raise FieldTooSmallError(f"a {s}x{t} Cauchy matrix needs q >= {s + t}, got q = {field.q}")
    return CauchySpec(tuple(range(t, t + s)), tuple(range(t)), field)


def build(spec: CauchySpec) -> MatrixGF:
    q = spec.field.q
    diff = (np.asarray(spec.x, dtype=np.int64)[:, None] - np.asarray(spec.y, dtype=np.int64)[None, :]) % q
    inv = spec.field.inverse_table[diff] if q <= 1 << 16 else np.vectorize(spec.field.inv_raw)(diff)
    return MatrixGF(inv.reshape(len(spec.x), len(spec.y)), spec.field)
