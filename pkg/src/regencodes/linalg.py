"""Dense matrices over a prime field.

:class:`MatrixGF` wraps a 2-D ``int64`` array of residues together with its
field. All operations are pure and return new matrices. The raw kernels
(``mod_matmul``, ``rref``) are exposed for the codecs, which work on plain
arrays once their inputs have been validated.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .errors import FieldMismatchError, ShapeError, SingularMatrixError
from .gf import FieldElement, PrimeField, as_field


def mod_matmul(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """``a @ b mod q`` without int64 overflow.

    The inner dimension is split into chunks small enough that a chunk's
    partial sums stay below 2**63.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    if inner != b.shape[-2 if b.ndim > 1 else 0]:
        raise ShapeError(f"cannot multiply shapes {a.shape} and {b.shape}")
    step = max(1, (2**63 - 1) // max(1, (q - 1) ** 2))
    if inner <= step:
        return (a @ b) % q
    out = None
    for start in range(0, inner, step):
        part = (a[..., start:start + step] @ b[..., start:start + step, :] if b.ndim > 1
                else a[..., start:start + step] @ b[start:start + step]) % q
        out = part if out is None else (out + part) % q
    return out


def rref(a: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of ``a`` over GF(q) and its pivot columns.

    The pivot in each column is the first nonzero entry at or below the
    current row.
    """
    m = np.array(a, dtype=np.int64) % q
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            m[[r, p]] = m[[p, r]]
        m[r] = (m[r] * pow(int(m[r, c]), -1, q)) % q
        factors = m[:, c].copy()
        factors[r] = 0
        if factors.any():
            m = (m - np.outer(factors, m[r])) % q
        pivots.append(c)
        r += 1
    return m, pivots


def invert_raw(a: np.ndarray, q: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ShapeError(f"cannot invert non-square shape {a.shape}")
    reduced, pivots = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), q)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError(f"{n}x{n} matrix is singular over GF({q})")
    return reduced[:, n:]


def rank_raw(a: np.ndarray, q: int) -> int:
    a = np.asarray(a, dtype=np.int64)
    if a.size == 0:
        return 0
    return len(rref(a, q)[1])


class MatrixGF:
    """An immutable ``rows x cols`` matrix over a prime field."""

    __slots__ = ("_a", "field")

    def __init__(self, entries, field: PrimeField | int):
        field = as_field(field)
        if isinstance(entries, MatrixGF):
            if entries.field != field:
                raise FieldMismatchError(f"matrix over {entries.field} used as {field}")
            arr = entries._a
        else:
            arr = _to_array(entries)
        if arr.ndim != 2:
            raise ShapeError(f"matrix entries must be 2-D, got shape {arr.shape}")
        arr = arr % field.q
        arr.setflags(write=False)
        self._a = arr
        self.field = field

    # construction helpers
    @classmethod
    def identity(cls, n: int, field: PrimeField | int) -> MatrixGF:
        return cls(np.eye(n, dtype=np.int64), field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: PrimeField | int) -> MatrixGF:
        return cls(np.zeros((rows, cols), dtype=np.int64), field)

    @classmethod
    def column(cls, values: Sequence[int], field: PrimeField | int) -> MatrixGF:
        return cls(np.asarray([int(v) for v in values], dtype=np.int64).reshape(-1, 1), field)

    @classmethod
    def hstack(cls, blocks: Sequence[MatrixGF]) -> MatrixGF:
        field = _common_field(blocks)
        return cls(np.hstack([b._a for b in blocks]), field)

    @classmethod
    def vstack(cls, blocks: Sequence[MatrixGF]) -> MatrixGF:
        field = _common_field(blocks)
        return cls(np.vstack([b._a for b in blocks]), field)

    @classmethod
    def block_diag(cls, blocks: Sequence[MatrixGF]) -> MatrixGF:
        field = _common_field(blocks)
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = np.zeros((rows, cols), dtype=np.int64)
        r = c = 0
        for b in blocks:
            out[r:r + b.rows, c:c + b.cols] = b._a
            r += b.rows
            c += b.cols
        return cls(out, field)

    # basic properties
    @property
    def array(self) -> np.ndarray:
        """Read-only view of the residues."""
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape  # type: ignore[return-value]

    @property
    def T(self) -> MatrixGF:
        return MatrixGF(self._a.T.copy(), self.field)

    def tolist(self) -> list[list[int]]:
        return self._a.tolist()

    def entries(self) -> list[FieldElement]:
        """Row-major list of the entries as field elements."""
        return [FieldElement(int(v), self.field) for v in self._a.ravel()]

    def __getitem__(self, idx):
        if isinstance(idx, tuple) and len(idx) == 2 and all(isinstance(i, (int, np.integer)) for i in idx):
            return FieldElement(int(self._a[idx]), self.field)
        sub = self._a[idx]
        if sub.ndim == 1:
            sub = sub.reshape(1, -1) if isinstance(idx, (int, np.integer)) else sub.reshape(-1, 1)
        return MatrixGF(sub, self.field)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixGF):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self):
        return hash((self.field, self.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"MatrixGF({self.tolist()}, GF({self.field.q}))"

    # arithmetic
    def _check(self, other: MatrixGF) -> None:
        if not isinstance(other, MatrixGF):
            raise TypeError(f"expected MatrixGF, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __matmul__(self, other: MatrixGF) -> MatrixGF:
        return matmul(self, other)

    def __add__(self, other: MatrixGF) -> MatrixGF:
        self._check(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot add shapes {self.shape} and {other.shape}")
        return MatrixGF(self._a + other._a, self.field)

    def __sub__(self, other: MatrixGF) -> MatrixGF:
        self._check(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot subtract shapes {self.shape} and {other.shape}")
        return MatrixGF(self._a - other._a, self.field)

    def __neg__(self) -> MatrixGF:
        return MatrixGF(-self._a, self.field)

    def scale(self, c: FieldElement | int) -> MatrixGF:
        if isinstance(c, FieldElement) and c.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {c.field}")
        return MatrixGF(self._a * (int(c) % self.field.q), self.field)

    def inverse(self) -> MatrixGF:
        return invert(self)

    def rank(self) -> int:
        return rank(self)

    def nullspace(self) -> MatrixGF:
        return nullspace(self)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> MatrixGF:
        return submatrix(self, rows, cols)

    def permute_columns(self, order: Sequence[int]) -> MatrixGF:
        """Column ``j`` of the result is column ``order[j]`` of ``self``."""
        return submatrix(self, range(self.rows), order)

    def permute_rows(self, order: Sequence[int]) -> MatrixGF:
        return submatrix(self, order, range(self.cols))


def _to_array(entries) -> np.ndarray:
    if isinstance(entries, np.ndarray):
        return np.array(entries, dtype=np.int64)
    rows = [[int(v) for v in row] for row in entries]
    if not rows:
        return np.zeros((0, 0), dtype=np.int64)
    return np.array(rows, dtype=np.int64).reshape(len(rows), -1)


def _common_field(blocks: Sequence[MatrixGF]) -> PrimeField:
    if not blocks:
        raise ShapeError("need at least one block")
    field = blocks[0].field
    for b in blocks[1:]:
        if b.field != field:
            raise FieldMismatchError(f"{field} vs {b.field}")
    return field


def matmul(a: MatrixGF, b: MatrixGF) -> MatrixGF:
    a._check(b)
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return MatrixGF(mod_matmul(a.array, b.array, a.field.q), a.field)


def invert(a: MatrixGF) -> MatrixGF:
    """Gauss-Jordan inverse; raises :class:`SingularMatrixError` if none exists."""
    if a.rows != a.cols:
        raise ShapeError(f"cannot invert non-square {a.shape}")
    return MatrixGF(invert_raw(a.array, a.field.q), a.field)


def rank(a: MatrixGF) -> int:
    return rank_raw(a.array, a.field.q)


def nullspace(a: MatrixGF) -> MatrixGF:
    """Basis of ``{v : a v = 0}`` as the columns of a ``cols x dim`` matrix."""
    q = a.field.q
    n = a.cols
    if a.rows == 0:
        return MatrixGF.identity(n, a.field)
    reduced, pivots = rref(a.array, q)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        basis[f, j] = 1
        for r, p in enumerate(pivots):
            basis[p, j] = (-reduced[r, f]) % q
    return MatrixGF(basis, a.field)


def submatrix(a: MatrixGF, rows: Sequence[int], cols: Sequence[int]) -> MatrixGF:
    rows = [int(r) for r in rows]
    cols = [int(c) for c in cols]
    for r in rows:
        if not 0 <= r < a.rows:
            raise IndexError(f"row index {r} out of range for {a.rows} rows")
    for c in cols:
        if not 0 <= c < a.cols:
            raise IndexError(f"column index {c} out of range for {a.cols} columns")
    return MatrixGF(a.array[np.ix_(rows, cols)] if rows and cols else np.zeros((len(rows), len(cols)), dtype=np.int64), a.field)
