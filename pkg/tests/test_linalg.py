from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from regencodes import linalg
from regencodes.errors import FieldMismatchError, ShapeError, SingularMatrixError
from regencodes.gf import PrimeField
from regencodes.linalg import MatrixGF

from conftest import REF_PSI
from oracles import rank_mod

F7 = PrimeField(7)


def test_matmul_examples():
    a = MatrixGF([[1, 2, 3], [4, 5, 6]], F7)
    assert MatrixGF.identity(2, F7) @ a == a
    assert a @ MatrixGF.zeros(3, 2, F7) == MatrixGF.zeros(2, 2, F7)
    assert MatrixGF([[5, 4], [2, 5]], F7) @ MatrixGF([[1], [0]], F7) == MatrixGF([[5], [2]], F7)


def test_matmul_errors():
    with pytest.raises(ShapeError):
        MatrixGF.identity(2, F7) @ MatrixGF.identity(3, F7)
    with pytest.raises(FieldMismatchError):
        MatrixGF.identity(2, F7) @ MatrixGF.identity(2, 11)


def test_invert_examples():
    assert MatrixGF.identity(3, F7).inverse() == MatrixGF.identity(3, F7)
    assert MatrixGF([[2, 0], [0, 2]], F7).inverse() == MatrixGF([[4, 0], [0, 4]], F7)
    psi = MatrixGF(REF_PSI, F7)
    inv = psi.inverse()
    assert psi @ inv == MatrixGF.identity(3, F7)
    assert inv @ psi == MatrixGF.identity(3, F7)


def test_invert_errors():
    with pytest.raises(SingularMatrixError):
        MatrixGF([[1, 2], [2, 4]], F7).inverse()
    with pytest.raises(ShapeError):
        MatrixGF([[1, 2, 3]], F7).inverse()


def test_rank_examples():
    assert MatrixGF.zeros(3, 3, F7).rank() == 0
    assert MatrixGF.identity(4, F7).rank() == 4
    assert MatrixGF([[1, 2], [2, 4]], F7).rank() == 1


def test_nullspace_examples():
    assert MatrixGF.identity(3, F7).nullspace().cols == 0
    assert MatrixGF.zeros(3, 3, F7).nullspace() == MatrixGF.identity(3, F7)
    a = MatrixGF([[1, 2], [2, 4]], F7)
    ns = a.nullspace()
    assert ns.shape == (2, 1)
    assert a @ ns == MatrixGF.zeros(2, 1, F7)
    # a scalar multiple of (5, 1)
    v = ns.array[:, 0]
    assert (v[0] * 1 - v[1] * 5) % 7 == 0


def test_submatrix_examples():
    psi = MatrixGF(REF_PSI, F7)
    assert psi.submatrix(range(3), range(3)) == psi
    assert psi.submatrix([0], [0]) == MatrixGF([[5]], F7)
    assert psi.submatrix([1, 2], [0, 1]) == MatrixGF([[2, 5], [3, 2]], F7)
    with pytest.raises(IndexError):
        psi.submatrix([3], [0])
    with pytest.raises(IndexError):
        psi.submatrix([0], [-1])


def test_matrix_is_immutable():
    m = MatrixGF([[1, 2], [3, 4]], F7)
    with pytest.raises(ValueError):
        m.array[0, 0] = 5


def test_getitem_and_permutations():
    m = MatrixGF([[1, 2, 3], [4, 5, 6]], F7)
    assert m[1, 2] == F7(6)
    assert m.permute_columns([2, 0, 1]).tolist() == [[3, 1, 2], [6, 4, 5]]
    assert m.permute_rows([1, 0]).tolist() == [[4, 5, 6], [1, 2, 3]]
    assert m.T.shape == (3, 2)


def test_block_helpers():
    a = MatrixGF([[1]], F7)
    b = MatrixGF([[2, 3]], F7)
    assert MatrixGF.block_diag([a, b]).tolist() == [[1, 0, 0], [0, 2, 3]]
    assert MatrixGF.hstack([a, b]).tolist() == [[1, 2, 3]]
    assert MatrixGF.vstack([b, b]).shape == (2, 2)


def test_mod_matmul_large_modulus_no_overflow():
    q = 2_147_483_647
    a = np.full((1, 64), q - 1, dtype=np.int64)
    b = np.full((64, 1), q - 1, dtype=np.int64)
    # (q-1)^2 * 64 mod q = 64
    assert linalg.mod_matmul(a, b, q)[0, 0] == 64


matrices = st.tuples(st.sampled_from([2, 3, 7, 11, 257]), st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32 - 1))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_nullity_and_rank_oracle(params):
    q, r, c, seed = params
    a = np.random.default_rng(seed).integers(0, q, (r, c))
    m = MatrixGF(a, q)
    rk = m.rank()
    assert rk == rank_mod(a.tolist(), q)
    ns = m.nullspace()
    assert rk + ns.cols == c
    if ns.cols:
        assert not (m @ ns).array.any()
        assert ns.rank() == ns.cols


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_invert_iff_full_rank(params):
    q, n, _, seed = params
    a = np.random.default_rng(seed).integers(0, q, (n, n))
    m = MatrixGF(a, q)
    if rank_mod(a.tolist(), q) == n:
        inv = m.inverse()
        eye = MatrixGF.identity(n, q)
        assert m @ inv == eye and inv @ m == eye
    else:
        with pytest.raises(SingularMatrixError):
            m.inverse()
