"""The ``d = k + 1`` MSR code with approximately-exact repair.

Node ``i`` stores ``(p_i^t u1, p_i^t u2 + r_i^t u1)``. The ``p_i`` are fixed
and every ``k`` of them are independent; the auxiliary ``r_i`` are part of
the code state and change when a node is repaired. Repair downloads one
symbol from each of ``k + 1`` helpers and restores the first symbol
exactly, while the second symbol comes back with a new ``r_f``.

``r`` is the only mutable state. Callers must not reconstruct while a repair
of the same instance is in flight.
"""

from __future__ import annotations

import itertools
from math import comb
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from . import cauchy
from .errors import (
    ArityError,
    FieldTooSmallError,
    HelperSetError,
    IndependenceError,
    ParamsError,
    ShapeError,
    SingularMatrixError,
)
from .gf import PrimeField, as_field
from .linalg import MatrixGF, invert_raw, mod_matmul, rank_raw
from .params import CodeParams

# Exhaustive k-independence checks above this many subsets are skipped.
INDEPENDENCE_CHECK_LIMIT = 20_000


@dataclass(eq=False)
class Dk1Code:
    params: CodeParams
    p: np.ndarray  # (n, k), fixed
    r: np.ndarray  # (n, k), updated by repair
    field: PrimeField

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def B(self) -> int:
        return self.params.B

    def _check_node(self, node: int) -> None:
        if not 1 <= node <= self.n:
            raise IndexError(f"node {node} out of range 1..{self.n}")

    def generator(self, node: int) -> MatrixGF:
        """``2k x 2`` generator of ``node`` for the message ``(u1, u2)``."""
        self._check_node(node)
        k = self.k
        g = np.zeros((2 * k, 2), dtype=np.int64)
        g[:k, 0] = self.p[node - 1]
        g[:k, 1] = self.r[node - 1]
        g[k:, 1] = self.p[node - 1]
        return MatrixGF(g, self.field)

    @property
    def generators(self) -> tuple[MatrixGF, ...]:
        return tuple(self.generator(m) for m in range(1, self.n + 1))

    def copy(self) -> Dk1Code:
        return Dk1Code(self.params, self.p.copy(), self.r.copy(), self.field)


@dataclass(frozen=True)
class RepairCoefficients:
    """Coefficients for one repair. ``helpers`` is sorted; the last helper
    plays the role of node ``k+1`` and gets ``lambda = 0``."""

    failed: int
    helpers: tuple[int, ...]
    lambdas: np.ndarray  # (k+1,)
    rho: np.ndarray  # (k+1,), last entry -1
    delta: np.ndarray  # (k+1,), last entry 0
    q: int


def vandermonde_rows(n: int, k: int, field: PrimeField) -> np.ndarray:
    """Rows ``(1, a, a^2, ..., a^{k-1})`` for ``a = 0..n-1``."""
    q = field.q
    if q < n:
        raise FieldTooSmallError(f"{n} Vandermonde rows need q >= {n}, got {q}")
    pts = np.arange(n, dtype=np.int64)
    out = np.ones((n, k), dtype=np.int64)
    for j in range(1, k):
        out[:, j] = (out[:, j - 1] * pts) % q
    return out


def cauchy_rows(n: int, k: int, field: PrimeField) -> np.ndarray:
    """Rows of an ``n x k`` Cauchy matrix (needs ``q >= n + k``)."""
    return cauchy.build(cauchy.default_spec(n, k, field)).array.copy()


def check_k_independent(p: np.ndarray, k: int, q: int) -> tuple[int, ...] | None:
    """First ``k``-subset (1-based) of rows of ``p`` that is dependent, or ``None``."""
    for subset in itertools.combinations(range(p.shape[0]), k):
        if rank_raw(p[list(subset)], q) < k:
            return tuple(s + 1 for s in subset)
    return None


def construct_dk1(
    n: int,
    k: int,
    field: PrimeField | int,
    p=None,
    r=None,
    p_kind: str = "vandermonde",
    require_independent: bool = True,
) -> Dk1Code:
    """``[n, k, k+1]`` code. ``p``/``r`` default to Vandermonde rows and zeros.

    Supplied ``p`` rows must be ``k``-wise independent. ``require_independent=False``
    skips the check, which is only useful for loading published fixtures that
    violate it; such a code is not MDS.
    """
    field = as_field(field)
    if k < 1 or n < k + 2:
        raise ParamsError(f"d = k+1 code needs n >= k+2 and k >= 1, got n={n}, k={k}")
    params = CodeParams.msr(n, k, k + 1, field.q)
    if p is None:
        if p_kind == "vandermonde":
            p_arr = vandermonde_rows(n, k, field)
        elif p_kind == "cauchy":
            p_arr = cauchy_rows(n, k, field)
        else:
            raise ParamsError(f"unknown p_kind {p_kind!r}")
    else:
        p_arr = _matrix(p, (n, k), "p", field.q)
    r_arr = np.zeros((n, k), dtype=np.int64) if r is None else _matrix(r, (n, k), "r", field.q)

    if require_independent and comb(n, k) <= INDEPENDENCE_CHECK_LIMIT:
        bad = check_k_independent(p_arr, k, field.q)
        if bad is not None:
            raise IndependenceError(f"p-vectors of nodes {bad} are linearly dependent")
    p_arr.setflags(write=False)
    return Dk1Code(params, p_arr, r_arr, field)


def _matrix(values, shape: tuple[int, int], name: str, q: int) -> np.ndarray:
    arr = values.array.copy() if isinstance(values, MatrixGF) else np.array(
        [[int(v) for v in row] for row in values], dtype=np.int64
    )
    if arr.shape != shape:
        raise ShapeError(f"{name} must have shape {shape}, got {arr.shape}")
    return arr % q


def _vec(v, k: int, q: int, name: str) -> np.ndarray:
    arr = np.asarray([int(x) for x in v] if isinstance(v, (list, tuple)) else v, dtype=np.int64)
    if arr.shape[-1] != k or arr.ndim not in (1, 2):
        raise ShapeError(f"{name} must have shape (k,) or (S, k) with k={k}, got {arr.shape}")
    return arr % q


def encode_dk1(code: Dk1Code, u1, u2) -> np.ndarray:
    """``(n, 2)`` table, or ``(S, n, 2)`` for stacked messages."""
    q = code.q
    a = _vec(u1, code.k, q, "u1")
    b = _vec(u2, code.k, q, "u2")
    first = mod_matmul(a, code.p.T, q)
    second = (mod_matmul(b, code.p.T, q) + mod_matmul(a, code.r.T, q)) % q
    return np.stack([first, second], axis=-1)


def reconstruct_dk1(code: Dk1Code, nodes: Sequence[int], symbols) -> tuple[np.ndarray, np.ndarray]:
    """Recover ``(u1, u2)`` from ``k`` nodes; ``symbols[..., j, :]`` belongs to ``nodes[j]``."""
    nodes = [int(m) for m in nodes]
    if len(nodes) != code.k:
        raise ArityError(f"reconstruction needs exactly k={code.k} nodes, got {len(nodes)}")
    if len(set(nodes)) != len(nodes):
        raise IndexError(f"duplicate nodes in {nodes}")
    for m in nodes:
        code._check_node(m)
    q = code.q
    y = np.asarray(symbols, dtype=np.int64) % q
    if y.shape[-2:] != (code.k, 2):
        raise ShapeError(f"symbols must have shape (k, 2) or (S, k, 2), got {y.shape}")
    idx = [m - 1 for m in nodes]
    p_inv_t = invert_raw(code.p[idx], q).T
    u1 = mod_matmul(y[..., 0], p_inv_t, q)
    rest = (y[..., 1] - mod_matmul(u1, code.r[idx].T, q)) % q
    u2 = mod_matmul(rest, p_inv_t, q)
    return u1, u2


def _check_helpers(code: Dk1Code, failed: int, helpers: Sequence[int]) -> list[int]:
    code._check_node(failed)
    helpers = [int(h) for h in helpers]
    if len(helpers) != code.d:
        raise ArityError(f"repair needs exactly d={code.d} helpers, got {len(helpers)}")
    for h in helpers:
        code._check_node(h)
    if failed in helpers:
        raise HelperSetError(f"failed node {failed} listed as its own helper")
    if len(set(helpers)) != len(helpers):
        raise HelperSetError(f"duplicate helpers in {helpers}")
    return sorted(helpers)


def repair_coefficients(code: Dk1Code, failed: int, helpers: Sequence[int]) -> RepairCoefficients:
    helpers = _check_helpers(code, failed, helpers)
    q, k = code.q, code.k
    first = [h - 1 for h in helpers[:k]]
    last = helpers[-1] - 1
    p_k, r_k = code.p[first], code.r[first]
    try:
        p_k_inv = invert_raw(p_k, q)
    except SingularMatrixError as exc:
        raise IndependenceError(f"p-vectors of helpers {helpers[:k]} are dependent") from exc
    p_f = code.p[failed - 1]

    rho1 = mod_matmul(code.p[last], p_k_inv, q)
    target = mod_matmul((p_f - mod_matmul(rho1, r_k, q) + code.r[last]) % q, p_k_inv, q)
    if not rho1.all():
        raise IndependenceError(f"p_{helpers[-1]} lies in the span of fewer than k helper p-vectors")
    inv = code.field.inverse_table[rho1] if q <= 1 << 16 else np.array([code.field.inv_raw(int(v)) for v in rho1])
    lambdas = np.append((target * inv) % q, 0)
    rho = np.append(rho1, q - 1)
    delta = np.append(mod_matmul(p_f, p_k_inv, q), 0)
    return RepairCoefficients(failed, tuple(helpers), lambdas, rho, delta, q)


def helper_symbol(coeffs: RepairCoefficients, helper: int, stored) -> np.ndarray | int:
    """What ``helper`` sends: ``lambda * first + second`` of its stored pair(s)."""
    try:
        j = coeffs.helpers.index(int(helper))
    except ValueError:
        raise HelperSetError(f"node {helper} is not a helper for this repair") from None
    s = np.asarray(stored, dtype=np.int64)
    q = coeffs.q
    out = (int(coeffs.lambdas[j]) * s[..., 0] + s[..., 1]) % q
    return int(out) if out.ndim == 0 else out


def replacement_r(code: Dk1Code, coeffs: RepairCoefficients) -> np.ndarray:
    """``u1``-coefficient of the second recovered symbol: ``delta^t (Lambda P + R)`` over the helpers."""
    q = code.q
    idx = [h - 1 for h in coeffs.helpers]
    lam_p = (coeffs.lambdas[:, None] * code.p[idx]) % q
    return mod_matmul(coeffs.delta, (lam_p + code.r[idx]) % q, q)


def repair_dk1(
    code: Dk1Code,
    failed: int,
    helpers: Sequence[int],
    received: Sequence,
    coeffs: RepairCoefficients | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Rebuild node ``failed`` from the ``k+1`` received symbols and update ``code.r``.

    ``received[j]`` is the symbol (or per-stripe array) sent by the ``j``-th
    helper in ascending node order. Returns ``(stored, r_new)`` where
    ``stored`` has shape ``(2,)`` or ``(S, 2)``.
    """
    helpers = _check_helpers(code, failed, helpers)
    if coeffs is None:
        coeffs = repair_coefficients(code, failed, helpers)
    elif coeffs.failed != failed or list(coeffs.helpers) != helpers:
        raise ArityError("repair coefficients were computed for a different failure or helper set")
    if len(received) != code.d:
        raise ArityError(f"repair needs exactly d={code.d} symbols, got {len(received)}")
    q = code.q
    recv = np.stack([np.asarray(v, dtype=np.int64) for v in received], axis=-1) % q
    first = mod_matmul(recv, coeffs.rho, q)
    second = mod_matmul(recv, coeffs.delta, q)
    r_new = replacement_r(code, coeffs)
    code.r[failed - 1] = r_new
    return np.stack([first, second], axis=-1), r_new
