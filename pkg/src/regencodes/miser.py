"""The MISER code: an interference-aligning systematic MDS code whose
systematic nodes are exactly repaired at the cut-set repair bandwidth.

Every instance is held as a *base* code with ``k0 = alpha`` systematic nodes
and an ``alpha x (n0 - alpha)`` Cauchy matrix ``psi``, plus a shortening
count ``i``: the public code drops the first ``i`` systematic nodes and the
top ``i`` components of every generator (their message blocks are pinned to
zero). With ``n0 = 2 alpha`` the base code has ``d = n - 1``; a rectangular
``psi`` gives ``d = 2k - 1 < n - 1``, repairable only when the helper set
contains every surviving systematic node.

Parity node with Cauchy column ``psi_c`` has generator columns

    component i, column j = sigma[i, :] * psi_c   if i == j
                            psi_c[i] * e_j         otherwise

with ``sigma[i, j] = epsilon`` for the standard code.

Symbols are int64 residues. Every codec function accepts an optional
leading stripe axis, so ``u`` may be ``(B,)`` or ``(S, B)``.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field as dc_field, replace
from functools import cached_property

import numpy as np

from . import cauchy
from .errors import (
    ArityError,
    CorruptionError,
    FieldTooSmallError,
    HelperSetError,
    InvalidSigmaError,
    ParamsError,
    ShapeError,
    SingularMatrixError,
    UnsupportedRepairError,
)
from .gf import FieldElement, PrimeField, as_field
from .linalg import MatrixGF, invert_raw, mod_matmul
from .params import CodeParams


@dataclass(frozen=True)
class RepairSymbol:
    """One symbol sent by ``from_node`` towards the replacement of ``for_node``.

    ``value`` is a residue, or an array of residues when several stripes are
    repaired at once.
    """

    from_node: int
    for_node: int
    value: int | np.ndarray

    def __post_init__(self) -> None:
        if self.from_node == self.for_node:
            raise HelperSetError(f"node {self.from_node} cannot help repair itself")


def choose_epsilon(field: PrimeField) -> FieldElement:
    """Smallest element with ``e != 0`` and ``e**2 != 1``."""
    for e in range(2, field.q):
        if (e * e) % field.q != 1:
            return field(e)
    raise FieldTooSmallError(f"no epsilon with e != 0, e^2 != 1 exists in {field}")


@dataclass(frozen=True, eq=False)
class MiserCode:
    params: CodeParams
    psi: MatrixGF
    sigma: np.ndarray = dc_field(repr=False)
    epsilon: FieldElement | None
    shortened_by: int = 0
    cauchy_spec: cauchy.CauchySpec | None = None

    # --- shape bookkeeping -------------------------------------------------
    @property
    def field(self) -> PrimeField:
        return self.psi.field

    @property
    def q(self) -> int:
        return self.field.q

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
    def alpha(self) -> int:
        return self.params.alpha

    @property
    def B(self) -> int:
        return self.params.B

    @property
    def base_n(self) -> int:
        return self.n + self.shortened_by

    @property
    def full_helper_set(self) -> bool:
        """True when any ``n - 1`` surviving nodes may serve as helpers."""
        return self.d == self.n - 1

    def is_systematic(self, node: int) -> bool:
        self._check_node(node)
        return node <= self.k

    def _check_node(self, node: int) -> None:
        if not 1 <= node <= self.n:
            raise IndexError(f"node {node} out of range 1..{self.n}")

    def _base_index(self, node: int) -> int:
        """0-based node index in the unshortened base code."""
        return node - 1 + self.shortened_by

    def _parity_column(self, node: int) -> int:
        return node - self.k - 1

    # --- generators ---------------------------------------------------------
    @cached_property
    def base_generators(self) -> np.ndarray:
        """``(n0, alpha*alpha, alpha)`` array of the unshortened generators."""
        a = self.alpha
        psi = self.psi.array
        out = np.zeros((self.base_n, a * a, a), dtype=np.int64)
        for m in range(a):
            out[m, m * a:(m + 1) * a, :] = np.eye(a, dtype=np.int64)
        for c in range(psi.shape[1]):
            g = out[a + c]
            col = psi[:, c]
            for i in range(a):
                for j in range(a):
                    if j != i:
                        g[i * a + j, j] = col[i]
                g[i * a:(i + 1) * a, i] = (self.sigma[i] * col) % self.q
        out.setflags(write=False)
        return out

    @cached_property
    def _gen_array(self) -> np.ndarray:
        """``(n, B, alpha)`` generators of the public (shortened) code."""
        i = self.shortened_by
        g = self.base_generators[i:, i * self.alpha:, :]
        return np.ascontiguousarray(g)

    @cached_property
    def generators(self) -> tuple[MatrixGF, ...]:
        return tuple(MatrixGF(g, self.field) for g in self._gen_array)

    def generator(self, node: int) -> MatrixGF:
        self._check_node(node)
        return self.generators[node - 1]

    def component(self, node: int, i: int) -> MatrixGF:
        """``alpha x alpha`` component ``i`` (1-based) of node's generator."""
        a = self.alpha
        return MatrixGF(self._gen_array[node - 1, (i - 1) * a:i * a, :], self.field)

    def kernel(self, node: int, position: int) -> np.ndarray:
        """Global kernel (length ``B``) of the node's stored symbol ``position`` (1-based)."""
        return self._gen_array[node - 1, :, position - 1]

    @cached_property
    def full_generator(self) -> np.ndarray:
        """``B x n*alpha`` generator of the whole code."""
        return np.hstack(list(self._gen_array))

    def repair_position(self, failed: int) -> int:
        """1-based index of the stored symbol every helper sends to repair ``failed``."""
        return failed + self.shortened_by


# ---------------------------------------------------------------------------
# construction


def construct(
    k: int,
    field: PrimeField | int,
    cauchy_spec: cauchy.CauchySpec | None = None,
    epsilon: int | FieldElement | None = None,
) -> MiserCode:
    """Native ``[2k, k, 2k-1]`` MISER code."""
    return construct_general(2 * k, k, field, cauchy_spec=cauchy_spec, epsilon=epsilon)


def construct_general(
    n: int,
    k: int,
    field: PrimeField | int,
    d: int | None = None,
    cauchy_spec: cauchy.CauchySpec | None = None,
    epsilon: int | FieldElement | None = None,
    sigma: np.ndarray | None = None,
) -> MiserCode:
    """MISER code for ``n >= 2k`` and ``2k-1 <= d <= n-1`` (default ``d = n-1``).

    Built as the base code with ``alpha = d-k+1`` systematic nodes shortened
    by ``d-2k+1``. When ``d < n-1`` optimal repair requires all surviving
    systematic nodes among the helpers.
    """
    field = as_field(field)
    d = n - 1 if d is None else d
    if k < 1 or n < 2 * k:
        raise ParamsError(f"MISER needs n >= 2k >= 2, got n={n}, k={k}")
    if not 2 * k - 1 <= d <= n - 1:
        raise ParamsError(f"MISER needs 2k-1 <= d <= n-1, got n={n}, k={k}, d={d}")
    alpha = d - k + 1
    if alpha < 2:
        raise ParamsError(f"alpha = d-k+1 must be at least 2, got {alpha}")
    if field.q < alpha + n - k or field.q < 4:
        raise FieldTooSmallError(f"MISER [{n},{k},{d}] needs q >= {max(4, alpha + n - k)}, got {field.q}")
    params = CodeParams.msr(n, k, d, field.q)

    spec = cauchy_spec if cauchy_spec is not None else cauchy.default_spec(alpha, n - k, field)
    if spec.field != field:
        raise ParamsError(f"Cauchy spec over {spec.field} used with {field}")
    if spec.shape != (alpha, n - k):
        raise ParamsError(f"need an {alpha}x{n - k} Cauchy matrix, spec gives {spec.shape}")
    psi = cauchy.build(spec)

    if sigma is None:
        eps = choose_epsilon(field) if epsilon is None else field(int(epsilon))
        if eps.value == 0 or (eps.value * eps.value) % field.q == 1:
            raise ParamsError(f"epsilon must satisfy e != 0 and e^2 != 1, got {eps.value}")
        sigma = np.full((alpha, alpha), eps.value, dtype=np.int64)
    else:
        eps = None
        sigma = _check_sigma(sigma, alpha, field)
    sigma.setflags(write=False)
    return MiserCode(params, psi, sigma, eps, shortened_by=d - 2 * k + 1, cauchy_spec=spec)


def _check_sigma(sigma, alpha: int, field: PrimeField) -> np.ndarray:
    rows = []
    for s in sigma:
        arr = s.array if isinstance(s, MatrixGF) else np.asarray(s, dtype=np.int64)
        if arr.ndim == 2:
            if arr.shape != (alpha, alpha) or np.count_nonzero((arr - np.diag(np.diag(arr))) % field.q):
                raise InvalidSigmaError(f"each Sigma_i must be an {alpha}x{alpha} diagonal matrix")
            arr = np.diag(arr)
        rows.append(arr % field.q)
    sig = np.array(rows, dtype=np.int64)
    if sig.shape != (alpha, alpha):
        raise InvalidSigmaError(f"need {alpha} diagonal matrices of size {alpha}, got shape {sig.shape}")
    if not sig.all():
        i, j = map(int, np.argwhere(sig == 0)[0])
        raise InvalidSigmaError(f"epsilon_{{{i + 1},{j + 1}}} is zero")
    prod = (sig * sig.T) % field.q
    np.fill_diagonal(prod, 0)
    if (prod == 1).any():
        i, j = map(int, np.argwhere(prod == 1)[0])
        raise InvalidSigmaError(f"epsilon_{{{i + 1},{j + 1}}} * epsilon_{{{j + 1},{i + 1}}} = 1")
    return sig


def construct_sigma_variant(
    k: int,
    field: PrimeField | int,
    sigmas: Sequence,
    cauchy_spec: cauchy.CauchySpec | None = None,
) -> MiserCode:
    """Native MISER code whose diagonal blocks use ``Sigma_i psi`` instead of ``epsilon psi``.

    ``sigmas[i]`` is the diagonal of ``Sigma_{i+1}`` (or the full diagonal matrix).
    Requires every entry nonzero and ``eps[i][j] * eps[j][i] != 1`` for ``i != j``.
    """
    return construct_general(2 * k, k, field, cauchy_spec=cauchy_spec, sigma=sigmas)


def shorten(parent: MiserCode, i: int) -> MiserCode:
    """``[n'-i, k'-i, d'-i]`` code obtained by pinning the first ``i`` message blocks to zero."""
    if not 0 <= i < parent.k:
        raise ParamsError(f"can shorten a k={parent.k} code by 0..{parent.k - 1}, got {i}")
    if i == 0:
        return parent
    p = parent.params
    params = CodeParams.msr(p.n - i, p.k - i, p.d - i, p.q)
    return replace(parent, params=params, shortened_by=parent.shortened_by + i)


# ---------------------------------------------------------------------------
# encoding


def _message(code: MiserCode, u) -> np.ndarray:
    arr = np.asarray(u, dtype=np.int64) if not isinstance(u, MatrixGF) else u.array.ravel()
    if arr.ndim == 1 and arr.dtype == object:
        arr = np.array([int(v) for v in arr], dtype=np.int64)
    if arr.shape[-1] != code.B or arr.ndim not in (1, 2):
        raise ShapeError(f"message must have shape (B,) or (S, B) with B={code.B}, got {arr.shape}")
    return arr % code.q


def encode(code: MiserCode, u) -> np.ndarray:
    """Stored symbols: ``(n, alpha)`` for one message, ``(S, n, alpha)`` for a batch."""
    msg = _message(code, [int(v) for v in u] if isinstance(u, (list, tuple)) else u)
    out = mod_matmul(msg, code.full_generator, code.q)
    return out.reshape(msg.shape[:-1] + (code.n, code.alpha))


# ---------------------------------------------------------------------------
# exact repair of systematic nodes


def repair_symbol(code: MiserCode, helper: int, failed: int, stored) -> RepairSymbol:
    """The symbol ``helper`` sends to repair systematic node ``failed``.

    ``stored`` is the helper's content, ``(alpha,)`` or ``(S, alpha)``.
    """
    code._check_node(helper)
    code._check_node(failed)
    if failed > code.k:
        raise UnsupportedRepairError(
            f"node {failed} is a parity node; only systematic nodes have optimal repair "
            "(use repair_parity_fallback)"
        )
    if helper == failed:
        raise HelperSetError(f"node {helper} cannot help repair itself")
    arr = np.asarray(stored, dtype=np.int64)
    if arr.shape[-1] != code.alpha:
        raise ShapeError(f"node content must have {code.alpha} symbols, got shape {arr.shape}")
    value = arr[..., code.repair_position(failed) - 1]
    return RepairSymbol(helper, failed, int(value) if value.ndim == 0 else value.copy())


def validate_helpers(code: MiserCode, failed: int, helpers: Sequence[int]) -> list[int]:
    """Sorted helper list, or :class:`HelperSetError` if it cannot repair ``failed``."""
    code._check_node(failed)
    helpers = [int(h) for h in helpers]
    for h in helpers:
        code._check_node(h)
    if failed in helpers:
        raise HelperSetError(f"failed node {failed} listed as its own helper")
    if len(set(helpers)) != len(helpers):
        raise HelperSetError(f"duplicate helpers in {helpers}")
    if len(helpers) != code.d:
        raise ArityError(f"repair needs exactly d={code.d} helpers, got {len(helpers)}")
    if failed <= code.k and not code.full_helper_set:
        missing = [s for s in range(1, code.k + 1) if s != failed and s not in helpers]
        if missing:
            raise HelperSetError(
                f"with d={code.d} < n-1 the helpers must include every surviving systematic node; missing {missing}"
            )
    return sorted(helpers)


def default_helpers(code: MiserCode, failed: int, available: Sequence[int] | None = None) -> list[int]:
    """Lowest-indexed legal helper set drawn from ``available`` (default: all other nodes)."""
    pool = sorted(set(available if available is not None else range(1, code.n + 1)) - {failed})
    if failed <= code.k and not code.full_helper_set:
        systematic = [s for s in range(1, code.k + 1) if s != failed]
        parity = [m for m in pool if m > code.k][: code.alpha]
        chosen = systematic + parity
    else:
        chosen = pool[: code.d]
    if len(chosen) != code.d or not set(chosen) <= set(pool):
        raise HelperSetError(f"not enough surviving nodes to repair node {failed}")
    return chosen


def repair_systematic(code: MiserCode, failed: int, symbols: Sequence[RepairSymbol]) -> np.ndarray:
    """Recover the ``alpha`` symbols of systematic node ``failed`` from ``d`` helper symbols.

    Systematic helpers' symbols cancel the aligned interference in the
    parity symbols; what remains is ``u_failed^t Sigma Psi_sub`` which is
    undone with one ``alpha x alpha`` inversion.
    """
    if failed > code.k:
        raise UnsupportedRepairError(f"node {failed} is a parity node; use repair_parity_fallback")
    for s in symbols:
        if s.for_node != failed:
            raise ArityError(f"symbol from node {s.from_node} was produced for node {s.for_node}, not {failed}")
    helpers = validate_helpers(code, failed, [s.from_node for s in symbols])
    by_node = {s.from_node: np.asarray(s.value, dtype=np.int64) % code.q for s in symbols}

    q, a, i0 = code.q, code.alpha, code.shortened_by
    target = failed - 1 + i0  # base component being rebuilt
    batch = np.broadcast_shapes(*(v.shape for v in by_node.values()))

    # interference seen by every parity helper: one symbol per base component
    interference = np.zeros(batch + (a,), dtype=np.int64)
    for h in helpers:
        if h <= code.k:
            interference[..., code._base_index(h)] = by_node[h]

    parity = [h for h in helpers if h > code.k]
    if len(parity) != a:
        raise HelperSetError(f"repair needs exactly alpha={a} parity helpers, got {len(parity)}")
    cols = [code._parity_column(h) for h in parity]
    psi_sub = code.psi.array[:, cols]
    mask = np.ones(a, dtype=np.int64)
    mask[target] = 0
    z = np.stack([by_node[h] for h in parity], axis=-1)
    z = (z - mod_matmul(interference, psi_sub * mask[:, None], q)) % q

    # z = u_target^t Sigma_target Psi_sub
    try:
        desired = (code.sigma[target][:, None] * psi_sub) % q
        return mod_matmul(z, invert_raw(desired, q), q)
    except SingularMatrixError as exc:  # pragma: no cover - Cauchy submatrices are nonsingular
        raise CorruptionError("desired component is singular") from exc


def repair_parity_fallback(code: MiserCode, failed: int, contents: Mapping[int, np.ndarray]) -> np.ndarray:
    """Rebuild any node by downloading ``k`` full nodes (``k alpha`` symbols),
    decoding the message and re-encoding. Suboptimal bandwidth; used for
    parity nodes, which have no optimal repair here."""
    code._check_node(failed)
    if failed in contents:
        raise HelperSetError(f"failed node {failed} listed as its own helper")
    if len(contents) != code.k:
        raise ArityError(f"fallback repair needs exactly k={code.k} full nodes, got {len(contents)}")
    nodes = sorted(contents)
    stacked = np.stack([np.asarray(contents[m], dtype=np.int64) for m in nodes], axis=-2)
    u = reconstruct(code, nodes, stacked)
    return mod_matmul(u, code._gen_array[failed - 1], code.q)


# ---------------------------------------------------------------------------
# reconstruction


def reconstruct(code: MiserCode, nodes: Sequence[int], symbols) -> np.ndarray:
    """Recover the message from any ``k`` nodes.

    ``symbols[..., j, :]`` is the content of ``nodes[j]``. Runs the staged
    elimination: strip the known systematic components, peel the symbols
    at the connected systematic positions through ``S~^{-1}``, then the
    diagonal singletons, then the remaining ``[[e, 1], [1, e]]`` pairs.
    """
    nodes = [int(m) for m in nodes]
    if len(nodes) != code.k:
        raise ArityError(f"reconstruction needs exactly k={code.k} nodes, got {len(nodes)}")
    if len(set(nodes)) != len(nodes):
        raise IndexError(f"duplicate nodes in {nodes}")
    for m in nodes:
        code._check_node(m)
    y = np.asarray(symbols, dtype=np.int64) % code.q
    if y.shape[-2:] != (code.k, code.alpha) or y.ndim not in (2, 3):
        raise ShapeError(f"symbols must have shape (k, alpha) or (S, k, alpha), got {y.shape}")

    q, a, i0 = code.q, code.alpha, code.shortened_by
    batch = y.shape[:-2]
    content = {m: y[..., j, :] for j, m in enumerate(nodes)}

    # base message blocks, one row per base component
    u = np.zeros(batch + (a, a), dtype=np.int64)
    known = list(range(i0))  # pinned-zero blocks
    for m in sorted(m for m in nodes if m <= code.k):
        u[..., code._base_index(m), :] = content[m]
        known.append(code._base_index(m))
    parity = sorted(m for m in nodes if m > code.k)
    missing = [c for c in range(a) if c not in known]
    if len(missing) != len(parity):  # pragma: no cover - follows from the counts above
        raise CorruptionError("missing components do not match parity nodes")

    if parity:
        y_par = np.stack([content[m] for m in parity], axis=-2)
        _solve_missing(code, u, y_par, parity, known, missing)
    return u[..., i0:, :].reshape(batch + (code.B,))


def _solve_missing(code: MiserCode, u: np.ndarray, y_par: np.ndarray, parity, known, missing) -> None:
    """Fill ``u[..., missing, :]`` in place from the parity contents ``y_par`` (``..., p, alpha``)."""
    q, a = code.q, code.alpha
    p = len(parity)
    cols = [code._parity_column(m) for m in parity]
    gens = code.base_generators[[a + c for c in cols]]  # (p, B0, alpha)

    # strip the known systematic components
    rows = np.concatenate([np.arange(w * a, (w + 1) * a) for w in known]) if known else np.zeros(0, dtype=np.int64)
    if rows.size:
        u_known = u[..., known, :].reshape(u.shape[:-2] + (len(known) * a,))
        for j in range(p):
            y_par[..., j, :] = (y_par[..., j, :] - mod_matmul(u_known, gens[j][rows], q)) % q

    s_tilde = code.psi.array[np.ix_(missing, cols)]
    try:
        s_inv = invert_raw(s_tilde, q)
    except SingularMatrixError as exc:
        raise CorruptionError(f"S~ for parity nodes {parity} is singular") from exc

    # group by column position; at a connected systematic position the group
    # equals (u_{Omega_b}[w])_b S~, so one multiplication peels it
    if known:
        peeled = mod_matmul(np.swapaxes(y_par[..., :, known], -1, -2), s_inv, q)  # (..., |known|, p)
        for b, om in enumerate(missing):
            u[..., om, known] = peeled[..., :, b]

    # remove the peeled symbols from the groups at missing positions
    psi_par = code.psi.array[:, cols]  # (alpha, p)
    v = np.empty(y_par.shape[:-2] + (p, p), dtype=np.int64)  # v[..., c, m]
    for c, om in enumerate(missing):
        group = y_par[..., :, om]
        if known:
            coeff = (code.sigma[om, known][:, None] * psi_par[known]) % q  # (|known|, p)
            group = (group - mod_matmul(u[..., om, known], coeff, q)) % q
        v[..., c, :] = group

    # w[c, b] = sigma[Om_c, Om_b] u_{Om_c}[Om_b] + [b != c] u_{Om_b}[Om_c]
    w = mod_matmul(v, s_inv, q)
    inv = code.field.inv_raw
    for c, om in enumerate(missing):
        u[..., om, om] = (w[..., c, c] * inv(int(code.sigma[om, om]))) % q
    for b, c in itertools.combinations(range(p), 2):
        ob, oc = missing[b], missing[c]
        s_cb, s_bc = int(code.sigma[oc, ob]), int(code.sigma[ob, oc])
        det = (s_cb * s_bc - 1) % q
        if det == 0:
            raise CorruptionError(f"pair ({ob + 1}, {oc + 1}) has a singular 2x2 block")
        det_inv = inv(det)
        wcb, wbc = w[..., c, b], w[..., b, c]
        u[..., oc, ob] = ((s_bc * wcb - wbc) * det_inv) % q
        u[..., ob, oc] = ((s_cb * wbc - wcb) * det_inv) % q


def reconstruct_by_inversion(code: MiserCode, nodes: Sequence[int], symbols) -> np.ndarray:
    """Reference decoder: invert the ``B x B`` concatenated generator."""
    nodes = [int(m) for m in nodes]
    g = np.hstack([code._gen_array[m - 1] for m in nodes])
    y = np.asarray(symbols, dtype=np.int64) % code.q
    flat = y.reshape(y.shape[:-2] + (len(nodes) * code.alpha,))
    return mod_matmul(flat, invert_raw(g, code.q), code.q)


# ---------------------------------------------------------------------------
# matrix view of the staged elimination


def appendix_stages(code: MiserCode, nodes: Sequence[int]) -> dict[str, MatrixGF]:
    """Intermediate matrices ``D1..D7`` of the reconstruction argument for ``nodes``.

    Computed on the unshortened base code, with the pinned systematic nodes
    counted as connected. Each stage is an explicit column permutation,
    block multiplication or row/column deletion of the previous one.
    """
    q, a, i0 = code.q, code.alpha, code.shortened_by
    nodes = sorted(int(m) for m in nodes)
    systematic = list(range(i0)) + [code._base_index(m) for m in nodes if m <= code.k]
    parity = [m for m in nodes if m > code.k]
    missing = [c for c in range(a) if c not in systematic]
    p = len(parity)
    f = code.field
    gens = code.base_generators

    d1 = MatrixGF(np.hstack([gens[w] for w in systematic] + [gens[code._base_index(m)] for m in parity]), f)
    stages = {"D1": d1}
    if not p:
        return stages

    rows = np.concatenate([np.arange(c * a, (c + 1) * a) for c in missing])
    d2 = MatrixGF(np.hstack([gens[code._base_index(m)][rows] for m in parity]), f)
    stages["D2"] = d2

    order = [j * a + c for c in missing + systematic for j in range(p)]
    d3 = d2.permute_columns(order)
    stages["D3"] = d3

    cols = [code._parity_column(m) for m in parity]
    s_inv = MatrixGF(invert_raw(code.psi.array[np.ix_(missing, cols)], q), f)
    eye = MatrixGF.identity(p, f)
    d4 = d3 @ MatrixGF.block_diag([eye] * p + [s_inv] * len(systematic))
    stages["D4"] = d4

    keep_rows = [b * a + r for b in range(p) for r in missing]
    d5 = d4.submatrix(keep_rows, range(p * p))
    stages["D5"] = d5

    d6 = d5 @ MatrixGF.block_diag([s_inv] * p)
    stages["D6"] = d6

    pairs = list(itertools.combinations(range(p), 2))
    idx = [x for i, j in pairs for x in (j * p + i, i * p + j)]
    stages["D7"] = d6.submatrix(idx, idx)
    return stages
