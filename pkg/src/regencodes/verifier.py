"""Executable checks for regenerating-code properties.

All checks run on a :class:`LinearCodeView`, i.e. ``n`` nodal generator
matrices of shape ``B x alpha``. MISER and d=k+1 codes convert via
:func:`as_view`; anything else can be wrapped directly.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Sequence
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import BudgetError, ParamsError, ShapeError
from .gf import PrimeField, as_field
from .linalg import MatrixGF, rank_raw
from .params import CodeParams

# Largest number of k-subsets checked exhaustively.
MDS_SUBSET_BUDGET = 20_000


@dataclass(frozen=True, eq=False)
class LinearCodeView:
    params: CodeParams
    generators: tuple[np.ndarray, ...]  # n arrays, each B x alpha
    field: PrimeField

    def __post_init__(self) -> None:
        p = self.params
        if len(self.generators) != p.n:
            raise ShapeError(f"expected {p.n} generators, got {len(self.generators)}")
        for m, g in enumerate(self.generators, start=1):
            if g.shape != (p.B, p.alpha):
                raise ShapeError(f"G^({m}) has shape {g.shape}, expected {(p.B, p.alpha)}")

    @classmethod
    def from_matrices(cls, params: CodeParams, generators: Sequence, field: PrimeField | int) -> LinearCodeView:
        field = as_field(field)
        gens = tuple(
            (g.array if isinstance(g, MatrixGF) else np.asarray(g, dtype=np.int64)) % field.q for g in generators
        )
        return cls(params, gens, field)

    def component(self, node: int, i: int) -> np.ndarray:
        """Rows of ``G^(node)`` belonging to message block ``i`` (both 1-based)."""
        a = self.params.alpha
        return self.generators[node - 1][(i - 1) * a:i * a]


def as_view(code) -> LinearCodeView:
    if isinstance(code, LinearCodeView):
        return code
    gens = getattr(code, "generators", None)
    if gens is None:
        raise TypeError(f"cannot view {type(code).__name__} as a linear code")
    return LinearCodeView.from_matrices(code.params, gens, code.field)


# ---------------------------------------------------------------------------
# parameter arithmetic


def msr_params(n: int, k: int, d: int, beta: int = 1) -> tuple[int, int]:
    """``(alpha, B)`` at the MSR point."""
    if not 1 <= k <= d <= n - 1:
        raise ParamsError(f"need 1 <= k <= d <= n-1, got n={n}, k={k}, d={d}")
    if beta < 1:
        raise ParamsError(f"beta must be positive, got {beta}")
    alpha = beta * (d - k + 1)
    return alpha, k * alpha


def cutset_bound_ok(params: CodeParams) -> bool:
    """``B <= sum_{i<k} min(alpha, (d - i) beta)``."""
    p = params
    return p.B <= sum(min(p.alpha, (p.d - i) * p.beta) for i in range(p.k))


# ---------------------------------------------------------------------------
# MDS property


@dataclass(frozen=True)
class MdsResult:
    ok: bool
    failing_subset: tuple[int, ...] | None
    checked: int
    exhaustive: bool

    def __bool__(self) -> bool:
        return self.ok


def _subset_rank(view: LinearCodeView, subset: Sequence[int]) -> int:
    g = np.hstack([view.generators[m - 1] for m in subset])
    return rank_raw(g, view.field.q)


def verify_mds(
    code,
    budget: int = MDS_SUBSET_BUDGET,
    samples: int | None = None,
    seed: int | None = None,
) -> MdsResult:
    """Check that every ``k`` nodes together have a rank-``B`` generator.

    Exhaustive when ``C(n, k) <= budget``. Beyond that a :class:`BudgetError`
    is raised unless ``samples`` is given, in which case that many subsets
    are drawn with ``random.Random(seed)``.
    """
    view = as_view(code)
    n, k, B = view.params.n, view.params.k, view.params.B
    total = comb(n, k)
    if total <= budget:
        subsets = itertools.combinations(range(1, n + 1), k)
        exhaustive = True
    elif samples is not None:
        rng = random.Random(seed)
        subsets = (tuple(sorted(rng.sample(range(1, n + 1), k))) for _ in range(samples))
        exhaustive = False
    else:
        raise BudgetError(f"C({n},{k}) = {total} subsets exceeds budget {budget}; pass samples= to sample")
    checked = 0
    for subset in subsets:
        checked += 1
        if _subset_rank(view, subset) < B:
            return MdsResult(False, tuple(subset), checked, exhaustive)
    return MdsResult(True, None, checked, exhaustive)


# ---------------------------------------------------------------------------
# structural properties of systematic codes


def check_component_nonsingular(code) -> bool:
    """Every component ``G_i^(m)`` of every parity node is invertible."""
    return not singular_components(code)


def singular_components(code) -> list[tuple[int, int]]:
    """``(node, component)`` pairs whose ``alpha x alpha`` component is singular."""
    view = as_view(code)
    p = view.params
    if p.B != p.k * p.alpha:
        raise ParamsError("component checks need B = k alpha")
    bad = []
    for m in range(p.k + 1, p.n + 1):
        for i in range(1, p.k + 1):
            if rank_raw(view.component(m, i), view.field.q) < p.alpha:
                bad.append((m, i))
    return bad


@dataclass(frozen=True)
class AlignmentReport:
    failed: int
    alpha: int
    component_ranks: tuple[int, ...]  # index i-1 holds the rank of component i

    @property
    def desired_rank(self) -> int:
        return self.component_ranks[self.failed - 1]

    @property
    def interference_ranks(self) -> dict[int, int]:
        return {i + 1: r for i, r in enumerate(self.component_ranks) if i + 1 != self.failed}

    @property
    def passed(self) -> bool:
        return self.desired_rank == self.alpha and all(r <= 1 for r in self.interference_ranks.values())

    def __bool__(self) -> bool:
        return self.passed


def check_alignment(code, failed: int, kernels=None) -> AlignmentReport:
    """Per-component ranks of the ``alpha`` kernels passed by parity helpers.

    ``kernels`` is a ``B x alpha`` matrix whose columns are the global kernels
    of the symbols passed by the parity helpers when repairing systematic
    node ``failed``. For a MISER code they are derived from the code when
    omitted.
    """
    view = as_view(code)
    p = view.params
    if not 1 <= failed <= p.k:
        raise ParamsError(f"failed node must be systematic (1..{p.k}), got {failed}")
    if kernels is None:
        kernels = miser_parity_kernels(code, failed)
    ker = kernels.array if isinstance(kernels, MatrixGF) else np.asarray(kernels, dtype=np.int64)
    if ker.shape[0] != p.B:
        raise ShapeError(f"kernels must have {p.B} rows, got shape {ker.shape}")
    a, q = p.alpha, view.field.q
    ranks = tuple(rank_raw(ker[i * a:(i + 1) * a], q) for i in range(p.k))
    return AlignmentReport(failed, a, ranks)


def miser_parity_kernels(code, failed: int, parity: Sequence[int] | None = None) -> np.ndarray:
    """``B x alpha`` kernels the parity helpers pass to repair ``failed``."""
    from .miser import MiserCode, default_helpers

    if not isinstance(code, MiserCode):
        raise TypeError("kernels can only be derived for MISER codes; pass them explicitly")
    if parity is None:
        parity = [h for h in default_helpers(code, failed) if h > code.k]
    pos = code.repair_position(failed)
    return np.stack([code.kernel(m, pos) for m in parity], axis=1)


def check_passed_vector_independence(code, parity: int, kernels=None) -> bool:
    """Every ``min(k, alpha)`` of the kernels one parity node passes are independent.

    ``kernels`` is ``B x k``: column ``l`` is the kernel passed to repair
    systematic node ``l + 1``. Derived from a MISER code when omitted. For
    ``k < alpha`` (shortened codes) there is no ``alpha``-subset, so the
    whole set of ``k`` vectors is checked instead.
    """
    view = as_view(code)
    p = view.params
    if kernels is None:
        from .miser import MiserCode

        if not isinstance(code, MiserCode):
            raise TypeError("kernels can only be derived for MISER codes; pass them explicitly")
        kernels = np.stack([code.kernel(parity, code.repair_position(l)) for l in range(1, p.k + 1)], axis=1)
    ker = kernels.array if isinstance(kernels, MatrixGF) else np.asarray(kernels, dtype=np.int64)
    size = min(ker.shape[1], p.alpha)
    q = view.field.q
    return all(rank_raw(ker[:, list(s)], q) == size for s in itertools.combinations(range(ker.shape[1]), size))
