"""Regenerating-code parameter sets."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParamsError


@dataclass(frozen=True)
class CodeParams:
    """``[n, k, d]`` with per-helper download ``beta``, node size ``alpha``,
    file size ``B`` (symbols) and field size ``q``.

    Construction does not enforce consistency so that arbitrary tuples can be
    fed to the bound checks; :meth:`msr` builds a consistent MSR tuple and
    :meth:`check_msr` validates one.
    """

    n: int
    k: int
    d: int
    alpha: int
    B: int
    q: int
    beta: int = 1

    @classmethod
    def msr(cls, n: int, k: int, d: int, q: int, beta: int = 1) -> CodeParams:
        if not 1 <= k <= d <= n - 1:
            raise ParamsError(f"need 1 <= k <= d <= n-1, got n={n}, k={k}, d={d}")
        if beta < 1:
            raise ParamsError(f"beta must be positive, got {beta}")
        alpha = beta * (d - k + 1)
        params = cls(n=n, k=k, d=d, alpha=alpha, B=k * alpha, q=q, beta=beta)
        params.check_msr()
        return params

    def check_msr(self) -> None:
        if not 1 <= self.k <= self.d <= self.n - 1:
            raise ParamsError(f"need 1 <= k <= d <= n-1, got {self}")
        if self.alpha != self.beta * (self.d - self.k + 1):
            raise ParamsError(f"MSR requires alpha = beta (d-k+1) = {self.beta * (self.d - self.k + 1)}, got {self.alpha}")
        if self.B != self.k * self.alpha:
            raise ParamsError(f"MSR requires B = k alpha = {self.k * self.alpha}, got {self.B}")

    @property
    def repair_bandwidth(self) -> int:
        return self.d * self.beta
