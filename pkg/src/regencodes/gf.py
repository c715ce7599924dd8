"""Arithmetic in prime fields GF(q).

Elements are least nonnegative residues. :class:`FieldElement` is the checked,
object-level API; matrices and codecs work on raw ``int64`` residues and only
validate at their boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import FieldDivisionError, FieldMismatchError, NotPrimeError

# Products of two residues must fit in int64 for the vectorised kernels.
MAX_MODULUS = 2**31 - 1


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0 or q % 3 == 0:
        return False
    f = 5
    while f * f <= q:
        if q % f == 0 or q % (f + 2) == 0:
            return False
        f += 6
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field of integers modulo a prime ``q``."""

    q: int

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or isinstance(self.q, bool):
            raise TypeError(f"modulus must be an int, got {type(self.q).__name__}")
        if not is_prime(self.q):
            raise NotPrimeError(f"{self.q} is not prime")
        if self.q > MAX_MODULUS:
            raise NotPrimeError(f"modulus {self.q} exceeds supported maximum {MAX_MODULUS}")

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(int(value) % self.q, self)

    def __repr__(self) -> str:
        return f"GF({self.q})"

    @property
    def zero(self) -> FieldElement:
        return FieldElement(0, self)

    @property
    def one(self) -> FieldElement:
        return FieldElement(1, self)

    def elements(self):
        return (FieldElement(v, self) for v in range(self.q))

    # raw-residue helpers used on hot paths
    def inv_raw(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise FieldDivisionError(f"0 has no inverse in GF({self.q})")
        return pow(a, -1, self.q)

    @cached_property
    def inverse_table(self):
        """Inverse of every residue (index 0 holds 0); built on first use."""
        import numpy as np

        table = np.zeros(self.q, dtype=np.int64)
        for v in range(1, self.q):
            table[v] = pow(v, -1, self.q)
        return table


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"{self.value} is not a residue of {self.field}")

    def _other(self, other: FieldElement | int) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"cannot combine elements of {self.field} and {other.field}")
            return other.value
        if isinstance(other, int):
            return other % self.field.q
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement((self.value + v) % self.field.q, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement((self.value - v) % self.field.q, self.field)

    def __rsub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement((v - self.value) % self.field.q, self.field)

    def __mul__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement((self.value * v) % self.field.q, self.field)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return self * FieldElement(self.field.inv_raw(v), self.field)

    def __rtruediv__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(v, self.field) * self.inverse()

    def __neg__(self) -> FieldElement:
        return FieldElement((-self.value) % self.field.q, self.field)

    def __pow__(self, exponent: int) -> FieldElement:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return FieldElement(pow(self.value, exponent, self.field.q), self.field)

    def inverse(self) -> FieldElement:
        return FieldElement(self.field.inv_raw(self.value), self.field)

    def __int__(self) -> int:
        return self.value

    __index__ = __int__

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.q})"


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def as_field(field: PrimeField | int) -> PrimeField:
    return field if isinstance(field, PrimeField) else PrimeField(int(field))
