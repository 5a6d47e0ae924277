"""Exact coefficient rings: the integers, the rationals and GF(2).

Coefficients inside elements are raw sympy domain elements; ``Scalar`` is the
tagged value handed across module boundaries and serialized to JSON.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Union

from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.polyerrors import NotReversible

from src.exceptions import NonInvertibleError, RingMismatchError, ValidationError
from .base import Serializable

_GF2 = GF(2, symmetric=False)


class RingTag(str, Enum):
    INTEGERS = "Z"
    RATIONALS = "Q"
    GF2 = "F2"

    @property
    def domain(self):
        return _DOMAINS[self]

    @property
    def is_field(self) -> bool:
        return self is not RingTag.INTEGERS

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def convert(self, value: Union[int, str, Any]):
        """Coerce an int, a "p/q" string or a domain element into this ring."""
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return self.domain(value)
        return self.domain.convert(value)

    def parse(self, text: str):
        text = text.strip()
        try:
            if "/" in text:
                num, den = (int(p) for p in text.split("/", 1))
                if den == 0:
                    raise ValidationError(f"Zero denominator in scalar {text!r}")
                if self is RingTag.RATIONALS:
                    return QQ(num, den)
                if self is RingTag.GF2 and den % 2 == 1:
                    return _GF2(num)
                if num % den == 0:
                    return self.domain(num // den)
                raise ValidationError(f"{text} is not an element of {self.value}")
            return self.domain(int(text))
        except ValueError:
            raise ValidationError(f"Invalid scalar {text!r} for ring {self.value}")

    def sign(self, parity: int):
        """(-1)^parity as a ring element."""
        return -self.domain.one if parity % 2 else self.domain.one

    def reduce(self, value, modulus: int):
        """Coefficient reduction into [0, modulus) for torsion rules over Z."""
        if self is not RingTag.INTEGERS:
            return value
        return ZZ(int(value) % modulus)

    def format(self, value) -> str:
        if self is RingTag.RATIONALS:
            num, den = int(QQ.numer(value)), int(QQ.denom(value))
            return str(num) if den == 1 else f"{num}/{den}"
        return str(int(value))

    def to_json(self, value) -> Dict[str, Any]:
        if self is RingTag.GF2:
            return {self.value: int(value)}
        return {self.value: self.format(value)}

    def from_json(self, obj: Dict[str, Any]):
        if len(obj) != 1:
            raise ValidationError(f"Scalar JSON must have exactly one key, got {obj}")
        (key, raw), = obj.items()
        if key != self.value:
            raise RingMismatchError(key, self.value)
        if self is RingTag.GF2:
            if raw not in (0, 1):
                raise ValidationError(f"F2 scalar must be 0 or 1, got {raw!r}")
            return _GF2(raw)
        return self.parse(str(raw))


_DOMAINS = {
    RingTag.INTEGERS: ZZ,
    RingTag.RATIONALS: QQ,
    RingTag.GF2: _GF2,
}


@dataclass(frozen=True)
class Scalar(Serializable):
    """A ring-tagged exact value."""

    tag: RingTag
    value: Any

    @classmethod
    def of(cls, tag: RingTag, value: Union[int, str, Any]) -> "Scalar":
        return cls(tag, tag.convert(value))

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> "Scalar":
        if len(obj) != 1:
            raise ValidationError(f"Scalar JSON must have exactly one key, got {obj}")
        key = next(iter(obj))
        try:
            tag = RingTag(key)
        except ValueError:
            raise ValidationError(f"Unknown ring tag {key!r}")
        return cls(tag, tag.from_json(obj))

    def _check(self, other: "Scalar") -> None:
        if self.tag is not other.tag:
            raise RingMismatchError(self.tag.value, other.tag.value)

    def __add__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar(self.tag, self.value + other.value)

    def __sub__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar(self.tag, self.value - other.value)

    def __mul__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar(self.tag, self.value * other.value)

    def __neg__(self) -> "Scalar":
        return Scalar(self.tag, -self.value)

    def inverse(self) -> "Scalar":
        if not self.value:
            raise NonInvertibleError(str(self), self.tag.value)
        try:
            return Scalar(self.tag, self.tag.domain.revert(self.value))
        except (NotReversible, ZeroDivisionError):
            raise NonInvertibleError(str(self), self.tag.value)

    @property
    def is_zero(self) -> bool:
        return not self.value

    @property
    def is_one(self) -> bool:
        return self.value == self.tag.one

    def to_dict(self) -> Dict[str, Any]:
        return self.tag.to_json(self.value)

    def __str__(self) -> str:
        return self.tag.format(self.value)


def add(a: Scalar, b: Scalar) -> Scalar:
    return a + b


def mul(a: Scalar, b: Scalar) -> Scalar:
    return a * b


def inv(a: Scalar) -> Scalar:
    return a.inverse()
