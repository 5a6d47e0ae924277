"""Free graded-commutative algebras on a finite, ordered generator list.

Monomials are exponent tuples aligned with the generator list; the list order
is the canonical factor order and fixes every Koszul sign.
"""
import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.monomials import monomial_mul

from src.exceptions import AlgebraMismatchError, ValidationError
from .base import Serializable
from .scalars import RingTag, Scalar

Monomial = Tuple[int, ...]
Terms = Dict[Monomial, Any]

IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class GeneratorKind(str, Enum):
    POLYNOMIAL = "polynomial"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class GeneratorSpec(Serializable):
    name: str
    degree: int
    kind: GeneratorKind = GeneratorKind.POLYNOMIAL

    @property
    def is_exterior(self) -> bool:
        return self.kind is GeneratorKind.EXTERIOR

    @property
    def is_odd(self) -> bool:
        return self.degree % 2 != 0

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "degree": self.degree, "kind": self.kind.value}

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "GeneratorSpec":
        try:
            return cls(str(obj["name"]), int(obj["degree"]), GeneratorKind(obj.get("kind", "polynomial")))
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"Invalid generator spec {obj}: {e}")


def add_into(acc: Terms, key, value) -> None:
    """acc[key] += value, dropping the key when the sum vanishes."""
    total = acc.get(key)
    total = value if total is None else total + value
    if total:
        acc[key] = total
    else:
        acc.pop(key, None)


class GradedAlgebra:
    """Free graded-commutative algebra over Z, Q or GF(2)."""

    def __init__(self, generators: Sequence[GeneratorSpec], ring: RingTag, name: str = "") -> None:
        names = [g.name for g in generators]
        if len(set(names)) != len(names):
            raise ValidationError(f"Generator names must be unique: {names}")
        for g in generators:
            if not IDENTIFIER.match(g.name):
                raise ValidationError(f"Generator name {g.name!r} is not an identifier")
        self.generators: Tuple[GeneratorSpec, ...] = tuple(generators)
        self.ring = ring
        self.domain = ring.domain
        self.name = name
        self.names: Tuple[str, ...] = tuple(names)
        self.index: Dict[str, int] = {n: i for i, n in enumerate(names)}
        self.degrees: Tuple[int, ...] = tuple(g.degree for g in generators)
        self.unit: Monomial = (0,) * len(generators)
        self._odd = tuple(i for i, g in enumerate(generators) if g.is_odd)
        self._exterior = tuple(i for i, g in enumerate(generators) if g.is_exterior)

    def __len__(self) -> int:
        return len(self.generators)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name or '?'}, {list(self.names)}, {self.ring.value})"

    # --- Monomials ------------------------------------------------------

    def monomial(self, exponents: Optional[Mapping[str, int]] = None, **kwargs: int) -> Monomial:
        exps = [0] * len(self.generators)
        for name, e in {**(exponents or {}), **kwargs}.items():
            if name not in self.index:
                raise ValidationError(f"Unknown generator '{name}'")
            if e < 0:
                raise ValidationError(f"Negative exponent for '{name}'")
            exps[self.index[name]] += int(e)
        return tuple(exps)

    def generator_monomial(self, i: int, power: int = 1) -> Monomial:
        exps = [0] * len(self.generators)
        exps[i] = power
        return tuple(exps)

    def monomial_degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def word_length(self, m: Monomial) -> int:
        return sum(m)

    def is_free_zero(self, m: Monomial) -> bool:
        return any(m[i] > 1 for i in self._exterior)

    def koszul_parity(self, m1: Monomial, m2: Monomial) -> int:
        """Parity of the sign collected moving the factors of m2 past those of m1."""
        if self.ring is RingTag.GF2:
            return 0
        parity = 0
        seen = 0
        for i in self._odd:
            parity += m1[i] * seen
            seen += m2[i]
        return parity & 1

    def monomial_product(self, m1: Monomial, m2: Monomial) -> Optional[Tuple[int, Monomial]]:
        """Free product of two monomials as (sign parity, monomial), or None when zero."""
        prod = monomial_mul(m1, m2)
        if self.is_free_zero(prod):
            return None
        return self.koszul_parity(m1, m2), prod

    def format_monomial(self, m: Monomial) -> str:
        parts = []
        for name, e in zip(self.names, m):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def monomial_to_dict(self, m: Monomial) -> Dict[str, int]:
        return {name: e for name, e in zip(self.names, m) if e}

    def monomial_from_dict(self, obj: Mapping[str, int]) -> Monomial:
        return self.monomial(obj)

    # --- Terms ------------------------------------------------------------

    def mul_terms_free(self, t1: Mapping[Monomial, Any], t2: Mapping[Monomial, Any]) -> Terms:
        out: Terms = {}
        for m1, c1 in t1.items():
            for m2, c2 in t2.items():
                res = self.monomial_product(m1, m2)
                if res is None:
                    continue
                parity, m = res
                c = c1 * c2
                add_into(out, m, -c if parity else c)
        return out

    def normalize_terms(self, terms: Mapping[Monomial, Any]) -> Terms:
        return {m: c for m, c in terms.items() if c}

    def multiply_terms(self, t1: Mapping[Monomial, Any], t2: Mapping[Monomial, Any]) -> Terms:
        return self.mul_terms_free(t1, t2)

    # --- Elements ---------------------------------------------------------

    def element(self, terms: Optional[Mapping[Monomial, Any]] = None) -> "Element":
        return Element(self, terms)

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return Element(self, {self.unit: self.domain.one})

    def gen(self, name: str, power: int = 1) -> "Element":
        return Element(self, self.normalize_terms({self.monomial({name: power}): self.domain.one}))

    def scalar(self, value: Union[int, str, Scalar]) -> "Element":
        c = value.value if isinstance(value, Scalar) else self.ring.convert(value)
        return Element(self, {self.unit: c})

    def format_terms(self, terms: Mapping[Monomial, Any]) -> str:
        return format_linear(self.ring, [(c, self.format_monomial(m)) for m, c in sorted(terms.items())])

    def terms_to_json(self, terms: Mapping[Monomial, Any]) -> List[Dict[str, Any]]:
        return [
            {"monomial": self.monomial_to_dict(m), "coeff": self.ring.to_json(c)}
            for m, c in sorted(terms.items())
        ]

    def terms_from_json(self, items: Iterable[Mapping[str, Any]]) -> Terms:
        out: Terms = {}
        for item in items:
            try:
                m = self.monomial_from_dict(item["monomial"])
                c = self.ring.from_json(item["coeff"])
            except (KeyError, TypeError) as e:
                raise ValidationError(f"Invalid term {item}: {e}")
            add_into(out, m, c)
        return out


def format_linear(ring: RingTag, items: Sequence[Tuple[Any, str]]) -> str:
    """Render sum(c * body) as `3*x^3 - y`; a body of "1" absorbs its coefficient."""
    if not items:
        return "0"
    pieces: List[str] = []
    for k, (c, body) in enumerate(items):
        text = ring.format(c)
        negative = text.startswith("-")
        magnitude = text[1:] if negative else text
        if body == "1" or body.startswith("1 "):
            rendered = body if magnitude == "1" else magnitude + body[1:]
        elif magnitude == "1":
            rendered = body
        else:
            rendered = f"{magnitude}*{body}"
        if k == 0:
            pieces.append(f"-{rendered}" if negative else rendered)
        else:
            pieces.append(f" - {rendered}" if negative else f" + {rendered}")
    return "".join(pieces)


class Element(Serializable):
    """Sparse linear combination of monomials; zero coefficients are never stored."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: GradedAlgebra, terms: Optional[Mapping[Monomial, Any]] = None) -> None:
        self.algebra = algebra
        self.terms: Terms = {m: c for m, c in (terms or {}).items() if c}

    def _check(self, other: "Element") -> None:
        if not isinstance(other, Element) or other.algebra is not self.algebra:
            raise AlgebraMismatchError()

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            add_into(out, m, c)
        return Element(self.algebra, self.algebra.normalize_terms(out))

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __neg__(self) -> "Element":
        return Element(self.algebra, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other: Union["Element", Scalar, int]) -> "Element":
        if isinstance(other, Element):
            self._check(other)
            return Element(self.algebra, self.algebra.multiply_terms(self.terms, other.terms))
        return self.scale(other)

    def __rmul__(self, other: Union[Scalar, int]) -> "Element":
        return self.scale(other)

    def scale(self, factor: Union[Scalar, int, Any]) -> "Element":
        if isinstance(factor, Scalar):
            if factor.tag is not self.algebra.ring:
                raise AlgebraMismatchError(f"Scalar over {factor.tag.value} used in a {self.algebra.ring.value} algebra")
            c = factor.value
        else:
            c = self.algebra.ring.convert(factor)
        return Element(self.algebra, self.algebra.normalize_terms({m: c * v for m, v in self.terms.items()}))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return other.algebra is self.algebra and other.terms == self.terms

    __hash__ = None

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, m: Monomial) -> Scalar:
        return Scalar(self.algebra.ring, self.terms.get(m, self.algebra.domain.zero))

    def degree_of(self) -> Union[int, str]:
        """Common degree of all monomials, "mixed" otherwise, "any" for zero."""
        degrees = {self.algebra.monomial_degree(m) for m in self.terms}
        if not degrees:
            return "any"
        if len(degrees) > 1:
            return "mixed"
        return degrees.pop()

    def is_homogeneous(self) -> bool:
        return self.degree_of() != "mixed"

    def homogeneous_components(self) -> Dict[int, "Element"]:
        parts: Dict[int, Terms] = {}
        for m, c in self.terms.items():
            parts.setdefault(self.algebra.monomial_degree(m), {})[m] = c
        return {d: Element(self.algebra, t) for d, t in sorted(parts.items())}

    def to_dict(self) -> Dict[str, Any]:
        return {"terms": self.algebra.terms_to_json(self.terms)}

    def __str__(self) -> str:
        return self.algebra.format_terms(self.terms)

    def __repr__(self) -> str:
        return f"Element({self})"


def koszul_sign(m1: Monomial, m2: Monomial, algebra: GradedAlgebra) -> Scalar:
    return Scalar(algebra.ring, algebra.ring.sign(algebra.koszul_parity(m1, m2)))


def mul_free(e1: Element, e2: Element) -> Element:
    """Product in the free algebra, ignoring any relations of a quotient."""
    e1._check(e2)
    return Element(e1.algebra, e1.algebra.mul_terms_free(e1.terms, e2.terms))


def add(e1: Element, e2: Element) -> Element:
    return e1 + e2


def scale(factor: Scalar, e: Element) -> Element:
    return e.scale(factor)


def degree_of(e: Element) -> Union[int, str]:
    return e.degree_of()
