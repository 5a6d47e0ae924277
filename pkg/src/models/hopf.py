"""Hopf data on presented algebras: coproduct, counit, suspension, operators."""
import functools
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from src import config
from src.exceptions import ValidationError
from .base import Serializable
from .graded import Element, Monomial, Terms, add_into
from .presented import PresentedAlgebra
from .scalars import RingTag, Scalar
from .tensor import TensorSquareElement, TensorTerms, tensor_multiply

logger = logging.getLogger(__name__)

Coordinates = Dict[str, Any]


@dataclass(frozen=True)
class Primitive(Serializable):
    name: str
    degree: int
    torsion: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"name": self.name, "degree": self.degree}
        if self.torsion is not None:
            out["torsion"] = self.torsion
        return out

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "Primitive":
        torsion = obj.get("torsion")
        return cls(str(obj["name"]), int(obj["degree"]), int(torsion) if torsion is not None else None)


class PrimitiveBasis(Serializable):
    """Ordered primitives of the base homology; the dual pairing is coordinate extraction."""

    def __init__(self, primitives: Sequence[Primitive]) -> None:
        names = [p.name for p in primitives]
        if len(set(names)) != len(names):
            raise ValidationError(f"Primitive names must be unique: {names}")
        self.primitives: Tuple[Primitive, ...] = tuple(primitives)
        self.index = {p.name: i for i, p in enumerate(self.primitives)}

    def __iter__(self) -> Iterator[Primitive]:
        return iter(self.primitives)

    def __len__(self) -> int:
        return len(self.primitives)

    def __contains__(self, name: str) -> bool:
        return name in self.index

    def get(self, name: str) -> Primitive:
        return self.primitives[self.index[name]]

    @property
    def names(self) -> List[str]:
        return [p.name for p in self.primitives]

    def odd(self) -> List[Primitive]:
        return [p for p in self.primitives if p.degree % 2]

    @property
    def has_torsion(self) -> bool:
        return any(p.torsion is not None for p in self.primitives)

    def reduce(self, ring: RingTag, coords: Mapping[str, Any]) -> Coordinates:
        out: Coordinates = {}
        for name in self.names:
            c = coords.get(name)
            if not c:
                continue
            torsion = self.get(name).torsion
            if torsion is not None:
                c = ring.reduce(c, torsion)
            if c:
                out[name] = c
        return out

    def pairing(self, name: str, coords: Mapping[str, Any], ring: RingTag):
        """<p^name, v> for a coordinate vector v."""
        return coords.get(name, ring.zero)

    def to_dict(self):
        return [p.to_dict() for p in self.primitives]


class HopfStructure:
    """Coproduct and counit given on generators, extended multiplicatively."""

    def __init__(self, algebra: PresentedAlgebra,
                 coproducts: Mapping[str, Mapping[Tuple[Monomial, Monomial], Any]],
                 counits: Mapping[str, Any]) -> None:
        self.algebra = algebra
        self._gen_coproducts: Dict[int, TensorTerms] = {}
        self._gen_counits: Dict[int, Any] = {}
        for name, terms in coproducts.items():
            if name not in algebra.index:
                raise ValidationError(f"Coproduct given for unknown generator '{name}'")
            self._gen_coproducts[algebra.index[name]] = {k: c for k, c in terms.items() if c}
        for name, value in counits.items():
            if name not in algebra.index:
                raise ValidationError(f"Counit given for unknown generator '{name}'")
            self._gen_counits[algebra.index[name]] = algebra.ring.convert(value)
        self._coproduct = functools.lru_cache(maxsize=config.get_cache_size())(self._monomial_coproduct)

    @property
    def ring(self) -> RingTag:
        return self.algebra.ring

    def generator_coproduct(self, name: str) -> TensorSquareElement:
        return TensorSquareElement(self.algebra, self._gen_coproducts.get(self.algebra.index[name], {}))

    def generator_counit(self, name: str) -> Scalar:
        return Scalar(self.ring, self._gen_counits.get(self.algebra.index[name], self.ring.zero))

    def coproduct_terms(self, m: Monomial) -> TensorTerms:
        return self._coproduct(m)

    def _monomial_coproduct(self, m: Monomial) -> TensorTerms:
        A = self.algebra
        acc: TensorTerms = {(A.unit, A.unit): A.domain.one}
        for i, e in enumerate(m):
            if not e:
                continue
            if i not in self._gen_coproducts:
                raise ValidationError(f"Generator '{A.names[i]}' has no coproduct")
            for _ in range(e):
                acc = tensor_multiply(A, A, acc, self._gen_coproducts[i])
        return acc

    def coproduct_of_terms(self, terms: Mapping[Monomial, Any]) -> TensorTerms:
        acc: TensorTerms = {}
        for m, c in terms.items():
            for k, ck in self.coproduct_terms(m).items():
                add_into(acc, k, c * ck)
        return acc

    def coproduct(self, e: Element) -> TensorSquareElement:
        return TensorSquareElement(self.algebra, self.coproduct_of_terms(e.terms))

    def counit_of_monomial(self, m: Monomial):
        value = self.ring.one
        for i, e in enumerate(m):
            if e:
                value = value * self._gen_counits.get(i, self.ring.zero) ** e
        return value

    def counit_of_terms(self, terms: Mapping[Monomial, Any]):
        total = self.ring.zero
        for m, c in terms.items():
            total += c * self.counit_of_monomial(m)
        return total

    def counit(self, e: Element) -> Scalar:
        return Scalar(self.ring, self.counit_of_terms(e.terms))

    # --- Load-time checks -------------------------------------------------

    def generator_failures(self) -> List[str]:
        """Counit shape and the counit axiom on every generator."""
        A = self.algebra
        failures = []
        for i, g in enumerate(A.generators):
            if i not in self._gen_coproducts:
                failures.append(f"{g.name}: missing coproduct")
                continue
            eps = self._gen_counits.get(i, self.ring.zero)
            if g.degree != 0 and eps:
                failures.append(f"{g.name}: counit must vanish in nonzero degree")
            if g.degree == 0 and eps not in (self.ring.zero, self.ring.one):
                failures.append(f"{g.name}: counit of a degree-0 generator must be 0 or 1")
            expected = A.normalize_terms({A.generator_monomial(i): A.domain.one})
            left: Terms = {}
            right: Terms = {}
            for (a, x), c in self._gen_coproducts[i].items():
                for m, cm in A.normalize_terms({x: c * self.counit_of_monomial(a)}).items():
                    add_into(left, m, cm)
                for m, cm in A.normalize_terms({a: c * self.counit_of_monomial(x)}).items():
                    add_into(right, m, cm)
            if left != expected or right != expected:
                failures.append(f"{g.name}: counit axiom fails")
        return failures

    def rule_failures(self) -> List[str]:
        A = self.algebra
        failures = []
        for rule in A.rewrites:
            lhs = self.coproduct_terms(rule.lhs)
            rhs = self.coproduct_of_terms(rule.rhs_terms)
            if lhs != rhs:
                failures.append(
                    f"D({A.format_monomial(rule.lhs)}) != D({A.format_terms(rule.rhs_terms)})")
        return failures

    def to_dict(self) -> Dict[str, Any]:
        A = self.algebra
        return {
            "coproducts": {
                A.names[i]: TensorSquareElement(A, t).to_dict()["terms"]
                for i, t in sorted(self._gen_coproducts.items())
            },
            "counits": {A.names[i]: self.ring.to_json(c) for i, c in sorted(self._gen_counits.items())},
        }


class SuspensionMap:
    """Homology suspension as primitive coordinates; sigma(ab) = sigma(a)eps(b) + eps(a)sigma(b)."""

    def __init__(self, hopf: HopfStructure, primitives: PrimitiveBasis,
                 values: Mapping[str, Mapping[str, Any]]) -> None:
        self.hopf = hopf
        self.algebra = hopf.algebra
        self.primitives = primitives
        self._gen_values: Dict[int, Coordinates] = {}
        for name, coords in values.items():
            if name not in self.algebra.index:
                raise ValidationError(f"Suspension given for unknown generator '{name}'")
            for p in coords:
                if p not in primitives:
                    raise ValidationError(f"Suspension of '{name}' names unknown primitive '{p}'")
            self._gen_values[self.algebra.index[name]] = {
                p: self.algebra.ring.convert(c) for p, c in coords.items() if c}
        self._suspension = functools.lru_cache(maxsize=config.get_cache_size())(self._monomial_suspension)

    @property
    def ring(self) -> RingTag:
        return self.algebra.ring

    def suspend_monomial(self, m: Monomial) -> Coordinates:
        return self._suspension(m)

    def _monomial_suspension(self, m: Monomial) -> Coordinates:
        ring = self.ring
        eps = [self.hopf.counit_of_monomial(self.algebra.generator_monomial(i)) for i in range(len(m))]
        acc: Coordinates = {}
        for j, e in enumerate(m):
            if not e or j not in self._gen_values:
                continue
            weight = ring.convert(e) * (eps[j] ** (e - 1) if e > 1 else ring.one)
            for l, el in enumerate(m):
                if l != j and el:
                    weight = weight * eps[l] ** el
            if not weight:
                continue
            for p, c in self._gen_values[j].items():
                add_into(acc, p, weight * c)
        return self.primitives.reduce(ring, acc)

    def suspend_terms(self, terms: Mapping[Monomial, Any]) -> Coordinates:
        acc: Coordinates = {}
        for m, c in terms.items():
            for p, v in self.suspend_monomial(m).items():
                add_into(acc, p, c * v)
        return self.primitives.reduce(self.ring, acc)

    def suspend(self, e: Element) -> Dict[str, Scalar]:
        return {p: Scalar(self.ring, c) for p, c in self.suspend_terms(e.terms).items()}

    def generator_value(self, name: str) -> Coordinates:
        return dict(self._gen_values.get(self.algebra.index[name], {}))

    def degree_failures(self) -> List[str]:
        failures = []
        for i, coords in self._gen_values.items():
            g = self.algebra.generators[i]
            for p in coords:
                if self.primitives.get(p).degree != g.degree + 1:
                    failures.append(f"sigma({g.name}) has a coordinate on {p} of the wrong degree")
        return failures

    def rule_failures(self) -> List[str]:
        A = self.algebra
        failures = []
        for rule in A.rewrites:
            if self.suspend_monomial(rule.lhs) != self.suspend_terms(rule.rhs_terms):
                failures.append(
                    f"sigma({A.format_monomial(rule.lhs)}) != sigma({A.format_terms(rule.rhs_terms)})")
        return failures

    def to_dict(self) -> Dict[str, Any]:
        return {
            self.algebra.names[i]: {p: self.ring.to_json(c) for p, c in coords.items()}
            for i, coords in sorted(self._gen_values.items())
        }


class Operator:
    """Homogeneous linear operator on a presented algebra."""

    kind = "operator"

    def __init__(self, algebra: PresentedAlgebra, degree: int) -> None:
        self.algebra = algebra
        self.degree = degree
        self._applied = functools.lru_cache(maxsize=config.get_cache_size())(self._apply_monomial)

    def _apply_monomial(self, m: Monomial) -> Terms:
        raise NotImplementedError

    def apply_monomial(self, m: Monomial) -> Terms:
        return self._applied(m)

    def apply_terms(self, terms: Mapping[Monomial, Any]) -> Terms:
        acc: Terms = {}
        for m, c in terms.items():
            for m2, c2 in self.apply_monomial(m).items():
                add_into(acc, m2, c * c2)
        return acc

    def torsion_failures(self, values: Mapping[Monomial, Terms]) -> List[str]:
        """n*T(m) has to vanish whenever n*m does."""
        A = self.algebra
        failures = []
        for m, terms in values.items():
            for modulus in A.torsion_moduli(m):
                n = A.ring.convert(modulus)
                if A.normalize_terms({m2: n * c for m2, c in terms.items()}):
                    failures.append(
                        f"{self.kind} of degree {self.degree} sends {A.format_monomial(m)} outside its {modulus}-torsion")
        return failures

    def apply(self, e: Element) -> Element:
        return Element(self.algebra, self.apply_terms(e.terms))

    __call__ = apply


class Derivation(Operator):
    """Graded derivation: d(xy) = d(x)y + (-1)^(|d||x|) x d(y)."""

    kind = "derivation"

    def __init__(self, algebra: PresentedAlgebra, degree: int, values: Mapping[str, Mapping[Monomial, Any]]) -> None:
        super().__init__(algebra, degree)
        self._values: Dict[int, Terms] = {}
        for name, terms in values.items():
            if name not in algebra.index:
                raise ValidationError(f"Derivation value given for unknown generator '{name}'")
            normalized = algebra.normalize_terms(terms)
            if normalized:
                self._values[algebra.index[name]] = normalized

    def value_on(self, name: str) -> Element:
        return Element(self.algebra, self._values.get(self.algebra.index[name], {}))

    def _apply_monomial(self, m: Monomial) -> Terms:
        A = self.algebra
        one = A.domain.one
        acc: Terms = {}
        prefix = [0] * len(m)
        prefix_degree = 0
        for i, e in enumerate(m):
            for _ in range(e):
                value = self._values.get(i)
                if value:
                    suffix = tuple(mi - pi - (1 if k == i else 0) for k, (mi, pi) in enumerate(zip(m, prefix)))
                    head = A.multiply_terms({tuple(prefix): one}, value)
                    whole = A.multiply_terms(head, {suffix: one})
                    sign = A.ring.sign(self.degree * prefix_degree)
                    for m2, c in whole.items():
                        add_into(acc, m2, sign * c)
                prefix[i] += 1
                prefix_degree += A.degrees[i]
        return acc

    def degree_failures(self) -> List[str]:
        A = self.algebra
        failures = []
        for i, terms in self._values.items():
            for m in terms:
                if A.monomial_degree(m) != A.degrees[i] + self.degree:
                    failures.append(f"derivation value on {A.names[i]} has the wrong degree")
        return failures

    def rule_failures(self) -> List[str]:
        """The derivation must send both sides of every rule to the same normal form."""
        A = self.algebra
        failures = []
        for rule in A.rewrites:
            lhs = A.normalize_terms(self._apply_monomial(rule.lhs))
            rhs = A.normalize_terms(self.apply_terms(rule.rhs_terms))
            if lhs != rhs:
                failures.append(f"derivation of degree {self.degree} breaks {A.format_rule(rule)}")
        values = {A.generator_monomial(i): terms for i, terms in self._values.items()}
        return failures + self.torsion_failures(values)

    def to_dict(self) -> Dict[str, Any]:
        A = self.algebra
        return {
            "kind": self.kind,
            "degree": self.degree,
            "values": {A.names[i]: A.terms_to_json(t) for i, t in sorted(self._values.items())},
        }


class ActionTable(Operator):
    """Operator given by explicit values on normal monomials.

    Unlisted normal monomials map to 0; any other monomial is normalized first.
    """

    kind = "table"

    def __init__(self, algebra: PresentedAlgebra, degree: int, values: Mapping[Monomial, Mapping[Monomial, Any]]) -> None:
        super().__init__(algebra, degree)
        self._table: Dict[Monomial, Terms] = {}
        for m, terms in values.items():
            if not algebra.is_normal(m):
                raise ValidationError(f"Action table key {algebra.format_monomial(m)} is not a normal monomial")
            normalized = algebra.normalize_terms(terms)
            if normalized:
                self._table[m] = normalized

    def _apply_monomial(self, m: Monomial) -> Terms:
        A = self.algebra
        if m in self._table or A.is_normal(m):
            return self._table.get(m, {})
        return self.apply_terms(A.normalize_terms({m: A.domain.one}))

    def degree_failures(self) -> List[str]:
        A = self.algebra
        return [
            f"table value on {A.format_monomial(m)} has the wrong degree"
            for m, terms in self._table.items()
            for m2 in terms
            if A.monomial_degree(m2) != A.monomial_degree(m) + self.degree
        ]

    def rule_failures(self) -> List[str]:
        return self.torsion_failures(self._table)

    def to_dict(self) -> Dict[str, Any]:
        A = self.algebra
        return {
            "kind": self.kind,
            "degree": self.degree,
            "values": [
                {"monomial": A.monomial_to_dict(m), "value": A.terms_to_json(t)}
                for m, t in sorted(self._table.items())
            ],
        }


def operator_from_dict(algebra: PresentedAlgebra, obj: Mapping[str, Any]) -> Operator:
    kind = obj.get("kind")
    degree = int(obj["degree"])
    if kind == Derivation.kind:
        return Derivation(algebra, degree, {
            name: algebra.terms_from_json(items) for name, items in obj.get("values", {}).items()})
    if kind == ActionTable.kind:
        return ActionTable(algebra, degree, {
            algebra.monomial_from_dict(row["monomial"]): algebra.terms_from_json(row["value"])
            for row in obj.get("values", [])})
    raise ValidationError(f"Unknown operator kind {kind!r}")


def coproduct(e: Element, hopf: HopfStructure) -> TensorSquareElement:
    return hopf.coproduct(e)


def suspend(e: Element, suspension: SuspensionMap) -> Dict[str, Scalar]:
    return suspension.suspend(e)


def apply_derivation(d: Operator, e: Element) -> Element:
    return d.apply(e)
