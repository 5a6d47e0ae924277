"""Tensor products A (x) B of presented algebras with the Koszul product."""
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from src.exceptions import AlgebraMismatchError
from .graded import Element, Monomial, add_into, format_linear
from .presented import PresentedAlgebra
from .scalars import Scalar

TensorKey = Tuple[Monomial, Monomial]
TensorTerms = Dict[TensorKey, Any]


def tensor_multiply(left: PresentedAlgebra, right: PresentedAlgebra,
                    t1: Mapping[TensorKey, Any], t2: Mapping[TensorKey, Any]) -> TensorTerms:
    """(a (x) x)(a' (x) x') = (-1)^(|x||a'|) aa' (x) xx', both slots normalized."""
    acc: TensorTerms = {}
    for (a, x), c1 in t1.items():
        x_odd = right.monomial_degree(x) % 2
        for (a2, x2), c2 in t2.items():
            c = c1 * c2
            if x_odd and left.monomial_degree(a2) % 2:
                c = -c
            lefts = left.product_of_monomials(a, a2)
            if not lefts:
                continue
            rights = right.product_of_monomials(x, x2)
            for l, cl in lefts.items():
                for r, cr in rights.items():
                    add_into(acc, (l, r), c * cl * cr)
    return reduce_tensor_torsion(left, right, acc)


def reduce_tensor_torsion(left: PresentedAlgebra, right: PresentedAlgebra,
                          terms: Mapping[TensorKey, Any]) -> TensorTerms:
    if not left.torsions and not right.torsions:
        return {k: c for k, c in terms.items() if c}
    out: TensorTerms = {}
    for (a, x), c in terms.items():
        modulus = left.torsion_modulus(a) or right.torsion_modulus(x)
        if modulus is not None:
            c = left.ring.reduce(c, modulus)
        if c:
            out[(a, x)] = c
    return out


class TensorElement:
    """Sparse element of left (x) right; both slots are kept in normal form."""

    __slots__ = ("left", "right", "terms")

    def __init__(self, left: PresentedAlgebra, right: PresentedAlgebra,
                 terms: Optional[Mapping[TensorKey, Any]] = None) -> None:
        if left.ring is not right.ring:
            raise AlgebraMismatchError("Tensor factors must share a coefficient ring")
        self.left = left
        self.right = right
        self.terms: TensorTerms = {k: c for k, c in (terms or {}).items() if c}

    def _make(self, terms: Mapping[TensorKey, Any]) -> "TensorElement":
        return TensorElement(self.left, self.right, terms)

    @staticmethod
    def of(a: Element, x: Element) -> "TensorElement":
        return TensorElement(a.algebra, x.algebra,
                             reduce_tensor_torsion(a.algebra, x.algebra, pure_tensor_terms(a, x)))

    @property
    def ring(self):
        return self.left.ring

    def _check(self, other: "TensorElement") -> None:
        if not isinstance(other, TensorElement) or other.left is not self.left or other.right is not self.right:
            raise AlgebraMismatchError("Tensor elements over different algebras")

    def __add__(self, other: "TensorElement") -> "TensorElement":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            add_into(out, k, c)
        return self._make(reduce_tensor_torsion(self.left, self.right, out))

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def __neg__(self) -> "TensorElement":
        return self._make(reduce_tensor_torsion(self.left, self.right, {k: -c for k, c in self.terms.items()}))

    def __mul__(self, other: Union["TensorElement", Scalar, int]) -> "TensorElement":
        if isinstance(other, TensorElement):
            self._check(other)
            return self._make(tensor_multiply(self.left, self.right, self.terms, other.terms))
        return self.scale(other)

    def __rmul__(self, other: Union[Scalar, int]) -> "TensorElement":
        return self.scale(other)

    def scale(self, factor: Union[Scalar, int, Any]) -> "TensorElement":
        c = factor.value if isinstance(factor, Scalar) else self.ring.convert(factor)
        return self._make(reduce_tensor_torsion(
            self.left, self.right, {k: c * v for k, v in self.terms.items()}))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return other.left is self.left and other.right is self.right and other.terms == self.terms

    __hash__ = None

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def term_degree(self, key: TensorKey) -> int:
        a, x = key
        return self.left.monomial_degree(a) + self.right.monomial_degree(x)

    def degree_of(self) -> Union[int, str]:
        degrees = {self.term_degree(k) for k in self.terms}
        if not degrees:
            return "any"
        if len(degrees) > 1:
            return "mixed"
        return degrees.pop()

    def is_homogeneous(self) -> bool:
        return self.degree_of() != "mixed"

    def homogeneous_components(self) -> Dict[int, "TensorElement"]:
        parts: Dict[int, TensorTerms] = {}
        for k, c in self.terms.items():
            parts.setdefault(self.term_degree(k), {})[k] = c
        return {d: self._make(t) for d, t in sorted(parts.items())}

    def swap(self) -> "TensorElement":
        """tau(a (x) x) = (-1)^(|a||x|) x (x) a."""
        out: TensorTerms = {}
        for (a, x), c in self.terms.items():
            if self.left.monomial_degree(a) % 2 and self.right.monomial_degree(x) % 2:
                c = -c
            out[(x, a)] = c
        return TensorElement(self.right, self.left, out)

    def to_dict(self):
        return {
            "terms": [
                {
                    "left": self.left.monomial_to_dict(a),
                    "right": self.right.monomial_to_dict(x),
                    "coeff": self.ring.to_json(c),
                }
                for (a, x), c in sorted(self.terms.items())
            ]
        }

    def __str__(self) -> str:
        items = [
            (c, f"{self.left.format_monomial(a)} (x) {self.right.format_monomial(x)}")
            for (a, x), c in sorted(self.terms.items())
        ]
        return format_linear(self.ring, items)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"


class TensorSquareElement(TensorElement):
    """Element of A (x) A, the target of a coproduct."""

    __slots__ = ()

    def __init__(self, algebra: PresentedAlgebra, terms: Optional[Mapping[TensorKey, Any]] = None) -> None:
        super().__init__(algebra, algebra, terms)

    @property
    def algebra(self) -> PresentedAlgebra:
        return self.left

    def _make(self, terms: Mapping[TensorKey, Any]) -> "TensorSquareElement":
        return TensorSquareElement(self.left, terms)

    def swap(self) -> "TensorSquareElement":
        return TensorSquareElement(self.left, super().swap().terms)


def pure_tensor_terms(a: Element, x: Element) -> TensorTerms:
    out: TensorTerms = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in x.terms.items():
            add_into(out, (m1, m2), c1 * c2)
    return out
