"""Quotients of free graded-commutative algebras by monomial rewrite rules."""
import functools
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Set, Tuple

from sympy.polys.monomials import monomial_divides, monomial_ldiv

from src import config
from src.exceptions import PresentationDivergesError, ValidationError
from .graded import Element, GeneratorSpec, GradedAlgebra, Monomial, Terms, add_into
from .scalars import RingTag

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RewriteRule:
    """lhs -> rhs; any monomial divisible by lhs is rewritten."""

    lhs: Monomial
    rhs: Tuple[Tuple[Monomial, Any], ...] = ()

    @classmethod
    def of(cls, lhs: Monomial, rhs: Optional[Mapping[Monomial, Any]] = None) -> "RewriteRule":
        return cls(lhs, tuple(sorted((m, c) for m, c in (rhs or {}).items() if c)))

    @property
    def rhs_terms(self) -> Terms:
        return dict(self.rhs)


@dataclass(frozen=True)
class TorsionRule:
    """Coefficients of monomials containing `pattern` live in Z/modulus."""

    modulus: int
    pattern: str


class _RewriteState:
    __slots__ = ("steps", "guard", "active", "done")

    def __init__(self, guard: int) -> None:
        self.steps = 0
        self.guard = guard
        self.active: Set[Monomial] = set()
        self.done: Dict[Monomial, Terms] = {}


class _Frame:
    """A monomial being rewritten: summands still to reduce, and the partial normal form."""

    __slots__ = ("monomial", "coeff", "pending", "acc")

    def __init__(self, monomial: Monomial, coeff: Any, pending: List[Tuple[Monomial, Any]]) -> None:
        self.monomial = monomial
        self.coeff = coeff
        self.pending = pending
        self.acc: Terms = {}


class PresentedAlgebra(GradedAlgebra):
    """A free graded-commutative algebra modulo rewrite and torsion rules.

    Rules are applied in list order; ``validate`` checks the load-time
    invariants (homogeneity, coprime leading monomials, bounded degree-0
    generators, sign-uniform degrees) and is run by every catalog builder.
    """

    def __init__(
        self,
        generators: Sequence[GeneratorSpec],
        ring: RingTag,
        rewrites: Sequence[RewriteRule] = (),
        torsions: Sequence[TorsionRule] = (),
        name: str = "",
    ) -> None:
        super().__init__(generators, ring, name)
        self.rewrites: Tuple[RewriteRule, ...] = tuple(rewrites)
        self.torsions: Tuple[TorsionRule, ...] = tuple(torsions)
        for t in self.torsions:
            if t.pattern not in self.index:
                raise ValidationError(f"Torsion pattern '{t.pattern}' is not a generator")
        self._torsion_index = tuple((self.index[t.pattern], t.modulus) for t in self.torsions)
        self.bounded: Dict[int, int] = {}
        self.inverse_of: Dict[int, int] = {}
        for rule in self.rewrites:
            support = [i for i, e in enumerate(rule.lhs) if e]
            if len(support) == 1:
                self.bounded.setdefault(support[0], rule.lhs[support[0]])
            elif self._is_laurent_rule(rule, support):
                i, j = support
                self.inverse_of[i] = j
                self.inverse_of[j] = i
        self.validated = False
        size = config.get_cache_size()
        self._monomial_normal_form = functools.lru_cache(maxsize=size)(self._reduce)
        self._monomial_product = functools.lru_cache(maxsize=size)(self._free_product_normal_form)

    def _is_laurent_rule(self, rule: RewriteRule, support: List[int]) -> bool:
        if len(support) != 2 or any(rule.lhs[i] != 1 or self.degrees[i] != 0 for i in support):
            return False
        return rule.rhs_terms == {self.unit: self.domain.one}

    @property
    def laurent(self) -> Set[int]:
        return set(self.inverse_of)

    @property
    def is_finite_in_each_degree(self) -> bool:
        return not self.inverse_of

    # --- Validation -------------------------------------------------------

    def validate(self) -> "PresentedAlgebra":
        label = self.name or "algebra"
        if self.ring is not RingTag.GF2:
            for g in self.generators:
                if g.is_odd and not g.is_exterior:
                    raise ValidationError(
                        f"{label}: odd generator '{g.name}' must be exterior over {self.ring.value}")
        for rule in self.rewrites:
            if rule.lhs == self.unit:
                raise ValidationError(f"{label}: rule with unit leading monomial")
            if self.is_free_zero(rule.lhs):
                raise ValidationError(f"{label}: leading monomial {self.format_monomial(rule.lhs)} is already zero")
            d = self.monomial_degree(rule.lhs)
            for m, _ in rule.rhs:
                if self.monomial_degree(m) != d:
                    raise ValidationError(
                        f"{label}: rule {self.format_rule(rule)} is not homogeneous")
        for k, r1 in enumerate(self.rewrites):
            for r2 in self.rewrites[k + 1:]:
                if any(a and b for a, b in zip(r1.lhs, r2.lhs)):
                    raise ValidationError(
                        f"{label}: leading monomials {self.format_monomial(r1.lhs)} and "
                        f"{self.format_monomial(r2.lhs)} are not coprime")
        for i, g in enumerate(self.generators):
            if g.degree == 0 and not g.is_exterior and i not in self.bounded and i not in self.inverse_of:
                raise ValidationError(
                    f"{label}: degree-0 generator '{g.name}' has no exponent-bounding rule")
        signs = {1 if d > 0 else -1 for d in self.degrees if d != 0}
        if len(signs) > 1:
            raise ValidationError(f"{label}: nonzero generator degrees must share one sign")
        for t in self.torsions:
            if self.ring is not RingTag.INTEGERS:
                raise ValidationError(f"{label}: torsion rules need integer coefficients")
            if t.modulus < 2:
                raise ValidationError(f"{label}: torsion modulus must be at least 2")
        self.validated = True
        return self

    # --- Rewriting --------------------------------------------------------

    def rule_for(self, m: Monomial) -> Optional[RewriteRule]:
        for rule in self.rewrites:
            if monomial_divides(rule.lhs, m):
                return rule
        return None

    def is_normal(self, m: Monomial) -> bool:
        return not self.is_free_zero(m) and self.rule_for(m) is None

    def apply_rule(self, m: Monomial, rule: RewriteRule) -> Terms:
        """One rewrite step at m = q*lhs; the result is not normalized."""
        q = monomial_ldiv(m, rule.lhs)
        parity = self.koszul_parity(q, rule.lhs)
        out = self.mul_terms_free({q: self.domain.one}, rule.rhs_terms)
        if parity:
            out = {k: -c for k, c in out.items()}
        return out

    def torsion_modulus(self, m: Monomial) -> Optional[int]:
        for i, modulus in self._torsion_index:
            if m[i]:
                return modulus
        return None

    def torsion_moduli(self, m: Monomial) -> List[int]:
        """Every modulus n with n*m = 0."""
        return [modulus for i, modulus in self._torsion_index if m[i]]

    def _apply_torsion(self, terms: Terms) -> Terms:
        if not self._torsion_index:
            return {m: c for m, c in terms.items() if c}
        out: Terms = {}
        for m, c in terms.items():
            modulus = self.torsion_modulus(m)
            if modulus is not None:
                c = self.ring.reduce(c, modulus)
            if c:
                out[m] = c
        return out

    def _open(self, m: Monomial, coeff: Any, state: _RewriteState) -> Any:
        """Normal form of m if no rule applies, otherwise a frame holding one rewrite step."""
        if self.is_free_zero(m):
            return {}
        rule = self.rule_for(m)
        if rule is None:
            return self._apply_torsion({m: self.domain.one})
        if m in state.active:
            logger.warning("Rewrite cycle at %s in %s", self.format_monomial(m), self.name)
            raise PresentationDivergesError(
                f"Rewriting revisits {self.format_monomial(m)} in {self.name or 'algebra'}")
        state.steps += 1
        if state.steps > state.guard:
            logger.warning("Rewrite guard of %d steps exceeded in %s", state.guard, self.name)
            raise PresentationDivergesError(
                f"Rewriting exceeded {state.guard} steps in {self.name or 'algebra'}")
        state.active.add(m)
        return _Frame(m, coeff, list(self.apply_rule(m, rule).items()))

    def _reduce(self, root: Monomial) -> Terms:
        """Normal form of one monomial; depth is bounded only by the step guard."""
        state = _RewriteState(config.get_step_guard())
        opened = self._open(root, self.domain.one, state)
        if not isinstance(opened, _Frame):
            return opened
        stack = [opened]
        result: Terms = {}
        while stack:
            frame = stack[-1]
            if frame.pending:
                m, c = frame.pending.pop()
                known = state.done.get(m)
                if known is None:
                    child = self._open(m, c, state)
                    if isinstance(child, _Frame):
                        stack.append(child)
                        continue
                    known = state.done[m] = child
                for m2, c2 in known.items():
                    add_into(frame.acc, m2, c * c2)
                continue
            stack.pop()
            state.active.discard(frame.monomial)
            result = state.done[frame.monomial] = self._apply_torsion(frame.acc)
            if stack:
                parent = stack[-1].acc
                for m2, c2 in result.items():
                    add_into(parent, m2, frame.coeff * c2)
        return result

    def normalize_terms(self, terms: Mapping[Monomial, Any]) -> Terms:
        acc: Terms = {}
        for m, c in terms.items():
            if not c:
                continue
            for m2, c2 in self._monomial_normal_form(m).items():
                add_into(acc, m2, c * c2)
        return self._apply_torsion(acc)

    def normal_form(self, e: Element) -> Element:
        return Element(self, self.normalize_terms(e.terms))

    def _free_product_normal_form(self, m1: Monomial, m2: Monomial) -> Terms:
        return self.normalize_terms(self.mul_terms_free({m1: self.domain.one}, {m2: self.domain.one}))

    def product_of_monomials(self, m1: Monomial, m2: Monomial) -> Terms:
        """Normal form of m1*m2, memoized."""
        return self._monomial_product(m1, m2)

    def multiply_terms(self, t1: Mapping[Monomial, Any], t2: Mapping[Monomial, Any]) -> Terms:
        acc: Terms = {}
        for m1, c1 in t1.items():
            for m2, c2 in t2.items():
                c = c1 * c2
                for m, cm in self.product_of_monomials(m1, m2).items():
                    add_into(acc, m, c * cm)
        return self._apply_torsion(acc)

    # --- Display and serialization ----------------------------------------

    def format_monomial(self, m: Monomial) -> str:
        parts = []
        for i, (name, e) in enumerate(zip(self.names, m)):
            if not e:
                continue
            partner = self.inverse_of.get(i)
            if partner is not None and partner < i:
                parts.append(f"{self.names[partner]}^-{e}")
            elif e == 1:
                parts.append(name)
            else:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def format_rule(self, rule: RewriteRule) -> str:
        return f"{self.format_monomial(rule.lhs)} -> {self.format_terms(rule.rhs_terms)}"

    def describe(self) -> List[str]:
        lines = [f"ring: {self.ring.value}"]
        lines.append("generators: " + ", ".join(
            f"{g.name} (degree {g.degree}{', exterior' if g.is_exterior else ''})" for g in self.generators))
        for rule in self.rewrites:
            lines.append(f"rule: {self.format_rule(rule)}")
        for t in self.torsions:
            lines.append(f"torsion: {t.modulus}*{t.pattern} = 0")
        return lines

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "ring": self.ring.value,
            "generators": [g.to_dict() for g in self.generators],
            "rewrites": [
                {"lhs": self.monomial_to_dict(r.lhs), "rhs": self.terms_to_json(r.rhs_terms)}
                for r in self.rewrites
            ],
            "torsions": [{"modulus": t.modulus, "pattern": t.pattern} for t in self.torsions],
        }

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "PresentedAlgebra":
        try:
            ring = RingTag(obj["ring"])
            generators = [GeneratorSpec.from_dict(g) for g in obj["generators"]]
        except (KeyError, ValueError) as e:
            raise ValidationError(f"Invalid algebra description: {e}")
        free = GradedAlgebra(generators, ring)
        rewrites = [
            RewriteRule.of(free.monomial_from_dict(r["lhs"]), free.terms_from_json(r.get("rhs", [])))
            for r in obj.get("rewrites", [])
        ]
        torsions = [TorsionRule(int(t["modulus"]), str(t["pattern"])) for t in obj.get("torsions", [])]
        return cls(generators, ring, rewrites, torsions, name=str(obj.get("name", "")))


def normal_form(e: Element, algebra: PresentedAlgebra) -> Element:
    if e.algebra is not algebra and e.algebra.names != algebra.names:
        raise ValidationError("Element is not over the algebra's generators")
    return Element(algebra, algebra.normalize_terms(e.terms))
