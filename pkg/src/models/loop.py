"""The tensor splitting H(Omega G) (x) H(G), its loop product and the BV operator."""
import functools
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Tuple

from src import config
from src.exceptions import AlgebraMismatchError, ValidationError
from .base import Serializable
from .graded import Element, Monomial, Terms, add_into
from .hopf import Derivation, HopfStructure, Operator, Primitive, PrimitiveBasis, SuspensionMap
from .presented import PresentedAlgebra
from .scalars import RingTag
from .tensor import TensorElement, TensorKey, pure_tensor_terms, reduce_tensor_torsion

logger = logging.getLogger(__name__)


class LoopElement(TensorElement):
    """Element of H(Omega G) (x) H(G) tied to its model."""

    __slots__ = ("model",)

    def __init__(self, model: "LoopModel", terms: Optional[Mapping[TensorKey, Any]] = None) -> None:
        super().__init__(model.omega, model.base, terms)
        self.model = model

    def _make(self, terms: Mapping[TensorKey, Any]) -> "LoopElement":
        return LoopElement(self.model, terms)

    def _check(self, other: TensorElement) -> None:
        if not isinstance(other, LoopElement) or other.model is not self.model:
            raise AlgebraMismatchError("Loop elements belong to different models")


@dataclass(frozen=True, eq=False)
class LoopModel(Serializable):
    model_id: str
    omega: PresentedAlgebra
    hopf: HopfStructure
    suspension: SuspensionMap
    base: PresentedAlgebra
    dim_g: int
    primitives: PrimitiveBasis
    actions: Mapping[str, Operator]
    closed_form_partials: Optional[Mapping[int, Derivation]] = None

    def __post_init__(self) -> None:
        size = config.get_cache_size()
        object.__setattr__(self, "_delta_plan", functools.lru_cache(maxsize=size)(self._build_delta_plan))
        object.__setattr__(self, "_partial", functools.lru_cache(maxsize=size)(self._build_partial))

    @property
    def ring(self) -> RingTag:
        return self.omega.ring

    @property
    def odd_primitives(self) -> List[Primitive]:
        return self.primitives.odd()

    def derivation_path_available(self) -> bool:
        """Field coefficients, or integer coefficients with torsion-free base homology."""
        if self.ring.is_field:
            return True
        return not self.base.torsions and not self.primitives.has_torsion

    # --- Construction helpers -------------------------------------------

    def element(self, terms: Optional[Mapping[TensorKey, Any]] = None) -> LoopElement:
        return LoopElement(self, reduce_tensor_torsion(self.omega, self.base, terms or {}))

    def tensor(self, a: Element, x: Element) -> LoopElement:
        if a.algebra is not self.omega or x.algebra is not self.base:
            raise AlgebraMismatchError("Tensor factors must come from the model's two sides")
        return self.element(pure_tensor_terms(a, x))

    def unit(self) -> LoopElement:
        return self.element({(self.omega.unit, self.base.unit): self.ring.one})

    def lift(self, e: Element) -> LoopElement:
        """Include one side: a -> a (x) 1 or x -> 1 (x) x."""
        if e.algebra is self.omega:
            return self.tensor(e, self.base.one())
        if e.algebra is self.base:
            return self.tensor(self.omega.one(), e)
        raise AlgebraMismatchError("Element belongs to neither side of the model")

    # --- Products and Delta -----------------------------------------------

    def loop_product(self, e1: LoopElement, e2: LoopElement) -> LoopElement:
        if e1.model is not self or e2.model is not self:
            raise AlgebraMismatchError("Loop elements belong to different models")
        return e1 * e2

    def _build_delta_plan(self, a: Monomial) -> Tuple[Tuple[Monomial, Any, Dict[str, Any]], ...]:
        plan = []
        for (a1, a2), c in sorted(self.hopf.coproduct_terms(a).items()):
            coords = self.suspension.suspend_monomial(a2)
            if coords:
                plan.append((a1, c, coords))
        return tuple(plan)

    def _build_partial(self, primitive: str, a: Monomial) -> Terms:
        """sum <p, sigma(a_(1))> a_(2) for one omega monomial a."""
        value: Terms = {}
        for (a1, a2), k in self.hopf.coproduct_terms(a).items():
            coord = self.primitives.pairing(primitive, self.suspension.suspend_monomial(a1), self.ring)
            if coord:
                add_into(value, a2, k * coord)
        return value

    def partial_monomial(self, primitive: str, a: Monomial) -> Terms:
        return self._partial(primitive, a)

    def bv_delta(self, e: LoopElement) -> LoopElement:
        """Delta(a (x) x) = sum a_(1) (x) sigma(a_(2)) x."""
        if e.model is not self:
            raise AlgebraMismatchError("Loop element belongs to a different model")
        acc: Dict[TensorKey, Any] = {}
        one = self.ring.one
        for (a, x), c in e.terms.items():
            for a1, k, coords in self._delta_plan(a):
                for name, coord in coords.items():
                    acted = self.actions[name].apply_terms({x: one})
                    weight = c * k * coord
                    for y, cy in acted.items():
                        add_into(acc, (a1, y), weight * cy)
        return self.element(acc)

    # --- Validation -------------------------------------------------------

    def validate(self) -> "LoopModel":
        label = self.model_id
        self.omega.validate()
        self.base.validate()
        if self.omega.ring is not self.base.ring:
            raise ValidationError(f"{label}: omega and base rings differ")
        for g in self.omega.generators:
            if g.degree < 0 or g.degree % 2:
                raise ValidationError(f"{label}: omega generator '{g.name}' must have even non-negative degree")
        for g in self.base.generators:
            if g.degree > 0:
                raise ValidationError(f"{label}: base generator '{g.name}' must have non-positive degree")
        if self.hopf.algebra is not self.omega or self.suspension.algebra is not self.omega:
            raise ValidationError(f"{label}: Hopf data must live on the omega side")
        if self.dim_g < 0:
            raise ValidationError(f"{label}: dim G must be non-negative")
        failures = self.hopf.generator_failures() + self.suspension.degree_failures()
        if set(self.actions) != set(self.primitives.names):
            raise ValidationError(f"{label}: every primitive needs exactly one action")
        for name, op in self.actions.items():
            if op.algebra is not self.base:
                raise ValidationError(f"{label}: action of {name} must act on the base")
            if op.degree != self.primitives.get(name).degree:
                raise ValidationError(f"{label}: action of {name} must have the primitive's degree")
            failures += op.degree_failures()
        if self.closed_form_partials is not None:
            expected = set(range(1, len(self.odd_primitives) + 1))
            if set(self.closed_form_partials) != expected:
                raise ValidationError(f"{label}: closed-form partials must be indexed 1..{len(expected)}")
            for i, d in self.closed_form_partials.items():
                if d.algebra is not self.omega:
                    raise ValidationError(f"{label}: closed-form partial {i} must act on omega")
                failures += d.degree_failures()
        failures += self.welldefined_failures()
        if failures:
            logger.warning("Model %s failed validation: %s", label, failures)
            raise ValidationError(f"{label}: {failures[0]}")
        logger.debug("Validated model %s", label)
        return self

    def welldefined_failures(self) -> List[str]:
        failures = self.hopf.rule_failures() + self.suspension.rule_failures()
        for op in self.actions.values():
            failures += op.rule_failures()
        for d in (self.closed_form_partials or {}).values():
            failures += d.rule_failures()
        return failures

    # --- Display and serialization ----------------------------------------

    def describe(self) -> Dict[str, Any]:
        omega = self.omega
        return {
            "id": self.model_id,
            "ring": self.ring.value,
            "dim_g": self.dim_g,
            "omega": omega.describe(),
            "base": self.base.describe(),
            "coproducts": {g: str(self.hopf.generator_coproduct(g)) for g in omega.names},
            "counits": {g: str(self.hopf.generator_counit(g)) for g in omega.names},
            "suspension": {
                g: " + ".join(f"{omega.ring.format(c)}*{p}" for p, c in self.suspension.generator_value(g).items()) or "0"
                for g in omega.names
            },
            "primitives": [
                f"{p.name} (degree {p.degree}{f', torsion {p.torsion}' if p.torsion else ''})"
                for p in self.primitives
            ],
            "actions": {name: op.kind for name, op in self.actions.items()},
        }

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "id": self.model_id,
            "dim_g": self.dim_g,
            "omega": self.omega.to_dict(),
            "hopf": self.hopf.to_dict(),
            "suspension": self.suspension.to_dict(),
            "base": self.base.to_dict(),
            "primitives": self.primitives.to_dict(),
            "actions": {name: op.to_dict() for name, op in self.actions.items()},
        }
        if self.closed_form_partials is not None:
            out["closed_form_partials"] = {str(i): d.to_dict() for i, d in sorted(self.closed_form_partials.items())}
        return out


def loop_product(e1: LoopElement, e2: LoopElement) -> LoopElement:
    return e1.model.loop_product(e1, e2)


def bv_delta(e: LoopElement) -> LoopElement:
    return e.model.bv_delta(e)
