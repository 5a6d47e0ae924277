import logging
from typing import Any, Dict, List, Mapping, Sequence, Tuple

from src.exceptions import DerivationPathUnavailableError, ValidationError
from src.models import Element, LoopModel, Operator, Primitive
from src.models.graded import Monomial, Terms, add_into
from src.models.hopf import HopfStructure

logger = logging.getLogger(__name__)

TripleKey = Tuple[Monomial, Monomial, Monomial]


class HopfService:
    """
    Hopf-side operations of a loop model and the consistency checks around them.
    """

    # --- Structure maps ---------------------------------------------------

    def coproduct(self, model: LoopModel, e: Element):
        return model.hopf.coproduct(e)

    def suspend(self, model: LoopModel, e: Element):
        return model.suspension.suspend(e)

    def apply_derivation(self, d: Operator, e: Element) -> Element:
        return d.apply(e)

    # --- Derivations from the Hopf data -------------------------------------

    def odd_primitive(self, model: LoopModel, i: int) -> Primitive:
        odd = model.odd_primitives
        if not 1 <= i <= len(odd):
            raise ValidationError(f"{model.model_id} has {len(odd)} odd primitives; index {i} is out of range")
        return odd[i - 1]

    def partial_terms(self, model: LoopModel, i: int, terms: Mapping[Monomial, Any]) -> Terms:
        """sum <p^i, sigma(a_(1))> a_(2) over the coproduct of every monomial."""
        if not model.derivation_path_available():
            raise DerivationPathUnavailableError(model.model_id)
        name = self.odd_primitive(model, i).name
        acc: Terms = {}
        for m, c in terms.items():
            for m2, c2 in model.partial_monomial(name, m).items():
                add_into(acc, m2, c * c2)
        return acc

    def partial_from_definition(self, i: int, a: Element, model: LoopModel) -> Element:
        if a.algebra is not model.omega:
            raise ValidationError("partial_from_definition takes an element of the omega side")
        return Element(model.omega, self.partial_terms(model, i, a.terms))

    # --- Reports ------------------------------------------------------------

    def check_welldefined(self, model: LoopModel) -> Dict[str, Any]:
        failures = model.welldefined_failures()
        return {"check": "welldefined", "model": model.model_id, "failures": failures}

    def _coproduct_left(self, hopf: HopfStructure, m: Monomial) -> Dict[TripleKey, Any]:
        """(D (x) id) D(m)."""
        out: Dict[TripleKey, Any] = {}
        for (a1, a2), c in hopf.coproduct_terms(m).items():
            for (b1, b2), k in hopf.coproduct_terms(a1).items():
                add_into(out, (b1, b2, a2), c * k)
        return out

    def _coproduct_right(self, hopf: HopfStructure, m: Monomial) -> Dict[TripleKey, Any]:
        """(id (x) D) D(m); the omega side is even so no sign arises."""
        out: Dict[TripleKey, Any] = {}
        for (a1, a2), c in hopf.coproduct_terms(m).items():
            for (b1, b2), k in hopf.coproduct_terms(a2).items():
                add_into(out, (a1, b1, b2), c * k)
        return out

    def check_coassociativity(self, model: LoopModel, monomials: Sequence[Monomial]) -> Dict[str, Any]:
        hopf = model.hopf
        failures = [
            model.omega.format_monomial(m)
            for m in monomials
            if self._coproduct_left(hopf, m) != self._coproduct_right(hopf, m)
        ]
        return {"check": "coassociativity", "model": model.model_id, "failures": failures}

    def check_cocommutativity(self, model: LoopModel, elements: Sequence[Element]) -> Dict[str, Any]:
        failures = []
        for e in elements:
            d = model.hopf.coproduct(e)
            if d.swap() != d:
                failures.append(str(e))
        return {"check": "cocommutativity", "model": model.model_id, "failures": failures}

    def check_counit(self, model: LoopModel, elements: Sequence[Element]) -> Dict[str, Any]:
        """(eps (x) id) D(e) = e = (id (x) eps) D(e)."""
        A, hopf = model.omega, model.hopf
        failures = []
        for e in elements:
            left: Terms = {}
            right: Terms = {}
            for (a1, a2), c in hopf.coproduct_of_terms(e.terms).items():
                add_into(left, a2, c * hopf.counit_of_monomial(a1))
                add_into(right, a1, c * hopf.counit_of_monomial(a2))
            if A.normalize_terms(left) != e.terms or A.normalize_terms(right) != e.terms:
                failures.append(str(e))
        return {"check": "counit", "model": model.model_id, "failures": failures}

    def check_suspension_decomposables(self, model: LoopModel,
                                       pairs: Sequence[Tuple[Element, Element]]) -> Dict[str, Any]:
        """sigma(ab) = 0 once a and b are projected into the augmentation ideal."""
        hopf, suspension = model.hopf, model.suspension
        failures = []
        for a, b in pairs:
            a0 = a - model.omega.one().scale(hopf.counit(a))
            b0 = b - model.omega.one().scale(hopf.counit(b))
            coords = suspension.suspend_terms((a0 * b0).terms)
            if coords:
                failures.append(f"sigma(({a0})*({b0})) = {coords}")
        return {"check": "suspension_decomposables", "model": model.model_id, "failures": failures}

    def check_reconstruction(self, model: LoopModel, elements: Sequence[Element]) -> Dict[str, Any]:
        """Partials rebuilt from coproduct and suspension against the closed forms."""
        failures: List[str] = []
        partials = model.closed_form_partials or {}
        generators = [model.omega.gen(name) for name in model.omega.names]
        for i, closed in sorted(partials.items()):
            for e in list(generators) + list(elements):
                rebuilt = self.partial_from_definition(i, e, model)
                expected = closed.apply(e)
                if rebuilt != expected:
                    failures.append(f"partial {i} on {e}: {rebuilt} != {expected}")
        return {"check": "reconstruction", "model": model.model_id, "failures": failures}

    def check_leibniz(self, model: LoopModel, pairs: Sequence[Tuple[Element, Element]]) -> Dict[str, Any]:
        """Every derivation of the model against d(xy) = d(x)y + (-1)^(|d||x|) x d(y)."""
        operators = [(f"delta[{name}]", op) for name, op in model.actions.items() if op.kind == "derivation"]
        operators += [(f"partial[{i}]", d) for i, d in sorted((model.closed_form_partials or {}).items())]
        failures = []
        for label, d in operators:
            for x, y in pairs:
                if x.algebra is not d.algebra:
                    continue
                dx_deg = x.degree_of()
                parity = d.degree * (dx_deg if isinstance(dx_deg, int) else 0)
                lhs = d.apply(x * y)
                rhs = d.apply(x) * y + (x * d.apply(y)).scale(d.algebra.ring.sign(parity))
                if lhs != rhs:
                    failures.append(f"{label} on ({x})*({y})")
        return {"check": "leibniz", "model": model.model_id, "failures": failures}
