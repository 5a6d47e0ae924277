import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from sympy.polys.matrices import DomainMatrix

from src.exceptions import (
    DerivationPathUnavailableError,
    NonHomogeneousError,
    PathDisagreementError,
    UnsupportedRingError,
    ValidationError,
)
from src.models import LoopElement, LoopModel
from src.models.graded import add_into
from src.services.algebra_service import AlgebraService, Window, check_window
from src.services.hopf_service import HopfService

logger = logging.getLogger(__name__)

PATHS = ("eq1", "deriv", "both")


def _degree(e: LoopElement, label: str) -> int:
    """Degree of a homogeneous element; zero counts as degree 0."""
    d = e.degree_of()
    if d == "mixed":
        raise NonHomogeneousError(label)
    return 0 if d == "any" else d


class BVService:
    """
    The BV operator by its two constructions, and the identities it must satisfy.
    """

    def __init__(self, algebra_service: Optional[AlgebraService] = None,
                 hopf_service: Optional[HopfService] = None) -> None:
        self.algebra = algebra_service or AlgebraService()
        self.hopf = hopf_service or HopfService()

    # --- Products and Delta -------------------------------------------------

    def loop_product(self, e1: LoopElement, e2: LoopElement) -> LoopElement:
        return e1.model.loop_product(e1, e2)

    def bv_delta(self, e: LoopElement) -> LoopElement:
        return e.model.bv_delta(e)

    def bv_delta_derivation_form(self, e: LoopElement, closed_form: bool = False) -> LoopElement:
        """Delta = sum_i partial_i (x) delta_i, with partial_i from the Hopf data or the closed forms."""
        model = e.model
        if closed_form:
            if model.closed_form_partials is None:
                raise DerivationPathUnavailableError(model.model_id)
        elif not model.derivation_path_available():
            raise DerivationPathUnavailableError(model.model_id)
        A = model.omega
        one = model.ring.one
        acc: Dict = {}
        for i, p in enumerate(model.odd_primitives, start=1):
            delta_i = model.actions[p.name]
            for (a, x), c in e.terms.items():
                acted = delta_i.apply_terms({x: one})
                if not acted:
                    continue
                if closed_form:
                    da = model.closed_form_partials[i].apply_terms({a: one})
                else:
                    da = self.hopf.partial_terms(model, i, {a: one})
                # (d (x) delta)(a (x) x) picks up (-1)^(|delta||a|)
                sign = model.ring.sign(delta_i.degree * A.monomial_degree(a))
                for a2, ca in da.items():
                    for y, cy in acted.items():
                        add_into(acc, (a2, y), sign * c * ca * cy)
        return model.element(acc)

    def evaluate_delta(self, e: LoopElement, path: str = "eq1") -> LoopElement:
        if path not in PATHS:
            raise ValidationError(f"Unknown path {path!r}; expected one of {', '.join(PATHS)}")
        if path == "eq1":
            return self.bv_delta(e)
        if path == "deriv":
            return self.bv_delta_derivation_form(e)
        eq1 = self.bv_delta(e)
        deriv = self.bv_delta_derivation_form(e)
        if eq1 != deriv:
            logger.warning("Delta paths disagree on %s: %s vs %s", e, eq1, deriv)
            raise PathDisagreementError(str(eq1), str(deriv))
        return eq1

    def bracket(self, a: LoopElement, b: LoopElement) -> LoopElement:
        """{a,b} = (-1)^|a| (Delta(ab) - Delta(a)b - (-1)^|a| a Delta(b))."""
        da = _degree(a, "bracket")
        _degree(b, "bracket")
        sign = a.model.ring.sign(da)
        inner = self.bv_delta(a * b) - self.bv_delta(a) * b - (a * self.bv_delta(b)).scale(sign)
        return inner.scale(sign)

    # --- Identity checks ------------------------------------------------------

    def tensor_basis(self, model: LoopModel, word_length: int, window: Window) -> List[LoopElement]:
        """a (x) x for omega monomials of word length <= n and every base monomial, total degree in window."""
        lo, hi = window
        O, B = model.omega, model.base
        one = model.ring.one
        out = []
        for x in self.algebra.all_normal_monomials(B):
            dx = B.monomial_degree(x)
            for a in self.algebra.monomials_up_to_length(O, word_length, (lo - dx, hi - dx)):
                out.append(model.element({(a, x): one}))
        return out

    def check_delta_squared(self, model: LoopModel, word_length: int, window: Window,
                            elements: Optional[Sequence[LoopElement]] = None) -> Dict[str, Any]:
        lo, hi = check_window(window)
        if elements is None:
            elements = self.tensor_basis(model, word_length, (lo, hi))
        failures = []
        for e in elements:
            twice = self.bv_delta(self.bv_delta(e))
            if not twice.is_zero:
                failures.append({"element": str(e), "delta_squared": str(twice)})
        return {"check": "delta_squared", "model": model.model_id, "window": [lo, hi],
                "tested": len(elements), "failures": failures}

    def check_delta_degree(self, model: LoopModel, elements: Sequence[LoopElement]) -> Dict[str, Any]:
        failures = []
        for e in elements:
            image = self.bv_delta(e)
            if image.is_zero or e.is_zero:
                continue
            if image.degree_of() != _degree(e, "delta_degree") + 1:
                failures.append(str(e))
        return {"check": "delta_degree", "model": model.model_id, "failures": failures}

    def check_path_agreement(self, model: LoopModel, elements: Sequence[LoopElement]) -> Dict[str, Any]:
        failures = []
        for e in elements:
            eq1 = self.bv_delta(e)
            deriv = self.bv_delta_derivation_form(e)
            if eq1 != deriv:
                failures.append({"element": str(e), "eq1": str(eq1), "deriv": str(deriv)})
        return {"check": "path_agreement", "model": model.model_id, "failures": failures}

    def seven_term_sides(self, a: LoopElement, b: LoopElement, c: LoopElement) -> Tuple[LoopElement, LoopElement]:
        da = _degree(a, "seven_term")
        db = _degree(b, "seven_term")
        _degree(c, "seven_term")
        ring = a.model.ring
        delta = self.bv_delta
        lhs = delta(a * b * c)
        rhs = (
            delta(a * b) * c
            + (a * delta(b * c)).scale(ring.sign(da))
            + (b * delta(a * c)).scale(ring.sign((da - 1) * db))
            - delta(a) * b * c
            - (a * delta(b) * c).scale(ring.sign(da))
            - (a * b * delta(c)).scale(ring.sign(da + db))
        )
        return lhs, rhs

    def check_seven_term(self, a: LoopElement, b: LoopElement, c: LoopElement) -> bool:
        lhs, rhs = self.seven_term_sides(a, b, c)
        return lhs == rhs

    def check_graded_commutativity(self, model: LoopModel,
                                   pairs: Sequence[Tuple[LoopElement, LoopElement]]) -> Dict[str, Any]:
        failures = []
        for x, y in pairs:
            sign = model.ring.sign(_degree(x, "commutativity") * _degree(y, "commutativity"))
            if x * y != (y * x).scale(sign):
                failures.append(f"({x}, {y})")
        return {"check": "graded_commutativity", "model": model.model_id, "failures": failures}

    def check_associativity(self, model: LoopModel,
                            triples: Sequence[Tuple[LoopElement, LoopElement, LoopElement]]) -> Dict[str, Any]:
        failures = [f"({x}, {y}, {z})" for x, y, z in triples if (x * y) * z != x * (y * z)]
        return {"check": "associativity", "model": model.model_id, "failures": failures}

    # --- Delta homology --------------------------------------------------------

    def _delta_rank(self, model: LoopModel, source: List, target: List) -> int:
        if not source or not target:
            return 0
        index = {k: j for j, k in enumerate(target)}
        one = model.ring.one
        rows: Dict[int, Dict[int, Any]] = {}
        for r, key in enumerate(source):
            image = self.bv_delta(model.element({key: one}))
            row = {index[k]: c for k, c in image.terms.items()}
            if row:  # sparse DomainMatrix input must omit zero rows
                rows[r] = row
        return DomainMatrix(rows, (len(source), len(target)), model.omega.domain).rank()

    def delta_homology_dimensions(self, model: LoopModel, window: Window) -> Dict[int, Tuple[int, int]]:
        """degree d -> (dim ker Delta on L_d, rank of Delta: L_(d-1) -> L_d)."""
        if not model.ring.is_field:
            raise UnsupportedRingError("delta_homology_dimensions", model.ring.value)
        lo, hi = check_window(window)
        bases = {d: self.algebra.loop_basis_in_degree(model, d) for d in range(lo - 1, hi + 2)}
        out = {}
        for d in range(lo, hi + 1):
            kernel = len(bases[d]) - self._delta_rank(model, bases[d], bases[d + 1])
            image = self._delta_rank(model, bases[d - 1], bases[d])
            out[d] = (kernel, image)
        return out

    def delta_homology_table(self, model: LoopModel, window: Window) -> pd.DataFrame:
        dims = self.delta_homology_dimensions(model, window)
        frame = pd.DataFrame(
            [{"degree": d, "kernel": k, "image": i, "homology": k - i} for d, (k, i) in dims.items()])
        return frame.set_index("degree")
