import logging
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src import config
from src.exceptions import InfiniteBasisError, LoopAlgebraException
from src.models import Element, LoopElement, LoopModel, ModelId
from src.models.graded import Monomial
from src.repositories import CatalogRepository
from src.services.algebra_service import AlgebraService, Window, check_window
from src.services.bv_service import BVService
from src.services.hopf_service import HopfService

logger = logging.getLogger(__name__)

SEVEN_TERM_CASES = 200
ORACLE_DEGREE_CAP = 20
COEFFICIENTS = (-3, -2, -1, 1, 2, 3)


class RandomSampler:
    """Seeded generator of homogeneous elements drawn from enumerated bases."""

    def __init__(self, model: LoopModel, algebra_service: AlgebraService, word_length: int,
                 window: Window, seed: int) -> None:
        self.model = model
        self.algebra_service = algebra_service
        self.rng = np.random.default_rng(seed)
        lo, hi = window
        self.omega_by_degree: Dict[int, List[Monomial]] = {}
        for m in algebra_service.monomials_up_to_length(model.omega, word_length, (lo, hi)):
            self.omega_by_degree.setdefault(model.omega.monomial_degree(m), []).append(m)
        self.loop_by_degree: Dict[int, List[Tuple[Monomial, Monomial]]] = {}
        for x in algebra_service.all_normal_monomials(model.base):
            dx = model.base.monomial_degree(x)
            for a in algebra_service.monomials_up_to_length(model.omega, word_length, (lo - dx, hi - dx)):
                self.loop_by_degree.setdefault(model.omega.monomial_degree(a) + dx, []).append((a, x))

    def _coefficient(self):
        return self.model.ring.convert(int(self.rng.choice(COEFFICIENTS)))

    def _combination(self, pool: Dict[int, list]) -> Dict:
        degrees = sorted(pool)
        if not degrees:
            return {}
        basis = pool[degrees[int(self.rng.integers(len(degrees)))]]
        count = int(self.rng.integers(1, min(3, len(basis)) + 1))
        picks = self.rng.choice(len(basis), size=count, replace=False)
        return {basis[int(k)]: self._coefficient() for k in sorted(picks)}

    def omega_element(self) -> Element:
        return Element(self.model.omega, self.model.omega.normalize_terms(self._combination(self.omega_by_degree)))

    def loop_element(self) -> LoopElement:
        return self.model.element(self._combination(self.loop_by_degree))

    def omega_pairs(self, n: int) -> List[Tuple[Element, Element]]:
        return [(self.omega_element(), self.omega_element()) for _ in range(n)]

    def loop_pairs(self, n: int) -> List[Tuple[LoopElement, LoopElement]]:
        return [(self.loop_element(), self.loop_element()) for _ in range(n)]

    def loop_triples(self, n: int) -> List[Tuple[LoopElement, LoopElement, LoopElement]]:
        return [(self.loop_element(), self.loop_element(), self.loop_element()) for _ in range(n)]

    def base_pairs(self, n: int) -> List[Tuple[Element, Element]]:
        base = self.model.base
        monomials = self.algebra_service.all_normal_monomials(base)
        out = []
        for _ in range(n):
            x, y = (monomials[int(k)] for k in self.rng.integers(len(monomials), size=2))
            out.append((Element(base, {x: self._coefficient()}), Element(base, {y: self._coefficient()})))
        return out


class VerificationService:
    """
    Runs the invariant suite of a loop model and collects JSON-ready reports.

    Every report carries {check, model, window, failures, elapsed_ms}; the suite
    is deterministic for a fixed seed.
    """

    def __init__(self, catalog: CatalogRepository, algebra_service: AlgebraService,
                 hopf_service: HopfService, bv_service: BVService) -> None:
        self.catalog = catalog
        self.algebra = algebra_service
        self.hopf = hopf_service
        self.bv = bv_service

    def _timed(self, check: Callable[[], Dict[str, Any]], model: LoopModel, window: Window) -> Dict[str, Any]:
        start = time.perf_counter()
        report = check()
        elapsed = (time.perf_counter() - start) * 1000.0
        report.setdefault("model", model.model_id)
        report["window"] = list(window)
        report["elapsed_ms"] = round(elapsed, 3)
        logger.info("%s %s: %d failures in %.1f ms", model.model_id, report["check"],
                    len(report["failures"]), elapsed)
        return report

    # --- Individual checks -------------------------------------------------------

    def check_golden(self, model: LoopModel) -> Dict[str, Any]:
        failures = []
        rows = self.catalog.golden_delta_table(model.model_id)
        agree = model.derivation_path_available()
        for src, expected in rows:
            got = self.bv.bv_delta(src)
            if got != expected:
                failures.append({"input": str(src), "expected": str(expected), "got": str(got)})
            if agree and self.bv.bv_delta_derivation_form(src) != expected:
                failures.append({"input": str(src), "expected": str(expected), "path": "deriv"})
        return {"check": "golden", "model": model.model_id, "tested": len(rows), "failures": failures}

    def check_oracle(self, model: LoopModel, window: Window) -> Dict[str, Any]:
        lo, hi = max(window[0], -ORACLE_DEGREE_CAP), min(window[1], ORACLE_DEGREE_CAP)
        failures = []
        for side, algebra in (("omega", model.omega), ("base", model.base)):
            for d in range(lo, hi + 1):
                try:
                    fast = self.algebra.hilbert_dimension(d, algebra)
                    slow = self.algebra.oracle_dimension(d, algebra)
                except InfiniteBasisError:
                    continue
                if fast != slow:
                    failures.append({"side": side, "degree": d, "hilbert": fast, "oracle": slow})
        return {"check": "oracle", "model": model.model_id, "failures": failures}

    def check_confluence(self, model: LoopModel, window: Window) -> Dict[str, Any]:
        failures = []
        for algebra in (model.omega, model.base):
            failures += self.algebra.check_local_confluence(algebra, window)["failures"]
        return {"check": "local_confluence", "model": model.model_id, "failures": failures}

    def check_seven_term_random(self, model: LoopModel,
                                triples: Sequence[Tuple[LoopElement, LoopElement, LoopElement]]) -> Dict[str, Any]:
        failures = []
        for a, b, c in triples:
            lhs, rhs = self.bv.seven_term_sides(a, b, c)
            if lhs != rhs:
                failures.append({"triple": [str(a), str(b), str(c)], "lhs": str(lhs), "rhs": str(rhs)})
        return {"check": "seven_term", "model": model.model_id, "tested": len(triples), "failures": failures}

    # --- Suite --------------------------------------------------------------------

    def verify(self, model: LoopModel, window: Optional[Window] = None, word_length: Optional[int] = None,
               seed: Optional[int] = None, cases: Optional[int] = None) -> Dict[str, Any]:
        window = check_window(window or config.DEFAULT_WINDOW)
        word_length = config.DEFAULT_WORD_LENGTH if word_length is None else word_length
        seed = config.DEFAULT_SEED if seed is None else seed
        cases = config.DEFAULT_CASES if cases is None else cases
        logger.info("Verifying %s on %s, word length %d, seed %d, %d cases",
                    model.model_id, window, word_length, seed, cases)

        sampler = RandomSampler(model, self.algebra, word_length, window, seed)
        basis = self.bv.tensor_basis(model, word_length, window)
        omega_monomials = [m for ms in sampler.omega_by_degree.values() for m in ms]
        omega_pairs = sampler.omega_pairs(cases)
        loop_pairs = sampler.loop_pairs(cases)
        loop_triples = sampler.loop_triples(cases)
        seven_term = sampler.loop_triples(min(cases, SEVEN_TERM_CASES))
        omega_elements = [x for x, _ in omega_pairs]

        checks: List[Callable[[], Dict[str, Any]]] = [
            lambda: self.hopf.check_welldefined(model),
            lambda: self.check_confluence(model, window),
            lambda: self.hopf.check_coassociativity(model, omega_monomials),
            lambda: self.hopf.check_cocommutativity(model, omega_elements),
            lambda: self.hopf.check_counit(model, omega_elements),
            lambda: self.hopf.check_suspension_decomposables(model, omega_pairs),
            lambda: self.hopf.check_leibniz(model, omega_pairs + sampler.base_pairs(cases)),
            lambda: self.bv.check_graded_commutativity(model, loop_pairs),
            lambda: self.bv.check_associativity(model, loop_triples),
            lambda: self.bv.check_delta_degree(model, basis),
            lambda: self.bv.check_delta_squared(model, word_length, window, basis),
            lambda: self.check_seven_term_random(model, seven_term),
        ]
        if model.ring.is_field:
            checks.append(lambda: self.check_oracle(model, window))
        if model.derivation_path_available():
            checks.append(lambda: self.bv.check_path_agreement(model, basis))
            if model.closed_form_partials is not None:
                checks.append(lambda: self.hopf.check_reconstruction(model, omega_elements))
        if self._in_catalog(model):
            checks.append(lambda: self.check_golden(model))

        reports = [self._timed(check, model, window) for check in checks]
        total = sum(len(r["failures"]) for r in reports)
        return {
            "model": model.model_id,
            "window": list(window),
            "word_length": word_length,
            "seed": seed,
            "cases": cases,
            "failures": total,
            "reports": reports,
        }

    def _in_catalog(self, model: LoopModel) -> bool:
        try:
            key = ModelId.parse(model.model_id)
        except LoopAlgebraException:
            return False
        return self.catalog.get(key) is model
