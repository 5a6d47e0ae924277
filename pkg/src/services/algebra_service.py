import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from sympy.polys.matrices import DomainMatrix
from sympy.polys.monomials import monomial_lcm

from src import config
from src.exceptions import InfiniteBasisError, UnsupportedRingError, ValidationError, WindowTooLargeError
from src.models import LoopModel, PresentedAlgebra
from src.models.graded import Monomial, Terms, add_into

logger = logging.getLogger(__name__)

Window = Tuple[int, int]


def check_window(window: Window) -> Window:
    lo, hi = window
    if lo > hi:
        raise ValidationError(f"Empty window {lo}:{hi}")
    cap = config.get_max_degree()
    if max(abs(lo), abs(hi)) > cap:
        raise WindowTooLargeError(lo, hi, cap)
    return lo, hi


def _exponent_vectors(degrees: Sequence[int], caps: Sequence[int],
                      target: Optional[int], max_length: Optional[int]) -> List[Monomial]:
    """Exponent vectors under per-generator caps, of total degree `target` (any if None)."""
    n = len(degrees)
    out: List[Monomial] = []
    current = [0] * n

    def walk(i: int, remaining: int, length_left: Optional[int]) -> None:
        if i == n:
            if target is None or remaining == 0:
                out.append(tuple(current))
            return
        for e in range(caps[i] + 1):
            if length_left is not None and e > length_left:
                break
            current[i] = e
            walk(i + 1, remaining - e * degrees[i], None if length_left is None else length_left - e)
        current[i] = 0

    walk(0, target or 0, max_length)
    return out


class AlgebraService:
    """
    Bases, Hilbert dimensions and consistency checks for presented algebras.
    """

    # --- Enumeration ------------------------------------------------------

    def _caps(self, algebra: PresentedAlgebra, degree: Optional[int],
              word_length: Optional[int], oracle: bool = False) -> List[int]:
        caps = []
        for i, g in enumerate(algebra.generators):
            if g.is_exterior:
                cap = 1
            elif g.degree == 0:
                if i in algebra.bounded and not (i in algebra.inverse_of):
                    # truncation for the oracle; the projection onto exponents < e is exact above e+1
                    cap = algebra.bounded[i] + 2 if oracle else algebra.bounded[i] - 1
                elif word_length is not None and not oracle:
                    cap = word_length
                else:
                    raise InfiniteBasisError(degree if degree is not None else 0)
            elif degree is None:
                if word_length is None:
                    raise InfiniteBasisError(0)
                cap = word_length
            elif (degree > 0) == (g.degree > 0) and degree != 0:
                cap = abs(degree) // abs(g.degree)
            else:
                cap = 0
            if not oracle and i in algebra.bounded and g.degree != 0:
                cap = min(cap, algebra.bounded[i] - 1)
            if word_length is not None:
                cap = min(cap, word_length)
            caps.append(cap)
        return caps

    def basis_in_degree(self, degree: int, algebra: PresentedAlgebra,
                        word_length: Optional[int] = None) -> List[Monomial]:
        """Normal monomials of the given degree in ascending exponent-tuple order."""
        caps = self._caps(algebra, degree, word_length)
        found = _exponent_vectors(algebra.degrees, caps, degree, word_length)
        return sorted(m for m in found if algebra.is_normal(m))

    def hilbert_dimension(self, degree: int, algebra: PresentedAlgebra,
                          word_length: Optional[int] = None) -> int:
        return len(self.basis_in_degree(degree, algebra, word_length))

    def monomials_up_to_length(self, algebra: PresentedAlgebra, word_length: int,
                               window: Optional[Window] = None) -> List[Monomial]:
        caps = self._caps(algebra, None, word_length)
        found = _exponent_vectors(algebra.degrees, caps, None, word_length)
        out = []
        for m in found:
            if not algebra.is_normal(m):
                continue
            if window is not None and not window[0] <= algebra.monomial_degree(m) <= window[1]:
                continue
            out.append(m)
        return sorted(out, key=lambda m: (algebra.monomial_degree(m), m))

    def all_normal_monomials(self, algebra: PresentedAlgebra) -> List[Monomial]:
        """Every normal monomial of an algebra that is finite in total."""
        caps = []
        for i, g in enumerate(algebra.generators):
            if g.is_exterior:
                caps.append(1)
            elif i in algebra.bounded and i not in algebra.inverse_of:
                caps.append(algebra.bounded[i] - 1)
            else:
                raise InfiniteBasisError(g.degree)
        found = _exponent_vectors(algebra.degrees, caps, None, None)
        return sorted((m for m in found if algebra.is_normal(m)),
                      key=lambda m: (algebra.monomial_degree(m), m))

    def loop_basis_in_degree(self, model: LoopModel, degree: int,
                             word_length: Optional[int] = None) -> List[Tuple[Monomial, Monomial]]:
        out = []
        for x in self.all_normal_monomials(model.base):
            target = degree - model.base.monomial_degree(x)
            for a in self.basis_in_degree(target, model.omega, word_length):
                out.append((a, x))
        return sorted(out)

    # --- Oracle -------------------------------------------------------------

    def oracle_dimension(self, degree: int, algebra: PresentedAlgebra) -> int:
        """dim of free monomials of `degree` modulo relation multiples, by row reduction.

        Never calls the rewriting engine.
        """
        if not algebra.ring.is_field:
            raise UnsupportedRingError("oracle_dimension", algebra.ring.value)
        caps = self._caps(algebra, degree, None, oracle=True)
        columns = _exponent_vectors(algebra.degrees, caps, degree, None)
        if not columns:
            return 0
        col_index = {m: k for k, m in enumerate(columns)}
        one = algebra.domain.one
        rows: Dict[int, Dict[int, Any]] = {}
        for rule in algebra.rewrites:
            relation: Terms = {rule.lhs: one}
            for m, c in rule.rhs:
                add_into(relation, m, -c)
            shift = degree - algebra.monomial_degree(rule.lhs)
            q_caps = self._caps(algebra, shift, None, oracle=True)
            for q in _exponent_vectors(algebra.degrees, q_caps, shift, None):
                product = algebra.mul_terms_free({q: one}, relation)
                if not product or any(m not in col_index for m in product):
                    continue
                rows[len(rows)] = {col_index[m]: c for m, c in product.items()}
        if not rows:
            return len(columns)
        matrix = DomainMatrix(rows, (len(rows), len(columns)), algebra.domain)
        rank = matrix.rank()
        logger.debug("Oracle degree %d: %d columns, %d rows, rank %d", degree, len(columns), len(rows), rank)
        return len(columns) - rank

    # --- Confluence ---------------------------------------------------------

    def check_local_confluence(self, algebra: PresentedAlgebra, window: Window) -> Dict[str, Any]:
        """Reduce every overlap of two rules both ways and report disagreements.

        Exterior generators contribute the implicit rule g^2 -> 0.
        """
        lo, hi = window
        failures = []
        rules = algebra.rewrites
        for k, r1 in enumerate(rules):
            for r2 in rules[k + 1:]:
                overlap = monomial_lcm(r1.lhs, r2.lhs)
                if not lo <= algebra.monomial_degree(overlap) <= hi or algebra.is_free_zero(overlap):
                    continue
                left = algebra.normalize_terms(algebra.apply_rule(overlap, r1))
                right = algebra.normalize_terms(algebra.apply_rule(overlap, r2))
                if left != right:
                    failures.append({
                        "monomial": algebra.format_monomial(overlap),
                        "left": algebra.format_terms(left),
                        "right": algebra.format_terms(right),
                    })
        one = algebra.domain.one
        for i, g in enumerate(algebra.generators):
            if not g.is_exterior:
                continue
            square = algebra.generator_monomial(i)
            for rule in rules:
                if not rule.lhs[i]:
                    continue
                overlap = tuple(e + (1 if j == i else 0) for j, e in enumerate(rule.lhs))
                if not lo <= algebra.monomial_degree(overlap) <= hi:
                    continue
                via_rule = algebra.normalize_terms(algebra.mul_terms_free({square: one}, rule.rhs_terms))
                if via_rule:
                    failures.append({
                        "monomial": f"{g.name}*{algebra.format_monomial(rule.lhs)}",
                        "left": "0",
                        "right": algebra.format_terms(via_rule),
                    })
        return {"check": "local_confluence", "algebra": algebra.name, "window": [lo, hi], "failures": failures}

    # --- Tables -------------------------------------------------------------

    def hilbert_table(self, model: LoopModel, side: str, window: Window, oracle: bool = False,
                      word_length: Optional[int] = None) -> pd.DataFrame:
        lo, hi = check_window(window)
        if side not in ("omega", "base", "loop"):
            raise ValidationError(f"Unknown side {side!r}; expected omega, base or loop")
        if oracle and side == "loop":
            raise ValidationError("The oracle cross-check applies to omega or base only")
        algebra = model.omega if side == "omega" else model.base
        records = []
        for d in range(lo, hi + 1):
            if side == "loop":
                row = {"degree": d, "dimension": len(self.loop_basis_in_degree(model, d, word_length))}
            else:
                row = {"degree": d, "dimension": self.hilbert_dimension(d, algebra, word_length)}
                if oracle:
                    row["oracle"] = self.oracle_dimension(d, algebra)
            records.append(row)
        return pd.DataFrame.from_records(records).set_index("degree")
