import logging
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Union

from src.models import (
    ActionTable,
    Derivation,
    GeneratorKind,
    GeneratorSpec,
    HopfStructure,
    LoopElement,
    LoopModel,
    ModelFamily,
    ModelId,
    Primitive,
    PrimitiveBasis,
    PresentedAlgebra,
    RewriteRule,
    RingTag,
    SuspensionMap,
    TorsionRule,
)
from src.models.graded import Monomial, Terms, add_into
from src.repositories.base_repository import BaseRepository

logger = logging.getLogger(__name__)

EXT = GeneratorKind.EXTERIOR
POLY = GeneratorKind.POLYNOMIAL

# SO families exercised by the acceptance suites
DEFAULT_RANKS = (1, 2, 3)


def _poly(A: PresentedAlgebra, *pairs: Tuple[Any, Mapping[str, int]]) -> Terms:
    """sum coeff * monomial, monomials given as {generator: exponent}."""
    out: Terms = {}
    for coeff, exps in pairs:
        add_into(out, A.monomial(exps), A.ring.convert(coeff))
    return out


def _copairs(A: PresentedAlgebra, *triples: Tuple[Any, Mapping[str, int], Mapping[str, int]]):
    out: Dict[Tuple[Monomial, Monomial], Any] = {}
    for coeff, left, right in triples:
        add_into(out, (A.monomial(left), A.monomial(right)), A.ring.convert(coeff))
    return out


def _primitive_coproduct(A: PresentedAlgebra, name: str):
    return _copairs(A, (1, {name: 1}, {}), (1, {}, {name: 1}))


def _grouplike_coproduct(A: PresentedAlgebra, name: str):
    return _copairs(A, (1, {name: 1}, {name: 1}))


def truncation_power(index: int, bound: int) -> int:
    """Least power of 2, r, with index * r >= bound."""
    r = 1
    while index * r < bound:
        r *= 2
    return r


class CatalogRepository(BaseRepository):
    """
    Builds and caches the catalog's loop models.

    Every build runs the full load-time validation of the model.
    """

    def __init__(self) -> None:
        super().__init__()
        self._builders: Dict[ModelFamily, Callable[[ModelId], LoopModel]] = {
            ModelFamily.CIRCLE_Z: self._build_circle,
            ModelFamily.S3_Z: self._build_s3,
            ModelFamily.RP3_Z: self._build_rp3_integral,
            ModelFamily.RP3_Q: self._build_rp3_rational,
            ModelFamily.SO_ODD_Q: self._build_so_rational,
            ModelFamily.SO_EVEN_Q: self._build_so_rational,
            ModelFamily.SO_ODD_F2: self._build_so_mod2,
            ModelFamily.SO_EVEN_F2: self._build_so_mod2,
        }

    # --- Lookup -----------------------------------------------------------

    def list_ids(self, ranks=DEFAULT_RANKS) -> List[str]:
        ids = [f.value for f in ModelFamily if not f.ranked]
        for family in ModelFamily:
            if family.ranked:
                ids.extend(f"{family.value}({m})" for m in ranks)
        return ids

    def get(self, model_id: Union[str, ModelId]) -> LoopModel:
        key = ModelId.parse(model_id) if isinstance(model_id, str) else model_id
        cached = self._cache.get(str(key))
        if cached is None:
            cached = self.build(key)
            self._cache[str(key)] = cached
        return cached

    def build(self, model_id: Union[str, ModelId]) -> LoopModel:
        key = ModelId.parse(model_id) if isinstance(model_id, str) else model_id
        model = self._builders[key.family](key)
        model.validate()
        logger.info("Built %s (%d omega generators, %d base generators)",
                    key, len(model.omega), len(model.base))
        return model

    # --- Spaces with integral coefficients ---------------------------------

    def _build_circle(self, key: ModelId) -> LoopModel:
        R = RingTag.INTEGERS
        gens = [GeneratorSpec("x", 0), GeneratorSpec("xinv", 0)]
        free = PresentedAlgebra(gens, R)
        omega = PresentedAlgebra(
            gens, R, [RewriteRule.of(free.monomial(x=1, xinv=1), _poly(free, (1, {})))], name="omega")
        hopf = HopfStructure(
            omega,
            {"x": _grouplike_coproduct(omega, "x"), "xinv": _grouplike_coproduct(omega, "xinv")},
            {"x": 1, "xinv": 1})
        primitives = PrimitiveBasis([Primitive("S1", 1)])
        suspension = SuspensionMap(hopf, primitives, {"x": {"S1": 1}, "xinv": {"S1": -1}})
        base = PresentedAlgebra([GeneratorSpec("a", -1, EXT)], R, name="base")
        actions = {"S1": Derivation(base, 1, {"a": _poly(base, (1, {}))})}
        partials = {1: Derivation(omega, 0, {"x": _poly(omega, (1, {"x": 1})),
                                             "xinv": _poly(omega, (-1, {"xinv": 1}))})}
        return LoopModel(str(key), omega, hopf, suspension, base, 1, primitives, actions, partials)

    def _build_s3(self, key: ModelId) -> LoopModel:
        R = RingTag.INTEGERS
        omega = PresentedAlgebra([GeneratorSpec("u", 2)], R, name="omega")
        hopf = HopfStructure(omega, {"u": _primitive_coproduct(omega, "u")}, {"u": 0})
        primitives = PrimitiveBasis([Primitive("S3", 3)])
        suspension = SuspensionMap(hopf, primitives, {"u": {"S3": 1}})
        base = PresentedAlgebra([GeneratorSpec("a", -3, EXT)], R, name="base")
        actions = {"S3": Derivation(base, 3, {"a": _poly(base, (1, {}))})}
        partials = {1: Derivation(omega, -2, {"u": _poly(omega, (1, {}))})}
        return LoopModel(str(key), omega, hopf, suspension, base, 3, primitives, actions, partials)

    def _rp3_omega(self, ring: RingTag) -> Tuple[PresentedAlgebra, HopfStructure]:
        gens = [GeneratorSpec("u", 2), GeneratorSpec("v", 0)]
        free = PresentedAlgebra(gens, ring)
        omega = PresentedAlgebra(
            gens, ring, [RewriteRule.of(free.monomial(v=2), _poly(free, (1, {})))], name="omega")
        hopf = HopfStructure(
            omega,
            {"u": _primitive_coproduct(omega, "u"), "v": _grouplike_coproduct(omega, "v")},
            {"u": 0, "v": 1})
        return omega, hopf

    def _build_rp3_integral(self, key: ModelId) -> LoopModel:
        R = RingTag.INTEGERS
        omega, hopf = self._rp3_omega(R)
        primitives = PrimitiveBasis([Primitive("rho", 1, torsion=2), Primitive("RP3", 3)])
        suspension = SuspensionMap(hopf, primitives, {"u": {"RP3": 2}, "v": {"rho": 1}})
        gens = [GeneratorSpec("a", -3, EXT), GeneratorSpec("b", -2, EXT)]
        base = PresentedAlgebra(
            gens, R,
            [RewriteRule.of(PresentedAlgebra(gens, R).monomial(a=1, b=1))],
            [TorsionRule(2, "b")],
            name="base")
        # [RP3] does not act as a derivation here: [RP3](ab) would be b while ab = 0.
        actions = {
            "rho": ActionTable(base, 1, {base.monomial(a=1): _poly(base, (1, {"b": 1}))}),
            "RP3": ActionTable(base, 3, {base.monomial(a=1): _poly(base, (1, {}))}),
        }
        return LoopModel(str(key), omega, hopf, suspension, base, 3, primitives, actions, None)

    def _build_rp3_rational(self, key: ModelId) -> LoopModel:
        R = RingTag.RATIONALS
        omega, hopf = self._rp3_omega(R)
        primitives = PrimitiveBasis([Primitive("RP3", 3)])
        suspension = SuspensionMap(hopf, primitives, {"u": {"RP3": 2}})
        base = PresentedAlgebra([GeneratorSpec("a", -3, EXT)], R, name="base")
        actions = {"RP3": Derivation(base, 3, {"a": _poly(base, (1, {}))})}
        partials = {1: Derivation(omega, -2, {"u": _poly(omega, (2, {}))})}
        return LoopModel(str(key), omega, hopf, suspension, base, 3, primitives, actions, partials)

    # --- SO(n) over the rationals -------------------------------------------

    def _build_so_rational(self, key: ModelId) -> LoopModel:
        R = RingTag.RATIONALS
        m = key.rank
        even = key.family is ModelFamily.SO_EVEN_Q
        alpha = [f"alpha{i}" for i in range(2 * m)]
        eps = f"eps{m}"
        gens = [GeneratorSpec(name, 2 * i) for i, name in enumerate(alpha)]
        if even:
            gens.append(GeneratorSpec(eps, 2 * m))
        free = PresentedAlgebra(gens, R)

        # sigma(t)sigma(-t) = 1 for sigma(t) = sum alpha_i t^i
        rules = [RewriteRule.of(free.monomial({alpha[0]: 2}), _poly(free, (1, {})))]
        for i in range(1, m):
            rhs = _poly(free, *[
                (2 * (-1) ** (k + 1), {alpha[i - k]: 1, alpha[i + k]: 1}) for k in range(1, i + 1)])
            rules.append(RewriteRule.of(free.monomial({alpha[i]: 2}), rhs))
        omega = PresentedAlgebra(gens, R, rules, name="omega")

        coproducts = {
            alpha[i]: _copairs(omega, *[(1, {alpha[i - j]: 1}, {alpha[j]: 1}) for j in range(i + 1)])
            for i in range(2 * m)
        }
        counits = {name: (1 if i == 0 else 0) for i, name in enumerate(alpha)}
        if even:
            coproducts[eps] = _primitive_coproduct(omega, eps)
            counits[eps] = 0
        hopf = HopfStructure(omega, coproducts, counits)

        prim_list = [Primitive(f"a{4 * i - 1}", 4 * i - 1) for i in range(1, m + 1)]
        values = {alpha[2 * i - 1]: {f"a{4 * i - 1}": 1} for i in range(1, m + 1)}
        base_gens = [GeneratorSpec(f"beta{4 * i - 1}", -(4 * i - 1), EXT) for i in range(1, m + 1)]
        if even:
            prim_list.append(Primitive(f"b{2 * m + 1}", 2 * m + 1))
            values[eps] = {f"b{2 * m + 1}": 1}
            base_gens.append(GeneratorSpec(f"gamma{2 * m + 1}", -(2 * m + 1), EXT))
        primitives = PrimitiveBasis(prim_list)
        suspension = SuspensionMap(hopf, primitives, values)
        base = PresentedAlgebra(base_gens, R, name="base")

        actions = {
            f"a{4 * i - 1}": Derivation(base, 4 * i - 1, {f"beta{4 * i - 1}": _poly(base, (1, {}))})
            for i in range(1, m + 1)
        }
        partials = {
            i: Derivation(omega, -(4 * i - 2), {
                alpha[j]: _poly(omega, (1, {alpha[j - 2 * i + 1]: 1}))
                for j in range(2 * i - 1, 2 * m)
            })
            for i in range(1, m + 1)
        }
        if even:
            actions[f"b{2 * m + 1}"] = Derivation(
                base, 2 * m + 1, {f"gamma{2 * m + 1}": _poly(base, (1, {}))})
            partials[m + 1] = Derivation(omega, -2 * m, {eps: _poly(omega, (1, {}))})
        dim_g = (m + 1) * (2 * m + 1) if even else m * (2 * m + 1)
        return LoopModel(str(key), omega, hopf, suspension, base, dim_g, primitives, actions, partials)

    # --- SO(n) mod 2 ----------------------------------------------------------

    def _build_so_mod2(self, key: ModelId) -> LoopModel:
        R = RingTag.GF2
        m = key.rank
        even = key.family is ModelFamily.SO_EVEN_F2
        count = m + 1 if even else m
        a = [f"a{i}" for i in range(count)]
        b = [f"b{i}" for i in range(m)]
        gens = [GeneratorSpec(name, 2 * i) for i, name in enumerate(a)]
        gens += [GeneratorSpec(name, 2 * m + 2 * i) for i, name in enumerate(b)]
        free = PresentedAlgebra(gens, R)

        rules = [RewriteRule.of(free.monomial({a[0]: 2}), _poly(free, (1, {})))]
        for i in range(1, m):
            if 2 * i <= m - 1:
                rules.append(RewriteRule.of(free.monomial({a[i]: 2})))
            else:
                top = 2 * i - m
                rhs = _poly(free, *[(1, {a[l]: 1, b[top - l]: 1}) for l in range(top + 1)])
                rules.append(RewriteRule.of(free.monomial({a[i]: 2}), rhs))
        omega = PresentedAlgebra(gens, R, rules, name="omega")

        coproducts = {
            a[i]: _copairs(omega, *[(1, {a[i - j]: 1}, {a[j]: 1}) for j in range(i + 1)])
            for i in range(count)
        }
        for i in range(m):
            triples = []
            for j in range(i + 1):
                triples.append((1, {b[i - j]: 1}, {a[j]: 1}))
                triples.append((1, {a[j]: 1}, {b[i - j]: 1}))
            coproducts[b[i]] = _copairs(omega, *triples)
        counits = {name: (1 if i == 0 else 0) for i, name in enumerate(a)}
        counits.update({name: 0 for name in b})
        hopf = HopfStructure(omega, coproducts, counits)

        primitives = PrimitiveBasis([Primitive(f"q{2 * i + 1}", 2 * i + 1) for i in range(count)])
        suspension = SuspensionMap(hopf, primitives, {a[i]: {f"q{2 * i + 1}": 1} for i in range(count)})

        bound = 2 * m + 2 if even else 2 * m + 1
        c = [f"c{2 * i - 1}" for i in range(1, count + 1)]
        base_gens = [GeneratorSpec(name, -(2 * i - 1)) for i, name in enumerate(c, start=1)]
        base_free = PresentedAlgebra(base_gens, R)
        base_rules = [
            RewriteRule.of(base_free.monomial({name: truncation_power(2 * i - 1, bound)}))
            for i, name in enumerate(c, start=1)
        ]
        base = PresentedAlgebra(base_gens, R, base_rules, name="base")

        actions = {
            f"q{2 * i - 1}": Derivation(base, 2 * i - 1, {name: _poly(base, (1, {}))})
            for i, name in enumerate(c, start=1)
        }
        partials = {}
        for i in range(1, count + 1):
            shift = i - 1
            values = {a[j]: _poly(omega, (1, {a[j - shift]: 1})) for j in range(shift, count)}
            values.update({b[j]: _poly(omega, (1, {b[j - shift]: 1})) for j in range(shift, m)})
            partials[i] = Derivation(omega, -2 * shift, values)
        dim_g = (m + 1) * (2 * m + 1) if even else m * (2 * m + 1)
        return LoopModel(str(key), omega, hopf, suspension, base, dim_g, primitives, actions, partials)

    # --- Golden tables --------------------------------------------------------

    def golden_delta_table(self, model_id: Union[str, ModelId]) -> List[Tuple[LoopElement, LoopElement]]:
        """Closed-form Delta values on a generating family, built without the engine."""
        model = self.get(model_id)
        family = ModelId.parse(model.model_id).family
        O, B = model.omega, model.base

        def pure(coeff, left: Mapping[str, int], right: Mapping[str, int]) -> LoopElement:
            if not coeff:
                return model.element()
            return model.element({(O.monomial(left), B.monomial(right)): model.ring.convert(coeff)})

        rows: List[Tuple[LoopElement, LoopElement]] = []
        if family is ModelFamily.CIRCLE_Z:
            for i in range(-8, 9):
                power = {"x": i} if i >= 0 else {"xinv": -i}
                rows.append((pure(1, power, {"a": 1}), pure(i, power, {})))
                rows.append((pure(1, power, {}), model.element()))
        elif family is ModelFamily.S3_Z:
            for i in range(9):
                target = pure(i, {"u": i - 1}, {}) if i else model.element()
                rows.append((pure(1, {"u": i}, {"a": 1}), target))
                rows.append((pure(1, {"u": i}, {}), model.element()))
        elif family in (ModelFamily.RP3_Z, ModelFamily.RP3_Q):
            for i in range(9):
                for j in (0, 1):
                    src = {"u": i, "v": j}
                    target = pure(2 * i, {"u": i - 1, "v": j}, {}) if i else model.element()
                    if family is ModelFamily.RP3_Z:
                        target = target + pure(j, src, {"b": 1})
                        rows.append((pure(1, src, {"b": 1}), model.element()))
                    rows.append((pure(1, src, {"a": 1}), target))
                    rows.append((pure(1, src, {}), model.element()))
        elif family in (ModelFamily.SO_ODD_Q, ModelFamily.SO_EVEN_Q):
            m = ModelId.parse(model.model_id).rank
            for j in range(2 * m):
                for i in range(1, m + 1):
                    k = j - 2 * i + 1
                    target = pure(1, {f"alpha{k}": 1}, {}) if k >= 0 else model.element()
                    rows.append((pure(1, {f"alpha{j}": 1}, {f"beta{4 * i - 1}": 1}), target))
                if family is ModelFamily.SO_EVEN_Q:
                    rows.append((pure(1, {f"alpha{j}": 1}, {f"gamma{2 * m + 1}": 1}), model.element()))
            if family is ModelFamily.SO_EVEN_Q:
                eps = {f"eps{m}": 1}
                rows.append((pure(1, eps, {f"gamma{2 * m + 1}": 1}), pure(1, {}, {})))
                for i in range(1, m + 1):
                    rows.append((pure(1, eps, {f"beta{4 * i - 1}": 1}), model.element()))
        else:
            m = ModelId.parse(model.model_id).rank
            count = m + 1 if family is ModelFamily.SO_EVEN_F2 else m
            for i in range(1, count + 1):
                c = {f"c{2 * i - 1}": 1}
                for j in range(count):
                    target = pure(1, {f"a{j - i + 1}": 1}, {}) if j >= i - 1 else model.element()
                    rows.append((pure(1, {f"a{j}": 1}, c), target))
                for j in range(m):
                    target = pure(1, {f"b{j - i + 1}": 1}, {}) if j >= i - 1 else model.element()
                    rows.append((pure(1, {f"b{j}": 1}, c), target))
        return rows
