import dataclasses
import itertools

import pytest

from src.exceptions import DerivationPathUnavailableError, ValidationError
from src.models import ActionTable, Element, Primitive, PrimitiveBasis, SuspensionMap
from src.models.hopf import apply_derivation, coproduct, suspend
from tests.helpers import ALL_IDS, SO_IDS


def _pairs(algebra, monomials):
    one = algebra.domain.one
    return [(Element(algebra, {x: one}), Element(algebra, {y: one}))
            for x, y in itertools.islice(itertools.product(monomials, repeat=2), 400)]


# --- Coproduct and suspension ----------------------------------------------------

def test_coproduct_examples(catalog):
    s3 = catalog.get("S3_Z")
    O = s3.omega
    one, u, u2 = O.monomial(), O.monomial(u=1), O.monomial(u=2)
    assert coproduct(O.gen("u"), s3.hopf).terms == {(u, one): 1, (one, u): 1}
    assert coproduct(O.gen("u", 2), s3.hopf).terms == {(u2, one): 1, (u, u): 2, (one, u2): 1}

    rp3 = catalog.get("RP3_Z")
    v = rp3.omega.monomial(v=1)
    assert coproduct(rp3.omega.gen("v"), rp3.hopf).terms == {(v, v): 1}


def test_suspension_examples(catalog):
    rp3 = catalog.get("RP3_Z")
    O, S = rp3.omega, rp3.suspension
    for j in range(5):
        # rho has order 2
        assert S.suspend_monomial(O.monomial(v=j)) == ({"rho": 1} if j % 2 else {})
        assert S.suspend_monomial(O.monomial(u=1, v=j)) == {"RP3": 2}
        for i in range(2, 5):
            assert S.suspend_monomial(O.monomial(u=i, v=j)) == {}
    assert suspend(O.one(), S) == {}
    assert {p: str(c) for p, c in suspend(O.gen("u"), S).items()} == {"RP3": "2"}


def test_derivation_examples(catalog):
    so5 = catalog.get("SO_odd_Q(2)")
    B = so5.base
    delta1 = so5.actions["a3"]
    assert apply_derivation(delta1, B.gen("beta3") * B.gen("beta7")) == B.gen("beta7")
    assert apply_derivation(delta1, B.one()).is_zero


# --- Derivations from the Hopf data ------------------------------------------------

def test_partial_from_definition(catalog, hopf_service):
    so5 = catalog.get("SO_odd_Q(2)")
    O = so5.omega
    assert hopf_service.partial_from_definition(1, O.gen("alpha1"), so5) == O.gen("alpha0")
    assert hopf_service.partial_from_definition(2, O.gen("alpha1"), so5).is_zero
    assert hopf_service.partial_from_definition(1, O.one(), so5).is_zero

    so6 = catalog.get("SO_even_Q(2)")
    assert hopf_service.odd_primitive(so6, 3).name == "b5"
    assert hopf_service.partial_from_definition(3, so6.omega.gen("eps2"), so6) == so6.omega.one()

    so5_mod2 = catalog.get("SO_odd_F2(2)")
    a1 = so5_mod2.omega.gen("a1")
    assert hopf_service.partial_from_definition(1, a1, so5_mod2) == a1


def test_partial_index_out_of_range(catalog, hopf_service):
    with pytest.raises(ValidationError):
        hopf_service.odd_primitive(catalog.get("S3_Z"), 2)


def test_partial_needs_torsion_free_base(catalog, hopf_service):
    rp3 = catalog.get("RP3_Z")
    assert not rp3.derivation_path_available()
    with pytest.raises(DerivationPathUnavailableError):
        hopf_service.partial_from_definition(1, rp3.omega.gen("u"), rp3)


@pytest.mark.parametrize("model_id", SO_IDS + ["Circle_Z", "S3_Z", "RP3_Q"])
def test_reconstruction_matches_closed_forms(catalog, algebra_service, hopf_service, model_id):
    model = catalog.get(model_id)
    one = model.ring.one
    monomials = algebra_service.monomials_up_to_length(model.omega, 3, (0, 24))
    elements = [Element(model.omega, {m: one}) for m in monomials]
    assert hopf_service.check_reconstruction(model, elements)["failures"] == []


# --- Well-definedness and axioms ----------------------------------------------------

@pytest.mark.parametrize("model_id", ALL_IDS)
def test_structure_respects_relations(catalog, hopf_service, model_id):
    assert hopf_service.check_welldefined(catalog.get(model_id))["failures"] == []


def test_untwisted_suspension_is_not_welldefined(catalog, hopf_service):
    rp3 = catalog.get("RP3_Z")
    primitives = PrimitiveBasis([Primitive("rho", 1), Primitive("RP3", 3)])
    suspension = SuspensionMap(rp3.hopf, primitives, {"u": {"RP3": 2}, "v": {"rho": 1}})
    assert suspension.rule_failures() == ["sigma(v^2) != sigma(1)"]
    broken = dataclasses.replace(rp3, suspension=suspension, primitives=primitives)
    assert hopf_service.check_welldefined(broken)["failures"]


def test_table_ignoring_torsion_is_not_welldefined(catalog, hopf_service):
    rp3 = catalog.get("RP3_Z")
    B = rp3.base
    one = B.domain.one
    b = B.monomial(b=1)
    # 2*b = 0 but 2*T(b) = 2
    unit_valued = ActionTable(B, 2, {b: {B.unit: one}})
    assert unit_valued.rule_failures() == ["table of degree 2 sends b outside its 2-torsion"]
    assert unit_valued.apply(B.gen("b").scale(2)).is_zero
    assert unit_valued.apply_terms({b: one}) == {B.unit: one}

    assert ActionTable(B, 0, {b: {b: one}}).rule_failures() == []
    assert ActionTable(B, 0, {b: {b: one}}).apply_monomial(B.monomial(a=1, b=1)) == {}

    broken = dataclasses.replace(rp3, actions={**rp3.actions, "rho": unit_valued})
    assert hopf_service.check_welldefined(broken)["failures"] == [
        "table of degree 2 sends b outside its 2-torsion"]
    assert hopf_service.check_welldefined(rp3)["failures"] == []


@pytest.mark.parametrize("model_id", ALL_IDS)
def test_hopf_axioms(catalog, algebra_service, hopf_service, model_id):
    model = catalog.get(model_id)
    one = model.ring.one
    monomials = algebra_service.monomials_up_to_length(model.omega, 3, (0, 12))
    elements = [Element(model.omega, {m: one}) for m in monomials]
    assert hopf_service.check_coassociativity(model, monomials)["failures"] == []
    assert hopf_service.check_cocommutativity(model, elements)["failures"] == []
    assert hopf_service.check_counit(model, elements)["failures"] == []
    pairs = _pairs(model.omega, monomials)
    assert hopf_service.check_suspension_decomposables(model, pairs)["failures"] == []


@pytest.mark.parametrize("model_id", ALL_IDS)
def test_leibniz(catalog, algebra_service, hopf_service, model_id):
    model = catalog.get(model_id)
    omega_monomials = algebra_service.monomials_up_to_length(model.omega, 2, (0, 12))
    base_monomials = algebra_service.all_normal_monomials(model.base)
    pairs = _pairs(model.omega, omega_monomials) + _pairs(model.base, base_monomials)
    assert hopf_service.check_leibniz(model, pairs)["failures"] == []
