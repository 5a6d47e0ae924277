import dataclasses
import itertools
from concurrent.futures import ThreadPoolExecutor

import pytest

from src.exceptions import (
    DerivationPathUnavailableError,
    NonHomogeneousError,
    PathDisagreementError,
    UnsupportedRingError,
    ValidationError,
)
from src.models import ActionTable
from src.models.loop import bv_delta, loop_product
from src.repositories import CatalogRepository
from src.services import BVService
from src.services.verification_service import RandomSampler
from tests.helpers import ALL_IDS, FIELD_IDS, SO_IDS, pure

WINDOW = (-24, 24)


def _small_basis(model, powers, base_monomials):
    """pure tensors omega-monomial (x) base-monomial, monomials as {generator: exponent}."""
    return [pure(model, 1, a, x) for a in powers for x in base_monomials]


# --- Loop product -----------------------------------------------------------------

def test_loop_product_examples(catalog):
    circle = catalog.get("Circle_Z")
    x_a = pure(circle, 1, {"x": 1}, {"a": 1})
    assert loop_product(circle.unit(), x_a) == x_a
    assert loop_product(pure(circle, 1, {"x": 1}), x_a) == pure(circle, 1, {"x": 2}, {"a": 1})
    assert loop_product(pure(circle, 1, {"x": 1}), pure(circle, 1, {"xinv": 1})) == circle.unit()

    s3 = catalog.get("S3_Z")
    u_a = pure(s3, 1, {"u": 1}, {"a": 1})
    assert loop_product(u_a, u_a).is_zero


@pytest.mark.parametrize("model_id", ["S3_Z", "RP3_Z", "SO_odd_Q(2)", "SO_even_F2(2)"])
def test_product_is_graded_commutative_and_associative(catalog, algebra_service, bv_service, model_id):
    model = catalog.get(model_id)
    sampler = RandomSampler(model, algebra_service, 3, WINDOW, seed=7)
    assert bv_service.check_graded_commutativity(model, sampler.loop_pairs(100))["failures"] == []
    assert bv_service.check_associativity(model, sampler.loop_triples(100))["failures"] == []


# --- Delta ------------------------------------------------------------------------

def test_delta_examples(catalog):
    circle = catalog.get("Circle_Z")
    assert bv_delta(pure(circle, 1, {"x": 3}, {"a": 1})) == pure(circle, 3, {"x": 3})
    assert bv_delta(pure(circle, 1, {"xinv": 2}, {"a": 1})) == pure(circle, -2, {"xinv": 2})
    assert bv_delta(pure(circle, 1, {"x": 3})).is_zero

    s3 = catalog.get("S3_Z")
    assert bv_delta(pure(s3, 1, {"u": 4}, {"a": 1})) == pure(s3, 4, {"u": 3})

    rp3 = catalog.get("RP3_Z")
    uv_a = pure(rp3, 1, {"u": 1, "v": 1}, {"a": 1})
    assert bv_delta(uv_a) == pure(rp3, 2, {"v": 1}) + pure(rp3, 1, {"u": 1, "v": 1}, {"b": 1})
    assert str(bv_delta(uv_a)) == "2*v (x) 1 + u*v (x) b"
    assert bv_delta(pure(rp3, 1, {"u": 2, "v": 1}, {"b": 1})).is_zero

    so5 = catalog.get("SO_odd_Q(2)")
    assert str(bv_delta(pure(so5, 1, {"alpha1": 1}, {"beta3": 1}))) == "alpha0 (x) 1"

    so3_mod2 = catalog.get("SO_odd_F2(1)")
    for gen in ("a0", "b0"):
        assert bv_delta(pure(so3_mod2, 1, {gen: 1}, {"c1": 1})) == pure(so3_mod2, 1, {gen: 1})


@pytest.mark.parametrize("model_id", ALL_IDS)
def test_golden_table(catalog, bv_service, model_id):
    model = catalog.get(model_id)
    rows = catalog.golden_delta_table(model_id)
    assert rows
    for src, expected in rows:
        assert bv_service.bv_delta(src) == expected, str(src)
        if model.derivation_path_available():
            assert bv_service.bv_delta_derivation_form(src) == expected, str(src)
            assert bv_service.bv_delta_derivation_form(src, closed_form=True) == expected, str(src)


def test_circle_golden_range(catalog):
    rows = catalog.golden_delta_table("Circle_Z")
    assert len(rows) == 2 * 17


@pytest.mark.parametrize("model_id", ALL_IDS)
def test_delta_of_unit_is_zero(catalog, model_id):
    assert bv_delta(catalog.get(model_id).unit()).is_zero


@pytest.mark.parametrize("model_id", ALL_IDS)
def test_delta_squared_vanishes(catalog, bv_service, model_id):
    model = catalog.get(model_id)
    report = bv_service.check_delta_squared(model, 3, WINDOW)
    assert report["tested"] > 0
    assert report["failures"] == []


@pytest.mark.parametrize("model_id", ALL_IDS)
def test_delta_raises_degree_by_one(catalog, bv_service, model_id):
    model = catalog.get(model_id)
    basis = bv_service.tensor_basis(model, 3, WINDOW)
    assert bv_service.check_delta_degree(model, basis)["failures"] == []


@pytest.mark.parametrize("model_id", FIELD_IDS + ["Circle_Z", "S3_Z"])
def test_paths_agree(catalog, bv_service, model_id):
    model = catalog.get(model_id)
    basis = bv_service.tensor_basis(model, 3, WINDOW)
    assert bv_service.check_path_agreement(model, basis)["failures"] == []


def test_evaluate_delta_paths(catalog, bv_service):
    s3 = catalog.get("S3_Z")
    e = pure(s3, 1, {"u": 2}, {"a": 1})
    assert bv_service.evaluate_delta(e, "both") == pure(s3, 2, {"u": 1})
    with pytest.raises(ValidationError):
        bv_service.evaluate_delta(e, "sideways")

    rp3 = catalog.get("RP3_Z")
    with pytest.raises(DerivationPathUnavailableError):
        bv_service.evaluate_delta(pure(rp3, 1, {"u": 1}, {"a": 1}), "deriv")


def test_path_disagreement_is_raised(catalog, monkeypatch):
    service = BVService()
    s3 = catalog.get("S3_Z")
    monkeypatch.setattr(service, "bv_delta_derivation_form", lambda e: e.model.element())
    with pytest.raises(PathDisagreementError):
        service.evaluate_delta(pure(s3, 1, {"u": 1}, {"a": 1}), "both")


def test_sign_corrupted_action_breaks_delta_squared(catalog, bv_service):
    model = catalog.get("SO_odd_Q(2)")
    B = model.base
    one = model.ring.one
    # delta_7(beta3*beta7) is -beta3 in the true model
    corrupted = ActionTable(B, 7, {
        B.monomial(beta7=1): {B.unit: one},
        B.monomial(beta3=1, beta7=1): {B.monomial(beta3=1): one},
    })
    mutant = dataclasses.replace(model, actions={**model.actions, "a7": corrupted})
    e = pure(mutant, 1, {"alpha1": 1, "alpha3": 1}, {"beta3": 1, "beta7": 1})
    assert bv_delta(bv_delta(e)) == pure(mutant, 2)
    assert bv_service.check_delta_squared(mutant, 3, WINDOW, [e])["failures"]
    assert bv_service.check_delta_squared(mutant, 3, WINDOW)["failures"]

    original = pure(model, 1, {"alpha1": 1, "alpha3": 1}, {"beta3": 1, "beta7": 1})
    assert bv_delta(bv_delta(original)).is_zero


def test_delta_on_a_shared_model_from_many_threads(algebra_service):
    serial_model, shared = CatalogRepository().build("SO_odd_Q(2)"), CatalogRepository().build("SO_odd_Q(2)")
    sampler = RandomSampler(serial_model, algebra_service, 3, WINDOW, seed=11)
    elements = [sampler.loop_element() for _ in range(64)]
    expected = [bv_delta(loop_product(e, e)).terms for e in elements]

    def work(e):
        mine = shared.element(e.terms)
        return bv_delta(loop_product(mine, mine)).terms

    with ThreadPoolExecutor(max_workers=8) as pool:
        assert list(pool.map(work, elements)) == expected


# --- Seven-term identity ------------------------------------------------------------

SMALL_BASES = {
    "Circle_Z": ([{"x": i} for i in range(4)] + [{"xinv": i} for i in range(1, 4)], [{}, {"a": 1}]),
    "S3_Z": ([{"u": i} for i in range(4)], [{}, {"a": 1}]),
    "RP3_Z": ([{"u": i, "v": j} for i in range(4) for j in range(2)], [{}, {"a": 1}, {"b": 1}]),
}


@pytest.mark.parametrize("model_id", sorted(SMALL_BASES))
def test_seven_term_exhaustive(catalog, bv_service, model_id):
    model = catalog.get(model_id)
    basis = _small_basis(model, *SMALL_BASES[model_id])
    for a, b, c in itertools.product(basis, repeat=3):
        assert bv_service.check_seven_term(a, b, c), f"({a}, {b}, {c})"


@pytest.mark.parametrize("model_id", SO_IDS)
def test_seven_term_random(catalog, service, model_id):
    model = catalog.get(model_id)
    sampler = RandomSampler(model, service.algebra, 3, WINDOW, seed=0)
    report = service.verification.check_seven_term_random(model, sampler.loop_triples(200))
    assert report["tested"] == 200
    assert report["failures"] == []


def test_seven_term_with_unit(catalog, bv_service):
    model = catalog.get("SO_odd_Q(2)")
    b = pure(model, 1, {"alpha1": 1}, {"beta3": 1})
    c = pure(model, 3, {"alpha2": 1}, {"beta7": 1})
    assert bv_service.check_seven_term(model.unit(), b, c)


def test_seven_term_needs_homogeneous_input(catalog, bv_service):
    s3 = catalog.get("S3_Z")
    mixed = pure(s3, 1, {"u": 1}) + pure(s3, 1, {"u": 1}, {"a": 1})
    with pytest.raises(NonHomogeneousError):
        bv_service.check_seven_term(mixed, s3.unit(), s3.unit())


# --- Bracket ------------------------------------------------------------------------

def test_bracket_examples(catalog, bv_service):
    circle = catalog.get("Circle_Z")
    x_a = pure(circle, 1, {"x": 1}, {"a": 1})
    assert bv_service.bracket(x_a, circle.unit()).is_zero
    assert bv_service.bracket(x_a, x_a).is_zero

    s3 = catalog.get("S3_Z")
    # Delta(u^2 (x) a) - Delta(u (x) a)(u (x) 1) = u, times (-1)^|u (x) a|
    assert bv_service.bracket(pure(s3, 1, {"u": 1}, {"a": 1}), pure(s3, 1, {"u": 1})) == pure(s3, -1, {"u": 1})

    with pytest.raises(NonHomogeneousError):
        bv_service.bracket(pure(s3, 1, {"u": 1}) + s3.unit(), s3.unit())


@pytest.mark.parametrize("model_id", ["S3_Z", "RP3_Z", "SO_odd_Q(2)", "SO_odd_F2(2)"])
def test_bracket_is_a_derivation_in_its_second_slot(catalog, algebra_service, bv_service, model_id):
    model = catalog.get(model_id)
    sampler = RandomSampler(model, algebra_service, 2, (-12, 12), seed=3)
    for a, b, c in sampler.loop_triples(60):
        da, db = a.degree_of(), b.degree_of()
        da = 0 if da == "any" else da
        db = 0 if db == "any" else db
        lhs = bv_service.bracket(a, b * c)
        rhs = bv_service.bracket(a, b) * c + (b * bv_service.bracket(a, c)).scale(model.ring.sign((da - 1) * db))
        assert lhs == rhs


# --- Delta homology ------------------------------------------------------------------

def test_delta_homology_examples(catalog, bv_service):
    rp3 = catalog.get("RP3_Q")
    dims = bv_service.delta_homology_dimensions(rp3, (-3, 0))
    assert dims[-3] == (1, 0)
    assert dims[-2] == (0, 0)
    assert dims[-1] == (0, 0)
    assert dims[0] == (2, 2)

    table = bv_service.delta_homology_table(rp3, (-3, 0))
    assert list(table.columns) == ["kernel", "image", "homology"]
    assert table.loc[0, "homology"] == 0


def test_delta_homology_needs_a_field(catalog, bv_service):
    with pytest.raises(UnsupportedRingError):
        bv_service.delta_homology_dimensions(catalog.get("S3_Z"), (-3, 3))


def test_so3_matches_rp3_rationally(catalog, algebra_service, bv_service):
    so3, rp3 = catalog.get("SO_odd_Q(1)"), catalog.get("RP3_Q")
    for side in ("omega", "base", "loop"):
        left = algebra_service.hilbert_table(so3, side, (-3, 12))
        right = algebra_service.hilbert_table(rp3, side, (-3, 12))
        assert left.equals(right), side
    assert bv_service.delta_homology_dimensions(so3, (-3, 12)) == bv_service.delta_homology_dimensions(rp3, (-3, 12))
