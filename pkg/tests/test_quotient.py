import pytest

from src.exceptions import (
    InfiniteBasisError,
    PresentationDivergesError,
    UnsupportedRingError,
    ValidationError,
    WindowTooLargeError,
)
from src.models import Element, GeneratorKind, GeneratorSpec, PresentedAlgebra, RewriteRule, RingTag, TorsionRule
from src.models.graded import add_into, mul_free
from src.models.presented import normal_form
from src.services.algebra_service import check_window
from src.services.verification_service import RandomSampler
from tests.helpers import ALL_IDS, FIELD_IDS

EXT = GeneratorKind.EXTERIOR
Q = RingTag.RATIONALS


def _algebra(gens, rules=(), torsions=(), ring=Q):
    """Rules given as (lhs, {monomial: coeff}) with monomials as {generator: exponent}."""
    free = PresentedAlgebra(gens, ring)
    rewrites = [
        RewriteRule.of(free.monomial(lhs), {free.monomial(m): ring.convert(c) for m, c in rhs})
        for lhs, rhs in rules
    ]
    return PresentedAlgebra(gens, ring, rewrites, torsions, name="test")


# --- Normal forms ------------------------------------------------------------

def test_normal_form_examples(catalog):
    omega = catalog.get("SO_odd_Q(2)").omega
    assert str(omega.gen("alpha1", 2)) == "2*alpha0*alpha2"
    assert omega.gen("alpha0", 2) == omega.one()

    base = catalog.get("RP3_Z").base
    b = base.gen("b")
    assert b.scale(3) == b
    assert b.scale(2).is_zero
    assert (base.gen("a") * b).is_zero

    c1 = catalog.get("SO_odd_F2(1)").base.gen("c1")
    assert not (c1 * c1 * c1).is_zero
    assert (c1 * c1 * c1 * c1).is_zero


def test_normal_form_is_idempotent(catalog):
    omega = catalog.get("SO_odd_Q(3)").omega
    e = omega.gen("alpha2", 3) + omega.gen("alpha1", 4).scale(5)
    once = normal_form(e, omega)
    assert normal_form(once, omega) == once
    assert all(omega.is_normal(m) for m in once.terms)


def test_rewrite_cycle_is_reported():
    gens = [GeneratorSpec("x", 2), GeneratorSpec("y", 2)]
    A = _algebra(gens, [({"x": 1}, [({"y": 1}, 1)]), ({"y": 1}, [({"x": 1}, 1)])])
    with pytest.raises(PresentationDivergesError):
        A.gen("x")


def test_step_guard(monkeypatch):
    gens = [GeneratorSpec("x", 2), GeneratorSpec("y", 2), GeneratorSpec("z", 2)]
    rules = [({"x": 1}, [({"y": 1}, 1)]), ({"y": 1}, [({"z": 1}, 1)])]
    monkeypatch.setenv("LOOPALG_STEP_GUARD", "1")
    with pytest.raises(PresentationDivergesError):
        _algebra(gens, rules).gen("x")
    monkeypatch.setenv("LOOPALG_STEP_GUARD", "10")
    assert str(_algebra(gens, rules).gen("x")) == "z"


def test_long_rewrite_chains(monkeypatch):
    # x^2 -> y turns x^3000 into y^1500 through 1500 nested rewrites
    gens = [GeneratorSpec("x", 2), GeneratorSpec("y", 4)]
    rules = [({"x": 2}, [({"y": 1}, 1)])]
    assert str(_algebra(gens, rules).gen("x", 3000)) == "y^1500"
    monkeypatch.setenv("LOOPALG_STEP_GUARD", "1000")
    with pytest.raises(PresentationDivergesError, match="1000 steps"):
        _algebra(gens, rules).gen("x", 3000)

    names = [f"x{i}" for i in range(60)]
    chain = [({a: 1}, [({b: 1}, 1)]) for a, b in zip(names, names[1:])]
    A = _algebra([GeneratorSpec(n, 2) for n in names], chain)
    assert str(A.gen("x0")) == "x59"
    assert str(A.gen("x0") * A.gen("x30")) == "x59^2"


def test_normal_form_memo_is_bounded(monkeypatch):
    monkeypatch.setenv("LOOPALG_CACHE_SIZE", "4")
    A = _algebra([GeneratorSpec("x", 2), GeneratorSpec("y", 4)], [({"x": 2}, [({"y": 1}, 1)])])
    for k in range(2, 20):
        assert str(A.gen("x", 2 * k + 1)) == f"x*y^{k}"
    info = A._monomial_normal_form.cache_info()
    assert info.maxsize == 4
    assert info.currsize == 4


def _free_sum(e1, e2):
    terms = dict(e1.terms)
    for m, c in e2.terms.items():
        add_into(terms, m, c)
    return Element(e1.algebra, terms)


def _sampled_pairs(catalog, algebra_service, model_id):
    sampler = RandomSampler(catalog.get(model_id), algebra_service, 3, (-24, 24), seed=7)
    return sampler.omega_pairs(12), sampler.base_pairs(12)


@pytest.mark.parametrize("model_id", ALL_IDS)
def test_normal_form_of_free_products(catalog, algebra_service, model_id):
    for pairs in _sampled_pairs(catalog, algebra_service, model_id):
        A = pairs[0][0].algebra
        for e1, e2 in pairs:
            assert normal_form(mul_free(e1, e2), A) == normal_form(e1, A) * normal_form(e2, A)
        for (e1, e2), (e3, e4) in zip(pairs, pairs[1:]):
            left, right = mul_free(e1, e2), mul_free(e3, e4)
            assert normal_form(mul_free(left, right), A) == normal_form(left, A) * normal_form(right, A)


@pytest.mark.parametrize("model_id", ALL_IDS)
def test_normal_form_is_additive(catalog, algebra_service, model_id):
    for pairs in _sampled_pairs(catalog, algebra_service, model_id):
        A = pairs[0][0].algebra
        for (e1, e2), (e3, e4) in zip(pairs, pairs[1:]):
            left, right = mul_free(e1, e2), mul_free(e3, e4)
            assert normal_form(_free_sum(left, right), A) == normal_form(left, A) + normal_form(right, A)
            assert normal_form(_free_sum(e1, e3), A) == normal_form(e1, A) + normal_form(e3, A)


# --- Validation --------------------------------------------------------------

def test_validation_rejects_bad_presentations():
    with pytest.raises(ValidationError, match="not homogeneous"):
        _algebra([GeneratorSpec("x", 2), GeneratorSpec("y", 4)], [({"x": 1}, [({"y": 1}, 1)])]).validate()
    with pytest.raises(ValidationError, match="no exponent-bounding rule"):
        _algebra([GeneratorSpec("v", 0)]).validate()
    with pytest.raises(ValidationError, match="must be exterior"):
        _algebra([GeneratorSpec("e", 3)]).validate()
    with pytest.raises(ValidationError, match="share one sign"):
        _algebra([GeneratorSpec("u", 2), GeneratorSpec("a", -3, EXT)]).validate()
    with pytest.raises(ValidationError, match="integer coefficients"):
        _algebra([GeneratorSpec("b", -2)], torsions=[TorsionRule(2, "b")]).validate()
    with pytest.raises(ValidationError, match="not coprime"):
        _algebra([GeneratorSpec("x", 2), GeneratorSpec("y", 4)],
                 [({"x": 2}, [({"y": 1}, 1)]), ({"x": 2}, [])]).validate()


def test_catalog_algebras_validate(catalog):
    for model_id in ALL_IDS:
        model = catalog.get(model_id)
        assert model.omega.validated and model.base.validated


# --- Bases and dimensions -------------------------------------------------------

def test_basis_in_degree_examples(catalog, algebra_service):
    omega = catalog.get("SO_odd_Q(1)").omega
    one, a0 = omega.monomial(), omega.monomial(alpha0=1)
    a1, a0a1 = omega.monomial(alpha1=1), omega.monomial(alpha0=1, alpha1=1)
    assert algebra_service.basis_in_degree(0, omega) == sorted([one, a0])
    assert algebra_service.basis_in_degree(2, omega) == sorted([a1, a0a1])

    base = catalog.get("S3_Z").base
    assert algebra_service.basis_in_degree(-3, base) == [base.monomial(a=1)]


def test_so3_rational_dimensions(catalog, algebra_service):
    omega = catalog.get("SO_odd_Q(1)").omega
    for d in range(-6, 25):
        expected = 2 if d >= 0 and d % 2 == 0 else 0
        assert algebra_service.hilbert_dimension(d, omega) == expected


@pytest.mark.parametrize("model_id", ALL_IDS)
def test_omega_is_even(catalog, algebra_service, model_id):
    omega = catalog.get(model_id).omega
    for d in range(1, 21, 2):
        assert algebra_service.hilbert_dimension(d, omega, word_length=4) == 0


def test_so4_mod2_series(catalog, algebra_service):
    omega = catalog.get("SO_even_F2(1)").omega
    for d in range(11):
        assert algebra_service.hilbert_dimension(2 * d, omega) == 2 * (d + 1)


def test_so6_mod2_series(catalog, algebra_service):
    # 2/((1-t^2)(1-t^4)(1-t^6)): twice the partitions of d into parts 1, 2 and 3
    omega = catalog.get("SO_even_F2(2)").omega
    for d in range(11):
        partitions = sum(1 for j in range(d // 2 + 1) for k in range(d // 3 + 1) if 2 * j + 3 * k <= d)
        assert algebra_service.hilbert_dimension(2 * d, omega) == 2 * partitions


def test_laurent_algebra_needs_word_length(catalog, algebra_service):
    omega = catalog.get("Circle_Z").omega
    assert not omega.is_finite_in_each_degree
    with pytest.raises(InfiniteBasisError):
        algebra_service.basis_in_degree(0, omega)
    basis = algebra_service.basis_in_degree(0, omega, word_length=2)
    assert [omega.format_monomial(m) for m in basis] == ["1", "x^-1", "x^-2", "x", "x^2"]


def test_monomials_up_to_length(catalog, algebra_service):
    omega = catalog.get("S3_Z").omega
    found = algebra_service.monomials_up_to_length(omega, 3, window=(0, 4))
    assert [omega.format_monomial(m) for m in found] == ["1", "u", "u^2"]


# --- Oracle ---------------------------------------------------------------------

@pytest.mark.parametrize("model_id", FIELD_IDS)
def test_oracle_matches_rewriting(catalog, algebra_service, model_id):
    model = catalog.get(model_id)
    for algebra in (model.omega, model.base):
        for d in range(-20, 21):
            assert algebra_service.hilbert_dimension(d, algebra) == algebra_service.oracle_dimension(d, algebra), \
                f"{model_id} {algebra.name} degree {d}"


def test_oracle_needs_a_field(catalog, algebra_service):
    with pytest.raises(UnsupportedRingError):
        algebra_service.oracle_dimension(0, catalog.get("RP3_Z").omega)


def test_hilbert_table_with_oracle(catalog, algebra_service):
    table = algebra_service.hilbert_table(catalog.get("SO_odd_F2(2)"), "omega", (0, 20), oracle=True)
    assert list(table.index) == list(range(21))
    assert (table["dimension"] == table["oracle"]).all()
    assert table.loc[0, "dimension"] == 2


def test_loop_side_table(catalog, algebra_service):
    table = algebra_service.hilbert_table(catalog.get("S3_Z"), "loop", (-3, 2))
    assert table["dimension"].tolist() == [1, 1, 0, 1, 1, 1]


# --- Confluence -----------------------------------------------------------------

@pytest.mark.parametrize("model_id", ALL_IDS)
def test_catalog_presentations_are_confluent(catalog, algebra_service, model_id):
    model = catalog.get(model_id)
    for algebra in (model.omega, model.base):
        assert algebra_service.check_local_confluence(algebra, (-20, 20))["failures"] == []


def test_single_rule_is_confluent(algebra_service):
    A = _algebra([GeneratorSpec("x", 2)], [({"x": 3}, [])])
    assert algebra_service.check_local_confluence(A, (-20, 20))["failures"] == []


def test_confluence_counterexample(algebra_service):
    A = _algebra([GeneratorSpec("x", 2), GeneratorSpec("y", 4)],
                 [({"x": 2}, [({"y": 1}, 1)]), ({"x": 2}, [])])
    report = algebra_service.check_local_confluence(A, (-20, 20))
    assert report["failures"] == [{"monomial": "x^2", "left": "y", "right": "0"}]


def test_exterior_square_overlap(algebra_service):
    gens = [GeneratorSpec("e", 1, EXT), GeneratorSpec("f", 1, EXT), GeneratorSpec("y", 2)]
    A = _algebra(gens, [({"e": 1, "f": 1}, [({"y": 1}, 1)])])
    failures = algebra_service.check_local_confluence(A, (-20, 20))["failures"]
    assert len(failures) == 2


# --- Windows --------------------------------------------------------------------

def test_windows(monkeypatch):
    assert check_window((-24, 24)) == (-24, 24)
    with pytest.raises(ValidationError):
        check_window((5, 1))
    monkeypatch.setenv("LOOPALG_MAX_DEGREE", "10")
    with pytest.raises(WindowTooLargeError):
        check_window((0, 12))
