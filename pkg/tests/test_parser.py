import pytest

from src.exceptions import ParseError, UnknownGeneratorError, ValidationError
from src.models import Scalar
from src.parser import parse, parse_element, parse_loop, tokenize
from src.services.verification_service import RandomSampler
from tests.helpers import pure


def test_tokenize():
    kinds = [t.kind for t in tokenize("x^-2 (x) a")]
    assert kinds == ["ident", "^", "-", "number", "tensor", "ident", "end"]
    with pytest.raises(ParseError) as info:
        tokenize("x # a")
    assert info.value.position == 2


def test_tensor_expressions(catalog):
    circle = catalog.get("Circle_Z")
    assert parse_loop("x^2 (x) a", circle) == pure(circle, 1, {"x": 2}, {"a": 1})
    assert parse_loop("x^-1", circle) == pure(circle, 1, {"xinv": 1})
    assert parse_loop("x^-1 * x", circle) == circle.unit()

    rp3 = catalog.get("RP3_Z")
    e = parse_loop("u*v (x) a + u (x) b", rp3)
    assert len(e.terms) == 2
    assert parse_loop("3*u (x) b", rp3) == pure(rp3, 1, {"u": 1}, {"b": 1})

    so5 = catalog.get("SO_odd_Q(2)")
    assert str(parse_loop("alpha1^2 (x) 1", so5)) == "2*alpha0*alpha2 (x) 1"
    assert str(parse_loop("beta7*beta3", so5)) == "-1 (x) beta3*beta7"


def test_scalars_and_lifts(catalog):
    so3 = catalog.get("SO_odd_Q(1)")
    assert str(parse_loop("1/2*alpha1", so3)) == "1/2*alpha1 (x) 1"
    assert str(parse_loop("3", so3)) == "3 (x) 1"
    assert parse_loop("(alpha1 + 1) (x) beta3", so3) == pure(so3, 1, {"alpha1": 1}, {"beta3": 1}) + \
        pure(so3, 1, {}, {"beta3": 1})
    assert isinstance(parse("2/3", so3), Scalar)

    with pytest.raises(ValidationError):
        parse_loop("1/2*u", catalog.get("S3_Z"))


def test_single_algebra(catalog):
    omega = catalog.get("S3_Z").omega
    assert parse_element("2*u^2 - u^2", omega) == omega.gen("u", 2)
    assert parse_element("5", omega) == omega.one().scale(5)
    with pytest.raises(ParseError):
        parse_element("u (x) u", omega)


def test_parse_errors(catalog):
    circle = catalog.get("Circle_Z")
    with pytest.raises(ParseError) as info:
        parse_loop("x^2 (x)", circle)
    assert info.value.position == 7
    assert "generator" in info.value.expected

    with pytest.raises(ParseError) as info:
        parse_loop("x + * a", circle)
    assert info.value.position == 4

    with pytest.raises(ParseError) as info:
        parse_loop("x (x) a (x) a", circle)
    assert info.value.position == 8

    with pytest.raises(ParseError, match="Left of"):
        parse_loop("a (x) 1", circle)

    with pytest.raises(ParseError) as info:
        parse_loop("(x + a", circle)
    assert info.value.expected == [")"]


def test_unknown_generator(catalog):
    with pytest.raises(UnknownGeneratorError) as info:
        parse_loop("2*y (x) a", catalog.get("Circle_Z"))
    assert info.value.name == "y"
    assert info.value.position == 2


def test_negative_exponent_needs_inverse(catalog):
    s3 = catalog.get("S3_Z")
    with pytest.raises(ParseError, match="no inverse"):
        parse_loop("u^-1 (x) a", s3)
    with pytest.raises(ParseError, match="invertible"):
        parse_loop("(u + 1)^-2", s3)


@pytest.mark.parametrize("model_id", ["Circle_Z", "RP3_Z", "SO_odd_Q(2)", "SO_even_Q(1)", "SO_odd_F2(2)"])
def test_printed_elements_parse_back(catalog, algebra_service, model_id):
    model = catalog.get(model_id)
    sampler = RandomSampler(model, algebra_service, 3, (-12, 12), seed=11)
    for _ in range(50):
        e = sampler.loop_element()
        assert parse_loop(str(e), model) == e, str(e)
