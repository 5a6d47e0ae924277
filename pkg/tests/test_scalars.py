import pytest
from hypothesis import given, strategies as st

from src.exceptions import NonInvertibleError, RingMismatchError, ValidationError
from src.models import RingTag, Scalar
from src.models.scalars import add, inv, mul

Q = RingTag.RATIONALS
Z = RingTag.INTEGERS
F2 = RingTag.GF2


@st.composite
def rationals(draw, nonzero=False):
    num = draw(st.integers(-50, 50).filter(lambda n: n != 0) if nonzero else st.integers(-50, 50))
    den = draw(st.integers(1, 30))
    return Scalar.of(Q, f"{num}/{den}")


def scalars(tag):
    if tag is Q:
        return rationals()
    if tag is Z:
        return st.integers(-10**6, 10**6).map(lambda n: Scalar.of(Z, n))
    return st.integers(0, 1).map(lambda n: Scalar.of(F2, n))


def test_examples():
    assert add(Scalar.of(Q, "1/2"), Scalar.of(Q, "1/3")) == Scalar.of(Q, "5/6")
    assert (Scalar.of(F2, 1) + Scalar.of(F2, 1)).is_zero
    assert mul(Scalar.of(Z, -1), Scalar.of(Z, -1)) == Scalar.of(Z, 1)
    assert mul(Scalar.of(Q, 2), Scalar.of(Q, "1/2")).is_one
    assert mul(Scalar.of(F2, 1), Scalar.of(F2, 1)).is_one
    assert inv(Scalar.of(Q, "1/2")) == Scalar.of(Q, 2)
    assert inv(Scalar.of(Z, 1)) == Scalar.of(Z, 1)


def test_integer_two_is_not_invertible():
    with pytest.raises(NonInvertibleError):
        inv(Scalar.of(Z, 2))
    with pytest.raises(NonInvertibleError):
        inv(Scalar.of(Q, 0))


def test_rings_do_not_mix():
    with pytest.raises(RingMismatchError):
        Scalar.of(Q, 1) + Scalar.of(Z, 1)


def test_parse_and_format():
    assert str(Scalar.of(Q, "6/4")) == "3/2"
    assert str(Scalar.of(Q, "-4/2")) == "-2"
    assert str(Scalar.of(F2, 3)) == "1"
    assert Scalar.of(Z, "6/3") == Scalar.of(Z, 2)
    with pytest.raises(ValidationError):
        Scalar.of(Z, "1/2")
    with pytest.raises(ValidationError):
        Scalar.of(Q, "1/0")


@pytest.mark.parametrize("tag", [Q, Z, F2])
def test_json_form(tag):
    s = Scalar.of(tag, 1)
    assert Scalar.from_dict(s.to_dict()) == s


@given(rationals(), rationals(), rationals())
def test_rational_field_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero


@given(rationals(nonzero=True))
def test_rational_inverse(a):
    assert (a * inv(a)).is_one


@pytest.mark.parametrize("tag", [Z, F2])
def test_ring_axioms(tag):
    @given(scalars(tag), scalars(tag), scalars(tag))
    def check(a, b, c):
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c

    check()


@given(scalars(F2))
def test_characteristic_two(a):
    assert (a + a).is_zero
    assert -a == a
