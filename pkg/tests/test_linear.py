from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from fieldalg.linear import Vector, express_in_span, fmt_rational, parse_rational

keys = st.sampled_from([(1,), (2,), (2, 1), ()])
vectors = st.dictionaries(keys, st.fractions(max_denominator=7)).map(Vector)


def test_zero_coefficients_are_dropped():
    v = Vector({"a": 0, "b": Fraction(2, 2)})
    assert v.terms == {"b": 1}
    assert type(v.coeff("b")) is int
    assert v - v == 0


def test_rational_strings():
    assert fmt_rational(Fraction(-3, 4)) == "-3/4"
    assert fmt_rational(5) == "5/1"
    assert parse_rational("-3/4") == Fraction(-3, 4)


@given(vectors)
def test_json_roundtrip(v):
    assert Vector.from_json(v.to_json()) == v


@given(vectors, vectors, st.fractions(max_denominator=5))
def test_vector_space_laws(u, v, s):
    assert u + v == v + u
    assert (u + v) * s == u * s + v * s
    assert u - u == Vector()


def test_express_in_span():
    span = [Vector({"a": 1, "b": 1}), Vector({"b": 1}), Vector({"a": 2, "b": 3})]
    sols, missing = express_in_span([Vector({"a": 1}), Vector({"c": 1})], span)
    assert missing == [1] and sols[1] is None
    combo = sols[0]
    rebuilt = Vector()
    for i, c in combo.items():
        rebuilt = rebuilt + span[i] * c
    assert rebuilt == Vector({"a": 1})


def test_only_zero_compares_with_scalars():
    assert Vector() == 0
    assert Vector({"a": 1}) != 1
    assert Vector({"a": 1}) != 0
