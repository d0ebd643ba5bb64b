import random
from fractions import Fraction

import pytest

from frameq import Chart, parse_polynomial
from frameq.errors import ExpressionError
from frameq.scalars import GaussianRational

CH = Chart(("q",))
CH2 = Chart(("x", "y"))


def test_literals_are_exact():
    assert parse_polynomial(CH, "0.3").constant_value() == Fraction(3, 10)
    assert parse_polynomial(CH, "1/3").constant_value() == Fraction(1, 3)
    assert parse_polynomial(CH, "2.50").constant_value() == Fraction(5, 2)
    assert parse_polynomial(CH, "i^2").constant_value() == -1


def test_grammar_shapes():
    q = CH.var("q")
    p = CH.var("p_q")
    t = CH.var("t")
    assert parse_polynomial(CH, "q^2/2") == q * q / 2
    assert parse_polynomial(CH, "p_q^2/2 + q^2/2") == (p * p + q * q) / 2
    assert parse_polynomial(CH, "-q + - q") == -2 * q
    assert parse_polynomial(CH, "(1+2)*(q - 3)") == 3 * q - 9
    assert parse_polynomial(CH, "2*t*q^3") == 2 * t * q**3
    assert parse_polynomial(CH, "q^0") == parse_polynomial(CH, "1")


def test_complex_literals():
    q = CH.var("q")
    i = GaussianRational(0, 1)
    assert parse_polynomial(CH, "i*q") == i * q
    assert parse_polynomial(CH, "(1/2 + i)*q") == (Fraction(1, 2) + i) * q
    assert parse_polynomial(CH, "2/3*i*q") == Fraction(2, 3) * i * q


def test_roundtrip_through_str():
    """Real polynomials print in a form the parser reads back unchanged."""
    rng = random.Random(31)
    vars2 = CH2.variables()
    for _ in range(80):
        poly = sum(
            (
                Fraction(rng.randint(-5, 5), rng.randint(1, 4))
                * vars2[rng.randrange(len(vars2))] ** rng.randint(0, 2)
                * vars2[rng.randrange(len(vars2))] ** rng.randint(0, 2)
                for _ in range(4)
            ),
            CH2.var("t") * 0,
        )
        assert parse_polynomial(CH2, str(poly)) == poly


def test_error_positions():
    cases = [
        ("q/p_q", "division"),
        ("1/0", "zero"),
        ("z + 1", "unknown"),
        ("q^-1", "exponent"),
        ("q @ 2", None),
        ("", None),
        ("(q", None),
        ("q +", None),
    ]
    for text, hint in cases:
        with pytest.raises(ExpressionError) as err:
            parse_polynomial(CH, text)
        if hint:
            assert hint in str(err.value).lower()


def test_error_carries_position():
    with pytest.raises(ExpressionError) as err:
        parse_polynomial(CH, "q + zz")
    assert err.value.position == 4


def test_division_by_constant_subexpression():
    # divisor must reduce to a nonzero constant, even when parenthesized
    q = CH.var("q")
    assert parse_polynomial(CH, "q/(1/2)") == 2 * q
    with pytest.raises(ExpressionError):
        parse_polynomial(CH, "q/(1-1)")
    with pytest.raises(ExpressionError):
        parse_polynomial(CH, "q/(q-q+2-2)")
