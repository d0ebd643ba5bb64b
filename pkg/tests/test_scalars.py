import random
from fractions import Fraction

import pytest

from frameq.scalars import GaussianRational


def test_construction_parts():
    z = GaussianRational(Fraction(3, 4), Fraction(-1, 2))
    assert z.real == Fraction(3, 4)
    assert z.imag == Fraction(-1, 2)
    assert GaussianRational(5).real == 5
    assert GaussianRational(5).imag == 0


def test_floats_enter_exactly():
    # 0.5 and 0.125 are dyadic, so the binary expansion is the exact value
    assert GaussianRational.from_value(0.5).real == Fraction(1, 2)
    assert GaussianRational.from_value(0.125 + 0.25j).imag == Fraction(1, 4)
    # 0.1 is not dyadic; the stored value is float(0.1)'s expansion
    assert GaussianRational.from_value(0.1).real == Fraction(0.1)
    assert GaussianRational.from_value(0.1).real != Fraction(1, 10)


def test_arithmetic_matches_fraction_oracle():
    rng = random.Random(2024)
    for _ in range(300):
        a = Fraction(rng.randint(-50, 50), rng.randint(1, 30))
        b = Fraction(rng.randint(-50, 50), rng.randint(1, 30))
        c = Fraction(rng.randint(-50, 50), rng.randint(1, 30))
        d = Fraction(rng.randint(-50, 50), rng.randint(1, 30))
        x = GaussianRational(a, b)
        y = GaussianRational(c, d)
        s = x + y
        assert s.real == a + c and s.imag == b + d
        m = x * y
        assert m.real == a * c - b * d
        assert m.imag == a * d + b * c
        if not y.is_zero():
            q = x / y
            assert q * y == x


def test_division_and_pow():
    z = GaussianRational(1, 1)
    assert z * z.conjugate() == 2
    assert (1 / z) * z == 1
    assert z**0 == 1
    assert z**2 == GaussianRational(0, 2)
    assert z**5 == z * z * z * z * z
    with pytest.raises(ZeroDivisionError):
        1 / GaussianRational(0)


def test_big_integers_stay_exact():
    huge = 10**40 + 1
    z = GaussianRational(Fraction(huge, 7))
    assert (z * 7).real == huge
    assert (z - z).is_zero()
    w = GaussianRational(huge, huge)
    assert (w * w.conjugate()).real == 2 * huge * huge


def test_predicates_and_conversions():
    assert GaussianRational(0).is_zero()
    assert not GaussianRational(0)
    assert GaussianRational(0, 1)
    assert GaussianRational(3).is_real()
    assert not GaussianRational(0, 1).is_real()
    assert float(GaussianRational(Fraction(1, 4))) == 0.25
    assert complex(GaussianRational(1, -2)) == 1 - 2j
    with pytest.raises(ValueError):
        float(GaussianRational(0, 1))


def test_mixed_comparisons_and_hash():
    assert GaussianRational(Fraction(1, 2)) == Fraction(1, 2)
    assert GaussianRational(2) == 2
    assert GaussianRational(0, 1) != 1
    # real values hash like their Fraction, so dict keys interoperate
    assert hash(GaussianRational(Fraction(1, 2))) == hash(Fraction(1, 2))
    d = {GaussianRational(3): "a"}
    assert d[3] == "a"


def test_str_forms():
    assert str(GaussianRational(3)) == "3"
    assert str(GaussianRational(Fraction(-1, 2))) == "-1/2"
    assert str(GaussianRational(0, 1)) == "i"
    assert str(GaussianRational(0, -1)) == "-i"
    assert str(GaussianRational(0, Fraction(2, 3))) == "2i/3"
    assert str(GaussianRational(Fraction(1, 2), 1)) == "(1/2+i)"
    assert str(GaussianRational(1, -2)) == "(1-2i)"
