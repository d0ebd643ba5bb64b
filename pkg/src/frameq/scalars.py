"""Exact Gaussian-rational scalars: a + b*i with rational a, b."""

from __future__ import annotations

from fractions import Fraction

from ._backend import core


def _raw_from(value) -> tuple:
    """Coerce a value to the backend's raw (re_n, re_d, im_n, im_d) form."""
    if isinstance(value, GaussianRational):
        return value._raw
    if isinstance(value, int):
        return (value, 1, 0, 1)
    if isinstance(value, Fraction):
        return (value.numerator, value.denominator, 0, 1)
    if isinstance(value, float):
        f = Fraction(value)  # exact binary expansion
        return (f.numerator, f.denominator, 0, 1)
    if isinstance(value, complex):
        re = Fraction(value.real)
        im = Fraction(value.imag)
        return (re.numerator, re.denominator, im.numerator, im.denominator)
    raise TypeError(f"cannot interpret {value!r} as an exact scalar")


class GaussianRational:
    """Immutable exact complex number with rational real and imaginary parts."""

    __slots__ = ("_raw",)

    def __init__(self, real=0, imag=0):
        re = Fraction(real)
        im = Fraction(imag)
        self._raw = (
            re.numerator,
            re.denominator,
            im.numerator,
            im.denominator,
        )

    @classmethod
    def from_raw(cls, raw: tuple) -> "GaussianRational":
        obj = object.__new__(cls)
        obj._raw = raw
        return obj

    @classmethod
    def from_value(cls, value) -> "GaussianRational":
        return cls.from_raw(_raw_from(value))

    @property
    def real(self) -> Fraction:
        return Fraction(self._raw[0], self._raw[1])

    @property
    def imag(self) -> Fraction:
        return Fraction(self._raw[2], self._raw[3])

    @property
    def raw(self) -> tuple:
        return self._raw

    def is_zero(self) -> bool:
        return self._raw[0] == 0 and self._raw[2] == 0

    def is_real(self) -> bool:
        return self._raw[2] == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational.from_raw(core.gr_conj(self._raw))

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        try:
            return GaussianRational.from_raw(core.gr_add(self._raw, _raw_from(other)))
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        try:
            return GaussianRational.from_raw(core.gr_sub(self._raw, _raw_from(other)))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        try:
            return GaussianRational.from_raw(core.gr_sub(_raw_from(other), self._raw))
        except TypeError:
            return NotImplemented

    def __mul__(self, other):
        try:
            return GaussianRational.from_raw(core.gr_mul(self._raw, _raw_from(other)))
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            inv = core.gr_inv(_raw_from(other))
        except TypeError:
            return NotImplemented
        return GaussianRational.from_raw(core.gr_mul(self._raw, inv))

    def __rtruediv__(self, other):
        try:
            raw = _raw_from(other)
        except TypeError:
            return NotImplemented
        return GaussianRational.from_raw(core.gr_mul(raw, core.gr_inv(self._raw)))

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = GaussianRational.from_raw(core.RAW_ONE)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __neg__(self):
        return GaussianRational.from_raw(core.gr_neg(self._raw))

    def __pos__(self):
        return self

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            return self._raw == _raw_from(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._raw[2] == 0:
            return hash(self.real)
        return hash((self._raw,))

    def __complex__(self):
        return complex(
            self._raw[0] / self._raw[1], self._raw[2] / self._raw[3]
        )

    def __float__(self):
        if self._raw[2] != 0:
            raise ValueError(f"{self} has a nonzero imaginary part")
        return self._raw[0] / self._raw[1]

    # -- formatting ---------------------------------------------------------

    def __str__(self):
        rn, rd, mn, md = self._raw
        if mn == 0:
            return _frac_str(rn, rd)
        if rn == 0:
            return _imag_str(mn, md)
        sign = "+" if mn > 0 else "-"
        return f"({_frac_str(rn, rd)}{sign}{_imag_str(abs(mn), md)})"

    def __repr__(self):
        return f"GaussianRational({self.real!r}, {self.imag!r})"


def _frac_str(n: int, d: int) -> str:
    return str(n) if d == 1 else f"{n}/{d}"


def _imag_str(n: int, d: int) -> str:
    if d == 1:
        if n == 1:
            return "i"
        if n == -1:
            return "-i"
        return f"{n}i"
    if n == 1:
        return f"i/{d}"
    if n == -1:
        return f"-i/{d}"
    return f"{n}i/{d}"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)
MINUS_I = GaussianRational(0, -1)
HALF = GaussianRational(Fraction(1, 2))
