"""First-order differential operators and affine observables.

The operator algebra is the common value type of both quantization maps: a
zeroth-order multiplication part plus polynomial coefficients of single
partial derivatives.  The commutator of two such operators is again first
order (the mixed second derivatives cancel by symmetry), which keeps every
operator identity in the package exactly decidable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .chart import Chart, require_same_chart
from .errors import NotInQuantumAlgebra
from .polynomial import PhasePolynomial
from .scalars import GaussianRational


class Space(enum.Enum):
    """Which momentum phase space an observable lives on.

    V: the t-parametrized space with momenta p_1..p_m only.
    T: the homogeneous space that also carries p, the momentum
       conjugate to time.
    """

    V = "V"
    T = "T"


class FirstOrderOperator:
    """zeroth + sum_v coeff_v * d/dv with polynomial coefficients."""

    __slots__ = ("_chart", "_zeroth", "_parts")

    def __init__(self, chart: Chart, zeroth=None, parts=None):
        self._chart = chart
        if zeroth is None:
            zeroth = PhasePolynomial.zero(chart)
        elif not isinstance(zeroth, PhasePolynomial):
            zeroth = PhasePolynomial.constant(chart, zeroth)
        require_same_chart(chart, zeroth)
        clean: dict[int, PhasePolynomial] = {}
        for key, coeff in (parts or {}).items():
            idx = key if isinstance(key, int) else chart.index_of(key)
            if not 0 <= idx < chart.nvars:
                raise ValueError(f"bad variable index {key!r}")
            if not isinstance(coeff, PhasePolynomial):
                coeff = PhasePolynomial.constant(chart, coeff)
            require_same_chart(chart, coeff)
            if not coeff.is_zero():
                prev = clean.get(idx)
                clean[idx] = coeff if prev is None else prev + coeff
                if clean[idx].is_zero():
                    del clean[idx]
        self._zeroth = zeroth
        self._parts = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, chart: Chart) -> "FirstOrderOperator":
        return cls(chart)

    @classmethod
    def identity(cls, chart: Chart) -> "FirstOrderOperator":
        return cls(chart, PhasePolynomial.one(chart))

    @classmethod
    def multiplication(cls, poly: PhasePolynomial) -> "FirstOrderOperator":
        return cls(poly.chart, poly)

    @classmethod
    def derivative(cls, chart: Chart, var, coeff=1) -> "FirstOrderOperator":
        return cls(chart, None, {var: coeff})

    @classmethod
    def vector_field(cls, chart: Chart, components) -> "FirstOrderOperator":
        """Pure derivation (zeroth part zero) with the given components."""
        return cls(chart, None, components)

    # -- structure ----------------------------------------------------------

    @property
    def chart(self) -> Chart:
        return self._chart

    @property
    def zeroth(self) -> PhasePolynomial:
        return self._zeroth

    def part(self, var) -> PhasePolynomial:
        idx = var if isinstance(var, int) else self._chart.index_of(var)
        return self._parts.get(idx, PhasePolynomial.zero(self._chart))

    def parts(self):
        """Iterate (variable index, coefficient) in canonical variable order."""
        for idx in sorted(self._parts):
            yield idx, self._parts[idx]

    def derivative_indices(self) -> set[int]:
        return set(self._parts)

    def is_zero(self) -> bool:
        return self._zeroth.is_zero() and not self._parts

    def is_vector_field(self) -> bool:
        return self._zeroth.is_zero()

    # -- action and algebra -------------------------------------------------

    def apply(self, f: PhasePolynomial) -> PhasePolynomial:
        require_same_chart(self._chart, f)
        out = self._zeroth * f
        for idx, coeff in self._parts.items():
            out = out + coeff * f.diff(idx)
        return out

    def __add__(self, other):
        if not isinstance(other, FirstOrderOperator):
            return NotImplemented
        require_same_chart(self, other)
        parts = dict(self._parts)
        for idx, coeff in other._parts.items():
            parts[idx] = parts[idx] + coeff if idx in parts else coeff
        return FirstOrderOperator(self._chart, self._zeroth + other._zeroth, parts)

    def __sub__(self, other):
        if not isinstance(other, FirstOrderOperator):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "FirstOrderOperator":
        """Multiply by an exact scalar."""
        return FirstOrderOperator(
            self._chart,
            self._zeroth * c,
            {idx: coeff * c for idx, coeff in self._parts.items()},
        )

    def premultiply(self, g: PhasePolynomial) -> "FirstOrderOperator":
        """The operator f -> g * (self f)."""
        return FirstOrderOperator(
            self._chart,
            g * self._zeroth,
            {idx: g * coeff for idx, coeff in self._parts.items()},
        )

    def __eq__(self, other):
        if not isinstance(other, FirstOrderOperator):
            return NotImplemented
        return (
            self._chart == other._chart
            and self._zeroth == other._zeroth
            and self._parts == other._parts
        )

    def __hash__(self):
        return hash(
            (self._chart, self._zeroth, frozenset(self._parts.items()))
        )

    def __str__(self):
        names = self._chart.var_names
        pieces = [
            f"({coeff})*D[{names[idx]}]" for idx, coeff in self.parts()
        ]
        if not self._zeroth.is_zero() or not pieces:
            pieces.append(f"({self._zeroth})")
        return " + ".join(pieces)

    def __repr__(self):
        return f"<FirstOrderOperator {self}>"


def commutator(a: FirstOrderOperator, b: FirstOrderOperator) -> FirstOrderOperator:
    """[a, b] = a b - b a, closed in first order.

    With a = a0 + a_u d_u and b = b0 + b_v d_v the second-order pieces
    a_u b_v d_u d_v cancel between ab and ba, leaving
        zeroth:  a_u d_u(b0) - b_u d_u(a0)
        d_v:     a_u d_u(b_v) - b_u d_u(a_v).
    """
    require_same_chart(a, b)
    chart = a.chart
    zeroth = PhasePolynomial.zero(chart)
    for u, au in a._parts.items():
        zeroth = zeroth + au * b._zeroth.diff(u)
    for u, bu in b._parts.items():
        zeroth = zeroth - bu * a._zeroth.diff(u)
    parts: dict[int, PhasePolynomial] = {}
    for v in set(a._parts) | set(b._parts):
        acc = PhasePolynomial.zero(chart)
        bv = b._parts.get(v)
        av = a._parts.get(v)
        for u, au in a._parts.items():
            if bv is not None and bv.depends_on(u):
                acc = acc + au * bv.diff(u)
        for u, bu in b._parts.items():
            if av is not None and av.depends_on(u):
                acc = acc - bu * av.diff(u)
        if not acc.is_zero():
            parts[v] = acc
    return FirstOrderOperator(chart, zeroth, parts)


@dataclass(frozen=True)
class AffineObservable:
    """A function affine in momenta: b + sum_k a^k p_k (+ a_t p on space T).

    Coefficients are real polynomials in (t, q) only; this is exactly the
    algebra both quantization maps accept without ordering ambiguity.
    """

    chart: Chart
    space: Space
    a_time: PhasePolynomial  # coefficient of p; forced zero on space V
    a: tuple[PhasePolynomial, ...]  # coefficients of p_1..p_m
    b: PhasePolynomial

    def __post_init__(self):
        chart = self.chart
        if len(self.a) != chart.dim:
            raise ValueError("one momentum coefficient per position coordinate")
        for c in (self.a_time, *self.a, self.b):
            require_same_chart(chart, c)
            if not c.is_momentum_free():
                raise NotInQuantumAlgebra(
                    "affine coefficients must not involve momenta"
                )
            if not c.is_real():
                raise NotInQuantumAlgebra("affine coefficients must be real")
        if self.space is Space.V and not self.a_time.is_zero():
            raise NotInQuantumAlgebra(
                "an observable on space V cannot carry the momentum p"
            )

    @classmethod
    def from_polynomial(cls, f: PhasePolynomial, space: Space) -> "AffineObservable":
        chart = f.chart
        if f.momentum_degree() > 1:
            raise NotInQuantumAlgebra(
                f"momentum degree {f.momentum_degree()} > 1: {f}"
            )
        if not f.is_real():
            raise NotInQuantumAlgebra(f"not real: {f}")
        p_idx = chart.p_index
        a_time = f.diff(p_idx)
        if a_time.depends_on(p_idx):
            raise NotInQuantumAlgebra(f"not affine in p: {f}")
        a = tuple(f.diff(chart.momentum_index(i)) for i in range(chart.dim))
        b = f
        for i, ai in enumerate(a):
            b = b - ai * chart.var(chart.momentum_names()[i])
        b = b - a_time * chart.var("p")
        if not b.is_momentum_free():
            raise NotInQuantumAlgebra(f"momentum coefficients not affine: {f}")
        if space is Space.V and not a_time.is_zero():
            raise NotInQuantumAlgebra(
                f"depends on p but was declared on space V: {f}"
            )
        return cls(chart, space, a_time, a, b)

    def to_polynomial(self) -> PhasePolynomial:
        chart = self.chart
        out = self.b + self.a_time * chart.var("p")
        for name, ai in zip(chart.momentum_names(), self.a):
            out = out + ai * chart.var(name)
        return out

    def restrict_time(self, t) -> "AffineObservable":
        """Freeze t to an exact scalar (the instantwise view)."""
        sub = {self.chart.time: t}
        return AffineObservable(
            self.chart,
            self.space,
            self.a_time.substitute(sub),
            tuple(ai.substitute(sub) for ai in self.a),
            self.b.substitute(sub),
        )

    def __str__(self):
        return str(self.to_polynomial())
