"""Exact sparse polynomials on momentum phase space.

A `PhasePolynomial` lives on a chart and is a finite sum of monomials in the
variables ``(t, q^1..q^m, p, p_1..p_m)`` with Gaussian-rational coefficients.
Terms are stored sparsely (exponent tuple -> coefficient, never zero), so
equality of polynomials is exact structural equality and every identity test
in the package is an exact proof rather than a float comparison.
"""

from __future__ import annotations

import numpy as np

from ._backend import core
from .chart import Chart, require_same_chart
from .scalars import GaussianRational, _raw_from

_RAW_ZERO = (0, 1, 0, 1)
_RAW_ONE = (1, 1, 0, 1)


class PhasePolynomial:
    __slots__ = ("_chart", "_terms")

    def __init__(self, chart: Chart, terms: dict | None = None, *, _raw=None):
        self._chart = chart
        if _raw is not None:
            self._terms = _raw
            return
        raw = {}
        if terms:
            n = chart.nvars
            for exps, value in terms.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != n or any(e < 0 for e in exps):
                    raise ValueError(f"bad exponent tuple {exps} for {chart}")
                c = _raw_from(value)
                if c[0] != 0 or c[2] != 0:
                    prev = raw.get(exps)
                    raw[exps] = c if prev is None else core.gr_add(prev, c)
                    if raw[exps][0] == 0 and raw[exps][2] == 0:
                        del raw[exps]
        self._terms = raw

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, chart: Chart) -> "PhasePolynomial":
        return cls(chart, _raw={})

    @classmethod
    def one(cls, chart: Chart) -> "PhasePolynomial":
        return cls.constant(chart, 1)

    @classmethod
    def constant(cls, chart: Chart, value) -> "PhasePolynomial":
        c = _raw_from(value)
        if c[0] == 0 and c[2] == 0:
            return cls(chart, _raw={})
        return cls(chart, _raw={(0,) * chart.nvars: c})

    @classmethod
    def variable(cls, chart: Chart, name: str) -> "PhasePolynomial":
        idx = chart.index_of(name)
        exps = tuple(1 if j == idx else 0 for j in range(chart.nvars))
        return cls(chart, _raw={exps: _RAW_ONE})

    @classmethod
    def monomial(cls, chart: Chart, exps, value=1) -> "PhasePolynomial":
        return cls(chart, {tuple(exps): value})

    # -- basic structure ----------------------------------------------------

    @property
    def chart(self) -> Chart:
        return self._chart

    def terms(self):
        """Iterate (exponents, coefficient) in canonical descending order."""
        for exps in sorted(self._terms, reverse=True):
            yield exps, GaussianRational.from_raw(self._terms[exps])

    def coefficient(self, exps) -> GaussianRational:
        raw = self._terms.get(tuple(exps))
        return GaussianRational.from_raw(raw) if raw else GaussianRational(0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (
            len(self._terms) == 1 and (0,) * self._chart.nvars in self._terms
        )

    def constant_value(self) -> GaussianRational:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        raw = self._terms.get((0,) * self._chart.nvars, _RAW_ZERO)
        return GaussianRational.from_raw(raw)

    def is_real(self) -> bool:
        return all(c[2] == 0 for c in self._terms.values())

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def degree_in(self, index: int) -> int:
        return max((e[index] for e in self._terms), default=0)

    def momentum_degree(self) -> int:
        """Max combined degree in p and every p_i over the terms."""
        lo = self._chart.dim + 1
        return max((sum(e[lo:]) for e in self._terms), default=0)

    def depends_on(self, index: int) -> bool:
        return any(e[index] > 0 for e in self._terms)

    def is_momentum_free(self) -> bool:
        return self.momentum_degree() == 0

    def momentum_indices_used(self) -> set[int]:
        lo = self._chart.dim + 1
        used = set()
        for e in self._terms:
            for j in range(lo, len(e)):
                if e[j]:
                    used.add(j)
        return used

    def real_part(self) -> "PhasePolynomial":
        raw = {
            e: (c[0], c[1], 0, 1) for e, c in self._terms.items() if c[0] != 0
        }
        return PhasePolynomial(self._chart, _raw=raw)

    def imag_part(self) -> "PhasePolynomial":
        raw = {
            e: (c[2], c[3], 0, 1) for e, c in self._terms.items() if c[2] != 0
        }
        return PhasePolynomial(self._chart, _raw=raw)

    def conjugate(self) -> "PhasePolynomial":
        raw = {e: core.gr_conj(c) for e, c in self._terms.items()}
        return PhasePolynomial(self._chart, _raw=raw)

    def __len__(self):
        return len(self._terms)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PhasePolynomial):
            require_same_chart(self, other)
            return other
        try:
            return PhasePolynomial.constant(self._chart, other)
        except TypeError:
            return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PhasePolynomial(
            self._chart, _raw=core.terms_add(self._terms, other._terms)
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PhasePolynomial(
            self._chart, _raw=core.terms_sub(self._terms, other._terms)
        )

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PhasePolynomial(
            self._chart, _raw=core.terms_sub(other._terms, self._terms)
        )

    def __mul__(self, other):
        if isinstance(other, PhasePolynomial):
            require_same_chart(self, other)
            return PhasePolynomial(
                self._chart, _raw=core.terms_mul(self._terms, other._terms)
            )
        try:
            c = _raw_from(other)
        except TypeError:
            return NotImplemented
        return PhasePolynomial(self._chart, _raw=core.terms_scale(self._terms, c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            c = _raw_from(other)
        except TypeError:
            return NotImplemented
        return PhasePolynomial(
            self._chart, _raw=core.terms_scale(self._terms, core.gr_inv(c))
        )

    def __neg__(self):
        return PhasePolynomial(self._chart, _raw=core.terms_neg(self._terms))

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        result = PhasePolynomial.one(self._chart)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, PhasePolynomial):
            return self._chart == other._chart and self._terms == other._terms
        try:
            c = _raw_from(other)
        except TypeError:
            return NotImplemented
        return self == PhasePolynomial.constant(
            self._chart, GaussianRational.from_raw(c)
        )

    def __hash__(self):
        return hash((self._chart, frozenset(self._terms.items())))

    # -- calculus -----------------------------------------------------------

    def diff(self, var) -> "PhasePolynomial":
        """Partial derivative with respect to a variable name or index."""
        idx = var if isinstance(var, int) else self._chart.index_of(var)
        return PhasePolynomial(self._chart, _raw=core.terms_diff(self._terms, idx))

    def substitute(self, mapping) -> "PhasePolynomial":
        """Simultaneous substitution name -> polynomial or exact scalar."""
        chart = self._chart
        repl = {}
        for name, value in mapping.items():
            idx = chart.index_of(name)
            if not isinstance(value, PhasePolynomial):
                value = PhasePolynomial.constant(chart, value)
            else:
                require_same_chart(self, value)
            repl[idx] = value
        out = PhasePolynomial.zero(chart)
        for exps, c in self._terms.items():
            term = PhasePolynomial.constant(chart, GaussianRational.from_raw(c))
            for idx, e in enumerate(exps):
                if not e:
                    continue
                if idx in repl:
                    term = term * repl[idx] ** e
                else:
                    mono = {
                        tuple(
                            e if j == idx else 0 for j in range(chart.nvars)
                        ): _RAW_ONE
                    }
                    term = term * PhasePolynomial(chart, _raw=mono)
            out = out + term
        return out

    def evaluate(self, assignment) -> GaussianRational:
        """Exact evaluation; assignment maps every used variable name to a scalar."""
        chart = self._chart
        values = {}
        for name, v in assignment.items():
            values[chart.index_of(name)] = GaussianRational.from_value(v)
        total = GaussianRational(0)
        for exps, c in self._terms.items():
            term = GaussianRational.from_raw(c)
            for idx, e in enumerate(exps):
                if not e:
                    continue
                if idx not in values:
                    raise KeyError(
                        f"no value for {chart.var_names[idx]!r} in assignment"
                    )
                term = term * values[idx] ** e
            total = total + term
        return total

    # -- float views --------------------------------------------------------

    def float_terms(self):
        """(coefficients complex128, exponents int64 array) in canonical order."""
        exps = sorted(self._terms, reverse=True)
        coeffs = np.array(
            [complex(GaussianRational.from_raw(self._terms[e])) for e in exps],
            dtype=np.complex128,
        )
        mat = np.array(exps, dtype=np.int64).reshape(len(exps), self._chart.nvars)
        return coeffs, mat

    def __call__(self, **values):
        """Float evaluation with numpy broadcasting over named variables."""
        arrays = {}
        for name, v in values.items():
            arrays[self._chart.index_of(name)] = np.asarray(v, dtype=float)
        shape = np.broadcast_shapes(*(a.shape for a in arrays.values())) if arrays else ()
        total = np.zeros(shape, dtype=complex)
        for exps, c in self._terms.items():
            term = np.full(shape, complex(GaussianRational.from_raw(c)))
            for idx, e in enumerate(exps):
                if not e:
                    continue
                if idx not in arrays:
                    raise KeyError(
                        f"no value for {self._chart.var_names[idx]!r}"
                    )
                term = term * arrays[idx] ** e
            total = total + term
        if np.all(np.abs(total.imag) == 0.0):
            total = total.real
        return total if shape else total[()]

    # -- formatting ---------------------------------------------------------

    def __str__(self):
        if not self._terms:
            return "0"
        names = self._chart.var_names
        pieces = []
        for exps in sorted(self._terms, reverse=True):
            c = GaussianRational.from_raw(self._terms[exps])
            mono = "*".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(names, exps)
                if e
            )
            negative = (c.real < 0) if c.real != 0 else (c.imag < 0)
            if negative:
                c = -c
            cs = str(c)
            if mono:
                body = mono if cs == "1" else f"{cs}*{mono}"
            else:
                body = cs
            pieces.append(("-" if negative else "+", body))
        sign, body = pieces[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"<PhasePolynomial {self} on {self._chart}>"


def exact_divide(num: PhasePolynomial, den: PhasePolynomial):
    """Return num / den when the division is exact, else None.

    Single-divisor multivariate division in the canonical monomial order;
    exact divisibility holds iff no remainder accumulates.
    """
    require_same_chart(num, den)
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    chart = num.chart
    den_lead = max(den._terms)
    den_lead_c = den._terms[den_lead]
    work = dict(num._terms)
    quot: dict = {}
    while work:
        lead = max(work)
        if any(a < b for a, b in zip(lead, den_lead)):
            return None
        q_exps = tuple(a - b for a, b in zip(lead, den_lead))
        q_c = core.gr_mul(work[lead], core.gr_inv(den_lead_c))
        prev = quot.get(q_exps)
        quot[q_exps] = q_c if prev is None else core.gr_add(prev, q_c)
        piece = core.terms_mul({q_exps: q_c}, den._terms)
        work = core.terms_sub(work, piece)
    return PhasePolynomial(chart, _raw=quot)
