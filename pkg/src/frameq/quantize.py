"""Quantization maps and the exact commutator-condition checker.

Two maps are provided.  The configuration-space map sends an affine
observable b + a^k p_k (plus a_t p on the homogeneous space) to
    -i a^lambda d_lambda - (i/2) d_lambda(a^lambda) + b,
acting on functions of (t, q); the half-divergence term is what makes the
operator symmetric.  The full phase-space map sends any real polynomial f to
    -i (d^lambda(f) d_lambda - d_lambda(f) d^lambda) + (f - p_lambda d^lambda f),
acting on functions of all phase variables.  Both are checked against the
compatibility condition  [f^, g^] = -i ({f, g})^  with the matching bracket;
`check_dirac` decides that condition exactly and returns the witness
operator when it fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .chart import require_same_chart
from .errors import NotInQuantumAlgebra
from .mechanics import poisson_T, poisson_V
from .operators import AffineObservable, FirstOrderOperator, Space, commutator
from .polynomial import PhasePolynomial
from .scalars import GaussianRational

_I = GaussianRational(0, 1)
_MINUS_I = GaussianRational(0, -1)


def _as_affine(f, space: Space) -> AffineObservable:
    if isinstance(f, AffineObservable):
        if f.space is not space:
            raise NotInQuantumAlgebra(
                f"observable declared on space {f.space.value}, wanted {space.value}"
            )
        return f
    return AffineObservable.from_polynomial(f, space)


def schrodinger_op(
    f,
    space: Space = Space.V,
    *,
    _divergence_weight: Fraction = Fraction(1, 2),
) -> FirstOrderOperator:
    """Quantize an affine observable on functions of (t, q).

    ``_divergence_weight`` exists as a test hook: the correct operator uses
    1/2; mutating it must make the commutator-condition suite fail.
    """
    obs = _as_affine(f, space)
    chart = obs.chart
    zeroth = obs.b
    parts = {}
    pairs = []
    if space is Space.T:
        pairs.append((chart.time_index, obs.a_time))
    for i in range(chart.dim):
        pairs.append((chart.coord_index(i), obs.a[i]))
    for idx, a in pairs:
        if not a.is_zero():
            parts[idx] = a * _MINUS_I
        div = a.diff(idx)
        if not div.is_zero():
            zeroth = zeroth + div * (_MINUS_I * _divergence_weight)
    return FirstOrderOperator(chart, zeroth, parts)


def prequantum_op(f: PhasePolynomial, space: Space = Space.V) -> FirstOrderOperator:
    """Quantize a real polynomial on sections over the whole phase space:
    -i (d^lambda f d_lambda - d_lambda f d^lambda) + (f - p_lambda d^lambda f).
    """
    if not f.is_real():
        raise NotInQuantumAlgebra(f"not real: {f}")
    chart = f.chart
    if space is Space.V and f.depends_on(chart.p_index):
        raise NotInQuantumAlgebra(f"depends on p but was declared on space V: {f}")
    pairs = [
        (chart.coord_index(i), chart.momentum_index(i))
        for i in range(chart.dim)
    ]
    if space is Space.T:
        pairs.append((chart.time_index, chart.p_index))
    parts = {}
    zeroth = f
    for base_idx, mom_idx in pairs:
        d_mom = f.diff(mom_idx)
        d_base = f.diff(base_idx)
        if not d_mom.is_zero():
            parts[base_idx] = d_mom * _MINUS_I
            mom = chart.var(chart.var_names[mom_idx])
            zeroth = zeroth - mom * d_mom
        if not d_base.is_zero():
            parts[mom_idx] = d_base * _I
    return FirstOrderOperator(chart, zeroth, parts)


@dataclass(frozen=True)
class DiracResult:
    """Outcome of one commutator-condition check."""

    passed: bool
    lhs: FirstOrderOperator  # [f^, g^]
    rhs: FirstOrderOperator  # -i (bracket)^
    witness: FirstOrderOperator  # lhs - rhs, zero iff passed

    def __bool__(self):
        return self.passed


def check_dirac(f, g, *, map: str = "schrodinger", space: Space = Space.V,
                _divergence_weight: Fraction = Fraction(1, 2)) -> DiracResult:
    """Exactly decide [f^, g^] = -i ({f, g})^ for the chosen map and space."""
    if map == "schrodinger":
        fp = f.to_polynomial() if isinstance(f, AffineObservable) else f
        gp = g.to_polynomial() if isinstance(g, AffineObservable) else g
        require_same_chart(fp, gp)
        # the weight hook corrupts only the operators under test; the
        # reference side always uses the canonical map, so a wrong
        # divergence term shows up as a nonzero witness
        fhat = schrodinger_op(f, space, _divergence_weight=_divergence_weight)
        ghat = schrodinger_op(g, space, _divergence_weight=_divergence_weight)
        bracket = poisson_V(fp, gp) if space is Space.V else poisson_T(fp, gp)
        bhat = schrodinger_op(bracket, space)
    elif map == "prequantum":
        require_same_chart(f, g)
        fhat = prequantum_op(f, space)
        ghat = prequantum_op(g, space)
        bracket = poisson_V(f, g) if space is Space.V else poisson_T(f, g)
        bhat = prequantum_op(bracket, space)
    else:
        raise ValueError(f"unknown quantization map {map!r}")
    lhs = commutator(fhat, ghat)
    rhs = bhat.scale(_MINUS_I)
    witness = lhs - rhs
    return DiracResult(witness.is_zero(), lhs, rhs, witness)


def quantum_connection_bracket(hstar, f) -> FirstOrderOperator:
    """i [H*^, f^]: the covariant time derivative of the operator of f.

    ``hstar`` must be affine on the homogeneous space (quadratic kinetic
    energies belong to the grid engine, not here); ``f`` is affine on the
    t-parametrized space.  A vanishing result is the operator form of a
    conserved observable.
    """
    hs = _as_affine(hstar, Space.T)
    fo = _as_affine(f, Space.V)
    require_same_chart(hs.chart, fo.chart)
    hhat = schrodinger_op(hs, Space.T)
    fhat = schrodinger_op(fo, Space.V)
    return commutator(hhat, fhat).scale(_I)
