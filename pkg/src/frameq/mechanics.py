"""Brackets, Hamilton fields, and frame-dependent energy functions.

Sign convention.  The brackets are implemented literally as
    {f, g}_V = d^i(f) d_i(g) - d^i(g) d_i(f)
    {f, g}_T = d^p(f) d_t(g) - d^p(g) d_t(f) + {f, g}_V-part
with d^i = d/dp_i and d^p = d/dp, so {q, p_q}_V = -1 and {p, t}_T = +1.
Every identity checked elsewhere (the commutator condition, evolution
brackets, frame relations) is internally consistent with this choice.
"""

from __future__ import annotations

from .chart import require_same_chart
from .frames import ReferenceFrame
from .operators import FirstOrderOperator
from .polynomial import PhasePolynomial


def _require_real(*polys):
    for f in polys:
        if not f.is_real():
            raise ValueError(f"expected real coefficients: {f}")


def _require_no_p(f: PhasePolynomial, what: str):
    if f.depends_on(f.chart.p_index):
        raise ValueError(f"{what} must not involve the momentum p: {f}")


def poisson_V(f: PhasePolynomial, g: PhasePolynomial) -> PhasePolynomial:
    """Vertical bracket d^i(f) d_i(g) - d^i(g) d_i(f)."""
    require_same_chart(f, g)
    chart = f.chart
    out = PhasePolynomial.zero(chart)
    for i in range(chart.dim):
        qi = chart.coord_index(i)
        pi = chart.momentum_index(i)
        out = out + f.diff(pi) * g.diff(qi) - g.diff(pi) * f.diff(qi)
    return out


def poisson_T(f: PhasePolynomial, g: PhasePolynomial) -> PhasePolynomial:
    """Homogeneous bracket: adds the (p, t) pair to the vertical one."""
    require_same_chart(f, g)
    chart = f.chart
    tdx = chart.time_index
    pdx = chart.p_index
    out = f.diff(pdx) * g.diff(tdx) - g.diff(pdx) * f.diff(tdx)
    return out + poisson_V(f, g)


def covariant_hamiltonian(H: PhasePolynomial) -> PhasePolynomial:
    """p + H on the homogeneous phase space."""
    _require_no_p(H, "a Hamiltonian on V*Q")
    _require_real(H)
    return H.chart.var("p") + H


def hamilton_field(H: PhasePolynomial) -> FirstOrderOperator:
    """d_t + d^k(H) d_k - d_k(H) d^k, the dynamics generated by H."""
    _require_no_p(H, "a Hamiltonian on V*Q")
    _require_real(H)
    chart = H.chart
    parts = {chart.time_index: PhasePolynomial.one(chart)}
    for i in range(chart.dim):
        qi = chart.coord_index(i)
        pi = chart.momentum_index(i)
        dq = H.diff(pi)
        dp = -H.diff(qi)
        if not dq.is_zero():
            parts[qi] = dq
        if not dp.is_zero():
            parts[pi] = dp
    return FirstOrderOperator.vector_field(chart, parts)


def evolution_bracket(H: PhasePolynomial, f: PhasePolynomial) -> PhasePolynomial:
    """Total time derivative of f along the dynamics: {p + H, f}_T.

    Equals d_t f + d^k(H) d_k f - d_k(H) d^k f; on solutions it is df/dt.
    """
    require_same_chart(H, f)
    _require_no_p(f, "an observable on V*Q")
    return poisson_T(covariant_hamiltonian(H), f)


def energy_function(H: PhasePolynomial, frame: ReferenceFrame) -> PhasePolynomial:
    """Energy relative to a frame: E = H - Gamma^i p_i."""
    require_same_chart(H, frame)
    _require_no_p(H, "a Hamiltonian on V*Q")
    chart = H.chart
    out = H
    for name, g in zip(chart.momentum_names(), frame.components):
        out = out - g * chart.var(name)
    return out


def symmetry_current(u: FirstOrderOperator, H: PhasePolynomial) -> PhasePolynomial:
    """Noether current of a projectable field u = u^t d_t + u^i d_i:
    T_u = p_i u^i - u^t H."""
    require_same_chart(u, H)
    _require_no_p(H, "a Hamiltonian on V*Q")
    chart = u.chart
    if not u.is_vector_field():
        raise ValueError("u must have no zeroth-order part")
    out = PhasePolynomial.zero(chart)
    u_t = PhasePolynomial.zero(chart)
    for idx, coeff in u.parts():
        if chart.is_momentum_index(idx):
            raise ValueError("u must be a vector field on the base")
        if not coeff.is_momentum_free():
            raise ValueError("u components cannot involve momenta")
        if idx == chart.time_index:
            u_t = coeff
        else:
            i = idx - 1
            out = out + chart.var(chart.momentum_names()[i]) * coeff
    return out - u_t * H
