"""Reference frames on a time-fibered configuration space.

A reference frame is the connection ``d_t + Gamma^i(t, q) d_i``; its
components are momentum-free real polynomials.  Frames induce adapted
coordinates through the flow of the time-dependent vector field
``dq/dt = Gamma(t, q)``, and differences of frames are what shift energy
observables and their operators between observers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import Chart, require_same_chart
from .errors import (
    FlowEscape,
    NonInvertibleMap,
    NonPolynomialResult,
    NotProjectable,
    StiffFlow,
)
from .operators import FirstOrderOperator
from .polynomial import PhasePolynomial, exact_divide

_ESCAPE_LIMIT = 1e12


@dataclass(frozen=True)
class ReferenceFrame:
    """Components Gamma^1..Gamma^m, each a real polynomial in (t, q)."""

    chart: Chart
    components: tuple[PhasePolynomial, ...]

    def __post_init__(self):
        chart = self.chart
        if len(self.components) != chart.dim:
            raise ValueError("one component per position coordinate")
        for g in self.components:
            require_same_chart(chart, g)
            if not g.is_momentum_free():
                raise ValueError("frame components cannot involve momenta")
            if not g.is_real():
                raise ValueError("frame components must be real")

    @classmethod
    def zero(cls, chart: Chart) -> "ReferenceFrame":
        z = PhasePolynomial.zero(chart)
        return cls(chart, (z,) * chart.dim)

    @classmethod
    def constant(cls, chart: Chart, values) -> "ReferenceFrame":
        return cls(
            chart,
            tuple(PhasePolynomial.constant(chart, v) for v in values),
        )

    def velocity(self, t: float, q) -> np.ndarray:
        """Float evaluation of Gamma at (t, q)."""
        q = np.atleast_1d(np.asarray(q, dtype=float))
        names = self.chart.coordinate_names()
        kw = {self.chart.time: float(t)}
        kw.update({n: q[i] for i, n in enumerate(names)})
        return np.array([float(g(**kw)) for g in self.components])

    def as_vector_field(self) -> FirstOrderOperator:
        """The connection d_t + Gamma^i d_i as a first-order operator."""
        parts = {self.chart.time: 1}
        for name, g in zip(self.chart.coordinate_names(), self.components):
            parts[name] = g
        return FirstOrderOperator.vector_field(self.chart, parts)

    def __sub__(self, other: "ReferenceFrame"):
        """Componentwise difference (a vertical vector field, kept as a frame)."""
        require_same_chart(self, other)
        return ReferenceFrame(
            self.chart,
            tuple(a - b for a, b in zip(self.components, other.components)),
        )

    def __str__(self):
        body = "; ".join(str(g) for g in self.components)
        return f"Frame[{body}]"


def frame_from_trivialization(chart: Chart, maps) -> ReferenceFrame:
    """Frame induced by an affine trivialization q^i = A(t)^i_k qbar^k + b(t)^i.

    ``maps`` gives q^i as polynomials in (t, q) where the position variables
    play the role of qbar.  The induced components are
    Gamma^i(t, q) = d_t q^i(t, qbar(t, q)); the result must stay polynomial,
    otherwise NonPolynomialResult is raised.  A singular affine part raises
    NonInvertibleMap.
    """
    m = chart.dim
    maps = tuple(maps)
    if len(maps) != m:
        raise ValueError("one map component per position coordinate")
    for f in maps:
        require_same_chart(chart, f)
        if not f.is_momentum_free():
            raise ValueError("trivialization maps cannot involve momenta")
        if not f.is_real():
            raise ValueError("trivialization maps must be real")

    # split f^i = sum_k A[i][k](t) qbar^k + b[i](t), refusing non-affine input
    A = [[None] * m for _ in range(m)]
    b = [None] * m
    for i, f in enumerate(maps):
        rest = f
        for k in range(m):
            idx = chart.coord_index(k)
            coeff = f.diff(idx)
            for j in range(m):
                if coeff.depends_on(chart.coord_index(j)):
                    raise ValueError(f"map component {i} is not affine in qbar")
            A[i][k] = coeff
            rest = rest - coeff * chart.var(chart.coordinate_names()[k])
        for j in range(m):
            if rest.depends_on(chart.coord_index(j)):
                raise ValueError(f"map component {i} is not affine in qbar")
        b[i] = rest

    det = _det(chart, A)
    if det.is_zero():
        raise NonInvertibleMap("affine part is singular for every t")
    adj = _adjugate(chart, A)
    tdx = chart.time_index

    # Gamma^i * det = A'(t) adj(A) (q - b) + det * b'(t)
    qvars = [chart.var(n) for n in chart.coordinate_names()]
    shifted = [qvars[k] - b[k] for k in range(m)]
    components = []
    for i in range(m):
        acc = det * b[i].diff(tdx)
        for j in range(m):
            Aprime_ij = A[i][j].diff(tdx)
            if Aprime_ij.is_zero():
                continue
            for k in range(m):
                acc = acc + Aprime_ij * adj[j][k] * shifted[k]
        quot = exact_divide(acc, det)
        if quot is None:
            raise NonPolynomialResult(
                f"component {i} of the induced frame is not polynomial"
            )
        components.append(quot)
    return ReferenceFrame(chart, tuple(components))


def _det(chart: Chart, M):
    n = len(M)
    if n == 1:
        return M[0][0]
    total = PhasePolynomial.zero(chart)
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        cof = M[0][j] * _det(chart, minor)
        total = total + cof if j % 2 == 0 else total - cof
    return total


def _adjugate(chart: Chart, M):
    n = len(M)
    if n == 1:
        return [[PhasePolynomial.one(chart)]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                row[:j] + row[j + 1 :]
                for r, row in enumerate(M)
                if r != i
            ]
            c = _det(chart, minor)
            adj[j][i] = c if (i + j) % 2 == 0 else -c
    return adj


class FrameFlow:
    """Adapted-coordinate flow: sampled solutions of dq/dt = Gamma(t, q).

    Holds one dense trajectory per initial point; ``forward`` interpolates
    q(t, qbar_i) and ``backward`` recovers qbar from any (t, q) by
    integrating back to t0 (the inverse trivialization).
    """

    def __init__(self, frame, t0, t1, initial_points, tolerance, solutions):
        self.frame = frame
        self.chart = frame.chart
        self.t0 = float(t0)
        self.t1 = float(t1)
        self.initial_points = np.array(initial_points, dtype=float)
        self.tolerance = float(tolerance)
        self._solutions = solutions

    def __len__(self):
        return len(self._solutions)

    def forward(self, t, index: int | None = None, *, wrap: bool = True):
        """q(t, qbar_i) for one stored initial point, or all of them."""
        if index is None:
            return np.array(
                [self.forward(t, i, wrap=wrap) for i in range(len(self))]
            )
        q = np.atleast_1d(self._solutions[index](t))
        return np.asarray(self.chart.wrap_positions(q)) if wrap else q

    def backward(self, t, q):
        """qbar such that the flow from (t0, qbar) reaches (t, q)."""
        sol = _solve_frame_ode(self.frame, float(t), self.t0, q, self.tolerance)
        return np.atleast_1d(sol(self.t0))

    def max_residual(self, samples: int = 33) -> float:
        """max |dq/dt - Gamma(t, q)| over sampled times, via a 5-point stencil."""
        ts = np.linspace(self.t0, self.t1, samples)
        span = self.t1 - self.t0
        h = max(1e-5 * abs(span), 1e-8)
        worst = 0.0
        for i in range(len(self)):
            for t in ts:
                if t - 2 * h < min(self.t0, self.t1) or t + 2 * h > max(
                    self.t0, self.t1
                ):
                    continue
                f = lambda s: self.forward(s, i, wrap=False)
                deriv = (
                    f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)
                ) / (12 * h)
                gamma = self.frame.velocity(t, self.forward(t, i, wrap=False))
                worst = max(worst, float(np.max(np.abs(deriv - gamma))))
        return worst


def _classify_failure(state, domain):
    """Decide whether a solver failure was an escape or genuine stiffness."""
    state = np.asarray(state, dtype=float)
    if not np.all(np.isfinite(state)):
        return FlowEscape("trajectory became non-finite")
    if domain is not None:
        for x, (lo, hi) in zip(state, domain):
            if lo is not None and x < lo or hi is not None and x > hi:
                return FlowEscape(f"trajectory left the domain at {state}")
    if np.any(np.abs(state) > _ESCAPE_LIMIT):
        return FlowEscape("trajectory escaped to large values")
    return StiffFlow("step size underflow before reaching t1")


def _solve_frame_ode(frame, t0, t1, q0, tolerance, domain=None):
    from scipy.integrate import solve_ivp

    names = frame.chart.coordinate_names()
    tname = frame.chart.time

    def rhs(t, y):
        kw = {tname: t}
        kw.update({n: y[i] for i, n in enumerate(names)})
        return [float(g(**kw)) for g in frame.components]

    res = solve_ivp(
        rhs,
        (t0, t1),
        np.atleast_1d(np.asarray(q0, dtype=float)),
        method="DOP853",
        rtol=tolerance,
        atol=tolerance,
        dense_output=True,
    )
    if not res.success:
        raise _classify_failure(res.y[:, -1], domain)
    if domain is not None:
        for t in np.linspace(t0, t1, 65):
            state = res.sol(t)
            for x, (lo, hi) in zip(state, domain):
                if lo is not None and x < lo or hi is not None and x > hi:
                    raise FlowEscape(f"trajectory left the domain at t={t:g}")
    return res.sol


def adapted_flow(
    frame: ReferenceFrame,
    t0: float,
    t1: float,
    initial_points,
    tolerance: float = 1e-10,
    domain=None,
) -> FrameFlow:
    """Integrate the frame's adapted-coordinate ODE from a set of points.

    ``domain``, when given, is a per-coordinate sequence of (lo, hi) bounds
    (None for unbounded); crossing it raises FlowEscape.
    """
    pts = np.atleast_2d(np.asarray(initial_points, dtype=float))
    if pts.shape[1] != frame.chart.dim:
        raise ValueError("initial points have the wrong dimension")
    sols = [
        _solve_frame_ode(frame, t0, t1, p, tolerance, domain) for p in pts
    ]
    return FrameFlow(frame, t0, t1, pts, tolerance, sols)


def relative_velocity(frame: ReferenceFrame, t, q, qdot) -> np.ndarray:
    """Velocity relative to the frame: qdot - Gamma(t, q)."""
    qdot = np.atleast_1d(np.asarray(qdot, dtype=float))
    return qdot - frame.velocity(t, q)


def lift_vector_field(u: FirstOrderOperator) -> FirstOrderOperator:
    """Canonical lift of u = u^t d_t + u^i d_i to the momentum phase space.

    The lift adds -d_i(u^j) p_j on each d/dp_i; it exists only when the
    components are independent of momenta and no momentum derivatives appear.
    """
    chart = u.chart
    if not u.is_vector_field():
        raise NotProjectable("input has a zeroth-order part")
    parts = {}
    comps = {}
    for idx, coeff in u.parts():
        if chart.is_momentum_index(idx):
            raise NotProjectable("input differentiates along momenta")
        if not coeff.is_momentum_free():
            raise NotProjectable("components involve momenta")
        parts[idx] = coeff
        comps[idx] = coeff
    for i in range(chart.dim):
        qi = chart.coord_index(i)
        acc = PhasePolynomial.zero(chart)
        for j in range(chart.dim):
            uj = comps.get(chart.coord_index(j))
            if uj is None or not uj.depends_on(qi):
                continue
            pj = chart.var(chart.momentum_names()[j])
            acc = acc - uj.diff(qi) * pj
        if not acc.is_zero():
            parts[chart.momentum_index(i)] = acc
    return FirstOrderOperator.vector_field(chart, parts)
