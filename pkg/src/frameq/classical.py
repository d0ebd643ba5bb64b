"""Numerical dynamics: fixed-step integration of the Hamilton equations.

The integrator is plain RK4.  Trajectories here serve as verification
oracles for the symbolic layer, and a fixed step keeps convergence-order
tests clean, so no adaptive or symplectic machinery is used.  Energy and
current conservation are checked through drift tolerances instead.

Symbolic Hamiltonians are compiled to the packed term representation and
run through the backend kernel; callable Hamiltonians fall back to a
Python loop with central-difference derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import math

import numpy as np

from ._backend import core as _kernel
from .chart import Chart, require_same_chart
from .errors import BlowUp
from .polynomial import PhasePolynomial
from .reports import write_rows

# the compiled kernel keeps the state on the stack; beyond this many
# degrees of freedom the pure kernel takes over
_COMPILED_DOF_CAP = 64

_FD_SCALE = 1e-6


@dataclass(frozen=True)
class PhasePoint:
    """A point (t, q^k, p_k) of the momentum phase space over a chart."""

    chart: Chart
    t: float
    q: tuple
    p: tuple

    def __init__(self, chart, t, q, p):
        m = len(chart.coords)
        q = tuple(float(v) for v in q)
        p = tuple(float(v) for v in p)
        if len(q) != m or len(p) != m:
            raise ValueError(
                f"expected {m} positions and momenta, got {len(q)} and {len(p)}"
            )
        t = float(t)
        if not all(map(math.isfinite, (t, *q, *p))):
            raise ValueError("phase point entries must be finite")
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "q", tuple(chart.wrap_positions(q)))
        object.__setattr__(self, "p", p)

    def assignment(self) -> dict:
        """Variable values for float evaluation of momentum-space observables."""
        names = self.chart.var_names
        out = {names[0]: self.t}
        m = len(self.chart.coords)
        for i in range(m):
            out[names[self.chart.coord_index(i)]] = self.q[i]
            out[names[self.chart.momentum_index(i)]] = self.p[i]
        return out

    def __str__(self):
        qs = ", ".join(f"{v:g}" for v in self.q)
        ps = ", ".join(f"{v:g}" for v in self.p)
        return f"(t={self.t:g}; q=({qs}); p=({ps}))"


class Trajectory:
    """A fixed-step solution of the Hamilton equations.

    The raw data lives in a read-only float64 array with rows
    (t, q^1..q^m, p_1..p_m).  Circle coordinates are stored on their
    continuous lift; they are folded back into [0, period) only when a
    :class:`PhasePoint` is materialized.
    """

    __slots__ = ("chart", "data", "step", "method")

    def __init__(self, chart: Chart, data: np.ndarray, step: float, method: str = "rk4"):
        m = len(chart.coords)
        data = np.asarray(data, dtype=float)
        if data.ndim != 2 or data.shape[1] != 1 + 2 * m:
            raise ValueError(f"trajectory rows must have {1 + 2 * m} columns")
        if data.shape[0] >= 2:
            dts = np.diff(data[:, 0])
            if not np.all(dts > 0):
                raise ValueError("trajectory times must increase strictly")
        data = data.copy()
        data.setflags(write=False)
        self.chart = chart
        self.data = data
        self.step = float(step)
        self.method = method

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.data[:, 0]

    def positions(self, i: int) -> np.ndarray:
        """Continuous series of the i-th position coordinate."""
        return self.data[:, 1 + i]

    def momenta(self, i: int) -> np.ndarray:
        m = len(self.chart.coords)
        return self.data[:, 1 + m + i]

    def point(self, index: int) -> PhasePoint:
        m = len(self.chart.coords)
        row = self.data[index]
        return PhasePoint(self.chart, row[0], row[1 : 1 + m], row[1 + m :])

    def __iter__(self) -> Iterator[PhasePoint]:
        return (self.point(i) for i in range(len(self)))

    @property
    def initial(self) -> PhasePoint:
        return self.point(0)

    @property
    def final(self) -> PhasePoint:
        return self.point(-1)

    def column_values(self) -> dict:
        """Series for every chart variable that lives on momentum space."""
        names = self.chart.var_names
        m = len(self.chart.coords)
        out = {names[0]: self.times}
        for i in range(m):
            out[names[self.chart.coord_index(i)]] = self.positions(i)
            out[names[self.chart.momentum_index(i)]] = self.momenta(i)
        return out

    def write_csv(self, path, observables: dict | None = None) -> None:
        """Export as CSV: t, q^1..q^m, p_1..p_m, one column per observable."""
        names = self.chart.var_names
        m = len(self.chart.coords)
        header = [names[0]]
        header += [names[self.chart.coord_index(i)] for i in range(m)]
        header += [names[self.chart.momentum_index(i)] for i in range(m)]
        columns = [self.data[:, j] for j in range(1 + 2 * m)]
        for name in sorted(observables or {}):
            header.append(name)
            columns.append(evaluate_on(observables[name], self))
        write_rows(path, header, zip(*columns))


def _packed_system(hamiltonian: PhasePolynomial):
    """Compile the Hamilton right-hand sides to backend kernel arrays.

    Returns (coeffs, exps, offsets) over the reduced point (t, q, p_k);
    the sign of the momentum equations is baked into the coefficients.
    """
    chart = hamiltonian.chart
    m = len(chart.coords)
    rhs = []
    for i in range(m):
        rhs.append(hamiltonian.diff(chart.momentum_index(i)))
    for i in range(m):
        rhs.append(-hamiltonian.diff(chart.coord_index(i)))
    coeff_parts = []
    exp_parts = []
    offsets = [0]
    keep = [0] + [chart.coord_index(i) for i in range(m)]
    keep += [chart.momentum_index(i) for i in range(m)]
    for poly in rhs:
        coeffs, exps = poly.float_terms()
        coeff_parts.append(coeffs.real)
        exp_parts.append(exps[:, keep] if len(exps) else exps.reshape(0, len(keep)))
        offsets.append(offsets[-1] + len(coeffs))
    coeffs = np.ascontiguousarray(np.concatenate(coeff_parts), dtype=np.float64)
    exps = np.ascontiguousarray(np.concatenate(exp_parts), dtype=np.intc)
    return coeffs, exps, np.asarray(offsets, dtype=np.int64)


def _finite_difference_rhs(hamiltonian: Callable, m: int):
    """Hamilton right-hand sides for a sampled Hamiltonian.

    Derivatives use central differences with step 1e-6 scaled by the
    magnitude of the coordinate being varied.
    """

    def rhs(t, y, out):
        q = y[:m]
        p = y[m:]
        for i in range(m):
            h = _FD_SCALE * max(1.0, abs(p[i]))
            hi = list(p)
            lo = list(p)
            hi[i] += h
            lo[i] -= h
            out[i] = (hamiltonian(t, q, hi) - hamiltonian(t, q, lo)) / (2.0 * h)
        for i in range(m):
            h = _FD_SCALE * max(1.0, abs(q[i]))
            hi = list(q)
            lo = list(q)
            hi[i] += h
            lo[i] -= h
            out[m + i] = -(hamiltonian(t, hi, p) - hamiltonian(t, lo, p)) / (2.0 * h)

    return rhs


def _python_rk4(rhs, t0, y0, dt, nsteps, out):
    n = len(y0)
    y = list(map(float, y0))
    k1, k2, k3, k4, yt = ([0.0] * n for _ in range(5))
    out[0, 0] = t0
    out[0, 1:] = y
    for step in range(1, nsteps + 1):
        t = t0 + (step - 1) * dt
        rhs(t, y, k1)
        for j in range(n):
            yt[j] = y[j] + 0.5 * dt * k1[j]
        rhs(t + 0.5 * dt, yt, k2)
        for j in range(n):
            yt[j] = y[j] + 0.5 * dt * k2[j]
        rhs(t + 0.5 * dt, yt, k3)
        for j in range(n):
            yt[j] = y[j] + dt * k3[j]
        rhs(t + dt, yt, k4)
        ok = True
        for j in range(n):
            y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            if not math.isfinite(y[j]):
                ok = False
        out[step, 0] = t0 + step * dt
        out[step, 1:] = y
        if not ok:
            return step
    return -1


def integrate_hamilton(
    hamiltonian,
    x0: PhasePoint,
    t1: float,
    dt: float,
) -> Trajectory:
    """Integrate dq/dt = dH/dp_k, dp_k/dt = -dH/dq^k by fixed-step RK4.

    ``hamiltonian`` is either a real polynomial on momentum space or a
    callable ``H(t, q, p) -> float``.  The step is adjusted to the nearest
    value that divides ``t1 - x0.t`` exactly, so the final row lands on
    ``t1``.  A state that turns non-finite raises :class:`BlowUp` carrying
    the last good point.
    """
    dt = float(dt)
    if not dt > 0:
        raise ValueError("step size must be positive")
    t0 = x0.t
    span = float(t1) - t0
    if span < 0:
        raise ValueError("integration target must not precede the initial time")
    m = len(x0.chart.coords)
    nsteps = max(1, round(span / dt)) if span > 0 else 0
    step = span / nsteps if nsteps else dt
    out = np.empty((nsteps + 1, 1 + 2 * m), dtype=np.float64)
    y0 = np.array(x0.q + x0.p, dtype=np.float64)

    if isinstance(hamiltonian, PhasePolynomial):
        require_same_chart(hamiltonian, x0)
        if not hamiltonian.is_real():
            raise ValueError("the Hamiltonian must be real")
        if hamiltonian.degree_in(x0.chart.p_index) > 0:
            raise ValueError(
                "the Hamiltonian lives on momentum space and cannot depend on p"
            )
        coeffs, exps, offsets = _packed_system(hamiltonian)
        if nsteps == 0:
            fail = -1
            out[0, 0] = t0
            out[0, 1:] = y0
        elif 2 * m <= _COMPILED_DOF_CAP:
            fail = _kernel.rk4_hamilton(coeffs, exps, offsets, m, t0, y0, step, nsteps, out)
        else:
            from . import _poly_core

            fail = _poly_core.rk4_hamilton(
                coeffs, exps, offsets, m, t0, y0, step, nsteps, out
            )
    elif callable(hamiltonian):
        rhs = _finite_difference_rhs(hamiltonian, m)
        if nsteps == 0:
            fail = -1
            out[0, 0] = t0
            out[0, 1:] = y0
        else:
            fail = _python_rk4(rhs, t0, y0, step, nsteps, out)
    else:
        raise TypeError(
            f"cannot integrate a Hamiltonian of type {type(hamiltonian).__name__}"
        )

    if fail >= 0:
        last = max(fail - 1, 0)
        row = out[last]
        good = PhasePoint(x0.chart, row[0], row[1 : 1 + m], row[1 + m :])
        raise BlowUp(f"state became non-finite after {good}", good)
    return Trajectory(x0.chart, out, step)


def evaluate_on(observable, trajectory: Trajectory) -> np.ndarray:
    """Series of observable values along a trajectory.

    Accepts a momentum-space polynomial or a callable ``f(t, q, p)``.
    """
    if isinstance(observable, PhasePolynomial):
        require_same_chart(observable, trajectory)
        if observable.degree_in(trajectory.chart.p_index) > 0:
            raise ValueError("observables along trajectories cannot depend on p")
        if not observable.is_real():
            raise ValueError("observables along trajectories must be real")
        used = {
            trajectory.chart.var_names[i]
            for exps in (e for e, _ in observable.terms())
            for i, e in enumerate(exps)
            if e
        }
        columns = trajectory.column_values()
        values = observable(**{k: v for k, v in columns.items() if k in used})
        return np.broadcast_to(np.asarray(values, dtype=float), (len(trajectory),)).copy()
    if callable(observable):
        m = len(trajectory.chart.coords)
        data = trajectory.data
        return np.array(
            [
                float(observable(row[0], tuple(row[1 : 1 + m]), tuple(row[1 + m :])))
                for row in data
            ]
        )
    raise TypeError(f"cannot evaluate an observable of type {type(observable).__name__}")


@dataclass(frozen=True)
class ObservableSeries:
    """Values of an observable along a trajectory plus its numerical rate.

    The rate is formed by centered differences in the interior and
    one-sided differences at the two ends, so it matches the true time
    derivative to second order in the step.
    """

    times: np.ndarray
    values: np.ndarray
    derivative: np.ndarray

    def drift(self) -> float:
        """Largest excursion from the initial value."""
        return float(np.max(np.abs(self.values - self.values[0])))


def along_trajectory(observable, trajectory: Trajectory) -> ObservableSeries:
    """Evaluate an observable along a trajectory with its numerical d/dt."""
    values = evaluate_on(observable, trajectory)
    times = np.array(trajectory.times)
    if len(values) >= 2:
        derivative = np.gradient(values, times, edge_order=2 if len(values) >= 3 else 1)
    else:
        derivative = np.zeros_like(values)
    values = np.asarray(values)
    values.setflags(write=False)
    derivative.setflags(write=False)
    times.setflags(write=False)
    return ObservableSeries(times, values, derivative)


@dataclass(frozen=True)
class ConservationVerdict:
    name: str
    conserved: bool
    drift: float
    tolerance: float

    def __str__(self):
        word = "conserved" if self.conserved else "NOT conserved"
        return f"{self.name}: {word} (drift {self.drift:.3e}, tol {self.tolerance:.1e})"


def conservation_report(
    currents: Iterable,
    trajectory: Trajectory,
    tolerance: float,
) -> list:
    """Check each current for conservation along the trajectory.

    A current is conserved when its largest excursion from the initial
    value stays within the tolerance.  Entries may be observables or
    ``(name, observable)`` pairs.
    """
    report = []
    for k, entry in enumerate(currents):
        if isinstance(entry, tuple) and len(entry) == 2 and isinstance(entry[0], str):
            name, obs = entry
        else:
            name, obs = f"current_{k}", entry
        series = along_trajectory(obs, trajectory)
        drift = series.drift()
        report.append(ConservationVerdict(name, drift <= tolerance, drift, tolerance))
    return report
