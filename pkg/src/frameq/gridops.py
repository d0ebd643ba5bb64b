"""Quantized operators on grids: assembly, spectra, and time evolution.

The affine algebra is discretized by the symmetrized product
-(i/2)(a o D + D o a) + b, which is Hermitian exactly because the
first-difference matrices are antisymmetric exactly.  Quadratic kinetic
terms use second-difference matrices; frame terms enter through the
affine path, so the frame-shift relation between energy operators holds
to rounding by linear assembly.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from .chart import Chart
from .errors import HermiticityViolation, NoConvergence, NotHermitian
from .frames import ReferenceFrame
from .grid import DENSE_LIMIT, Grid, GridOperator, WaveFunction
from .operators import AffineObservable, Space
from .polynomial import PhasePolynomial

_EIG_RESIDUAL_TOL = 1e-9
_EXPECT_DISCARD = 1e-10
_EXPECT_FAIL = 1e-8


def _diag(grid: Grid, values, sparse_like) -> object:
    from scipy import sparse

    values = np.broadcast_to(np.asarray(values, dtype=float), (grid.size,))
    if sparse_like:
        return sparse.diags(values.copy(), format="csr")
    return np.diag(values)


def _node_values(poly: PhasePolynomial, grid: Grid, t: float) -> np.ndarray:
    """Evaluate a momentum-free real polynomial on all grid nodes."""
    chart = poly.chart
    coords = grid.coordinate_arrays()
    values = {chart.time: float(t)}
    for i, c in enumerate(chart.coords):
        values[c.name] = coords[i]
    out = poly(**values)
    return np.broadcast_to(np.asarray(out, dtype=float), (grid.size,))


def _check_chart_grid(chart: Chart, grid: Grid) -> None:
    if chart.dim != grid.ndim:
        raise ValueError(
            f"chart has {chart.dim} position coordinates, grid has {grid.ndim} axes"
        )


def discretize_affine(f, grid: Grid, t: float = 0.0) -> GridOperator:
    """Hermitian discretization of an observable affine in momenta.

    Implements the discrete analog of -i a^k d_k - (i/2) d_k a^k + b as
    the symmetrized product -(i/2)(a^k o D_k + D_k o a^k) + b.  The
    coefficients are frozen at time ``t``.
    """
    from scipy import sparse

    if isinstance(f, PhasePolynomial):
        if not f.is_real():
            raise NotHermitian(f"complex coefficients in {f}")
        f = AffineObservable.from_polynomial(f, Space.V)
    if not isinstance(f, AffineObservable):
        raise TypeError(f"cannot discretize {type(f).__name__}")
    if f.space is not Space.V:
        raise ValueError("only momentum-space observables act on fiber grids")
    if not grid.uniform:
        raise ValueError(
            "affine discretization needs uniform node weights; "
            "weighted radial charts build their operator separately"
        )
    _check_chart_grid(f.chart, grid)

    from .grid import axis_d1

    use_sparse = grid.size > DENSE_LIMIT and all(
        ax.scheme == "fd2" for ax in grid.axes
    )
    total = None
    for k, ak in enumerate(f.a):
        if ak.is_zero():
            continue
        a_vals = _node_values(ak, grid, t)
        d1 = axis_d1(grid.axes[k])
        if not use_sparse and sparse.issparse(d1):
            d1 = np.asarray(d1.todense())
        dk = grid.lifted(k, d1)
        if sparse.issparse(dk):
            a_diag = sparse.diags(a_vals, format="csr")
            part = (-0.5j) * (a_diag @ dk + dk @ a_diag)
        else:
            part = (-0.5j) * (a_vals[:, None] * dk + dk * a_vals[None, :])
        total = part if total is None else total + part
    b_vals = _node_values(f.b, grid, t)
    b_part = _diag(grid, b_vals, sparse_like=use_sparse and total is not None)
    if total is None:
        total = b_part.astype(complex) if isinstance(b_part, np.ndarray) else b_part
    else:
        from scipy import sparse as sp

        if sp.issparse(total) != sp.issparse(b_part):
            b_part = (
                np.asarray(b_part.todense()) if sp.issparse(b_part) else b_part
            )
            total = np.asarray(total.todense()) if sp.issparse(total) else total
        total = total + b_part
    return GridOperator(grid, total, hermitian=True)


def _momentum_polynomial(frame: ReferenceFrame) -> PhasePolynomial:
    """The observable Gamma^k p_k of a frame."""
    chart = frame.chart
    out = PhasePolynomial.zero(chart)
    for name, comp in zip(chart.momentum_names(), frame.components):
        out = out + comp * chart.var(name)
    return out


def _potential_values(potential, grid: Grid, t: float) -> np.ndarray:
    if potential is None:
        return np.zeros(grid.size)
    if isinstance(potential, PhasePolynomial):
        if not potential.is_real() or not potential.is_momentum_free():
            raise ValueError("the potential must be real and momentum-free")
        return _node_values(potential, grid, t).copy()
    if callable(potential):
        coords = grid.coordinate_arrays()
        values = potential(*coords)
        return np.broadcast_to(
            np.asarray(values, dtype=float), (grid.size,)
        ).copy()
    raise TypeError(f"cannot evaluate a potential of type {type(potential).__name__}")


def _inverse_mass(mass, m: int) -> np.ndarray:
    mat = np.asarray(mass, dtype=float)
    if mat.ndim == 0:
        mat = np.eye(m) * float(mat)
    if mat.shape != (m, m):
        raise ValueError(f"mass tensor must be {m}x{m}")
    if not np.array_equal(mat, mat.T):
        raise ValueError("mass tensor must be symmetric")
    try:
        np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        raise ValueError("mass tensor must be positive definite") from None
    return np.linalg.inv(mat)


def build_energy_operator(
    mass,
    potential,
    frame: ReferenceFrame | None,
    grid: Grid,
    t: float = 0.0,
) -> GridOperator:
    """Energy operator of a frame: kinetic + potential - (frame momentum).

    The kinetic part is (1/2)(m^-1)^{jk} p_j p_k with second differences
    on the diagonal and products of first differences across axes; the
    frame contributes through the affine discretization of Gamma^k p_k.
    """
    from scipy import sparse

    from .grid import axis_d1, axis_d2

    m = grid.ndim
    minv = _inverse_mass(mass, m)
    use_sparse = grid.size > DENSE_LIMIT and all(
        ax.scheme == "fd2" for ax in grid.axes
    )

    def _lift(idx, mat):
        if not use_sparse and sparse.issparse(mat):
            mat = np.asarray(mat.todense())
        return grid.lifted(idx, mat)

    total = None
    for d in range(m):
        if minv[d, d] == 0.0:
            continue
        part = _lift(d, axis_d2(grid.axes[d])) * (-0.5 * minv[d, d])
        total = part if total is None else total + part
    for d in range(m):
        for e in range(d + 1, m):
            if minv[d, e] == 0.0:
                continue
            cross = _lift(d, axis_d1(grid.axes[d])) @ _lift(e, axis_d1(grid.axes[e]))
            part = cross * (-minv[d, e])
            total = total + part if total is not None else part
    v_vals = _potential_values(potential, grid, t)
    v_part = _diag(grid, v_vals, sparse_like=use_sparse)
    if total is None:
        total = v_part
    else:
        if sparse.issparse(total) != sparse.issparse(v_part):
            total = np.asarray(total.todense()) if sparse.issparse(total) else total
            v_part = np.asarray(v_part.todense()) if sparse.issparse(v_part) else v_part
        total = total + v_part
    out = GridOperator(grid, total, hermitian=True)
    if frame is not None and any(not c.is_zero() for c in frame.components):
        out = out - discretize_affine(_momentum_polynomial(frame), grid, t)
    return out


def frame_shift(
    energy_op: GridOperator,
    frame_from: ReferenceFrame,
    frame_to: ReferenceFrame,
    t: float = 0.0,
    grid: Grid | None = None,
) -> GridOperator:
    """Energy operator in another frame, built from the affine difference.

    Adds the discretization of (Gamma - Gamma')^k p_k to the given
    operator, which for a constant difference G reduces to adding iG D.
    """
    if grid is not None and grid != energy_op.grid:
        raise ValueError("the shift grid does not match the operator grid")
    diff = frame_from - frame_to
    if all(c.is_zero() for c in diff.components):
        return GridOperator(energy_op.grid, energy_op.matrix, energy_op.hermitian)
    shift = discretize_affine(_momentum_polynomial(diff), energy_op.grid, t)
    return energy_op + shift


class EigenPair(NamedTuple):
    value: float
    state: WaveFunction
    residual: float


def eigensolve(op: GridOperator, k: int, target: float | None = None) -> list:
    """The k lowest eigenpairs (or the k nearest a target value).

    States are normalized under the grid weights; each pair carries the
    weighted residual |A psi - lambda psi| / |psi|, which must meet 1e-9
    or :class:`NoConvergence` is raised.
    """
    from scipy import sparse

    grid = op.grid
    if not op.hermitian:
        raise ValueError("eigensolve needs an operator asserted Hermitian")
    if not 1 <= k <= grid.size:
        raise ValueError(f"cannot extract {k} eigenpairs from size {grid.size}")

    s = np.sqrt(grid.weights) if not grid.uniform else None
    mat = op.matrix
    if s is not None:
        if sparse.issparse(mat):
            mat = sparse.diags(s) @ mat @ sparse.diags(1.0 / s)
        else:
            mat = (s[:, None] * mat) / s[None, :]

    if sparse.issparse(mat) and grid.size > DENSE_LIMIT:
        from scipy.sparse.linalg import eigsh

        try:
            if target is None:
                vals, vecs = eigsh(mat, k=k, which="SA")
            else:
                vals, vecs = eigsh(mat, k=k, sigma=target, which="LM")
        except Exception as exc:
            raise NoConvergence(f"sparse eigensolver failed: {exc}") from exc
    else:
        from scipy.linalg import eigh

        dense = np.asarray(mat.todense()) if sparse.issparse(mat) else mat
        dense = np.ascontiguousarray(dense, dtype=complex)
        if target is None:
            vals, vecs = eigh(dense, subset_by_index=(0, k - 1))
        else:
            vals, vecs = eigh(dense)
            order = np.argsort(np.abs(vals - target), kind="stable")[:k]
            order = order[np.argsort(vals[order], kind="stable")]
            vals, vecs = vals[order], vecs[:, order]

    pairs = []
    worst = 0.0
    for i in range(len(vals)):
        u = vecs[:, i]
        psi_vals = u / s if s is not None else u
        psi = WaveFunction(grid, psi_vals)
        nrm = psi.norm()
        psi = WaveFunction(grid, psi.values / nrm)
        image = op.apply(psi)
        resid = (image - psi * vals[i]).norm()
        worst = max(worst, resid)
        pairs.append(EigenPair(float(vals[i]), psi, float(resid)))
    pairs.sort(key=lambda pair: pair.value)
    if worst > _EIG_RESIDUAL_TOL:
        raise NoConvergence(
            f"eigenpair residual {worst:.3e} exceeds {_EIG_RESIDUAL_TOL:.1e}",
            residual=worst,
        )
    return pairs


class EvolutionResult(NamedTuple):
    times: np.ndarray
    norms: np.ndarray
    states: list
    expectations: dict


def evolve(
    energy,
    psi0: WaveFunction,
    t1: float,
    dt: float,
    t0: float = 0.0,
    store_every: int = 0,
    observables: dict | None = None,
) -> EvolutionResult:
    """Crank-Nicolson evolution (1 + i dt E/2) psi' = (1 - i dt E/2) psi.

    ``energy`` is a fixed Hermitian operator or a builder ``t ->
    GridOperator``; a builder is re-assembled at each midpoint time,
    which keeps the stepping second order for time-dependent generators.
    Norms are recorded every step, states every ``store_every`` steps
    (plus the final state), expectation values of the given operators at
    every recorded step.
    """
    from scipy import sparse

    if not dt > 0:
        raise ValueError("step size must be positive")
    span = float(t1) - float(t0)
    if span < 0:
        raise ValueError("evolution target must not precede the start time")
    nsteps = max(1, round(span / dt)) if span > 0 else 0
    step = span / nsteps if nsteps else dt
    grid = psi0.grid
    observables = observables or {}

    static = isinstance(energy, GridOperator)
    if not static and not callable(energy):
        raise TypeError("energy must be a GridOperator or a builder t -> GridOperator")

    def _solver_for(op: GridOperator):
        mat = op.matrix
        n = grid.size
        if sparse.issparse(mat):
            from scipy.sparse.linalg import splu

            ident = sparse.identity(n, format="csc", dtype=complex)
            left = (ident + (0.5j * step) * mat).tocsc()
            right = (ident - (0.5j * step) * mat).tocsr()
            try:
                lu = splu(left)
            except RuntimeError as exc:
                raise NoConvergence(f"linear solve failed: {exc}") from exc
            return lambda v: lu.solve(right @ v)
        from scipy.linalg import lu_factor, lu_solve

        ident = np.eye(n, dtype=complex)
        left = ident + (0.5j * step) * mat
        right = ident - (0.5j * step) * mat
        try:
            factor = lu_factor(left)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"linear solve failed: {exc}") from exc
        return lambda v: lu_solve(factor, right @ v)

    solver = _solver_for(energy) if static else None

    psi = psi0.copy()
    times = np.empty(nsteps + 1)
    norms = np.empty(nsteps + 1)
    times[0] = t0
    norms[0] = psi.norm()
    recorded = {name: [expectation(obs, psi)] for name, obs in observables.items()}
    states = [(float(t0), psi.copy())] if store_every else []

    for n in range(1, nsteps + 1):
        t_mid = t0 + (n - 0.5) * step
        advance = solver if static else _solver_for(energy(t_mid))
        psi = WaveFunction(grid, advance(psi.values))
        times[n] = t0 + n * step
        norms[n] = psi.norm()
        for name, obs in observables.items():
            recorded[name].append(expectation(obs, psi))
        if store_every and (n % store_every == 0) and n != nsteps:
            states.append((float(times[n]), psi.copy()))
    if not states or states[-1][0] != float(times[-1]):
        states.append((float(times[-1]), psi))
    expectations = {name: np.array(v) for name, v in recorded.items()}
    return EvolutionResult(times, norms, states, expectations)


def boost_eigenstate(psi: WaveFunction, amounts) -> WaveFunction:
    """Multiply by exp(-i A_k q^k); the pointwise modulus is unchanged."""
    grid = psi.grid
    amounts = np.asarray(amounts, dtype=float).reshape(-1)
    if len(amounts) != grid.ndim:
        raise ValueError(
            f"need one boost amount per axis: got {len(amounts)} for {grid.ndim}"
        )
    phase = np.zeros(grid.size)
    for a, x in zip(amounts, grid.coordinate_arrays()):
        if a:
            phase = phase + a * x
    return WaveFunction(grid, psi.values * np.exp(-1j * phase))


def expectation(op: GridOperator, psi: WaveFunction) -> float:
    """Weighted <psi | A psi>; the imaginary part must be noise."""
    value = psi.inner(op.apply(psi))
    scale = max(1.0, abs(value))
    if abs(value.imag) > _EXPECT_FAIL * scale:
        raise HermiticityViolation(
            f"expectation value has imaginary part {value.imag:.3e}"
        )
    return float(value.real)


def radial_operator(
    potential,
    angular: int,
    mass: float,
    grid: Grid,
) -> GridOperator:
    """Radial energy operator with centrifugal term l(l+1)/(m r^2).

    The continuum operator is (1/m)(-(1/r) d_r - (1/2) d_r^2 + l(l+1)/r^2)
    + V(r).  On a unit-weight grid it is conjugated by r, which removes
    the first-derivative term and yields a symmetric matrix with the same
    spectrum; on a grid weighted by r^2 h the operator is represented
    directly and is Hermitian under that weight.  Both forms are exactly
    similar, so eigenvalues agree to rounding.
    """
    if angular < 0:
        raise ValueError("the angular number must be a nonnegative integer")
    if not mass > 0:
        raise ValueError("mass must be positive")
    if grid.ndim != 1:
        raise ValueError("the radial operator lives on a one-axis grid")
    axis = grid.axes[0]
    if axis.bc != "dirichlet":
        raise ValueError("the radial grid must be dirichlet at both ends")
    r = grid.coordinate_arrays()[0]
    if r[0] <= 0.0:
        raise ValueError("the radial grid must exclude r = 0")

    from scipy import sparse

    from .grid import axis_d2

    d2 = axis_d2(axis)
    if sparse.issparse(d2) and grid.size <= DENSE_LIMIT:
        d2 = np.asarray(d2.todense())
    if potential is None:
        v_vals = np.zeros(grid.size)
    elif callable(potential):
        v_vals = np.broadcast_to(
            np.asarray(potential(r), dtype=float), (grid.size,)
        ).copy()
    else:
        raise TypeError("the radial potential must be a callable of r or None")
    diag_vals = angular * (angular + 1) / (mass * r * r) + v_vals

    if sparse.issparse(d2):
        core = (-0.5 / mass) * d2 + sparse.diags(diag_vals, format="csr")
    else:
        core = (-0.5 / mass) * d2 + np.diag(diag_vals)
    if grid.uniform:
        return GridOperator(grid, core, hermitian=True)

    expected = r * r * axis.h
    if not np.allclose(grid.weights, expected, rtol=1e-12, atol=0.0):
        raise ValueError(
            "a weighted radial grid must carry weights r^2 h; "
            "use radial_measure_grid to build one"
        )
    if sparse.issparse(core):
        mat = sparse.diags(1.0 / r) @ core @ sparse.diags(r)
    else:
        mat = (core * r[None, :]) / r[:, None]
    return GridOperator(grid, mat, hermitian=True)


def radial_measure_grid(rmax: float, n: int, scheme: str = "fd2") -> Grid:
    """A radial grid whose inner product carries the r^2 volume weight."""
    from .grid import Axis

    axis = Axis(0.0, float(rmax), n, bc="dirichlet", scheme=scheme)
    r = axis.nodes()
    return Grid((axis,), weights=r * r * axis.h)
