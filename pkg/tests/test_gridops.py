import math

import numpy as np
import pytest

from frameq import (
    AffineObservable,
    Axis,
    Chart,
    Grid,
    GridOperator,
    ReferenceFrame,
    Space,
    WaveFunction,
    axis_d1,
    axis_d2,
    boost_eigenstate,
    build_energy_operator,
    discretize_affine,
    eigensolve,
    evolve,
    expectation,
    frame_shift,
    parse_polynomial,
    radial_grid,
    radial_measure_grid,
    radial_operator,
)
from frameq.errors import HermiticityViolation, NoConvergence, NotHermitian

CH = Chart(("q",))
LINE = Grid((Axis(-12.0, 12.0, 96, bc="dirichlet", scheme="spectral"),))
HARMONIC = parse_polynomial(CH, "q^2/2")


def line_energy(frame=None, n=96):
    grid = LINE if n == 96 else Grid(
        (Axis(-12.0, 12.0, n, bc="dirichlet", scheme="spectral"),)
    )
    return build_energy_operator(1.0, HARMONIC, frame, grid), grid


def test_discretize_momentum_is_minus_i_d1():
    grid = Grid((Axis(0.0, 1.0, 16, bc="dirichlet"),))
    op = discretize_affine(CH.var("p_q"), grid)
    d1 = np.asarray(axis_d1(grid.axes[0]).todense())
    assert np.array_equal(op.dense(), -1j * d1)
    assert op.hermitian
    assert op.hermiticity_residual() == 0.0


def test_discretize_symmetrizes_the_coefficient():
    grid = Grid((Axis(0.0, 1.0, 16, bc="dirichlet"),))
    x = grid.coordinate_arrays()[0]
    d1 = np.asarray(axis_d1(grid.axes[0]).todense())
    op = discretize_affine(CH.var("q") * CH.var("p_q"), grid)
    manual = -0.5j * (x[:, None] * d1 + d1 * x[None, :])
    assert np.allclose(op.dense(), manual, atol=0.0)
    assert op.hermiticity_residual() == 0.0


def test_discretize_momentum_free_part_is_diagonal():
    grid = Grid((Axis(0.0, 1.0, 16, bc="dirichlet"),))
    x = grid.coordinate_arrays()[0]
    op = discretize_affine(CH.var("q") ** 2, grid)
    assert np.array_equal(op.dense(), np.diag(x * x).astype(complex))
    frozen = discretize_affine(CH.var("t") * CH.var("q"), grid, t=2.0)
    assert np.array_equal(frozen.dense(), np.diag(2.0 * x).astype(complex))


def test_discretize_time_restriction_commutes():
    grid = Grid((Axis(0.0, 1.0, 16, bc="dirichlet"),))
    f = CH.var("t") * CH.var("q") * CH.var("p_q") + CH.var("q") ** 2
    aff = AffineObservable.from_polynomial(f, Space.V)
    direct = discretize_affine(f, grid, t=1.7)
    restricted = discretize_affine(aff.restrict_time(1.7).to_polynomial(), grid)
    assert np.array_equal(direct.dense(), restricted.dense())


def test_discretize_rejections():
    grid = Grid((Axis(0.0, 1.0, 16, bc="dirichlet"),))
    with pytest.raises(NotHermitian):
        discretize_affine(parse_polynomial(CH, "i*q"), grid)
    with pytest.raises(TypeError):
        discretize_affine("p_q", grid)
    covariant = AffineObservable.from_polynomial(CH.var("p"), Space.T)
    with pytest.raises(ValueError):
        discretize_affine(covariant, grid)
    weighted = Grid((grid.axes[0],), weights=np.arange(1.0, 17.0))
    with pytest.raises(ValueError):
        discretize_affine(CH.var("p_q"), weighted)
    two = Chart(("x", "y"))
    with pytest.raises(ValueError):
        discretize_affine(two.var("p_x"), grid)


def test_fd2_dirichlet_kinetic_spectrum_closed_form():
    # lowest modes of -(1/2) D2 on (0, 1): 2 sin^2(k pi h / 2) / h^2
    n = 63
    grid = Grid((Axis(0.0, 1.0, n, bc="dirichlet", scheme="fd2"),))
    op = build_energy_operator(1.0, None, None, grid)
    h = grid.axes[0].h
    pairs = eigensolve(op, 5)
    for k, pair in enumerate(pairs, start=1):
        exact = 2.0 * math.sin(k * math.pi * h / 2.0) ** 2 / h**2
        assert abs(pair.value - exact) < 1e-8
        assert pair.residual < 1e-9


def test_energy_operator_matches_manual_assembly():
    op, grid = line_energy()
    d2 = axis_d2(grid.axes[0])
    x = grid.coordinate_arrays()[0]
    manual = -0.5 * d2 + np.diag(x * x / 2.0)
    assert np.array_equal(op.dense(), manual)
    values = [p.value for p in eigensolve(op, 3)]
    assert np.allclose(values, [0.5, 1.5, 2.5], atol=1e-8)


def test_matrix_mass_kinetic_term():
    ax = Axis(0.0, 2 * math.pi, 16, bc="periodic", scheme="spectral")
    grid = Grid((ax, ax))
    mass = [[1.0, 0.5], [0.5, 1.0]]
    op = build_energy_operator(mass, None, None, grid)
    assert op.hermiticity_residual() < 1e-14
    x, y = grid.coordinate_arrays()
    k1, k2 = 2, 3
    psi = np.exp(1j * (k1 * x + k2 * y))
    minv = np.linalg.inv(np.array(mass))
    kvec = np.array([k1, k2])
    energy = 0.5 * kvec @ minv @ kvec
    image = op.dense() @ psi
    assert np.max(np.abs(image - energy * psi)) < 1e-9


def test_mass_tensor_validation():
    grid = Grid((Axis(0.0, 1.0, 8, bc="dirichlet"), Axis(0.0, 1.0, 8, bc="dirichlet")))
    with pytest.raises(ValueError):
        build_energy_operator([[1.0, 0.3], [0.2, 1.0]], None, None, grid)
    with pytest.raises(ValueError):
        build_energy_operator([[1.0, 2.0], [2.0, 1.0]], None, None, grid)
    with pytest.raises(ValueError):
        build_energy_operator(np.eye(3), None, None, grid)
    with pytest.raises(TypeError):
        build_energy_operator(1.0, object(), None, grid)


def test_frame_shift_equals_independent_assembly():
    zero = ReferenceFrame.zero(CH)
    moving = ReferenceFrame.constant(CH, (0.7,))
    base, grid = line_energy(zero)
    direct = build_energy_operator(1.0, HARMONIC, moving, grid)
    shifted = frame_shift(base, zero, moving)
    assert shifted.hermitian
    assert np.max(np.abs(shifted.dense() - direct.dense())) < 1e-12
    # a position-dependent frame exercises the symmetrized product
    swirl = ReferenceFrame(CH, (parse_polynomial(CH, "1/2 + q/10"),))
    direct = build_energy_operator(1.0, HARMONIC, swirl, grid)
    shifted = frame_shift(base, zero, swirl)
    assert np.max(np.abs(shifted.dense() - direct.dense())) < 1e-12
    same = frame_shift(base, zero, ReferenceFrame.zero(CH))
    assert np.array_equal(same.dense(), base.dense())
    with pytest.raises(ValueError):
        frame_shift(base, zero, moving, grid=Grid((Axis(0.0, 1.0, 8, bc="dirichlet"),)))


def test_eigensolve_guards():
    op, grid = line_energy()
    loose = GridOperator(grid, op.matrix)  # hermitian flag not asserted
    with pytest.raises(ValueError):
        eigensolve(loose, 2)
    with pytest.raises(ValueError):
        eigensolve(op, 0)
    with pytest.raises(ValueError):
        eigensolve(op, grid.size + 1)
    # lying about Hermiticity is caught by the residual check
    rng = np.random.default_rng(5)
    bad = GridOperator(grid, np.triu(rng.standard_normal((96, 96)), 1), hermitian=True)
    with pytest.raises(NoConvergence) as err:
        eigensolve(bad, 2)
    assert err.value.residual > 1e-9


def test_eigensolve_target_window():
    op, _ = line_energy()
    pairs = eigensolve(op, 2, target=2.4)
    assert [round(p.value, 6) for p in pairs] == [1.5, 2.5]
    values = [p.value for p in eigensolve(op, 4)]
    assert values == sorted(values)


def test_eigensolve_sparse_path():
    n = 4096
    grid = Grid((Axis(-12.0, 12.0, n, bc="dirichlet", scheme="fd2"),))
    op = build_energy_operator(1.0, HARMONIC, None, grid)
    assert op.is_sparse
    pairs = eigensolve(op, 3)
    assert np.allclose([p.value for p in pairs], [0.5, 1.5, 2.5], atol=1e-4)
    assert all(p.residual < 1e-9 for p in pairs)
    near = eigensolve(op, 1, target=1.45)
    assert abs(near[0].value - 1.5) < 1e-4


def test_radial_conventions_share_the_spectrum():
    plain = radial_grid(40.0, 400)
    weighted = radial_measure_grid(40.0, 400)
    coulomb = lambda r: -1.0 / r
    a = eigensolve(radial_operator(coulomb, 0, 1.0, plain), 2)
    b = eigensolve(radial_operator(coulomb, 0, 1.0, weighted), 2)
    for pa, pb in zip(a, b):
        assert abs(pa.value - pb.value) < 1e-10
    assert abs(a[0].value + 0.5) < 5e-3  # -1/(2 n^2) up to grid error
    assert abs(a[1].value + 0.125) < 5e-3
    # measure-route states are orthonormal under the r^2 weight
    gram = [[abs(b[i].state.inner(b[j].state)) for j in range(2)] for i in range(2)]
    assert np.allclose(gram, np.eye(2), atol=1e-8)


def test_radial_operator_validation():
    plain = radial_grid(10.0, 64)
    with pytest.raises(ValueError):
        radial_operator(None, -1, 1.0, plain)
    with pytest.raises(ValueError):
        radial_operator(None, 0, 0.0, plain)
    with pytest.raises(ValueError):
        radial_operator(None, 0, 1.0, Grid((plain.axes[0], plain.axes[0])))
    with pytest.raises(ValueError):
        radial_operator(None, 0, 1.0, Grid((Axis(0.0, 10.0, 64, bc="periodic"),)))
    with pytest.raises(TypeError):
        radial_operator(parse_polynomial(CH, "q"), 0, 1.0, plain)
    lopsided = Grid((plain.axes[0],), weights=np.arange(1.0, 65.0))
    with pytest.raises(ValueError, match="radial_measure_grid"):
        radial_operator(None, 0, 1.0, lopsided)


def test_centrifugal_term_raises_the_spectrum():
    grid = radial_grid(30.0, 300)
    hydro = lambda r: -1.0 / r
    s = eigensolve(radial_operator(hydro, 0, 1.0, grid), 1)[0].value
    p = eigensolve(radial_operator(hydro, 1, 1.0, grid), 1)[0].value
    assert p > s
    # the centrifugal coefficient here is l(l+1)/m, so the lowest l = 1
    # Coulomb level solves l_eff(l_eff+1) = 2l(l+1): E = -2/(1+sqrt(17))^2
    assert abs(p + 2.0 / (1.0 + math.sqrt(17.0)) ** 2) < 5e-3
    free = [
        eigensolve(radial_operator(None, l, 1.0, grid), 1)[0].value
        for l in range(3)
    ]
    assert all(v > 0 for v in free)
    assert free == sorted(free)


def test_boosted_ground_state_tracks_the_moving_frame():
    g = 0.7
    base, grid = line_energy(n=256)
    shifted = frame_shift(base, ReferenceFrame.zero(CH), ReferenceFrame.constant(CH, (g,)))
    ground = eigensolve(base, 1)[0].state
    moved = eigensolve(shifted, 1)[0]
    assert abs(moved.value - (0.5 - 0.5 * g * g)) < 1e-9
    boosted = boost_eigenstate(ground, (-g,))
    assert abs(abs(boosted.inner(moved.state)) - 1.0) < 1e-8
    assert abs(expectation(shifted, boosted) - (0.5 - 0.5 * g * g)) < 1e-8
    with pytest.raises(ValueError):
        boost_eigenstate(ground, (1.0, 2.0))


def test_expectation_guards_hermiticity():
    grid = Grid((Axis(0.0, 1.0, 8, bc="dirichlet"),))
    psi = WaveFunction(grid, np.ones(8)).normalize()
    nilpotent = 1j * np.triu(np.ones((8, 8)), 1)
    op = GridOperator(grid, nilpotent, hermitian=True)
    with pytest.raises(HermiticityViolation):
        expectation(op, psi)
    diag = GridOperator(grid, np.diag(np.arange(8.0)), hermitian=True)
    assert expectation(diag, psi) == pytest.approx(3.5)


def test_evolution_preserves_norm_and_phase():
    op, grid = line_energy(n=128)
    pair = eigensolve(op, 1)[0]
    res = evolve(op, pair.state, 1.0, 2e-3)
    assert np.max(np.abs(res.norms - 1.0)) < 1e-12
    final = res.states[-1][1]
    exact = pair.state * np.exp(-1j * pair.value * 1.0)
    assert (final - exact).norm() < 1e-6


def test_evolution_bookkeeping():
    op, grid = line_energy(n=96)
    psi = eigensolve(op, 1)[0].state
    x_op = discretize_affine(CH.var("q"), grid)
    res = evolve(op, psi, 0.1, 0.01, store_every=4, observables={"x": x_op})
    assert len(res.times) == 11
    assert res.times[0] == 0.0
    assert res.times[-1] == pytest.approx(0.1)
    assert len(res.expectations["x"]) == 11
    assert np.max(np.abs(res.expectations["x"])) < 1e-8  # even state
    stored = [t for t, _ in res.states]
    assert stored == pytest.approx([0.0, 0.04, 0.08, 0.1])
    # an aligned store interval must not duplicate the final state
    res = evolve(op, psi, 0.1, 0.01, store_every=5)
    assert [t for t, _ in res.states] == pytest.approx([0.0, 0.05, 0.1])
    res = evolve(op, psi, 0.0, 0.01)
    assert len(res.times) == 1
    assert res.states[-1][0] == 0.0


def test_evolution_with_a_builder():
    op, grid = line_energy(n=96)
    psi = eigensolve(op, 1)[0].state
    seen = []

    def builder(t):
        seen.append(t)
        return op

    res = evolve(builder, psi, 0.05, 0.01)
    assert np.allclose(seen, [0.005, 0.015, 0.025, 0.035, 0.045])
    static = evolve(op, psi, 0.05, 0.01)
    assert (res.states[-1][1] - static.states[-1][1]).norm() < 1e-13
    with pytest.raises(TypeError):
        evolve("energy", psi, 0.1, 0.01)
    with pytest.raises(ValueError):
        evolve(op, psi, 0.1, 0.0)
    with pytest.raises(ValueError):
        evolve(op, psi, -0.1, 0.01)
