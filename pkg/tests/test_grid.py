import math
import struct

import numpy as np
import pytest

from frameq import (
    Axis,
    Grid,
    GridOperator,
    WaveFunction,
    axis_d1,
    axis_d2,
    radial_grid,
    read_snapshot,
    write_snapshot,
)


def test_axis_validation():
    with pytest.raises(ValueError):
        Axis(0.0, 1.0, 7)  # too few nodes
    with pytest.raises(ValueError):
        Axis(1.0, 1.0, 16)
    with pytest.raises(ValueError):
        Axis(0.0, 1.0, 16, bc="absorbing")
    with pytest.raises(ValueError):
        Axis(0.0, 1.0, 16, scheme="fd4")
    with pytest.raises(ValueError):
        Axis(0.0, 1.0, 15, bc="periodic", scheme="spectral")  # odd count
    Axis(0.0, 1.0, 15, bc="dirichlet", scheme="spectral")  # odd is fine here


def test_axis_nodes_and_spacing():
    per = Axis(0.0, 1.0, 10, bc="periodic")
    assert per.h == 0.1
    nodes = per.nodes()
    assert nodes[0] == 0.0
    assert math.isclose(nodes[-1], 0.9)  # right endpoint folds to the left
    dir_ = Axis(0.0, 1.0, 9, bc="dirichlet")
    assert dir_.h == 0.1
    nodes = dir_.nodes()
    assert math.isclose(nodes[0], 0.1)  # both endpoints excluded
    assert math.isclose(nodes[-1], 0.9)


def test_difference_matrices_have_exact_symmetry():
    # mirrored stencils make these identities exact, not approximate
    per = Axis(0.0, 2 * math.pi, 16, bc="periodic", scheme="spectral")
    d1 = axis_d1(per)
    d2 = axis_d2(per)
    assert np.array_equal(d1, -d1.T)
    assert np.array_equal(d2, d2.T)
    dir_ = Axis(-5.0, 5.0, 17, bc="dirichlet", scheme="spectral")
    s1 = axis_d1(dir_)
    s2 = axis_d2(dir_)
    assert np.array_equal(s1, -s1.T)
    assert np.array_equal(s2, s2.T)
    fd = axis_d1(Axis(0.0, 1.0, 12, bc="periodic", scheme="fd2")).toarray()
    assert np.array_equal(fd, -fd.T)


def test_trig_scheme_differentiates_plane_waves_exactly():
    axis = Axis(0.0, 2 * math.pi, 16, bc="periodic", scheme="spectral")
    x = axis.nodes()
    for n in (1, 3, 5):
        f = np.exp(1j * n * x)
        assert np.max(np.abs(axis_d1(axis) @ f - 1j * n * f)) < 1e-12
        assert np.max(np.abs(axis_d2(axis) @ f + n * n * f)) < 1e-12


def test_trig_scheme_respects_the_axis_length():
    axis = Axis(0.0, 4.0, 32, bc="periodic", scheme="spectral")
    x = axis.nodes()
    k = 2 * math.pi / 4.0
    f = np.sin(3 * k * x)
    assert np.max(np.abs(axis_d1(axis) @ f - 3 * k * np.cos(3 * k * x))) < 1e-11


def test_sinc_scheme_on_a_gaussian():
    axis = Axis(-10.0, 10.0, 128, bc="dirichlet", scheme="spectral")
    x = axis.nodes()
    f = np.exp(-(x**2))
    exact = (4 * x**2 - 2) * f
    assert np.max(np.abs(axis_d2(axis) @ f - exact)) < 1e-9


def test_fd2_wraps_periodic_corners():
    axis = Axis(0.0, 1.0, 10, bc="periodic")
    d1 = axis_d1(axis)
    c = 1.0 / (2 * axis.h)
    assert d1[0, 9] == -c
    assert d1[9, 0] == c
    d2 = axis_d2(axis)
    assert d2[0, 9] == 1.0 / axis.h**2
    nodir = axis_d1(Axis(0.0, 1.0, 10, bc="dirichlet"))
    assert nodir[0, 9] == 0.0


def test_fd2_converges_at_second_order():
    errs = []
    for n in (32, 64):
        axis = Axis(0.0, 2 * math.pi, n, bc="periodic")
        x = axis.nodes()
        errs.append(np.max(np.abs(axis_d2(axis) @ np.sin(x) + np.sin(x))))
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_grid_layout_and_weights():
    gx = Axis(0.0, 1.0, 8, bc="dirichlet")
    gy = Axis(0.0, 2.0, 10, bc="periodic")
    grid = Grid((gx, gy))
    assert grid.ndim == 2
    assert grid.dims == (8, 10)
    assert grid.size == 80
    assert grid.uniform
    assert np.allclose(grid.weights, gx.h * gy.h)
    x, y = grid.coordinate_arrays()
    # C order: the first axis varies slowest
    assert np.allclose(x[:10], gx.nodes()[0])
    assert np.allclose(y[:10], gy.nodes())
    assert x is grid.coordinate_arrays()[0]  # cached
    assert not grid.weights.flags.writeable


def test_grid_validation_and_equality():
    ax = Axis(0.0, 1.0, 8)
    with pytest.raises(ValueError):
        Grid(())
    with pytest.raises(TypeError):
        Grid((1.0, 2.0))
    with pytest.raises(ValueError):
        Grid((ax,), weights=np.ones(7))
    with pytest.raises(ValueError):
        Grid((ax,), weights=np.zeros(8))
    weighted = Grid((ax,), weights=np.arange(1.0, 9.0))
    assert not weighted.uniform
    assert Grid((ax,)) == Grid((ax,))
    assert Grid((ax,)) != weighted
    assert "periodic/fd2" in str(weighted)


def test_radial_grid_excludes_the_origin():
    grid = radial_grid(5.0, 9)
    r = grid.coordinate_arrays()[0]
    assert r[0] == pytest.approx(0.5)
    assert r[-1] == pytest.approx(4.5)
    assert np.all(r > 0)


def test_lifted_matches_kronecker_products():
    ax = Axis(0.0, 2 * math.pi, 8, bc="periodic", scheme="spectral")
    grid = Grid((ax, ax))
    d = axis_d2(ax)
    eye = np.eye(8)
    assert np.array_equal(grid.lifted(0, d), np.kron(d, eye))
    assert np.array_equal(grid.lifted(1, d), np.kron(eye, d))
    one_d = Grid((ax,))
    assert one_d.lifted(0, d) is d


def test_wave_function_norms_and_inner():
    ax = Axis(0.0, 1.0, 10, bc="periodic")
    grid = Grid((ax,))
    psi = WaveFunction(grid, np.ones(10))
    assert psi.norm2() == pytest.approx(1.0)  # 10 nodes x weight 0.1
    assert psi.norm() == pytest.approx(1.0)
    phi = WaveFunction(grid, 1j * np.ones(10))
    # conjugation sits on the first slot
    assert psi.inner(phi) == pytest.approx(1j)
    assert phi.inner(psi) == pytest.approx(-1j)
    assert (psi + phi).norm2() == pytest.approx(2.0)
    assert (psi - phi).norm2() == pytest.approx(2.0)
    assert (2 * psi).norm() == pytest.approx(2.0)
    unit = (3 * psi).normalize()
    assert unit.norm() == pytest.approx(1.0)
    assert psi.shaped().shape == (10,)
    assert psi.copy().values is not psi.values


def test_wave_function_validation():
    ax = Axis(0.0, 1.0, 10, bc="periodic")
    grid = Grid((ax,))
    with pytest.raises(ValueError):
        WaveFunction(grid, np.ones(9))
    with pytest.raises(ValueError):
        WaveFunction(grid, np.full(10, np.nan))
    with pytest.raises(ValueError):
        WaveFunction(grid, np.zeros(10)).normalize()
    other = Grid((Axis(0.0, 2.0, 10, bc="periodic"),))
    with pytest.raises(ValueError):
        WaveFunction(grid, np.ones(10)).inner(WaveFunction(other, np.ones(10)))
    with pytest.raises(ValueError):
        WaveFunction(grid, np.ones(10)) + WaveFunction(other, np.ones(10))


def test_grid_operator_hermiticity_residual():
    ax = Axis(0.0, 2 * math.pi, 16, bc="periodic", scheme="spectral")
    grid = Grid((ax,))
    lap = GridOperator(grid, -axis_d2(ax), hermitian=True)
    assert lap.hermiticity_residual() == 0.0
    skew = GridOperator(grid, axis_d1(ax))
    assert skew.hermiticity_residual() > 0.1
    # W-weighted symmetry: A = W^-1 S is Hermitian under the weighted
    # product even though the bare matrix is not
    rng = np.random.default_rng(7)
    w = rng.uniform(0.5, 2.0, 16)
    s = rng.standard_normal((16, 16))
    s = s + s.T
    weighted = Grid((ax,), weights=w)
    op = GridOperator(weighted, s / w[:, None], hermitian=True)
    assert op.hermiticity_residual() < 1e-15
    assert GridOperator(grid, s / w[:, None]).hermiticity_residual() > 0.01


def test_grid_operator_algebra():
    ax = Axis(0.0, 2 * math.pi, 12, bc="periodic")
    grid = Grid((ax,))
    sparse_op = GridOperator(grid, -axis_d2(ax), hermitian=True)
    dense_op = GridOperator(grid, np.diag(np.arange(12.0)), hermitian=True)
    assert sparse_op.is_sparse
    assert not dense_op.is_sparse
    both = sparse_op + dense_op
    assert not both.is_sparse  # mixed storage falls back to dense
    assert both.hermitian
    assert (both - dense_op).hermitian
    assert np.allclose((both - dense_op).dense(), sparse_op.dense())
    assert sparse_op.scale(2.0).hermitian
    assert not sparse_op.scale(1j).hermitian
    assert not (sparse_op @ dense_op).hermitian
    psi = WaveFunction(grid, np.exp(1j * ax.nodes()))
    assert np.allclose((sparse_op.apply(psi)).values, psi.values, atol=1e-1)
    with pytest.raises(ValueError):
        GridOperator(grid, np.eye(5))
    other = Grid((Axis(0.0, 1.0, 12, bc="periodic"),))
    with pytest.raises(ValueError):
        dense_op.apply(WaveFunction(other, np.ones(12)))


def test_snapshot_round_trip_and_header(tmp_path):
    ax = Axis(0.0, 1.0, 8, bc="dirichlet")
    grid = Grid((ax, ax))
    rng = np.random.default_rng(3)
    psi = WaveFunction(grid, rng.standard_normal(64) + 1j * rng.standard_normal(64))
    path = tmp_path / "state.fq"
    write_snapshot(path, psi)
    raw = path.read_bytes()
    assert len(raw) == 16 + 16 * 64
    assert raw[:16] == struct.pack("<4sHH4H", b"FRQ1", 1, 2, 8, 8, 0, 0)
    back = read_snapshot(path, grid)
    assert np.array_equal(back.values, psi.values)
    dims, values = read_snapshot(path)
    assert dims == (8, 8)
    assert np.array_equal(values, psi.values)


def test_snapshot_rejects_corrupt_files(tmp_path):
    ax = Axis(0.0, 1.0, 8, bc="dirichlet")
    grid = Grid((ax,))
    path = tmp_path / "state.fq"
    write_snapshot(path, WaveFunction(grid, np.ones(8)))
    raw = path.read_bytes()

    def rewrite(data):
        bad = tmp_path / "bad.fq"
        bad.write_bytes(data)
        return bad

    with pytest.raises(ValueError, match="magic"):
        read_snapshot(rewrite(b"NOPE" + raw[4:]))
    with pytest.raises(ValueError, match="version"):
        read_snapshot(rewrite(raw[:4] + struct.pack("<H", 9) + raw[6:]))
    with pytest.raises(ValueError, match="truncated"):
        read_snapshot(rewrite(raw[:10]))
    with pytest.raises(ValueError, match="body"):
        read_snapshot(rewrite(raw[:-16]))
    wrong = Grid((Axis(0.0, 1.0, 9, bc="dirichlet"),))
    with pytest.raises(ValueError, match="dims"):
        read_snapshot(path, wrong)
    with pytest.raises(ValueError, match="axis count"):
        read_snapshot(rewrite(raw[:6] + struct.pack("<H", 7) + raw[8:]))
