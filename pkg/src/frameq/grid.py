"""Grids, wave functions on them, and Hermitian grid operators.

A :class:`Grid` is a Cartesian product of 1-D axes, each carrying its own
boundary condition and differentiation scheme.  Two schemes are provided:

* ``fd2``      - centered second-order differences (banded, sparse-friendly),
* ``spectral`` - trigonometric differentiation on periodic axes and sinc
                 differentiation on dirichlet axes (dense, exponentially
                 accurate for smooth well-resolved states).

First-difference matrices are antisymmetric and second-difference matrices
symmetric by construction: stencil values are computed once per node
distance and mirrored, never recomputed from transcendental functions at
reflected arguments, so Hermiticity of assembled operators is exact rather
than accurate to rounding.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

# largest matrix kept dense; above this fd2 assembly and eigensolves
# switch to sparse storage
DENSE_LIMIT = 2048

_SNAPSHOT_MAGIC = b"FRQ1"
_SNAPSHOT_VERSION = 1
_SNAPSHOT_MAX_DIMS = 4
_SNAPSHOT_HEADER = struct.Struct("<4sHH4H")


@dataclass(frozen=True)
class Axis:
    """One grid dimension: extent, node count, boundary condition, scheme."""

    a: float
    b: float
    n: int
    bc: str = "periodic"
    scheme: str = "fd2"

    def __post_init__(self):
        if self.bc not in ("periodic", "dirichlet"):
            raise ValueError(f"unknown boundary condition {self.bc!r}")
        if self.scheme not in ("fd2", "spectral"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.n < 8:
            raise ValueError("an axis needs at least 8 nodes")
        if not self.b > self.a:
            raise ValueError("axis extent must have b > a")
        if self.bc == "periodic" and self.scheme == "spectral" and self.n % 2:
            raise ValueError("spectral periodic axes need an even node count")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def h(self) -> float:
        if self.bc == "periodic":
            return self.length / self.n
        return self.length / (self.n + 1)

    def nodes(self) -> np.ndarray:
        h = self.h
        if self.bc == "periodic":
            return self.a + h * np.arange(self.n)
        return self.a + h * np.arange(1, self.n + 1)


def _fd2_d1(axis: Axis):
    """Centered first difference (f_{j+1} - f_{j-1}) / 2h."""
    from scipy.sparse import diags

    n, h = axis.n, axis.h
    c = 1.0 / (2.0 * h)
    mat = diags([np.full(n - 1, c), np.full(n - 1, -c)], [1, -1], format="lil")
    if axis.bc == "periodic":
        mat[0, n - 1] = -c
        mat[n - 1, 0] = c
    return mat.tocsr()


def _fd2_d2(axis: Axis):
    from scipy.sparse import diags

    n, h = axis.n, axis.h
    c = 1.0 / (h * h)
    mat = diags(
        [np.full(n - 1, c), np.full(n, -2.0 * c), np.full(n - 1, c)],
        [1, 0, -1],
        format="lil",
    )
    if axis.bc == "periodic":
        mat[0, n - 1] = c
        mat[n - 1, 0] = c
    return mat.tocsr()


def _from_distances(n: int, e: np.ndarray) -> np.ndarray:
    j = np.arange(n)
    return e[(j[:, None] - j[None, :]) % n]


def _trig_d1(axis: Axis) -> np.ndarray:
    """Trigonometric first-difference matrix on an even periodic axis.

    Entry (j, k) depends only on d = (j - k) mod n; values are generated
    for d <= n/2 and mirrored with a sign flip, so the matrix is
    antisymmetric exactly (d = n/2 lands on cot(pi/2) = 0, consistent
    with its own mirror image).
    """
    n = axis.n
    sigma = 2.0 * math.pi / axis.length
    e = np.zeros(n)
    for d in range(1, n // 2 + 1):
        v = 0.5 * sigma * (-1.0) ** d / math.tan(math.pi * d / n)
        e[d] = v
        e[n - d] = -v
    # d = n/2 is its own mirror; cot(pi/2) = 0 analytically
    e[n // 2] = 0.0
    return _from_distances(n, e)


def _trig_d2(axis: Axis) -> np.ndarray:
    """Trigonometric second-difference matrix; symmetric exactly."""
    n = axis.n
    sigma = 2.0 * math.pi / axis.length
    e = np.empty(n)
    e[0] = -sigma * sigma * (n * n / 12.0 + 1.0 / 6.0)
    for d in range(1, n // 2 + 1):
        s = math.sin(math.pi * d / n)
        v = -sigma * sigma * (-1.0) ** d / (2.0 * s * s)
        e[d] = v
        e[n - d] = v
    return _from_distances(n, e)


def _sinc_d1(axis: Axis) -> np.ndarray:
    """Sinc first-difference matrix on a dirichlet axis; antisymmetric."""
    n, h = axis.n, axis.h
    j = np.arange(n)
    diff = j[:, None] - j[None, :]
    with np.errstate(divide="ignore"):
        mat = np.where(diff != 0, (-1.0) ** diff / (h * diff), 0.0)
    return mat


def _sinc_d2(axis: Axis) -> np.ndarray:
    """Sinc second-difference matrix on a dirichlet axis; symmetric."""
    n, h = axis.n, axis.h
    j = np.arange(n)
    diff = j[:, None] - j[None, :]
    with np.errstate(divide="ignore"):
        mat = np.where(
            diff != 0, -2.0 * (-1.0) ** diff / (h * h * diff * diff), 0.0
        )
    np.fill_diagonal(mat, -math.pi * math.pi / (3.0 * h * h))
    return mat


def axis_d1(axis: Axis):
    """First-difference matrix of one axis (approximates d/dx)."""
    if axis.scheme == "fd2":
        return _fd2_d1(axis)
    if axis.bc == "periodic":
        return _trig_d1(axis)
    return _sinc_d1(axis)


def axis_d2(axis: Axis):
    """Second-difference matrix of one axis (approximates d2/dx2)."""
    if axis.scheme == "fd2":
        return _fd2_d2(axis)
    if axis.bc == "periodic":
        return _trig_d2(axis)
    return _sinc_d2(axis)


class Grid:
    """Cartesian product of axes with a positive measure weight per node.

    The default weight is the uniform cell volume (product of spacings);
    radial charts install custom per-node weights.  Node order is C order
    over the axes, matching ``numpy.reshape``.
    """

    __slots__ = ("axes", "weights", "uniform", "_coords")

    def __init__(self, axes, weights=None):
        axes = tuple(axes)
        if not axes:
            raise ValueError("a grid needs at least one axis")
        if not all(isinstance(ax, Axis) for ax in axes):
            raise TypeError("grid axes must be Axis instances")
        size = 1
        for ax in axes:
            size *= ax.n
        if weights is None:
            cell = 1.0
            for ax in axes:
                cell *= ax.h
            weights = np.full(size, cell)
            uniform = True
        else:
            weights = np.asarray(weights, dtype=float).reshape(-1)
            if len(weights) != size:
                raise ValueError(
                    f"need {size} node weights, got {len(weights)}"
                )
            if not np.all(weights > 0):
                raise ValueError("node weights must be strictly positive")
            uniform = bool(np.all(weights == weights[0]))
        weights = weights.copy()
        weights.setflags(write=False)
        self.axes = axes
        self.weights = weights
        self.uniform = uniform
        self._coords = None

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def dims(self) -> tuple:
        return tuple(ax.n for ax in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    def coordinate_arrays(self) -> tuple:
        """Flat node coordinates, one array per axis, C order."""
        if self._coords is None:
            mesh = np.meshgrid(*(ax.nodes() for ax in self.axes), indexing="ij")
            self._coords = tuple(m.reshape(-1) for m in mesh)
        return self._coords

    def lifted(self, axis_index: int, mat):
        """Lift a one-axis matrix to the full grid by Kronecker products."""
        from scipy import sparse

        if self.ndim == 1:
            return mat
        use_sparse = self.size > DENSE_LIMIT or sparse.issparse(mat)
        out = None
        for i, ax in enumerate(self.axes):
            factor = mat if i == axis_index else (
                sparse.identity(ax.n) if use_sparse else np.eye(ax.n)
            )
            if out is None:
                out = factor
            elif use_sparse:
                out = sparse.kron(out, factor, format="csr")
            else:
                out = np.kron(out, np.asarray(factor.todense()) if sparse.issparse(factor) else factor)
        return out

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return self.axes == other.axes and np.array_equal(self.weights, other.weights)

    __hash__ = None

    def __str__(self):
        parts = [
            f"[{ax.a:g},{ax.b:g}] n={ax.n} {ax.bc}/{ax.scheme}" for ax in self.axes
        ]
        return "Grid(" + " x ".join(parts) + ")"


def radial_grid(rmax: float, n: int, scheme: str = "fd2") -> Grid:
    """A dirichlet grid on (0, rmax): nodes h, 2h, ..., nh, excluding r = 0."""
    return Grid((Axis(0.0, float(rmax), n, bc="dirichlet", scheme=scheme),))


class WaveFunction:
    """Complex node values on a grid with the weighted inner product."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        values = np.asarray(values, dtype=complex).reshape(-1)
        if len(values) != grid.size:
            raise ValueError(
                f"expected {grid.size} values, got {len(values)}"
            )
        if not np.all(np.isfinite(values.real) & np.isfinite(values.imag)):
            raise ValueError("wave function entries must be finite")
        self.grid = grid
        self.values = values

    def shaped(self) -> np.ndarray:
        return self.values.reshape(self.grid.dims)

    def norm2(self) -> float:
        return float(np.sum(self.grid.weights * np.abs(self.values) ** 2))

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def inner(self, other: "WaveFunction") -> complex:
        if self.grid != other.grid:
            raise ValueError("wave functions live on different grids")
        return complex(np.sum(self.grid.weights * np.conj(self.values) * other.values))

    def normalize(self) -> "WaveFunction":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return WaveFunction(self.grid, self.values / n)

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.values.copy())

    def __add__(self, other):
        if not isinstance(other, WaveFunction):
            return NotImplemented
        if self.grid != other.grid:
            raise ValueError("wave functions live on different grids")
        return WaveFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        if not isinstance(other, WaveFunction):
            return NotImplemented
        if self.grid != other.grid:
            raise ValueError("wave functions live on different grids")
        return WaveFunction(self.grid, self.values - other.values)

    def __mul__(self, c):
        return WaveFunction(self.grid, self.values * complex(c))

    __rmul__ = __mul__


def _abs_max(mat) -> float:
    from scipy import sparse

    if sparse.issparse(mat):
        return float(np.max(np.abs(mat.data))) if mat.nnz else 0.0
    return float(np.max(np.abs(mat))) if mat.size else 0.0


class GridOperator:
    """A linear operator on grid states, dense or sparse.

    The ``hermitian`` flag is an assertion about the operator under the
    grid's weighted inner product; :meth:`hermiticity_residual` measures
    how well the matrix honors it.
    """

    __slots__ = ("grid", "matrix", "hermitian")

    def __init__(self, grid: Grid, matrix, hermitian: bool = False):
        from scipy import sparse

        if not (sparse.issparse(matrix) or isinstance(matrix, np.ndarray)):
            matrix = np.asarray(matrix)
        shape = matrix.shape
        if shape != (grid.size, grid.size):
            raise ValueError(
                f"operator shape {shape} does not match grid size {grid.size}"
            )
        self.grid = grid
        self.matrix = matrix
        self.hermitian = bool(hermitian)

    @property
    def is_sparse(self) -> bool:
        from scipy import sparse

        return sparse.issparse(self.matrix)

    def dense(self) -> np.ndarray:
        if self.is_sparse:
            return np.asarray(self.matrix.todense())
        return self.matrix

    def apply(self, psi: WaveFunction) -> WaveFunction:
        if psi.grid != self.grid:
            raise ValueError("state and operator live on different grids")
        return WaveFunction(self.grid, self.matrix @ psi.values)

    def hermiticity_residual(self) -> float:
        """max |WA - (WA)^H| / max(1, |WA|): 0 for exactly Hermitian A."""
        if self.grid.uniform:
            m = self.matrix
        else:
            from scipy import sparse

            w = self.grid.weights
            if self.is_sparse:
                m = sparse.diags(w) @ self.matrix
            else:
                m = w[:, None] * self.matrix
        delta = m - m.conj().T
        return _abs_max(delta) / max(1.0, _abs_max(m))

    def _merge(self, other, sign):
        if self.grid != other.grid:
            raise ValueError("operators live on different grids")
        a, b = self.matrix, other.matrix
        if self.is_sparse != other.is_sparse:
            a = self.dense()
            b = other.dense()
        mat = a + b if sign > 0 else a - b
        return GridOperator(self.grid, mat, self.hermitian and other.hermitian)

    def __add__(self, other):
        if not isinstance(other, GridOperator):
            return NotImplemented
        return self._merge(other, +1)

    def __sub__(self, other):
        if not isinstance(other, GridOperator):
            return NotImplemented
        return self._merge(other, -1)

    def scale(self, c) -> "GridOperator":
        c = complex(c)
        keeps = self.hermitian and c.imag == 0.0
        return GridOperator(self.grid, self.matrix * c, keeps)

    def __matmul__(self, other):
        if not isinstance(other, GridOperator):
            return NotImplemented
        if self.grid != other.grid:
            raise ValueError("operators live on different grids")
        return GridOperator(self.grid, self.matrix @ other.matrix, False)


def write_snapshot(path, psi: WaveFunction) -> None:
    """Binary state snapshot: 16-byte header then (re, im) float64 pairs.

    Header layout, little endian: magic "FRQ1", format version, axis
    count, then four axis lengths (unused entries zero).
    """
    dims = psi.grid.dims
    if len(dims) > _SNAPSHOT_MAX_DIMS:
        raise ValueError(
            f"snapshots support up to {_SNAPSHOT_MAX_DIMS} axes, got {len(dims)}"
        )
    padded = tuple(dims) + (0,) * (_SNAPSHOT_MAX_DIMS - len(dims))
    header = _SNAPSHOT_HEADER.pack(
        _SNAPSHOT_MAGIC, _SNAPSHOT_VERSION, len(dims), *padded
    )
    flat = np.empty(2 * psi.values.size, dtype="<f8")
    flat[0::2] = psi.values.real
    flat[1::2] = psi.values.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(flat.tobytes())


def read_snapshot(path, grid: Grid | None = None):
    """Read a snapshot; returns a WaveFunction when a grid is supplied,
    otherwise the pair (dims, values)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _SNAPSHOT_HEADER.size:
        raise ValueError("snapshot file is truncated")
    magic, version, ndim, *padded = _SNAPSHOT_HEADER.unpack(
        raw[: _SNAPSHOT_HEADER.size]
    )
    if magic != _SNAPSHOT_MAGIC:
        raise ValueError(f"not a state snapshot (bad magic {magic!r})")
    if version != _SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    if not 1 <= ndim <= _SNAPSHOT_MAX_DIMS:
        raise ValueError(f"bad axis count {ndim}")
    dims = tuple(padded[:ndim])
    size = int(np.prod(dims))
    body = np.frombuffer(raw[_SNAPSHOT_HEADER.size :], dtype="<f8")
    if len(body) != 2 * size:
        raise ValueError(
            f"snapshot body holds {len(body) // 2} values, header says {size}"
        )
    values = body[0::2] + 1j * body[1::2]
    if grid is None:
        return dims, values
    if grid.dims != dims:
        raise ValueError(
            f"snapshot dims {dims} do not match grid dims {grid.dims}"
        )
    return WaveFunction(grid, values)
