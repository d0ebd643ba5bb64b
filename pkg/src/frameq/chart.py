"""Charts on a time-fibered configuration space.

A chart fixes a global time coordinate ``t``, position coordinates
``q^1..q^m`` (each a line or a circle of given period), and the derived
momentum coordinates: ``p`` conjugate to time and ``p_1..p_m`` conjugate to
the positions.  Phase-space polynomials index their variables in the fixed
order ``(t, q^1..q^m, p, p_1..p_m)``; that order is also the canonical
(lexicographic) monomial order used for serialization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ChartMismatch

_TIME_DEFAULT = "t"


@dataclass(frozen=True)
class Coordinate:
    """One position coordinate: a line, or a circle when ``period`` is set."""

    name: str
    period: float | None = None

    def __post_init__(self):
        if not self.name.isidentifier():
            raise ValueError(f"coordinate name {self.name!r} is not an identifier")
        if self.period is not None and not self.period > 0:
            raise ValueError(f"period of {self.name!r} must be positive")

    @property
    def is_circle(self) -> bool:
        return self.period is not None


def _as_coordinate(spec) -> Coordinate:
    if isinstance(spec, Coordinate):
        return spec
    if isinstance(spec, str):
        return Coordinate(spec)
    raise TypeError(f"cannot build a coordinate from {spec!r}")


@dataclass(frozen=True)
class Chart:
    """A single global chart: time plus ``m >= 1`` position coordinates."""

    coords: tuple[Coordinate, ...]
    time: str = _TIME_DEFAULT
    var_names: tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __init__(self, coords, time: str = _TIME_DEFAULT):
        coords = tuple(_as_coordinate(c) for c in coords)
        if not coords:
            raise ValueError("a chart needs at least one position coordinate")
        if not time.isidentifier():
            raise ValueError(f"time name {time!r} is not an identifier")
        names = [time]
        names += [c.name for c in coords]
        names.append("p")
        names += ["p_" + c.name for c in coords]
        if len(set(names)) != len(names):
            raise ValueError(f"coordinate names collide: {names}")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "time", time)
        object.__setattr__(self, "var_names", tuple(names))

    # -- layout -------------------------------------------------------------

    @property
    def dim(self) -> int:
        """Number of position coordinates m."""
        return len(self.coords)

    @property
    def nvars(self) -> int:
        """Total phase variables, 2m + 2."""
        return 2 * self.dim + 2

    @property
    def time_index(self) -> int:
        return 0

    @property
    def p_index(self) -> int:
        """Index of the momentum conjugate to time."""
        return self.dim + 1

    def coord_index(self, i: int) -> int:
        """Index of q^i (i counted from 0)."""
        if not 0 <= i < self.dim:
            raise IndexError(i)
        return 1 + i

    def momentum_index(self, i: int) -> int:
        """Index of p_i (i counted from 0)."""
        if not 0 <= i < self.dim:
            raise IndexError(i)
        return self.dim + 2 + i

    def index_of(self, name: str) -> int:
        try:
            return self.var_names.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not a variable of {self}") from None

    def coordinate_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.coords)

    def momentum_names(self) -> tuple[str, ...]:
        return tuple("p_" + c.name for c in self.coords)

    def is_momentum_index(self, idx: int) -> bool:
        """True for p and every p_i."""
        return idx >= self.dim + 1

    # -- polynomial factories (lazy import to avoid a cycle) ----------------

    def variables(self):
        """All 2m + 2 phase variables as polynomials, in canonical order."""
        from .polynomial import PhasePolynomial

        return tuple(
            PhasePolynomial.variable(self, n) for n in self.var_names
        )

    def var(self, name: str):
        from .polynomial import PhasePolynomial

        return PhasePolynomial.variable(self, name)

    # -- geometry helpers ---------------------------------------------------

    def wrap_positions(self, q):
        """Fold circle coordinates into [0, period); leaves lines alone."""
        out = list(q)
        for i, c in enumerate(self.coords):
            if c.is_circle:
                out[i] = math.fmod(out[i], c.period)
                if out[i] < 0:
                    out[i] += c.period
        return type(q)(out) if isinstance(q, tuple) else out

    def __str__(self):
        parts = [
            c.name + (f"(circle {c.period:g})" if c.is_circle else "")
            for c in self.coords
        ]
        return f"Chart[{self.time}; {', '.join(parts)}]"


def require_same_chart(*objects):
    """Raise ChartMismatch unless every operand (chart or charted object) agrees."""
    charts = {
        obj if isinstance(obj, Chart) else obj.chart for obj in objects
    }
    if len(charts) > 1:
        raise ChartMismatch(f"operands live on different charts: {charts}")
