"""Scenario files: validation, construction, and execution.

A scenario is a JSON object naming a kind of run plus the chart, frames,
Hamiltonian, grid, and outputs it needs.  Expressions arrive as strings
and are parsed exactly; reports go through :mod:`frameq.reports`, so a
fixed scenario and seed produce byte-identical output files.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .chart import Chart, Coordinate
from .classical import PhasePoint, conservation_report, evaluate_on, integrate_hamilton
from .errors import ExpressionError, FrameQError, ScenarioError
from .expr import parse_polynomial
from .frames import ReferenceFrame, adapted_flow
from .grid import Axis, Grid, WaveFunction, write_snapshot
from .gridops import (
    boost_eigenstate,
    build_energy_operator,
    discretize_affine,
    eigensolve,
    evolve,
    expectation,
    frame_shift,
    radial_operator,
)
from .polynomial import PhasePolynomial
from .reports import format_sig, write_rows
from .verify import verify_identities

_TWO_PI = 2.0 * math.pi

BUILTIN_SCENARIOS = {
    "rotating-rotor": {
        "kind": "frame-shift",
        "name": "rotating-rotor",
        "chart": {"coordinates": [{"name": "phi", "period": _TWO_PI}]},
        "grid": {
            "axes": [
                {"a": 0.0, "b": _TWO_PI, "n": 256, "bc": "periodic", "scheme": "spectral"}
            ]
        },
        "hamiltonian": {"mass": 1.0},
        "frame": ["0"],
        "frame_to": ["3/10"],
        "eigenpairs": 11,
        "tolerances": {"shift": 1e-6},
    },
    "boosted-oscillator": {
        "kind": "frame-shift",
        "name": "boosted-oscillator",
        "chart": {"coordinates": ["q"]},
        "grid": {
            "axes": [
                {"a": -12.0, "b": 12.0, "n": 1024, "bc": "dirichlet", "scheme": "spectral"}
            ]
        },
        "hamiltonian": {"mass": 1.0, "potential": "harmonic"},
        "frame": ["0"],
        "frame_to": ["7/10"],
        "eigenpairs": 1,
        "expect": {"values": [0.255], "tolerance": 1e-6},
        "checks": {"boost_overlap": {"boost": [-0.7], "deficit_tolerance": 1e-8}},
    },
}

_BUILTIN_POTENTIALS = {
    "harmonic": lambda *coords: 0.5 * sum(x * x for x in coords),
    "quartic": lambda *coords: 0.25 * sum(x**4 for x in coords),
    "coulomb-radial": lambda r: -1.0 / r,
}


def _schema():
    raw = resources.files("frameq").joinpath("scenario_schema.json").read_text()
    return json.loads(raw)


def validate_scenario(data: dict) -> None:
    """Schema-check a scenario dict; raises ScenarioError with field paths."""
    import jsonschema

    validator = jsonschema.Draft7Validator(_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        parts = []
        for err in errors[:3]:
            path = "$" + "".join(
                f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path
            )
            parts.append(f"{path}: {err.message}")
        more = f" (+{len(errors) - 3} more)" if len(errors) > 3 else ""
        raise ScenarioError("; ".join(parts) + more)


def load_scenario(source) -> dict:
    """Load and validate a scenario from a dict, builtin name, or file path."""
    if isinstance(source, dict):
        data = copy.deepcopy(source)
    elif isinstance(source, str) and source in BUILTIN_SCENARIOS:
        data = copy.deepcopy(BUILTIN_SCENARIOS[source])
    else:
        try:
            with open(source) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ScenarioError(
                f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    if not isinstance(data, dict):
        raise ScenarioError("a scenario must be a JSON object")
    validate_scenario(data)
    return data


@dataclass
class ScenarioResult:
    kind: str
    name: str
    passed: bool
    lines: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    def __str__(self):
        return "\n".join(self.lines)


# -- construction helpers ----------------------------------------------------


def _build_chart(data: dict) -> Chart:
    spec = data.get("chart")
    if spec is None:
        raise ScenarioError(f"kind {data['kind']!r} needs a chart")
    coords = []
    for entry in spec["coordinates"]:
        if isinstance(entry, str):
            coords.append(Coordinate(entry))
        else:
            coords.append(Coordinate(entry["name"], entry.get("period")))
    try:
        return Chart(tuple(coords), time=spec.get("time", "t"))
    except ValueError as exc:
        raise ScenarioError(f"bad chart: {exc}") from exc


def _build_grid(data: dict) -> Grid:
    spec = data.get("grid")
    if spec is None:
        raise ScenarioError(f"kind {data['kind']!r} needs a grid")
    axes = []
    for entry in spec["axes"]:
        try:
            axes.append(
                Axis(
                    float(entry["a"]),
                    float(entry["b"]),
                    int(entry["n"]),
                    bc=entry.get("bc", "periodic"),
                    scheme=entry.get("scheme", "fd2"),
                )
            )
        except ValueError as exc:
            raise ScenarioError(f"bad grid axis: {exc}") from exc
    return Grid(tuple(axes))


def _parse_on(chart: Chart, text: str, what: str) -> PhasePolynomial:
    try:
        return parse_polynomial(chart, text)
    except ExpressionError as exc:
        raise ScenarioError(f"bad {what} expression {text!r}: {exc}") from exc


def _build_frame(chart: Chart, exprs, what: str) -> ReferenceFrame:
    if exprs is None:
        return ReferenceFrame.zero(chart)
    if len(exprs) != chart.dim:
        raise ScenarioError(
            f"{what} needs {chart.dim} component(s), got {len(exprs)}"
        )
    comps = tuple(_parse_on(chart, e, what) for e in exprs)
    try:
        return ReferenceFrame(chart, comps)
    except (ValueError, FrameQError) as exc:
        raise ScenarioError(f"bad {what}: {exc}") from exc


def _build_potential(data: dict, chart: Chart):
    ham = data.get("hamiltonian") or {}
    text = ham.get("potential")
    if text is None:
        return None
    if text in _BUILTIN_POTENTIALS:
        return _BUILTIN_POTENTIALS[text]
    poly = _parse_on(chart, text, "potential")
    if not poly.is_momentum_free() or not poly.is_real():
        raise ScenarioError("a potential must be real and momentum-free")
    return poly


def _mass_of(data: dict):
    ham = data.get("hamiltonian") or {}
    mass = ham.get("mass", 1.0)
    if isinstance(mass, list):
        return np.asarray(mass, dtype=float)
    return float(mass)


def _check_dims(chart: Chart, grid: Grid) -> None:
    if chart.dim != grid.ndim:
        raise ScenarioError(
            f"chart has {chart.dim} coordinate(s) but grid has {grid.ndim} axis/axes"
        )


def _fourier_index(values: np.ndarray) -> int:
    """Signed dominant momentum index of a 1-D periodic state."""
    spectrum = np.fft.fft(values)
    j = int(np.argmax(np.abs(spectrum)))
    n = len(values)
    return j if j <= n // 2 else j - n


# -- kind runners ------------------------------------------------------------


def _run_dirac_check(data: dict) -> ScenarioResult:
    seed = data.get("seed", 0)
    count = data.get("count", 200)
    summary = verify_identities(seed, count)
    result = ScenarioResult(
        data["kind"], data.get("name", "dirac-check"), summary.passed
    )
    result.lines.extend(summary.lines())
    report = (data.get("output") or {}).get("report")
    if report:
        with open(report, "w") as fh:
            fh.write(str(summary) + "\n")
        result.outputs.append(report)
    return result


def _run_adapted_coords(data: dict) -> ScenarioResult:
    chart = _build_chart(data)
    frame = _build_frame(chart, data.get("frame"), "frame")
    clock = data.get("time") or {}
    t0 = float(clock.get("t0", 0.0))
    t1 = float(clock.get("t1", 1.0))
    points = (data.get("initial") or {}).get("points")
    if not points:
        raise ScenarioError("adapted-coords needs initial.points")
    tol = (data.get("tolerances") or {}).get("flow", 1e-10)
    flow = adapted_flow(frame, t0, t1, points, tolerance=tol)
    residual = flow.max_residual()
    passed = residual <= max(tol * 100.0, 1e-8)
    result = ScenarioResult(data["kind"], data.get("name", "adapted-coords"), passed)
    rows = []
    for i, start in enumerate(points):
        finish = flow.forward(t1, i)
        rows.append(
            [str(i)]
            + [format_sig(v) for v in start]
            + [format_sig(v) for v in finish]
        )
    header = (
        ["index"]
        + [f"{c.name}_start" for c in chart.coords]
        + [f"{c.name}_end" for c in chart.coords]
    )
    result.rows = [header] + rows
    result.lines.append(
        f"adapted flow over [{format_sig(t0)}, {format_sig(t1)}]: "
        f"{len(points)} point(s), max residual {format_sig(residual)}"
    )
    result.lines.append(
        ("pass" if passed else "FAIL")
        + f"  residual within {format_sig(max(tol * 100.0, 1e-8))}"
    )
    out = (data.get("output") or {}).get("flow")
    if out:
        write_rows(out, header, rows)
        result.outputs.append(out)
    return result


def _spectrum_operator(data: dict, chart: Chart, grid: Grid):
    t0 = float((data.get("time") or {}).get("t0", 0.0))
    radial = data.get("radial")
    potential = _build_potential(data, chart)
    if radial is not None:
        mass = _mass_of(data)
        if not isinstance(mass, float):
            raise ScenarioError("radial runs take a scalar mass")
        if radial.get("convention", "halfform") == "measure":
            axis = grid.axes[0]
            r = axis.nodes()
            grid = Grid((axis,), weights=r * r * axis.h)
        if isinstance(potential, PhasePolynomial):
            poly = potential
            name = chart.coords[0].name

            def potential(r):
                return poly(**{chart.time: t0, name: r})

        try:
            return radial_operator(potential, int(radial["angular"]), mass, grid)
        except (ValueError, TypeError) as exc:
            raise ScenarioError(f"radial run rejected: {exc}") from exc
    frame = _build_frame(chart, data.get("frame"), "frame")
    try:
        return build_energy_operator(_mass_of(data), potential, frame, grid, t0)
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"energy operator rejected: {exc}") from exc


def _run_spectrum(data: dict) -> ScenarioResult:
    chart = _build_chart(data)
    grid = _build_grid(data)
    if data.get("radial") is None:
        _check_dims(chart, grid)
    op = _spectrum_operator(data, chart, grid)
    k = data.get("eigenpairs", 6)
    pairs = eigensolve(op, k)
    result = ScenarioResult(data["kind"], data.get("name", "spectrum"), True)
    header = ["index", "eigenvalue", "residual"]
    rows = [
        [str(i), format_sig(p.value), format_sig(p.residual)]
        for i, p in enumerate(pairs)
    ]
    result.rows = [header] + rows
    for row in rows:
        result.lines.append("  ".join(row))
    expect = data.get("expect")
    if expect:
        tol = expect["tolerance"]
        worst = 0.0
        for want, got in zip(expect["values"], pairs):
            worst = max(worst, abs(want - got.value))
        ok = worst <= tol and len(expect["values"]) <= len(pairs)
        result.passed = ok
        result.lines.append(
            ("pass" if ok else "FAIL")
            + f"  largest |eigenvalue - expected| = {format_sig(worst)}"
            + f" (tolerance {format_sig(tol)})"
        )
    out = (data.get("output") or {}).get("spectrum")
    if out:
        write_rows(out, header, rows)
        result.outputs.append(out)
    return result


def _run_frame_shift(data: dict) -> ScenarioResult:
    chart = _build_chart(data)
    grid = _build_grid(data)
    _check_dims(chart, grid)
    t0 = float((data.get("time") or {}).get("t0", 0.0))
    frame = _build_frame(chart, data.get("frame"), "frame")
    if data.get("frame_to") is None:
        raise ScenarioError("frame-shift needs frame_to")
    frame_to = _build_frame(chart, data.get("frame_to"), "frame_to")
    potential = _build_potential(data, chart)
    base = build_energy_operator(_mass_of(data), potential, frame, grid, t0)
    shifted = frame_shift(base, frame, frame_to, t0)
    k = data.get("eigenpairs", 6)
    pairs = eigensolve(shifted, k)
    result = ScenarioResult(data["kind"], data.get("name", "frame-shift"), True)

    diff = frame_to - frame
    const_shift = None
    if grid.ndim == 1 and grid.axes[0].bc == "periodic":
        comp = diff.components[0]
        if comp.is_constant():
            const_shift = float(comp.constant_value())

    checks_passed = []
    if const_shift is not None:
        header = ["n", "E_base", "E_shifted", "predicted", "abs_delta"]
        rows = []
        worst = 0.0
        for p in pairs:
            n = _fourier_index(p.state.values)
            e_base = expectation(base, p.state)
            predicted = e_base - n * const_shift
            delta = abs(p.value - predicted)
            worst = max(worst, delta)
            rows.append(
                [
                    str(n),
                    format_sig(e_base),
                    format_sig(p.value),
                    format_sig(predicted),
                    format_sig(delta),
                ]
            )
        tol = (data.get("tolerances") or {}).get("shift")
        if tol is not None:
            ok = worst <= tol
            checks_passed.append(ok)
            result.lines.append(
                ("pass" if ok else "FAIL")
                + f"  largest |shift defect| = {format_sig(worst)}"
                + f" (tolerance {format_sig(tol)})"
            )
    else:
        header = ["index", "eigenvalue", "residual"]
        rows = [
            [str(i), format_sig(p.value), format_sig(p.residual)]
            for i, p in enumerate(pairs)
        ]
    result.rows = [header] + rows
    for row in rows:
        result.lines.append("  ".join(row))

    expect = data.get("expect")
    if expect:
        tol = expect["tolerance"]
        worst = max(
            (abs(w - p.value) for w, p in zip(expect["values"], pairs)), default=0.0
        )
        ok = worst <= tol and len(expect["values"]) <= len(pairs)
        checks_passed.append(ok)
        result.lines.append(
            ("pass" if ok else "FAIL")
            + f"  largest |eigenvalue - expected| = {format_sig(worst)}"
            + f" (tolerance {format_sig(tol)})"
        )

    boost_check = (data.get("checks") or {}).get("boost_overlap")
    if boost_check:
        ground_base = eigensolve(base, 1)[0]
        boosted = boost_eigenstate(ground_base.state, boost_check["boost"])
        overlap = abs(boosted.inner(pairs[0].state))
        deficit = 1.0 - overlap
        ok = deficit <= boost_check["deficit_tolerance"]
        checks_passed.append(ok)
        result.lines.append(
            ("pass" if ok else "FAIL")
            + f"  boosted-state overlap deficit = {format_sig(deficit)}"
            + f" (tolerance {format_sig(boost_check['deficit_tolerance'])})"
        )

    result.passed = all(checks_passed) if checks_passed else True
    out = (data.get("output") or {}).get("spectrum")
    if out:
        write_rows(out, header, rows)
        result.outputs.append(out)
    return result


def _initial_state(data: dict, grid: Grid, op) -> WaveFunction:
    spec = data.get("initial") or {}
    if "eigenstate" in spec:
        index = int(spec["eigenstate"])
        pairs = eigensolve(op, index + 1)
        return pairs[index].state
    gauss = spec.get("gaussian")
    if gauss:
        coords = grid.coordinate_arrays()
        center = gauss["center"]
        if len(center) != grid.ndim:
            raise ScenarioError("gaussian center must match the grid dimension")
        width = float(gauss["width"])
        momentum = gauss.get("momentum", [0.0] * grid.ndim)
        arg = np.zeros(grid.size)
        phase = np.zeros(grid.size)
        for c, k, x in zip(center, momentum, coords):
            arg = arg + (x - c) ** 2
            phase = phase + k * x
        values = np.exp(-arg / (4.0 * width * width) + 1j * phase)
        return WaveFunction(grid, values).normalize()
    raise ScenarioError("evolve needs initial.eigenstate or initial.gaussian")


def _run_evolve(data: dict) -> ScenarioResult:
    chart = _build_chart(data)
    grid = _build_grid(data)
    _check_dims(chart, grid)
    clock = data.get("time") or {}
    t0 = float(clock.get("t0", 0.0))
    t1 = float(clock.get("t1", 1.0))
    dt = float(clock.get("dt", 1e-2))
    frame = _build_frame(chart, data.get("frame"), "frame")
    potential = _build_potential(data, chart)
    op = build_energy_operator(_mass_of(data), potential, frame, grid, t0)
    psi0 = _initial_state(data, grid, op)
    observables = {}
    for name, text in sorted((data.get("observables") or {}).items()):
        poly = _parse_on(chart, text, f"observable {name!r}")
        observables[name] = discretize_affine(poly, grid, t0)
    run = evolve(op, psi0, t1, dt, t0=t0, observables=observables)
    drift = float(np.max(np.abs(run.norms - run.norms[0])))
    result = ScenarioResult(data["kind"], data.get("name", "evolve"), True)
    result.lines.append(
        f"evolved {len(run.times) - 1} step(s) to t = {format_sig(run.times[-1])}, "
        f"norm drift {format_sig(drift)}"
    )
    tol = (data.get("tolerances") or {}).get("norm")
    if tol is not None:
        ok = drift <= tol
        result.passed = ok
        result.lines.append(
            ("pass" if ok else "FAIL") + f"  norm drift within {format_sig(tol)}"
        )
    outputs = data.get("output") or {}
    if outputs.get("evolution"):
        from .reports import write_evolution_csv

        write_evolution_csv(
            outputs["evolution"], run.times, run.norms, run.expectations
        )
        result.outputs.append(outputs["evolution"])
    if outputs.get("snapshot"):
        write_snapshot(outputs["snapshot"], run.states[-1][1])
        result.outputs.append(outputs["snapshot"])
    return result


def _run_classical(data: dict) -> ScenarioResult:
    chart = _build_chart(data)
    ham = data.get("hamiltonian") or {}
    text = ham.get("expression")
    if not text:
        raise ScenarioError("classical runs need hamiltonian.expression")
    hamiltonian = _parse_on(chart, text, "hamiltonian")
    spec = data.get("initial") or {}
    q = spec.get("q")
    p = spec.get("p")
    if q is None or p is None:
        raise ScenarioError("classical runs need initial.q and initial.p")
    t_init = float(spec.get("t", 0.0))
    clock = data.get("time") or {}
    t1 = float(clock.get("t1", 1.0))
    dt = float(clock.get("dt", 1e-3))
    try:
        x0 = PhasePoint(chart, t_init, q, p)
        trajectory = integrate_hamilton(hamiltonian, x0, t1, dt)
    except (ValueError, FrameQError) as exc:
        raise ScenarioError(f"classical run failed to start: {exc}") from exc
    observables = {}
    for name, expr in sorted((data.get("observables") or {}).items()):
        observables[name] = _parse_on(chart, expr, f"observable {name!r}")
    result = ScenarioResult(data["kind"], data.get("name", "classical"), True)
    result.lines.append(
        f"integrated {len(trajectory) - 1} step(s), final {trajectory.final}"
    )
    conserved_names = (data.get("checks") or {}).get("conserved") or []
    if conserved_names:
        tol = (data.get("tolerances") or {}).get("conserved", 1e-8)
        entries = []
        for name in conserved_names:
            if name not in observables:
                raise ScenarioError(
                    f"conserved check names unknown observable {name!r}"
                )
            entries.append((name, observables[name]))
        verdicts = conservation_report(entries, trajectory, tol)
        for v in verdicts:
            result.lines.append(("pass  " if v.conserved else "FAIL  ") + str(v))
        result.passed = all(v.conserved for v in verdicts)
    out = (data.get("output") or {}).get("trajectory")
    if out:
        trajectory.write_csv(out, observables or None)
        result.outputs.append(out)
    return result


_RUNNERS = {
    "dirac-check": _run_dirac_check,
    "adapted-coords": _run_adapted_coords,
    "spectrum": _run_spectrum,
    "frame-shift": _run_frame_shift,
    "evolve": _run_evolve,
    "classical": _run_classical,
}


def run_scenario(source) -> ScenarioResult:
    """Load, validate, and execute a scenario; returns the result record."""
    data = load_scenario(source)
    runner = _RUNNERS[data["kind"]]
    return runner(data)
