"""Time-dependent mechanics with reference frames: exact symbolic layer,
grid quantization, classical integration, and a scenario runner.

Submodules load lazily so that importing :mod:`frameq` stays cheap and
thread-cap environment variables set by the command line take effect
before any numerical library initializes.
"""

__version__ = "0.1.0"

_EXPORTS = {
    # errors
    "FrameQError": ".errors",
    "ChartMismatch": ".errors",
    "NonInvertibleMap": ".errors",
    "NonPolynomialResult": ".errors",
    "NotProjectable": ".errors",
    "NotInQuantumAlgebra": ".errors",
    "NotHermitian": ".errors",
    "HermiticityViolation": ".errors",
    "NoConvergence": ".errors",
    "FlowEscape": ".errors",
    "StiffFlow": ".errors",
    "BlowUp": ".errors",
    "ExpressionError": ".errors",
    "ScenarioError": ".errors",
    # charts and exact algebra
    "Coordinate": ".chart",
    "Chart": ".chart",
    "require_same_chart": ".chart",
    "GaussianRational": ".scalars",
    "PhasePolynomial": ".polynomial",
    "exact_divide": ".polynomial",
    "parse_polynomial": ".expr",
    # operators and quantization
    "Space": ".operators",
    "FirstOrderOperator": ".operators",
    "commutator": ".operators",
    "AffineObservable": ".operators",
    "schrodinger_op": ".quantize",
    "prequantum_op": ".quantize",
    "DiracResult": ".quantize",
    "check_dirac": ".quantize",
    "quantum_connection_bracket": ".quantize",
    # frames and mechanics
    "ReferenceFrame": ".frames",
    "frame_from_trivialization": ".frames",
    "FrameFlow": ".frames",
    "adapted_flow": ".frames",
    "relative_velocity": ".frames",
    "lift_vector_field": ".frames",
    "poisson_V": ".mechanics",
    "poisson_T": ".mechanics",
    "covariant_hamiltonian": ".mechanics",
    "hamilton_field": ".mechanics",
    "evolution_bracket": ".mechanics",
    "energy_function": ".mechanics",
    "symmetry_current": ".mechanics",
    # classical integration
    "PhasePoint": ".classical",
    "Trajectory": ".classical",
    "integrate_hamilton": ".classical",
    "evaluate_on": ".classical",
    "ObservableSeries": ".classical",
    "along_trajectory": ".classical",
    "ConservationVerdict": ".classical",
    "conservation_report": ".classical",
    # grids
    "Axis": ".grid",
    "Grid": ".grid",
    "axis_d1": ".grid",
    "axis_d2": ".grid",
    "radial_grid": ".grid",
    "WaveFunction": ".grid",
    "GridOperator": ".grid",
    "write_snapshot": ".grid",
    "read_snapshot": ".grid",
    "discretize_affine": ".gridops",
    "build_energy_operator": ".gridops",
    "frame_shift": ".gridops",
    "EigenPair": ".gridops",
    "eigensolve": ".gridops",
    "EvolutionResult": ".gridops",
    "evolve": ".gridops",
    "boost_eigenstate": ".gridops",
    "expectation": ".gridops",
    "radial_operator": ".gridops",
    "radial_measure_grid": ".gridops",
    # verification, reports, scenarios
    "SuiteResult": ".verify",
    "VerificationSummary": ".verify",
    "verify_identities": ".verify",
    "format_sig": ".reports",
    "write_rows": ".reports",
    "write_spectrum_csv": ".reports",
    "write_evolution_csv": ".reports",
    "validate_scenario": ".scenarios",
    "load_scenario": ".scenarios",
    "ScenarioResult": ".scenarios",
    "run_scenario": ".scenarios",
    "BUILTIN_SCENARIOS": ".scenarios",
    "backend_name": "._backend",
}

__all__ = sorted(_EXPORTS) + ["__version__"]


def __getattr__(name):
    try:
        where = _EXPORTS[name]
    except KeyError:
        raise AttributeError(
            f"module {__name__!r} has no attribute {name!r}"
        ) from None
    from importlib import import_module

    value = getattr(import_module(where, __name__), name)
    globals()[name] = value
    return value


def __dir__():
    return sorted(set(globals()) | set(_EXPORTS))
