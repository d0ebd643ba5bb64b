"""Compare the compiled kernel against the pure-Python fallback.

The backend is chosen once at import, so each measurement runs in a
subprocess: one with FRAMEQ_PURE_PYTHON=1, one without.  Workloads cover
the three hot paths: exact polynomial products, symbolic commutator
checks, and the packed RK4 integrator.

Usage: python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _bench_poly_products():
    import random
    from fractions import Fraction

    from frameq import Chart, PhasePolynomial
    from frameq.scalars import GaussianRational

    rng = random.Random(11)
    chart = Chart(("x", "y", "z"))
    polys = []
    for _ in range(30):
        terms = {}
        for _ in range(12):
            exps = tuple(rng.randint(0, 3) for _ in range(chart.nvars))
            terms[exps] = GaussianRational(
                Fraction(rng.randint(-9, 9), rng.randint(1, 5))
            )
        polys.append(PhasePolynomial(chart, terms))
    t0 = time.perf_counter()
    acc = None
    for i in range(len(polys)):
        prod = polys[i] * polys[(i + 1) % len(polys)] * polys[(i + 2) % len(polys)]
        acc = prod if acc is None else acc + prod
    return time.perf_counter() - t0


def _bench_dirac_commutators():
    from frameq import verify_identities

    t0 = time.perf_counter()
    summary = verify_identities(3, 60)
    elapsed = time.perf_counter() - t0
    assert summary.passed
    return elapsed


def _bench_rk4():
    from frameq import Chart, PhasePoint, integrate_hamilton, parse_polynomial

    chart = Chart(("q",))
    h = parse_polynomial(chart, "p_q^2/2 + q^2/2")
    x0 = PhasePoint(chart, 0.0, (1.0,), (0.0,))
    t0 = time.perf_counter()
    traj = integrate_hamilton(h, x0, 50.0, 1e-3)
    elapsed = time.perf_counter() - t0
    assert len(traj) == 50001
    return elapsed


_WORKLOADS = {
    "poly-products": _bench_poly_products,
    "dirac-commutators": _bench_dirac_commutators,
    "rk4-oscillator": _bench_rk4,
}


def _worker(repeat: int) -> None:
    from frameq import backend_name

    times = {}
    for name, fn in _WORKLOADS.items():
        times[name] = min(fn() for _ in range(repeat))
    print(json.dumps({"backend": backend_name(), "times": times}))


def _measure(pure: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("FRAMEQ_PURE_PYTHON", None)
    if pure:
        env["FRAMEQ_PURE_PYTHON"] = "1"
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker", str(repeat)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="best of N runs")
    parser.add_argument("--worker", type=int, help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.worker is not None:
        _worker(args.worker)
        return 0

    pure = _measure(True, args.repeat)
    fast = _measure(False, args.repeat)
    if fast["backend"] == pure["backend"]:
        print(f"only the {pure['backend']} backend is available; nothing to compare")
        return 0

    width = max(len(n) for n in _WORKLOADS)
    print(f"{'workload':<{width}}  {'pure (s)':>10}  {fast['backend']:>10}  speedup")
    for name in _WORKLOADS:
        a = pure["times"][name]
        b = fast["times"][name]
        print(f"{name:<{width}}  {a:>10.4f}  {b:>10.4f}  {a / b:>6.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
