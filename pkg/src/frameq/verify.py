"""Randomized verification of the exact operator identities.

Every suite draws seeded random inputs, checks an identity by exact
polynomial or operator equality, and reports the first counterexample
verbatim.  Floating point never enters; a failure here is a theorem
failure, not a tolerance issue.

The ``corrupt_divergence`` hook deliberately miscalibrates the divergence
term of the position-representation map under test while the reference
side stays canonical; the Dirac suite is then expected to fail with a
nonzero witness, which guards the checker itself against going soft.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .chart import Chart
from .mechanics import energy_function, poisson_T, poisson_V
from .frames import ReferenceFrame
from .operators import Space
from .polynomial import PhasePolynomial
from .quantize import check_dirac, schrodinger_op

_CANONICAL_WEIGHT = Fraction(1, 2)
_CORRUPT_WEIGHT = Fraction(1)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: int
    failures: int
    counterexample: str | None

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass(frozen=True)
class VerificationSummary:
    seed: int
    count: int
    suites: tuple

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def lines(self) -> list:
        out = []
        for s in self.suites:
            word = "pass" if s.passed else "FAIL"
            out.append(f"{word}  {s.name}: {s.cases - s.failures}/{s.cases}")
            if s.counterexample:
                out.append(f"      first counterexample: {s.counterexample}")
        verdict = "all identities hold" if self.passed else "identity violations found"
        out.append(f"{verdict} (seed {self.seed}, {self.count} cases per suite)")
        return out

    def __str__(self):
        return "\n".join(self.lines())


def _rand_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-4, 4), rng.randint(1, 4))


def _rand_base_poly(chart: Chart, rng: random.Random, max_degree: int = 3):
    """Random real polynomial in (t, q) only."""
    t = chart.var(chart.time)
    qs = [chart.var(c.name) for c in chart.coords]
    out = PhasePolynomial.zero(chart)
    for _ in range(rng.randint(1, 3)):
        c = _rand_fraction(rng)
        if not c:
            continue
        term = PhasePolynomial.constant(chart, c)
        budget = rng.randint(0, max_degree)
        for _ in range(budget):
            factor = rng.choice([t] + qs)
            term = term * factor
        out = out + term
    return out


def _rand_affine(chart: Chart, rng: random.Random):
    """Random observable affine in the momenta p_k."""
    out = _rand_base_poly(chart, rng)
    for name in chart.momentum_names():
        if rng.random() < 0.8:
            out = out + _rand_base_poly(chart, rng) * chart.var(name)
    return out


def _rand_momentum_poly(chart: Chart, rng: random.Random, max_momentum: int = 2):
    """Random real polynomial of momentum degree <= max_momentum, free of p."""
    names = chart.momentum_names()
    out = _rand_base_poly(chart, rng)
    for _ in range(rng.randint(1, 3)):
        term = _rand_base_poly(chart, rng, max_degree=2)
        for _ in range(rng.randint(1, max_momentum)):
            term = term * chart.var(rng.choice(names))
        out = out + term
    return out


def _rand_frame(chart: Chart, rng: random.Random) -> ReferenceFrame:
    return ReferenceFrame(
        chart, tuple(_rand_base_poly(chart, rng, 2) for _ in chart.coords)
    )


def _charts():
    return (Chart(("q",)), Chart(("x", "y")))


def _counterexample(*parts) -> str:
    return " ; ".join(str(p) for p in parts)


def _suite_dirac_schrodinger(rng, count, weight) -> SuiteResult:
    failures = 0
    first = None
    charts = _charts()
    for k in range(count):
        chart = charts[k % len(charts)]
        f = _rand_affine(chart, rng)
        g = _rand_affine(chart, rng)
        result = check_dirac(f, g, map="schrodinger", _divergence_weight=weight)
        if not result.passed:
            failures += 1
            if first is None:
                first = _counterexample(
                    f"f = {f}", f"g = {g}", f"witness = {result.witness}"
                )
    return SuiteResult("dirac/schrodinger", count, failures, first)


def _suite_dirac_prequantum(rng, count) -> SuiteResult:
    failures = 0
    first = None
    charts = _charts()
    for k in range(count):
        chart = charts[k % len(charts)]
        f = _rand_momentum_poly(chart, rng)
        g = _rand_momentum_poly(chart, rng)
        result = check_dirac(f, g, map="prequantum")
        if not result.passed:
            failures += 1
            if first is None:
                first = _counterexample(
                    f"f = {f}", f"g = {g}", f"witness = {result.witness}"
                )
    return SuiteResult("dirac/prequantum", count, failures, first)


def _rand_full_poly(chart, rng, with_p: bool):
    out = _rand_momentum_poly(chart, rng, max_momentum=1)
    if with_p and rng.random() < 0.6:
        out = out + _rand_base_poly(chart, rng, 1) * chart.var("p")
    return out


def _suite_bracket_algebra(rng, count) -> SuiteResult:
    """Antisymmetry, bilinearity, and the Jacobi identity, both brackets."""
    failures = 0
    first = None
    charts = _charts()
    for k in range(count):
        chart = charts[k % len(charts)]
        use_t = bool(k % 2)
        bracket = poisson_T if use_t else poisson_V
        f = _rand_full_poly(chart, rng, with_p=use_t)
        g = _rand_full_poly(chart, rng, with_p=use_t)
        h = _rand_full_poly(chart, rng, with_p=use_t)
        a = PhasePolynomial.constant(chart, _rand_fraction(rng))
        b = PhasePolynomial.constant(chart, _rand_fraction(rng))
        anti = bracket(f, g) + bracket(g, f)
        lin = bracket(a * f + b * g, h) - (a * bracket(f, h) + b * bracket(g, h))
        jacobi = (
            bracket(f, bracket(g, h))
            + bracket(g, bracket(h, f))
            + bracket(h, bracket(f, g))
        )
        for name, residue in (
            ("antisymmetry", anti),
            ("bilinearity", lin),
            ("jacobi", jacobi),
        ):
            if not residue.is_zero():
                failures += 1
                if first is None:
                    which = "T" if use_t else "V"
                    first = _counterexample(
                        f"{name} on space {which}",
                        f"f = {f}",
                        f"g = {g}",
                        f"h = {h}",
                        f"residue = {residue}",
                    )
                break
    return SuiteResult("bracket-algebra", count, failures, first)


def _suite_zeta_morphism(rng, count) -> SuiteResult:
    """Pulled-back functions bracket the same way on both spaces."""
    failures = 0
    first = None
    charts = _charts()
    for k in range(count):
        chart = charts[k % len(charts)]
        f = _rand_momentum_poly(chart, rng, max_momentum=2)
        g = _rand_momentum_poly(chart, rng, max_momentum=2)
        residue = poisson_T(f, g) - poisson_V(f, g)
        if not residue.is_zero():
            failures += 1
            if first is None:
                first = _counterexample(
                    f"f = {f}", f"g = {g}", f"residue = {residue}"
                )
    return SuiteResult("zeta-morphism", count, failures, first)


def _suite_energy_frame_relation(rng, count) -> SuiteResult:
    """E of one frame minus E of another is the frame-difference momentum."""
    failures = 0
    first = None
    charts = _charts()
    for k in range(count):
        chart = charts[k % len(charts)]
        h = _rand_momentum_poly(chart, rng, max_momentum=2)
        g1 = _rand_frame(chart, rng)
        g2 = _rand_frame(chart, rng)
        shift = PhasePolynomial.zero(chart)
        for name, c1, c2 in zip(chart.momentum_names(), g1.components, g2.components):
            shift = shift + (c1 - c2) * chart.var(name)
        residue = energy_function(h, g2) - energy_function(h, g1) - shift
        if not residue.is_zero():
            failures += 1
            if first is None:
                first = _counterexample(
                    f"H = {h}",
                    f"frames = {g1}, {g2}",
                    f"residue = {residue}",
                )
    return SuiteResult("energy-frame-relation", count, failures, first)


def _suite_splitting_identity(rng, count) -> SuiteResult:
    """Frame part plus energy part of the covariant operator is frame-free."""
    failures = 0
    first = None
    charts = _charts()
    for k in range(count):
        chart = charts[k % len(charts)]
        h = _rand_affine(chart, rng)
        p = chart.var("p")

        def assemble(frame):
            frame_momentum = PhasePolynomial.zero(chart)
            for name, comp in zip(chart.momentum_names(), frame.components):
                frame_momentum = frame_momentum + comp * chart.var(name)
            frame_part = schrodinger_op(p + frame_momentum, Space.T)
            energy_part = schrodinger_op(h - frame_momentum, Space.T)
            return frame_part + energy_part

        g1 = _rand_frame(chart, rng)
        g2 = _rand_frame(chart, rng)
        one = assemble(g1)
        two = assemble(g2)
        if one != two:
            failures += 1
            if first is None:
                first = _counterexample(
                    f"H = {h}",
                    f"frames = {g1}, {g2}",
                    f"lhs = {one}",
                    f"rhs = {two}",
                )
    return SuiteResult("splitting-identity", count, failures, first)


def verify_identities(
    seed: int, count: int, corrupt_divergence: bool = False
) -> VerificationSummary:
    """Run every identity suite on seeded random inputs.

    ``count`` is the number of random cases per suite and must be at
    least 1.  With ``corrupt_divergence`` the position-representation map
    under test gets a wrong divergence weight, and a healthy checker must
    report Dirac failures.
    """
    if count < 1:
        raise ValueError("need at least one case per suite")
    rng = random.Random(seed)
    weight = _CORRUPT_WEIGHT if corrupt_divergence else _CANONICAL_WEIGHT
    suites = (
        _suite_dirac_schrodinger(rng, count, weight),
        _suite_dirac_prequantum(rng, count),
        _suite_bracket_algebra(rng, count),
        _suite_zeta_morphism(rng, count),
        _suite_energy_frame_relation(rng, count),
        _suite_splitting_identity(rng, count),
    )
    return VerificationSummary(seed, count, tuple(suites))
