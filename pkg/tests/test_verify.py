import pytest

from frameq import verify_identities

SUITES = (
    "dirac/schrodinger",
    "dirac/prequantum",
    "bracket-algebra",
    "zeta-morphism",
    "energy-frame-relation",
    "splitting-identity",
)


def test_all_suites_pass_on_random_inputs():
    summary = verify_identities(seed=11, count=25)
    assert summary.passed
    assert tuple(s.name for s in summary.suites) == SUITES
    for suite in summary.suites:
        assert suite.cases == 25
        assert suite.failures == 0
        assert suite.counterexample is None
    lines = summary.lines()
    assert lines[0] == "pass  dirac/schrodinger: 25/25"
    assert lines[-1] == "all identities hold (seed 11, 25 cases per suite)"


def test_corrupted_divergence_weight_is_detected():
    # miscalibrating the map under test must surface as Dirac failures
    # while the purely classical suites stay clean
    summary = verify_identities(seed=5, count=30, corrupt_divergence=True)
    assert not summary.passed
    by_name = {s.name: s for s in summary.suites}
    broken = by_name["dirac/schrodinger"]
    assert broken.failures > 0
    assert broken.counterexample is not None
    assert "witness = " in broken.counterexample
    for name in SUITES[1:]:
        assert by_name[name].passed
    text = str(summary)
    assert "FAIL  dirac/schrodinger" in text
    assert "first counterexample:" in text
    assert "identity violations found" in text


def test_same_seed_reproduces_the_report():
    a = verify_identities(seed=42, count=10)
    b = verify_identities(seed=42, count=10)
    assert str(a) == str(b)
    c = verify_identities(seed=43, count=10)
    assert c.passed  # different draws, same theorems


def test_count_validation():
    with pytest.raises(ValueError):
        verify_identities(seed=1, count=0)
    with pytest.raises(ValueError):
        verify_identities(seed=1, count=-5)
