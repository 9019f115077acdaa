import pytest

from powergen.checks import CHECKS, winding_consistency


@pytest.mark.parametrize("name", sorted(CHECKS))
def test_every_check_passes_at_its_defaults(name):
    res = CHECKS[name](workers=2)
    assert res.name == name
    assert res.passed, (res.measured, res.tolerance, res.details)


def test_winding_consistency_reports_one_root_per_bracket():
    sweep, brackets, roots, counts = winding_consistency(0.5, 30)
    assert len(brackets) == 10 and counts == [1] * 10
    assert roots.ok and sweep.converged
