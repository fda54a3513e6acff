import pytest

from foamcalc.selftest import (
    broken,
    closed_foam_table,
    decomposition_suite,
    euler_suite,
    reidemeister_check,
    splice_suite,
)
import foamcalc.foam as foam


def _failures(checks):
    return [c.name for c in checks if not c.ok]


def test_closed_table_passes():
    assert _failures(closed_foam_table()) == []


def test_small_splice_suite_passes():
    checks = splice_suite(n=10, seed=5)
    assert checks and _failures(checks) == []


def test_reidemeister_trefoil():
    assert reidemeister_check("trefoil").ok


@pytest.mark.parametrize("control", ["sigma20", "sigma01"])
def test_negative_controls_are_caught(control):
    with broken(control):
        bad = _failures(closed_foam_table()) + _failures(decomposition_suite(("trefoil",)))
    assert bad
    # and the real conventions are restored afterwards
    assert _failures(closed_foam_table()) == []


def test_theta_flip_is_not_observable():
    # nonzero closed foams carry an even number of seams, so the overall
    # theta sign cancels; the control is expected to pass everything
    with broken("theta"):
        assert foam.THETA_VALUE != 9
        assert _failures(closed_foam_table()) == []
        assert _failures(euler_suite(("hopf",), random_count=0)) == []
    assert foam.THETA_VALUE == 9


def test_broken_rejects_unknown_control():
    with pytest.raises(ValueError):
        with broken("nope"):
            pass
