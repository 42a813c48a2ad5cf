import random
from fractions import Fraction

import pytest

import selftest


def test_random_configuration_conserves_momentum():
    rng = random.Random(1)
    for n in range(1, 6):
        momenta, masses = selftest.random_configuration(rng, n, 4)
        assert len(momenta) == n
        assert all(sum(col, Fraction(0)) == 0 for col in zip(*momenta))
        assert all(m > 0 for m in masses)


def test_suite_passes():
    summary = selftest.run_selftest(n_min=2, n_max=5, include_integrator=False)
    assert summary.ok, summary.failed
    assert summary.passed == summary.total == 9
    doc = summary.to_dict()
    assert doc['n_range'] == [2, 5]
    assert 'elapsed' not in doc


def test_integrator_identities():
    passed, detail = selftest.check_integrator_identities()
    assert passed, detail


def test_broken_residue_sign_is_caught():
    summary = selftest.run_selftest(n_min=2, n_max=3, residue_sign_fn=lambda order: 1, include_integrator=False)
    assert summary.failed == ['Residue anticommutation']


def test_crashing_check_is_reported():
    def explode(order):
        raise RuntimeError("boom")
    summary = selftest.run_selftest(n_min=2, n_max=3, residue_sign_fn=explode, include_integrator=False)
    outcome = next(o for o in summary.outcomes if o.name == 'Residue anticommutation')
    assert not outcome.passed
    assert 'boom' in outcome.detail


@pytest.mark.parametrize("n_min,n_max", [(0, 3), (4, 3)])
def test_bad_range(n_min, n_max):
    with pytest.raises(ValueError):
        selftest.run_selftest(n_min=n_min, n_max=n_max)
