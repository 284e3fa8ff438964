import pytest

from widegaps.suites import SUITES, null_suite, run_suite


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suites_pass_small(name):
    for res in run_suite(name, 3, 5):
        assert res.ok and res.total >= 3, res.failures


def test_all_runs_each_suite():
    names = [r.name for r in run_suite("all", 1, 2)]
    assert len(names) == 3


def test_null_suite_small():
    assert null_suite(3, 1).ok
