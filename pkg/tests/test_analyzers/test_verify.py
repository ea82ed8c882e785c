"""
Tests for Property Suite Module
"""

import random

import pytest

from src.analyzers import verify
from src.analyzers.verify import (
    SUITE_MINOR_LIMIT,
    SUITES,
    SuiteResult,
    _random_complete_fan,
    check_minor_gcds,
    check_surface_fans,
    run_suite,
    run_suites,
)
from src.core.errors import InvariantViolation
from src.core.exactlin import as_int_matrix


@pytest.mark.parametrize('name', sorted(SUITES))
def test_suite_passes_on_small_count(name):
    result = run_suite(name, 5, seed=7)
    assert result.ok, result.first_failure
    assert result.passed == 5


def test_suites_are_reproducible():
    first = run_suite('exactlin', 10, seed=3)
    second = run_suite('exactlin', 10, seed=3)
    assert first.to_dict() == second.to_dict()


def test_run_suites_subset():
    results = run_suites(2, seed=1, names=['weighted_projective', 'surface_fans'])
    assert [r.name for r in results] == ['weighted_projective', 'surface_fans']
    assert all(r.ok for r in results)


def test_library_errors_count_as_failures(mocker):
    """An exception inside a check is recorded with its instance."""
    def broken(rng):
        raise InvariantViolation("routes disagree", {'rays': [[1, 0]]})

    mocker.patch.dict(verify.SUITES, {'broken': broken})
    result = run_suite('broken', 3, seed=0)
    assert result.failed == 3
    assert not result.ok
    assert result.first_failure['case'] == 0
    assert "routes disagree" in result.first_failure['message']
    assert result.failure_instance == {'rays': [[1, 0]]}


def test_suite_result_to_dict():
    result = SuiteResult('exactlin', passed=2)
    data = result.to_dict()
    assert data['suite'] == 'exactlin'
    assert data['passed'] == 2
    assert data['failed'] == 0
    assert 'first_failure' not in data


def test_minor_suite_bounds_the_enumeration(mocker):
    spy = mocker.spy(verify, 'minor_sets')
    for seed in range(5):
        instance, message = check_minor_gcds(random.Random(seed))
        assert message is None, instance
    assert spy.call_count == 5
    assert all(call.kwargs['limit'] == SUITE_MINOR_LIMIT for call in spy.call_args_list)


def test_minor_suite_compares_generic_cokernel(mocker):
    """A generic P_hat with a different cokernel is reported."""
    mocker.patch.object(verify, 'hat_maps', return_value=mocker.Mock(Phat=as_int_matrix([[0]])))
    instance, message = check_minor_gcds(random.Random(0))
    assert message is not None
    assert "from the fan" in message


def test_surface_suite_compares_both_routes(mocker):
    mocker.patch.object(verify, 'picard_via_hat', return_value=mocker.Mock(pic_index=-1))
    instance, message = check_surface_fans(random.Random(0))
    assert message.startswith("routes disagree")


def test_random_complete_fans_stay_in_range():
    rng = random.Random(5)
    fans = [_random_complete_fan(rng) for _ in range(200)]
    assert all(3 <= len(fan.rays) <= 7 for fan in fans)
    assert all(abs(x) <= 9 for fan in fans for ray in fan.rays for x in ray)
    assert max(len(fan.rays) for fan in fans) == 7
    assert all(fan.is_complete_2d() for fan in fans)
