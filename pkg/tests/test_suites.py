#***********************************************************************
# Invariant Suite Tests
#***********************************************************************

# Data science imports
import pytest

# Project Imports
from src.errors import ScenarioError
from src.harness import jsonable
from src.harness import report_to_json
from src.suites import SUITES
from src.suites import invariant
from src.suites import run_suite


def _failed(report):
    return [row['name'] for row in report['rows'] if not row['passed']]

#-----------------------------------------------------------------------

def test_invariant_rows():
    assert invariant('x', -1e-9, 1e-8, 3)['passed']
    assert not invariant('x', -1e-7, 1e-8, 3)['passed']
    row = invariant('y', 0.0, 0.0, 1, passed=False, pvalue=0.5)
    assert not row['passed']
    assert row['pvalue'] == 0.5


def test_unknown_suite():
    with pytest.raises(ScenarioError):
        run_suite('nonsense')


def test_sk_suite():
    report = run_suite('sk')
    assert report['scale'] == 'quick'
    assert _failed(report) == []


def test_pl_suite():
    assert _failed(run_suite('pl')) == []


@pytest.mark.slow
@pytest.mark.parametrize('name', ['equilibrium', 'transport', 'sun', 'gas'])
def test_quick_suites(name):
    assert name in SUITES
    assert _failed(run_suite(name, seed=1)) == []


@pytest.mark.slow
def test_gas_suite_rerun_is_identical():
    first = report_to_json(jsonable(run_suite('gas', seed=11)))
    assert first == report_to_json(jsonable(run_suite('gas', seed=11)))


@pytest.mark.slow
def test_pressure_suite():
    report = run_suite('pressure', seed=1, workers=2)
    failed = _failed(report)
    assert 'pressure-exact' not in failed
    assert 'pressure-mc-zero' not in failed

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
