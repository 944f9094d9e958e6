#***********************************************************************
# Scenario, Report and Runner Tests
#***********************************************************************

# Python Imports
import json

# Data science imports
import numpy as np
import pytest

# Project Imports
from src.circle_core import Potential
from src.circle_core import delta_measure
from src.circle_core import uniform_measure
from src.coulomb_gas import ChainConfig
from src.errors import ScenarioError
from src.harness import expand_cases
from src.harness import jsonable
from src.harness import load_scenarios
from src.harness import make_report
from src.harness import measure_from_spec
from src.harness import potential_from_spec
from src.harness import render_report
from src.harness import run_equilibrium
from src.harness import run_gas
from src.harness import run_pl_circle
from src.harness import run_pressure
from src.harness import run_sk
from src.harness import run_sun_check
from src.harness import run_tci
from src.harness import run_w2
from src.harness import scenarios_from_dict
from src.harness import write_report
from src.processes import tci_worker


def _scenario_file(tmp_path, data):
    pathname = tmp_path / 'scenarios.json'
    pathname.write_text(json.dumps(data))
    return str(pathname)


def _one_scenario(**changes):
    entry = {'name': 'cos', 'potential': {'cos': [0.3]}, 'measure': {'family': 'uniform'}}
    entry.update(changes)
    return {'grid': 64, 'scenarios': [entry]}

#-----------------------------------------------------------------------
# Scenario files
#-----------------------------------------------------------------------

def test_scenario_defaults_and_overrides():
    data = {'grid': 64, 'seeds': [3], 'tolerances': {'tci': 1e-6},
            'scenarios': [{'name': 'a', 'potential': {'cos': [0.1]},
                           'measure': {'family': 'random-trig', 'count': 3}},
                          {'name': 'b', 'potential': {}, 'grid': 32, 'seeds': [1, 2],
                           'measure': {'family': 'equilibrium'}, 'tolerances': {'tci': 1e-9}}]}
    a, b = scenarios_from_dict(data)
    assert (a.grid, a.seeds, a.count, a.tolerance('tci')) == (64, [3], 3, 1e-6)
    assert (b.grid, b.seeds, b.count, b.tolerance('tci')) == (32, [1, 2], 1, 1e-9)
    assert a.tolerance('gap') == 1e-9
    assert len(expand_cases([a, b])) == 3 + 2


@pytest.mark.parametrize('data', [
    {'scenarios': []},
    {'no-scenarios': []},
    _one_scenario(potential={'cos': ['x']}),
    _one_scenario(potential={'cos': 0.3}),
    _one_scenario(potential={'tan': [1.0]}),
    _one_scenario(measure={'family': 'gaussian'}),
    _one_scenario(measure={'family': 'uniform', 'count': 0}),
    _one_scenario(grid=4),
    _one_scenario(seeds=[]),
    _one_scenario(tolerances={'speed': 1.0}),
    {'scenarios': [{'name': 'x', 'potential': {}, 'measure': {'family': 'uniform'}},
                   {'name': 'x', 'potential': {}, 'measure': {'family': 'uniform'}}]},
])
def test_malformed_scenarios_are_rejected(data):
    with pytest.raises(ScenarioError):
        scenarios_from_dict(data)


def test_scenario_file_errors(tmp_path):
    pathname = tmp_path / 'broken.json'
    pathname.write_text('{"scenarios": [')
    with pytest.raises(ScenarioError):
        load_scenarios(str(pathname))
    with pytest.raises(ScenarioError):
        load_scenarios('no-such-scenario')


def test_bundled_scenarios_load():
    assert [s.name for s in load_scenarios('null')] == ['null']
    (scenario,) = load_scenarios('cos-family')
    assert scenario.count == 50

#-----------------------------------------------------------------------
# Potentials, measures and the TCI runner
#-----------------------------------------------------------------------

def test_specs_resolve_to_objects():
    Q = potential_from_spec({'cos': [0.3], 'constant': 1.0}, 64)
    assert Q.evaluate(np.array([0.0]))[0] == pytest.approx(1.3)
    for family in ('uniform', 'cosine', 'random-trig', 'equilibrium', 'perturbed-equilibrium'):
        mu = measure_from_spec({'family': family, 'params': {'c': 0.5}}, Q, 7)
        assert mu.is_grid() and mu.n_grid == 64
    first = measure_from_spec({'family': 'random-trig'}, Q, 7)
    second = measure_from_spec({'family': 'random-trig'}, Q, 7)
    assert np.array_equal(first.masses, second.masses)


def test_null_scenario_passes():
    report = run_tci('null')
    assert report['passed']
    assert report['failures'] == []
    (row,) = report['rows']
    assert row['scenario'] == 'null'
    assert row['slack'] == pytest.approx(0.0, abs=1e-7)


def test_inadmissible_potential_is_a_violation(tmp_path):
    pathname = _scenario_file(tmp_path, _one_scenario(potential={'cos': [0.8]}))
    report = run_tci(pathname)
    assert not report['passed']
    assert report['failures'] == ['cos']
    assert 'error' in report['rows'][0]


def test_tci_worker_row():
    (scenario,) = scenarios_from_dict(_one_scenario())
    row = tci_worker(expand_cases([scenario])[0])
    assert row['holds']
    assert row['rho'] == pytest.approx(-0.3, abs=1e-10)
    assert row['case'] == 0

#-----------------------------------------------------------------------
# Reports
#-----------------------------------------------------------------------

def test_jsonable_handles_numpy_and_infinities():
    value = jsonable({'a': np.float64(np.inf), 'b': [np.int64(3), np.bool_(True)],
                      'c': np.array([1.0, -np.inf]), 'd': float('nan')})
    assert value == {'a': 'inf', 'b': [3, True], 'c': [1.0, '-inf'], 'd': 'nan'}
    json.dumps(value, allow_nan=False)


def test_report_formats(tmp_path):
    document = make_report('w2', run_w2(delta_measure(0.0), delta_measure(1.0)))
    assert set(document['metadata']) == {'command', 'timestamp', 'build'}
    loaded = json.loads(render_report(document, 'json'))
    assert loaded['report']['wasserstein'] == pytest.approx(1.0 / np.sqrt(2.0))
    assert render_report(document, 'csv').splitlines()[0] == 'source,target,mass'
    assert 'mass' in render_report(document, 'table')
    pathname = str(tmp_path / 'out' / 'report.json')
    write_report(document, pathname)
    with open(pathname) as f:
        assert json.load(f)['metadata']['command'] == 'w2'
    with pytest.raises(ScenarioError):
        render_report(document, 'xml')


def test_reports_differ_only_in_metadata():
    first = make_report('sun-check', run_sun_check([2, 3], 5, 11))
    second = make_report('sun-check', run_sun_check([2, 3], 5, 11))
    assert first['report'] == second['report']

#-----------------------------------------------------------------------
# Runners
#-----------------------------------------------------------------------

def test_run_equilibrium_report():
    report = run_equilibrium(Potential.cosine(0.5, 64))
    assert report['passed']
    assert len(report['rows']) == 64
    assert report['b_constant'] == pytest.approx(0.0625, abs=1e-12)
    assert report['log_energy_upper_modes'] == pytest.approx(0.0, abs=1e-15)
    effective = [row['effective_potential'] for row in report['rows']]
    assert max(effective) - min(effective) == pytest.approx(0.0, abs=1e-9)


def test_run_w2_report():
    report = run_w2(uniform_measure(16), uniform_measure(16))
    assert report['wasserstein'] == pytest.approx(0.0, abs=1e-6)


def test_run_gas_report(tmp_path):
    cfg = ChainConfig(steps=400, burn_in=100, thin=10, seed=2)
    trace = str(tmp_path / 'trace.csv')
    report = run_gas(Potential.zero(32), 3, cfg, trace)
    assert report['samples'] == 30
    assert sum(row['mass'] for row in report['rows']) == pytest.approx(1.0)
    with open(trace) as f:
        assert f.readline().startswith('step,angle_0')


def test_run_sk_and_pl_circle():
    assert run_sk([2, 3], [1.0], [0.5], 5)['passed']
    report = run_pl_circle(32, 2, (0.25, 0.75), 0)
    assert report['passed']
    assert len(report['rows']) == 4


def test_every_runner_reports_tolerance_and_seed():
    cfg = ChainConfig(steps=200, burn_in=50, thin=5, seed=4)
    reports = {
        'tci': run_tci('null'),
        'equilibrium': run_equilibrium(Potential.cosine(0.3, 32)),
        'w2': run_w2(delta_measure(0.0), delta_measure(1.0)),
        'pressure': run_pressure(Potential.zero(16), Potential.cosine(0.2, 16), [3], cfg, 3),
        'gas': run_gas(Potential.zero(16), 3, cfg),
        'sk': run_sk([2], [1.0], [0.5], 3),
        'pl-circle': run_pl_circle(16, 1, (0.5,), 7),
        'sun-check': run_sun_check([2], 2, 9)}
    for command, report in reports.items():
        document = make_report(command, report)['report']
        assert 'tolerance' in document, command
        assert 'seed' in document, command
    assert reports['gas']['seed'] == 4
    assert reports['pressure']['seed'] == 4
    assert reports['pl-circle']['seed'] == 7
    assert reports['equilibrium']['seed'] is None
    assert reports['equilibrium']['tolerance'] == pytest.approx(1e-9)

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
