#***********************************************************************
# Scenarios, Runners and Reports
#***********************************************************************
#
# Part 1: Scenario files
# Part 2: Resolving potentials and measures
# Part 3: Reports
# Part 4: Runners behind the command line
#
# A scenario file is JSON:
#
#   {"grid": 256, "seeds": [1], "tolerances": {"tci": 1e-7},
#    "scenarios": [{"name": "...",
#                   "potential": {"cos": [0.3], "sin": [], "constant": 0},
#                   "measure": {"family": "random-trig", "count": 50,
#                               "params": {"degree": 4}}}]}
#
# Top level grid, seeds and tolerances are defaults for every scenario.
#
#***********************************************************************

# Python Imports
import os
import json
import math
import logging
import datetime
import subprocess
from dataclasses import dataclass, field

# Data science imports
import numpy as np
import pandas as pd
from tabulate import tabulate

# Project Imports
import src.processes as pr
from src.circle_core import MASS_TOLERANCE
from src.circle_core import Potential
from src.circle_core import cosine_measure
from src.circle_core import log_energy_upper_modes
from src.circle_core import potential_to_dict
from src.circle_core import random_trig_measure
from src.circle_core import uniform_measure
from src.coulomb_gas import mcmc_sample
from src.coulomb_gas import mean_empirical_measure
from src.coulomb_gas import pressure_extrapolation
from src.coulomb_gas import pressure_mc
from src.equilibrium import GAP_TOLERANCE
from src.equilibrium import effective_potential
from src.equilibrium import equilibrium_of
from src.equilibrium import free_pressure
from src.equilibrium import solve_equilibrium
from src.errors import ScenarioError
from src.geometry_sk import PL_TOLERANCE
from src.geometry_sk import phi_sweep
from src.geometry_sk import pl_verify_circle
from src.sun_lab import contraction_sweep
from src.transport import circular_w2
from src.utils import FREETCI_DIR
from src.utils import ensure_directory
from src.utils import make_scenario_pathname
from src.utils import pmap
from src.utils import spawn_seeds

logger = logging.getLogger(__name__)

#-----------------------------------------------------------------------
# Parameters
#-----------------------------------------------------------------------

VERSION = '0.1.0'

DEFAULT_TOLERANCES = {'tci': 1e-7, 'gap': 1e-9, 'dual': 1e-8}

MEASURE_FAMILIES = ('equilibrium', 'uniform', 'cosine', 'random-trig', 'perturbed-equilibrium')

OUTPUT_FORMATS = ('json', 'table', 'csv')

# Every runner report carries the tolerance it was judged against and
# the seed it ran from (None for deterministic runs).

SK_TOLERANCE = 1e-12

CONTRACTION_TOLERANCE = 1e-9

PRESSURE_MC_TOLERANCE = 0.05

#***********************************************************************
# Part 1: Scenario Files
#***********************************************************************

@dataclass
class Scenario:
    name: str
    q_spec: dict
    mu_spec: dict
    grid: int = 256
    seeds: list = field(default_factory=lambda: [0])
    tolerances: dict = field(default_factory=dict)

    def tolerance (self, check):
        return float(self.tolerances.get(check, DEFAULT_TOLERANCES[check]))

    @property
    def count (self):
        return int(self.mu_spec.get('count', 1))

    def to_dict (self):
        return {'name': self.name, 'potential': self.q_spec, 'measure': self.mu_spec,
                'grid': self.grid, 'seeds': list(self.seeds), 'tolerances': self.tolerances}

#-----------------------------------------------------------------------

def _require (data, key, context):
    if key not in data:
        raise ScenarioError(context + " is missing '" + key + "'")
    return data[key]

#-----------------------------------------------------------------------

def _check_potential_spec (spec, context):
    if not isinstance(spec, dict):
        raise ScenarioError(context + ": potential must be an object")
    unknown = set(spec) - {'cos', 'sin', 'constant'}
    if unknown:
        raise ScenarioError(context + ": unknown potential keys " + repr(sorted(unknown)))
    for key in ('cos', 'sin'):
        if not isinstance(spec.get(key, []), list):
            raise ScenarioError(context + ": potential '" + key + "' must be a list")
    try:
        np.asarray(spec.get('cos', []) + spec.get('sin', []), dtype=float)
        float(spec.get('constant', 0.0))
    except (TypeError, ValueError):
        raise ScenarioError(context + ": potential coefficients must be numbers")

#-----------------------------------------------------------------------

def _check_measure_spec (spec, context):
    if not isinstance(spec, dict):
        raise ScenarioError(context + ": measure must be an object")
    family = _require(spec, 'family', context + " measure")
    if family not in MEASURE_FAMILIES:
        raise ScenarioError(context + ": unknown measure family " + repr(family))
    if not isinstance(spec.get('params', {}), dict):
        raise ScenarioError(context + ": measure params must be an object")
    count = spec.get('count', 1)
    if not isinstance(count, int) or count < 1:
        raise ScenarioError(context + ": measure count must be a positive integer")

#-----------------------------------------------------------------------

def scenarios_from_dict (data):
    if not isinstance(data, dict) or not isinstance(data.get('scenarios'), list):
        raise ScenarioError("a scenario file needs a 'scenarios' list")
    grid = data.get('grid', 256)
    seeds = data.get('seeds', [0])
    tolerances = data.get('tolerances', {})
    result, names = [], set()
    for k, entry in enumerate(data['scenarios']):
        if not isinstance(entry, dict):
            raise ScenarioError("scenario " + str(k) + " must be an object")
        name = _require(entry, 'name', "scenario " + str(k))
        if name in names:
            raise ScenarioError("duplicate scenario name " + repr(name))
        names.add(name)
        q_spec = _require(entry, 'potential', name)
        mu_spec = _require(entry, 'measure', name)
        _check_potential_spec(q_spec, name)
        _check_measure_spec(mu_spec, name)
        n_grid = entry.get('grid', grid)
        if not isinstance(n_grid, int) or n_grid < 8:
            raise ScenarioError(name + ": grid must be an integer >= 8")
        scenario_seeds = entry.get('seeds', seeds)
        if not isinstance(scenario_seeds, list) or not scenario_seeds:
            raise ScenarioError(name + ": seeds must be a non empty list")
        merged = dict(tolerances)
        merged.update(entry.get('tolerances', {}))
        unknown = set(merged) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ScenarioError(name + ": unknown tolerances " + repr(sorted(unknown)))
        result.append(Scenario(name=name, q_spec=q_spec, mu_spec=mu_spec, grid=n_grid,
                               seeds=[int(s) for s in scenario_seeds], tolerances=merged))
    if not result:
        raise ScenarioError("a scenario file needs at least one scenario")
    return result

#-----------------------------------------------------------------------

# A path, or the name of a bundled scenario file ('null', 'cos-family').

def resolve_scenario_pathname (name_or_path):
    if os.path.exists(name_or_path):
        return name_or_path
    bundled = make_scenario_pathname(name_or_path + '.json')
    if os.path.exists(bundled):
        return bundled
    raise ScenarioError("no scenario file or bundled scenario named " + repr(name_or_path))

#-----------------------------------------------------------------------

def load_scenarios (name_or_path):
    pathname = resolve_scenario_pathname(name_or_path)
    try:
        with open(pathname) as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ScenarioError("malformed scenario file " + pathname + ": " + str(e))
    return scenarios_from_dict(data)

#***********************************************************************
# Part 2: Resolving Potentials and Measures
#***********************************************************************

def potential_from_spec (spec, n_grid):
    return Potential.from_modes(n_grid, cos=spec.get('cos', []), sin=spec.get('sin', []),
                                constant=spec.get('constant', 0.0))

#-----------------------------------------------------------------------

# The measure of one case of a scenario. nu_q is only computed for the
# families that need it.

def measure_from_spec (spec, Q, seed):
    family = spec['family']
    params = spec.get('params', {})
    n_grid = Q.n_grid
    if family == 'uniform':
        return uniform_measure(n_grid)
    if family == 'cosine':
        return cosine_measure(n_grid, params.get('c', 1.0))
    if family == 'random-trig':
        return random_trig_measure(n_grid, seed, params.get('degree', 4), params.get('amplitude', 0.8))
    nu_q = equilibrium_of(Q).nu_q
    if family == 'equilibrium':
        return nu_q
    t = params.get('t', 0.3)
    bump = random_trig_measure(n_grid, seed, params.get('degree', 4), params.get('amplitude', 0.8))
    return nu_q.mix(bump, t)

#-----------------------------------------------------------------------

# One entry per (scenario, seed, case); the measure seed of each case
# is spawned from the scenario seed.

def expand_cases (scenarios):
    entries = []
    for scenario in scenarios:
        for seed in scenario.seeds:
            case_seeds = spawn_seeds(seed, scenario.count)
            for case, case_seed in enumerate(case_seeds):
                entries.append((scenario, seed, case, case_seed))
    return entries

#***********************************************************************
# Part 3: Reports
#***********************************************************************

# git describe of the working tree, or the package version outside a
# repository.

def build_identifier ():
    try:
        out = subprocess.run(['git', 'describe', '--always', '--dirty', '--tags'],
                             cwd=FREETCI_DIR, capture_output=True, text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return 'pyfreetci-' + VERSION

#-----------------------------------------------------------------------

# Non finite floats become the strings 'inf', '-inf' and 'nan' so that
# the JSON stays standard.

def jsonable (value):
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isfinite(value):
            return value
        return 'nan' if math.isnan(value) else ('inf' if value > 0 else '-inf')
    return value

#-----------------------------------------------------------------------

# {"metadata": {...}, "report": {...}}. Only the metadata block changes
# between identical runs.

def make_report (command, report):
    metadata = {'command': command,
                'timestamp': datetime.datetime.now(datetime.timezone.utc).isoformat(),
                'build': build_identifier()}
    return {'metadata': metadata, 'report': jsonable(report)}

#-----------------------------------------------------------------------

def report_to_json (document):
    return json.dumps(document, indent=2, sort_keys=True)

#-----------------------------------------------------------------------

def report_rows (document):
    report = document['report']
    rows = report.get('rows')
    if rows is None:
        rows = [{k: v for k, v in report.items() if not isinstance(v, (dict, list))}]
    return rows

#-----------------------------------------------------------------------

def render_report (document, fmt='json'):
    if fmt not in OUTPUT_FORMATS:
        raise ScenarioError("unknown output format " + repr(fmt))
    if fmt == 'json':
        return report_to_json(document)
    df = pd.DataFrame(report_rows(document))
    if fmt == 'csv':
        return df.to_csv(index=False)
    return tabulate(df, headers='keys', tablefmt='psql', showindex=False, floatfmt='.6g')

#-----------------------------------------------------------------------

def write_report (document, pathname=None, fmt='json'):
    text = render_report(document, fmt)
    if pathname is None:
        return text
    with open(ensure_directory(pathname), 'w') as f:
        f.write(text)
        if not text.endswith('\n'):
            f.write('\n')
    logger.info("Report written to %s", pathname)
    return text

#***********************************************************************
# Part 4: Runners
#***********************************************************************

# The free TCI across a scenario matrix. Rows come back in scenario
# order whatever the pool completion order.

def run_tci (name_or_path, workers=1):
    scenarios = load_scenarios(name_or_path)
    entries = expand_cases(scenarios)
    logger.info("Running %d TCI cases from %d scenarios", len(entries), len(scenarios))
    rows = pmap(pr.tci_worker, entries, workers)
    failures = sorted({row['scenario'] for row in rows if not row['holds']})
    return {'rows': rows,
            'passed': not failures,
            'failures': failures,
            'scenarios': [s.to_dict() for s in scenarios],
            'tolerances': {s.name: s.tolerance('tci') for s in scenarios},
            'seeds': {s.name: s.seeds for s in scenarios},
            'tolerance': max(s.tolerance('tci') for s in scenarios),
            'seed': sorted({seed for s in scenarios for seed in s.seeds})}

#-----------------------------------------------------------------------

def run_equilibrium (Q, stage='auto'):
    result = solve_equilibrium(Q, stage=stage)
    report = result.to_dict()
    report['potential'] = potential_to_dict(Q)
    report['log_energy_upper_modes'] = log_energy_upper_modes(result.nu_q)
    report['tolerance'] = GAP_TOLERANCE
    report['seed'] = None
    report['passed'] = bool(result.report.gap <= GAP_TOLERANCE)
    # The effective potential is constant on the support.
    effective = effective_potential(Q, result.nu_q)
    report['rows'] = [{'angle': float(a), 'density': float(d), 'effective_potential': float(v)}
                      for a, d, v in zip(result.nu_q.angles, result.nu_q.density(), effective)]
    return report

#-----------------------------------------------------------------------

def run_w2 (mu, nu):
    w, plan = circular_w2(mu, nu)
    return {'wasserstein': w, 'cost': plan.cost, 'shift': plan.shift,
            'discretization_bound': plan.discretization_bound,
            'rows': [{'source': i, 'target': j, 'mass': m} for i, j, m in plan.couplings],
            'tolerance': plan.discretization_bound, 'seed': None, 'passed': True}

#-----------------------------------------------------------------------

def run_pressure (Q, f, Ns, config, s_grid, workers=1, tolerance=PRESSURE_MC_TOLERANCE):
    exact = free_pressure(Q, f)
    estimates = [pressure_mc(Q, f, N, config, s_grid, workers) for N in Ns]
    rows = [{'N': e.N, 'value': e.value, 'standard_error': e.standard_error} for e in estimates]
    report = {'free_pressure': exact, 'rows': rows, 'config': config.to_dict(),
              'estimates': [e.to_dict() for e in estimates], 'tolerance': tolerance,
              'seed': config.seed, 'passed': True}
    if len(Ns) >= 2:
        extrapolated = pressure_extrapolation(Ns, [e.value for e in estimates])
        report['extrapolated'] = extrapolated
        report['passed'] = bool(abs(extrapolated - exact) <= tolerance)
    return report

#-----------------------------------------------------------------------

def run_gas (Q, N, config, trace=None, n_grid=None):
    chain = mcmc_sample(Q, N, config)
    states = chain.run()
    if trace is not None:
        chain.write_trace(trace)
    report = {'N': N, 'config': config.to_dict(), 'samples': len(states),
              'acceptance_rate': chain.acceptance_rate, 'tolerance': MASS_TOLERANCE,
              'seed': config.seed, 'passed': True}
    if states:
        mean = mean_empirical_measure(states, n_grid or Q.n_grid)
        report['passed'] = bool(abs(float(np.sum(mean.masses)) - 1.0) <= MASS_TOLERANCE)
        report['rows'] = [{'angle': float(a), 'mass': float(m)}
                          for a, m in zip(mean.angles, mean.masses)]
    return report

#-----------------------------------------------------------------------

def run_sk (dimensions, alphas, thetas, distances_per_case):
    df = phi_sweep(dimensions, alphas, thetas, distances_per_case)
    worst = float(df['margin'].min())
    return {'rows': df.to_dict(orient='records'), 'worst_margin': worst,
            'tolerance': SK_TOLERANCE, 'seed': None, 'passed': bool(worst >= -SK_TOLERANCE)}

#-----------------------------------------------------------------------

def run_pl_circle (n_grid, pairs, thetas, seed, exponent_order='consistent'):
    rows = []
    for k, pair_seed in enumerate(spawn_seeds(seed, pairs)):
        rng = np.random.default_rng(pair_seed)
        f = random_trig_measure(n_grid, rng).density()
        g = random_trig_measure(n_grid, rng).density()
        for theta in thetas:
            verdict = pl_verify_circle(f, g, theta, exponent_order)
            row = verdict.to_dict()
            row['pair'] = k
            rows.append(row)
    return {'rows': rows, 'tolerance': PL_TOLERANCE, 'seed': seed,
            'passed': all(row['holds'] for row in rows)}

#-----------------------------------------------------------------------

def run_sun_check (dimensions, trials, seed):
    df = contraction_sweep(dimensions, trials, seed)
    worst = float(df['margin'].min())
    return {'rows': df.to_dict(orient='records'), 'worst_margin': worst,
            'tolerance': CONTRACTION_TOLERANCE, 'seed': seed,
            'passed': bool(worst >= -CONTRACTION_TOLERANCE)}

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
