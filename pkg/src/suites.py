#***********************************************************************
# Invariant Suites
#***********************************************************************
#
# Randomized invariant sweeps, one suite per lab module. Every suite
# returns a list of invariants {name, passed, worst, tolerance, cases}
# computed from recorded seeds. The quick scale keeps a suite short;
# the full scale uses the acceptance sizes.
#
# Part 1: Helpers
# Part 2: Suites
# Part 3: run_suite
#
#***********************************************************************

# Python Imports
import math
import logging

# Data science imports
import numpy as np

# Project Imports
from src.circle_core import CircleMeasure
from src.circle_core import Potential
from src.circle_core import entropy_dual_value
from src.circle_core import measured_rho
from src.circle_core import quantile_atoms
from src.circle_core import random_trig_measure
from src.circle_core import relative_entropy
from src.coulomb_gas import ChainConfig
from src.coulomb_gas import GasState
from src.coulomb_gas import gap_chi_square
from src.coulomb_gas import log_weight
from src.coulomb_gas import mcmc_sample
from src.coulomb_gas import mean_empirical_measure
from src.coulomb_gas import metropolis_acceptance
from src.coulomb_gas import pressure_extrapolation
from src.coulomb_gas import pressure_mc
from src.coulomb_gas import pressure_pl_mc
from src.equilibrium import equilibrium_of
from src.equilibrium import free_pressure
from src.equilibrium import gross_witten_density
from src.equilibrium import pressure_pl_check
from src.equilibrium import solve_equilibrium
from src.errors import FreeTciError
from src.errors import ScenarioError
from src.geometry_sk import log_s_k
from src.geometry_sk import log_s_k_series
from src.geometry_sk import phi_sweep
from src.geometry_sk import pl_exponential_circle
from src.geometry_sk import pl_verify_circle
from src.geometry_sk import taylor_coefficients
from src.sun_lab import contraction_sweep
from src.sun_lab import geodesic_distance
from src.sun_lab import geodesic_point
from src.sun_lab import haar_sample
from src.sun_lab import hessian_sweep
from src.sun_lab import trace_pl_hypothesis_check
from src.transport import circular_w2
from src.transport import inf_convolution
from src.transport import kantorovich_dual
from src.transport import tci_check
from src.transport import w2_assignment
from src.utils import TWO_PI
from src.utils import make_rng
from src.utils import spawn_seeds

logger = logging.getLogger(__name__)

#-----------------------------------------------------------------------
# Parameters
#-----------------------------------------------------------------------

SCALES = {
    'quick': {'grid': 256, 'gapped_grid': 256, 'two_mode': 3, 'entropy_f': 100,
              'w2_pairs': 20, 'dual_instances': 5, 'tci_cases': 4,
              'thetas': (0.25, 0.5, 0.75), 'distances': 12,
              'sun_pairs': 50, 'probes': 50, 'trials': 50, 'haar_draws': 2000,
              'gas_samples': 10000, 'gas_alpha': 1e-3, 'pressure_Ns': (4, 8),
              'pressure_steps': 10000, 'pressure_tolerance': 0.15,
              'pl_pairs': 10, 'pl_grid': 64},
    'full': {'grid': 1024, 'gapped_grid': 1024, 'two_mode': 20, 'entropy_f': 1000,
             'w2_pairs': 200, 'dual_instances': 50, 'tci_cases': 84,
             'thetas': tuple(np.linspace(0.1, 0.9, 9)), 'distances': 25,
             'sun_pairs': 1000, 'probes': 1000, 'trials': 1000, 'haar_draws': 10000,
             'gas_samples': 100000, 'gas_alpha': 0.01, 'pressure_Ns': (8, 16, 32),
             'pressure_steps': 200000, 'pressure_tolerance': 0.05,
             'pl_pairs': 100, 'pl_grid': 256}}

#***********************************************************************
# Part 1: Helpers
#***********************************************************************

# An invariant passes when its worst value is >= -tolerance (margins)
# unless passed is given.

def invariant (name, worst, tolerance, cases, passed=None, **detail):
    worst = float(worst)
    if passed is None:
        passed = worst >= -tolerance
    result = {'name': name, 'passed': bool(passed), 'worst': worst,
              'tolerance': float(tolerance), 'cases': int(cases)}
    result.update(detail)
    return result

#-----------------------------------------------------------------------

def _equal_mass_atoms (rng, n_atoms):
    return rng.uniform(0.0, TWO_PI, n_atoms)

#-----------------------------------------------------------------------

def _random_atomic (rng, n_atoms):
    return CircleMeasure.atomic(rng.uniform(0.0, TWO_PI, n_atoms), rng.dirichlet(np.ones(n_atoms)))

#-----------------------------------------------------------------------

# A small trigonometric potential g and its quadratic inf-convolution f,
# an admissible pair for rho'.

def _dual_pair (n_grid, rho_prime, rng):
    g = Potential.from_modes(n_grid, cos=0.2 * rng.standard_normal(3), sin=0.2 * rng.standard_normal(3))
    return inf_convolution(g, rho_prime), g

#***********************************************************************
# Part 2: Suites
#***********************************************************************

def equilibrium_suite (scale, seed):
    rng = make_rng(seed)
    n = scale['grid']
    results = []

    cos = Potential.cosine(1.0, n)
    solved = solve_equilibrium(cos)
    exact = (1.0 - np.cos(cos.angles())) / TWO_PI
    error = float(np.max(np.abs(solved.nu_q.density() - exact)))
    results.append(invariant('cos-density', -error, 1e-6, 1))
    results.append(invariant('b-cos', -abs(solved.b_constant - 0.25), 1e-6, 1))

    gapped = Potential.cosine(2.0, scale['gapped_grid'])
    density = solve_equilibrium(gapped).nu_q.density()
    l1 = float(np.sum(np.abs(density - gross_witten_density(2.0, gapped.angles()))) * TWO_PI / gapped.n_grid)
    results.append(invariant('gapped-closed-form', -l1, 2e-2, 1))

    gaps = []
    for _ in range(scale['two_mode']):
        Q = Potential.from_modes(n, cos=rng.uniform(-1.5, 1.5, 2), sin=rng.uniform(-0.5, 0.5, 2))
        try:
            gaps.append(solve_equilibrium(Q).report.gap)
        except FreeTciError:
            gaps.append(math.inf)
    results.append(invariant('solver-gap', -max(gaps), 1e-9, len(gaps)))

    mu = random_trig_measure(n, rng)
    nu = random_trig_measure(n, rng)
    S = float(relative_entropy(mu, nu))
    at_density = entropy_dual_value(mu, nu, np.log(mu.masses / nu.masses))
    results.append(invariant('entropy-dual-equality', -abs(at_density - S), 1e-10, 1))
    worst = min(S - entropy_dual_value(mu, nu, rng.standard_normal(n)) for _ in range(scale['entropy_f']))
    results.append(invariant('entropy-dual-bound', worst, 1e-10, scale['entropy_f']))

    j = free_pressure(Potential.zero(n), Potential.cosine(1.0, n))
    results.append(invariant('pressure-cos', -abs(j - 0.25), 1e-6, 1))

    Q = Potential.cosine(0.3, n)
    rho = measured_rho(Q).rho
    f, g = _dual_pair(n, (1.0 + 2.0 * rho) / 2.0, rng)
    checks = [pressure_pl_check(Q, f, g, theta) for theta in scale['thetas']]
    results.append(invariant('pressure-pl', min(c.margin for c in checks), 1e-8, len(checks)))
    return results

#-----------------------------------------------------------------------

def transport_suite (scale, seed):
    rng = make_rng(seed)
    results = []

    discrepancy = 0.0
    for _ in range(scale['w2_pairs']):
        k = int(rng.integers(2, 65))
        x, y = _equal_mass_atoms(rng, k), _equal_mass_atoms(rng, k)
        masses = np.full(k, 1.0 / k)
        w, _ = circular_w2(CircleMeasure.atomic(x, masses), CircleMeasure.atomic(y, masses))
        discrepancy = max(discrepancy, abs(w - w2_assignment(x, y)))
    results.append(invariant('w2-assignment', -discrepancy, 1e-10, scale['w2_pairs']))

    # Quantile atoms of smooth densities against the assignment oracle.
    discrepancy = 0.0
    for _ in range(scale['w2_pairs']):
        mu = quantile_atoms(random_trig_measure(256, rng), 64)
        nu = quantile_atoms(random_trig_measure(256, rng), 64)
        w, _ = circular_w2(mu, nu)
        discrepancy = max(discrepancy, abs(w - w2_assignment(mu.angles, nu.angles)))
    results.append(invariant('w2-quantile-assignment', -discrepancy, 1e-10, scale['w2_pairs']))

    worst = math.inf
    for _ in range(scale['w2_pairs']):
        mu, nu, eta = (_random_atomic(rng, int(rng.integers(2, 12))) for _ in range(3))
        w_mn = circular_w2(mu, nu)[0]
        worst = min(worst, -abs(w_mn - circular_w2(nu, mu)[0]),
                    circular_w2(mu, eta)[0] + circular_w2(eta, nu)[0] - w_mn)
    results.append(invariant('w2-metric', worst, 1e-8, scale['w2_pairs']))

    duality = 0.0
    for k in range(scale['dual_instances']):
        mu = _random_atomic(rng, int(rng.integers(3, 13)))
        nu = _random_atomic(rng, int(rng.integers(3, 13)))
        rho_prime = (0.2, 1.0, 3.0)[k % 3]
        w, _ = circular_w2(mu, nu)
        duality = max(duality, abs(kantorovich_dual(mu, nu, rho_prime).value - rho_prime * w * w))
    results.append(invariant('kantorovich-duality', -duality, 1e-8, scale['dual_instances']))

    n = 256
    potentials = [Potential.cosine(0.3, n), Potential.zero(n),
                  Potential.from_modes(n, cos=[0.1, 0.05])]
    slacks = []
    for Q in potentials:
        nu_q = equilibrium_of(Q).nu_q
        for case_seed in spawn_seeds(int(rng.integers(2 ** 32)), scale['tci_cases']):
            bump = random_trig_measure(n, case_seed)
            slacks.append(tci_check(Q, bump).slack)
            slacks.append(tci_check(Q, nu_q.mix(bump, 0.3)).slack)
    results.append(invariant('tci-matrix', min(slacks), 1e-7, len(slacks)))
    return results

#-----------------------------------------------------------------------

def sk_suite (scale, seed):
    results = []
    c = taylor_coefficients(30)
    results.append(invariant('c1', -abs(c[0] - 1.0 / 6.0), 1e-14, 1))
    results.append(invariant('c-positive', min(c), 0.0, len(c), passed=min(c) > 0.0))
    normalized = [cj * (j + 1) * math.pi ** (2 * (j + 1)) for j, cj in enumerate(c)]
    decreasing = all(a >= b - 1e-15 for a, b in zip(normalized, normalized[1:]))
    results.append(invariant('c-normalized-decreasing', normalized[-1] - 1.0, 1e-12, len(c),
                             passed=decreasing and abs(normalized[-1] - 1.0) <= 1e-12))

    worst = 0.0
    cases = 0
    for k in (-1.0, -0.5, 0.25, 1.0, 4.0):
        for d in np.linspace(0.0, 1.0 / math.sqrt(abs(k)), 21):
            worst = max(worst, abs(log_s_k(k, d) - log_s_k_series(k, d, 30)))
            cases += 1
    results.append(invariant('series', -worst, 1e-10, cases))

    df = phi_sweep(range(2, 17), (0.5, 1.0, 2.0), scale['thetas'], scale['distances'])
    results.append(invariant('phi-bound', df['margin'].min(), 1e-12, len(df)))
    return results

#-----------------------------------------------------------------------

def sun_suite (scale, seed):
    seeds = spawn_seeds(seed, 5)
    results = []

    rng = make_rng(seeds[0])
    traces = np.array([abs(np.trace(haar_sample(2, rng).entries)) ** 2 for _ in range(scale['haar_draws'])])
    sigma = traces.std(ddof=1) / math.sqrt(traces.size)
    results.append(invariant('haar-trace-moment', -abs(traces.mean() - 1.0), 5.0 * sigma,
                             traces.size))

    df = contraction_sweep(range(2, 7), scale['sun_pairs'], seeds[1])
    results.append(invariant('contraction', df['margin'].min(), 1e-9, len(df)))

    rng = make_rng(seeds[2])
    worst = 0.0
    for N in (2, 3):
        for _ in range(10):
            U, V = haar_sample(N, rng), haar_sample(N, rng)
            d = geodesic_distance(U, V)
            W = geodesic_point(U, V, 0.5)
            worst = max(worst, abs(geodesic_distance(U, W) - 0.5 * d),
                        abs(geodesic_distance(W, V) - 0.5 * d))
    results.append(invariant('geodesic-point', -worst, 1e-8, 20))

    Q = Potential.cosine(0.3, 256)
    minima = [hessian_sweep(Q, N, scale['probes'], seed=seeds[3] + N).minimum for N in (2, 3, 4)]
    results.append(invariant('hessian-transfer', min(minima) + 0.3, 1e-3, 3 * scale['probes']))

    rho = measured_rho(Q).rho
    f, g = _dual_pair(256, (1.0 + 2.0 * rho) / 2.0, make_rng(seeds[4]))
    reports = [trace_pl_hypothesis_check(Q, f, g, theta, 3, scale['trials'], seed=seeds[4])
               for theta in (0.25, 0.5, 0.75)]
    worst = min(min(r.worst_hypothesis, r.worst_convexity, r.worst_dual_matrix, r.worst_dual_matching)
                for r in reports)
    results.append(invariant('hypothesis-chain', worst, 1e-8, 3 * scale['trials'],
                             skipped=sum(r.skipped for r in reports)))
    return results

#-----------------------------------------------------------------------

def gas_suite (scale, seed):
    seeds = spawn_seeds(seed, 3)
    results = []
    Q = Potential.zero(256)

    thin = 5
    cfg = ChainConfig(steps=1000 + thin * scale['gas_samples'], burn_in=1000, thin=thin,
                      proposal_width=math.pi, seed=seeds[0])
    test = gap_chi_square(mcmc_sample(Q, 2, cfg).run())
    results.append(invariant('gap-chi-square', test.pvalue - scale['gas_alpha'], 0.0, test.samples,
                             pvalue=test.pvalue))

    short = ChainConfig(steps=2000, burn_in=500, thin=10, seed=seeds[1])
    first = np.array([s.angles for s in mcmc_sample(Q, 4, short)])
    second = np.array([s.angles for s in mcmc_sample(Q, 4, short)])
    results.append(invariant('seed-reproducibility', 0.0, 0.0, 1,
                             passed=bool(np.array_equal(first, second))))

    a, b = GasState(3, [0.3, 1.2, -1.5]), GasState(3, [2.0, -0.5, -1.5])
    wa, wb = log_weight(a, Q), log_weight(b, Q)
    balance = abs(math.exp(wa) * metropolis_acceptance(wa, wb) - math.exp(wb) * metropolis_acceptance(wb, wa))
    results.append(invariant('detailed-balance', -balance, 1e-12, 1))

    N = 16
    cfg = ChainConfig(steps=2000 * N, burn_in=500 * N, thin=5 * N, seed=seeds[2])
    mean = mean_empirical_measure(mcmc_sample(Q, N, cfg).run(), 256)
    w, _ = circular_w2(mean, CircleMeasure.grid(np.full(256, 1.0 / 256)))
    results.append(invariant('uniform-convergence', 0.05 - w, 0.0, 1, wasserstein=w))
    return results

#-----------------------------------------------------------------------

def pressure_suite (scale, seed, workers=1):
    seeds = spawn_seeds(seed, 3)
    results = []
    Q = Potential.zero(256)
    f = Potential.cosine(1.0, 256)

    exact = free_pressure(Q, f)
    results.append(invariant('pressure-exact', -abs(exact - 0.25), 1e-6, 1))

    steps = scale['pressure_steps']
    cfg = ChainConfig(steps=steps, burn_in=steps // 10, thin=4, seed=seeds[0])
    zero = pressure_mc(Q, Potential.zero(256), 8, cfg)
    results.append(invariant('pressure-mc-zero', -abs(zero.value), 0.0, 1))

    Ns = scale['pressure_Ns']
    estimates = [pressure_mc(Q, f, N, ChainConfig(steps=steps, burn_in=steps // 10, thin=4,
                                                   seed=seeds[1] + N), workers=workers)
                 for N in Ns]
    limit = pressure_extrapolation(Ns, [e.value for e in estimates])
    results.append(invariant('pressure-extrapolation', -abs(limit - exact) / exact,
                             scale['pressure_tolerance'], len(Ns), extrapolated=limit,
                             estimates=[e.value for e in estimates],
                             standard_errors=[e.standard_error for e in estimates]))

    g = Potential.from_modes(256, cos=[0.2])
    rho_prime = 0.5
    f_pair = inf_convolution(g, rho_prime, refine=False)
    pl = pressure_pl_mc(Q, f_pair, g, 0.5, Ns[-1], ChainConfig(steps=steps, burn_in=steps // 10,
                                                                 thin=4, seed=seeds[2]),
                        workers=workers)
    results.append(invariant('pressure-pl-mc', 3.0 * pl.standard_error - pl.lhs, 0.0, 1,
                             lhs=pl.lhs, standard_error=pl.standard_error))
    return results

#-----------------------------------------------------------------------

def pl_suite (scale, seed):
    results = []
    n = scale['pl_grid']
    margins = []
    for pair_seed in spawn_seeds(seed, scale['pl_pairs']):
        rng = make_rng(pair_seed)
        f = random_trig_measure(n, rng).density()
        g = random_trig_measure(n, rng).density()
        for theta in (0.25, 0.5, 0.75):
            verdict = pl_verify_circle(f, g, theta)
            margins.append(verdict.margin if verdict.holds else -math.inf)
    results.append(invariant('pl-random', min(margins), 1e-12, len(margins)))

    # Sparse step functions with exact zeros.
    steps = []
    for pair_seed in spawn_seeds(seed + 1, scale['pl_pairs']):
        rng = make_rng(pair_seed)
        f = (rng.random(n) < 0.1) * rng.uniform(0.5, 2.0, n)
        g = (rng.random(n) < 0.1) * rng.uniform(0.5, 2.0, n)
        for theta in (0.3, 0.5, 0.7):
            verdict = pl_verify_circle(f, g, theta)
            steps.append(verdict.margin if verdict.holds else -math.inf)
    results.append(invariant('pl-step', min(steps), 1e-12, len(steps)))

    rng = make_rng(seed)
    Q = Potential.cosine(0.3, n)
    exponential = [pl_exponential_circle(rng.standard_normal(n), rng.standard_normal(n), Q, theta).margin
                   for theta in (0.25, 0.5, 0.75)]
    results.append(invariant('pl-exponential', min(exponential), 1e-12, len(exponential)))

    printed = pl_verify_circle(np.full(n, 0.1), np.ones(n), 0.25, exponent_order='printed')
    results.append(invariant('printed-order-fails', printed.margin, 0.0, 1,
                             passed=not printed.holds))
    return results

#***********************************************************************
# Part 3: run_suite
#***********************************************************************

SUITES = {'equilibrium': equilibrium_suite,
          'transport': transport_suite,
          'sk': sk_suite,
          'sun': sun_suite,
          'gas': gas_suite,
          'pressure': pressure_suite,
          'pl': pl_suite}

#-----------------------------------------------------------------------

def run_suite (name, full=False, seed=0, workers=1):
    if name not in SUITES:
        raise ScenarioError("unknown suite " + repr(name) + "; choose from " + ', '.join(SUITES))
    scale_name = 'full' if full else 'quick'
    scale = SCALES[scale_name]
    logger.info("Running suite %s at %s scale, seed %d", name, scale_name, seed)
    if name == 'pressure':
        invariants = pressure_suite(scale, seed, workers)
    else:
        invariants = SUITES[name](scale, seed)
    for result in invariants:
        logger.info("%s: %s (worst %.3e)", result['name'],
                    'pass' if result['passed'] else 'FAIL', result['worst'])
    return {'suite': name, 'scale': scale_name, 'seed': seed,
            'tolerance': {r['name']: r['tolerance'] for r in invariants},
            'rows': invariants, 'passed': all(r['passed'] for r in invariants)}

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
