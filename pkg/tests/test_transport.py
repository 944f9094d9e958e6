#***********************************************************************
# Transport Tests
#***********************************************************************

# Python Imports
import math

# Data science imports
import numpy as np
import pytest

# Project Imports
from src.circle_core import CircleMeasure
from src.circle_core import Potential
from src.circle_core import delta_measure
from src.circle_core import quantile_atoms
from src.circle_core import random_trig_measure
from src.circle_core import uniform_measure
from src.equilibrium import clear_equilibrium_cache
from src.equilibrium import equilibrium_of
from src.errors import HypothesisError
from src.errors import ParameterError
from src.transport import circular_w2
from src.transport import dual_bound_check
from src.transport import dual_pair_check
from src.transport import inf_convolution
from src.transport import kantorovich_dual
from src.transport import tci_check
from src.transport import w2_assignment
from src.transport import w2_linprog
from src.utils import TWO_PI


@pytest.fixture(autouse=True)
def fresh_cache():
    clear_equilibrium_cache()
    yield
    clear_equilibrium_cache()


def _random_atomic(rng, n_atoms):
    return CircleMeasure.atomic(rng.uniform(0.0, TWO_PI, n_atoms), rng.dirichlet(np.ones(n_atoms)))

#-----------------------------------------------------------------------
# W2 on the circle
#-----------------------------------------------------------------------

def test_w2_between_deltas_uses_the_short_arc():
    w, plan = circular_w2(delta_measure(0.1), delta_measure(TWO_PI - 0.1))
    assert w == pytest.approx(0.2 / math.sqrt(2.0))
    assert len(plan.couplings) == 1
    assert plan.couplings[0][2] == pytest.approx(1.0)


def test_w2_of_identical_measures_is_zero():
    mu = random_trig_measure(64, rng=2)
    w, plan = circular_w2(mu, mu)
    assert w == pytest.approx(0.0, abs=1e-6)
    assert plan.discretization_bound == pytest.approx(2.0 * (TWO_PI / 64) / (2.0 * math.sqrt(2.0)))


def test_w2_antipodal_pairs():
    # (0, pi) against (pi/2, 3pi/2): every atom moves a quarter turn
    w = w2_assignment([0.0, np.pi], [np.pi / 2, 1.5 * np.pi])
    assert w == pytest.approx(np.pi / (2.0 * math.sqrt(2.0)))


def test_w2_matches_assignment_for_equal_masses():
    rng = np.random.default_rng(11)
    for k in (2, 7, 30):
        x, y = rng.uniform(0.0, TWO_PI, k), rng.uniform(0.0, TWO_PI, k)
        masses = np.full(k, 1.0 / k)
        w, _ = circular_w2(CircleMeasure.atomic(x, masses), CircleMeasure.atomic(y, masses))
        assert w == pytest.approx(w2_assignment(x, y), abs=1e-10)


def test_w2_of_quantile_atoms_matches_assignment():
    rng = np.random.default_rng(14)
    for _ in range(5):
        mu = quantile_atoms(random_trig_measure(128, rng), 32)
        nu = quantile_atoms(random_trig_measure(128, rng), 32)
        w, _ = circular_w2(mu, nu)
        assert w == pytest.approx(w2_assignment(mu.angles, nu.angles), abs=1e-10)


def test_w2_matches_linear_program():
    rng = np.random.default_rng(5)
    for _ in range(5):
        mu, nu = _random_atomic(rng, 6), _random_atomic(rng, 9)
        w, plan = circular_w2(mu, nu)
        assert w == pytest.approx(w2_linprog(mu, nu), abs=1e-7)
        a, b = plan.marginals()
        assert np.allclose(a, mu.masses)
        assert np.allclose(b, nu.masses)


def test_w2_is_a_metric_on_atomic_measures():
    rng = np.random.default_rng(8)
    for _ in range(20):
        mu, nu, eta = _random_atomic(rng, 7), _random_atomic(rng, 5), _random_atomic(rng, 9)
        w_mn = circular_w2(mu, nu)[0]
        assert w_mn == pytest.approx(circular_w2(nu, mu)[0], abs=1e-10)
        assert w_mn <= circular_w2(mu, eta)[0] + circular_w2(eta, nu)[0] + 1e-8
        assert circular_w2(mu, mu)[0] == pytest.approx(0.0, abs=1e-8)

#-----------------------------------------------------------------------
# Kantorovich duality and dual pairs
#-----------------------------------------------------------------------

def test_kantorovich_duality():
    rng = np.random.default_rng(3)
    mu, nu = _random_atomic(rng, 5), _random_atomic(rng, 4)
    w, _ = circular_w2(mu, nu)
    for rho_prime in (0.2, 1.0, 3.0):
        dual = kantorovich_dual(mu, nu, rho_prime)
        assert dual.value == pytest.approx(rho_prime * w * w, abs=1e-8)
        assert dual.g[0] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ParameterError):
        kantorovich_dual(mu, nu, 0.0)


def test_inf_convolution_gives_admissible_pair():
    g = Potential.from_modes(128, cos=[0.3], sin=[0.1, -0.2])
    f = inf_convolution(g, 0.4)
    assert dual_pair_check(f, g, 0.4)
    assert np.all(f.grid_values <= g.grid_values + 1e-15)
    assert not dual_pair_check(g + 0.01, g, 0.4)

#-----------------------------------------------------------------------
# Free transportation cost inequality
#-----------------------------------------------------------------------

def test_tci_holds_for_cosine_potential():
    Q = Potential.cosine(0.3, 128)
    nu_q = equilibrium_of(Q).nu_q
    for mu in (uniform_measure(128), random_trig_measure(128, rng=4),
               nu_q.mix(random_trig_measure(128, rng=6), 0.3)):
        verdict = tci_check(Q, mu)
        assert verdict.holds
        assert verdict.rho.rho == pytest.approx(-0.3, abs=1e-10)


def test_tci_is_tight_at_equilibrium():
    Q = Potential.cosine(0.3, 128)
    verdict = tci_check(Q, equilibrium_of(Q).nu_q)
    assert verdict.wasserstein == pytest.approx(0.0, abs=1e-6)
    assert verdict.slack == pytest.approx(0.0, abs=1e-10)


def test_tci_of_atomic_measure_holds_trivially():
    verdict = tci_check(Potential.zero(64), delta_measure(1.0))
    assert verdict.free_entropy == math.inf
    assert verdict.holds


def test_tci_rejects_inadmissible_convexity():
    with pytest.raises(HypothesisError):
        tci_check(Potential.cosine(0.6, 64), uniform_measure(64))
    with pytest.raises(HypothesisError):
        tci_check(Potential.zero(64), uniform_measure(64), rho=-0.5)


def test_claimed_rho_weakens_the_constant():
    Q = Potential.cosine(0.3, 128)
    mu = random_trig_measure(128, rng=8)
    measured = tci_check(Q, mu)
    claimed = tci_check(Q, mu, rho=-0.4)
    assert claimed.rho.rho == -0.4
    assert claimed.measured_rho == pytest.approx(-0.3, abs=1e-10)
    assert claimed.slack >= measured.slack


def test_dual_bound_for_admissible_pair():
    Q = Potential.cosine(0.3, 128)
    g = Potential.from_modes(128, cos=[0.2], sin=[0.1])
    f = inf_convolution(g, 0.2)
    bound = dual_bound_check(Q, random_trig_measure(128, rng=9), f, g)
    assert bound.holds
    with pytest.raises(HypothesisError):
        dual_bound_check(Q, uniform_measure(128), g + 1.0, g)

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
