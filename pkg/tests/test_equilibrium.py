#***********************************************************************
# Equilibrium Measure Tests
#***********************************************************************

# Python Imports
import math

# Data science imports
import numpy as np
import pytest

# Project Imports
from src.circle_core import PLUS_INF
from src.circle_core import Potential
from src.circle_core import delta_measure
from src.circle_core import random_trig_measure
from src.circle_core import uniform_measure
from src.equilibrium import b_constant
from src.equilibrium import clear_equilibrium_cache
from src.equilibrium import equilibrium_of
from src.equilibrium import free_pressure
from src.equilibrium import free_pressure_sup
from src.equilibrium import gross_witten_density
from src.equilibrium import optimality_gap
from src.equilibrium import pressure_pl_check
from src.equilibrium import project_simplex
from src.equilibrium import relative_free_entropy
from src.equilibrium import solve_equilibrium
from src.equilibrium import weighted_energy
from src.errors import DimensionError
from src.errors import ParameterError
from src.errors import SolverError
from src.transport import inf_convolution
from src.utils import TWO_PI


@pytest.fixture(autouse=True)
def fresh_cache():
    clear_equilibrium_cache()
    yield
    clear_equilibrium_cache()

#-----------------------------------------------------------------------

def test_zero_potential_has_uniform_equilibrium():
    result = solve_equilibrium(Potential.zero(64))
    assert np.allclose(result.nu_q.masses, 1.0 / 64)
    assert result.b_constant == pytest.approx(0.0, abs=1e-14)
    assert result.report.stage == 1


def test_cosine_equilibrium_is_closed_form():
    Q = Potential.cosine(1.0, 256)
    result = solve_equilibrium(Q)
    exact = (1.0 - np.cos(Q.angles())) / TWO_PI
    assert np.max(np.abs(result.nu_q.density() - exact)) < 1e-6
    assert result.b_constant == pytest.approx(0.25, abs=1e-6)
    assert result.report.gap <= 1e-9


def test_simplex_stage_agrees_with_spectral_stage():
    Q = Potential.from_modes(128, cos=[0.4], sin=[0.1, 0.1])
    spectral = solve_equilibrium(Q, stage='spectral')
    simplex = solve_equilibrium(Q, stage='simplex')
    assert simplex.report.stage == 2
    assert simplex.b_constant == pytest.approx(spectral.b_constant, abs=1e-8)


def test_spectral_stage_rejects_gapped_potential():
    with pytest.raises(SolverError):
        solve_equilibrium(Potential.cosine(2.0, 128), stage='spectral')
    with pytest.raises(ParameterError):
        solve_equilibrium(Potential.zero(32), stage='newton')


def test_gapped_potential_follows_closed_form():
    Q = Potential.cosine(2.0, 256)
    result = solve_equilibrium(Q)
    assert result.report.active_constraint
    assert result.report.gap <= 1e-9
    density = result.nu_q.density()
    l1 = np.sum(np.abs(density - gross_witten_density(2.0, Q.angles()))) * TWO_PI / 256
    assert l1 < 2e-2
    # the support is the arc |theta - pi| <= pi/2
    far = np.abs(np.mod(Q.angles() + np.pi, TWO_PI) - np.pi) < np.pi / 4
    assert result.nu_q.masses[far].sum() < 1e-3


def test_gross_witten_density_is_normalized():
    t = np.linspace(0.0, TWO_PI, 20001)
    for c in (0.5, 1.0, 2.0, -3.0):
        assert np.trapz(gross_witten_density(c, t), t) == pytest.approx(1.0, abs=1e-4)

#-----------------------------------------------------------------------

def test_project_simplex():
    w = project_simplex(np.array([0.8, 0.6, -0.2]))
    assert np.allclose(w, [0.6, 0.4, 0.0])


def test_weighted_energy_and_gap():
    Q = Potential.cosine(0.5, 128)
    nu_q = equilibrium_of(Q).nu_q
    assert weighted_energy(Q, delta_measure(0.0)) is PLUS_INF
    gap, residual = optimality_gap(Q, nu_q)
    assert gap <= 1e-9
    mu = random_trig_measure(128, rng=5)
    assert float(relative_free_entropy(Q, mu)) > 0.0
    assert float(relative_free_entropy(Q, nu_q)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DimensionError):
        weighted_energy(Q, uniform_measure(64))


def test_equilibrium_minimizes_weighted_energy():
    n = 128
    Q = Potential.from_modes(n, cos=[0.4], sin=[0.2, 0.1])
    nu_q = equilibrium_of(Q).nu_q
    lowest = weighted_energy(Q, nu_q)
    for seed in range(20):
        mu = random_trig_measure(n, rng=seed)
        energy = weighted_energy(Q, mu)
        assert energy >= lowest - 1e-9
        assert float(relative_free_entropy(Q, mu)) == pytest.approx(energy - lowest, abs=1e-12)


def test_b_constant_is_cached():
    Q = Potential.cosine(0.3, 64)
    assert equilibrium_of(Q) is equilibrium_of(Potential.cosine(0.3, 64))
    assert b_constant(Q) == pytest.approx(0.3 ** 2 / 4, abs=1e-12)

#-----------------------------------------------------------------------
# Free pressure
#-----------------------------------------------------------------------

def test_free_pressure_of_cosine():
    n = 256
    assert free_pressure(Potential.zero(n), Potential.cosine(1.0, n)) == pytest.approx(0.25, abs=1e-6)
    assert free_pressure(Potential.cosine(0.3, n), Potential.zero(n)) == 0.0


def test_free_pressure_is_convex():
    n = 128
    Q = Potential.cosine(0.3, n)
    f1 = Potential.from_modes(n, cos=[0.4], sin=[0.0, 0.2])
    f2 = Potential.from_modes(n, cos=[-0.2, 0.05], sin=[0.1])
    for theta in (0.25, 0.5, 0.75):
        mixed = f1 * (1.0 - theta) + f2 * theta
        bound = (1.0 - theta) * free_pressure(Q, f1) + theta * free_pressure(Q, f2)
        assert free_pressure(Q, mixed) <= bound + 1e-9


def test_free_pressure_dominates_supremum_over_measures():
    n = 128
    Q = Potential.cosine(0.3, n)
    f = Potential.from_modes(n, cos=[0.2], sin=[0.1])
    measures = [random_trig_measure(n, rng=seed) for seed in range(5)]
    measures.append(equilibrium_of(Q - f).nu_q)
    j = free_pressure(Q, f)
    assert free_pressure_sup(Q, f, measures) == pytest.approx(j, abs=1e-9)
    assert free_pressure_sup(Q, f, measures[:5]) <= j + 1e-12


def test_pressure_prekopa_leindler_for_admissible_pair():
    n = 256
    Q = Potential.cosine(0.3, n)
    g = Potential.from_modes(n, cos=[0.2], sin=[0.0, 0.1])
    f = inf_convolution(g, (1.0 - 0.6) / 2.0, refine=False)
    for theta in (0.25, 0.5, 0.75):
        check = pressure_pl_check(Q, f, g, theta)
        assert check.holds
        assert check.margin >= -1e-8
    with pytest.raises(ParameterError):
        pressure_pl_check(Q, f, g, 1.0)

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
