#***********************************************************************
# Coulomb Gas Tests
#***********************************************************************

# Python Imports
import math
import logging

# Data science imports
import numpy as np
import pandas as pd
import pytest

# Project Imports
from src.circle_core import Potential
from src.coulomb_gas import ChainConfig
from src.coulomb_gas import GasState
from src.coulomb_gas import batch_means
from src.coulomb_gas import empirical_measure
from src.coulomb_gas import gap_chi_square
from src.coulomb_gas import log_weight
from src.coulomb_gas import mcmc_sample
from src.coulomb_gas import mean_empirical_measure
from src.coulomb_gas import metropolis_acceptance
from src.coulomb_gas import pressure_extrapolation
from src.coulomb_gas import pressure_mc
from src.equilibrium import equilibrium_of
from src.errors import GasStateError
from src.errors import ParameterError
from src.transport import circular_w2
from src.utils import TWO_PI

#-----------------------------------------------------------------------
# States and weights
#-----------------------------------------------------------------------

def test_gas_state_constraint():
    with pytest.raises(GasStateError):
        GasState(2, [0.1, 0.2])
    with pytest.raises(GasStateError):
        GasState(1, [0.0])
    state = GasState(2, [3.0, TWO_PI - 3.0])
    assert np.allclose(state.angles, [3.0, -3.0])


def test_log_weight_of_antipodal_pair():
    state = GasState(2, [math.pi / 2, -math.pi / 2])
    assert log_weight(state, Potential.zero(64)) == pytest.approx(2.0 * math.log(2.0))
    Q = Potential.cosine(1.0, 64)
    assert log_weight(state, Q) == pytest.approx(2.0 * math.log(2.0))


def test_log_weight_of_coincident_angles():
    assert log_weight(GasState(3, [0.5, 0.5, -1.0]), Potential.zero(64)) == -math.inf


def test_log_weight_is_exchangeable_and_rotation_invariant():
    angles = np.array([0.3, 1.2, -2.0, 0.5])
    Q = Potential.from_modes(64, cos=[0.4, 0.1], sin=[0.2])
    base = log_weight(GasState(4, angles), Q)
    for order in ([2, 0, 3, 1], [3, 2, 1, 0]):
        assert log_weight(GasState(4, angles[order]), Q) == pytest.approx(base, abs=1e-12)
    zero = Potential.zero(64)
    free = log_weight(GasState(4, angles), zero)
    for k in range(1, 4):
        rotated = GasState(4, angles + k * TWO_PI / 4)
        assert log_weight(rotated, zero) == pytest.approx(free, abs=1e-12)


def test_metropolis_acceptance_and_detailed_balance():
    assert metropolis_acceptance(0.0, 1.0) == 1.0
    assert metropolis_acceptance(0.0, -math.inf) == 0.0
    assert metropolis_acceptance(-math.inf, -3.0) == 1.0
    Q = Potential.cosine(0.5, 64)
    a, b = GasState(3, [0.3, 1.2, -1.5]), GasState(3, [2.0, -0.5, -1.5])
    wa, wb = log_weight(a, Q), log_weight(b, Q)
    forward = math.exp(wa) * metropolis_acceptance(wa, wb)
    backward = math.exp(wb) * metropolis_acceptance(wb, wa)
    assert forward == pytest.approx(backward, rel=1e-12)

#-----------------------------------------------------------------------
# Chain
#-----------------------------------------------------------------------

def test_chain_config_validation():
    with pytest.raises(ParameterError):
        ChainConfig(steps=100, burn_in=100)
    with pytest.raises(ParameterError):
        ChainConfig(steps=100, burn_in=10, proposal_width=0.0)
    assert ChainConfig(steps=10, burn_in=0).to_dict()['thin'] == 1


def test_chain_is_reproducible_and_keeps_the_constraint():
    cfg = ChainConfig(steps=2000, burn_in=500, thin=10, seed=42)
    Q = Potential.cosine(0.5, 64)
    first = [s.angles for s in mcmc_sample(Q, 4, cfg)]
    second = [s.angles for s in mcmc_sample(Q, 4, cfg)]
    assert len(first) == 150
    assert np.array_equal(np.array(first), np.array(second))
    for angles in first:
        total = math.fsum(angles)
        assert abs(total - TWO_PI * round(total / TWO_PI)) < 1e-10


def test_chain_warns_about_poor_tuning(caplog):
    cfg = ChainConfig(steps=500, burn_in=100, proposal_width=1e-6, seed=1)
    chain = mcmc_sample(Potential.zero(64), 4, cfg)
    with caplog.at_level(logging.WARNING, logger='src.coulomb_gas'):
        chain.run()
    assert chain.acceptance_rate > 0.95
    assert 'Acceptance rate' in caplog.text


def test_chain_trace_file(tmp_path):
    cfg = ChainConfig(steps=300, burn_in=100, thin=20, seed=3)
    chain = mcmc_sample(Potential.zero(64), 3, cfg)
    chain.run()
    pathname = chain.write_trace(str(tmp_path / 'trace.csv'))
    df = pd.read_csv(pathname)
    assert list(df.columns) == ['step', 'angle_0', 'angle_1', 'angle_2', 'log_weight', 'accepted']
    assert len(df) == 10
    assert df['step'].iloc[0] == 120

#-----------------------------------------------------------------------
# Empirical measures
#-----------------------------------------------------------------------

def test_empirical_measures():
    state = GasState.equally_spaced(4)
    assert np.allclose(empirical_measure(state).masses, 0.25)
    mean = mean_empirical_measure([state, state], 8)
    assert np.allclose(np.flatnonzero(mean.masses), [1, 3, 5, 7])
    assert np.allclose(mean.masses[[1, 3, 5, 7]], 0.25)


@pytest.mark.slow
def test_mean_empirical_measure_approaches_equilibrium():
    n = 1024
    Q = Potential.cosine(1.0, n)
    nu_q = equilibrium_of(Q).nu_q
    distances = []
    for N in (8, 16):
        cfg = ChainConfig(steps=11000 * N, burn_in=1000 * N, thin=N, proposal_width=0.3, seed=21)
        mean = mean_empirical_measure(mcmc_sample(Q, N, cfg).run(), n)
        distances.append(circular_w2(mean, nu_q)[0])
    assert distances[1] < distances[0]


def test_gap_test_needs_two_angles():
    with pytest.raises(GasStateError):
        gap_chi_square([GasState.equally_spaced(3)])


@pytest.mark.slow
def test_gap_distribution_of_su2():
    thin = 5
    cfg = ChainConfig(steps=1000 + thin * 20000, burn_in=1000, thin=thin,
                      proposal_width=math.pi, seed=7)
    result = gap_chi_square(mcmc_sample(Potential.zero(64), 2, cfg).run())
    assert result.samples == 20000
    assert result.pvalue > 1e-3

#-----------------------------------------------------------------------
# Free pressure
#-----------------------------------------------------------------------

def test_batch_means():
    mean, error = batch_means(np.arange(100.0))
    assert mean == 49.5
    assert error > 0.0
    with pytest.raises(ParameterError):
        batch_means(np.arange(5.0))


def test_pressure_extrapolation_recovers_intercept():
    Ns = [4, 8, 16]
    values = [0.25 - 0.3 / N for N in Ns]
    assert pressure_extrapolation(Ns, values) == pytest.approx(0.25)
    with pytest.raises(ParameterError):
        pressure_extrapolation([8], [0.2])


def test_pressure_of_zero_function():
    cfg = ChainConfig(steps=100, burn_in=10)
    estimate = pressure_mc(Potential.zero(64), Potential.zero(64), 8, cfg)
    assert estimate.value == 0.0
    assert estimate.standard_error == 0.0


def test_pressure_estimate_structure():
    cfg = ChainConfig(steps=1000, burn_in=100, thin=2, seed=5)
    f = Potential.cosine(1.0, 64)
    estimate = pressure_mc(Potential.zero(64), f, 4, cfg, s_grid=3)
    assert estimate.nodes == [0.0, 0.5, 1.0]
    assert len(estimate.seeds) == 3
    assert abs(estimate.value) <= 1.0
    assert estimate.standard_error >= 0.0
    assert pressure_mc(Potential.zero(64), f, 4, cfg, s_grid=3).value == estimate.value
    with pytest.raises(ParameterError):
        pressure_mc(Potential.zero(64), f, 4, cfg, s_grid=2)


def test_pressure_is_monotone_in_f():
    cfg = ChainConfig(steps=4000, burn_in=500, thin=2, seed=3)
    Q = Potential.zero(64)
    f = Potential.cosine(0.5, 64)
    larger = f + Potential.from_modes(64, cos=[0.3], constant=0.3)
    low = pressure_mc(Q, f, 4, cfg, s_grid=3)
    high = pressure_mc(Q, larger, 4, cfg, s_grid=3)
    spread = math.sqrt(low.standard_error ** 2 + high.standard_error ** 2)
    assert high.value >= low.value - 3.0 * spread

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
