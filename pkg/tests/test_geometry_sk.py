#***********************************************************************
# S_k, Phi_theta, R_theta and Prekopa-Leindler Tests
#***********************************************************************

# Python Imports
import math

# Data science imports
import numpy as np
import pytest

# Project Imports
from src.circle_core import Potential
from src.errors import AmbiguityError
from src.errors import DomainError
from src.errors import ParameterError
from src.geometry_sk import SkParams
from src.geometry_sk import geodesic_displacement
from src.geometry_sk import log_s_k
from src.geometry_sk import log_s_k_series
from src.geometry_sk import phi_sweep
from src.geometry_sk import phi_theta
from src.geometry_sk import phi_theta_bound
from src.geometry_sk import pl_exponential_circle
from src.geometry_sk import pl_verify_circle
from src.geometry_sk import power_sum
from src.geometry_sk import r_theta_bound
from src.geometry_sk import r_theta_circle
from src.geometry_sk import s_k
from src.geometry_sk import taylor_coefficients
from src.utils import TWO_PI

#-----------------------------------------------------------------------
# S_k
#-----------------------------------------------------------------------

def test_s_k_values():
    assert s_k(1.0, math.pi / 2) == pytest.approx(2.0 / math.pi, rel=1e-15)
    assert s_k(0.0, 3.0) == 1.0
    assert s_k(-1.0, 1.0) == pytest.approx(math.sinh(1.0), rel=1e-15)
    assert s_k(4.0, math.pi / 2) == 0.0
    assert log_s_k(1.0, math.pi) == -math.inf


def test_s_k_domain():
    with pytest.raises(DomainError):
        s_k(1.0, 4.0)
    with pytest.raises(DomainError):
        s_k(1.0, -0.1)


def test_power_sum_matches_zeta():
    assert power_sum(2.0) == pytest.approx(math.pi ** 2 / 6.0, rel=1e-14)
    assert power_sum(4.0) == pytest.approx(math.pi ** 4 / 90.0, rel=1e-14)


def test_taylor_coefficients():
    c = taylor_coefficients(30)
    assert c[0] == pytest.approx(1.0 / 6.0, rel=1e-14)
    assert c[1] == pytest.approx(1.0 / 180.0, rel=1e-13)
    assert min(c) > 0.0
    # j pi^{2j} c_j decreases to 1
    normalized = [cj * j * math.pi ** (2 * j) for j, cj in enumerate(c, start=1)]
    assert all(a >= b - 1e-15 for a, b in zip(normalized, normalized[1:]))
    assert normalized[-1] == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ParameterError):
        taylor_coefficients(0)


@pytest.mark.parametrize('k', [-1.0, 0.25, 1.0, 4.0])
def test_log_s_k_series(k):
    for d in np.linspace(0.0, 1.0 / math.sqrt(abs(k)), 11):
        assert log_s_k_series(k, d) == pytest.approx(log_s_k(k, d), abs=1e-10)

#-----------------------------------------------------------------------
# Phi_theta
#-----------------------------------------------------------------------

def test_phi_theta_in_dimension_one_is_zero():
    assert phi_theta(SkParams(k=1.0, n=1, theta=0.3, d=2.0)) == 0.0


def test_phi_theta_at_the_diameter():
    assert phi_theta(SkParams(k=1.0, n=3, theta=0.5, d=math.pi)) == -math.inf


def test_phi_theta_below_its_bound():
    for n in (2, 5, 16):
        for alpha in (0.5, 2.0):
            k = alpha / (n - 1)
            for d in np.linspace(0.0, 0.99 * math.pi / math.sqrt(k), 7):
                value = phi_theta(SkParams(k=k, n=n, theta=0.3, d=d))
                assert value <= phi_theta_bound(alpha, 0.3, d) + 1e-12


def test_sk_params_validation():
    with pytest.raises(DomainError):
        SkParams(k=1.0, n=2, theta=1.0, d=0.5)
    with pytest.raises(DomainError):
        SkParams(k=1.0, n=0, theta=0.5, d=0.5)
    with pytest.raises(DomainError):
        SkParams(k=1.0, n=2, theta=0.5, d=4.0)


def test_phi_sweep_frame():
    df = phi_sweep([2, 3], [1.0], [0.25, 0.5], distances_per_case=5)
    assert list(df.columns) == ['n', 'alpha', 'k', 'theta', 'd', 'value', 'bound', 'margin']
    assert len(df) == 2 * 2 * 5
    assert df['margin'].min() >= -1e-12

#-----------------------------------------------------------------------
# R_theta
#-----------------------------------------------------------------------

def test_geodesic_displacement():
    assert geodesic_displacement(0.2, TWO_PI - 0.2) == pytest.approx(-0.4)
    with pytest.raises(AmbiguityError) as error:
        geodesic_displacement(0.0, math.pi)
    assert len(error.value.candidates) == 2
    assert geodesic_displacement(0.0, math.pi, branch=-1) == -math.pi


def test_r_theta_respects_convexity_bound():
    Q = Potential.cosine(0.3, 64)
    rng = np.random.default_rng(2)
    for x, y in rng.uniform(0.0, TWO_PI, (50, 2)):
        d = abs(geodesic_displacement(x, y))
        for theta in (0.25, 0.5, 0.75):
            assert r_theta_circle(Q, x, y, theta) <= r_theta_bound(-0.3, theta, d) + 1e-12


def test_r_theta_accepts_callables():
    assert r_theta_circle(np.cos, 0.0, 1.0, 0.5) == pytest.approx(math.cos(0.5) - 0.5 - 0.5 * math.cos(1.0))

#-----------------------------------------------------------------------
# Prekopa-Leindler on the circle
#-----------------------------------------------------------------------

def test_pl_holds_for_random_densities():
    rng = np.random.default_rng(4)
    for _ in range(3):
        f = np.exp(rng.standard_normal(32))
        g = np.exp(rng.standard_normal(32))
        for theta in (0.25, 0.5, 0.75):
            assert pl_verify_circle(f, g, theta).holds


def test_pl_holds_for_spikes_next_to_each_other():
    f = np.full(64, 1e-6)
    f[0] = 1.0
    g = np.full(64, 1e-6)
    g[[0, 63]] = 1.0
    for theta in (0.3, 0.5, 0.7):
        assert pl_verify_circle(f, g, theta).holds
        assert pl_verify_circle(g, f, theta).holds
    f[f < 1.0] = 0.0
    g[g < 1.0] = 0.0
    for theta in (0.3, 0.5, 0.7):
        verdict = pl_verify_circle(f, g, theta)
        assert verdict.holds
        assert verdict.lhs >= verdict.rhs


def test_pl_holds_for_random_step_functions():
    rng = np.random.default_rng(12)
    for _ in range(5):
        f = (rng.random(48) < 0.15) * rng.uniform(0.5, 2.0, 48)
        g = (rng.random(48) < 0.15) * rng.uniform(0.5, 2.0, 48)
        for theta in (0.25, 0.3, 0.5, 0.7):
            assert pl_verify_circle(f, g, theta).holds


def test_pl_with_vanishing_function():
    verdict = pl_verify_circle(np.zeros(16), np.ones(16), 0.5)
    assert verdict.holds
    assert verdict.rhs == 0.0


def test_printed_exponent_order_fails():
    f, g = np.full(64, 0.1), np.ones(64)
    assert pl_verify_circle(f, g, 0.25).holds
    printed = pl_verify_circle(f, g, 0.25, exponent_order='printed')
    assert not printed.holds
    assert printed.margin < 0.0


def test_pl_input_validation():
    with pytest.raises(ParameterError):
        pl_verify_circle(np.ones(8), np.ones(8), 1.0)
    with pytest.raises(ParameterError):
        pl_verify_circle(-np.ones(8), np.ones(8), 0.5)
    with pytest.raises(ParameterError):
        pl_verify_circle(np.ones(8), np.ones(8), 0.5, exponent_order='swapped')


def test_exponential_pl_for_cosine_reference():
    rng = np.random.default_rng(6)
    Q = Potential.cosine(0.3, 32)
    for theta in (0.25, 0.5, 0.75):
        verdict = pl_exponential_circle(rng.standard_normal(32), rng.standard_normal(32), Q, theta)
        assert verdict.holds

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
