#***********************************************************************
# Distortion Coefficients and Prekopa-Leindler on the Circle
#***********************************************************************
#
# Part 1: S_k and its Taylor series
# Part 2: Phi_theta and its quadratic bound
# Part 3: R_theta on the circle
# Part 4: Brute force Prekopa-Leindler verifier (n = 1)
#
# S_k(d) = sin(sqrt(k) d) / (sqrt(k) d)     k > 0
#        = 1                                 k = 0
#        = sinh(sqrt(-k) d) / (sqrt(-k) d)   k < 0
#
# log S_k(d) = - sum_{j>=1} c_j (k d^2)^j,
#   c_j = (1 / (j pi^{2j})) sum_{m>=1} m^{-2j}
#
# Phi_theta(d) = (n-1) (log S_k(d) - (1-theta) log S_k((1-theta) d)
#                       - theta log S_k(theta d))
#
#***********************************************************************

# Python Imports
import math
import logging
from dataclasses import dataclass, asdict

# Data science imports
import numpy as np
import pandas as pd
from scipy.special import logsumexp

# Project Imports
from src.errors import AmbiguityError
from src.errors import DimensionError
from src.errors import DomainError
from src.errors import ParameterError
from src.utils import TWO_PI
from src.utils import grid_angles
from src.utils import wrap_symmetric

logger = logging.getLogger(__name__)

#-----------------------------------------------------------------------
# Parameters
#-----------------------------------------------------------------------

# Terms summed directly in sum m^{-s}; the rest is an Euler-Maclaurin
# tail.
DIRECT_TERMS = 1000

# Slack allowed on the diameter bound pi / sqrt(k).
DIAMETER_SLACK = 1e-12

# Pairs closer than this to antipodal have two geodesics.
ANTIPODAL_TOLERANCE = 1e-12

# Theta points closer than this (in grid steps) to a node sit on it.
GRID_SNAP = 1e-9

PL_TOLERANCE = 1e-12

EXPONENT_ORDERS = ('consistent', 'printed')

#***********************************************************************
# Part 1: S_k and its Taylor Series
#***********************************************************************

def s_k (k, d):
    if d < 0.0:
        raise DomainError("distance must be nonnegative")
    if k > 0.0:
        x = math.sqrt(k) * d
        if x > math.pi * (1.0 + DIAMETER_SLACK):
            raise DomainError("d = " + repr(d) + " exceeds the diameter pi/sqrt(k)")
        if x >= math.pi:
            return 0.0
        return float(np.sinc(x / math.pi))
    if k < 0.0:
        x = math.sqrt(-k) * d
        if x < 1e-8:
            return 1.0 + x * x / 6.0
        return math.sinh(x) / x
    return 1.0

#-----------------------------------------------------------------------

def log_s_k (k, d):
    value = s_k(k, d)
    return math.log(value) if value > 0.0 else -math.inf

#-----------------------------------------------------------------------

# sum_{m>=1} m^{-s} for s > 1: direct sum of the first DIRECT_TERMS
# terms plus an Euler-Maclaurin tail bounded by the integral test.

def power_sum (s):
    M = DIRECT_TERMS
    head = math.fsum(m ** -s for m in range(1, M + 1))
    tail = (M ** (1.0 - s) / (s - 1.0)
            - 0.5 * M ** -s
            + s * M ** (-s - 1.0) / 12.0
            - s * (s + 1.0) * (s + 2.0) * M ** (-s - 3.0) / 720.0
            + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * M ** (-s - 5.0) / 30240.0)
    return head + tail

#-----------------------------------------------------------------------

# c_1 .. c_J, c_j = (1/(j pi^{2j})) sum_m m^{-2j}; c_1 = 1/6, c_2 = 1/180.

def taylor_coefficients (J):
    if J < 1:
        raise ParameterError("J must be positive")
    return [power_sum(2.0 * j) / (j * math.pi ** (2 * j)) for j in range(1, J + 1)]

#-----------------------------------------------------------------------

def log_s_k_series (k, d, J=30):
    x = k * d * d
    return -math.fsum(c * x ** j for j, c in enumerate(taylor_coefficients(J), start=1))

#***********************************************************************
# Part 2: Phi_theta
#***********************************************************************

@dataclass
class SkParams:
    k: float
    n: int
    theta: float
    d: float

    def __post_init__ (self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("dimension n must be a positive integer")
        if not 0.0 < self.theta < 1.0:
            raise DomainError("theta must lie in (0, 1)")
        if self.d < 0.0:
            raise DomainError("distance must be nonnegative")
        if self.k > 0.0 and self.d > math.pi / math.sqrt(self.k) * (1.0 + DIAMETER_SLACK):
            raise DomainError("d exceeds the diameter bound pi/sqrt(k)")
        self.n = int(self.n)

#-----------------------------------------------------------------------

# Phi_theta(d); -inf at the diameter when n >= 2.

def phi_theta (p):
    if p.n == 1:
        return 0.0
    whole = log_s_k(p.k, p.d)
    if whole == -math.inf:
        return -math.inf
    theta = p.theta
    value = (whole
             - (1.0 - theta) * log_s_k(p.k, (1.0 - theta) * p.d)
             - theta * log_s_k(p.k, theta * p.d))
    return (p.n - 1) * value

#-----------------------------------------------------------------------

# Upper bound of Phi_theta when k = alpha / (n - 1): -alpha theta (1-theta) d^2 / 2.

def phi_theta_bound (alpha, theta, d):
    return -0.5 * alpha * theta * (1.0 - theta) * d * d

#-----------------------------------------------------------------------

# Phi_theta against its bound on every (n, alpha, theta, d) tuple. The
# distances run up to the diameter pi sqrt((n - 1) / alpha).

def phi_sweep (dimensions, alphas, thetas, distances_per_case=50):
    rows = []
    for n in dimensions:
        for alpha in alphas:
            k = alpha / (n - 1)
            diameter = math.pi / math.sqrt(k)
            for theta in thetas:
                for d in np.linspace(0.0, diameter, distances_per_case):
                    value = phi_theta(SkParams(k=k, n=n, theta=theta, d=float(d)))
                    bound = phi_theta_bound(alpha, theta, d)
                    rows.append({'n': n, 'alpha': alpha, 'k': k, 'theta': theta, 'd': float(d),
                                 'value': value, 'bound': bound, 'margin': bound - value})
    return pd.DataFrame(rows, columns=['n', 'alpha', 'k', 'theta', 'd', 'value', 'bound', 'margin'])

#***********************************************************************
# Part 3: R_theta on the Circle
#***********************************************************************

def _evaluate (Q, angles):
    if hasattr(Q, 'evaluate'):
        return Q.evaluate(np.asarray(angles, dtype=float))
    return np.asarray(Q(np.asarray(angles, dtype=float)), dtype=float)

#-----------------------------------------------------------------------

# Signed minor arc displacement from x to y. For antipodal points a
# branch (+1 counter-clockwise, -1 clockwise) must be given.

def geodesic_displacement (x, y, branch=None):
    delta = float(wrap_symmetric(y - x))
    if abs(abs(delta) - math.pi) <= ANTIPODAL_TOLERANCE:
        if branch is None:
            raise AmbiguityError("antipodal points have two geodesics",
                                 candidates=[math.pi, -math.pi])
        return math.copysign(math.pi, branch)
    return delta

#-----------------------------------------------------------------------

# R_theta(z; x, y) = Q(z) - (1 - theta) Q(x) - theta Q(y) with z the
# theta point of the geodesic from x to y. Q is a Potential or any
# callable of the angle.

def r_theta_circle (Q, x, y, theta, branch=None):
    delta = geodesic_displacement(x, y, branch)
    z = x + theta * delta
    values = _evaluate(Q, [z, x, y])
    return float(values[0] - (1.0 - theta) * values[1] - theta * values[2])

#-----------------------------------------------------------------------

# If Q'' >= beta along the geodesic then R_theta <= -beta theta (1-theta) d^2 / 2.

def r_theta_bound (beta, theta, d):
    return -0.5 * beta * theta * (1.0 - theta) * d * d

#***********************************************************************
# Part 4: Brute Force Prekopa-Leindler (n = 1)
#***********************************************************************

@dataclass
class PlVerdict:
    lhs: float
    rhs: float
    margin: float
    holds: bool
    theta: float
    exponent_order: str

    def to_dict (self):
        return asdict(self)

#-----------------------------------------------------------------------

# For every pair of grid points (x, y), the geodesic theta points z; for
# antipodal pairs both arcs. Each z is charged to the two grid nodes
# around it, so that the grid h dominates the piecewise constant
# extensions of f and g cell by cell. A z within GRID_SNAP of a node is
# charged to that node only. Returns flat arrays (source index, target
# index, z index).

def _theta_points (n_grid, theta):
    t = grid_angles(n_grid)
    i, j = np.meshgrid(np.arange(n_grid), np.arange(n_grid), indexing='ij')
    i, j = i.ravel(), j.ravel()
    delta = wrap_symmetric(t[j] - t[i])
    antipodal = np.abs(np.abs(delta) - math.pi) <= ANTIPODAL_TOLERANCE
    delta = np.where(antipodal, math.pi, delta)
    sources = np.concatenate((i, i[antipodal]))
    targets = np.concatenate((j, j[antipodal]))
    shifts = np.concatenate((delta, -delta[antipodal]))
    position = (t[sources] + theta * shifts) / (TWO_PI / n_grid)
    nearest = np.rint(position)
    on_node = np.abs(position - nearest) <= GRID_SNAP
    lower = np.where(on_node, nearest, np.floor(position)).astype(int)
    upper = np.where(on_node, nearest, np.ceil(position)).astype(int)
    z_index = np.mod(np.concatenate((lower, upper)), n_grid)
    return np.tile(sources, 2), np.tile(targets, 2), z_index

#-----------------------------------------------------------------------

# Smallest h on the grid allowed by h(z) >= f(x)^{1-theta} g(y)^theta,
# built on the log scale.

def _minimal_log_h (log_f, log_g, theta):
    sources, targets, z_index = _theta_points(log_f.size, theta)
    log_h = np.full(log_f.size, -np.inf)
    np.maximum.at(log_h, z_index, (1.0 - theta) * log_f[sources] + theta * log_g[targets])
    return log_h

#-----------------------------------------------------------------------

def _log_integral (log_values):
    if np.all(log_values == -np.inf):
        return -math.inf
    return float(logsumexp(log_values) + math.log(TWO_PI / log_values.size))

#-----------------------------------------------------------------------

def _pl_verdict (log_h, log_f, log_g, theta, exponent_order, tolerance):
    if exponent_order not in EXPONENT_ORDERS:
        raise ParameterError("unknown exponent order " + repr(exponent_order))
    lhs = _log_integral(log_h)
    if exponent_order == 'consistent':
        rhs = (1.0 - theta) * _log_integral(log_f) + theta * _log_integral(log_g)
    else:
        rhs = theta * _log_integral(log_f) + (1.0 - theta) * _log_integral(log_g)
    if rhs == -math.inf:
        return PlVerdict(lhs=math.exp(lhs), rhs=0.0, margin=math.exp(lhs), holds=True,
                         theta=theta, exponent_order=exponent_order)
    margin = lhs - rhs
    return PlVerdict(lhs=math.exp(lhs), rhs=math.exp(rhs), margin=math.exp(lhs) - math.exp(rhs),
                     holds=bool(margin >= -tolerance), theta=theta, exponent_order=exponent_order)

#-----------------------------------------------------------------------

# int h >= (int f)^{1-theta} (int g)^theta for the minimal admissible h.
# The 'printed' order swaps the exponents of the right hand side.

def pl_verify_circle (f, g, theta, exponent_order='consistent', tolerance=PL_TOLERANCE):
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape or f.ndim != 1:
        raise DimensionError("f and g must live on a common grid")
    if np.min(f) < 0.0 or np.min(g) < 0.0:
        raise ParameterError("f and g must be nonnegative")
    if not 0.0 < theta < 1.0:
        raise ParameterError("theta must lie in (0, 1)")
    with np.errstate(divide='ignore'):
        log_f, log_g = np.log(f), np.log(g)
    log_h = _minimal_log_h(log_f, log_g, theta)
    return _pl_verdict(log_h, log_f, log_g, theta, exponent_order, tolerance)

#-----------------------------------------------------------------------

@dataclass
class ExponentialPlVerdict:
    log_w: float
    log_u: float
    log_v: float
    margin: float
    holds: bool
    theta: float

    def to_dict (self):
        return asdict(self)

# Exponential form on the circle for nu = e^{-Q} dtheta / Z: with the
# smallest w satisfying w(z) >= (1-theta) u(x) + theta v(y) + R_theta(z; x, y),
# log int e^w dnu >= (1-theta) log int e^u dnu + theta log int e^v dnu.

def pl_exponential_circle (u, v, Q, theta, tolerance=PL_TOLERANCE):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.size != Q.n_grid:
        raise DimensionError("u, v and Q must live on a common grid")
    if not 0.0 < theta < 1.0:
        raise ParameterError("theta must lie in (0, 1)")
    q = Q.grid_values
    sources, targets, z_index = _theta_points(u.size, theta)
    w = np.full(u.size, -np.inf)
    values = ((1.0 - theta) * (u[sources] - q[sources]) + theta * (v[targets] - q[targets])
              + q[z_index])
    np.maximum.at(w, z_index, values)
    log_z = _log_integral(-q)
    log_w = _log_integral(w - q) - log_z
    log_u = _log_integral(u - q) - log_z
    log_v = _log_integral(v - q) - log_z
    margin = log_w - (1.0 - theta) * log_u - theta * log_v
    return ExponentialPlVerdict(log_w=log_w, log_u=log_u, log_v=log_v, margin=margin,
                                holds=bool(margin >= -tolerance), theta=theta)

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
