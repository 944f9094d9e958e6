#***********************************************************************
# Equilibrium Measures
#***********************************************************************
#
# Weighted energy E_Q(mu) = -Sigma(mu) + int Q dmu, its minimizer nu_Q,
# the constant B(Q) = -E_Q(nu_Q), the relative free entropy and the
# relative free pressure j_Q(f) = E_Q(nu_Q) - E_{Q-f}(nu_{Q-f}).
#
# Part 1: Results
# Part 2: Energy and effective potential
# Part 3: Solver (spectral candidate, accelerated projected gradient,
#         active set polish)
# Part 4: Cached constants, free entropy and free pressure
# Part 5: Closed form densities
#
# On a grid of n points the energy is the quadratic form
#
#   F(w) = sum_{k=1..n/2} |w_k|^2 / k + sum_j Q_j w_j
#
# whose gradient is the effective potential
#
#   V(theta) = Q(theta) - 2 int log|e^{i theta} - e^{i phi}| dmu(phi).
#
#***********************************************************************

# Python Imports
import math
import logging
import threading
from dataclasses import dataclass, asdict

# Data science imports
import numpy as np

# Project Imports
from src.circle_core import PLUS_INF
from src.circle_core import CircleMeasure
from src.circle_core import ExtendedReal
from src.circle_core import ensure_grid
from src.circle_core import log_energy
from src.circle_core import measure_to_dict
from src.circle_core import fourier_grid_values
from src.errors import DimensionError
from src.errors import ParameterError
from src.errors import SolverError
from src.utils import TWO_PI
from src.utils import wrap_symmetric

logger = logging.getLogger(__name__)

#-----------------------------------------------------------------------
# Solver Parameters
#-----------------------------------------------------------------------

# First order optimality (Frank-Wolfe) gap required of a solution.
GAP_TOLERANCE = 1e-9

# Spectral candidate accepted when its density is above -this.
SPECTRAL_TOLERANCE = 1e-12

# Projected gradient phase, stopped at a coarse gap before the polish.
MAX_ITERATIONS = 20000
COARSE_GAP = 1e-7

# Active set polish.
MAX_ROUNDS = 500
CG_TOLERANCE = 1e-13

# Free pressure checks.
PRESSURE_TOLERANCE = 1e-8

SOLVER_STAGES = ('auto', 'spectral', 'simplex')

#***********************************************************************
# Part 1: Results
#***********************************************************************

@dataclass
class SolverReport:
    iterations: int
    gap: float
    active_constraint: bool
    stage: int
    residual: float

    def to_dict (self):
        return asdict(self)

#-----------------------------------------------------------------------

@dataclass
class EquilibriumResult:
    nu_q: CircleMeasure
    energy: float
    b_constant: float
    report: SolverReport

    def to_dict (self):
        return {'nu_q': measure_to_dict(self.nu_q),
                'energy': self.energy,
                'b_constant': self.b_constant,
                'solver_report': self.report.to_dict()}

#***********************************************************************
# Part 2: Energy and Effective Potential
#***********************************************************************

# 2 A w where A_jl = sum_{k<=n/2} cos(k(theta_j - theta_l)) / k.

def _interaction (w):
    n = w.size
    k = np.arange(1, n // 2 + 1)
    spectrum = np.fft.fft(w)
    c = np.zeros(n, dtype=complex)
    c[k] = spectrum[k] / k
    return 2.0 * np.real(n * np.fft.ifft(c))

#-----------------------------------------------------------------------

def _quadratic (w):
    n = w.size
    k = np.arange(1, n // 2 + 1)
    spectrum = np.fft.fft(w)
    return math.fsum(np.abs(spectrum[k]) ** 2 / k)

#-----------------------------------------------------------------------

def _objective (q, w):
    return _quadratic(w) + math.fsum(q * w)

#-----------------------------------------------------------------------

def _check_grid (Q, mu):
    ensure_grid(mu)
    if Q.n_grid != mu.n_grid:
        raise DimensionError("potential grid " + str(Q.n_grid) + " vs measure grid " + str(mu.n_grid))

#-----------------------------------------------------------------------

# E_Q(mu) = -Sigma(mu) + int Q dmu; +inf for atomic measures.

def weighted_energy (Q, mu):
    if mu.is_atomic():
        return PLUS_INF
    _check_grid(Q, mu)
    return -log_energy(mu) + math.fsum(Q.grid_values * mu.masses)

#-----------------------------------------------------------------------

def effective_potential (Q, mu):
    _check_grid(Q, mu)
    return Q.grid_values + _interaction(np.asarray(mu.masses))

#-----------------------------------------------------------------------

# Frank-Wolfe gap sum_j w_j V_j - min V (an upper bound of E_Q(mu) - min
# E_Q) and the Euler-Lagrange residual max_{w_j > 0} V_j - min V.

def _gaps (q, w):
    v = q + _interaction(w)
    low = float(np.min(v))
    gap = max(math.fsum(w * v) - low, 0.0)
    support = w > 0.0
    residual = float(np.max(v[support]) - low) if support.any() else 0.0
    return gap, residual

def optimality_gap (Q, mu):
    _check_grid(Q, mu)
    return _gaps(Q.grid_values, np.asarray(mu.masses))

#***********************************************************************
# Part 3: Solver
#***********************************************************************

#-----------------------------------------------------------------------
# Stage 1: Spectral Candidate
#-----------------------------------------------------------------------

# Without the positivity constraint the minimizer has mu_k = -k q_k. The
# candidate is returned as grid masses, possibly negative, or None when
# the potential is not an exact trigonometric polynomial on the grid.

def _spectral_candidate (Q):
    n = Q.n_grid
    if Q.truncation_error > SPECTRAL_TOLERANCE or 2 * Q.K >= n:
        return None
    k = np.arange(1, Q.K + 1)
    return fourier_grid_values(1.0, -k * Q.qk, n) / n

#-----------------------------------------------------------------------
# Stage 2: Simplex Constrained Minimization
#-----------------------------------------------------------------------

# Euclidean projection on the probability simplex (sort based).

def project_simplex (v):
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    index = np.arange(1, v.size + 1)
    positive = u - css / index > 0
    r = index[positive][-1]
    tau = css[positive][-1] / r
    return np.maximum(v - tau, 0.0)

#-----------------------------------------------------------------------

# Accelerated projected gradient with backtracking and gradient based
# restarts. Returns the iterate and the number of iterations used.

def _accelerated_descent (q, w, tolerance, max_iterations):
    n = w.size
    L = float(n)
    x = w.copy()
    y = w.copy()
    t = 1.0
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        g = q + _interaction(y)
        fy = _objective(q, y)
        while True:
            x_new = project_simplex(y - g / L)
            step = x_new - y
            bound = fy + float(np.dot(g, step)) + 0.5 * L * float(np.dot(step, step))
            if _objective(q, x_new) <= bound + 1e-14 * max(1.0, abs(fy)):
                break
            L *= 2.0
        if np.dot(y - x_new, x_new - x) > 0.0:
            t = 1.0
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x = x_new
        t = t_new
        if iterations % 10 == 0:
            gap, _ = _gaps(q, x)
            logger.debug("projected gradient iteration %d gap %.3e", iterations, gap)
            if gap <= tolerance:
                break
    return x, iterations

#-----------------------------------------------------------------------

# Conjugate gradients for the step d (supported on S, sum d = 0) that
# minimizes the energy on the face of the simplex with support S.

def _face_step (g, support):
    def project (v):
        out = np.zeros_like(v)
        vs = v[support]
        out[support] = vs - vs.mean()
        return out
    d = np.zeros_like(g)
    r = -project(g)
    p = r.copy()
    rr = float(np.dot(r, r))
    tolerance = CG_TOLERANCE * max(1.0, float(np.linalg.norm(g)))
    for _ in range(4 * int(support.sum()) + 10):
        if math.sqrt(rr) <= tolerance:
            break
        hp = project(_interaction(p))
        php = float(np.dot(p, hp))
        if php <= 0.0:
            break
        alpha = rr / php
        d += alpha * p
        r -= alpha * hp
        rr_new = float(np.dot(r, r))
        p = r + (rr_new / rr) * p
        rr = rr_new
    return d

#-----------------------------------------------------------------------

# Primal active set method started from a feasible w. Each round solves
# the equality constrained problem on the current support; a negative
# entry gives a blocking step that drops indices, otherwise the index
# whose effective potential is furthest below the multiplier joins the
# support.

def _active_set (q, w, tolerance, max_rounds):
    w = w.copy()
    support = w > 0.0
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        g = q + _interaction(w)
        d = _face_step(g, support)
        blocking = support & (w + d < 0.0)
        if blocking.any():
            ratios = -w[blocking] / d[blocking]
            alpha = float(np.min(ratios))
            w = w + alpha * d
            hit = np.flatnonzero(blocking)[ratios <= alpha * (1.0 + 1e-12)]
            w[hit] = 0.0
            w = np.maximum(w, 0.0)
            w /= w.sum()
            support = w > 0.0
            continue
        w = np.maximum(w + d, 0.0)
        w /= w.sum()
        support = w > 0.0
        v = q + _interaction(w)
        multiplier = float(np.dot(w, v))
        violators = (~support) & (v < multiplier - tolerance)
        if violators.any():
            support[np.argmin(np.where(violators, v, np.inf))] = True
            continue
        gap, _ = _gaps(q, w)
        if gap <= tolerance:
            break
    return w, rounds

#-----------------------------------------------------------------------

def _minimize_on_simplex (q, start, tolerance, max_iterations):
    w, iterations = _accelerated_descent(q, start, max(tolerance, COARSE_GAP), max_iterations)
    w, rounds = _active_set(q, w, tolerance, MAX_ROUNDS)
    return w, iterations + rounds

#-----------------------------------------------------------------------
# Solve Equilibrium
#-----------------------------------------------------------------------

def _result (Q, w, iterations, stage):
    gap, residual = _gaps(Q.grid_values, w)
    mu = CircleMeasure.grid(w)
    energy = _objective(Q.grid_values, mu.masses)
    report = SolverReport(iterations=int(iterations), gap=gap,
                          active_constraint=bool(np.any(mu.masses == 0.0)),
                          stage=stage, residual=residual)
    return EquilibriumResult(nu_q=mu, energy=energy, b_constant=-energy, report=report)

#-----------------------------------------------------------------------

# Two stage solver. Stage 1 returns the spectral candidate when it is a
# probability density; otherwise Stage 2 minimizes over the simplex.
# stage='spectral' or stage='simplex' forces one of them.

def solve_equilibrium (Q, stage='auto', tolerance=GAP_TOLERANCE, max_iterations=MAX_ITERATIONS):
    if stage not in SOLVER_STAGES:
        raise ParameterError("unknown solver stage " + repr(stage))
    candidate = _spectral_candidate(Q)
    if stage != 'simplex':
        if candidate is not None and np.min(candidate) * Q.n_grid >= -SPECTRAL_TOLERANCE:
            w = np.maximum(candidate, 0.0)
            return _result(Q, w / w.sum(), 0, 1)
        if stage == 'spectral':
            raise SolverError("spectral candidate is not a probability density")
        logger.debug("spectral candidate rejected, running the simplex solver")
    if candidate is not None and np.any(candidate > 0.0):
        start = np.maximum(candidate, 0.0)
        start /= start.sum()
    else:
        start = np.full(Q.n_grid, 1.0 / Q.n_grid)
    w, iterations = _minimize_on_simplex(Q.grid_values, start, tolerance, max_iterations)
    result = _result(Q, w, iterations, 2)
    if result.report.gap > tolerance:
        raise SolverError("equilibrium solver did not converge, gap " + repr(result.report.gap),
                          gap=result.report.gap)
    logger.debug("equilibrium found in %d iterations, gap %.3e", iterations, result.report.gap)
    return result

#***********************************************************************
# Part 4: Cached Constants, Free Entropy and Free Pressure
#***********************************************************************

# B(Q) is cached per potential fingerprint. Writes are idempotent: two
# threads solving the same potential store the same value.

_EQUILIBRIUM_CACHE = {}
_CACHE_LOCK = threading.Lock()

def equilibrium_of (Q):
    key = Q.fingerprint()
    with _CACHE_LOCK:
        cached = _EQUILIBRIUM_CACHE.get(key)
    if cached is not None:
        return cached
    result = solve_equilibrium(Q)
    with _CACHE_LOCK:
        return _EQUILIBRIUM_CACHE.setdefault(key, result)

def clear_equilibrium_cache ():
    with _CACHE_LOCK:
        _EQUILIBRIUM_CACHE.clear()

def b_constant (Q):
    return equilibrium_of(Q).b_constant

#-----------------------------------------------------------------------

# Sigma~_Q(mu) = E_Q(mu) + B(Q) = E_Q(mu) - E_Q(nu_Q) >= 0.

def relative_free_entropy (Q, mu):
    energy = weighted_energy(Q, mu)
    return energy + b_constant(Q)

#-----------------------------------------------------------------------

# j_Q(f) = E_Q(nu_Q) - E_{Q-f}(nu_{Q-f}) = B(Q - f) - B(Q).

def free_pressure (Q, f):
    if Q.n_grid != f.n_grid:
        raise DimensionError("potential and f live on different grids")
    if f.is_zero():
        return 0.0
    return b_constant(Q - f) - b_constant(Q)

#-----------------------------------------------------------------------

# The supremum definition of j_Q(f) evaluated over the given measures.

def free_pressure_sup (Q, f, measures):
    values = []
    for mu in measures:
        value = ExtendedReal.of(mu.integrate(f.grid_values)) - relative_free_entropy(Q, mu)
        values.append(float(value))
    return max(values)

#-----------------------------------------------------------------------

@dataclass
class PressurePlCheck:
    theta: float
    pressure_f: float
    pressure_g: float
    lhs: float
    margin: float
    holds: bool

    def to_dict (self):
        return asdict(self)

# For (f, g) with f(z) <= g(w) + (1 + 2 rho)/4 d(z, w)^2, the pressure of
# the substitution (theta f, -(1 - theta) g, 0) satisfies
# (1 - theta) j_Q(theta f) + theta j_Q(-(1 - theta) g) <= j_Q(0) = 0.

def pressure_pl_check (Q, f, g, theta, tolerance=PRESSURE_TOLERANCE):
    if not 0.0 < theta < 1.0:
        raise ParameterError("theta must lie in (0, 1)")
    pressure_f = free_pressure(Q, theta * f)
    pressure_g = free_pressure(Q, -(1.0 - theta) * g)
    lhs = (1.0 - theta) * pressure_f + theta * pressure_g
    margin = -lhs
    return PressurePlCheck(theta=theta, pressure_f=pressure_f, pressure_g=pressure_g,
                           lhs=lhs, margin=margin, holds=bool(margin >= -tolerance))

#***********************************************************************
# Part 5: Closed Form Densities
#***********************************************************************

# Equilibrium density of Q = c cos theta. For |c| <= 1 it is
# (1 - c cos theta) / 2pi; for c > 1 the support is the arc around pi
# where sin^2((theta - pi)/2) <= 1/c.

def gross_witten_density (c, theta):
    theta = np.asarray(theta, dtype=float)
    if abs(c) <= 1.0:
        return (1.0 - c * np.cos(theta)) / TWO_PI
    if c < -1.0:
        return gross_witten_density(-c, theta + np.pi)
    phi = wrap_symmetric(theta - np.pi)
    inside = 1.0 / c - np.sin(phi / 2.0) ** 2
    return (c / np.pi) * np.cos(phi / 2.0) * np.sqrt(np.maximum(inside, 0.0))

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
