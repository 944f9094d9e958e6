#***********************************************************************
# Transport on the Circle
#***********************************************************************
#
# Quadratic Wasserstein distance with the cost (1/2) d(x, y)^2, d the
# angular distance, Kantorovich duality, admissible dual pairs and the
# free transportation cost inequality
#
#   ((1 + 2 rho) / 2) W(mu, nu_Q)^2 <= Sigma~_Q(mu)
#
# for Q(e^{it}) - rho t^2 / 2 convex with rho > -1/2.
#
# Part 1: Transport plans and the circular W2 distance
# Part 2: Oracles (assignment and linear program)
# Part 3: Kantorovich duality and dual pairs
# Part 4: Free transportation cost inequality
#
#***********************************************************************

# Python Imports
import math
import logging
from dataclasses import dataclass, asdict

# Data science imports
import numpy as np
from scipy import sparse
from scipy.optimize import linprog
from scipy.optimize import linear_sum_assignment
from scipy.optimize import minimize_scalar

# Project Imports
from src.circle_core import CircleMeasure
from src.circle_core import ConvexityParameter
from src.circle_core import Potential
from src.circle_core import measured_rho
from src.circle_core import MASS_TOLERANCE
from src.equilibrium import equilibrium_of
from src.equilibrium import relative_free_entropy
from src.errors import DimensionError
from src.errors import HypothesisError
from src.errors import MeasureError
from src.errors import ParameterError
from src.errors import SolverError
from src.utils import TWO_PI
from src.utils import grid_angles
from src.utils import angular_distance

logger = logging.getLogger(__name__)

#-----------------------------------------------------------------------
# Parameters
#-----------------------------------------------------------------------

# Width of the final golden section bracket on the shift (in turns).
SHIFT_TOLERANCE = 1e-15
MAX_GOLDEN_STEPS = 200

# Exact kinks this close to the golden section result are tried as well.
KINK_RADIUS = 1e-9

# Supports up to this many atoms (both measures) are scanned at every
# kink candidate before the golden section refinement.
SCAN_LIMIT = 512

LP_OPTIONS = {'primal_feasibility_tolerance': 1e-10,
              'dual_feasibility_tolerance': 1e-10}

DUAL_TOLERANCE = 1e-12

TCI_TOLERANCE = 1e-7

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

#***********************************************************************
# Part 1: Transport Plans and the Circular W2 Distance
#***********************************************************************

@dataclass
class TransportPlan:
    source: CircleMeasure
    target: CircleMeasure
    couplings: list
    cost: float
    shift: float = 0.0
    discretization_bound: float = 0.0

    # Marginals indexed like source.masses and target.masses.
    def marginals (self):
        a = np.zeros(self.source.masses.size)
        b = np.zeros(self.target.masses.size)
        for i, j, mass in self.couplings:
            a[i] += mass
            b[j] += mass
        return a, b

    def to_dict (self):
        return {'couplings': [[int(i), int(j), float(m)] for i, j, m in self.couplings],
                'cost': self.cost,
                'shift': self.shift,
                'discretization_bound': self.discretization_bound}

#-----------------------------------------------------------------------

def _check_probability (mu):
    if not isinstance(mu, CircleMeasure):
        raise MeasureError("transport needs CircleMeasure inputs")
    if abs(math.fsum(mu.masses) - 1.0) > MASS_TOLERANCE:
        raise MeasureError("unnormalized measure")

#-----------------------------------------------------------------------

# Positive atoms sorted by angle, angles in turns, with their indices in
# the original measure.

def _sorted_atoms (mu):
    index = np.flatnonzero(mu.masses > 0.0)
    turns = mu.angles[index] / TWO_PI
    order = np.argsort(turns, kind='stable')
    return turns[order], mu.masses[index][order], index[order]

#-----------------------------------------------------------------------

def _levels (masses):
    levels = np.concatenate(([0.0], np.cumsum(masses)))
    levels[-1] = 1.0
    return levels

#-----------------------------------------------------------------------

# Pieces of the shifted monotone coupling: mass level t of the source is
# sent to level t - shift of the periodically lifted target. Returns the
# source and target atoms of each piece, its length and the lifted
# displacement in turns.

def _pieces (x, A, y, B, shift):
    cuts = np.concatenate((A[:-1], np.mod(B[:-1] + shift, 1.0), [0.0, 1.0]))
    cuts = np.unique(np.clip(cuts, 0.0, 1.0))
    lengths = np.diff(cuts)
    middles = 0.5 * (cuts[:-1] + cuts[1:])
    keep = lengths > 0.0
    lengths, middles = lengths[keep], middles[keep]
    i = np.clip(np.searchsorted(A, middles, side='right') - 1, 0, x.size - 1)
    s = middles - shift
    q = np.floor(s)
    j = np.clip(np.searchsorted(B, s - q, side='right') - 1, 0, y.size - 1)
    return i, j, lengths, x[i] - y[j] - q

#-----------------------------------------------------------------------

def _lifted_cost (x, A, y, B, shift):
    _, _, lengths, delta = _pieces(x, A, y, B, shift)
    return float(np.dot(lengths, 0.5 * (TWO_PI * delta) ** 2))

#-----------------------------------------------------------------------

# Kinks A_i - B_j + z of the lifted cost within KINK_RADIUS of a shift.

def _nearby_kinks (A, B, shift):
    targets = np.mod(A[:-1] - shift, 1.0)
    j = np.searchsorted(B, targets)
    j = np.concatenate((np.clip(j, 0, B.size - 1), np.clip(j - 1, 0, B.size - 1)))
    kinks = np.concatenate((A[:-1], A[:-1])) - B[j]
    kinks = kinks + np.round(shift - kinks)
    return kinks[np.abs(kinks - shift) <= KINK_RADIUS]

#-----------------------------------------------------------------------

# The lifted cost is convex and piecewise linear in the shift. Its kinks
# include every A_i and -B_j; small supports are scanned on those first,
# then a golden section search closes the bracket. Ties go to the
# smaller shift.

def _optimal_shift (x, A, y, B):
    center = float(np.dot(np.diff(B), y) - np.dot(np.diff(A), x))
    lo, hi = center - 1.0, center + 1.0
    cost = lambda s: _lifted_cost(x, A, y, B, s)
    if x.size + y.size <= SCAN_LIMIT:
        candidates = np.unique(np.concatenate([A[:-1] + z for z in (-1.0, 0.0, 1.0)] +
                                              [-B[:-1] + z for z in (-1.0, 0.0, 1.0)]))
        candidates = candidates[(candidates >= lo) & (candidates <= hi)]
        if candidates.size > 0:
            values = np.array([cost(s) for s in candidates])
            best = int(np.argmin(values))
            lo = candidates[best - 1] if best > 0 else lo
            hi = candidates[best + 1] if best + 1 < candidates.size else hi
    a = hi - GOLDEN * (hi - lo)
    b = lo + GOLDEN * (hi - lo)
    fa, fb = cost(a), cost(b)
    for _ in range(MAX_GOLDEN_STEPS):
        if hi - lo <= SHIFT_TOLERANCE:
            break
        if fa <= fb:
            hi, b, fb = b, a, fa
            a = hi - GOLDEN * (hi - lo)
            fa = cost(a)
        else:
            lo, a, fa = a, b, fb
            b = lo + GOLDEN * (hi - lo)
            fb = cost(b)
        if b <= a:
            break
    best_shift, best_cost = None, math.inf
    finalists = np.concatenate(([lo, a, b, hi], _nearby_kinks(A, B, 0.5 * (lo + hi))))
    for s in np.unique(finalists):
        c = cost(s)
        if c < best_cost * (1.0 - 1e-15):
            best_shift, best_cost = s, c
    return best_shift

#-----------------------------------------------------------------------

def _discretization_bound (mu):
    if mu.is_grid():
        return (TWO_PI / mu.n_grid) / (2.0 * math.sqrt(2.0))
    return 0.0

#-----------------------------------------------------------------------

# W(mu, nu) = sqrt(min over couplings of int (1/2) d(x, y)^2). The optimal
# coupling is monotone after cutting the circle at the right place: the
# cut is found as the optimal shift of the mass levels. Grid measures are
# treated as atoms at the grid points; the distance to the underlying
# densities is within the reported discretization bound.

def circular_w2 (mu, nu):
    _check_probability(mu)
    _check_probability(nu)
    x, a, index_a = _sorted_atoms(mu)
    y, b, index_b = _sorted_atoms(nu)
    A, B = _levels(a), _levels(b)
    shift = _optimal_shift(x, A, y, B)
    i, j, lengths, _ = _pieces(x, A, y, B, shift)
    keys = i * y.size + j
    unique, inverse = np.unique(keys, return_inverse=True)
    masses = np.bincount(inverse, weights=lengths)
    source, target = unique // y.size, unique % y.size
    distances = angular_distance(TWO_PI * x[source], TWO_PI * y[target])
    cost = math.fsum(masses * 0.5 * distances ** 2)
    couplings = [(int(index_a[s]), int(index_b[t]), float(m))
                 for s, t, m in zip(source, target, masses)]
    plan = TransportPlan(source=mu, target=nu, couplings=couplings, cost=cost, shift=float(shift),
                         discretization_bound=_discretization_bound(mu) + _discretization_bound(nu))
    return math.sqrt(max(cost, 0.0)), plan

#***********************************************************************
# Part 2: Oracles
#***********************************************************************

def cost_matrix (source_angles, target_angles):
    d = angular_distance(np.asarray(source_angles)[:, None], np.asarray(target_angles)[None, :])
    return 0.5 * d ** 2

#-----------------------------------------------------------------------

# Equal mass atoms: optimal assignment.

def w2_assignment (source_angles, target_angles):
    source_angles = np.asarray(source_angles, dtype=float)
    target_angles = np.asarray(target_angles, dtype=float)
    if source_angles.size != target_angles.size:
        raise DimensionError("assignment needs the same number of atoms")
    cost = cost_matrix(source_angles, target_angles)
    rows, cols = linear_sum_assignment(cost)
    return math.sqrt(math.fsum(cost[rows, cols]) / source_angles.size)

#-----------------------------------------------------------------------

# The transport linear program over all couplings.

def w2_linprog (mu, nu):
    _check_probability(mu)
    _check_probability(nu)
    x, a = mu.to_atoms()
    y, b = nu.to_atoms()
    n, m = a.size, b.size
    cost = cost_matrix(x, y).ravel()
    rows = sparse.kron(sparse.identity(n), np.ones((1, m)))
    cols = sparse.kron(np.ones((1, n)), sparse.identity(m))
    constraints = sparse.vstack([rows, cols]).tocsr()
    res = linprog(cost, A_eq=constraints, b_eq=np.concatenate((a, b)), bounds=(0, None),
                  method='highs-ds', options=LP_OPTIONS)
    if not res.success:
        raise SolverError("transport linear program failed: " + res.message)
    return math.sqrt(max(res.fun, 0.0))

#***********************************************************************
# Part 3: Kantorovich Duality and Dual Pairs
#***********************************************************************

@dataclass
class KantorovichDual:
    value: float
    f: np.ndarray
    g: np.ndarray
    source_angles: np.ndarray
    target_angles: np.ndarray
    rho_prime: float

    def to_dict (self):
        return {'value': self.value, 'rho_prime': self.rho_prime,
                'f': [float(v) for v in self.f], 'g': [float(v) for v in self.g],
                'source_angles': [float(v) for v in self.source_angles],
                'target_angles': [float(v) for v in self.target_angles]}

#-----------------------------------------------------------------------

# sup { int f dmu - int g dnu : f(x) <= g(y) + (rho'/2) d(x, y)^2 } on the
# finite supports. Strong duality makes the value rho' W(mu, nu)^2. The
# pair is normalized by g = 0 at the first target atom.

def kantorovich_dual (mu, nu, rho_prime):
    if rho_prime <= 0.0:
        raise ParameterError("rho' must be positive")
    _check_probability(mu)
    _check_probability(nu)
    x, a = mu.to_atoms()
    y, b = nu.to_atoms()
    n, m = a.size, b.size
    bound = rho_prime * cost_matrix(x, y).ravel()
    f_part = sparse.kron(sparse.identity(n), np.ones((m, 1)))
    g_part = sparse.kron(np.ones((n, 1)), sparse.identity(m))
    constraints = sparse.hstack([f_part, -g_part]).tocsr()
    objective = np.concatenate((-a, b))
    bounds = [(None, None)] * (n + m)
    bounds[n] = (0.0, 0.0)
    res = linprog(objective, A_ub=constraints, b_ub=bound, bounds=bounds,
                  method='highs-ds', options=LP_OPTIONS)
    if not res.success:
        raise SolverError("Kantorovich dual linear program failed: " + res.message)
    return KantorovichDual(value=-float(res.fun), f=res.x[:n], g=res.x[n:],
                           source_angles=x, target_angles=y, rho_prime=float(rho_prime))

#-----------------------------------------------------------------------

def _function_on_grid (f):
    if isinstance(f, Potential):
        return f.angles(), f.grid_values
    values = np.asarray(f, dtype=float)
    return grid_angles(values.size), values

#-----------------------------------------------------------------------

# max over grid pairs of f(z) - g(w) - (rho'/2) d(z, w)^2.

def dual_pair_violation (f, g, rho_prime):
    f_angles, f_values = _function_on_grid(f)
    g_angles, g_values = _function_on_grid(g)
    worst = -math.inf
    for start in range(0, f_values.size, 1024):
        block = slice(start, start + 1024)
        d = angular_distance(f_angles[block, None], g_angles[None, :])
        gaps = f_values[block, None] - g_values[None, :] - 0.5 * rho_prime * d ** 2
        worst = max(worst, float(np.max(gaps)))
    return worst

#-----------------------------------------------------------------------

def dual_pair_check (f, g, rho_prime, tolerance=DUAL_TOLERANCE):
    return dual_pair_violation(f, g, rho_prime) <= tolerance

#-----------------------------------------------------------------------
# Quadratic Inf Convolution
#-----------------------------------------------------------------------

# f(z) = min_w g(w) + (rho'/2) d(z, w)^2, by brute force over the grid of
# g, optionally refined around the best grid point with g evaluated by
# its Fourier series.

class InfConvolution:

    def __init__ (self, g, rho_prime, refine=True):
        self.g = g
        self.rho_prime = float(rho_prime)
        self.refine = refine
        self.angles = g.angles()
        self.values = g.grid_values
        self.step = TWO_PI / g.n_grid

    def _at (self, z):
        costs = self.values + 0.5 * self.rho_prime * angular_distance(z, self.angles) ** 2
        j = int(np.argmin(costs))
        best = float(costs[j])
        if self.refine:
            center = self.angles[j]
            fn = lambda s: float(self.g.fourier_values(np.array([center + s]))[0]
                                 + 0.5 * self.rho_prime * angular_distance(z, center + s) ** 2)
            res = minimize_scalar(fn, bounds=(-self.step, self.step), method='bounded',
                                  options={'xatol': 1e-12})
            best = min(best, float(res.fun))
        return best

    def __call__ (self, angles):
        angles = np.asarray(angles, dtype=float)
        values = np.array([self._at(z) for z in angles.ravel()])
        return values.reshape(angles.shape)

#-----------------------------------------------------------------------

# Returns a Potential on the grid of g whose off grid values are exact.

def inf_convolution (g, rho_prime, refine=True):
    if rho_prime <= 0.0:
        raise ParameterError("rho' must be positive")
    evaluator = InfConvolution(g, rho_prime, refine)
    return Potential.from_grid(evaluator(g.angles()), evaluator=evaluator)

#***********************************************************************
# Part 4: Free Transportation Cost Inequality
#***********************************************************************

@dataclass
class TciVerdict:
    rho: ConvexityParameter
    wasserstein: float
    free_entropy: float
    slack: float
    holds: bool
    measured_rho: float = 0.0
    tolerance: float = TCI_TOLERANCE

    def to_dict (self):
        return {'rho': self.rho.rho, 'admissible': self.rho.admissible,
                'measured_rho': self.measured_rho,
                'wasserstein': self.wasserstein,
                'free_entropy': self.free_entropy,
                'slack': self.slack, 'holds': self.holds,
                'tolerance': self.tolerance}

#-----------------------------------------------------------------------

def _convexity (Q, rho):
    measured = measured_rho(Q)
    if not measured.admissible:
        raise HypothesisError("measured rho " + repr(measured.rho) + " is not above -1/2")
    if rho is None:
        return measured, measured
    claimed = ConvexityParameter(rho)
    if not claimed.admissible:
        raise HypothesisError("claimed rho " + repr(claimed.rho) + " is not above -1/2")
    return claimed, measured

#-----------------------------------------------------------------------

# Verdict of ((1 + 2 rho)/2) W(mu, nu_Q)^2 <= Sigma~_Q(mu). rho defaults
# to measured_rho(Q); a smaller claimed rho may be passed.

def tci_check (Q, mu, rho=None, tolerance=TCI_TOLERANCE):
    parameter, measured = _convexity(Q, rho)
    equilibrium = equilibrium_of(Q)
    w, _ = circular_w2(mu, equilibrium.nu_q)
    free_entropy = relative_free_entropy(Q, mu)
    factor = (1.0 + 2.0 * parameter.rho) / 2.0
    slack = float(free_entropy - factor * w * w)
    return TciVerdict(rho=parameter, wasserstein=w, free_entropy=float(free_entropy),
                      slack=slack, holds=bool(slack >= -tolerance),
                      measured_rho=measured.rho, tolerance=tolerance)

#-----------------------------------------------------------------------

@dataclass
class DualBound:
    lhs: float
    rhs: float
    margin: float
    holds: bool

    def to_dict (self):
        return asdict(self)

# For an admissible pair with rho' = (1 + 2 rho)/2,
# int f dmu - int g dnu_Q <= rho' W^2 <= Sigma~_Q(mu).

def dual_bound_check (Q, mu, f, g, rho=None, tolerance=TCI_TOLERANCE):
    parameter, _ = _convexity(Q, rho)
    rho_prime = (1.0 + 2.0 * parameter.rho) / 2.0
    if not dual_pair_check(f, g, rho_prime):
        raise HypothesisError("(f, g) is not an admissible pair for rho' = " + repr(rho_prime))
    equilibrium = equilibrium_of(Q)
    lhs = mu.integrate(f.grid_values) - equilibrium.nu_q.integrate(g.grid_values)
    rhs = float(relative_free_entropy(Q, mu))
    margin = rhs - lhs
    return DualBound(lhs=lhs, rhs=rhs, margin=margin, holds=bool(margin >= -tolerance))

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
