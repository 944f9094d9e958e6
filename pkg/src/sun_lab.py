#***********************************************************************
# SU(N) Laboratory
#***********************************************************************
#
# Part 1: Special unitary matrices and Haar sampling
# Part 2: Eigenangles and functional calculus
# Part 3: Logarithm, geodesic distance and geodesic points
# Part 4: Optimal matching distance
# Part 5: Hessian probes of Tr Q(U)
# Part 6: Hypothesis chain for the matrix Prekopa-Leindler step
#
# The metric is <X, Y> = Re Tr(X* Y) on traceless anti-Hermitian
# tangents, for which Ric(SU(N)) = (N/2) g. See
# doc/metric-normalization.md.
#
#***********************************************************************

# Python Imports
import math
import logging
import itertools
from dataclasses import dataclass, asdict, field

# Data science imports
import numpy as np
import pandas as pd
from scipy.linalg import expm
from scipy.linalg import schur
from scipy.optimize import linear_sum_assignment

# Project Imports
from src.circle_core import measured_rho
from src.errors import AmbiguityError
from src.errors import DimensionError
from src.errors import HypothesisError
from src.errors import ParameterError
from src.transport import dual_pair_check
from src.utils import TWO_PI
from src.utils import angular_distance
from src.utils import make_rng
from src.utils import spawn_seeds
from src.utils import wrap_symmetric

logger = logging.getLogger(__name__)

#-----------------------------------------------------------------------
# Parameters
#-----------------------------------------------------------------------

UNITARY_TOLERANCE = 1e-10

# Adjusted angles spanning 2 pi within this are on the cut locus.
CUT_LOCUS_TOLERANCE = 1e-9

# Largest N for the permutation brute force of the matching distance.
MAX_PERMUTATION_N = 8

DEFAULT_STEP = 1e-3

MATCHING_METHODS = ('auto', 'permutations', 'assignment')

#***********************************************************************
# Part 1: Special Unitary Matrices
#***********************************************************************

class SpecialUnitary:

    def __init__ (self, entries, check=True):
        entries = np.array(entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 2:
            raise DimensionError("SU(N) needs a square matrix with N >= 2")
        if check:
            N = entries.shape[0]
            defect = np.linalg.norm(entries.conj().T @ entries - np.eye(N), 2)
            if defect > UNITARY_TOLERANCE:
                raise ParameterError("matrix is not unitary: |U*U - I| = " + repr(defect))
            det = np.linalg.det(entries)
            if abs(det - 1.0) > UNITARY_TOLERANCE:
                raise ParameterError("determinant is not one: det = " + repr(det))
        entries.setflags(write=False)
        self.entries = entries

    @classmethod
    def identity (cls, N):
        return cls(np.eye(N, dtype=complex))

    @property
    def N (self):
        return self.entries.shape[0]

    def adjoint (self):
        return SpecialUnitary(self.entries.conj().T, check=False)

    def __matmul__ (self, other):
        return SpecialUnitary(self.entries @ other.entries, check=False)

    def __repr__ (self):
        return "<SpecialUnitary N=" + str(self.N) + ">"

#-----------------------------------------------------------------------

# Fold the phase of det into the matrix; the N-th root is the principal
# one. Any root gives an element of SU(N).

def _to_special (M):
    det = np.linalg.det(M)
    return M / det ** (1.0 / M.shape[0])

#-----------------------------------------------------------------------

# Haar sample of U(N) by QR of a complex Ginibre matrix with the phases
# of diag(R) moved into Q, then projected to SU(N).

def haar_sample (N, seed=None):
    if N < 2:
        raise ParameterError("N must be at least 2")
    rng = make_rng(seed)
    Z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    L = np.diag(R)
    Q = Q * (L / np.abs(L))
    return SpecialUnitary(_to_special(Q))

#-----------------------------------------------------------------------

# Random traceless anti-Hermitian direction of unit Frobenius norm.

def random_tangent (N, rng=None):
    rng = make_rng(rng)
    A = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    X = 0.5 * (A - A.conj().T)
    X = X - np.trace(X) / N * np.eye(N)
    return X / np.linalg.norm(X)

#***********************************************************************
# Part 2: Eigenangles and Functional Calculus
#***********************************************************************

@dataclass
class EigenAngles:
    angles: np.ndarray

    def __post_init__ (self):
        self.angles = np.sort(wrap_symmetric(np.asarray(self.angles, dtype=float)))

    @property
    def N (self):
        return self.angles.size

#-----------------------------------------------------------------------

def _matrix (U):
    return U.entries if isinstance(U, SpecialUnitary) else np.asarray(U, dtype=complex)

#-----------------------------------------------------------------------

# lambda(U): eigenangles in (-pi, pi], counter-clockwise from -pi.

def eigen_angles (U):
    return EigenAngles(np.angle(np.linalg.eigvals(_matrix(U))))

#-----------------------------------------------------------------------

def _evaluate (f, angles):
    if hasattr(f, 'evaluate'):
        return f.evaluate(np.asarray(angles, dtype=float))
    return np.asarray(f(angles), dtype=float)

#-----------------------------------------------------------------------

# f(U) through the Schur (unitary) eigendecomposition.

def functional_calculus (f, U):
    T, Z = schur(_matrix(U), output='complex')
    values = _evaluate(f, np.angle(np.diag(T)))
    return (Z * values) @ Z.conj().T

#-----------------------------------------------------------------------

# Tr_N f(U) = sum_j f(lambda_j(U)).

def trace_of (f, U):
    return float(np.sum(_evaluate(f, eigen_angles(U).angles)))

#***********************************************************************
# Part 3: Logarithm and Geodesics
#***********************************************************************

@dataclass
class LieLogarithm:
    angles: np.ndarray
    basis: np.ndarray
    ambiguous: bool

    @property
    def distance (self):
        return float(math.sqrt(np.sum(self.angles ** 2)))

    def generator (self):
        return (self.basis * (1j * self.angles)) @ self.basis.conj().T

#-----------------------------------------------------------------------

# Integer shifts m with sum(phi + 2 pi m) = 0 minimizing sum(phi + 2 pi m)^2.
# The problem is separable and convex, so moving 2 pi away from the
# current largest (or onto the current smallest) angle one unit at a
# time is exact.

def _branch_angles (phi):
    psi = np.array(phi, dtype=float)
    m0 = int(round(np.sum(psi) / TWO_PI))
    for _ in range(abs(m0)):
        if m0 > 0:
            psi[np.argmax(psi)] -= TWO_PI
        else:
            psi[np.argmin(psi)] += TWO_PI
    return psi

#-----------------------------------------------------------------------

# Logarithm X of U*V with the branch of least norm. The branch is
# unique unless the adjusted angles span 2 pi.

def lie_logarithm (U, V):
    M = _matrix(U).conj().T @ _matrix(V)
    T, Z = schur(M, output='complex')
    psi = _branch_angles(np.angle(np.diag(T)))
    ambiguous = bool(np.max(psi) - np.min(psi) >= TWO_PI - CUT_LOCUS_TOLERANCE)
    return LieLogarithm(angles=psi, basis=Z, ambiguous=ambiguous)

#-----------------------------------------------------------------------

# Oracle: every shift vector with |m_j| <= N on the first N - 1 angles,
# the last one fixed by the sum constraint.

def _exhaustive_distance (phi):
    N = len(phi)
    best = math.inf
    for shifts in itertools.product(range(-N, N + 1), repeat=N - 1):
        partial = np.asarray(phi[:-1]) + TWO_PI * np.asarray(shifts)
        last = -np.sum(partial)
        if abs((last - phi[-1]) / TWO_PI - round((last - phi[-1]) / TWO_PI)) > 1e-6:
            continue
        best = min(best, float(np.sum(partial ** 2) + last ** 2))
    return math.sqrt(best)

#-----------------------------------------------------------------------

def geodesic_distance (U, V, exhaustive=False):
    if _matrix(U).shape != _matrix(V).shape:
        raise DimensionError("U and V must have the same N")
    if exhaustive:
        M = _matrix(U).conj().T @ _matrix(V)
        return _exhaustive_distance(np.angle(np.linalg.eigvals(M)))
    return lie_logarithm(U, V).distance

#-----------------------------------------------------------------------

# W = U exp(t X), the t point of the minimizing geodesic from U to V.

def geodesic_point (U, V, t):
    log = lie_logarithm(U, V)
    if log.ambiguous:
        candidates = _cut_locus_candidates(log)
        raise AmbiguityError("U*V is on the cut locus; the geodesic is not unique",
                             candidates=candidates)
    return _point_on(U, log, t)

#-----------------------------------------------------------------------

def _point_on (U, log, t):
    Z = log.basis
    W = _matrix(U) @ ((Z * np.exp(1j * t * log.angles)) @ Z.conj().T)
    return SpecialUnitary(W, check=False)

#-----------------------------------------------------------------------

# Alternative minimizing branches: move 2 pi from a largest adjusted
# angle onto a smallest one.

def _cut_locus_candidates (log):
    psi = log.angles
    top = np.flatnonzero(psi >= np.max(psi) - CUT_LOCUS_TOLERANCE)
    bottom = np.flatnonzero(psi <= np.min(psi) + CUT_LOCUS_TOLERANCE)
    candidates = [psi.copy()]
    for i in top:
        for j in bottom:
            if i != j:
                alt = psi.copy()
                alt[i] -= TWO_PI
                alt[j] += TWO_PI
                candidates.append(alt)
    return candidates

#-----------------------------------------------------------------------

# Length of t -> U exp(tX), t in [0, 1], as a sum of chord lengths.
# Chords of a geodesic in a bi-invariant metric converge to its length.

def path_length (U, X, steps=1000):
    start = _matrix(U)
    step = expm(np.asarray(X, dtype=complex) / steps)
    chord = np.linalg.norm(start @ step - start)
    return float(steps * chord)

#***********************************************************************
# Part 4: Optimal Matching Distance
#***********************************************************************

def _angles (a):
    return a.angles if isinstance(a, EigenAngles) else np.asarray(a, dtype=float)

#-----------------------------------------------------------------------

# delta(a, b) = min over permutations s of sqrt(sum d(a_i, b_s(i))^2).

def matching_distance (a, b, method='auto'):
    a, b = _angles(a), _angles(b)
    if a.shape != b.shape:
        raise DimensionError("eigenangle tuples must have the same length")
    if method not in MATCHING_METHODS:
        raise ParameterError("unknown matching method " + repr(method))
    cost = angular_distance(a[:, None], b[None, :]) ** 2
    if method == 'permutations' or (method == 'auto' and a.size <= MAX_PERMUTATION_N):
        rows = np.arange(a.size)
        best = min(float(np.sum(cost[rows, list(p)])) for p in itertools.permutations(range(a.size)))
    else:
        rows, cols = linear_sum_assignment(cost)
        best = float(np.sum(cost[rows, cols]))
    return math.sqrt(best)

#-----------------------------------------------------------------------

# delta(lambda(U), lambda(V)) <= d(U, V) on random Haar pairs.

def contraction_sweep (dimensions, pairs, seed=0):
    rows = []
    for N in dimensions:
        seeds = spawn_seeds([seed, N], 2 * pairs)
        for trial in range(pairs):
            U = haar_sample(N, seeds[2 * trial])
            V = haar_sample(N, seeds[2 * trial + 1])
            d = geodesic_distance(U, V)
            delta = matching_distance(eigen_angles(U), eigen_angles(V))
            rows.append({'N': N, 'trial': trial, 'distance': d, 'matching': delta,
                         'margin': d - delta})
    return pd.DataFrame(rows, columns=['N', 'trial', 'distance', 'matching', 'margin'])

#***********************************************************************
# Part 5: Hessian Probes
#***********************************************************************

def _psi (Q, U, X, t):
    W = _matrix(U) @ expm(t * X)
    return trace_of(Q, W)

#-----------------------------------------------------------------------

# Central second difference of t -> Tr Q(U exp(tX)) at t = 0.

def hessian_probe (Q, U, X, h=DEFAULT_STEP):
    if not 1e-4 <= h <= 1e-2:
        raise ParameterError("step h must lie in [1e-4, 1e-2]")
    X = np.asarray(X, dtype=complex)
    centre = _psi(Q, U, X, 0.0)
    return (_psi(Q, U, X, h) - 2.0 * centre + _psi(Q, U, X, -h)) / (h * h)

#-----------------------------------------------------------------------

def hessian_probe_richardson (Q, U, X, h=DEFAULT_STEP):
    coarse = hessian_probe(Q, U, X, h)
    fine = hessian_probe(Q, U, X, h / 2.0)
    return (4.0 * fine - coarse) / 3.0

#-----------------------------------------------------------------------

@dataclass
class HessianSweep:
    N: int
    probes: int
    minimum: float
    minimum_richardson: float
    measured_rho: float

    def to_dict (self):
        return asdict(self)

def hessian_sweep (Q, N, probes, seed=0, h=DEFAULT_STEP):
    rng = make_rng(seed)
    values, refined = [], []
    for _ in range(probes):
        U = haar_sample(N, rng)
        X = random_tangent(N, rng)
        values.append(hessian_probe(Q, U, X, h))
        refined.append(hessian_probe_richardson(Q, U, X, h))
    return HessianSweep(N=N, probes=probes, minimum=float(min(values)),
                        minimum_richardson=float(min(refined)), measured_rho=measured_rho(Q).rho)

#***********************************************************************
# Part 6: Hypothesis Chain
#***********************************************************************

# Phi_theta on SU(N) (dimension N^2 - 1, Ric = N/2) is bounded by
# -N theta (1 - theta) d^2 / 4.

def sun_phi_bound (N, theta, d):
    return -0.25 * N * theta * (1.0 - theta) * d * d

#-----------------------------------------------------------------------

@dataclass
class HypothesisReport:
    N: int
    theta: float
    rho: float
    trials: int
    skipped: int
    worst_hypothesis: float
    worst_convexity: float
    worst_dual_matrix: float
    worst_dual_matching: float
    seeds: list = field(default_factory=list)

    @property
    def holds (self):
        return min(self.worst_hypothesis, self.worst_convexity,
                   self.worst_dual_matrix, self.worst_dual_matching) >= -1e-8

    def to_dict (self):
        result = asdict(self)
        result['holds'] = self.holds
        return result

#-----------------------------------------------------------------------

# For (f, g) admissible with rho' = (1 + 2 rho) / 2 and random (U, V),
# W the theta point, the substitution f~ = theta f, g~ = -(1 - theta) g,
# h~ = 0 must satisfy
#
#   0 >= (1 - theta) Tr f~(U) + theta Tr g~(V) + R - theta (1 - theta) d^2 / 4
#
# with R = Tr Q(W) - (1 - theta) Tr Q(U) - theta Tr Q(V). The convexity
# step R <= -rho theta (1 - theta) d^2 / 2 and the dual constraint
# Tr f(U) - Tr g(V) <= (1 + 2 rho) / 4 d^2 (through delta <= d) are
# checked separately. Margins are >= 0 when a check passes.

def trace_pl_hypothesis_check (Q, f, g, theta, N, trials, seed=0):
    if not 0.0 < theta < 1.0:
        raise ParameterError("theta must lie in (0, 1)")
    rho = measured_rho(Q).rho
    rho_prime = (1.0 + 2.0 * rho) / 2.0
    if not dual_pair_check(f, g, rho_prime):
        raise HypothesisError("(f, g) is not an admissible dual pair for rho' = " + repr(rho_prime))
    seeds = spawn_seeds(seed, trials)
    worst = {'hypothesis': math.inf, 'convexity': math.inf, 'matrix': math.inf, 'matching': math.inf}
    skipped = 0
    for trial_seed in seeds:
        rng = make_rng(trial_seed)
        U, V = haar_sample(N, rng), haar_sample(N, rng)
        log = lie_logarithm(U, V)
        if log.ambiguous:
            skipped += 1
            continue
        W = _point_on(U, log, theta)
        d2 = log.distance ** 2
        tr_f, tr_g = trace_of(f, U), trace_of(g, V)
        R = trace_of(Q, W) - (1.0 - theta) * trace_of(Q, U) - theta * trace_of(Q, V)
        spread = theta * (1.0 - theta)
        hypothesis = -spread * (tr_f - tr_g) - R + 0.25 * spread * d2
        convexity = -0.5 * rho * spread * d2 - R
        delta = matching_distance(eigen_angles(U), eigen_angles(V))
        allowance = 0.25 * (1.0 + 2.0 * rho)
        worst['hypothesis'] = min(worst['hypothesis'], hypothesis)
        worst['convexity'] = min(worst['convexity'], convexity)
        worst['matrix'] = min(worst['matrix'], allowance * d2 - (tr_f - tr_g))
        worst['matching'] = min(worst['matching'], allowance * delta ** 2 - (tr_f - tr_g))
    if skipped:
        logger.info("Skipped %d cut locus trials of %d", skipped, trials)
    return HypothesisReport(N=N, theta=theta, rho=rho, trials=trials, skipped=skipped,
                            worst_hypothesis=worst['hypothesis'], worst_convexity=worst['convexity'],
                            worst_dual_matrix=worst['matrix'], worst_dual_matching=worst['matching'],
                            seeds=seeds)

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
