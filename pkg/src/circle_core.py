#***********************************************************************
# Circle Core
#***********************************************************************
#
# Probability measures and potentials on the unit circle, Fourier
# coefficients, classical relative entropy and logarithmic energy.
#
# Part 1: Extended reals
# Part 2: Circle measures
# Part 3: Potentials
# Part 4: Fourier coefficients and logarithmic energy
# Part 5: Relative entropy
# Part 6: Convexity parameter
# Part 7: Serialization
#
# Conventions
#
#   grid angles     theta_j = 2 pi j / n
#   Fourier         mu_k = int e^{-ik theta} dmu(theta)
#   potentials      Q(theta) = q0 + 2 Re sum_{k=1..K} q_k e^{ik theta}
#   log energy      Sigma(mu) = int int log|z - w| dmu dmu
#                             = - sum_{k>=1} |mu_k|^2 / k
#
#***********************************************************************

# Python Imports
import json
import math
import hashlib
import logging
import functools
from dataclasses import dataclass, field

# Data science imports
import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

# Project Imports
from src.errors import DimensionError
from src.errors import MeasureError
from src.errors import ParameterError
from src.utils import TWO_PI
from src.utils import grid_angles
from src.utils import wrap_positive
from src.utils import angular_distance

logger = logging.getLogger(__name__)

#-----------------------------------------------------------------------
# Parameters
#-----------------------------------------------------------------------

DEFAULT_GRID = 1024

# Total mass of a measure must be one within this tolerance.
MASS_TOLERANCE = 1e-12

# Mass of mu below this is ignored where nu vanishes.
TOL_MASS = 1e-14

# Two atoms closer than this are the same point.
ATOM_TOLERANCE = 1e-12

# Fine grid used to locate the minimum of Q''.
MIN_RHO_RESOLUTION = 4096

# Rows per block when synthesizing a Fourier series at many angles.
SYNTHESIS_BLOCK = 4096

#***********************************************************************
# Part 1: Extended Reals
#***********************************************************************

FINITE = 'finite'
PLUS = '+inf'
MINUS = '-inf'

@functools.total_ordering
class ExtendedReal:

    __slots__ = ('kind', 'value')

    def __init__(self, value=0.0, kind=FINITE):
        if kind == FINITE:
            value = float(value)
            if not math.isfinite(value):
                raise ValueError("finite extended real built from " + repr(value))
        elif kind == PLUS:
            value = math.inf
        elif kind == MINUS:
            value = -math.inf
        else:
            raise ValueError("unknown extended real kind " + repr(kind))
        self.kind = kind
        self.value = value

    @classmethod
    def of (cls, x):
        if isinstance(x, ExtendedReal):
            return x
        x = float(x)
        if x == math.inf:
            return PLUS_INF
        if x == -math.inf:
            return MINUS_INF
        return cls(x)

    def is_finite (self):
        return self.kind == FINITE

    def __float__ (self):
        return self.value

    def __add__ (self, other):
        other = ExtendedReal.of(other)
        if {self.kind, other.kind} == {PLUS, MINUS}:
            raise ValueError("+inf + -inf is undefined")
        if self.kind != FINITE:
            return self
        if other.kind != FINITE:
            return other
        return ExtendedReal(self.value + other.value)

    __radd__ = __add__

    def __neg__ (self):
        if self.kind == PLUS:
            return MINUS_INF
        if self.kind == MINUS:
            return PLUS_INF
        return ExtendedReal(-self.value)

    def __sub__ (self, other):
        return self + (-ExtendedReal.of(other))

    def __rsub__ (self, other):
        return ExtendedReal.of(other) + (-self)

    def __eq__ (self, other):
        try:
            return self.value == float(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__ (self, other):
        return self.value < float(other)

    def __hash__ (self):
        return hash(self.value)

    def __repr__ (self):
        if self.kind == FINITE:
            return 'ExtendedReal(' + repr(self.value) + ')'
        return 'ExtendedReal(' + self.kind + ')'

PLUS_INF = ExtendedReal(kind=PLUS)
MINUS_INF = ExtendedReal(kind=MINUS)

#***********************************************************************
# Part 2: Circle Measures
#***********************************************************************

GRID = 'grid'
ATOMIC = 'atomic'

#-----------------------------------------------------------------------

def _check_masses (masses):
    if masses.ndim != 1 or masses.size == 0:
        raise MeasureError("masses must be a non empty vector")
    if not np.all(np.isfinite(masses)):
        raise MeasureError("masses must be finite")
    if np.min(masses) < 0.0:
        raise MeasureError("negative mass " + repr(float(np.min(masses))))
    total = math.fsum(masses)
    if abs(total - 1.0) > MASS_TOLERANCE:
        raise MeasureError("total mass " + repr(total) + " is not 1")

#-----------------------------------------------------------------------

# A probability measure on the circle, either masses on the uniform grid
# (GridDensity) or a finite list of atoms (Atomic). Instances are
# immutable once built.

class CircleMeasure:

    def __init__ (self, kind, angles, masses):
        masses = np.array(masses, dtype=float)
        _check_masses(masses)
        if kind == GRID:
            angles = grid_angles(masses.size)
        elif kind == ATOMIC:
            angles = np.array(angles, dtype=float)
            if angles.shape != masses.shape:
                raise DimensionError("atoms need one angle per mass")
            if not np.all(np.isfinite(angles)):
                raise MeasureError("atom angles must be finite")
            angles = wrap_positive(angles)
        else:
            raise MeasureError("unknown measure kind " + repr(kind))
        angles.setflags(write=False)
        masses.setflags(write=False)
        self.kind = kind
        self.angles = angles
        self.masses = masses

    @classmethod
    def grid (cls, weights):
        return cls(GRID, None, weights)

    @classmethod
    def atomic (cls, angles, masses):
        return cls(ATOMIC, angles, masses)

    def is_grid (self):
        return self.kind == GRID

    def is_atomic (self):
        return self.kind == ATOMIC

    @property
    def n_grid (self):
        return self.masses.size if self.kind == GRID else None

    @property
    def weights (self):
        return self.masses

    # Grid masses divided by the cell width.
    def density (self):
        if self.kind != GRID:
            raise MeasureError("an atomic measure has no density")
        return self.masses * self.masses.size / TWO_PI

    # Atoms with positive mass.
    def to_atoms (self):
        keep = self.masses > 0.0
        return self.angles[keep], self.masses[keep]

    # (1 - t) self + t other, for measures on the same grid.
    def mix (self, other, t):
        ensure_same_grid(self, other)
        weights = (1.0 - t) * self.masses + t * other.masses
        return CircleMeasure.grid(weights / weights.sum())

    def integrate (self, values):
        values = np.asarray(values, dtype=float)
        if values.shape != self.masses.shape:
            raise DimensionError("integrand does not match the measure")
        return float(np.dot(values, self.masses))

    def __repr__ (self):
        if self.kind == GRID:
            return 'CircleMeasure(grid, n_grid=' + str(self.n_grid) + ')'
        return 'CircleMeasure(atomic, atoms=' + str(self.masses.size) + ')'

#-----------------------------------------------------------------------

def ensure_grid (mu):
    if not mu.is_grid():
        raise DimensionError("a grid measure is required")
    return mu

def ensure_same_grid (mu, nu):
    ensure_grid(mu)
    ensure_grid(nu)
    if mu.n_grid != nu.n_grid:
        raise DimensionError("grid sizes differ: " + str(mu.n_grid) + " vs " + str(nu.n_grid))
    return mu.n_grid

#-----------------------------------------------------------------------
# Measure Factories
#-----------------------------------------------------------------------

def uniform_measure (n_grid=DEFAULT_GRID):
    return CircleMeasure.grid(np.full(n_grid, 1.0 / n_grid))

#-----------------------------------------------------------------------

def delta_measure (angle):
    return CircleMeasure.atomic([angle], [1.0])

#-----------------------------------------------------------------------

# Density given as a callable of the angle or as grid values; it is
# normalized by the trapezoid rule.

def measure_from_density (density, n_grid=DEFAULT_GRID):
    if callable(density):
        values = np.asarray(density(grid_angles(n_grid)), dtype=float)
    else:
        values = np.asarray(density, dtype=float)
        n_grid = values.size
    if values.shape != (n_grid,):
        raise DimensionError("density values do not match the grid")
    if np.min(values) < 0.0:
        raise MeasureError("density must be nonnegative")
    return CircleMeasure.grid(values / values.sum())

#-----------------------------------------------------------------------

# (1 - c cos theta) / 2pi, the equilibrium measure of c cos theta for
# |c| <= 1.

def cosine_measure (n_grid=DEFAULT_GRID, c=1.0):
    return measure_from_density(lambda t: 1.0 - c * np.cos(t), n_grid)

#-----------------------------------------------------------------------

# Smooth random density 1 + sum_k a_k cos k theta + b_k sin k theta with
# sum |a_k| + |b_k| = amplitude < 1.

def random_trig_measure (n_grid=DEFAULT_GRID, rng=None, degree=4, amplitude=0.8):
    rng = np.random.default_rng(rng)
    a = rng.normal(size=degree)
    b = rng.normal(size=degree)
    scale = amplitude / (np.abs(a).sum() + np.abs(b).sum())
    a, b = a * scale, b * scale
    t = grid_angles(n_grid)
    k = np.arange(1, degree + 1)
    values = 1.0 + np.cos(np.outer(t, k)) @ a + np.sin(np.outer(t, k)) @ b
    return measure_from_density(values)

#-----------------------------------------------------------------------

# Equal mass atoms at the mid quantiles of mu, cut at angle 0.

def quantile_atoms (mu, n_atoms):
    angles, masses = mu.to_atoms()
    order = np.argsort(angles, kind='stable')
    angles, masses = angles[order], masses[order]
    cdf = np.cumsum(masses)
    levels = (np.arange(n_atoms) + 0.5) / n_atoms
    index = np.minimum(np.searchsorted(cdf, levels, side='left'), angles.size - 1)
    return CircleMeasure.atomic(angles[index], np.full(n_atoms, 1.0 / n_atoms))

#***********************************************************************
# Part 3: Potentials
#***********************************************************************

# Evaluate q0 + 2 Re sum_k q_k (ik)^order e^{ik theta} at arbitrary angles.

def _synthesize (q0, qk, angles, order=0):
    angles = np.asarray(angles, dtype=float)
    shape = angles.shape
    angles = angles.ravel()
    result = np.full(angles.size, q0 if order == 0 else 0.0)
    if qk.size > 0:
        k = np.arange(1, qk.size + 1)
        coefficients = qk * (1j * k) ** order
        for start in range(0, angles.size, SYNTHESIS_BLOCK):
            block = angles[start:start + SYNTHESIS_BLOCK]
            phases = np.exp(1j * np.outer(block, k))
            result[start:start + SYNTHESIS_BLOCK] += 2.0 * np.real(phases @ coefficients)
    return result.reshape(shape)

#-----------------------------------------------------------------------

# Fast synthesis on the uniform grid when K < n/2.

def fourier_grid_values (q0, qk, n_grid):
    if 2 * qk.size >= n_grid:
        return _synthesize(q0, qk, grid_angles(n_grid))
    spectrum = np.zeros(n_grid // 2 + 1, dtype=complex)
    spectrum[0] = q0
    spectrum[1:qk.size + 1] = qk
    return n_grid * np.fft.irfft(spectrum, n_grid)

#-----------------------------------------------------------------------

# Exact off grid evaluation of a linear combination of potentials.

class _Combination:

    def __init__ (self, terms, constant=0.0):
        self.terms = terms
        self.constant = constant

    def __call__ (self, angles):
        result = np.full(np.shape(angles), self.constant, dtype=float)
        for coefficient, potential in self.terms:
            result = result + coefficient * potential.evaluate(angles)
        return result

#-----------------------------------------------------------------------

# The confining function Q. grid_values hold Q(theta_j); (q0, qk) are the
# truncated Fourier coefficients and truncation_error is the largest
# deviation of the reconstruction from grid_values. An optional evaluator
# gives exact values off the grid (used by inf convolutions); without one
# the Fourier series is used.

class Potential:

    def __init__ (self, grid_values, q0, qk, truncation_error=0.0, evaluator=None):
        grid_values = np.array(grid_values, dtype=float)
        if grid_values.ndim != 1 or grid_values.size == 0:
            raise ParameterError("grid values must be a non empty vector")
        if not np.all(np.isfinite(grid_values)):
            raise ParameterError("grid values must be finite")
        qk = np.array(qk, dtype=complex).ravel()
        grid_values.setflags(write=False)
        qk.setflags(write=False)
        self.grid_values = grid_values
        self.q0 = float(q0)
        self.qk = qk
        self.truncation_error = float(truncation_error)
        self.evaluator = evaluator

    #-------------------------------------------------------------------
    # Constructors
    #-------------------------------------------------------------------

    @classmethod
    def from_fourier (cls, q0, qk, n_grid=DEFAULT_GRID):
        qk = np.array(qk, dtype=complex).ravel()
        return cls(fourier_grid_values(float(q0), qk, n_grid), q0, qk)

    # Q = constant + sum_k cos_k cos k theta + sin_k sin k theta.

    @classmethod
    def from_modes (cls, n_grid=DEFAULT_GRID, cos=(), sin=(), constant=0.0):
        K = max(len(cos), len(sin))
        a = np.zeros(K)
        b = np.zeros(K)
        a[:len(cos)] = cos
        b[:len(sin)] = sin
        return cls.from_fourier(constant, (a - 1j * b) / 2.0, n_grid)

    @classmethod
    def cosine (cls, c, n_grid=DEFAULT_GRID, k=1):
        coefficients = np.zeros(k)
        coefficients[k - 1] = c
        return cls.from_modes(n_grid, cos=coefficients)

    @classmethod
    def zero (cls, n_grid=DEFAULT_GRID):
        return cls(np.zeros(n_grid), 0.0, [])

    @classmethod
    def from_grid (cls, values, K=None, evaluator=None):
        values = np.asarray(values, dtype=float)
        n_grid = values.size
        if K is None:
            K = (n_grid - 1) // 2
        K = min(K, (n_grid - 1) // 2)
        c = np.fft.fft(values) / n_grid
        q0 = float(np.real(c[0]))
        qk = c[1:K + 1]
        error = float(np.max(np.abs(fourier_grid_values(q0, qk, n_grid) - values)))
        return cls(values, q0, qk, truncation_error=error, evaluator=evaluator)

    @classmethod
    def from_function (cls, fn, n_grid=DEFAULT_GRID, K=None):
        return cls.from_grid(fn(grid_angles(n_grid)), K)

    #-------------------------------------------------------------------
    # Accessors
    #-------------------------------------------------------------------

    @property
    def n_grid (self):
        return self.grid_values.size

    @property
    def K (self):
        return self.qk.size

    def angles (self):
        return grid_angles(self.n_grid)

    def is_zero (self):
        return (not np.any(self.grid_values)) and self.q0 == 0.0 and not np.any(self.qk)

    #-------------------------------------------------------------------
    # Evaluation
    #-------------------------------------------------------------------

    def evaluate (self, angles):
        if self.evaluator is not None:
            return np.asarray(self.evaluator(angles), dtype=float)
        return _synthesize(self.q0, self.qk, angles)

    __call__ = evaluate

    def fourier_values (self, angles):
        return _synthesize(self.q0, self.qk, angles)

    def derivative (self, angles):
        return _synthesize(self.q0, self.qk, angles, order=1)

    def second_derivative (self, angles):
        return _synthesize(self.q0, self.qk, angles, order=2)

    #-------------------------------------------------------------------
    # Arithmetic
    #-------------------------------------------------------------------

    def _combine (self, other, sign):
        if isinstance(other, Potential):
            if other.n_grid != self.n_grid:
                raise DimensionError("potentials live on different grids")
            K = max(self.K, other.K)
            qk = np.zeros(K, dtype=complex)
            qk[:self.K] += self.qk
            qk[:other.K] += sign * other.qk
            evaluator = None
            if self.evaluator is not None or other.evaluator is not None:
                evaluator = _Combination([(1.0, self), (sign, other)])
            return Potential(self.grid_values + sign * other.grid_values,
                             self.q0 + sign * other.q0, qk,
                             self.truncation_error + other.truncation_error, evaluator)
        c = sign * float(other)
        evaluator = None
        if self.evaluator is not None:
            evaluator = _Combination([(1.0, self)], c)
        return Potential(self.grid_values + c, self.q0 + c, self.qk,
                         self.truncation_error, evaluator)

    def __add__ (self, other):
        return self._combine(other, 1.0)

    __radd__ = __add__

    def __sub__ (self, other):
        return self._combine(other, -1.0)

    def __rsub__ (self, other):
        return (-self) + other

    def __mul__ (self, c):
        c = float(c)
        evaluator = None
        if self.evaluator is not None:
            evaluator = _Combination([(c, self)])
        return Potential(c * self.grid_values, c * self.q0, c * self.qk,
                         abs(c) * self.truncation_error, evaluator)

    __rmul__ = __mul__

    def __neg__ (self):
        return self * -1.0

    #-------------------------------------------------------------------

    # Stable identity of the potential, used as the equilibrium cache key.

    def fingerprint (self):
        digest = hashlib.sha1()
        digest.update(str(self.n_grid).encode())
        digest.update(np.ascontiguousarray(self.grid_values).tobytes())
        digest.update(np.float64(self.q0).tobytes())
        digest.update(np.ascontiguousarray(self.qk).tobytes())
        return digest.hexdigest()

    def __repr__ (self):
        return 'Potential(n_grid=' + str(self.n_grid) + ', K=' + str(self.K) + ')'

#***********************************************************************
# Part 4: Fourier Coefficients and Logarithmic Energy
#***********************************************************************

# mu_k for k = 1..K. On a grid the coefficients are periodic in k with
# period n_grid.

def fourier_coefficients (mu, K):
    if K < 1:
        raise ParameterError("K must be positive")
    k = np.arange(1, K + 1)
    if mu.is_grid():
        spectrum = np.fft.fft(mu.masses)
        return spectrum[k % mu.n_grid]
    return np.exp(-1j * np.outer(k, mu.angles)) @ mu.masses

#-----------------------------------------------------------------------

def default_modes (mu):
    return max(mu.n_grid // 2, 1)

#-----------------------------------------------------------------------

# Sigma(mu) = - sum_{k<=K} |mu_k|^2 / k, with K = n_grid/2 by default.
# Atomic measures have Sigma = -inf.

def log_energy (mu, K=None):
    if mu.is_atomic():
        logger.debug("log energy of an atomic measure is -inf")
        return MINUS_INF
    K = default_modes(mu) if K is None else K
    coefficients = fourier_coefficients(mu, K)
    k = np.arange(1, K + 1)
    return ExtendedReal(-math.fsum(np.abs(coefficients) ** 2 / k))

#-----------------------------------------------------------------------

# Contribution of the upper half of the retained modes. Not a bound on
# the truncation error; a large value means K is too small.

def log_energy_upper_modes (mu, K=None):
    K = default_modes(ensure_grid(mu)) if K is None else K
    coefficients = fourier_coefficients(mu, K)
    k = np.arange(1, K + 1)
    upper = k > K // 2
    return float(np.sum(np.abs(coefficients[upper]) ** 2 / k[upper]))

#-----------------------------------------------------------------------

# L_jl = log|e^{i theta_j} - e^{i theta_l}|. The diagonal entry -log n
# makes the punctured trapezoid rule exact on constants.

def log_kernel_matrix (n_grid):
    t = grid_angles(n_grid)
    with np.errstate(divide='ignore'):
        kernel = np.log(np.abs(2.0 * np.sin((t[:, None] - t[None, :]) / 2.0)))
    np.fill_diagonal(kernel, -math.log(n_grid))
    return kernel

#-----------------------------------------------------------------------

# Direct double sum quadrature of Sigma(mu).

def log_energy_quadrature (mu):
    w = ensure_grid(mu).masses
    return float(w @ log_kernel_matrix(mu.n_grid) @ w)

#***********************************************************************
# Part 5: Relative Entropy
#***********************************************************************

# Match the atoms of mu with those of nu; +inf when some atom of mu is
# not an atom of nu.

def _atomic_relative_entropy (mu, nu):
    terms = []
    for angle, mass in zip(mu.angles, mu.masses):
        if mass <= TOL_MASS:
            continue
        same = angular_distance(nu.angles, angle) <= ATOM_TOLERANCE
        reference = float(nu.masses[same].sum())
        if reference <= 0.0:
            return PLUS_INF
        terms.append(mass * math.log(mass / reference))
    return ExtendedReal(math.fsum(terms))

#-----------------------------------------------------------------------

# S(mu, nu) = sum_j mu_j log(mu_j / nu_j), with 0 log 0 = 0 and +inf
# when mu is not absolutely continuous with respect to nu.

def relative_entropy (mu, nu):
    if mu.is_atomic() and nu.is_grid():
        return PLUS_INF
    if mu.is_atomic() and nu.is_atomic():
        return _atomic_relative_entropy(mu, nu)
    if nu.is_atomic():
        raise DimensionError("a grid measure has no common grid with an atomic one")
    ensure_same_grid(mu, nu)
    p, q = mu.masses, nu.masses
    if np.any((q == 0.0) & (p > TOL_MASS)):
        return PLUS_INF
    keep = (p > 0.0) & (q > 0.0)
    return ExtendedReal(math.fsum(p[keep] * np.log(p[keep] / q[keep])))

#-----------------------------------------------------------------------

def _grid_function (f, n_grid):
    values = f.grid_values if isinstance(f, Potential) else np.asarray(f, dtype=float)
    if values.shape != (n_grid,):
        raise DimensionError("grid function does not match the grid")
    if not np.all(np.isfinite(values)):
        raise ParameterError("grid function must be finite")
    return values

#-----------------------------------------------------------------------

# int f dmu - log int e^f dnu, a lower bound of S(mu, nu) with equality at
# f = log(dmu/dnu).

def entropy_dual_value (mu, nu, f):
    n_grid = ensure_same_grid(mu, nu)
    values = _grid_function(f, n_grid)
    return float(np.dot(values, mu.masses) - logsumexp(values, b=nu.masses))

#***********************************************************************
# Part 6: Convexity Parameter
#***********************************************************************

@dataclass
class ConvexityParameter:
    rho: float
    admissible: bool = field(init=False)

    def __post_init__ (self):
        self.rho = float(self.rho)
        self.admissible = self.rho > -0.5

    def to_dict (self):
        return {'rho': self.rho, 'admissible': self.admissible}

#-----------------------------------------------------------------------

# rho = min_t Q''(t), the largest rho with Q(e^{it}) - rho t^2 / 2 convex.
# Q'' has zero mean over a period, so rho <= 0 for every potential.

def measured_rho (Q, resolution=None):
    if Q.K == 0:
        return ConvexityParameter(0.0)
    resolution = resolution or max(MIN_RHO_RESOLUTION, 32 * Q.K)
    t = TWO_PI * np.arange(resolution) / resolution
    values = Q.second_derivative(t)
    i = int(np.argmin(values))
    h = TWO_PI / resolution
    fn = lambda s: float(Q.second_derivative(np.array([s]))[0])
    polished = minimize_scalar(fn, bounds=(t[i] - h, t[i] + h), method='bounded',
                               options={'xatol': 1e-12})
    rho = min(float(values[i]), float(polished.fun))
    return ConvexityParameter(rho + 0.0)

#***********************************************************************
# Part 7: Serialization
#***********************************************************************

# JSON layout {"kind": "grid"|"atomic", "angles": [...], "values": [...]}.

def measure_to_dict (mu):
    return {'kind': mu.kind,
            'angles': [float(x) for x in mu.angles],
            'values': [float(x) for x in mu.masses]}

#-----------------------------------------------------------------------

def _uniform_grid_p (angles):
    angles = np.asarray(angles, dtype=float)
    return angles.size > 0 and np.allclose(angles, grid_angles(angles.size), rtol=0.0, atol=1e-9)

#-----------------------------------------------------------------------

def measure_from_dict (data):
    kind = data.get('kind', GRID)
    angles = np.asarray(data['angles'], dtype=float)
    values = np.asarray(data['values'], dtype=float)
    if kind == GRID:
        if not _uniform_grid_p(angles) or angles.size != values.size:
            raise MeasureError("grid measure angles are not the uniform grid")
        return CircleMeasure.grid(values)
    return CircleMeasure.atomic(angles, values)

#-----------------------------------------------------------------------

def potential_to_dict (Q):
    return {'kind': GRID,
            'angles': [float(x) for x in Q.angles()],
            'values': [float(x) for x in Q.grid_values],
            'fourier': {'q0': Q.q0,
                        're': [float(x) for x in np.real(Q.qk)],
                        'im': [float(x) for x in np.imag(Q.qk)]}}

#-----------------------------------------------------------------------

def potential_from_dict (data):
    angles = np.asarray(data['angles'], dtype=float)
    values = np.asarray(data['values'], dtype=float)
    if not _uniform_grid_p(angles) or angles.size != values.size:
        raise ParameterError("potential angles are not the uniform grid")
    if 'fourier' in data:
        fourier = data['fourier']
        qk = np.asarray(fourier['re'], dtype=float) + 1j * np.asarray(fourier['im'], dtype=float)
        return Potential.from_fourier(fourier['q0'], qk, values.size)
    return Potential.from_grid(values)

#-----------------------------------------------------------------------
# Files
#-----------------------------------------------------------------------

# CSV layout: column 1 angle in radians, column 2 value.

def _write_table (angles, values, pathname):
    df = pd.DataFrame({'angle': angles, 'value': values})
    df.to_csv(pathname, index=False, float_format='%.17g')
    return pathname

def _read_table (pathname):
    df = pd.read_csv(pathname)
    if list(df.columns[:2]) != ['angle', 'value']:
        df.columns = ['angle', 'value'] + list(df.columns[2:])
    return df['angle'].to_numpy(dtype=float), df['value'].to_numpy(dtype=float)

#-----------------------------------------------------------------------

def save_measure (mu, pathname):
    if pathname.endswith('.csv'):
        return _write_table(mu.angles, mu.masses, pathname)
    with open(pathname, 'w') as f:
        json.dump(measure_to_dict(mu), f)
    return pathname

#-----------------------------------------------------------------------

# A CSV whose angles form the uniform grid is read as a grid measure,
# anything else as atoms.

def load_measure (pathname):
    if pathname.endswith('.csv'):
        angles, values = _read_table(pathname)
        kind = GRID if _uniform_grid_p(angles) else ATOMIC
        return measure_from_dict({'kind': kind, 'angles': angles, 'values': values})
    with open(pathname) as f:
        return measure_from_dict(json.load(f))

#-----------------------------------------------------------------------

def save_potential (Q, pathname):
    if pathname.endswith('.csv'):
        return _write_table(Q.angles(), Q.grid_values, pathname)
    with open(pathname, 'w') as f:
        json.dump(potential_to_dict(Q), f)
    return pathname

#-----------------------------------------------------------------------

def load_potential (pathname):
    if pathname.endswith('.csv'):
        angles, values = _read_table(pathname)
        return potential_from_dict({'angles': angles, 'values': values})
    with open(pathname) as f:
        return potential_from_dict(json.load(f))

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
