#***********************************************************************
# Coulomb Gas on SU(N)
#***********************************************************************
#
# Part 1: Gas states and the log weight
# Part 2: Metropolis chain
# Part 3: Empirical measures and the N = 2 gap test
# Part 4: Free pressure by thermodynamic integration
#
# The eigenangles of exp(-N Tr Q(U)) dU on SU(N) have the density
#
#   exp(2 sum_{i<j} log|e^{i t_i} - e^{i t_j}| - N sum_j Q(t_j))
#
# on the torus subject to sum_j t_j = 0 mod 2pi.
#
#***********************************************************************

# Python Imports
import math
import logging
from dataclasses import dataclass, asdict, field, replace

# Data science imports
import numpy as np
import pandas as pd
from scipy.integrate import simpson
from scipy.stats import chisquare

# Project Imports
from src.circle_core import CircleMeasure
from src.errors import GasStateError
from src.errors import ParameterError
from src.utils import TWO_PI
from src.utils import ensure_directory
from src.utils import make_rng
from src.utils import pmap
from src.utils import spawn_seeds
from src.utils import wrap_positive
from src.utils import wrap_symmetric

logger = logging.getLogger(__name__)

#-----------------------------------------------------------------------
# Parameters
#-----------------------------------------------------------------------

CONSTRAINT_TOLERANCE = 1e-12

# Acceptance rates outside this range after burn in are reported.
ACCEPTANCE_RANGE = (0.05, 0.95)

# Batches for batch means standard errors.
BATCHES = 10

DEFAULT_S_GRID = 11

# Log progress every this many samples.
PROGRESS_INTERVAL = 10000

#***********************************************************************
# Part 1: Gas States
#***********************************************************************

def _constraint_defect (angles):
    total = math.fsum(angles)
    return abs(total - TWO_PI * round(total / TWO_PI))

#-----------------------------------------------------------------------

# Spread the rounding drift of the angle sum over all angles.

def _reproject (t):
    total = math.fsum(t)
    defect = total - TWO_PI * round(total / TWO_PI)
    if abs(defect) > 1e-14:
        t -= defect / t.size
    return t

#-----------------------------------------------------------------------

class GasState:

    def __init__ (self, N, angles):
        angles = np.array(angles, dtype=float)
        if N < 2 or angles.shape != (N,):
            raise GasStateError("a gas state needs N >= 2 angles")
        if _constraint_defect(angles) > CONSTRAINT_TOLERANCE * max(1.0, N):
            raise GasStateError("angles do not sum to 0 mod 2pi: defect "
                                + repr(_constraint_defect(angles)))
        angles = wrap_symmetric(angles)
        angles.setflags(write=False)
        self.N = N
        self.angles = angles

    # Equally spaced angles 2 pi (j - (N - 1)/2) / N, the maximum of the
    # Vandermonde factor.

    @classmethod
    def equally_spaced (cls, N):
        return cls(N, TWO_PI * (np.arange(N) - 0.5 * (N - 1)) / N)

    def __repr__ (self):
        return 'GasState(N=' + str(self.N) + ')'

#-----------------------------------------------------------------------

# log|e^{ia} - e^{ib}| = log|2 sin((a - b)/2)|, -inf when a = b.

def _log_chord (delta):
    with np.errstate(divide='ignore'):
        return np.log(np.abs(2.0 * np.sin(0.5 * np.asarray(delta, dtype=float))))

#-----------------------------------------------------------------------

def _potential_values (Q, angles):
    return np.asarray(Q.evaluate(np.asarray(angles, dtype=float)), dtype=float)

#-----------------------------------------------------------------------

def log_weight (s, Q):
    if not isinstance(s, GasState):
        raise GasStateError("log_weight needs a GasState")
    t = s.angles
    i, j = np.triu_indices(s.N, k=1)
    interaction = float(np.sum(_log_chord(t[i] - t[j])))
    if interaction == -math.inf:
        return -math.inf
    return 2.0 * interaction - s.N * float(np.sum(_potential_values(Q, t)))

#***********************************************************************
# Part 2: Metropolis Chain
#***********************************************************************

@dataclass
class ChainConfig:
    steps: int
    burn_in: int
    thin: int = 1
    proposal_width: float = 0.5
    seed: int = 0

    def __post_init__ (self):
        if self.steps <= 0 or self.thin <= 0 or self.burn_in < 0:
            raise ParameterError("steps and thin must be positive, burn_in nonnegative")
        if self.burn_in >= self.steps:
            raise ParameterError("burn_in must be smaller than steps")
        if self.proposal_width <= 0.0:
            raise ParameterError("proposal width must be positive")

    def to_dict (self):
        return asdict(self)

#-----------------------------------------------------------------------

def metropolis_acceptance (log_w_old, log_w_new):
    if log_w_new == -math.inf:
        return 0.0
    if log_w_old == -math.inf or log_w_new >= log_w_old:
        return 1.0
    return math.exp(log_w_new - log_w_old)

#-----------------------------------------------------------------------

# Pairwise move t_i += e, t_j -= e, which keeps the sum of the angles.
# The chain yields a GasState every thin steps after burn in.

class CoulombGasChain:

    def __init__ (self, Q, N, config, initial=None):
        self.Q = Q
        self.N = N
        self.config = config
        self.initial = initial if initial is not None else GasState.equally_spaced(N)
        if self.initial.N != N:
            raise GasStateError("initial state has the wrong N")
        self.proposed = 0
        self.accepted = 0
        self.trace = []

    @property
    def acceptance_rate (self):
        return self.accepted / self.proposed if self.proposed else 0.0

    # Log weight terms that involve angle i or angle j.

    def _local_weight (self, t, i, j):
        others = np.ones(self.N, dtype=bool)
        others[[i, j]] = False
        rest = t[others]
        interaction = np.sum(_log_chord(t[i] - rest)) + np.sum(_log_chord(t[j] - rest))
        interaction += _log_chord(t[i] - t[j])
        if interaction == -math.inf:
            return -math.inf
        return 2.0 * float(interaction) - self.N * float(np.sum(_potential_values(self.Q, [t[i], t[j]])))

    def __iter__ (self):
        cfg = self.config
        rng = make_rng(cfg.seed)
        t = np.array(self.initial.angles, dtype=float)
        current = log_weight(self.initial, self.Q)
        self.proposed = self.accepted = 0
        self.trace = []
        samples = 0
        for step in range(1, cfg.steps + 1):
            i, j = rng.choice(self.N, size=2, replace=False)
            epsilon = rng.uniform(-cfg.proposal_width, cfg.proposal_width)
            u = rng.random()
            old_local = self._local_weight(t, i, j)
            old_i, old_j = t[i], t[j]
            t[i] = wrap_symmetric(old_i + epsilon)
            t[j] = wrap_symmetric(old_j - epsilon)
            new_local = self._local_weight(t, i, j)
            if current == -math.inf:
                proposal = log_weight(GasState(self.N, t), self.Q)
            else:
                proposal = current + (new_local - old_local) if new_local != -math.inf else -math.inf
            accepted = u < metropolis_acceptance(current, proposal)
            if accepted:
                current = proposal
                _reproject(t)
            else:
                t[i], t[j] = old_i, old_j
            if step > cfg.burn_in:
                self.proposed += 1
                self.accepted += int(accepted)
                if (step - cfg.burn_in) % cfg.thin == 0:
                    state = GasState(self.N, t)
                    self.trace.append((step, state.angles, current, bool(accepted)))
                    samples += 1
                    if samples % PROGRESS_INTERVAL == 0:
                        logger.info("Gas samples: %d", samples)
                    yield state
        self._check_tuning()

    def _check_tuning (self):
        low, high = ACCEPTANCE_RANGE
        rate = self.acceptance_rate
        if not low <= rate <= high:
            logger.warning("Acceptance rate %.3f outside [%.2f, %.2f]; retune proposal_width (%g)",
                           rate, low, high, self.config.proposal_width)

    def run (self):
        return list(self)

    # CSV with columns step, angle_0 .. angle_{N-1}, log_weight, accepted.

    def write_trace (self, pathname):
        columns = ['step'] + ['angle_' + str(k) for k in range(self.N)] + ['log_weight', 'accepted']
        rows = [[step] + list(angles) + [weight, accepted]
                for step, angles, weight, accepted in self.trace]
        df = pd.DataFrame(rows, columns=columns)
        df.to_csv(ensure_directory(pathname), index=False)
        return pathname

#-----------------------------------------------------------------------

def mcmc_sample (Q, N, cfg):
    return CoulombGasChain(Q, N, cfg)

#***********************************************************************
# Part 3: Empirical Measures
#***********************************************************************

def empirical_measure (s):
    return CircleMeasure.atomic(s.angles, np.full(s.N, 1.0 / s.N))

#-----------------------------------------------------------------------

# All angles of all states binned to the nearest grid point.

def mean_empirical_measure (states, n_grid):
    angles = np.concatenate([s.angles for s in states])
    index = np.mod(np.rint(wrap_positive(angles) * n_grid / TWO_PI).astype(int), n_grid)
    counts = np.bincount(index, minlength=n_grid).astype(float)
    return CircleMeasure.grid(counts / counts.sum())

#-----------------------------------------------------------------------

@dataclass
class ChiSquareResult:
    statistic: float
    pvalue: float
    bins: int
    samples: int

    def to_dict (self):
        return asdict(self)

# For N = 2 the gap g = t_1 - t_2 in [0, 2pi) has density
# sin^2(g/2) / pi, with distribution function (g - sin g) / 2pi.

def gap_chi_square (states, bins=20):
    gaps = []
    for s in states:
        if s.N != 2:
            raise GasStateError("the gap test needs N = 2 states")
        gaps.append(s.angles[0] - s.angles[1])
    gaps = wrap_positive(np.asarray(gaps))
    edges = np.linspace(0.0, TWO_PI, bins + 1)
    observed, _ = np.histogram(gaps, bins=edges)
    cdf = (edges - np.sin(edges)) / TWO_PI
    expected = np.diff(cdf) * gaps.size
    expected *= observed.sum() / expected.sum()
    res = chisquare(observed, expected)
    return ChiSquareResult(statistic=float(res.statistic), pvalue=float(res.pvalue),
                           bins=bins, samples=int(gaps.size))

#***********************************************************************
# Part 4: Free Pressure
#***********************************************************************

@dataclass
class PressureEstimate:
    N: int
    value: float
    standard_error: float
    nodes: list = field(default_factory=list)
    means: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    seeds: list = field(default_factory=list)

    def to_dict (self):
        return asdict(self)

#-----------------------------------------------------------------------

# Mean and batch means standard error of a sample sequence.

def batch_means (values, batches=BATCHES):
    values = np.asarray(values, dtype=float)
    size = values.size // batches
    if size == 0:
        raise ParameterError("too few samples for " + str(batches) + " batches")
    means = values[:size * batches].reshape(batches, size).mean(axis=1)
    return float(values.mean()), float(means.std(ddof=1) / math.sqrt(batches))

#-----------------------------------------------------------------------

# E[N Tr f] / N^2 under the gas of potential Q - s f. One entry is
# (Q, f, s, N, config); top level so that it can cross a process pool.

def pressure_node (entry):
    Q, f, s, N, cfg = entry
    chain = CoulombGasChain(Q - f * s, N, cfg)
    values = [float(np.sum(_potential_values(f, state.angles))) / N for state in chain]
    return batch_means(values)

#-----------------------------------------------------------------------

# (1/N^2) log int exp(N Tr f) dlambda_N(Q) as the Simpson integral over
# s in [0, 1] of E_{Q - s f}[N Tr f] / N^2, one independent chain per node.

def pressure_mc (Q, f, N, cfg, s_grid=DEFAULT_S_GRID, workers=1):
    if f.is_zero():
        return PressureEstimate(N=N, value=0.0, standard_error=0.0)
    if s_grid < 3:
        raise ParameterError("s_grid needs at least 3 nodes")
    nodes = np.linspace(0.0, 1.0, s_grid)
    seeds = spawn_seeds(cfg.seed, s_grid)
    entries = [(Q, f, float(s), N, replace(cfg, seed=seed)) for s, seed in zip(nodes, seeds)]
    results = pmap(pressure_node, entries, workers)
    means = np.array([mean for mean, _ in results])
    errors = np.array([error for _, error in results])
    weights = np.array([simpson(np.eye(s_grid)[k], x=nodes) for k in range(s_grid)])
    value = float(np.dot(weights, means))
    standard_error = float(math.sqrt(np.sum((weights * errors) ** 2)))
    return PressureEstimate(N=N, value=value, standard_error=standard_error,
                            nodes=nodes.tolist(), means=means.tolist(),
                            errors=errors.tolist(), seeds=seeds)

#-----------------------------------------------------------------------

# Intercept a of the least squares fit a + b/N.

def pressure_extrapolation (Ns, values):
    Ns = np.asarray(Ns, dtype=float)
    if Ns.size < 2:
        raise ParameterError("extrapolation needs at least two values of N")
    slope, intercept = np.polyfit(1.0 / Ns, np.asarray(values, dtype=float), 1)
    return float(intercept)

#-----------------------------------------------------------------------

@dataclass
class PressurePlEstimate:
    theta: float
    pressure_f: PressureEstimate
    pressure_g: PressureEstimate
    lhs: float
    standard_error: float
    holds: bool

    def to_dict (self):
        return asdict(self)

# Monte Carlo form of (1 - theta) j(theta f) + theta j(-(1 - theta) g) <= j(0) = 0,
# accepted within 3 standard errors.

def pressure_pl_mc (Q, f, g, theta, N, cfg, s_grid=DEFAULT_S_GRID, workers=1):
    seeds = spawn_seeds(cfg.seed, 2)
    pf = pressure_mc(Q, f * theta, N, replace(cfg, seed=seeds[0]), s_grid, workers)
    pg = pressure_mc(Q, g * -(1.0 - theta), N, replace(cfg, seed=seeds[1]), s_grid, workers)
    lhs = (1.0 - theta) * pf.value + theta * pg.value
    se = math.sqrt(((1.0 - theta) * pf.standard_error) ** 2 + (theta * pg.standard_error) ** 2)
    return PressurePlEstimate(theta=theta, pressure_f=pf, pressure_g=pg, lhs=lhs,
                              standard_error=se, holds=bool(lhs <= 3.0 * se))

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
