#***********************************************************************
# Miscellaneous Utility Functions
#***********************************************************************
#
# Part 1: Project directory and pathnames
# Part 2: Angles and grids on the circle
# Part 3: Random streams
# Part 4: PMAP
#
#***********************************************************************

# Python Imports
import os
from multiprocessing import Pool

# Data science imports
import numpy as np

#***********************************************************************
# Part 1: Project Directory and Pathnames
#***********************************************************************

# The environment variable 'FREETCI_DIR' may name the project root
# directory. When it is not set the directory holding this package is
# used, so nothing has to be configured to run the lab.

def get_freetci_dir():
    try:
        return os.environ['FREETCI_DIR']
    except KeyError:
        return os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

#-----------------------------------------------------------------------

FREETCI_DIR = get_freetci_dir()

#-----------------------------------------------------------------------

# Directory holding the bundled scenario files.

def make_scenario_pathname (filename):
    return os.path.join(FREETCI_DIR, 'scenarios', filename)

#-----------------------------------------------------------------------

def ensure_directory (pathname):
    directory = os.path.dirname(os.path.abspath(pathname))
    os.makedirs(directory, exist_ok=True)
    return pathname

#***********************************************************************
# Part 2: Angles and Grids
#***********************************************************************

TWO_PI = 2.0 * np.pi

#-----------------------------------------------------------------------

# Uniform grid theta_j = 2 pi j / n.

def grid_angles (n_grid):
    return TWO_PI * np.arange(n_grid) / n_grid

#-----------------------------------------------------------------------

# Wrap into [0, 2pi). The modulo can round up to exactly 2pi for tiny
# negative inputs, which is folded back to 0.

def wrap_positive (angles):
    wrapped = np.mod(angles, TWO_PI)
    return np.where(wrapped >= TWO_PI, 0.0, wrapped)

#-----------------------------------------------------------------------

# Wrap into (-pi, pi].

def wrap_symmetric (angles):
    wrapped = np.pi - np.mod(np.pi - np.asarray(angles, dtype=float), TWO_PI)
    return wrapped

#-----------------------------------------------------------------------

# Geodesic (angular) distance on the unit circle.

def angular_distance (a, b):
    delta = np.abs(np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI))
    return np.minimum(delta, TWO_PI - delta)

#***********************************************************************
# Part 3: Random Streams
#***********************************************************************

def make_rng (seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)

#-----------------------------------------------------------------------

# Independent integer seeds for k parallel streams derived from one seed.
# The result only depends on (seed, k).

def spawn_seeds (seed, k):
    children = np.random.SeedSequence(seed).spawn(k)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]

#***********************************************************************
# Part 4: PMAP
#***********************************************************************

# Map fn over entries in a process pool. The result list is in the order
# of entries whatever the completion order. With one worker everything
# runs in this process.

def pmap (fn, entries, workers=1):
    entries = list(entries)
    if workers is None or workers <= 1 or len(entries) <= 1:
        return [fn(entry) for entry in entries]
    with Pool(min(workers, len(entries))) as p:
        return p.map(fn, entries)

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
