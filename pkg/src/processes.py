#********************************************************************
# MULTIPROCESSING MODULE
#
#********************************************************************

# Pool workers live in their own module so that the pool can pickle
# them by name.

import src.harness as hs
from src.transport import tci_check
from src.errors import HypothesisError

#------------------------------------------------------------------------

# One case of a TCI scenario matrix: (scenario, seed, case, case_seed).

def tci_worker (entry):
    scenario, seed, case, case_seed = entry
    Q = hs.potential_from_spec(scenario.q_spec, scenario.grid)
    mu = hs.measure_from_spec(scenario.mu_spec, Q, case_seed)
    tolerance = scenario.tolerance('tci')
    row = {'scenario': scenario.name, 'seed': seed, 'case': case, 'case_seed': case_seed}
    try:
        verdict = tci_check(Q, mu, tolerance=tolerance)
    except HypothesisError as e:
        row.update({'holds': False, 'error': str(e)})
        return row
    row.update(verdict.to_dict())
    return row

#------------------------------------------------------------------------------
# End of File
#------------------------------------------------------------------------------
