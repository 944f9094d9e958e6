#***********************************************************************
# Errors
#***********************************************************************
#
# Every failure raised on purpose by the lab derives from FreeTciError so
# that the command line can map it to an exit code in one place.
#
#***********************************************************************

#-----------------------------------------------------------------------
# Base Class
#-----------------------------------------------------------------------

class FreeTciError(Exception):
    pass

#-----------------------------------------------------------------------
# Input Errors
#-----------------------------------------------------------------------

# Invalid probability measure: negative mass, total mass away from one,
# non finite values or angles outside [0, 2pi).

class MeasureError(FreeTciError):
    pass

#-----------------------------------------------------------------------

# Two objects that should live on the same grid (or have the same size)
# do not.

class DimensionError(FreeTciError):
    pass

#-----------------------------------------------------------------------

# Parameters outside the domain of a formula, e.g. S_k past the diameter
# bound pi/sqrt(k).

class DomainError(FreeTciError):
    pass

#-----------------------------------------------------------------------

class ParameterError(FreeTciError):
    pass

#-----------------------------------------------------------------------

class GasStateError(FreeTciError):
    pass

#-----------------------------------------------------------------------

class ScenarioError(FreeTciError):
    pass

#-----------------------------------------------------------------------
# Numerical Failures
#-----------------------------------------------------------------------

class SolverError(FreeTciError):

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap

#-----------------------------------------------------------------------

# Raised on the cut locus: a geodesic between antipodal points of the
# circle, or a minimizing logarithm on SU(N) that is not unique.

class AmbiguityError(FreeTciError):

    def __init__(self, message, candidates=None):
        super().__init__(message)
        self.candidates = candidates if candidates is not None else []

#-----------------------------------------------------------------------

# A theorem was invoked outside of its hypothesis (for instance a
# convexity constant rho <= -1/2).

class HypothesisError(FreeTciError):
    pass

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
