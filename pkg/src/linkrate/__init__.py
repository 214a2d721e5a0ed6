"""Entropy rate of connection-state messages in a dynamic linear network.

Links between neighbouring nodes are i.i.d. two-state Markov chains.  The
number of open links a node believes extend to its right forms a hidden
Markov process whose entropy rate is the minimal overhead per time step.
"""
__version__ = "0.1.0"

from .errors import (CapacityError, ConsistencyError, InsufficientDataError,
                     NumericalInstabilityError, ParameterError)
from .link import (JStepKernel, LinkParams, StationaryLaw, binary_entropy, jstep,
                   jstep_by_matrix_power, jstep_entropy_rate, link_entropy, stationary,
                   step_information)
from .overhead import (BoundsSequence, ConvergenceFit, RateEstimate, RjTable, bounds,
                       convergence_fit, entropy_rate, rj, rj_closed_form, rj_m, rj_table)
from .simulate import (MTrace, SimConfig, empirical_pj, plugin_conditional_entropy,
                       simulate_m_trace, simulate_spacetime)

__all__ = [
    "BoundsSequence", "CapacityError", "ConsistencyError", "ConvergenceFit", "InsufficientDataError",
    "JStepKernel", "LinkParams", "MTrace", "NumericalInstabilityError", "ParameterError",
    "RateEstimate", "RjTable", "SimConfig", "StationaryLaw", "binary_entropy", "bounds",
    "convergence_fit", "empirical_pj", "entropy_rate", "jstep", "jstep_by_matrix_power",
    "jstep_entropy_rate", "link_entropy", "plugin_conditional_entropy", "rj", "rj_closed_form",
    "rj_m", "rj_table", "simulate_m_trace", "simulate_spacetime", "stationary", "step_information",
]
