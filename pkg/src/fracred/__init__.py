"""Exact complex-order fractional models of mass-spring-damper chains.

Reduce integer-order chains to fractional SDOF/NDOF models whose transfer
functions match at chosen DOFs, or identify such models from Bode data.
"""

from .chain import (
    ChainModel,
    StateSpace,
    assemble_state_space,
    build_chain,
    frequency_response,
    integer_tf,
    natural_frequencies,
)
from .estimators import FNDOFIdentifier, FSDOFIdentifier
from .exceptions import *  # noqa: F401,F403
from .fractional import (
    FractionalNDOF,
    FractionalSDOF,
    PolarResponse,
    fndof_tf,
    fsdof_response,
    gamma,
    steady_state,
    tau_xi,
)
from .numerics import NewtonConfig, lu_solve, newton_solve, principal_log
from .oracle import analytic_sdof_steady, fit_sine, integrate_chain, steady_response
from .reduction import (
    LumpedParameters,
    ReductionResult,
    alpha_imdof_to_fsdof,
    alpha_isdof,
    lump_parameters,
    reduce_to_fndof,
    sweep_fsdof,
)
from .svg import Axes, emit_svg
from .sysid import (
    BodeDataset,
    IdentifiedModel,
    fit_integer_peak,
    identify_alpha_sdof,
    identify_fndof,
    identify_fsdof,
    tau_xi_from_bode,
)

__version__ = "0.1.0"
