"""Bipartite entanglement toolkit.

Pure-state LOCC convertibility (majorization, catalysis, stochastic and
multi-copy conversion), entanglement measures, partial-transpose tests,
concentration/dilution/teleportation protocols and a property harness for
the thermodynamic-style ordering axioms.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapExceeded,
    ChannelError,
    DimensionMismatch,
    EntanglementError,
    InvariantViolation,
    KindMismatch,
    MixedStateError,
    RankMismatch,
    SeparableInput,
)
from .schmidt import SchmidtVector, entropy_of, osc, power_osc, schmidt_decompose, tensor_osc  # noqa: E402
from .states import (  # noqa: E402
    DensityMatrix,
    KrausChannel,
    PureState,
    bell_state,
    max_entangled,
    partial_trace,
    partial_transpose,
    singlet,
    werner_antisym,
)
from .convert import (  # noqa: E402
    asymptotic_probe,
    catalytic_convertible,
    common_source_sink,
    deterministic_rate_bounds,
    find_catalyst,
    nielsen_convertible,
    stochastic_probability,
)
from .measures import eof_mixed, entropy_of_entanglement, relative_entropy_of_entanglement  # noqa: E402
from .ppt import ppt_report  # noqa: E402

__all__ = [
    "CapExceeded", "ChannelError", "DimensionMismatch", "EntanglementError", "InvariantViolation",
    "KindMismatch", "MixedStateError", "RankMismatch", "SeparableInput",
    "SchmidtVector", "entropy_of", "osc", "power_osc", "schmidt_decompose", "tensor_osc",
    "DensityMatrix", "KrausChannel", "PureState", "bell_state", "max_entangled", "partial_trace",
    "partial_transpose", "singlet", "werner_antisym",
    "asymptotic_probe", "catalytic_convertible", "common_source_sink", "deterministic_rate_bounds",
    "find_catalyst", "nielsen_convertible", "stochastic_probability",
    "eof_mixed", "entropy_of_entanglement", "relative_entropy_of_entanglement", "ppt_report",
]
