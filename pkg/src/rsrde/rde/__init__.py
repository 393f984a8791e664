"""Rate-distortion exponent of the error-pattern source."""

from .arimoto import (
    ArimotoConvergenceError,
    RdeParams,
    RdePoint,
    arimoto_rde_single,
    arimoto_step,
    factored_rde,
)
from .binary import (
    AnalyticCase,
    analytic_mbm1,
    binary_entropy,
    closed_form_rde,
    g_inverse,
    h_inverse,
    kl_binary,
    max_exponent,
    min_rate_for_exponent,
    rate_frontier,
)
from .distortion import distortion, mbm_distortion
from .solve import (
    InfeasibleTarget,
    blahut_rd,
    blahut_rd_at_rate,
    rde_surface,
    solve_st,
    write_surface_csv,
)

__all__ = [
    "AnalyticCase", "ArimotoConvergenceError", "InfeasibleTarget", "RdeParams", "RdePoint",
    "analytic_mbm1", "arimoto_rde_single", "arimoto_step", "binary_entropy", "blahut_rd",
    "blahut_rd_at_rate", "closed_form_rde", "distortion", "factored_rde", "g_inverse",
    "h_inverse", "kl_binary", "max_exponent", "mbm_distortion", "min_rate_for_exponent",
    "rate_frontier", "rde_surface", "solve_st", "write_surface_csv",
]
