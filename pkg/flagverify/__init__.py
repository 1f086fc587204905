"""The operators k_omega, x_r^{+-} on theta_w and the checks of the U_q(g; S) relations."""

from .context import FlagContext, FlagVerificationError, build_context, context_from_config
from .operators import KOperator, XOperator, epsilon_fit, k_general, k4_minus, x_operator
from .runner import run_case, run_catalog, run_suite

__all__ = [
    "FlagContext",
    "FlagVerificationError",
    "build_context",
    "context_from_config",
    "KOperator",
    "XOperator",
    "epsilon_fit",
    "k_general",
    "k4_minus",
    "x_operator",
    "run_case",
    "run_catalog",
    "run_suite",
]
