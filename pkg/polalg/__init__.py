"""Pol(G_q), truncated Fock tensor operators and the representations theta_w."""

from .polgq import PolElement, PolSizeError, PolWeightError, act_left, act_right
from .soibelman import theta_w, theta_wz
from .tensorop import SafeBlock, TensorOp, TruncationError

__all__ = [
    "PolElement",
    "PolSizeError",
    "PolWeightError",
    "act_left",
    "act_right",
    "theta_w",
    "theta_wz",
    "SafeBlock",
    "TensorOp",
    "TruncationError",
]
