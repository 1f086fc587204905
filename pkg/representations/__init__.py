"""Type I modules of U_q(g) and R-matrices acting on their tensor products."""

from .repmod import Module, ModuleConstructionError, build_irrep, conjugate_module, tensor
from .rmatrix import RAction, RMatrixError, r_action

__all__ = [
    "Module",
    "ModuleConstructionError",
    "build_irrep",
    "conjugate_module",
    "tensor",
    "RAction",
    "RMatrixError",
    "r_action",
]
