from __future__ import annotations
from typing import List

from .. import checks
from ..context import FlagContext
from . import CheckSpec, VerificationSuite


class KOperatorSuite(VerificationSuite):
    """The diagonal operators k_omega."""

    suite_name = "koperators"

    @property
    def name(self) -> str:
        return "koperators"

    @property
    def description(self) -> str:
        return "Both constructions of k_(-4 lam), positivity, multiplicativity and weight commutation"

    def checks(self, ctx: FlagContext) -> List[CheckSpec]:
        return [
            CheckSpec("k4_routes", "soibelman", checks.check_k4_routes),
            CheckSpec("k4_vacuum", "soibelman", checks.check_k4_vacuum),
            CheckSpec("k_identity", "relations", checks.check_k_identity),
            CheckSpec("k_multiplicative", "relations", checks.check_k_multiplicative),
            CheckSpec("k_commutation", "relations", checks.check_k_commutation),
            CheckSpec("projector_form", "soibelman", checks.check_projector_form),
        ]


class XOperatorSuite(VerificationSuite):
    """The operators x_r^{+-}."""

    suite_name = "xoperators"

    @property
    def name(self) -> str:
        return "xoperators"

    @property
    def description(self) -> str:
        return "Both constructions of x_r^+, weights, vacuum behaviour and adjointness"

    def checks(self, ctx: FlagContext) -> List[CheckSpec]:
        return [
            CheckSpec("x_routes", "soibelman", checks.check_x_routes),
            CheckSpec("x_weights", "relations", checks.check_x_weights),
            CheckSpec("x_vacuum", "relations", checks.check_x_vacuum),
            CheckSpec("x_unitarity", "soibelman", checks.check_x_unitarity),
        ]
