from __future__ import annotations
from typing import List

from .. import checks
from ..context import FlagContext
from . import CheckSpec, VerificationSuite

# Types for which the vacuum test on theta_w(U(h_rho, h_{w^{-1} rho})) is run.
VACUUM_TYPES = {("A", 1), ("A", 2)}


class SoibelmanSuite(VerificationSuite):
    """theta_w on the truncated Fock space."""

    suite_name = "soibelman"

    @property
    def name(self) -> str:
        return "soibelman"

    @property
    def description(self) -> str:
        return "Homomorphism, involution, Demazure vanishing and commutation scalars of theta_w"

    def checks(self, ctx: FlagContext) -> List[CheckSpec]:
        specs = [
            CheckSpec("homomorphism", "soibelman", checks.check_theta_homomorphism),
            CheckSpec("star", "soibelman", checks.check_theta_star),
            CheckSpec("demazure_vanishing", "soibelman", checks.check_demazure_vanishing),
            CheckSpec("highest_diagonal", "soibelman", checks.check_highest_diagonal),
        ]
        if (ctx.datum.lie_type, ctx.datum.rank) in VACUUM_TYPES:
            specs.append(CheckSpec("vacuum_uniqueness", "soibelman", checks.check_vacuum_uniqueness))
        specs.append(CheckSpec("commutation_scalars", "soibelman", checks.check_commutation_scalars))
        specs.append(CheckSpec("word_independence", "soibelman", checks.check_word_independence))
        return specs
