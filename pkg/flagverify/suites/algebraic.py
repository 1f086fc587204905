"""
Suites that exercise U_q(g), its modules, R-matrices and Pol(G_q) without theta_w.
"""
from __future__ import annotations
from typing import List

from .. import checks
from ..context import FlagContext
from . import CheckSpec, VerificationSuite


class ModuleSuite(VerificationSuite):
    """Irreducible and conjugate modules, Hopf axioms, invariant vectors."""

    suite_name = "modules"

    @property
    def name(self) -> str:
        return "modules"

    @property
    def description(self) -> str:
        return "Weyl dimensions, module relations, Hopf axioms and U_q(k_S)-invariants"

    def checks(self, ctx: FlagContext) -> List[CheckSpec]:
        return [
            CheckSpec("irrep_dimensions", "module", checks.check_irrep_dimensions),
            CheckSpec("irrep_relations", "module", checks.check_irrep_relations),
            CheckSpec("conjugate_relations", "module", checks.check_conjugate_modules),
            CheckSpec("hopf_axioms", "module", checks.check_hopf_axioms),
            CheckSpec("invariant_vectors", "module", checks.check_invariant_vectors),
            CheckSpec("degeneration_slope", "degeneration", checks.check_degeneration_slope),
        ]


class RMatrixSuite(VerificationSuite):

    suite_name = "rmatrix"

    @property
    def name(self) -> str:
        return "rmatrix"

    @property
    def description(self) -> str:
        return "Universal R-matrix on pairs of fundamental modules"

    def checks(self, ctx: FlagContext) -> List[CheckSpec]:
        return [
            CheckSpec("intertwining", "rmatrix", checks.check_rmatrix_intertwining),
            CheckSpec("triangularity", "rmatrix", checks.check_rmatrix_triangularity),
            CheckSpec("adjoint_flip", "rmatrix", checks.check_rmatrix_adjoint),
            CheckSpec("yang_baxter", "rmatrix", checks.check_yang_baxter),
            CheckSpec("highest_compression", "rmatrix", checks.check_highest_compression),
        ]


class PolSuite(VerificationSuite):

    suite_name = "pol"

    @property
    def name(self) -> str:
        return "pol"

    @property
    def description(self) -> str:
        return "Switching identities, involution and coinvariance in Pol(G_q)"

    def checks(self, ctx: FlagContext) -> List[CheckSpec]:
        return [
            CheckSpec("switch_form1", "pairing", checks.check_switch_form1),
            CheckSpec("switch_form2", "pairing", checks.check_switch_form2),
            CheckSpec("star_pairing", "pairing", checks.check_pol_star),
            CheckSpec("coinvariance", "pairing", checks.check_coinvariance),
        ]
