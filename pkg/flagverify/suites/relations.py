"""
The defining relations of U_q(g; S) under psi, and the equivariance of theta_w.
"""
from __future__ import annotations
from functools import partial
from typing import List

from .. import checks
from ..context import FlagContext
from . import CheckSpec, VerificationSuite


class RelationSuite(VerificationSuite):

    suite_name = "relations"

    @property
    def name(self) -> str:
        return "relations"

    @property
    def description(self) -> str:
        return "Fitted epsilon_r, cross commutators, Serre and ad-nilpotency relations, central elements"

    def checks(self, ctx: FlagContext) -> List[CheckSpec]:
        specs = []
        for r in ctx.datum.nodes:
            specs.append(CheckSpec(f"epsilon_fit_r{r + 1}", "relations", partial(checks.check_epsilon_fit, r=r)))
            specs.append(
                CheckSpec(f"epsilon_target_r{r + 1}", "epsilon", partial(checks.check_epsilon_target, r=r))
            )
        if ctx.datum.rank > 1:
            specs.extend([
                CheckSpec("cross_commutators", "relations", checks.check_cross_commutators),
                CheckSpec("serre_plus", "relations", checks.check_serre_plus),
                CheckSpec("serre_minus", "relations", checks.check_serre_minus),
                CheckSpec("adnil", "relations", checks.check_adnil),
            ])
        for r in ctx.datum.nodes:
            specs.append(CheckSpec(f"eps_identity_r{r + 1}", "relations", partial(checks.check_eps_identity, r=r)))
            specs.append(CheckSpec(f"centrality_r{r + 1}", "relations", partial(checks.check_centrality, r=r)))
        return specs


class EquivarianceSuite(VerificationSuite):

    suite_name = "equivariance"

    @property
    def name(self) -> str:
        return "equivariance"

    @property
    def description(self) -> str:
        return "Right action of E_r, F_r, L_omega on coinvariants against x_r^{+-}, k_omega"

    def checks(self, ctx: FlagContext) -> List[CheckSpec]:
        return [
            CheckSpec("action_E", "relations", checks.check_action_E),
            CheckSpec("action_F", "relations", checks.check_action_F),
            CheckSpec("action_L", "relations", checks.check_action_L),
            CheckSpec("fin_part", "relations", checks.check_fin_part),
        ]
