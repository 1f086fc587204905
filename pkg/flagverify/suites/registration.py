"""
Suite registry setup.
"""


def setup_suites(registry):
    """Register all verification suites, cheapest first."""
    # Import here to avoid circular imports
    from .algebraic import ModuleSuite, PolSuite, RMatrixSuite
    from .representation import SoibelmanSuite
    from .operators import KOperatorSuite, XOperatorSuite
    from .relations import EquivarianceSuite, RelationSuite

    registry.register(ModuleSuite)
    registry.register(RMatrixSuite)
    registry.register(PolSuite)
    registry.register(SoibelmanSuite)
    registry.register(KOperatorSuite)
    registry.register(XOperatorSuite)
    registry.register(RelationSuite)
    registry.register(EquivarianceSuite)
