"""Run configuration and the catalog of verification cases."""

from .presets import DEFAULT_CATALOG, PRESETS, CasePreset
from .run_config import Gates, RunConfig, RunConfigValidationError

__all__ = [
    "DEFAULT_CATALOG",
    "PRESETS",
    "CasePreset",
    "Gates",
    "RunConfig",
    "RunConfigValidationError",
]
